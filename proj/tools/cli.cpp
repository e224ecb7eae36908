#include "cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace ripkit::cli {

namespace {

struct Leaf {
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  CLI::Option* config = nullptr;
};

// Flat command name to its place in the subcommand tree.
const std::map<std::string, std::pair<std::string, std::string>> kNesting = {
    {"transform-left", {"transform", "left"}},
    {"transform-right", {"transform", "right"}},
    {"dict-bound", {"dict", "bound"}},
    {"dict-experiment", {"dict", "experiment"}},
};

const std::map<std::string, std::string> kGroupHelp = {
    {"transform", "envelopes of the products A Phi (left) and Phi B (right)"},
    {"dict", "restricted isometry of Phi B for a dictionary B"},
};

}  // namespace

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Restricted isometry, concentration and sparse recovery experiments", "ripkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> groups;
  std::map<std::string, Leaf> leaves;

  for (const CommandSpec& spec : command_specs()) {
    CLI::App* parent = &app;
    std::string name = spec.name;
    if (const auto it = kNesting.find(spec.name); it != kNesting.end()) {
      auto& group = groups[it->second.first];
      if (!group) {
        group = app.add_subcommand(it->second.first, kGroupHelp.at(it->second.first));
        group->require_subcommand(1);
      }
      parent = group;
      name = it->second.second;
    }
    Leaf leaf;
    leaf.app = parent->add_subcommand(name, spec.help);
    for (const ParamSpec& p : spec.params) {
      std::string help = p.help;
      if (p.fallback) help += " [default: " + *p.fallback + "]";
      leaf.options.emplace_back(p.name,
                                leaf.app->add_option("--" + p.name, values[spec.name][p.name], help));
    }
    leaf.config = leaf.app->add_option("--config", config_paths[spec.name],
                                       "key=value file; flags take precedence");
    leaves[spec.name] = leaf;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    throw EarlyExit{code == 0 ? kExitOk : kExitUsage, out.str(), err.str()};
  }

  for (const auto& [command, leaf] : leaves) {
    if (!leaf.app->parsed()) continue;
    std::map<std::string, std::string> flags;
    for (const auto& [name, opt] : leaf.options)
      if (opt->count() > 0) flags[name] = values[command][name];
    std::optional<std::filesystem::path> file;
    if (leaf.config->count() > 0) file = config_paths[command];
    return resolve_config(command, flags, file);
  }
  throw UsageError("no command given");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = parse_config(args);
  } catch (const EarlyExit& e) {
    out << e.out;
    err << e.err;
    return e.code;
  } catch (const IoError& e) {
    err << "ripkit: error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {  // UsageError and config ParseError
    err << "ripkit: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::string label = config.command;
  std::replace(label.begin(), label.end(), '-', ' ');
  try {
    const ReportEnvelope report = run(config);
    write_output(config.output_path, render(report, config.format), out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "ripkit " << label << ": usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "ripkit " << label << ": i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {  // malformed input matrix
    err << "ripkit " << label << ": input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "ripkit " << label << ": error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace ripkit::cli

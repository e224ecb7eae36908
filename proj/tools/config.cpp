#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace ripkit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<CommandSpec> build_specs() {
  const std::vector<ParamSpec> shared = {
      {"seed", "base seed of every random draw", "0"},
      {"format", "csv, json-lines or text", "csv"},
      {"output", "output file, '-' for stdout", "-"},
      {"workers", "parallel workers, 0 = all hardware threads", "1"},
  };
  std::vector<CommandSpec> specs = {
      {"ric",
       "restricted isometry constant of a matrix file or a seeded ensemble draw",
       {{"matrix", "matrix file", std::nullopt},
        {"ensemble", "gaussian or rademacher (instead of --matrix)", std::nullopt},
        {"rows", "ensemble rows", std::nullopt},
        {"cols", "ensemble columns", std::nullopt},
        {"order", "sparsity order k", std::nullopt},
        {"mode", "exact or sample", "exact"},
        {"trials", "sampled supports in sample mode", "10000"},
        {"budget", "largest support count enumerated exactly", "10000000"},
        {"scale", "also report the constant of scale * matrix", std::nullopt}}},
      {"concentration",
       "Monte Carlo tail of | |Phi x|^2 - 1 | against the concentration bound",
       {{"ensemble", "gaussian or rademacher", "gaussian"},
        {"rows", "rows n of Phi", std::nullopt},
        {"cols", "columns N of Phi", std::nullopt},
        {"epsilon", "deviation level in (0, 1)", std::nullopt},
        {"trials", "Monte Carlo trials", "10000"},
        {"epsilon1", "deviation level of the outer factor A (composition mode)", std::nullopt},
        {"outer-rows", "rows m of the outer factor A (composition mode)", std::nullopt},
        {"sweep", "comma-separated row counts, replaces --rows", std::nullopt},
        {"plot", "write tail-vs-rows plot data here", std::nullopt}}},
      {"transform-left",
       "envelope of A Phi from the gram spectrum of A",
       {{"a", "matrix file for A", std::nullopt},
        {"phi", "matrix file for Phi", std::nullopt},
        {"ensemble", "draw Phi (rows = columns of A) from this ensemble", std::nullopt},
        {"cols", "columns of the drawn Phi", std::nullopt},
        {"order", "sparsity order k", std::nullopt},
        {"delta", "delta_k of Phi when no Phi is given", std::nullopt},
        {"budget", "largest support count enumerated exactly", "10000000"}}},
      {"transform-right",
       "per-support singular value envelope of Phi B",
       {{"b", "matrix file for B (N x q)", std::nullopt},
        {"phi", "matrix file for Phi", std::nullopt},
        {"ensemble", "draw Phi (columns = rows of B) from this ensemble", std::nullopt},
        {"rows", "rows of the drawn Phi", std::nullopt},
        {"order", "sparsity order k < N", std::nullopt},
        {"delta", "delta_k of Phi when no Phi is given", std::nullopt},
        {"p", "per-support success probability for the union bound", std::nullopt},
        {"epsilon", "derive p from concentration at this level and --rows", std::nullopt},
        {"budget", "largest support count enumerated exactly", "10000000"}}},
      {"dict-bound",
       "delta_B + delta_Phi (1 + delta_B) for a dictionary B",
       {{"delta-b", "delta_k of B", std::nullopt},
        {"delta-phi", "delta_k of Phi", std::nullopt},
        {"b", "matrix file for B, replaces --delta-b", std::nullopt},
        {"phi", "matrix file for Phi, replaces --delta-phi", std::nullopt},
        {"ensemble", "draw Phi from this ensemble, replaces --delta-phi", std::nullopt},
        {"rows", "rows of the drawn Phi", std::nullopt},
        {"cols", "columns of the drawn Phi", std::nullopt},
        {"order", "sparsity order k for computed constants", std::nullopt},
        {"budget", "largest support count enumerated exactly", "10000000"}}},
      {"dict-experiment",
       "frequency of delta_k(Phi B) <= delta_B + delta_Phi (1 + delta_B) over draws of Phi",
       {{"b", "matrix file for B", std::nullopt},
        {"dictionary", "identity or redundant ([I | H], H orthonormal), instead of --b",
         std::nullopt},
        {"extra", "columns of H for a redundant dictionary", std::nullopt},
        {"ensemble", "law of Phi", "gaussian"},
        {"rows", "rows n of Phi", std::nullopt},
        {"cols", "columns N of Phi", std::nullopt},
        {"order", "sparsity order k", std::nullopt},
        {"trials", "draws of Phi", "100"},
        {"budget", "largest support count enumerated exactly", "10000000"}}},
      {"recover",
       "basis pursuit recovery of k-sparse signals",
       {{"ensemble", "law of Phi", "gaussian"},
        {"rows", "measurements n", std::nullopt},
        {"cols", "signal length N", std::nullopt},
        {"sparsity", "nonzeros k", std::nullopt},
        {"trials", "independent trials", "100"},
        {"tol", "primal and dual relative tolerance", "1e-07"},
        {"max-iters", "iteration cap per solve", "5000"},
        {"rho", "penalty parameter", "1"}}},
      {"dimension",
       "largest admissible order and required rows",
       {{"N", "signal length", std::nullopt},
        {"n", "measurements", std::nullopt},
        {"c1", "order constant", "0.5"},
        {"k", "order for the row requirement (default: the largest admissible order)",
         std::nullopt},
        {"delta", "target delta_k for the row requirement", std::nullopt},
        {"t", "tail parameter, success probability 1 - exp(-t)", "1"},
        {"C", "row constant", "1"}}},
  };
  for (auto& s : specs) s.params.insert(s.params.end(), shared.begin(), shared.end());
  return specs;
}

std::uint64_t parse_count(const std::string& name, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec == std::errc() && ptr == end) return out;
  // Accept integral reals such as 1e7 for budgets.
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size() && d >= 0.0 && d < 1.8e19 && std::floor(d) == d)
      return static_cast<std::uint64_t>(d);
  } catch (const std::exception&) {
  }
  throw UsageError("--" + name + ": expected a nonnegative integer, got '" + value + "'");
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& s : command_specs())
    if (s.name == name) return s;
  throw UsageError("unknown command '" + name + "'");
}

bool ExperimentConfig::has(const std::string& name) const { return parameters.count(name) > 0; }

const std::string& ExperimentConfig::text(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end())
    throw UsageError(command + ": missing required parameter --" + name);
  return it->second;
}

double ExperimentConfig::real(const std::string& name) const {
  const std::string& v = text(name);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("--" + name + ": expected a real number, got '" + v + "'");
}

std::uint64_t ExperimentConfig::count(const std::string& name) const {
  return parse_count(name, text(name));
}

std::vector<std::uint64_t> ExperimentConfig::counts(const std::string& name) const {
  const std::string& v = text(name);
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    out.push_back(parse_count(name, trim(v.substr(start, comma - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  auto out = parameters;
  out["command"] = command;
  return out;
}

std::vector<ConfigEntry> read_config_stream(std::istream& in) {
  std::vector<ConfigEntry> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key=value", number);
    ConfigEntry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), number};
    if (e.key.empty()) throw ParseError("config: empty key", number);
    if (e.value.empty()) throw ParseError("config: empty value for '" + e.key + "'", number);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return read_config_stream(in);
}

ExperimentConfig resolve_config(const std::string& command,
                                const std::map<std::string, std::string>& flags,
                                const std::optional<std::filesystem::path>& config_file) {
  const CommandSpec& spec = find_command(command);
  auto declared = [&](const std::string& key) {
    return std::any_of(spec.params.begin(), spec.params.end(),
                       [&](const ParamSpec& p) { return p.name == key; });
  };

  ExperimentConfig cfg;
  cfg.command = command;
  for (const auto& p : spec.params)
    if (p.fallback) cfg.parameters[p.name] = *p.fallback;
  if (config_file) {
    for (const auto& e : read_config_file(*config_file)) {
      if (!declared(e.key))
        throw UsageError(config_file->string() + ": line " + std::to_string(e.line) +
                         ": unknown key '" + e.key + "' for " + command);
      cfg.parameters[e.key] = e.value;
    }
  }
  for (const auto& [k, v] : flags) {
    if (!declared(k)) throw UsageError("unknown parameter --" + k + " for " + command);
    cfg.parameters[k] = v;
  }

  cfg.seed = cfg.count("seed");
  cfg.output_path = cfg.text("output");
  try {
    cfg.format = parse_output_format(cfg.text("format"));
  } catch (const DomainError& e) {
    throw UsageError(std::string("--format: ") + e.what());
  }
  const auto w = cfg.count("workers");
  if (w > 4096) throw UsageError("--workers: at most 4096");
  cfg.workers = static_cast<unsigned>(w);
  return cfg;
}

}  // namespace ripkit::cli

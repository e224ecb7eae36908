#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"
#include "report.hpp"
#include "ripkit/error.hpp"
#include "ripkit/matrix_io.hpp"
#include "test_support.hpp"

using namespace ripkit;
using namespace ripkit::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("ripkit_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path file(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
  }
};

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Invocation r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CsvReport parse(const std::string& text) {
  std::istringstream in(text);
  return parse_report_csv(in);
}

const CsvBlock& block(const CsvReport& r, const std::string& type) {
  for (const auto& b : r.blocks)
    if (b.type == type) return b;
  FAIL("missing record " << type);
  throw std::logic_error("unreachable");
}

std::string cell(const CsvBlock& b, const std::string& column, std::size_t row = 0) {
  for (std::size_t c = 0; c < b.columns.size(); ++c)
    if (b.columns[c] == column) return b.rows.at(row).at(c);
  FAIL("missing column " << column);
  return "";
}

// Largest k <= min(n, N - 1) with k ln(N/k) <= c1 n, by direct scan.
std::size_t order_scan(std::size_t n, std::size_t big_n, double c1) {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= std::min(n, big_n - 1); ++k)
    if (k * std::log(double(big_n) / double(k)) <= c1 * double(n)) best = k;
  return best;
}

}  // namespace

TEST_CASE("parse_config resolves flags, defaults and files") {
  Scratch s;
  const auto cfg = parse_config({"ric", "--matrix", "m.txt", "--order", "3", "--seed", "7"});
  CHECK(cfg.command == "ric");
  CHECK(cfg.text("matrix") == "m.txt");
  CHECK(cfg.count("order") == 3);
  CHECK(cfg.seed == 7);
  CHECK(cfg.text("mode") == "exact");
  CHECK(cfg.format == OutputFormat::csv);
  CHECK(cfg.output_path == "-");

  const auto file = s.file("ric.cfg", "# comment\norder = 3\nseed=11\n");
  const auto mixed = parse_config({"ric", "--config", file.string(), "--order", "4"});
  CHECK(mixed.count("order") == 4);
  CHECK(mixed.seed == 11);

  const auto nested = parse_config({"transform", "left", "--a", "a.txt", "--delta", "0.2",
                                    "--order", "2"});
  CHECK(nested.command == "transform-left");
  CHECK(parse_config({"dict", "experiment", "--dictionary", "identity"}).command ==
        "dict-experiment");

  SUBCASE("unknown config keys are rejected with their line") {
    const auto bad = s.file("bad.cfg", "order=3\n\nwibble=1\n");
    try {
      parse_config({"ric", "--config", bad.string()});
      FAIL("accepted an unknown key");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("wibble") != std::string::npos);
    }
  }
  SUBCASE("malformed config lines carry their number") {
    const auto bad = s.file("bad.cfg", "order=3\nno equals sign\n");
    try {
      parse_config({"ric", "--config", bad.string()});
      FAIL("accepted a malformed line");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("bad values") {
    CHECK_THROWS_AS(parse_config({"ric", "--seed", "-1"}), UsageError);
    CHECK_THROWS_AS(parse_config({"ric", "--format", "xml"}), UsageError);
    CHECK(parse_config({"ric", "--budget", "1e7"}).count("budget") == 10'000'000);
    CHECK_THROWS_AS(parse_config({"ric", "--budget", "1.5"}).count("budget"), UsageError);
  }
}

TEST_CASE("exit codes") {
  Scratch s;
  CHECK(invoke({"--help"}).code == kExitOk);
  CHECK(invoke({"--version"}).out.find(kToolVersion) != std::string::npos);

  const auto none = invoke({"ric", "--order", "2"});
  CHECK(none.code == kExitUsage);
  CHECK(none.err.find("--matrix") != std::string::npos);
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  CHECK(invoke({"dimension", "--N", "10"}).err.find("--n") != std::string::npos);
  CHECK(invoke({"dimension", "--N", "10", "--n", "4", "--c1", "0"}).code == kExitComputation);
  CHECK(invoke({"dimension", "--N", "4", "--n", "10"}).code == kExitComputation);

  CHECK(invoke({"ric", "--matrix", (s.dir / "absent.txt").string(), "--order", "1"}).code ==
        kExitIo);
  const auto broken = s.file("broken.txt", "2 2\n1 0\n0\n");
  CHECK(invoke({"ric", "--matrix", broken.string(), "--order", "1"}).code == kExitIo);
  CHECK(invoke({"ric", "--config", (s.dir / "absent.cfg").string()}).code == kExitIo);
  CHECK(invoke({"dimension", "--N", "100", "--n", "20", "--output",
                (s.dir / "no" / "such" / "dir.csv").string()})
            .code == kExitIo);
}

TEST_CASE("ric on the identity") {
  Scratch s;
  const auto m = s.dir / "eye.txt";
  save_matrix(m, Matrix::identity(6));
  const auto r = invoke({"ric", "--matrix", m.string(), "--order", "2"});
  REQUIRE(r.code == kExitOk);
  const auto report = parse(r.out);
  const auto& rip = block(report, "rip");
  CHECK(std::stod(cell(rip, "delta")) == 0.0);
  CHECK(report.metadata.at("tool_version") == kToolVersion);
  CHECK(report.metadata.at("config.order") == "2");

  const auto over = invoke({"ric", "--matrix", m.string(), "--order", "3", "--budget", "5"});
  CHECK(over.code == kExitComputation);
}

TEST_CASE("dimension matches the order scan") {
  const auto r = invoke({"dimension", "--N", "1024", "--n", "256", "--c1", "0.5"});
  REQUIRE(r.code == kExitOk);
  const auto report = parse(r.out);
  const auto& b = block(report, "max_order");
  CHECK(std::stoul(cell(b, "k")) == order_scan(256, 1024, 0.5));
  CHECK(order_scan(256, 1024, 0.5) == 39);
}

TEST_CASE("payloads are reproducible") {
  const std::vector<std::string> base = {"recover", "--rows",  "12",   "--cols", "24",
                                         "--sparsity", "2", "--trials", "6", "--seed", "5"};
  const auto one = execute(parse_config(base));
  const auto again = execute(parse_config(base));
  CHECK(render_payload(one, OutputFormat::csv) == render_payload(again, OutputFormat::csv));

  auto parallel_args = base;
  parallel_args.insert(parallel_args.end(), {"--workers", "4"});
  const auto parallel = execute(parse_config(parallel_args));
  CHECK(render_payload(one, OutputFormat::json_lines) ==
        render_payload(parallel, OutputFormat::json_lines));

  auto other_seed = base;
  other_seed.back() = "6";
  CHECK(render_payload(execute(parse_config(other_seed)), OutputFormat::csv) !=
        render_payload(one, OutputFormat::csv));
}

TEST_CASE("every command emits a parseable report in each format") {
  Scratch s;
  const auto a = s.dir / "a.txt";
  const auto b = s.dir / "b.txt";
  save_matrix(a, testing::random_matrix(20, 16, 2));
  save_matrix(b, testing::random_matrix(8, 10, 3));
  const std::vector<std::vector<std::string>> invocations = {
      {"ric", "--ensemble", "gaussian", "--rows", "6", "--cols", "9", "--order", "2"},
      {"ric", "--ensemble", "rademacher", "--rows", "6", "--cols", "9", "--order", "2",
       "--mode", "sample", "--trials", "50"},
      {"concentration", "--rows", "16", "--cols", "8", "--epsilon", "0.5", "--trials", "200"},
      {"concentration", "--rows", "16", "--cols", "8", "--epsilon", "0.25", "--epsilon1", "0.25",
       "--outer-rows", "12", "--trials", "200"},
      {"transform", "left", "--a", a.string(), "--ensemble", "gaussian", "--cols", "20",
       "--order", "1"},
      {"transform", "right", "--b", b.string(), "--delta", "0.2", "--order", "2", "--p", "0.999"},
      {"dict", "bound", "--delta-b", "0.1", "--delta-phi", "0.2"},
      {"dict", "experiment", "--dictionary", "redundant", "--extra", "3", "--rows", "8",
       "--cols", "6", "--order", "2", "--trials", "5"},
      {"recover", "--rows", "10", "--cols", "20", "--sparsity", "2", "--trials", "3"},
      {"dimension", "--N", "500", "--n", "100", "--delta", "0.3"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args.front());
    const auto csv = invoke(args);
    REQUIRE(csv.code == kExitOk);
    const auto report = parse(csv.out);
    CHECK_FALSE(report.blocks.empty());
    CHECK(report.metadata.count("timestamp") == 1);

    auto jl_args = args;
    jl_args.insert(jl_args.end(), {"--format", "json-lines"});
    const auto jl = invoke(jl_args);
    REQUIRE(jl.code == kExitOk);
    std::istringstream lines(jl.out);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("record"));
      if (count == 0) CHECK(j["record"] == "envelope");
      ++count;
    }
    std::size_t rows = 1;
    for (const auto& blk : report.blocks) rows += blk.rows.size();
    CHECK(count == rows);

    auto text_args = args;
    text_args.insert(text_args.end(), {"--format", "text"});
    CHECK(invoke(text_args).code == kExitOk);
  }
}

TEST_CASE("CSV reader is strict") {
  CHECK_THROWS(parse("# record=x\na,b\n1\n"));
  CHECK_THROWS(parse("a,b\n1,2\n"));
  CHECK_THROWS(parse("# record=x\na,b\n1,2\n\n\n# record=y\nc\n3\n"));
  const auto ok = parse("# k=v\n# record=x\na,b\n1,2\n\n# record=y\nc\n3\n");
  CHECK(ok.metadata.at("k") == "v");
  REQUIRE(ok.blocks.size() == 2);
  CHECK(ok.blocks[1].rows[0][0] == "3");
}

TEST_CASE("plot data") {
  Scratch s;
  const auto path = s.dir / "plot.csv";
  emit_plot_data({{"tail", {{3.0, 0.1}, {1.0, 0.3}, {2.0, 0.2}}}}, path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "series,x,y");
  CHECK(lines[1].rfind("tail,1,", 0) == 0);
  CHECK(lines[3].rfind("tail,3,", 0) == 0);

  const auto two = render_plot_data({{"b", {{1.0, 1.0}}}, {"a", {{2.0, 2.0}, {1.0, 1.0}}}});
  CHECK(two == "series,x,y\na,1,1\na,2,2\nb,1,1\n");

  CHECK_THROWS_AS(emit_plot_data({}, path), DomainError);
  CHECK_THROWS_AS(emit_plot_data({{"empty", {}}}, path), DomainError);
  CHECK_THROWS_AS(emit_plot_data({{"t", {{1.0, 1.0}}}}, s.dir / "missing" / "p.csv"), IoError);

  const auto sweep_plot = s.dir / "sweep.csv";
  const auto r = invoke({"concentration", "--cols", "8", "--epsilon", "0.5", "--trials", "100",
                         "--sweep", "16,4,8", "--plot", sweep_plot.string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream sweep(sweep_plot);
  std::size_t n = 0;
  for (std::string l; std::getline(sweep, l);) ++n;
  CHECK(n == 7);  // header plus empirical and bound series of three points
}

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "ripkit/error.hpp"
#include "ripkit/matrix_io.hpp"

namespace ripkit::cli {

namespace {

using Json = nlohmann::ordered_json;

Json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      c);
}

void render_csv_block(std::ostream& out, const Record& r) {
  out << "# record=" << r.type << '\n';
  for (std::size_t j = 0; j < r.columns.size(); ++j) out << (j ? "," : "") << r.columns[j];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_cell(row[j]);
    out << '\n';
  }
}

void render_csv(std::ostream& out, const Payload& payload) {
  for (std::size_t i = 0; i < payload.size(); ++i) {
    if (i) out << '\n';
    render_csv_block(out, payload[i]);
  }
}

void render_json_lines(std::ostream& out, const Payload& payload) {
  for (const auto& r : payload) {
    for (const auto& row : r.rows) {
      Json line;
      line["record"] = r.type;
      for (std::size_t j = 0; j < row.size(); ++j) line[r.columns[j]] = to_json(row[j]);
      out << line.dump() << '\n';
    }
  }
}

void render_text(std::ostream& out, const Payload& payload) {
  for (std::size_t i = 0; i < payload.size(); ++i) {
    const Record& r = payload[i];
    if (i) out << '\n';
    out << '[' << r.type << "]\n";
    if (r.rows.size() == 1) {
      std::size_t width = 0;
      for (const auto& c : r.columns) width = std::max(width, c.size());
      for (std::size_t j = 0; j < r.columns.size(); ++j)
        out << "  " << r.columns[j] << std::string(width - r.columns[j].size(), ' ') << " = "
            << format_cell(r.rows[0][j]) << '\n';
      continue;
    }
    std::vector<std::size_t> width(r.columns.size());
    for (std::size_t j = 0; j < r.columns.size(); ++j) width[j] = r.columns[j].size();
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : r.rows) {
      auto& line = cells.emplace_back();
      for (std::size_t j = 0; j < row.size(); ++j) {
        line.push_back(format_cell(row[j]));
        width[j] = std::max(width[j], line.back().size());
      }
    }
    auto emit = [&](const std::vector<std::string>& line) {
      out << ' ';
      for (std::size_t j = 0; j < line.size(); ++j)
        out << ' ' << line[j] << std::string(width[j] - line[j].size(), ' ');
      out << '\n';
    };
    emit(r.columns);
    for (const auto& line : cells) emit(line);
  }
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

Record& Record::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error("record '" + type + "' expects " + std::to_string(columns.size()) +
                " fields, got " + std::to_string(row.size()));
  rows.push_back(std::move(row));
  return *this;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json-lines") return OutputFormat::json_lines;
  if (name == "text") return OutputFormat::text;
  throw DomainError("unknown format '" + name + "' (expected csv, json-lines or text)");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv:
      return "csv";
    case OutputFormat::json_lines:
      return "json-lines";
    case OutputFormat::text:
      return "text";
  }
  return "csv";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buf;
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, double>)
          return format_real(v);
        else if constexpr (std::is_same_v<T, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      c);
}

std::string render_payload(const Payload& payload, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::csv:
      render_csv(out, payload);
      break;
    case OutputFormat::json_lines:
      render_json_lines(out, payload);
      break;
    case OutputFormat::text:
      render_text(out, payload);
      break;
  }
  return out.str();
}

std::string render(const ReportEnvelope& report, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::csv:
      out << "# tool_version=" << report.tool_version << '\n'
          << "# timestamp=" << report.timestamp << '\n';
      for (const auto& [k, v] : report.config_echo) out << "# config." << k << '=' << v << '\n';
      break;
    case OutputFormat::json_lines: {
      Json head;
      head["record"] = "envelope";
      head["tool_version"] = report.tool_version;
      head["timestamp"] = report.timestamp;
      head["config"] = Json::object();
      for (const auto& [k, v] : report.config_echo) head["config"][k] = v;
      out << head.dump() << '\n';
      break;
    }
    case OutputFormat::text:
      out << "ripkit " << report.tool_version << "  " << report.timestamp << '\n';
      for (const auto& [k, v] : report.config_echo) out << "  " << k << ": " << v << '\n';
      out << '\n';
      break;
  }
  out << render_payload(report.payload, format);
  return out.str();
}

CsvReport parse_report_csv(std::istream& in) {
  CsvReport out;
  std::string line;
  std::size_t number = 0;
  enum class State { metadata, header, rows, gap } state = State::metadata;
  const std::string marker = "# record=";
  while (std::getline(in, line)) {
    ++number;
    if (line.rfind(marker, 0) == 0) {
      if (state == State::header) throw ParseError("record marker without a header", number);
      if (state == State::rows) throw ParseError("missing blank line before a record marker", number);
      out.blocks.push_back({line.substr(marker.size()), {}, {}});
      if (out.blocks.back().type.empty()) throw ParseError("empty record type", number);
      state = State::header;
      continue;
    }
    switch (state) {
      case State::metadata: {
        if (line.rfind("# ", 0) != 0) throw ParseError("expected metadata or a record marker", number);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("metadata line without '='", number);
        out.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
        break;
      }
      case State::header:
        out.blocks.back().columns = split_commas(line);
        for (const auto& c : out.blocks.back().columns)
          if (c.empty()) throw ParseError("empty column name", number);
        state = State::rows;
        break;
      case State::rows: {
        if (line.empty()) {
          state = State::gap;
          break;
        }
        auto fields = split_commas(line);
        if (fields.size() != out.blocks.back().columns.size())
          throw ParseError("row has " + std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(out.blocks.back().columns.size()),
                           number);
        out.blocks.back().rows.push_back(std::move(fields));
        break;
      }
      case State::gap:
        throw ParseError("expected a record marker after a blank line", number);
    }
  }
  if (state == State::header) throw ParseError("record without a header", number);
  if (state == State::gap) throw ParseError("trailing blank line", number);
  return out;
}

std::string render_plot_data(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw DomainError("emit_plot_data: no series given");
  struct Row {
    std::string name;
    double x, y;
  };
  std::vector<Row> rows;
  for (const auto& s : series) {
    if (s.name.empty() || s.name.find_first_of(",\n") != std::string::npos)
      throw DomainError("emit_plot_data: invalid series name '" + s.name + "'");
    for (const auto& [x, y] : s.points) rows.push_back({s.name, x, y});
  }
  if (rows.empty()) throw DomainError("emit_plot_data: no points given");
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.name != b.name ? a.name < b.name : a.x < b.x;
  });
  std::string out = "series,x,y\n";
  for (const auto& r : rows) out += r.name + ',' + format_real(r.x) + ',' + format_real(r.y) + '\n';
  return out;
}

void emit_plot_data(const std::vector<PlotSeries>& series, const std::filesystem::path& path) {
  const std::string text = render_plot_data(series);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot data to " + path.string());
  out << text;
  if (!out) throw IoError("failed writing plot data to " + path.string());
}

void write_output(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write output to " + path);
  out << text;
  if (!out) throw IoError("failed writing output to " + path);
}

}  // namespace ripkit::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ripkit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

using Cell = std::variant<bool, std::int64_t, std::uint64_t, double, std::string>;

/// One record type: a named table with a fixed column schema.
struct Record {
  std::string type;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Record(std::string type, std::vector<std::string> columns)
      : type(std::move(type)), columns(std::move(columns)) {}
  /// Appends a row; throws if its width differs from the schema.
  Record& add(std::vector<Cell> row);
};

using Payload = std::vector<Record>;

enum class OutputFormat { csv, json_lines, text };

OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat f);

struct ReportEnvelope {
  std::string tool_version = kToolVersion;
  /// Fully resolved configuration, including defaults.
  std::map<std::string, std::string> config_echo;
  std::string timestamp;
  Payload payload;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

std::string format_cell(const Cell& c);

/// Records only, without envelope metadata; the unit of determinism checks.
std::string render_payload(const Payload& payload, OutputFormat format);
/// Envelope metadata followed by the payload.
std::string render(const ReportEnvelope& report, OutputFormat format);

/// Strict reader for the CSV report layout: optional '#' metadata lines, then
/// per record a "# record=<type>" line, a header and rows of equal width,
/// blocks separated by one blank line.
struct CsvBlock {
  std::string type;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
struct CsvReport {
  std::map<std::string, std::string> metadata;
  std::vector<CsvBlock> blocks;
};
CsvReport parse_report_csv(std::istream& in);

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// "series,x,y" CSV, rows sorted by (series, x).
std::string render_plot_data(const std::vector<PlotSeries>& series);
void emit_plot_data(const std::vector<PlotSeries>& series, const std::filesystem::path& path);

/// Writes text to path, or to `fallback` when path is "-".
void write_output(const std::string& path, const std::string& text, std::ostream& fallback);

}  // namespace ripkit::cli

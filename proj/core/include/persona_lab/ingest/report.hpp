#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace persona_lab::ingest {

enum class CellKind { Empty, Text, Integer, Percent, Fraction, Real };

/// One report value with its fixed rendering rule: percentages 2 decimals,
/// fractions 4 decimals, raw reals shortest round-trip.
class Cell {
 public:
  static Cell empty() { return Cell(CellKind::Empty); }
  static Cell text(std::string s);
  static Cell integer(long long n);
  static Cell percent(double v);
  static Cell fraction(double v);
  static Cell real(double v);
  static Cell percent_or_empty(const std::optional<double>& v) { return v ? percent(*v) : empty(); }
  static Cell fraction_or_empty(const std::optional<double>& v) { return v ? fraction(*v) : empty(); }

  CellKind kind() const { return kind_; }
  std::string render() const;
  nlohmann::ordered_json to_json() const;

 private:
  explicit Cell(CellKind kind) : kind_(kind) {}
  CellKind kind_;
  std::string text_;
  double number_ = 0.0;
  long long integer_ = 0;
};

struct ReportTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class ReportFormat { Csv, Json };

std::string extension_for(ReportFormat format);

/// CSV: header plus one line per row. JSON: array of objects whose keys follow
/// the column order.
void write_report(std::ostream& out, const ReportTable& table, ReportFormat format);
std::string render_report(const ReportTable& table, ReportFormat format);

/// Writes the table to `path`; throws IoError when the path is not writable.
void persist_report(const ReportTable& table, const std::string& path, ReportFormat format);

void persist_json(const nlohmann::ordered_json& doc, const std::string& path);

/// Minimal SVG heatmap of a matrix table: first column holds row labels, the
/// rest numeric cells. Positive values shade green, negative red.
std::string render_heatmap_svg(const ReportTable& matrix, const std::string& title);

}  // namespace persona_lab::ingest

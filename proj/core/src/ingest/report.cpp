#include "persona_lab/ingest/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/ingest/csv.hpp"

namespace persona_lab::ingest {

Cell Cell::text(std::string s) {
  Cell c(CellKind::Text);
  c.text_ = std::move(s);
  return c;
}

Cell Cell::integer(long long n) {
  Cell c(CellKind::Integer);
  c.integer_ = n;
  return c;
}

Cell Cell::percent(double v) {
  Cell c(CellKind::Percent);
  c.number_ = v;
  return c;
}

Cell Cell::fraction(double v) {
  Cell c(CellKind::Fraction);
  c.number_ = v;
  return c;
}

Cell Cell::real(double v) {
  Cell c(CellKind::Real);
  c.number_ = v;
  return c;
}

std::string Cell::render() const {
  switch (kind_) {
    case CellKind::Empty: return "";
    case CellKind::Text: return text_;
    case CellKind::Integer: return std::to_string(integer_);
    case CellKind::Percent: return format_fixed(number_, 2);
    case CellKind::Fraction: return format_fixed(number_, 4);
    case CellKind::Real: return format_shortest(number_);
  }
  return "";
}

nlohmann::ordered_json Cell::to_json() const {
  switch (kind_) {
    case CellKind::Empty: return nullptr;
    case CellKind::Text: return text_;
    case CellKind::Integer: return integer_;
    case CellKind::Real: return number_;
    case CellKind::Percent:
    case CellKind::Fraction:
      // Round through the fixed rendering so CSV and JSON agree.
      return parse_double(render());
  }
  return nullptr;
}

std::string extension_for(ReportFormat format) {
  return format == ReportFormat::Csv ? ".csv" : ".json";
}

void write_report(std::ostream& out, const ReportTable& table, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    write_csv_row(out, table.columns);
    for (const auto& row : table.rows) {
      std::vector<std::string> fields;
      fields.reserve(row.size());
      for (const Cell& c : row) fields.push_back(c.render());
      write_csv_row(out, fields);
    }
    return;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i) {
      obj[table.columns[i]] = row[i].to_json();
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

std::string render_report(const ReportTable& table, ReportFormat format) {
  std::ostringstream out;
  write_report(out, table, format);
  return out.str();
}

void persist_report(const ReportTable& table, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path);
  write_report(out, table, format);
  if (!out) throw IoError("write failed for " + path);
}

void persist_json(const nlohmann::ordered_json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::string render_heatmap_svg(const ReportTable& matrix, const std::string& title) {
  constexpr int cell_w = 72, cell_h = 24, label_w = 80, header_h = 48;
  const int cols = static_cast<int>(matrix.columns.size()) - 1;
  const int rows = static_cast<int>(matrix.rows.size());

  double max_abs = 0.0;
  for (const auto& row : matrix.rows) {
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c].kind() != CellKind::Empty && row[c].kind() != CellKind::Text) {
        max_abs = std::max(max_abs, std::abs(parse_double(row[c].render())));
      }
    }
  }
  if (max_abs == 0.0) max_abs = 1.0;

  auto escape = [](const std::string& s) {
    std::string out;
    for (char ch : s) {
      if (ch == '<') out += "&lt;";
      else if (ch == '>') out += "&gt;";
      else if (ch == '&') out += "&amp;";
      else out += ch;
    }
    return out;
  };

  std::ostringstream svg;
  const int width = label_w + cols * cell_w + 8;
  const int height = header_h + rows * cell_h + 8;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"4\" y=\"14\" font-size=\"13\">" << escape(title) << "</text>\n";
  for (int c = 0; c < cols; ++c) {
    svg << "<text x=\"" << label_w + c * cell_w + cell_w / 2 << "\" y=\"" << header_h - 8
        << "\" text-anchor=\"middle\">" << escape(matrix.columns[c + 1]) << "</text>\n";
  }
  for (int r = 0; r < rows; ++r) {
    const auto& row = matrix.rows[r];
    const int y = header_h + r * cell_h;
    svg << "<text x=\"4\" y=\"" << y + cell_h / 2 + 4 << "\">" << escape(row[0].render())
        << "</text>\n";
    for (int c = 0; c < cols; ++c) {
      const Cell& cell = row[c + 1];
      const std::string label = cell.render();
      std::string fill = "#eeeeee";
      if (!label.empty() && cell.kind() != CellKind::Text) {
        const double v = parse_double(label);
        const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::min(1.0, std::abs(v) / max_abs))));
        std::ostringstream color;
        color << "rgb(" << (v < 0 ? 255 : shade) << ',' << (v > 0 ? 255 : shade) << ',' << shade << ')';
        fill = color.str();
      }
      const int x = label_w + c * cell_w;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
          << cell_h << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
      svg << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
          << "\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace persona_lab::ingest

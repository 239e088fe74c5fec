#include "depmet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "depmet/error.hpp"

namespace depmet {

namespace fs = std::filesystem;

ResultTable::ResultTable(std::string title_, std::string row_header_,
                         std::vector<std::string> columns)
    : title(std::move(title_)), row_header(std::move(row_header_)),
      column_labels(std::move(columns)) {}

void ResultTable::add_row(std::string label, const std::vector<double>& values) {
  if (values.size() != cols())
    throw Error(ErrorKind::InvalidArgument, "row '" + label + "' has " +
                                                std::to_string(values.size()) + " cells, expected " +
                                                std::to_string(cols()));
  row_labels.push_back(std::move(label));
  cells.insert(cells.end(), values.begin(), values.end());
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename into " + path.string());
  }
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::IoError, "CSV: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw Error(ErrorKind::IoError, "CSV: not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string to_csv(const ResultTable& t) {
  if (t.cells.size() != t.rows() * t.cols())
    throw Error(ErrorKind::InvalidArgument, "table cell count does not match its shape");
  std::string out = csv_field(t.row_header);
  for (const auto& c : t.column_labels) out += "," + csv_field(c);
  out += "\n";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out += csv_field(t.row_labels[r]);
    for (std::size_t c = 0; c < t.cols(); ++c) out += "," + format_real(t.at(r, c));
    out += "\n";
  }
  return out;
}

void write_csv(const ResultTable& t, const fs::path& path) {
  write_file_atomic(path, to_csv(t));
  nlohmann::json meta = t.metadata;
  meta["title"] = t.title;
  fs::path meta_path = path;
  meta_path += ".meta.json";
  write_file_atomic(meta_path, meta.dump(2) + "\n");
}

ResultTable parse_csv(const std::string& text) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw Error(ErrorKind::IoError, "CSV: missing header row");
  ResultTable t;
  t.row_header = rows[0][0];
  t.column_labels.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw Error(ErrorKind::IoError, "CSV: row " + std::to_string(r + 1) + " has " +
                                          std::to_string(rows[r].size()) + " fields, expected " +
                                          std::to_string(rows[0].size()));
    std::vector<double> values;
    for (std::size_t c = 1; c < rows[r].size(); ++c) values.push_back(parse_real(rows[r][c]));
    t.add_row(rows[r][0], values);
  }
  return t;
}

ResultTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const Error& e) {
    throw Error(ErrorKind::IoError, path.string() + ": " + e.what());
  }
}

PlotSpec::PlotSpec(PlotKind kind, std::string title, std::string x_label, std::string y_label,
                   std::vector<PlotSeries> series)
    : kind_(kind), title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)), series_(std::move(series)) {
  if (series_.empty()) throw Error(ErrorKind::InvalidArgument, "plot has no series");
  for (const auto& s : series_) {
    if (s.x.empty()) throw Error(ErrorKind::InvalidArgument, "series '" + s.label + "' is empty");
    if (s.x.size() != s.y.size())
      throw Error(ErrorKind::InvalidArgument, "series '" + s.label + "' has mismatched x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        throw Error(ErrorKind::InvalidArgument, "series '" + s.label + "' has a non-finite point");
      if (s.y[i] < 0.0 || s.y[i] > 1.0)
        throw Error(ErrorKind::InvalidArgument, "series '" + s.label + "' ordinate outside [0, 1]");
    }
  }
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Roughly five ticks at 1/2/5 multiples covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + step * 1e-9; t += step)
    ticks.push_back(t);
  return ticks;
}

}  // namespace

std::string to_svg(const PlotSpec& p) {
  constexpr double W = 760, H = 480, L = 70, R = 170, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  double xlo = HUGE_VAL, xhi = -HUGE_VAL;
  for (const auto& s : p.series())
    for (double x : s.x) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
  if (xhi - xlo < 1e-12) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  const double ylo = 0.0, yhi = 1.0;
  auto sx = [&](double x) { return L + (x - xlo) / (xhi - xlo) * pw; };
  auto sy = [&](double y) { return T + (yhi - y) / (yhi - ylo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text class=\"title\" x=\"" << num(L + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << xml_escape(p.title()) << "</text>\n";
  o << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  o << "<line x1=\"" << num(L) << "\" y1=\"" << num(T + ph) << "\" x2=\"" << num(L + pw) << "\" y2=\""
    << num(T + ph) << "\"/>\n";
  o << "<line x1=\"" << num(L) << "\" y1=\"" << num(T) << "\" x2=\"" << num(L) << "\" y2=\""
    << num(T + ph) << "\"/>\n";
  o << "</g>\n<g class=\"ticks\">\n";
  for (double t : nice_ticks(xlo, xhi)) {
    o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(T + ph) << "\" x2=\"" << num(sx(t))
      << "\" y2=\"" << num(T + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(T + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi)) {
    o << "<line x1=\"" << num(L - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(L)
      << "\" y2=\"" << num(sy(t)) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(L - 8) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << num(L + pw / 2) << "\" y=\"" << num(H - 15) << "\" text-anchor=\"middle\">"
    << xml_escape(p.x_label()) << "</text>\n";
  o << "<text x=\"18\" y=\"" << num(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << num(T + ph / 2) << ")\">" << xml_escape(p.y_label()) << "</text>\n";

  const auto& series = p.series();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    if (p.kind() == PlotKind::PowerCurve) {
      o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << colour
        << "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o << (i ? " " : "") << num(sx(s.x[i])) << "," << num(sy(s.y[i]));
      o << "\"/>\n";
    } else {
      o << "<g class=\"series\" fill=\"" << colour << "\" fill-opacity=\"0.5\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"1.6\"/>\n";
      o << "</g>\n";
    }
  }
  o << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = T + 10 + 20.0 * static_cast<double>(k);
    const char* colour = kPalette[k % std::size(kPalette)];
    o << "<rect x=\"" << num(L + pw + 15) << "\" y=\"" << num(y - 9) << "\" width=\"14\" height=\"10\" fill=\""
      << colour << "\"/>";
    o << "<text class=\"legend-entry\" x=\"" << num(L + pw + 35) << "\" y=\"" << num(y) << "\">"
      << xml_escape(series[k].label) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void render_svg(const PlotSpec& p, const fs::path& path) { write_file_atomic(path, to_svg(p)); }

}  // namespace depmet

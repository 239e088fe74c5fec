#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace depmet {

/// A labelled real matrix plus the metadata needed to re-run what produced it.
struct ResultTable {
  std::string title;
  std::string row_header = "label";
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<double> cells;  // row-major
  nlohmann::json metadata = nlohmann::json::object();

  ResultTable() = default;
  ResultTable(std::string title, std::string row_header, std::vector<std::string> columns);

  /// Throws InvalidArgument if values.size() != cols().
  void add_row(std::string label, const std::vector<double>& values);

  std::size_t rows() const { return row_labels.size(); }
  std::size_t cols() const { return column_labels.size(); }
  double at(std::size_t r, std::size_t c) const { return cells.at(r * cols() + c); }
};

/// "%.17g"; "nan", "inf", "-inf" for non-finite values.
std::string format_real(double v);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string to_csv(const ResultTable& t);

/// CSV body plus `<path>.meta.json` holding t.title and t.metadata.
/// Throws IoError naming the path on failure.
void write_csv(const ResultTable& t, const std::filesystem::path& path);

/// Inverse of to_csv; title and metadata are left empty.
ResultTable parse_csv(const std::string& text);
ResultTable read_csv(const std::filesystem::path& path);

enum class PlotKind { PowerCurve, EquitabilityScatter };

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Validated at construction: at least one series, every series nonempty with
/// matching finite coordinates and ordinates in [0, 1].
class PlotSpec {
 public:
  PlotSpec(PlotKind kind, std::string title, std::string x_label, std::string y_label,
           std::vector<PlotSeries> series);

  PlotKind kind() const { return kind_; }
  const std::string& title() const { return title_; }
  const std::string& x_label() const { return x_label_; }
  const std::string& y_label() const { return y_label_; }
  const std::vector<PlotSeries>& series() const { return series_; }

 private:
  PlotKind kind_;
  std::string title_, x_label_, y_label_;
  std::vector<PlotSeries> series_;
};

/// Standalone SVG: axes with tick labels, a legend entry per series, and a
/// polyline (power curves) or point group (scatter) per series.
std::string to_svg(const PlotSpec& p);
void render_svg(const PlotSpec& p, const std::filesystem::path& path);

}  // namespace depmet

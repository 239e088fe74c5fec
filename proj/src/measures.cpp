#include "depmet/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "depmet/error.hpp"

namespace depmet {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::TooFewObservations, "pearson needs n >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::ZeroVariance, "pearson: constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double pearson(const PairedSample& s) { return pearson(s.x, s.y); }

std::vector<double> rank_midrank(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
    i = j;
  }
  return ranks;
}

double spearman(const PairedSample& s) {
  const auto rx = rank_midrank(s.x);
  const auto ry = rank_midrank(s.y);
  return pearson(rx, ry);
}

namespace {

// Row means of |v_j - v_l| and their grand mean.
void distance_means(std::span<const double> v, std::vector<double>& row, double& grand) {
  const std::size_t n = v.size();
  row.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) acc += std::fabs(v[j] - v[l]);
    row[j] = acc / static_cast<double>(n);
  }
  grand = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(n);
}

}  // namespace

double dist_corr(const PairedSample& s) {
  const std::size_t n = s.size();
  if (n <= 4) {
    throw Error(ErrorKind::TooFewObservations,
                "distance correlation needs n >= 5, got " + std::to_string(n));
  }
  std::vector<double> ax, by;
  double agrand = 0.0, bgrand = 0.0;
  distance_means(s.x, ax, agrand);
  distance_means(s.y, by, bgrand);

  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double a = std::fabs(s.x[j] - s.x[k]) - ax[j] - ax[k] + agrand;
      const double b = std::fabs(s.y[j] - s.y[k]) - by[j] - by[k] + bgrand;
      sab += a * b;
      saa += a * a;
      sbb += b * b;
    }
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double vxy = sab / nn;
  const double denom = std::sqrt((saa / nn) * (sbb / nn));
  if (!(denom > 0.0)) return 0.0;
  const double ratio = std::max(vxy, 0.0) / denom;
  return std::min(std::sqrt(ratio), 1.0);
}

std::size_t equal_frequency_bin_count(std::size_t n) {
  const auto bins = static_cast<std::size_t>(std::pow(static_cast<double>(n), 1.0 / 3.0));
  return std::max<std::size_t>(bins, 2);
}

std::vector<int> discretize_equal_frequency(std::span<const double> v, std::size_t bins) {
  const std::size_t n = v.size();
  if (bins < 2) throw Error(ErrorKind::InvalidArgument, "discretize: bins must be >= 2");
  if (n < bins) throw Error(ErrorKind::InvalidArgument, "discretize: fewer values than bins");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  if (v[order.front()] == v[order.back()]) {
    throw Error(ErrorKind::DegenerateBins, "discretize: fewer than 2 distinct values");
  }
  std::vector<int> labels(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    // a tie run is binned by its middle order statistic
    const double mid = 0.5 * static_cast<double>(i + j - 1);
    auto label = static_cast<std::size_t>(std::floor(mid * static_cast<double>(bins) /
                                                     static_cast<double>(n)));
    label = std::min(label, bins - 1);
    for (std::size_t k = i; k < j; ++k) labels[order[k]] = static_cast<int>(label);
    i = j;
  }
  return labels;
}

ContingencyTable::ContingencyTable(const std::vector<std::vector<long>>& counts) {
  if (counts.empty() || counts.front().empty()) {
    throw Error(ErrorKind::InvalidArgument, "contingency table must be non-empty");
  }
  rows_ = counts.size();
  cols_ = counts.front().size();
  counts_.reserve(rows_ * cols_);
  for (const auto& row : counts) {
    if (row.size() != cols_) throw Error(ErrorKind::InvalidArgument, "ragged contingency table");
    for (long c : row) {
      if (c < 0) throw Error(ErrorKind::InvalidArgument, "negative cell count");
      counts_.push_back(c);
      total_ += c;
    }
  }
  if (total_ <= 0) throw Error(ErrorKind::InvalidArgument, "contingency table total must be > 0");
}

ContingencyTable::ContingencyTable(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::InvalidArgument, "label vectors must be non-empty and equal length");
  }
  const int ra = *std::max_element(a.begin(), a.end());
  const int cb = *std::max_element(b.begin(), b.end());
  if (*std::min_element(a.begin(), a.end()) < 0 || *std::min_element(b.begin(), b.end()) < 0) {
    throw Error(ErrorKind::InvalidArgument, "labels must be nonnegative");
  }
  rows_ = static_cast<std::size_t>(ra) + 1;
  cols_ = static_cast<std::size_t>(cb) + 1;
  counts_.assign(rows_ * cols_, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++counts_[static_cast<std::size_t>(a[i]) * cols_ + static_cast<std::size_t>(b[i])];
  }
  total_ = static_cast<long>(a.size());
}

ContingencyTable ContingencyTable::transposed() const {
  ContingencyTable t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.total_ = total_;
  t.counts_.resize(counts_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t.counts_[j * rows_ + i] = counts_[i * cols_ + j];
  }
  return t;
}

double mutual_info_naive(const ContingencyTable& t, LogBase base) {
  std::vector<double> row(t.rows(), 0.0), col(t.cols(), 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      row[i] += static_cast<double>(t.at(i, j));
      col[j] += static_cast<double>(t.at(i, j));
    }
  }
  const double total = static_cast<double>(t.total());
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const double c = static_cast<double>(t.at(i, j));
      if (c == 0.0) continue;
      mi += (c / total) * std::log(c * total / (row[i] * col[j]));
    }
  }
  mi = std::max(mi, 0.0);
  return base == LogBase::Bits ? mi / std::log(2.0) : mi;
}

double information_coefficient(double mutual_info_nats) {
  return std::sqrt(-std::expm1(-2.0 * std::max(mutual_info_nats, 0.0)));
}

R1Result r1_detailed(const PairedSample& s) {
  const std::size_t n = s.size();
  if (n <= 7) {
    throw Error(ErrorKind::TooFewObservations, "r1 needs n >= 8, got " + std::to_string(n));
  }
  R1Result out;
  out.bins = equal_frequency_bin_count(n);
  const auto lx = discretize_equal_frequency(s.x, out.bins);
  const auto ly = discretize_equal_frequency(s.y, out.bins);
  const ContingencyTable table(lx, ly);
  out.mutual_info_nats = mutual_info_naive(table, LogBase::Nats);
  out.mutual_info_bits = out.mutual_info_nats / std::log(2.0);
  out.value = information_coefficient(out.mutual_info_nats);
  return out;
}

double r1_coefficient(const PairedSample& s) { return r1_detailed(s).value; }

}  // namespace depmet

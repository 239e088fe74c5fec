#include "oracles.hpp"

#include <cmath>
#include <algorithm>
#include <map>

namespace oracle {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++less;
      if (w == v[i]) ++equal;
    }
    r[i] = 1.0 + less + (equal - 1) / 2.0;
  }
  return r;
}

double distance_covariance_sq(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double nn = static_cast<double>(n);
  auto a = [&](std::size_t k, std::size_t l) { return std::fabs(x[k] - x[l]); };
  auto b = [&](std::size_t k, std::size_t l) { return std::fabs(y[k] - y[l]); };
  double s1 = 0, sa = 0, sb = 0, s3 = 0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      s1 += a(k, l) * b(k, l);
      sa += a(k, l);
      sb += b(k, l);
      for (std::size_t m = 0; m < n; ++m) s3 += a(k, l) * b(k, m);
    }
  return s1 / (nn * nn) + sa * sb / (nn * nn * nn * nn) - 2.0 * s3 / (nn * nn * nn);
}

double distance_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double vxy = distance_covariance_sq(x, y);
  const double vx = distance_covariance_sq(x, x);
  const double vy = distance_covariance_sq(y, y);
  if (vx * vy <= 0) return 0.0;
  return std::sqrt(std::max(0.0, vxy) / std::sqrt(vx * vy));
}

namespace {

double literal_v2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double nn = static_cast<double>(n);
  auto centred = [&](const std::vector<double>& v, std::size_t j, std::size_t k) {
    double rj = 0, rk = 0, all = 0;
    for (std::size_t l = 0; l < n; ++l) {
      rj += std::fabs(v[j] - v[l]);
      rk += std::fabs(v[k] - v[l]);
      for (std::size_t h = 0; h < n; ++h) all += std::fabs(v[l] - v[h]);
    }
    return std::fabs(v[j] - v[k]) - rj / nn - rk / nn + all / (nn * nn);
  };
  double s = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) s += centred(x, j, k) * centred(y, j, k);
  return s / (nn * nn);
}

// Labels 0.. for sorted distinct values, cut after the distinct-value
// positions set in `mask`.
std::vector<int> partition_labels(const std::vector<double>& v, const std::vector<double>& distinct,
                                  unsigned mask) {
  std::vector<int> lab(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), v[i]) - distinct.begin());
    int c = 0;
    for (std::size_t b = 0; b < pos; ++b)
      if (mask & (1u << b)) ++c;
    lab[i] = c;
  }
  return lab;
}

}  // namespace

double distance_correlation_literal(const std::vector<double>& x, const std::vector<double>& y) {
  const double vxy = literal_v2(x, y), vx = literal_v2(x, x), vy = literal_v2(y, y);
  if (vx * vy <= 0) return 0.0;
  return std::sqrt(std::max(0.0, vxy) / std::sqrt(vx * vy));
}

double mic_brute_force(const std::vector<double>& x, const std::vector<double>& y, int max_cells) {
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto dx = distinct(x), dy = distinct(y);
  const unsigned mx = 1u << (dx.size() - 1), my = 1u << (dy.size() - 1);
  double best = 0;
  for (unsigned a = 1; a < mx; ++a) {
    const int nx = __builtin_popcount(a) + 1;
    if (2 * nx > max_cells) continue;
    const auto xl = partition_labels(x, dx, a);
    for (unsigned b = 1; b < my; ++b) {
      const int ny = __builtin_popcount(b) + 1;
      if (nx * ny > max_cells) continue;
      const double score = mutual_info_labels(xl, partition_labels(y, dy, b)) / std::log(std::min(nx, ny));
      best = std::max(best, score);
    }
  }
  return best;
}

double mutual_info(const std::vector<std::vector<double>>& counts) {
  double total = 0;
  std::vector<double> rs(counts.size(), 0), cs(counts[0].size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      total += counts[i][j];
      rs[i] += counts[i][j];
      cs[j] += counts[i][j];
    }
  double mi = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      const double p = counts[i][j] / total;
      if (p > 0) mi += p * std::log(p / ((rs[i] / total) * (cs[j] / total)));
    }
  return mi;
}

double mutual_info_labels(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ia, ib;
  for (int v : a) ia.emplace(v, 0);
  for (int v : b) ib.emplace(v, 0);
  int k = 0;
  for (auto& [v, idx] : ia) idx = k++;
  k = 0;
  for (auto& [v, idx] : ib) idx = k++;
  std::vector<std::vector<double>> counts(ia.size(), std::vector<double>(ib.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) counts[ia[a[i]]][ib[b[i]]] += 1;
  return mutual_info(counts);
}

double best_column_mi(const std::vector<int>& clumps, const std::vector<int>& rows, int max_cols) {
  std::vector<std::size_t> boundaries;  // cut before position i
  for (std::size_t i = 1; i < clumps.size(); ++i)
    if (clumps[i] != clumps[i - 1]) boundaries.push_back(i);
  const std::size_t m = boundaries.size();
  double best = 0;
  for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
    if (__builtin_popcountl(mask) + 1 > max_cols) continue;
    std::vector<int> cols(clumps.size());
    int c = 0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < clumps.size(); ++i) {
      while (next < m && boundaries[next] == i) {
        if (mask & (1UL << next)) ++c;
        ++next;
      }
      cols[i] = c;
    }
    best = std::max(best, mutual_info_labels(cols, rows));
  }
  return best;
}

}  // namespace oracle

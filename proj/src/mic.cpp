#include "depmet/mic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "depmet/error.hpp"
#include "depmet/measures.hpp"

namespace depmet {

namespace {

std::vector<std::size_t> argsort(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

// Greedy equipartition over the sequence of values; ties never straddle a
// row boundary. Returns the labels and the number of rows produced.
template <typename T>
std::vector<int> equipartition_values(std::span<const T> v, int k, int& rows_out) {
  const std::size_t n = v.size();
  std::vector<int> labels(n);
  double rowsize = static_cast<double>(n) / k;
  std::size_t i = 0, h = 0;
  int curr = 0;
  while (i < n) {
    std::size_t s = 1;
    while (i + s < n && v[i + s] == v[i]) ++s;
    const double hs = static_cast<double>(h + s);
    const double hd = static_cast<double>(h);
    if (h != 0 && std::fabs(hs - rowsize) >= std::fabs(hd - rowsize)) {
      ++curr;
      rowsize = static_cast<double>(n - i) / (k - curr);
      h = 0;
    }
    for (std::size_t j = 0; j < s; ++j) labels[i + j] = curr;
    i += s;
    h += s;
  }
  rows_out = curr + 1;
  return labels;
}

// x log x for integer counts, with 0 log 0 = 0.
class NLogN {
 public:
  explicit NLogN(std::size_t n) : table_(n + 1, 0.0) {
    for (std::size_t i = 2; i <= n; ++i) {
      const double d = static_cast<double>(i);
      table_[i] = d * std::log(d);
    }
  }
  double operator()(long k) const { return table_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<double> table_;
};

// Row entropy of the points strictly inside clumps (s, t] (1-based clump
// prefix counts), from cumulative per-row histograms.
double conditional_row_entropy(const std::vector<long>& cumhist, int q, int p, int s, int t,
                               const std::vector<long>& c, const NLogN& nlogn) {
  const long total = c[t] - c[s];
  if (total <= 0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < q; ++i) {
    const long cnt = cumhist[static_cast<std::size_t>(i) * (p + 1) + t] -
                     cumhist[static_cast<std::size_t>(i) * (p + 1) + s];
    acc += nlogn(cnt);
  }
  const double tot = static_cast<double>(total);
  return std::log(tot) - acc / tot;
}

std::size_t capped_binomial(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (r > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(r)));
}

// Calls fn(cuts) for every strictly increasing choice of `count` cut indices
// from [0, slots).
template <typename Fn>
void for_each_combination(std::size_t slots, std::size_t count, Fn&& fn) {
  if (count > slots) return;
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(count) - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == slots - count + static_cast<std::size_t>(i)) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < count; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Start offsets (in sorted order) of each run of equal values.
std::vector<std::size_t> run_starts(std::span<const double> sorted) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) starts.push_back(i);
  }
  return starts;
}

// One orientation of the characteristic matrix: the `rows_axis` values are
// partitioned into rows and the `cols_axis` values optimized into columns.
void fill_orientation(std::span<const double> cols_axis, std::span<const double> rows_axis,
                      const MicConfig& cfg, CharacteristicMatrix& m, bool transpose) {
  const std::size_t n = cols_axis.size();
  const double bound = m.bound();
  const auto ox = argsort(cols_axis);
  const auto oy = argsort(rows_axis);
  std::vector<double> xs(n), ys(n);
  std::vector<std::size_t> rank_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cols_axis[ox[i]];
    ys[i] = rows_axis[oy[i]];
    rank_y[oy[i]] = i;
  }
  const auto ystarts = run_starts(ys);
  if (ystarts.size() < 2 || xs.front() == xs.back()) return;  // every grid has zero information

  const auto qmax = static_cast<int>(std::floor(bound / 2.0));
  auto store = [&](int cols, int rows, int rows_norm, double mi) {
    const double norm = std::log(static_cast<double>(std::min(cols, rows_norm)));
    const double v = norm > 0.0 ? mi / norm : 0.0;
    if (transpose) {
      m.offer(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), v);
    } else {
      m.offer(static_cast<std::size_t>(cols), static_cast<std::size_t>(rows), v);
    }
  };

  std::vector<int> rows_x(n);
  auto rows_in_x_order = [&](const std::vector<int>& rows_sorted_y) {
    for (std::size_t i = 0; i < n; ++i) rows_x[i] = rows_sorted_y[rank_y[ox[i]]];
  };

  // Exhaustive row search when cheap enough.
  std::size_t combos = 0;
  if (cfg.exact_budget > 0) {
    for (int q = 2; q <= qmax && combos <= cfg.exact_budget; ++q) {
      combos += capped_binomial(ystarts.size() - 1, static_cast<std::size_t>(q - 1), cfg.exact_budget);
    }
  }
  const bool exact = cfg.exact_budget > 0 && combos <= cfg.exact_budget;

  std::vector<int> rows_y(n);
  for (int q = 2; q <= qmax; ++q) {
    const auto max_cols = static_cast<int>(std::floor(bound / q));
    if (max_cols < 2) continue;
    if (exact) {
      if (ystarts.size() < static_cast<std::size_t>(q)) continue;
      std::vector<double> best(static_cast<std::size_t>(max_cols - 1), 0.0);
      for_each_combination(ystarts.size() - 1, static_cast<std::size_t>(q - 1),
                           [&](const std::vector<std::size_t>& cuts) {
                             int row = 0;
                             std::size_t next = 0;
                             for (std::size_t r = 0; r < ystarts.size(); ++r) {
                               if (next < cuts.size() && r == cuts[next] + 1) {
                                 ++row;
                                 ++next;
                               }
                               const std::size_t end = r + 1 < ystarts.size() ? ystarts[r + 1] : n;
                               for (std::size_t i = ystarts[r]; i < end; ++i) rows_y[i] = row;
                             }
                             rows_in_x_order(rows_y);
                             const auto clumps = clump_partition(xs, rows_x, 0);
                             const auto mi = optimize_x_axis(clumps, rows_x, q, max_cols);
                             for (std::size_t l = 0; l < mi.size(); ++l) best[l] = std::max(best[l], mi[l]);
                           });
      for (int l = 2; l <= max_cols; ++l) store(l, q, q, best[static_cast<std::size_t>(l - 2)]);
    } else {
      int q_real = 0;
      rows_y = equipartition_values<double>(ys, q, q_real);
      if (q_real < 2) continue;
      rows_in_x_order(rows_y);
      const auto clumps = clump_partition(xs, rows_x, cfg.clump_factor * max_cols);
      const auto mi = optimize_x_axis(clumps, rows_x, q_real, max_cols);
      for (int l = 2; l <= max_cols; ++l) store(l, q, q_real, mi[static_cast<std::size_t>(l - 2)]);
    }
  }
}

}  // namespace

double mic_cell_bound(std::size_t n, const MicConfig& cfg) {
  if (cfg.cell_bound) return *cfg.cell_bound;
  return std::max(std::pow(static_cast<double>(n), cfg.alpha), 4.0);
}

CharacteristicMatrix::CharacteristicMatrix(double bound)
    : bound_(bound), side_(static_cast<std::size_t>(std::max(2.0, std::floor(bound / 2.0)))) {
  entries_.assign((side_ + 1) * (side_ + 1), 0.0);
}

bool CharacteristicMatrix::admissible(std::size_t nx, std::size_t ny) const noexcept {
  return nx >= 2 && ny >= 2 && nx <= side_ && ny <= side_ &&
         static_cast<double>(nx * ny) <= bound_;
}

double CharacteristicMatrix::at(std::size_t nx, std::size_t ny) const {
  if (!admissible(nx, ny)) throw Error(ErrorKind::InvalidArgument, "grid resolution outside bound");
  return entries_[nx * (side_ + 1) + ny];
}

void CharacteristicMatrix::offer(std::size_t nx, std::size_t ny, double value) {
  if (!admissible(nx, ny)) return;
  double& e = entries_[nx * (side_ + 1) + ny];
  e = std::max(e, value);
}

double CharacteristicMatrix::max(std::optional<double> cell_limit) const {
  const double limit = cell_limit ? std::min(*cell_limit, bound_) : bound_;
  double best = 0.0;
  for (std::size_t nx = 2; nx <= side_; ++nx) {
    for (std::size_t ny = 2; ny <= side_; ++ny) {
      if (admissible(nx, ny) && static_cast<double>(nx * ny) <= limit) {
        best = std::max(best, entries_[nx * (side_ + 1) + ny]);
      }
    }
  }
  return best;
}

std::vector<int> equipartition_axis(std::span<const double> sorted_values, int k) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "equipartition needs k >= 2");
  if (sorted_values.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::InvalidArgument, "equipartition needs n >= k");
  }
  if (sorted_values.front() == sorted_values.back()) {
    throw Error(ErrorKind::DegenerateAxis, "equipartition needs at least 2 distinct values");
  }
  int rows = 0;
  return equipartition_values<double>(sorted_values, k, rows);
}

std::vector<int> clump_partition(std::span<const double> x_sorted, std::span<const int> rows,
                                 int max_clumps) {
  const std::size_t n = x_sorted.size();
  // Tied x runs that span several rows become a clump of their own,
  // marked with a unique negative id.
  std::vector<long> tag(rows.begin(), rows.end());
  long mixed = -1;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    bool split = false;
    while (j < n && x_sorted[j] == x_sorted[i]) {
      if (rows[j] != rows[i]) split = true;
      ++j;
    }
    if (split) {
      for (std::size_t k = i; k < j; ++k) tag[k] = mixed;
      --mixed;
    }
    i = j;
  }
  std::vector<int> clumps(n, 0);
  int id = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (tag[k] != tag[k - 1]) ++id;
    clumps[k] = id;
  }
  const int p = n > 0 ? id + 1 : 0;
  if (max_clumps > 0 && p > max_clumps) {
    int merged = 0;
    return equipartition_values<int>(std::span<const int>(clumps), max_clumps, merged);
  }
  return clumps;
}

std::vector<double> optimize_x_axis(std::span<const int> clumps, std::span<const int> rows,
                                    int num_rows, int max_cols) {
  const std::size_t n = clumps.size();
  std::vector<double> out(static_cast<std::size_t>(std::max(max_cols - 1, 0)), 0.0);
  if (n == 0 || max_cols < 2) return out;
  const int p = clumps.back() + 1;
  if (p < 2) return out;
  const int q = num_rows;
  const NLogN nlogn(n);

  // c[t]: points in clumps 1..t; cumhist[i][t]: points of row i among them.
  std::vector<long> c(static_cast<std::size_t>(p) + 1, 0);
  std::vector<long> cumhist(static_cast<std::size_t>(q) * (p + 1), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = static_cast<std::size_t>(clumps[k]) + 1;
    ++c[t];
    ++cumhist[static_cast<std::size_t>(rows[k]) * (p + 1) + t];
  }
  for (int t = 1; t <= p; ++t) {
    c[t] += c[t - 1];
    for (int i = 0; i < q; ++i) {
      const auto base = static_cast<std::size_t>(i) * (p + 1);
      cumhist[base + t] += cumhist[base + t - 1];
    }
  }
  const double total = static_cast<double>(n);
  double hq = std::log(total);
  for (int i = 0; i < q; ++i) {
    hq -= nlogn(cumhist[static_cast<std::size_t>(i) * (p + 1) + p]) / total;
  }

  // hcond[s][t] = H(rows | clumps s+1..t), s < t
  const auto stride = static_cast<std::size_t>(p) + 1;
  std::vector<double> hcond(stride * stride, 0.0);
  for (int s = 0; s < p; ++s) {
    for (int t = s + 1; t <= p; ++t) {
      hcond[static_cast<std::size_t>(s) * stride + t] =
          conditional_row_entropy(cumhist, q, p, s, t, c, nlogn);
    }
  }

  // f[t] holds the best value of -sum_cols (n_col / c_t) H(rows | col) over
  // partitions of clumps 1..t into at most l columns.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> prev(stride, neg_inf), cur(stride, neg_inf);
  for (int t = 1; t <= p; ++t) {
    double best = neg_inf;
    const double ct = static_cast<double>(c[t]);
    for (int s = 1; s <= t; ++s) {
      const double cs = static_cast<double>(c[s]);
      const double tail = s == t ? 0.0 : hcond[static_cast<std::size_t>(s) * stride + t];
      const double f = -(cs / ct) * hcond[static_cast<std::size_t>(s)] - ((ct - cs) / ct) * tail;
      if (f > best) best = f;
    }
    prev[t] = best;
  }
  out[0] = hq + prev[p];
  const int lmax_dp = std::min(max_cols, p);
  for (int l = 3; l <= lmax_dp; ++l) {
    std::fill(cur.begin(), cur.end(), neg_inf);
    for (int t = l; t <= p; ++t) {
      const double ct = static_cast<double>(c[t]);
      double best = neg_inf;
      for (int s = l - 1; s <= t; ++s) {
        const double cs = static_cast<double>(c[s]);
        const double tail = s == t ? 0.0 : hcond[static_cast<std::size_t>(s) * stride + t];
        const double f = (cs / ct) * prev[s] - ((ct - cs) / ct) * tail;
        if (f > best) best = f;
      }
      cur[t] = best;
    }
    std::swap(prev, cur);
    out[static_cast<std::size_t>(l - 2)] = hq + prev[p];
  }
  for (int l = lmax_dp + 1; l <= max_cols; ++l) {
    out[static_cast<std::size_t>(l - 2)] = out[static_cast<std::size_t>(std::max(lmax_dp, 2) - 2)];
  }
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

CharacteristicMatrix characteristic_matrix(const PairedSample& s, const MicConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "MIC alpha must be in (0, 1]");
  }
  if (cfg.clump_factor < 1) throw Error(ErrorKind::InvalidArgument, "MIC clump factor must be >= 1");
  CharacteristicMatrix m(mic_cell_bound(s.size(), cfg));
  fill_orientation(s.x, s.y, cfg, m, false);
  fill_orientation(s.y, s.x, cfg, m, true);
  return m;
}

double mic(const PairedSample& s, const MicConfig& cfg) {
  if (s.size() < 8) {
    throw Error(ErrorKind::TooFewObservations, "MIC needs n >= 8, got " + std::to_string(s.size()));
  }
  return std::clamp(characteristic_matrix(s, cfg).max(), 0.0, 1.0);
}

double mic_exhaustive_oracle(const PairedSample& s, int max_cells) {
  const std::size_t n = s.size();
  if (n > 12 || max_cells > 9) {
    throw Error(ErrorKind::InputTooLarge, "exhaustive MIC is limited to n <= 12 and 9 cells");
  }
  const auto ox = argsort(s.x);
  const auto oy = argsort(s.y);
  std::vector<double> xs(n), ys(n);
  std::vector<std::size_t> rx(n), ry(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = s.x[ox[i]];
    ys[i] = s.y[oy[i]];
    rx[ox[i]] = i;
    ry[oy[i]] = i;
  }
  const auto xstarts = run_starts(xs);
  const auto ystarts = run_starts(ys);

  // label of each sorted position given cuts between runs
  auto labels_for = [n](const std::vector<std::size_t>& starts, const std::vector<std::size_t>& cuts) {
    std::vector<int> lab(n);
    int cur = 0;
    std::size_t next = 0;
    for (std::size_t r = 0; r < starts.size(); ++r) {
      if (next < cuts.size() && r == cuts[next] + 1) {
        ++cur;
        ++next;
      }
      const std::size_t end = r + 1 < starts.size() ? starts[r + 1] : n;
      for (std::size_t i = starts[r]; i < end; ++i) lab[i] = cur;
    }
    return lab;
  };

  double best = 0.0;
  for (int nx = 2; nx <= max_cells / 2; ++nx) {
    for (int ny = 2; nx * ny <= max_cells; ++ny) {
      if (xstarts.size() < static_cast<std::size_t>(nx) || ystarts.size() < static_cast<std::size_t>(ny)) {
        continue;
      }
      const double norm = std::log(static_cast<double>(std::min(nx, ny)));
      for_each_combination(xstarts.size() - 1, static_cast<std::size_t>(nx - 1),
                           [&](const std::vector<std::size_t>& xcuts) {
        const auto xl = labels_for(xstarts, xcuts);
        for_each_combination(ystarts.size() - 1, static_cast<std::size_t>(ny - 1),
                             [&](const std::vector<std::size_t>& ycuts) {
          const auto yl = labels_for(ystarts, ycuts);
          std::vector<int> a(n), b(n);
          for (std::size_t i = 0; i < n; ++i) {
            a[i] = xl[rx[i]];
            b[i] = yl[ry[i]];
          }
          const double mi = mutual_info_naive(ContingencyTable(a, b), LogBase::Nats);
          best = std::max(best, mi / norm);
        });
      });
    }
  }
  return std::min(best, 1.0);
}

}  // namespace depmet

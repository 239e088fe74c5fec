#include "depmet/ace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "depmet/error.hpp"

namespace depmet {

namespace {

// Replace smoothed values on tied x by their mean.
void average_ties(std::span<const double> x, std::vector<double>& smo) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    double sum = smo[i];
    while (j < n && x[j] <= x[i]) sum += smo[j++];
    if (j - i > 1) {
      const double mean = sum / static_cast<double>(j - i);
      std::fill(smo.begin() + static_cast<std::ptrdiff_t>(i),
                smo.begin() + static_cast<std::ptrdiff_t>(j), mean);
    }
    i = j;
  }
}

// Running-lines smoother with a symmetric window of 2*ibw+1 points that is
// shifted (not shrunk) at the ends. Optionally returns absolute leave-one-out
// residuals in `acvr`.
void running_lines(std::span<const double> x, std::span<const double> y, double span,
                   double vsmlsq, std::vector<double>& smo, std::vector<double>* acvr) {
  const std::size_t n = x.size();
  smo.assign(n, 0.0);
  if (acvr) acvr->assign(n, 0.0);

  std::size_t ibw = static_cast<std::size_t>(0.5 * span * static_cast<double>(n) + 0.5);
  ibw = std::max<std::size_t>(ibw, 2);
  const std::size_t it = std::min(2 * ibw + 1, n);

  double xm = 0.0, ym = 0.0, var = 0.0, cvar = 0.0, fbw = 0.0, fbo = 0.0;
  for (std::size_t i = 0; i < it; ++i) {
    const double xti = x[i];
    fbo = fbw;
    fbw += 1.0;
    xm = (fbo * xm + xti) / fbw;
    ym = (fbo * ym + y[i]) / fbw;
    const double tmp = fbo > 0.0 ? fbw * (xti - xm) / fbo : 0.0;
    var += tmp * (xti - xm);
    cvar += tmp * (y[i] - ym);
  }

  for (std::size_t j = 0; j < n; ++j) {
    // 1-based window bookkeeping: drop point j-ibw, add point j+ibw+1
    const std::ptrdiff_t out = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(ibw) - 1;
    const std::size_t in = j + ibw;
    if (out >= 0 && in < n) {
      const auto o = static_cast<std::size_t>(out);
      const double xto = x[o];
      fbo = fbw;
      fbw -= 1.0;
      double tmp = fbw > 0.0 ? fbo * (xto - xm) / fbw : 0.0;
      var -= tmp * (xto - xm);
      cvar -= tmp * (y[o] - ym);
      if (fbw > 0.0) {
        xm = (fbo * xm - xto) / fbw;
        ym = (fbo * ym - y[o]) / fbw;
      }
      const double xti = x[in];
      fbo = fbw;
      fbw += 1.0;
      xm = (fbo * xm + xti) / fbw;
      ym = (fbo * ym + y[in]) / fbw;
      tmp = fbo > 0.0 ? fbw * (xti - xm) / fbo : 0.0;
      var += tmp * (xti - xm);
      cvar += tmp * (y[in] - ym);
    }
    const double slope = var > vsmlsq ? cvar / var : 0.0;
    smo[j] = slope * (x[j] - xm) + ym;
    if (acvr) {
      double h = fbw > 0.0 ? 1.0 / fbw : 0.0;
      if (var > vsmlsq) h += (x[j] - xm) * (x[j] - xm) / var;
      const double a = 1.0 - h;
      if (a > 0.0) {
        (*acvr)[j] = std::fabs(y[j] - smo[j]) / a;
      } else if (j > 0) {
        (*acvr)[j] = (*acvr)[j - 1];
      }
    }
  }
  average_ties(x, smo);
}

// Centre and scale to unit (population) variance. False when v is constant.
bool standardize(std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double& e : v) {
    e -= mean;
    ss += e * e;
  }
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-13)) return false;
  for (double& e : v) e /= sd;
  return true;
}

std::vector<std::size_t> argsort(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

}  // namespace

std::vector<double> smooth_local_mean(std::span<const double> x_sorted,
                                      std::span<const double> y, double span) {
  const std::size_t n = x_sorted.size();
  const auto k = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(span * static_cast<double>(n))));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
  const std::size_t below = (k - 1) / 2;
  const std::size_t above = k - 1 - below;
  std::vector<double> smo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= below ? i - below : 0;
    const std::size_t hi = std::min(n, i + above + 1);
    smo[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  average_ties(x_sorted, smo);
  return smo;
}

std::vector<double> super_smoother(std::span<const double> x, std::span<const double> y,
                                   double bass) {
  constexpr double kSpans[3] = {0.05, 0.2, 0.5};
  constexpr double kEps = 1e-3;
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (x[n - 1] <= x[0]) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    return std::vector<double>(n, mean);
  }
  // interquartile-ish scale for the degenerate-variance guard
  std::size_t lo = n / 4, hi = 3 * (n / 4);
  lo = lo > 0 ? lo - 1 : 0;
  hi = hi > 0 ? hi - 1 : 0;
  double scale = x[hi] - x[lo];
  while (scale <= 0.0) {
    if (hi < n - 1) ++hi;
    if (lo > 0) --lo;
    scale = x[hi] - x[lo];
  }
  const double vsmlsq = (kEps * scale) * (kEps * scale);

  std::vector<double> fits[3], cv_resid[3], acvr, tmp;
  for (int k = 0; k < 3; ++k) {
    running_lines(x, y, kSpans[k], vsmlsq, fits[k], &acvr);
    running_lines(x, acvr, kSpans[1], vsmlsq, cv_resid[k], nullptr);
  }
  std::vector<double> best_span(n);
  for (std::size_t j = 0; j < n; ++j) {
    double resmin = INFINITY;
    for (int k = 0; k < 3; ++k) {
      if (cv_resid[k][j] < resmin) {
        resmin = cv_resid[k][j];
        best_span[j] = kSpans[k];
      }
    }
    if (bass > 0.0 && bass <= 10.0 && resmin < cv_resid[2][j] && resmin > 0.0) {
      best_span[j] += (kSpans[2] - best_span[j]) *
                      std::pow(std::max(1e-7, resmin / cv_resid[2][j]), 10.0 - bass);
    }
  }
  std::vector<double> span_smooth;
  running_lines(x, best_span, kSpans[1], vsmlsq, span_smooth, nullptr);
  std::vector<double> blended(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::clamp(span_smooth[j], kSpans[0], kSpans[2]);
    const double f = s - kSpans[1];
    if (f >= 0.0) {
      const double w = f / (kSpans[2] - kSpans[1]);
      blended[j] = (1.0 - w) * fits[1][j] + w * fits[2][j];
    } else {
      const double w = -f / (kSpans[1] - kSpans[0]);
      blended[j] = (1.0 - w) * fits[1][j] + w * fits[0][j];
    }
  }
  std::vector<double> out;
  running_lines(x, blended, kSpans[0], vsmlsq, out, nullptr);
  return out;
}

AceResult max_corr_ace_detailed(const PairedSample& s, const AceConfig& cfg) {
  const std::size_t n = s.size();
  if (n < 5) {
    throw Error(ErrorKind::TooFewObservations, "ACE needs n >= 5, got " + std::to_string(n));
  }
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0) || !(cfg.bass >= 0.0 && cfg.bass <= 10.0) ||
      !(cfg.span > 0.0 && cfg.span < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "ACE needs max_iter >= 1, tol > 0, bass in [0, 10] and span in (0, 1)");
  }
  const auto ox = argsort(s.x);
  const auto oy = argsort(s.y);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = s.x[ox[i]];
    ys[i] = s.y[oy[i]];
  }
  if (xs.front() == xs.back() || ys.front() == ys.back()) {
    throw Error(ErrorKind::ZeroVariance, "ACE: constant input");
  }

  auto smooth = [&](std::span<const double> xsorted, std::span<const double> v) {
    return cfg.smoother == SmootherKind::SuperSmoother ? super_smoother(xsorted, v, cfg.bass)
                                                       : smooth_local_mean(xsorted, v, cfg.span);
  };

  AceResult res;
  res.fy.assign(s.y.begin(), s.y.end());
  standardize(res.fy);
  res.fx.assign(n, 0.0);
  std::vector<double> buf(n);
  double prev = -1.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    res.iterations = it;
    for (std::size_t i = 0; i < n; ++i) buf[i] = res.fy[ox[i]];
    auto sm = smooth(xs, buf);
    for (std::size_t i = 0; i < n; ++i) res.fx[ox[i]] = sm[i];
    if (!standardize(res.fx)) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) buf[i] = res.fx[oy[i]];
    sm = smooth(ys, buf);
    for (std::size_t i = 0; i < n; ++i) res.fy[oy[i]] = sm[i];
    if (!standardize(res.fy)) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += res.fx[i] * res.fy[i];
    const double r = std::min(std::fabs(dot / static_cast<double>(n)), 1.0);
    res.value = r;
    if (std::fabs(r - prev) < cfg.tol) {
      res.converged = true;
      break;
    }
    prev = r;
  }
  return res;
}

double max_corr_ace(const PairedSample& s, const AceConfig& cfg) {
  return max_corr_ace_detailed(s, cfg).value;
}

}  // namespace depmet

#include "depmet/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "depmet/error.hpp"

namespace depmet {

PairedSample::PairedSample(std::vector<double> xs, std::vector<double> ys)
    : x(std::move(xs)), y(std::move(ys)) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "paired sample lengths differ (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "paired sample is empty");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorKind::InvalidArgument,
                  "non-finite observation at index " + std::to_string(i));
    }
  }
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "Linear";
    case ModelKind::Logarithmic: return "Logarithmic";
    case ModelKind::Cubic: return "Cubic";
    case ModelKind::Quadratic: return "Quadratic";
    case ModelKind::Sinusoidal: return "Sinusoidal";
    case ModelKind::Piecewise: return "Piecewise";
    case ModelKind::Cross: return "Cross";
    case ModelKind::Circular: return "Circular";
    case ModelKind::Checkerboard: return "Checkerboard";
    case ModelKind::IndependentNull: return "IndependentNull";
  }
  return "?";
}

std::string_view to_string(Marginal marginal) {
  switch (marginal) {
    case Marginal::StandardNormal: return "StandardNormal";
    case Marginal::Uniform01: return "Uniform01";
    case Marginal::ExponentialRate1: return "ExponentialRate1";
    case Marginal::Poisson3: return "Poisson3";
  }
  return "?";
}

std::string_view to_string(FunctionKind fn) { return to_string(model_of(fn)); }

std::optional<ModelKind> parse_model(std::string_view name) {
  for (ModelKind k : kAllModels) {
    if (to_string(k) == name) return k;
  }
  if (name == "IndependentNull" || name == "Null") return ModelKind::IndependentNull;
  return std::nullopt;
}

std::optional<Marginal> parse_marginal(std::string_view name) {
  for (Marginal m : {Marginal::StandardNormal, Marginal::Uniform01, Marginal::ExponentialRate1,
                     Marginal::Poisson3}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<FunctionKind> function_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return FunctionKind::Linear;
    case ModelKind::Logarithmic: return FunctionKind::Logarithmic;
    case ModelKind::Cubic: return FunctionKind::Cubic;
    case ModelKind::Quadratic: return FunctionKind::Quadratic;
    case ModelKind::Sinusoidal: return FunctionKind::Sinusoidal;
    case ModelKind::Piecewise: return FunctionKind::Piecewise;
    default: return std::nullopt;
  }
}

ModelKind model_of(FunctionKind fn) {
  return static_cast<ModelKind>(static_cast<int>(fn) - 1);
}

double apply_function(FunctionKind fn, double x) {
  switch (fn) {
    case FunctionKind::Linear: return x;
    case FunctionKind::Logarithmic: return 5.0 * std::log(std::fabs(x + 5.0));
    case FunctionKind::Cubic: return 0.3 * x * x * x;
    case FunctionKind::Quadratic: return 0.7 * x * x;
    case FunctionKind::Sinusoidal: return 1.3 * std::sin(3.0 * x);
    case FunctionKind::Piecewise: {
      if (x == 0.0) return 3.0;
      const double inv = 1.0 / x;
      return std::min(std::max(inv, -3.0), 3.0);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown function kind");
}

bool checkerboard_accept(double k0, double k1) {
  const double d = std::floor(0.7 * k0) - std::floor(0.7 * k1);
  // d is an exact integer-valued double; fmod by 2 then fold into {0, 1}.
  double m = std::fmod(d, 2.0);
  if (m < 0) m += 2.0;
  return m == 0.0;
}

double sample_marginal(Rng& rng, Marginal marginal) {
  switch (marginal) {
    case Marginal::StandardNormal: return sample_normal(rng, 0.0, 1.0);
    case Marginal::Uniform01: return rng.uniform();
    case Marginal::ExponentialRate1: return sample_exponential(rng, 1.0);
    case Marginal::Poisson3: return sample_poisson(rng, 3.0);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown marginal");
}

PairedSample generate(const ModelSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::InvalidArgument, "model n must be >= 1");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw Error(ErrorKind::InvalidArgument, "model sigma must be finite and >= 0");
  }
  Rng rng(spec.seed);
  const std::size_t n = spec.n;
  const double sigma = spec.sigma;
  std::vector<double> x(n), y(n);

  if (auto fn = function_of(spec.kind)) {
    for (std::size_t i = 0; i < n; ++i) {
      double xi = sample_marginal(rng, spec.marginal);
      // log|x + 5| is undefined only at x = -5 exactly
      while (*fn == FunctionKind::Logarithmic && xi == -5.0) xi = sample_marginal(rng, spec.marginal);
      x[i] = xi;
      y[i] = apply_function(*fn, xi) + sample_normal(rng, 0.0, sigma);
    }
    return PairedSample(std::move(x), std::move(y));
  }

  switch (spec.kind) {
    case ModelKind::Cross: {
      const std::size_t half = n / 2;
      for (std::size_t i = 0; i < n; ++i) {
        const double wide = sample_normal(rng, 0.0, 1.0);
        const double narrow = sample_normal(rng, 0.0, sigma / 3.0);
        if (i < half) {
          x[i] = wide;
          y[i] = narrow;
        } else {
          x[i] = narrow;
          y[i] = wide;
        }
      }
      break;
    }
    case ModelKind::Circular: {
      for (std::size_t i = 0; i < n; ++i) {
        const double h = sample_normal(rng, 1.0, sigma / 7.0);
        const double k = sample_normal(rng, 0.0, 1.0);
        x[i] = h * std::cos(k);
        y[i] = h * std::sin(k);
      }
      break;
    }
    case ModelKind::Checkerboard: {
      std::size_t draws = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double k0 = 0.0, k1 = 0.0;
        do {
          if (++draws > kCheckerboardDrawCap) {
            throw Error(ErrorKind::RejectionCapExceeded,
                        "checkerboard rejection sampler exceeded its draw cap");
          }
          k0 = sample_normal(rng, 0.0, 1.0);
          k1 = sample_normal(rng, 0.0, 1.0);
        } while (!checkerboard_accept(k0, k1));
        x[i] = k0;
        y[i] = k1 + sample_normal(rng, 0.0, sigma / 2.0);
      }
      break;
    }
    case ModelKind::IndependentNull: {
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = sample_marginal(rng, spec.marginal);
        y[i] = sample_marginal(rng, spec.marginal);
      }
      break;
    }
    default:
      throw Error(ErrorKind::InvalidArgument, "unknown model kind");
  }
  return PairedSample(std::move(x), std::move(y));
}

}  // namespace depmet

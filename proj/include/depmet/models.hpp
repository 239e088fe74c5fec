#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "depmet/rng.hpp"
#include "depmet/sample.hpp"

namespace depmet {

enum class ModelKind {
  Linear,
  Logarithmic,
  Cubic,
  Quadratic,
  Sinusoidal,
  Piecewise,
  Cross,
  Circular,
  Checkerboard,
  IndependentNull,
};

/// Distribution of X for the functional models and of both coordinates for
/// the independence null.
enum class Marginal { StandardNormal, Uniform01, ExponentialRate1, Poisson3 };

/// The six functions f1..f6 of the functional model y = f(x) + noise.
enum class FunctionKind { Linear = 1, Logarithmic, Cubic, Quadratic, Sinusoidal, Piecewise };

inline constexpr ModelKind kAllModels[] = {
    ModelKind::Linear,     ModelKind::Logarithmic, ModelKind::Cubic,
    ModelKind::Quadratic,  ModelKind::Sinusoidal,  ModelKind::Piecewise,
    ModelKind::Cross,      ModelKind::Circular,    ModelKind::Checkerboard};

inline constexpr FunctionKind kAllFunctions[] = {
    FunctionKind::Linear,    FunctionKind::Logarithmic, FunctionKind::Cubic,
    FunctionKind::Quadratic, FunctionKind::Sinusoidal,  FunctionKind::Piecewise};

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  double sigma = 0.0;
  std::size_t n = 1000;
  Marginal marginal = Marginal::StandardNormal;
  std::uint64_t seed = 0;
};

std::string_view to_string(ModelKind kind);
std::string_view to_string(Marginal marginal);
std::string_view to_string(FunctionKind fn);
std::optional<ModelKind> parse_model(std::string_view name);
std::optional<Marginal> parse_marginal(std::string_view name);

/// Functional models map to their f_j; the non-functional ones have none.
std::optional<FunctionKind> function_of(ModelKind kind);
ModelKind model_of(FunctionKind fn);

/// f1..f6. f6 at x == 0 returns 3 (the limit from the right); f2 at x == -5
/// returns -inf and `generate` redraws such points.
double apply_function(FunctionKind fn, double x);

/// True iff floor(0.7 k0) - floor(0.7 k1) is even.
bool checkerboard_accept(double k0, double k1);

double sample_marginal(Rng& rng, Marginal marginal);

/// Draws a sample from the model. Pure function of the spec: the generator
/// is seeded from spec.seed alone.
PairedSample generate(const ModelSpec& spec);

/// Upper bound on raw draws in the checkerboard rejection loop.
inline constexpr std::size_t kCheckerboardDrawCap = 1'000'000;

}  // namespace depmet

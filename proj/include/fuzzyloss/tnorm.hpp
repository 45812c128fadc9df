#ifndef FUZZYLOSS_TNORM_HPP
#define FUZZYLOSS_TNORM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "fuzzyloss/generator.hpp"

namespace fuzzyloss {

/// A binary [0,1]-aggregator modelling conjunction: either generated from an
/// additive generator, or one of the closed-form catalog entries that admit
/// no continuous generator (Godel minimum, Drastic product).
class TNormOp {
 public:
  enum class Kind { Generated, Godel, Drastic };

  TNormOp(const GeneratorSpec& spec)  // NOLINT(implicit)
      : kind_(Kind::Generated), generator_(Generator(spec)) {
    strictness_ = generator_->strictness();
  }

  static TNormOp generated(const GeneratorSpec& spec) { return TNormOp(spec); }
  static TNormOp godel() { return TNormOp(Kind::Godel, Strictness::NotArchimedean); }
  // Drastic carries Nilpotent only for dispatch; it never reaches generator translation.
  static TNormOp drastic() { return TNormOp(Kind::Drastic, Strictness::Nilpotent); }

  Kind kind() const { return kind_; }
  Strictness strictness() const { return strictness_; }
  bool has_generator() const { return generator_.has_value(); }

  /// The resolved generator. Only valid for Kind::Generated.
  const Generator& generator() const { return *generator_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Godel: return "godel";
      case Kind::Drastic: return "drastic";
      case Kind::Generated: break;
    }
    const auto& spec = generator_->spec();
    std::string out(family_name(spec.family));
    if (spec.family == Family::SchweizerSklar || spec.family == Family::Frank) {
      out += "(" + std::to_string(spec.lambda) + ")";
    }
    return out;
  }

 private:
  TNormOp(Kind kind, Strictness s) : kind_(kind), strictness_(s) {}

  Kind kind_;
  Strictness strictness_ = Strictness::Strict;
  std::optional<Generator> generator_;
};

/// T(x,y) = g^(-1)(min{g(0+), g(x) + g(y)}) for generated ops.
inline double tnorm_eval(const TNormOp& op, double x, double y) {
  switch (op.kind()) {
    case TNormOp::Kind::Godel: return std::min(x, y);
    case TNormOp::Kind::Drastic:
      if (x == 1.0) return y;
      if (y == 1.0) return x;
      return 0.0;
    case TNormOp::Kind::Generated: break;
  }
  const Generator& g = op.generator();
  return g.inverse(min(g.at_zero(), g(x).value + g(y).value));
}

/// De Morgan dual of tnorm_eval under n(x) = 1 - x.
inline double tconorm_eval(const TNormOp& op, double x, double y) {
  return 1.0 - tnorm_eval(op, 1.0 - x, 1.0 - y);
}

/// Residual implication x => y = g^(-1)(max{0, g(y) - g(x)}).
inline double residuum(const Generator& g, double x, double y) {
  const double gx = g(x).value.value();
  const double gy = g(y).value.value();
  return g.inverse(std::max(0.0, gy - gx));
}

inline double residuum(const GeneratorSpec& spec, double x, double y) {
  return residuum(Generator(spec), x, y);
}

/// Biresiduum x <=> y = g^(-1)(|g(x) - g(y)|).
inline double biresiduum(const Generator& g, double x, double y) {
  const double gx = g(x).value.value();
  const double gy = g(y).value.value();
  return g.inverse(std::abs(gx - gy));
}

inline double biresiduum(const GeneratorSpec& spec, double x, double y) {
  return biresiduum(Generator(spec), x, y);
}

enum class AggregatorClass { Conjunctive, Disjunctive, Averaging, Hybrid };

inline std::string_view to_string(AggregatorClass c) {
  switch (c) {
    case AggregatorClass::Conjunctive: return "conjunctive";
    case AggregatorClass::Disjunctive: return "disjunctive";
    case AggregatorClass::Averaging: return "averaging";
    case AggregatorClass::Hybrid: return "hybrid";
  }
  return "?";
}

/// Classifies a binary aggregator by pointwise comparison with min and max on
/// a uniform grid_n x grid_n grid over [0,1]^2.
///
/// Conjunctive and disjunctive bounds are checked with slack `tol`. The
/// averaging test is strict and skips the diagonal, where min == max.
inline AggregatorClass classify_aggregator(const std::function<double(double, double)>& f,
                                           int grid_n, double tol = 1e-12) {
  if (grid_n < 2) throw std::invalid_argument("classify_aggregator: grid_n must be >= 2");
  bool below_min = true;
  bool above_max = true;
  bool strictly_between = true;
  const double step = 1.0 / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const double x = i * step;
      const double y = j * step;
      const double v = f(x, y);
      const double lo = std::min(x, y);
      const double hi = std::max(x, y);
      if (v > lo + tol) below_min = false;
      if (v < hi - tol) above_max = false;
      if (i != j && !(lo < v && v < hi)) strictly_between = false;
    }
  }
  if (below_min) return AggregatorClass::Conjunctive;
  if (above_max) return AggregatorClass::Disjunctive;
  if (strictly_between) return AggregatorClass::Averaging;
  return AggregatorClass::Hybrid;
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_TNORM_HPP

#ifndef FUZZYLOSS_GENERATOR_HPP
#define FUZZYLOSS_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fuzzyloss/extended_real.hpp"

namespace fuzzyloss {

enum class Family { SchweizerSklar, Frank, Lukasiewicz, Product };

enum class Strictness { Strict, Nilpotent, NotArchimedean };

/// Raised when a family parameter lies outside the family's domain.
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultEps = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Schweizer-Sklar |lambda| below this evaluates as -log(x).
inline constexpr double kSchweizerSklarLogThreshold = 1e-7;
/// Frank lambda above this evaluates as 1 - x.
inline constexpr double kFrankLinearThreshold = 1e8;

/// Identifies an additive generator: a family tag plus its real parameter.
/// `lambda` is ignored for Lukasiewicz and Product. `eps` is the clamp used
/// for arguments near 0 when the generator diverges there.
struct GeneratorSpec {
  Family family = Family::Product;
  double lambda = 0.0;
  double eps = kDefaultEps;

  static GeneratorSpec schweizer_sklar(double lambda, double eps = kDefaultEps) {
    return {Family::SchweizerSklar, lambda, eps};
  }
  static GeneratorSpec frank(double lambda, double eps = kDefaultEps) {
    return {Family::Frank, lambda, eps};
  }
  static GeneratorSpec lukasiewicz(double eps = kDefaultEps) {
    return {Family::Lukasiewicz, 0.0, eps};
  }
  static GeneratorSpec product(double eps = kDefaultEps) { return {Family::Product, 0.0, eps}; }

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::SchweizerSklar: return "ss";
    case Family::Frank: return "frank";
    case Family::Lukasiewicz: return "lukasiewicz";
    case Family::Product: return "product";
  }
  return "?";
}

/// Throws ParameterDomainError unless `spec` satisfies its family's invariants.
inline void validate(const GeneratorSpec& spec) {
  if (!(spec.eps > 0.0 && spec.eps <= 1e-3)) {
    throw ParameterDomainError("eps must lie in (0, 1e-3], got " + std::to_string(spec.eps));
  }
  switch (spec.family) {
    case Family::SchweizerSklar:
      if (!std::isfinite(spec.lambda)) {
        throw ParameterDomainError("Schweizer-Sklar lambda must be finite");
      }
      break;
    case Family::Frank:
      if (std::isnan(spec.lambda) || !(spec.lambda > 0.0)) {
        throw ParameterDomainError("Frank lambda must lie in (0, +inf], got " +
                                   std::to_string(spec.lambda));
      }
      break;
    case Family::Lukasiewicz:
    case Family::Product:
      break;
  }
}

/// g evaluated at a point, plus whether the argument was clamped to eps.
struct GeneratorValue {
  ExtendedReal value;
  bool clamped = false;
};

/// An additive generator resolved from a GeneratorSpec.
///
/// Resolution picks the numerically appropriate closed form once: the
/// limiting cases dispatch to -log(x) or 1 - x, Schweizer-Sklar uses
/// expm1/log1p forms and Frank is evaluated in the log domain.
class Generator {
 public:
  enum class Form { NegLog, OneMinus, SchweizerSklar, Frank };

  explicit Generator(const GeneratorSpec& spec) : spec_(spec) {
    validate(spec);
    switch (spec.family) {
      case Family::Product: form_ = Form::NegLog; break;
      case Family::Lukasiewicz: form_ = Form::OneMinus; break;
      case Family::SchweizerSklar:
        if (std::abs(spec.lambda) < kSchweizerSklarLogThreshold) {
          form_ = Form::NegLog;
        } else {
          form_ = Form::SchweizerSklar;
          lambda_ = spec.lambda;
        }
        break;
      case Family::Frank:
        if (spec.lambda == 1.0) {
          form_ = Form::NegLog;
        } else if (spec.lambda > kFrankLinearThreshold) {
          form_ = Form::OneMinus;
        } else {
          form_ = Form::Frank;
          log_lambda_ = std::log(spec.lambda);
          lambda_minus_one_ = spec.lambda - 1.0;
        }
        break;
    }
    if (strictness() == Strictness::Strict) clamp_value_ = raw(spec.eps);
  }

  const GeneratorSpec& spec() const { return spec_; }
  Form form() const { return form_; }
  double eps() const { return spec_.eps; }

  Strictness strictness() const {
    switch (form_) {
      case Form::NegLog:
      case Form::Frank: return Strictness::Strict;
      case Form::OneMinus: return Strictness::Nilpotent;
      case Form::SchweizerSklar:
        return lambda_ < 0.0 ? Strictness::Strict : Strictness::Nilpotent;
    }
    return Strictness::Strict;
  }

  /// g(0+): +inf for strict generators, finite otherwise.
  ExtendedReal at_zero() const {
    switch (form_) {
      case Form::OneMinus: return 1.0;
      case Form::SchweizerSklar:
        if (lambda_ > 0.0) return 1.0 / lambda_;
        return ExtendedReal::infinity();
      default: return ExtendedReal::infinity();
    }
  }

  /// g(x) for x in [0,1]. Strict generators evaluate x < eps at eps.
  GeneratorValue operator()(double x) const {
    if (strictness() == Strictness::Strict && x < spec_.eps) return {clamp_value_, true};
    return {raw(x), false};
  }

  /// dg/dx at x; zero where the argument is clamped.
  double derivative(double x) const {
    const bool strict = strictness() == Strictness::Strict;
    if (strict && x < spec_.eps) return 0.0;
    // Nilpotent forms with lambda < 1 diverge in slope at 0; hold the slope at eps.
    x = std::max(x, spec_.eps);
    switch (form_) {
      case Form::NegLog: return -1.0 / x;
      case Form::OneMinus: return -1.0;
      case Form::SchweizerSklar: return -std::exp((lambda_ - 1.0) * std::log(x));
      case Form::Frank: {
        const double t = x * log_lambda_;
        return -log_lambda_ * std::exp(t) / std::expm1(t);
      }
    }
    return 0.0;
  }

  /// Pseudo-inverse g^(-1)(min{g(0+), y}) for y >= 0.
  ///
  /// For strict generators every y at or beyond g(eps) maps to 0, so the
  /// clamped region round-trips to 0 rather than to eps.
  double inverse(ExtendedReal y) const {
    if (saturates(y)) return 0.0;
    const double v = y.value();
    if (v <= 0.0) return 1.0;
    switch (form_) {
      case Form::NegLog: return std::exp(-v);
      case Form::OneMinus: return 1.0 - v;
      case Form::SchweizerSklar: return std::exp(std::log1p(-lambda_ * v) / lambda_);
      case Form::Frank: return std::log1p(lambda_minus_one_ * std::exp(-v)) / log_lambda_;
    }
    return 0.0;
  }

  /// d/dy of inverse(y); zero where the pseudo-inverse saturates at 0.
  double inverse_derivative(ExtendedReal y) const {
    if (saturates(y)) return 0.0;
    const double v = std::max(0.0, y.value());
    switch (form_) {
      case Form::NegLog: return -std::exp(-v);
      case Form::OneMinus: return -1.0;
      case Form::SchweizerSklar:
        return -std::exp((1.0 / lambda_ - 1.0) * std::log1p(-lambda_ * v));
      case Form::Frank: {
        const double w = lambda_minus_one_ * std::exp(-v);
        return -w / (log_lambda_ * (1.0 + w));
      }
    }
    return 0.0;
  }

 private:
  bool saturates(const ExtendedReal& y) const {
    if (y.is_infinite()) return true;
    if (strictness() == Strictness::Strict) return y.value() >= clamp_value_;
    return y >= at_zero();
  }

  double raw(double x) const {
    if (x >= 1.0) return 0.0;
    switch (form_) {
      case Form::NegLog: return -std::log(x);
      case Form::OneMinus: return 1.0 - x;
      case Form::SchweizerSklar: {
        if (x <= 0.0) return lambda_ > 0.0 ? 1.0 / lambda_ : kInfinity;
        return -std::expm1(lambda_ * std::log(x)) / lambda_;
      }
      case Form::Frank: return std::log(lambda_minus_one_ / std::expm1(x * log_lambda_));
    }
    return 0.0;
  }

  GeneratorSpec spec_;
  Form form_ = Form::NegLog;
  double lambda_ = 0.0;
  double log_lambda_ = 0.0;
  double lambda_minus_one_ = 0.0;
  double clamp_value_ = 0.0;
};

inline GeneratorValue g_eval(const GeneratorSpec& spec, double x) { return Generator(spec)(x); }

inline double g_pseudo_inverse(const GeneratorSpec& spec, ExtendedReal y) {
  return Generator(spec).inverse(y);
}

/// Strict iff g(0+) = +inf.
inline Strictness strictness_of(const GeneratorSpec& spec) {
  return Generator(spec).strictness();
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_GENERATOR_HPP

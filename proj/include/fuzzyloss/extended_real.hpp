#ifndef FUZZYLOSS_EXTENDED_REAL_HPP
#define FUZZYLOSS_EXTENDED_REAL_HPP

#include <compare>
#include <limits>
#include <ostream>

namespace fuzzyloss {

/// A value in [0, +inf] or, more generally, the reals extended by +inf.
///
/// Generators of strict t-norms reach +inf at 0. Holding that point as an
/// explicit state keeps comparisons and min{g(0+), s} total without relying
/// on sentinel constants.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double value) : value_(value) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite payload; +inf maps to the IEEE infinity.
  constexpr double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a,
                                                     const ExtendedReal& b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

  friend constexpr ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& r) {
    if (r.infinite_) return os << "inf";
    return os << r.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

constexpr ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return b < a ? b : a; }
constexpr ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? b : a; }

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_EXTENDED_REAL_HPP

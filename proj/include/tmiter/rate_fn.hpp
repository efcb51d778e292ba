#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace tmiter {

using Index = std::uint64_t;

/// Overflow-checked arithmetic on rate values. Every composed rate in this
/// library goes through these so that a blown-up modulus surfaces as an
/// exception instead of silently wrapping.
namespace checked {

inline Index mul(Index a, Index b) {
  Index r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("rate arithmetic overflow in multiplication");
  }
  return r;
}

inline Index add(Index a, Index b) {
  Index r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("rate arithmetic overflow in addition");
  }
  return r;
}

/// a - 1 for a >= 1. All the index expressions of the form c(k+1) - 1 have a
/// strictly positive first operand once the constants are >= 1.
inline Index pred(Index a) {
  if (a == 0) throw std::domain_error("rate argument would be negative");
  return a - 1;
}

}  // namespace checked

/// A total function N -> N: a rate of convergence, a Cauchy modulus, or a
/// rate of asymptotic regularity. No monotonicity is assumed.
class RateFn {
 public:
  using Fn = std::function<Index(Index)>;

  RateFn() : fn_([](Index) -> Index { return 0; }), label_("0") {}
  RateFn(Fn fn, std::string label = "<rate>")
      : fn_(std::move(fn)), label_(std::move(label)) {}

  Index operator()(Index k) const { return fn_(k); }

  const std::string& label() const { return label_; }

  static RateFn constant(Index c) {
    return RateFn([c](Index) { return c; }, std::to_string(c));
  }

  static RateFn identity() {
    return RateFn([](Index k) { return k; }, "k");
  }

  /// k -> a*k + b.
  static RateFn affine(Index a, Index b) {
    return RateFn(
        [a, b](Index k) { return checked::add(checked::mul(a, k), b); },
        std::to_string(a) + "k+" + std::to_string(b));
  }

 private:
  Fn fn_;
  std::string label_;
};

}  // namespace tmiter

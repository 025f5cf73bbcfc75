#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pencert/errors.hpp"

namespace pencert {

/// A value in R ∪ {-inf, +inf} with the product convention
/// (±inf)·0 = 0·(±inf) = 0, so that multiplier pairings with infinite
/// derivative values stay well defined.
///
/// Finite payloads are always finite doubles: NaN is rejected at
/// construction, and IEEE infinities map onto the NegInf/PosInf tags.
class ExtReal {
 public:
  enum class Tag { NegInf, Finite, PosInf };

  /// Finite value; throws DomainError on NaN or ±inf payloads.
  static ExtReal finite(double v) {
    if (!std::isfinite(v)) throw DomainError("ExtReal::finite: payload is not a finite real");
    return ExtReal(v);
  }

  static ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  /// Maps IEEE ±inf onto the infinite tags; throws DomainError on NaN.
  static ExtReal from_double(double v) {
    if (std::isnan(v)) throw DomainError("ExtReal::from_double: NaN");
    return ExtReal(v);
  }

  Tag tag() const {
    if (value_ == std::numeric_limits<double>::infinity()) return Tag::PosInf;
    if (value_ == -std::numeric_limits<double>::infinity()) return Tag::NegInf;
    return Tag::Finite;
  }

  bool is_finite() const { return std::isfinite(value_); }
  bool is_pos_inf() const { return tag() == Tag::PosInf; }
  bool is_neg_inf() const { return tag() == Tag::NegInf; }

  /// Finite payload; throws Error when called on an infinity.
  double finite_value() const {
    if (!is_finite()) throw Error("ExtReal::finite_value called on an infinity");
    return value_;
  }

  /// Underlying double (±inf for the infinite tags). Never NaN.
  double as_double() const { return value_; }

  // Total order: NegInf < Finite(a) < PosInf, finite ordering is real ordering.
  friend bool operator==(ExtReal a, ExtReal b) { return a.value_ == b.value_; }
  friend bool operator!=(ExtReal a, ExtReal b) { return a.value_ != b.value_; }
  friend bool operator<(ExtReal a, ExtReal b) { return a.value_ < b.value_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.value_ <= b.value_; }
  friend bool operator>(ExtReal a, ExtReal b) { return a.value_ > b.value_; }
  friend bool operator>=(ExtReal a, ExtReal b) { return a.value_ >= b.value_; }

 private:
  explicit ExtReal(double v) : value_(v) {}
  double value_;
};

/// Extended sum. (+inf) + (-inf) throws IndeterminateSum.
inline ExtReal xadd(ExtReal a, ExtReal b) {
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
    throw IndeterminateSum("xadd: (+inf) + (-inf)");
  return ExtReal::from_double(a.as_double() + b.as_double());
}

/// Extended product with zero annihilation: any product of an infinity with
/// exact zero is Finite(0).
inline ExtReal xmul(ExtReal a, ExtReal b) {
  if ((!a.is_finite() && b.as_double() == 0.0) || (!b.is_finite() && a.as_double() == 0.0))
    return ExtReal::finite(0.0);
  return ExtReal::from_double(a.as_double() * b.as_double());
}

/// Pairing Σ xmul(λ_i, α_i) with the zero-annihilation convention.
/// λ must consist of nonnegative finite reals of the same length as α.
/// Throws IndeterminateSum if both a PosInf and a NegInf term survive.
inline ExtReal xdot(const std::vector<double>& lambda, const std::vector<ExtReal>& alpha) {
  if (lambda.size() != alpha.size()) throw Error("xdot: length mismatch");
  bool pos_inf = false, neg_inf = false;
  double finite_sum = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i]))
      throw Error("xdot: multipliers must be nonnegative finite reals");
    ExtReal term = xmul(ExtReal::finite(lambda[i]), alpha[i]);
    if (term.is_pos_inf())
      pos_inf = true;
    else if (term.is_neg_inf())
      neg_inf = true;
    else
      finite_sum += term.finite_value();
  }
  if (pos_inf && neg_inf) throw IndeterminateSum("xdot: both +inf and -inf terms survive");
  if (pos_inf) return ExtReal::pos_inf();
  if (neg_inf) return ExtReal::neg_inf();
  return ExtReal::finite(finite_sum);
}

/// "-inf", "+inf", or a shortest round-trip decimal literal.
inline std::string to_string(ExtReal v) {
  if (v.is_pos_inf()) return "+inf";
  if (v.is_neg_inf()) return "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v.finite_value());
  return std::string(buf, res.ptr);
}

}  // namespace pencert

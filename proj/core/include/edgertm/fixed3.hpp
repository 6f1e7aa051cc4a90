#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace edgertm {

/// Decimal fixed-point number with three fractional digits, stored as a count
/// of thousandths in a signed 64-bit integer.
///
/// Every measured quantity (milliseconds, millijoules, milliwatts, percent)
/// is carried in this representation so that arithmetic and text formatting
/// are exact and traces come out byte-identical on every platform. Rounding,
/// where unavoidable, is half away from zero.
class Fixed3 {
public:
  constexpr Fixed3() = default;

  static constexpr Fixed3 from_raw(std::int64_t thousandths) { return Fixed3(thousandths); }
  static constexpr Fixed3 from_int(std::int64_t whole) { return Fixed3(whole * 1000); }

  /// Nearest representable value; intended for JSON numbers and similar
  /// already-inexact sources. File formats with decimal text use parse().
  static Fixed3 from_double(double value);

  /// Exact decimal parse: optional sign, digits, at most three fractional
  /// digits. Returns nullopt on malformed text, excess precision or overflow.
  static std::optional<Fixed3> parse(std::string_view text);

  constexpr std::int64_t raw() const { return raw_; }
  constexpr bool is_zero() const { return raw_ == 0; }
  constexpr bool is_positive() const { return raw_ > 0; }
  constexpr bool is_negative() const { return raw_ < 0; }

  double to_double() const { return static_cast<double>(raw_) / 1000.0; }

  /// Minimal-digit decimal text: trailing fractional zeros trimmed, no
  /// decimal point for whole values ("9.92", "7.4", "1340").
  std::string str() const;

  friend constexpr auto operator<=>(Fixed3 a, Fixed3 b) = default;

  friend constexpr Fixed3 operator+(Fixed3 a, Fixed3 b) { return Fixed3(a.raw_ + b.raw_); }
  friend constexpr Fixed3 operator-(Fixed3 a, Fixed3 b) { return Fixed3(a.raw_ - b.raw_); }
  constexpr Fixed3& operator+=(Fixed3 other) { raw_ += other.raw_; return *this; }
  constexpr Fixed3& operator-=(Fixed3 other) { raw_ -= other.raw_; return *this; }
  friend constexpr Fixed3 operator*(Fixed3 a, std::int64_t k) { return Fixed3(a.raw_ * k); }

  /// value(a) * value(b) / 1000, rounded half away from zero. This is the
  /// mW * ms -> mJ product used throughout.
  static Fixed3 mul_div_thousand(Fixed3 a, Fixed3 b);

  /// value(a) / n, rounded half away from zero. Used for deterministic means.
  static Fixed3 div_round(Fixed3 a, std::int64_t n);

private:
  constexpr explicit Fixed3(std::int64_t raw) : raw_(raw) {}
  std::int64_t raw_ = 0;
};

// Aliases documenting which unit a Fixed3 carries.
using TimeMs = Fixed3;
using EnergyMj = Fixed3;
using PowerMw = Fixed3;
using Percent = Fixed3;

/// |value - reference| <= tol_permille/1000 * |reference|, evaluated exactly
/// in integer arithmetic. reference must be non-zero.
bool within_relative(Fixed3 value, Fixed3 reference, std::int64_t tol_permille);

} // namespace edgertm

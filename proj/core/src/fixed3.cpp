#include "edgertm/fixed3.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace edgertm {

namespace {

using Int128 = __int128;

std::int64_t round_half_away(Int128 numerator, Int128 denominator) {
  // denominator > 0
  Int128 half = denominator / 2;
  Int128 adjusted = numerator >= 0 ? numerator + half : numerator - half;
  return static_cast<std::int64_t>(adjusted / denominator);
}

} // namespace

Fixed3 Fixed3::from_double(double value) {
  double scaled = value * 1000.0;
  return Fixed3(static_cast<std::int64_t>(std::llround(scaled)));
}

std::optional<Fixed3> Fixed3::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  if (i == text.size()) return std::nullopt;

  Int128 whole = 0;
  std::size_t digits = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
    whole = whole * 10 + (text[i] - '0');
    ++digits;
    ++i;
    if (digits > 18) return std::nullopt;
  }
  Int128 frac = 0;
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      frac = frac * 10 + (text[i] - '0');
      ++frac_digits;
      ++i;
    }
    if (frac_digits == 0 || frac_digits > 3) return std::nullopt;
  }
  if (i != text.size() || digits + frac_digits == 0) return std::nullopt;

  static constexpr std::array<Int128, 4> pow10{1, 10, 100, 1000};
  Int128 raw = whole * 1000 + frac * (pow10[3 - frac_digits]);
  if (negative) raw = -raw;
  if (raw > INT64_MAX || raw < INT64_MIN) return std::nullopt;
  return Fixed3(static_cast<std::int64_t>(raw));
}

std::string Fixed3::str() const {
  std::int64_t raw = raw_;
  std::string out;
  if (raw < 0) {
    out.push_back('-');
    raw = -raw;
  }
  std::int64_t whole = raw / 1000;
  std::int64_t frac = raw % 1000;
  out += std::to_string(whole);
  if (frac != 0) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(frac));
    std::string_view tail(buf);
    while (tail.back() == '0') tail.remove_suffix(1);
    out += tail;
  }
  return out;
}

Fixed3 Fixed3::mul_div_thousand(Fixed3 a, Fixed3 b) {
  // value product needs raw_a * raw_b / 1e6 in raw space.
  Int128 numerator = static_cast<Int128>(a.raw_) * b.raw_;
  return Fixed3(round_half_away(numerator, 1'000'000));
}

Fixed3 Fixed3::div_round(Fixed3 a, std::int64_t n) {
  if (n <= 0) return Fixed3(0);
  return Fixed3(round_half_away(a.raw_, n));
}

bool within_relative(Fixed3 value, Fixed3 reference, std::int64_t tol_permille) {
  __int128 diff = static_cast<__int128>(value.raw()) - reference.raw();
  if (diff < 0) diff = -diff;
  __int128 ref = reference.raw();
  if (ref < 0) ref = -ref;
  return diff * 1000 <= ref * tol_permille;
}

} // namespace edgertm

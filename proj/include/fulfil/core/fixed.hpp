#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fulfil::core {

/// Fixed-point decimal with four fractional digits, stored as integer
/// ten-thousandths. All plan costs use this so optimizer results compare
/// exactly against brute-force enumeration.
class Fixed {
 public:
  static constexpr std::int64_t kScale = 10'000;

  constexpr Fixed() = default;

  static constexpr Fixed from_raw(std::int64_t raw) {
    Fixed f;
    f.raw_ = raw;
    return f;
  }
  static constexpr Fixed from_int(std::int64_t v) { return from_raw(v * kScale); }
  /// Rounds half away from zero to the nearest ten-thousandth.
  static Fixed from_double(double v);
  /// Parses "12", "-3.5", "0.0002". More than four fractional digits is an error.
  static Fixed parse(std::string_view text);

  constexpr std::int64_t raw() const { return raw_; }
  double to_double() const { return static_cast<double>(raw_) / kScale; }

  /// Minimal rendering: "5", "5.25", "-0.0002".
  std::string to_string() const;

  constexpr Fixed operator+(Fixed o) const { return from_raw(raw_ + o.raw_); }
  constexpr Fixed operator-(Fixed o) const { return from_raw(raw_ - o.raw_); }
  constexpr Fixed& operator+=(Fixed o) {
    raw_ += o.raw_;
    return *this;
  }
  constexpr Fixed& operator-=(Fixed o) {
    raw_ -= o.raw_;
    return *this;
  }
  constexpr Fixed operator*(std::int64_t k) const { return from_raw(raw_ * k); }

  constexpr auto operator<=>(const Fixed&) const = default;

 private:
  std::int64_t raw_ = 0;
};

/// a * b with a single round-half-away-from-zero at the end.
Fixed multiply(Fixed a, Fixed b);

}  // namespace fulfil::core

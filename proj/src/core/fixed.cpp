#include "fulfil/core/fixed.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace fulfil::core {

namespace {

std::int64_t round_div(__int128 num, std::int64_t den) {
  __int128 q = num / den;
  __int128 r = num % den;
  if (2 * (r < 0 ? -r : r) >= den) q += (num < 0) ? -1 : 1;
  return static_cast<std::int64_t>(q);
}

}  // namespace

Fixed Fixed::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite decimal");
  return from_raw(static_cast<std::int64_t>(std::llround(v * kScale)));
}

Fixed Fixed::parse(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("invalid decimal '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool in_frac = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (in_frac) fail();
      in_frac = true;
      continue;
    }
    if (c < '0' || c > '9') fail();
    any_digit = true;
    if (in_frac) {
      if (++frac_digits > 4) fail();
      frac = frac * 10 + (c - '0');
    } else {
      whole = whole * 10 + (c - '0');
      if (whole > 900'000'000'000'000LL) fail();
    }
  }
  if (!any_digit) fail();
  for (int k = frac_digits; k < 4; ++k) frac *= 10;
  std::int64_t raw = whole * kScale + frac;
  return from_raw(negative ? -raw : raw);
}

std::string Fixed::to_string() const {
  std::int64_t a = raw_ < 0 ? -raw_ : raw_;
  std::string out = raw_ < 0 ? "-" : "";
  out += std::to_string(a / kScale);
  std::int64_t frac = a % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 4 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

Fixed multiply(Fixed a, Fixed b) {
  return Fixed::from_raw(round_div(static_cast<__int128>(a.raw()) * b.raw(), Fixed::kScale));
}

}  // namespace fulfil::core

#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spfar {

/// All lengths and distances are carried as signed 64-bit integers in
/// "half-micro" units: an input weight of 1.0 becomes 2'000'000.  The factor
/// two absorbs the single halving that every farthest-distance formula
/// performs, so every value the library produces is exactly representable.
using Length = std::int64_t;

inline constexpr Length kScale = 2'000'000;

/// Total-weight budget that keeps all intermediate sums (which may combine a
/// handful of distances) clear of overflow, including the doubled coordinates
/// used by the piecewise-linear machinery.
inline constexpr Length kMaxTotalWeight = (Length{1} << 60) / kScale;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WeightPrecisionExceeded : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Parses a non-negative decimal with at most six fractional digits into
/// half-micro units.  "1.5" -> 3'000'000.
inline Length parse_decimal_weight(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '+') ++i;
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
    throw ParseError("malformed decimal: '" + std::string(text) + "'");
  Length whole = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    whole = whole * 10 + (text[i] - '0');
    if (whole > kMaxTotalWeight) throw ParseError("weight too large");
    ++i;
  }
  Length frac = 0;
  int frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (++frac_digits > 6)
        throw WeightPrecisionExceeded(
            "more than six fractional digits: '" + std::string(text) + "'");
      frac = frac * 10 + (text[i] - '0');
      ++i;
    }
    if (frac_digits == 0)
      throw ParseError("malformed decimal: '" + std::string(text) + "'");
  }
  if (i != text.size())
    throw ParseError("trailing characters in decimal: '" + std::string(text) +
                     "'");
  for (int d = frac_digits; d < 6; ++d) frac *= 10;
  return whole * kScale + frac * 2;
}

/// Formats a half-micro value as an exact decimal, trimming trailing zeros.
inline std::string format_decimal(Length value) {
  std::string sign;
  if (value < 0) {
    sign = "-";
    value = -value;
  }
  Length whole = value / kScale;
  Length rem = value % kScale;  // half-micro remainder, < 2e6
  std::string out = sign + std::to_string(whole);
  if (rem != 0) {
    // rem/2 may itself be fractional (odd rem = half a micro-unit).
    Length micros = rem / 2;
    bool half = (rem % 2) != 0;
    std::string frac = std::to_string(micros);
    frac.insert(frac.begin(), 6 - frac.size(), '0');
    if (half) frac += "5";  // 0.5 micro-units = 5e-7
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    out += "." + frac;
  }
  return out;
}

}  // namespace spfar

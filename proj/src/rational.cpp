// Copyright 2026 The Timely Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "timely/rational.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace timely {

namespace {

BigInt pow10(int k) {
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= 10;
  return r;
}

}  // namespace

Rational rational_from_decimal(const std::string& text) {
  std::string s = text;
  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string int_part, frac_part;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) int_part += s[pos++];
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) frac_part += s[pos++];
  }
  if (pos != s.size() || (int_part.empty() && frac_part.empty()))
    throw std::invalid_argument("not a decimal literal: '" + text + "'");
  BigInt num = int_part.empty() ? BigInt(0) : BigInt(int_part);
  BigInt den = 1;
  for (char c : frac_part) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational r(num, den);
  return negative ? -r : r;
}

Rational rational_from_string(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return rational_from_decimal(text);
  BigInt num(text.substr(0, slash));
  BigInt den(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return Rational(num, den);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  // to_chars may pick scientific notation for very small/large magnitudes.
  auto e = s.find_first_of("eE");
  if (e == std::string::npos) return rational_from_decimal(s);
  Rational mantissa = rational_from_decimal(s.substr(0, e));
  int exp = std::stoi(s.substr(e + 1));
  BigInt scale = pow10(exp < 0 ? -exp : exp);
  return exp < 0 ? mantissa / Rational(scale) : mantissa * Rational(scale);
}

std::optional<std::string> decimal_if_finite(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  bool negative = num < 0;
  if (negative) num = -num;
  int twos = 0, fives = 0;
  BigInt d = den;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::nullopt;
  int places = std::max(twos, fives);
  BigInt scaled = num * pow10(places) / den;
  std::string digits = scaled.str();
  std::string out;
  if (places == 0) {
    out = digits;
  } else {
    if (static_cast<int>(digits.size()) <= places)
      digits.insert(0, places + 1 - digits.size(), '0');
    out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
  }
  return negative ? "-" + out : out;
}

std::string rational_to_string(const Rational& r) {
  if (auto d = decimal_if_finite(r)) return *d;
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

Rational round_to_places(const Rational& r, int places) {
  BigInt scale = pow10(places);
  Rational scaled = r * Rational(scale);
  BigInt num = boost::multiprecision::numerator(scaled);
  BigInt den = boost::multiprecision::denominator(scaled);
  BigInt q;
  if (num >= 0) {
    q = (2 * num + den) / (2 * den);
  } else {
    q = (2 * -num + den) / (2 * den);
    q = -q;
  }
  return Rational(q, scale);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace timely

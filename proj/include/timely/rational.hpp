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

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace timely {

/// Exact rational arithmetic for probabilities and weights. Arbitrary
/// precision so that products along long branch chains never overflow.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses a plain decimal literal ("0.3", "-1.25", "35") exactly.
Rational rational_from_decimal(const std::string& text);

/// Parses either a decimal literal or a "num/den" fraction.
Rational rational_from_string(const std::string& text);

/// Converts a double through its shortest round-trip decimal form, so a
/// JSON value written as 0.3 becomes exactly 3/10.
Rational rational_from_double(double value);

/// Shortest exact decimal rendering, if the reduced denominator has only
/// factors 2 and 5; nullopt otherwise.
std::optional<std::string> decimal_if_finite(const Rational& r);

/// Decimal when finite, "num/den" otherwise.
std::string rational_to_string(const Rational& r);

/// Rounds to the given number of decimal places, ties away from zero.
Rational round_to_places(const Rational& r, int places);

double to_double(const Rational& r);

}  // namespace timely

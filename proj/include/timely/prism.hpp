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

#include <string>

#include "timely/ptp.hpp"

namespace timely::prism {

/// Renders a model as a `pta` program: one module, locations encoded as an
/// integer variable `s : [0..n-1]`, clocks as `IDENT : clock;`, transitions
/// as `[] guard -> p1:(s'=k)&(x'=0) + ...;` (weight omitted when 1),
/// invariants as `(s=k => zone) & ...` inside an invariant block, and each
/// proposition label as `label "NAME" = s=k;` after the module. Output is
/// deterministic: commands sorted by source location, then input order.
///
/// The subset is frozen: guards must be conjunctions of comparisons against
/// integers, updates must be constants, and clock-difference constraints are
/// not representable. Anything outside the subset is a hard error, never a
/// silent skip.
std::string export_prism(const ptp::Ptp& m);

/// Parses the same subset back into a model. Locations are recovered from
/// the range of the first integer variable; remaining integer variables
/// become state variables. Syntax errors carry line/column; constructs
/// outside the subset (non-pta model type, multiple modules, synchronization
/// labels, ...) are explicit errors.
ptp::Ptp parse_prism(const std::string& text);

}  // namespace timely::prism

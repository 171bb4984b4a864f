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

namespace timely::ptp {

/// Model file format (locations referenced by name):
/// {
///   "locations": ["s0", ...], "initial": "s0", "clocks": ["x"],
///   "invariant": {"s0": [["x","<=",0]]},
///   "variables": [{"name":"v","lo":0,"hi":5}], "init": {"v": 0},
///   "transitions": [{"source":"s0", "guard": ["cmp","v","=",0],
///                    "enabling": [["x",">",3]],
///                    "outcomes": [{"weight":0.3,"target":"s1","resets":["x"],
///                                  "update":{"v":1}}]}],
///   "labels": {"Success": ["s5"]}
/// }
/// Zone constraints are ["x",rel,bound] or ["x","-","y",rel,bound]; guards
/// are true, ["cmp",var,rel,int|var], ["and",...], ["or",...], ["not",g].
/// Weights are numbers, decimal strings, or "num/den" strings.
Ptp load_model(const std::string& document);

/// Inverse of load_model; validates first.
std::string write_model(const Ptp& m);

}  // namespace timely::ptp

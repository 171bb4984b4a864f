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
#include <vector>

namespace timely {

/// One structural problem found by a validator. `code` is a stable
/// machine-readable tag, `element` names the offending item.
struct Diagnostic {
  std::string code;
  std::string element;
  std::string message;

  std::string str() const { return code + " [" + element + "]: " + message; }
};

/// Formats diagnostics one per line, for error messages.
std::string join_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace timely

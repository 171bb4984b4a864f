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

#include <stdexcept>
#include <string>

namespace timely {

/// Base class for all domain errors; the CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text. Carries a 1-based line/column when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, int line = 0, int column = 0)
      : Error(line > 0 ? "line " + std::to_string(line) +
                             (column > 0 ? ":" + std::to_string(column) : "") + ": " + msg
                       : msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A configurable resource limit was exceeded (e.g. the state-space cap).
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace timely

// Copyright 2026 The onknap Authors
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

#ifndef ONKNAP_ERRORS_HPP
#define ONKNAP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onknap {

/// Invalid caller-supplied argument (bad threshold, capacity, epsilon...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Instance exceeds the limits of an exhaustive method.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An operation was called outside its domain (e.g. certificate with no blocked item).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical solver failure (no sign change, no convergence).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed form and its simulation disagree, or an internal identity broke.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace onknap

#endif  // ONKNAP_ERRORS_HPP

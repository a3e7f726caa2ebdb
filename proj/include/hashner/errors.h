/* Copyright 2026 The hashner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HASHNER_ERRORS_H_
#define HASHNER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hashner {

// Input or configuration is invalid; the CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed file contents. Carries the 1-based line when known (0 otherwise).
class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& what, size_t line = 0)
      : ValidationError(line ? "line " + std::to_string(line) + ": " + what
                             : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Operation applied to a state where it is not defined.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exhaustive search refused because the instance is too large.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hashner

#endif  // HASHNER_ERRORS_H_

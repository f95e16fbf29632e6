// Copyright 2026 ODC library developers
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

namespace odc {

/// Error categories surfaced by the library.  They map 1:1 onto the
/// status codes of the C API and onto CLI exit codes (config -> 2,
/// data -> 3).
enum class ErrorCode {
  invalid_argument = 1,  ///< bad parameter to an operation
  config_error = 2,      ///< invalid or inconsistent configuration
  data_error = 3,        ///< malformed or inconsistent input data
  io_error = 4,          ///< filesystem failure
  corrupt_model = 5,     ///< model archive failed validation
  version_mismatch = 6,  ///< model archive written by an incompatible version
  singular_matrix = 7,   ///< factorization failed (matrix not positive definite)
  numeric_error = 8,     ///< non-finite values or failed numeric invariant
  internal_error = 9,    ///< should-not-happen condition
};

const char* error_code_name(ErrorCode code);

/// Exception carrying an ErrorCode; the single error type thrown by the
/// library.  The C API translates it into a status code plus message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Throws invalid_argument with `message` unless `condition` holds.
inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace odc

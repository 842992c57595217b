// Copyright 2026 The qcount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace qcount {

/// Caller supplied something outside an operation's contract (bad input,
/// malformed file, size cap exceeded). The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public PreconditionError {
  public:
    ParseError(std::size_t line, const std::string &what)
        : PreconditionError("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Problem is larger than the dense/statevector caps allow.
class CapacityError : public PreconditionError {
  public:
    using PreconditionError::PreconditionError;
};

/// An internal numerical invariant failed (non-Hermitian operator, spectrum
/// out of range, imaginary parts that do not cancel). Exit code 3.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

namespace detail {
inline void require(bool ok, const std::string &msg) {
    if (!ok) {
        throw PreconditionError(msg);
    }
}
inline void ensure(bool ok, const std::string &msg) {
    if (!ok) {
        throw InvariantError(msg);
    }
}
} // namespace detail

} // namespace qcount

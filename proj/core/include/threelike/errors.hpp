// Copyright 2026 The threelike Authors
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

#ifndef THREELIKE_ERRORS_HPP_
#define THREELIKE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace threelike {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument value (sizes, orders, tolerances).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Inconsistent shapes across inputs.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation, e.g. a matrix that
// must be positive definite but is not. `value()` carries the offending
// quantity (minimum eigenvalue, feasibility margin, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value)
      : Error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

// A result failed an internal consistency check (imaginary residue,
// asymmetry, factorization quality).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Measured data that cannot support the requested estimate.
class DataError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this configuration (e.g. Alpha family, m > 1).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A documented precondition between several inputs does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed external input (CSV, JSON).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace threelike

#endif  // THREELIKE_ERRORS_HPP_

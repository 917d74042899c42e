// Copyright 2026 The idyn Authors
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

#ifndef IDYN_ERROR_HPP_
#define IDYN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace idyn {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values: non-finite numbers, wrong dimensions, out-of-range
// parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A time series is too short for the requested operation.
class SequenceTooShort : public Error {
 public:
  using Error::Error;
};

// Inconsistent tables or configuration (e.g. mass fractions not summing to 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Numerical failure at run time (non-finite loss, diverging optimizer).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace idyn

#endif  // IDYN_ERROR_HPP_

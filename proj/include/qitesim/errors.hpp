// Copyright 2026 The qitesim Authors
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

#ifndef QITESIM_ERRORS_HPP_
#define QITESIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace qitesim {

/// Invalid input: malformed graphs or Pauli text, mismatched qubit counts,
/// out-of-range domain sizes, unknown configuration keys, and the like.
/// The command-line driver maps this family to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A structurally valid request that exceeds a hard implementation limit,
/// e.g. a state vector beyond the dense-simulation cap.
class CapacityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Runtime numeric failure: non-finite values, factorization breakdown,
/// or exhausted floating-point range.  Mapped to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All amplitudes underflowed to zero, so the state cannot be renormalized.
class UnderflowError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace qitesim

#endif  // QITESIM_ERRORS_HPP_

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

// Convenience umbrella: the whole library in one include.

#ifndef QITESIM_QITESIM_HPP_
#define QITESIM_QITESIM_HPP_

#include "qitesim/circuit.hpp"
#include "qitesim/errors.hpp"
#include "qitesim/hamiltonian.hpp"
#include "qitesim/noise.hpp"
#include "qitesim/pauli.hpp"
#include "qitesim/pools.hpp"
#include "qitesim/qite.hpp"
#include "qitesim/runner.hpp"
#include "qitesim/statevec.hpp"

#endif  // QITESIM_QITESIM_HPP_

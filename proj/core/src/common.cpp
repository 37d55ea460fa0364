// Copyright 2026 The iongate Authors
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

#include "iongate/common.hpp"

#include <cmath>

namespace iongate {

void TrapParams::validate() const {
  if (n_ions < 1) throw std::invalid_argument("n_ions must be >= 1");
  if (!(trap_freq > 0.0)) throw std::invalid_argument("trap_freq must be > 0");
  if (!(detuning > 0.0 && detuning < trap_freq))
    throw std::invalid_argument("detuning must satisfy 0 < delta < nu");
  if (!(rabi_freq >= 0.0)) throw std::invalid_argument("rabi_freq must be >= 0");
  if (!(lamb_dicke >= 0.0 && lamb_dicke * lamb_dicke < 1.0))
    throw std::invalid_argument("lamb_dicke must satisfy 0 <= eta, eta^2 < 1");
}

}  // namespace iongate

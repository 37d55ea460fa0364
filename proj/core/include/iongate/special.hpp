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

#pragma once

namespace iongate::special {

/// Generalized Laguerre polynomial L_n^alpha(x) by three-term recurrence.
double laguerre(int n, double alpha, double x);

double log_factorial(int n);

/// Binomial coefficient as a double; exact for the sizes used here.
double binomial(int n, int k);

}  // namespace iongate::special

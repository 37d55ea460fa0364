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

#include <Eigen/Eigenvalues>

#include "iongate/common.hpp"

namespace iongate::detail {

/// Spectral factorization of a Hermitian matrix, reusable for exp(-i theta H).
class HermitianExp {
 public:
  explicit HermitianExp(const CMatrix& h) : solver_(h) {
    if (solver_.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  }

  /// exp(-i theta H).
  CMatrix operator()(double theta) const {
    const auto& v = solver_.eigenvectors();
    const CVector phases = (-kI * theta * solver_.eigenvalues().cast<cplx>()).array().exp();
    return v * phases.asDiagonal() * v.adjoint();
  }

  const RVector& eigenvalues() const { return solver_.eigenvalues(); }
  const CMatrix& eigenvectors() const { return solver_.eigenvectors(); }

 private:
  Eigen::SelfAdjointEigenSolver<CMatrix> solver_;
};

}  // namespace iongate::detail

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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace iongate {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Base class for failures of a numerical method (as opposed to bad input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Amplitude leaked into the top of a truncated Fock space.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A time integrator could not meet its accuracy or positivity gate.
class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative solve did not converge.
class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Physical configuration of a bichromatically driven ion string.
///
/// Frequencies are angular and expressed in units of the trap frequency, so
/// `trap_freq` is normally 1 and times are measured as nu*t. The qubit
/// transition frequency never appears: every Hamiltonian is written in the
/// frame rotating with it.
struct TrapParams {
  int n_ions = 2;
  double trap_freq = 1.0;    // nu
  double detuning = 0.95;    // delta, tones at omega_eg +/- delta
  double rabi_freq = 0.1;    // Omega, per tone
  double lamb_dicke = 0.1;   // eta, centre-of-mass mode

  double sideband_gap() const noexcept { return trap_freq - detuning; }

  /// Throws std::invalid_argument when the configuration is unusable.
  void validate() const;
};

}  // namespace iongate

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

#include "iongate/modes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace iongate::modes {
namespace {

RVector forces(const RVector& u) {
  const int n = static_cast<int>(u.size());
  RVector f = u;
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      if (k == m) continue;
      const double d = u(m) - u(k);
      f(m) += (k < m ? -1.0 : 1.0) / (d * d);
    }
  return f;
}

RMatrix hessian(const RVector& u) {
  const int n = static_cast<int>(u.size());
  RMatrix a = RMatrix::Identity(n, n);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      if (k == m) continue;
      const double c = 2.0 / std::pow(std::abs(u(m) - u(k)), 3);
      a(m, m) += c;
      a(m, k) = -c;
    }
  return a;
}

bool ordered(const RVector& u) {
  for (int i = 1; i < u.size(); ++i)
    if (!(u(i) > u(i - 1))) return false;
  return true;
}

}  // namespace

RMatrix ModeSpectrum::lamb_dicke_matrix(double eta) const {
  RMatrix m = vectors;
  for (int l = 0; l < n_ions; ++l) m.col(l) *= eta * std::sqrt(double(n_ions)) / std::sqrt(freqs(l));
  return m;
}

ModeSpectrum solve_chain(int n_ions) {
  if (n_ions < kMinIons || n_ions > kMaxIons)
    throw std::invalid_argument("solve_chain: n_ions must be in [" + std::to_string(kMinIons) +
                                ", " + std::to_string(kMaxIons) + "]");
  RVector u(n_ions);
  for (int m = 0; m < n_ions; ++m) u(m) = m - 0.5 * (n_ions - 1);

  double res = forces(u).cwiseAbs().maxCoeff();
  for (int it = 0; it < 200 && res >= 1e-13; ++it) {
    const RVector f = forces(u);
    const RVector step = hessian(u).ldlt().solve(-f);
    double damp = 1.0;
    for (;;) {
      const RVector trial = u + damp * step;
      if (ordered(trial)) {
        const double r = forces(trial).cwiseAbs().maxCoeff();
        if (r < res || damp < 1e-8) {
          u = trial;
          res = r;
          break;
        }
      }
      damp *= 0.5;
      if (damp < 1e-12) throw ConvergenceError("solve_chain: line search failed");
    }
  }
  if (res >= 1e-12)
    throw ConvergenceError("solve_chain: force residual " + std::to_string(res));

  const Eigen::SelfAdjointEigenSolver<RMatrix> eig(hessian(u));
  if (eig.info() != Eigen::Success) throw ConvergenceError("solve_chain: Hessian eigensolve failed");

  ModeSpectrum s;
  s.n_ions = n_ions;
  s.positions = u;
  s.force_residual = res;
  s.freqs = eig.eigenvalues().cwiseSqrt();
  s.vectors = eig.eigenvectors();
  for (int l = 0; l < n_ions; ++l) {
    for (int i = 0; i < n_ions; ++i)
      if (std::abs(s.vectors(i, l)) > 1e-12) {
        if (s.vectors(i, l) < 0.0) s.vectors.col(l) *= -1.0;
        break;
      }
  }
  return s;
}

ModeSums sigma_sums(const ModeSpectrum& s) {
  const int n = s.n_ions;
  ModeSums out;
  auto& sg = out.sigma;
  RMatrix w(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      w(l, k) = (s.vectors.col(l).array().square() * s.vectors.col(k).array().square()).sum() -
                1.0 / n;
  for (int l = 0; l < n; ++l) {
    const double r = s.freqs(l);
    const double r2 = r * r;
    if (l >= 1) {
      const double g = (r2 + 1.0) / ((r2 - 1.0) * (r2 - 1.0));
      sg[0] += 2.0 * g / r2;
      sg[1] += g / r;
    }
    sg[2] += 1.0 / (r2 * r2);
    sg[3] += 1.0 / (r2 * r);
    sg[4] += 2.0 * w(l, l) / (r2 * r2);
    sg[5] += w(l, l) / (r2 * r);
    for (int k = 0; k < n; ++k)
      if (k != l) sg[4] += w(l, k) / (r2 * s.freqs(k) * s.freqs(k));
  }
  return out;
}

}  // namespace iongate::modes

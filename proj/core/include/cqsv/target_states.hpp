// Copyright 2026 The collective-qsv Authors
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

#ifndef CQSV_TARGET_STATES_HPP
#define CQSV_TARGET_STATES_HPP

#include <vector>

#include "cqsv/qstate.hpp"

namespace cqsv {

/// (|00> + |11>)/sqrt(2)
StateVector bell();
/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
StateVector ghz(int n, const EngineLimits& limits = {});
/// Uniform superposition of the C(n, w) weight-w basis kets.
StateVector dicke(int n, int w, const EngineLimits& limits = {});

/// A verification strategy: the averaged pass effect Omega together with its
/// target and second-largest eigenvalue. The target passes with certainty.
class Strategy {
 public:
  /// Omega = |psi><psi| + lambda (1 - |psi><psi|), 0 <= lambda < 1.
  static Strategy homogeneous(const StateVector& target, double lambda);

  /// Any effect with spectrum in [0, 1] that fixes the target; lambda is read
  /// off the spectrum.
  static Strategy from_operator(Operator omega, const StateVector& target);

  const Operator& omega() const noexcept { return omega_; }
  const Matrix& sqrt_omega() const noexcept { return sqrt_omega_; }
  /// sqrt(1 - Omega), the Kraus operator of the fail outcome.
  const Matrix& sqrt_fail() const noexcept { return sqrt_fail_; }
  double lambda() const noexcept { return lambda_; }
  const StateVector& target() const noexcept { return target_; }
  bool is_homogeneous() const noexcept { return homogeneous_; }

  /// Eigenvalues of Omega, descending.
  const std::vector<double>& spectrum() const noexcept { return spectrum_; }

 private:
  Strategy(Operator omega, StateVector target, double lambda, bool homogeneous);

  Operator omega_;
  Matrix sqrt_omega_;
  Matrix sqrt_fail_;
  StateVector target_;
  double lambda_;
  bool homogeneous_;
  std::vector<double> spectrum_;
};

inline Strategy homogeneous_strategy(const StateVector& target, double lambda) {
  return Strategy::homogeneous(target, lambda);
}

/// A unit vector orthogonal to the target with Omega|v> = lambda|v>.
/// For homogeneous strategies this is the Gram-Schmidt completion of the
/// first computational basis ket not parallel to the target, so the choice is
/// reproducible; otherwise it is the eigenvector of lambda with the largest
/// overlap on that same ket.
StateVector orthogonal_eigenstate(const Strategy& strategy);

}  // namespace cqsv

#endif  // CQSV_TARGET_STATES_HPP

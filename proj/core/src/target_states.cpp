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

#include "cqsv/target_states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace cqsv {
namespace {

constexpr double kSpectrumTolerance = 1e-10;

std::size_t register_dimension(int n, const EngineLimits& limits, std::string_view what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": need at least one qubit");
  if (n > 62) throw DimensionCapError(std::string(what), std::numeric_limits<std::size_t>::max(), limits.max_dimension);
  const std::size_t dim = std::size_t{1} << n;
  limits.check(dim, what);
  return dim;
}

Matrix matrix_function(const Eigen::SelfAdjointEigenSolver<Matrix>& solver, double (*f)(double)) {
  const Eigen::VectorXd values = solver.eigenvalues().unaryExpr(f);
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().adjoint();
}

double clamped_sqrt(double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); }
double clamped_sqrt_complement(double x) { return std::sqrt(std::clamp(1.0 - x, 0.0, 1.0)); }

}  // namespace

StateVector bell() { return ghz(2); }

StateVector ghz(int n, const EngineLimits& limits) {
  const std::size_t dim = register_dimension(n, limits, "ghz");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(0) = (1.0 / std::numbers::sqrt2);
  v(static_cast<Eigen::Index>(dim - 1)) = (1.0 / std::numbers::sqrt2);
  return StateVector(std::move(v));
}

StateVector dicke(int n, int w, const EngineLimits& limits) {
  if (w < 0 || w > n) {
    throw std::invalid_argument("dicke: excitation count " + std::to_string(w) + " outside [0, " +
                                std::to_string(n) + "]");
  }
  const std::size_t dim = register_dimension(n, limits, "dicke");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (std::popcount(i) == w) v(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return StateVector::normalized(std::move(v));
}

Strategy::Strategy(Operator omega, StateVector target, double lambda, bool homogeneous)
    : omega_(std::move(omega)),
      target_(std::move(target)),
      lambda_(lambda),
      homogeneous_(homogeneous) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(omega_.matrix());
  const auto& ev = solver.eigenvalues();
  spectrum_.assign(ev.data(), ev.data() + ev.size());
  std::reverse(spectrum_.begin(), spectrum_.end());
  sqrt_omega_ = matrix_function(solver, clamped_sqrt);
  sqrt_fail_ = matrix_function(solver, clamped_sqrt_complement);
}

Strategy Strategy::homogeneous(const StateVector& target, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("homogeneous strategy needs 0 <= lambda < 1, got " + std::to_string(lambda));
  }
  const Matrix proj = target.projector();
  const auto d = static_cast<Eigen::Index>(target.dimension());
  Matrix omega = proj + lambda * (Matrix::Identity(d, d) - proj);
  // Exact hermiticity; the outer product can carry rounding asymmetry.
  omega = (omega + omega.adjoint()).eval() / 2.0;
  return Strategy(Operator(std::move(omega), true), target, lambda, true);
}

Strategy Strategy::from_operator(Operator omega, const StateVector& target) {
  if (!omega.is_hermitian()) throw std::invalid_argument("strategy operator must be hermitian");
  if (omega.dimension() != target.dimension()) {
    throw std::invalid_argument("strategy operator and target dimensions differ");
  }
  const Vector image = omega.matrix() * target.amplitudes();
  if ((image - target.amplitudes()).norm() > kSpectrumTolerance) {
    throw std::invalid_argument("target does not pass the strategy with certainty");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(omega.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  if (ev(0) < -kSpectrumTolerance || ev(ev.size() - 1) > 1.0 + kSpectrumTolerance) {
    throw std::invalid_argument("strategy eigenvalues must lie in [0, 1]");
  }
  if (ev.size() < 2) throw std::invalid_argument("strategy needs dimension >= 2");
  const double lambda = std::clamp(ev(ev.size() - 2), 0.0, 1.0);
  if (lambda > 1.0 - kSpectrumTolerance) {
    throw std::invalid_argument("second-largest eigenvalue must be < 1");
  }
  return Strategy(std::move(omega), target, lambda, false);
}

StateVector orthogonal_eigenstate(const Strategy& strategy) {
  const Vector& psi = strategy.target().amplitudes();
  const auto d = psi.size();
  // First basis ket with a non-negligible component outside span{psi}.
  Eigen::Index seed = -1;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double residual = 1.0 - std::norm(psi(j));
    if (residual > 1e-8) {
      seed = j;
      break;
    }
  }
  if (seed < 0) throw std::invalid_argument("target spans the whole space");

  Vector v = Vector::Zero(d);
  v(seed) = 1.0;
  v -= psi * psi.dot(v);

  if (!strategy.is_homogeneous()) {
    // Project onto the lambda eigenspace (restricted to the complement of psi).
    Eigen::SelfAdjointEigenSolver<Matrix> solver(strategy.omega().matrix());
    Vector projected = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(solver.eigenvalues()(i) - strategy.lambda()) < 1e-9) {
        const Vector u = solver.eigenvectors().col(i) - psi * psi.dot(solver.eigenvectors().col(i));
        if (u.norm() < 1e-9) continue;
        projected += u * u.dot(v) / u.squaredNorm();
      }
    }
    if (projected.norm() < 1e-8) {
      // The seed ket is orthogonal to the eigenspace; take any eigenvector in it.
      for (Eigen::Index i = d; i-- > 0;) {
        if (std::abs(solver.eigenvalues()(i) - strategy.lambda()) < 1e-9) {
          projected = solver.eigenvectors().col(i) - psi * psi.dot(solver.eigenvectors().col(i));
          if (projected.norm() > 1e-8) break;
        }
      }
    }
    v = projected;
  }
  return StateVector::normalized(std::move(v));
}

}  // namespace cqsv

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

#include "cqsv/qstate.hpp"

#include <array>
#include <random>

#include "gtest/gtest.h"

#include "cqsv/noise_models.hpp"
#include "cqsv/protocol.hpp"
#include "cqsv/target_states.hpp"
#include "oracles.hpp"

using namespace cqsv;

namespace {

DensityMatrix random_dm(std::size_t d, std::mt19937_64& rng) { return DensityMatrix(oracle::random_density(d, rng)); }

Matrix basis_projector(std::size_t d, std::size_t i) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return m;
}

}  // namespace

TEST(qstate, state_vector_invariants) {
  EXPECT_THROW(StateVector(Vector::Ones(3) / std::sqrt(3.0)), std::invalid_argument);
  EXPECT_THROW(StateVector(Vector::Ones(4)), std::invalid_argument);
  EXPECT_THROW(StateVector::normalized(Vector::Zero(4)), std::invalid_argument);
  const StateVector psi = StateVector::normalized(Vector::Ones(8));
  EXPECT_EQ(psi.num_qubits(), 3);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_EQ(StateVector::basis(2, 3).amplitudes()(3), Complex(1.0));
}

TEST(qstate, density_matrix_invariants) {
  Matrix not_hermitian = Matrix::Identity(2, 2) / 2.0;
  not_hermitian(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{not_hermitian}, InvariantError);
  EXPECT_THROW(DensityMatrix{Matrix::Identity(2, 2)}, InvariantError);

  std::mt19937_64 rng(7);
  const DensityMatrix rho = random_dm(4, rng);
  EXPECT_TRUE(rho.is_positive_semidefinite());
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);

  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_FALSE(DensityMatrix(negative).is_positive_semidefinite());
}

TEST(qstate, operator_hermitian_flag_is_checked) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(Operator(m, true), std::invalid_argument);
  EXPECT_NO_THROW(Operator(m, false));
}

TEST(qstate, kron_identity_and_basis) {
  const Operator i2 = Operator::identity(2);
  EXPECT_EQ(kron(i2, i2).matrix(), Matrix::Identity(4, 4));
  const Operator p0(basis_projector(2, 0), true);
  const Operator p1(basis_projector(2, 1), true);
  EXPECT_EQ(kron(p0, p1).matrix(), basis_projector(4, 1));
}

TEST(qstate, kron_matches_nested_loop_oracle) {
  const DensityMatrix sigma = white(bell(), 0.01);
  const DensityMatrix both = kron(sigma, sigma);
  EXPECT_EQ(both.dimension(), 16u);
  EXPECT_NEAR(both.trace(), 1.0, 1e-12);
  EXPECT_LE(max_abs_diff(both.matrix(), oracle::kron(sigma.matrix(), sigma.matrix())), 1e-15);
}

TEST(qstate, kron_is_associative) {
  std::mt19937_64 rng(11);
  const DensityMatrix a = random_dm(2, rng), b = random_dm(4, rng), c = random_dm(2, rng);
  EXPECT_LE(max_abs_diff(kron(kron(a, b), c).matrix(), kron(a, kron(b, c)).matrix()), 1e-12);
}

TEST(qstate, kron_respects_dimension_cap) {
  const EngineLimits limits{64};
  const DensityMatrix a = DensityMatrix::maximally_mixed(3);
  EXPECT_NO_THROW(kron(a, a, limits));
  EXPECT_THROW(kron(kron(a, a), a, limits), DimensionCapError);
  EXPECT_THROW(kron_power(a, 3, limits), DimensionCapError);
  try {
    kron_power(a, 3, limits);
  } catch (const DimensionCapError& e) {
    EXPECT_EQ(e.cap(), 64u);
  }
}

TEST(qstate, partial_trace_of_bell_is_maximally_mixed) {
  const DensityMatrix phi = DensityMatrix::pure(bell());
  const std::array<std::size_t, 2> dims{2, 2};
  const std::array<std::size_t, 1> keep{0};
  EXPECT_LE(max_abs_diff(partial_trace(phi, keep, dims).matrix(), Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(qstate, partial_trace_of_product_state) {
  std::mt19937_64 rng(3);
  const DensityMatrix rho = random_dm(4, rng);
  const DensityMatrix tau = random_dm(2, rng);
  const std::array<std::size_t, 2> dims{4, 2};
  const std::array<std::size_t, 1> first{0};
  const std::array<std::size_t, 1> second{1};
  EXPECT_LE(max_abs_diff(partial_trace(kron(rho, tau), first, dims).matrix(), rho.matrix()), 1e-12);
  EXPECT_LE(max_abs_diff(partial_trace(kron(rho, tau), second, dims).matrix(), tau.matrix()), 1e-12);
}

TEST(qstate, partial_trace_of_two_copy_swap_projection) {
  const DensityMatrix sigma = white(bell(), 0.01);
  const ProjectedState projected = swap_projection_apply(kron(sigma, sigma), 2, 4);
  const double norm = projected.weight;
  const std::array<std::size_t, 2> dims{4, 4};
  const std::array<std::size_t, 1> keep{0};
  const Matrix reduced = partial_trace(projected.state, keep, dims) / norm;
  const Matrix& s = sigma.matrix();
  const Matrix expected = (s + s * s) / (2.0 * norm);
  EXPECT_LE(max_abs_diff(reduced, expected), 1e-12);
  EXPECT_NEAR(norm, (1.0 + (s * s).trace().real()) / 2.0, 1e-12);
}

TEST(qstate, partial_trace_is_linear_and_trace_preserving) {
  std::mt19937_64 rng(5);
  const std::array<std::size_t, 3> dims{2, 4, 2};
  const std::array<std::size_t, 2> keep{2, 0};
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix r1 = oracle::random_density(16, rng);
    const Matrix r2 = oracle::random_density(16, rng);
    const double alpha = 0.3, beta = 0.7;
    const Matrix lhs = partial_trace(Matrix(alpha * r1 + beta * r2), keep, dims);
    const Matrix rhs = alpha * partial_trace(r1, keep, dims) + beta * partial_trace(r2, keep, dims);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
    EXPECT_NEAR(partial_trace(r1, keep, dims).trace().real(), 1.0, 1e-12);
    EXPECT_EQ(partial_trace(r1, keep, dims).rows(), 4);
  }
}

TEST(qstate, partial_trace_rejects_inconsistent_dims) {
  const std::array<std::size_t, 2> dims{2, 4};
  const std::array<std::size_t, 1> keep{0};
  EXPECT_THROW(partial_trace(Matrix(Matrix::Identity(4, 4) / 4.0), keep, dims), std::invalid_argument);
  const std::array<std::size_t, 1> bad_keep{2};
  EXPECT_THROW(partial_trace(Matrix(Matrix::Identity(8, 8) / 8.0), bad_keep, dims), std::invalid_argument);
}

TEST(qstate, cyclic_shift_two_copies_is_swap) {
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  EXPECT_EQ(cyclic_shift_operator(2, 2).matrix(), swap);
  EXPECT_TRUE(cyclic_shift_operator(2, 2).is_hermitian());
}

TEST(qstate, cyclic_shift_has_order_k) {
  const Matrix s3 = cyclic_shift_operator(3, 2).matrix();
  EXPECT_EQ(oracle::matrix_power(s3, 3), Matrix::Identity(8, 8));
  EXPECT_NE(oracle::matrix_power(s3, 1), Matrix::Identity(8, 8));
  EXPECT_LE(max_abs_diff(s3.adjoint() * s3, Matrix::Identity(8, 8)), 0.0);
}

TEST(qstate, cyclic_shift_trace_identity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_dm(2, rng);
    const Matrix s3 = cyclic_shift_operator(3, 2).matrix();
    const Complex lhs = (s3 * kron_power(rho, 3).matrix()).trace();
    const Complex rhs = oracle::matrix_power(rho.matrix(), 3).trace();
    EXPECT_NEAR(lhs.real(), rhs.real(), 1e-12);
    EXPECT_NEAR(lhs.imag(), 0.0, 1e-12);
  }
}

TEST(qstate, cyclic_shift_matches_relabel_oracle) {
  for (int k = 2; k <= 3; ++k) {
    for (std::size_t d : {2u, 4u}) {
      EXPECT_EQ(cyclic_shift_operator(k, d).matrix(), oracle::shift_by_relabel(k, d)) << "k=" << k << " d=" << d;
    }
  }
}

TEST(qstate, cyclic_shift_permutes_product_factors) {
  std::mt19937_64 rng(17);
  for (int k = 2; k <= 3; ++k) {
    for (std::size_t d : {2u, 4u}) {
      std::vector<Matrix> factors;
      for (int m = 0; m < k; ++m) factors.push_back(oracle::random_density(d, rng));
      Matrix product = factors[0];
      for (int m = 1; m < k; ++m) product = oracle::kron(product, factors[static_cast<std::size_t>(m)]);
      // copy m moves to m+1: the new first factor is the old last one
      Matrix shifted = factors[static_cast<std::size_t>(k - 1)];
      for (int m = 0; m < k - 1; ++m) shifted = oracle::kron(shifted, factors[static_cast<std::size_t>(m)]);
      const Matrix s = cyclic_shift_operator(k, d).matrix();
      EXPECT_LE(max_abs_diff(s * product * s.adjoint(), shifted), 1e-12);
    }
  }
}

TEST(qstate, cyclic_shift_rejects_single_copy) { EXPECT_THROW(cyclic_shift_operator(1, 2), std::invalid_argument); }

TEST(qstate, fidelity_cases) {
  const StateVector psi = ghz(3);
  EXPECT_NEAR(fidelity(psi, DensityMatrix::pure(psi)), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(psi, DensityMatrix::maximally_mixed(3)), 1.0 / 8.0, 1e-12);
  const DensityMatrix sigma = white(bell(), 0.01);
  const double direct = (bell().amplitudes().adjoint() * sigma.matrix() * bell().amplitudes())(0, 0).real();
  EXPECT_NEAR(fidelity(bell(), sigma), 0.99, 1e-12);
  EXPECT_NEAR(direct, 0.99, 1e-12);
  EXPECT_THROW(fidelity(bell(), DensityMatrix::maximally_mixed(3)), std::invalid_argument);
}

TEST(qstate, local_expectation_matches_full_operator) {
  std::mt19937_64 rng(19);
  const Matrix rho = oracle::random_density(32, rng);
  const std::array<std::size_t, 3> dims{2, 4, 4};
  const Matrix a = oracle::random_density(2, rng);
  const Matrix b = oracle::random_density(4, rng);
  const std::array<LocalFactor, 2> factors{LocalFactor{0, &a}, LocalFactor{2, &b}};
  const Matrix full = oracle::kron(oracle::kron(a, Matrix::Identity(4, 4)), b);
  const Complex expected = (full * rho).trace();
  const Complex got = local_expectation(rho, dims, factors);
  EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-12);
}

TEST(qstate, conjugate_local_matches_full_operator) {
  std::mt19937_64 rng(23);
  const Matrix rho = oracle::random_density(16, rng);
  const std::array<std::size_t, 2> dims{4, 4};
  Matrix k = oracle::random_density(4, rng);
  k(0, 1) += Complex(0.0, 0.3);  // not Hermitian
  const Matrix full = oracle::kron(Matrix::Identity(4, 4), k);
  EXPECT_LE(max_abs_diff(conjugate_local(rho, dims, 1, k), full * rho * full.adjoint()), 1e-12);
}

TEST(qstate, generated_density_matrices_satisfy_invariants) {
  std::mt19937_64 rng(29);
  const DensityMatrix rho = random_dm(4, rng);
  const std::array<std::size_t, 2> dims{2, 2};
  const std::array<std::size_t, 1> keep{1};
  for (const DensityMatrix& m : {kron(rho, rho), kron_power(rho, 3), partial_trace(rho, keep, dims)}) {
    EXPECT_TRUE(is_hermitian(m.matrix()));
    EXPECT_NEAR(m.trace(), 1.0, 1e-12);
    EXPECT_GE(m.min_eigenvalue(), -1e-10);
  }
}

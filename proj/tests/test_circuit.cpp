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

#include "cqsv/circuit.hpp"

#include <array>
#include <random>

#include "gtest/gtest.h"

#include "cqsv/noise_models.hpp"
#include "cqsv/protocol.hpp"
#include "cqsv/target_states.hpp"
#include "oracles.hpp"

using namespace cqsv;

namespace {

/// Controlled-S_k on (ancilla, k registers of n qubits), built from the
/// digit-relabel shift.
Matrix controlled_shift_oracle(int k, int n) {
  const Matrix s = oracle::shift_by_relabel(k, std::size_t{1} << n);
  const Eigen::Index dim = s.rows();
  Matrix out = Matrix::Zero(2 * dim, 2 * dim);
  out.topLeftCorner(dim, dim) = Matrix::Identity(dim, dim);
  out.bottomRightCorner(dim, dim) = s;
  return out;
}

Matrix random_unitary4(std::mt19937_64& rng) {
  Matrix g(4, 4);
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) g(i, j) = Complex(nd(rng), nd(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(4, 4);
}

}  // namespace

TEST(circuit, base_chain_is_one_register_swap) {
  const Circuit c = build_cswap_chain(2, 1);
  EXPECT_EQ(c.counts().controlled_register_swaps, 1u);
  EXPECT_EQ(lower_to_fredkin(c).counts().fredkins, 1u);
  EXPECT_EQ(c.gates().front(), Gate::cswap_registers(0, 0, 1));
}

TEST(circuit, chain_realizes_controlled_shift) {
  for (int k = 2; k <= 4; ++k) {
    for (int n = 1; n <= 2; ++n) {
      if (k * n > 6) continue;
      EXPECT_EQ(compiled_unitary(build_cswap_chain(k, n)), controlled_shift_oracle(k, n)) << "k=" << k << " n=" << n;
    }
  }
}

TEST(circuit, three_copy_shift_on_basis_kets) {
  const Circuit c = build_cswap_chain(3, 1);
  for (std::size_t abc = 0; abc < 8; ++abc) {
    const std::size_t a = (abc >> 2) & 1, b = (abc >> 1) & 1, cc = abc & 1;
    // |1>|a b c> -> |1>|c a b>
    const StateVector out = simulate_circuit(c, StateVector::basis(4, 8 | abc));
    const std::size_t expected = 8 | (cc << 2) | (a << 1) | b;
    EXPECT_EQ(out.amplitudes(), StateVector::basis(4, expected).amplitudes());
    // control |0>: identity
    EXPECT_EQ(simulate_circuit(c, StateVector::basis(4, abc)).amplitudes(), StateVector::basis(4, abc).amplitudes());
  }
}

TEST(circuit, lowering_counts_and_preserves_unitary) {
  const Circuit chain = build_cswap_chain(2, 3);
  const Circuit lowered = lower_to_fredkin(chain);
  EXPECT_EQ(lowered.counts().fredkins, 3u);
  EXPECT_LE((compiled_unitary(chain) - compiled_unitary(lowered)).norm(), 1e-10);

  const Circuit three = lower_to_fredkin(build_cswap_chain(3, 2));
  const ResourceSummary summary = resource_summary(three);
  EXPECT_EQ(summary.fredkins, 4u);
  EXPECT_EQ(summary.fredkin_upper_bound, 6u);
  EXPECT_EQ(summary.two_qubit, 20u);
  EXPECT_EQ(summary.two_qubit_upper_bound, 30u);
  EXPECT_EQ(resource_summary(build_cswap_chain(3, 2)).fredkins, 4u);
}

TEST(circuit, two_qubit_counts) {
  EXPECT_EQ(two_qubit_count(lower_to_fredkin(build_cswap_chain(2, 1))), 5u);
  EXPECT_EQ(two_qubit_count(build_cswap_chain(3, 2)), 20u);
  EXPECT_EQ(two_qubit_count(Circuit(Layout{1, 2, 1})), 0u);
}

TEST(circuit, count_formulas_hold_for_generated_circuits) {
  for (int k = 2; k <= 8; ++k) {
    for (int n = 1; n <= 5; ++n) {
      const Circuit chain = build_cswap_chain(k, n);
      const Circuit lowered = lower_to_fredkin(chain);
      EXPECT_EQ(chain.counts().controlled_register_swaps, static_cast<std::uint64_t>(k - 1));
      EXPECT_EQ(lowered.counts().fredkins, static_cast<std::uint64_t>(n * (k - 1)));
      EXPECT_EQ(two_qubit_count(lowered), static_cast<std::uint64_t>(5 * n * (k - 1)));
      EXPECT_EQ(lowered.gates().size(), lowered.counts().fredkins);
    }
  }
}

TEST(circuit, fredkin_swaps_targets_when_control_set) {
  Circuit c(Layout{1, 2, 1});
  c.add(Gate::fredkin(0, 1, 2));
  EXPECT_EQ(simulate_circuit(c, StateVector::basis(3, 0b110)).amplitudes(), StateVector::basis(3, 0b101).amplitudes());
  EXPECT_EQ(simulate_circuit(c, StateVector::basis(3, 0b010)).amplitudes(), StateVector::basis(3, 0b010).amplitudes());
  const Circuit empty(Layout{1, 2, 1});
  std::mt19937_64 rng(53);
  const StateVector psi(oracle::random_state(8, rng));
  EXPECT_EQ(simulate_circuit(empty, psi).amplitudes(), psi.amplitudes());
}

TEST(circuit, controlled_branch_is_a_permutation) {
  for (int k = 2; k <= 3; ++k) {
    for (int n = 1; n <= 2; ++n) {
      const Matrix u = compiled_unitary(lower_to_fredkin(build_cswap_chain(k, n)));
      for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
          const double v = std::abs(u(i, j));
          EXPECT_TRUE(v < 1e-12 || std::abs(v - 1.0) < 1e-12);
          EXPECT_EQ(u(i, j).imag(), 0.0);
        }
      }
    }
  }
}

TEST(circuit, ancilla_projection_matches_operator_engine) {
  std::mt19937_64 rng(59);
  for (int k = 2; k <= 3; ++k) {
    for (int n = 1; n <= 2; ++n) {
      const std::size_t d = std::size_t{1} << n;
      // random product input and a white-noise i.i.d. input
      Matrix product = oracle::random_density(d, rng);
      for (int m = 1; m < k; ++m) product = oracle::kron(product, oracle::random_density(d, rng));
      const StateVector psi(oracle::random_state(d, rng));
      for (const DensityMatrix& rho : {DensityMatrix(product), kron_power(white(psi, 0.1), k)}) {
        const Circuit circuit = lower_to_fredkin(build_cswap_chain(k, n));
        const ProjectedState via_circuit = ancilla_swap_projection(circuit, rho);
        const ProjectedState via_operator = swap_projection_apply(rho, k, d);
        EXPECT_NEAR(via_circuit.weight, via_operator.weight, 1e-10);
        EXPECT_LE(max_abs_diff(via_circuit.state, via_operator.state), 1e-10);
      }
    }
  }
}

TEST(circuit, distributed_identity) {
  const StateVector psi = bell();
  const DensityMatrix pure_pair = kron_power(DensityMatrix::pure(psi), 2);
  EXPECT_LE(verify_distributed_identity(pure_pair, 1, 1), 1e-10);
  const DensityMatrix noisy = kron_power(white(psi, 0.1), 2);
  EXPECT_LE(verify_distributed_identity(noisy, 1, 1), 1e-10);
  std::mt19937_64 rng(61);
  const DensityMatrix random_pair(oracle::random_density(64, rng));
  EXPECT_LE(verify_distributed_identity(random_pair, 1, 2), 1e-10);
  EXPECT_LE(verify_distributed_identity(random_pair, 2, 1), 1e-10);
}

TEST(circuit, parity_and_bell_measurements_agree) {
  std::mt19937_64 rng(67);
  const DensityMatrix rho(oracle::random_density(16, rng));
  const Circuit c = distributed_construct(1, 1);
  const ProjectedState parity = distributed_projection(c, rho, DistributedMeasurement::parity);
  const ProjectedState bell_outcome = distributed_projection(c, rho, DistributedMeasurement::bell);
  EXPECT_LE(max_abs_diff(parity.state, bell_outcome.state), 1e-12);
  // |++><++| + |--><--| = (|Phi+><Phi+| + |Psi+><Psi+|) restricted ... checked via the basis change
  Vector pp(4), mm(4), phi(4);
  pp << 0.5, 0.5, 0.5, 0.5;
  mm << 0.5, -0.5, -0.5, 0.5;
  phi << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
  Vector psi_plus(4);
  psi_plus << 0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0;
  const Matrix parity_proj = pp * pp.adjoint() + mm * mm.adjoint();
  EXPECT_LE(max_abs_diff(parity_proj, phi * phi.adjoint() + psi_plus * psi_plus.adjoint()), 1e-15);
  const ResourceSummary s = resource_summary(c);
  EXPECT_EQ(s.fredkins, 2u);
}

TEST(circuit, distributed_layout) {
  const Circuit c = distributed_construct(2, 1);
  EXPECT_EQ(c.layout().ancillas, 2);
  ASSERT_EQ(c.gates().size(), 3u);
  EXPECT_EQ(c.gates()[0].operands[0], 0);
  EXPECT_EQ(c.gates()[1].operands[0], 0);
  EXPECT_EQ(c.gates()[2].operands[0], 1);
  EXPECT_THROW(distributed_construct(0, 1), std::invalid_argument);
}

TEST(circuit, standard_fredkin_decomposition_is_exact) {
  const FredkinDecomposition d = standard_fredkin_decomposition();
  EXPECT_EQ(d.gates.size(), 5u);
  EXPECT_LE(fredkin_decomposition_error(d), 1e-12);
  const Circuit chain = build_cswap_chain(3, 1);
  const Circuit expanded = expand_fredkins(chain, d);
  EXPECT_EQ(expanded.counts().two_qubit_generic, 10u);
  EXPECT_EQ(two_qubit_count(expanded), 10u);
  EXPECT_LE(max_abs_diff(compiled_unitary(expanded), compiled_unitary(chain)), 1e-10);
}

TEST(circuit, wrong_decomposition_is_rejected) {
  FredkinDecomposition d = standard_fredkin_decomposition();
  d.gates[4] = Gate::two_qubit(0, 2, Matrix(Matrix::Identity(4, 4)));
  EXPECT_GT(fredkin_decomposition_error(d), 1e-10);
  EXPECT_THROW(expand_fredkins(build_cswap_chain(2, 1), d), std::invalid_argument);
  d.gates.pop_back();
  EXPECT_THROW(fredkin_decomposition_error(d), std::invalid_argument);
}

TEST(circuit, gate_validation) {
  Circuit c(Layout{1, 3, 2});
  EXPECT_THROW(c.add(Gate::fredkin(0, 1, 1)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate::fredkin(0, 1, 7)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate::cswap_registers(0, 1, 3)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate::cswap_registers(1, 0, 1)), std::invalid_argument);
  Matrix not_unitary = Matrix::Identity(4, 4);
  not_unitary(0, 0) = 2.0;
  EXPECT_THROW(c.add(Gate::two_qubit(1, 2, not_unitary)), std::invalid_argument);
  EXPECT_TRUE(c.gates().empty());
  EXPECT_EQ(c.counts(), GateCounts{});
}

TEST(circuit, text_round_trip) {
  std::mt19937_64 rng(71);
  Circuit c(Layout{1, 3, 2});
  c.add(Gate::cswap_registers(0, 1, 2));
  c.add(Gate::fredkin(0, 1, 3));
  c.add(Gate::two_qubit(2, 5, random_unitary4(rng)));
  c.add(Gate::two_qubit(6, 0, random_unitary4(rng)));
  const std::string text = emit_circuit(c);
  const Circuit parsed = parse_circuit(text);
  EXPECT_EQ(parsed, c);
  EXPECT_EQ(emit_circuit(parsed), text);

  const Circuit dist = distributed_construct(1, 2);
  EXPECT_EQ(parse_circuit(emit_circuit(dist)), dist);
}

TEST(circuit, text_format_shape) {
  const std::string text = emit_circuit(lower_to_fredkin(build_cswap_chain(2, 1)));
  EXPECT_EQ(text, "# collective-qsv circuit v1\nREGISTERS 2 1\nANCILLA 0\nFREDKIN 0 1 2\n");
}

TEST(circuit, parse_errors_carry_line_numbers) {
  try {
    parse_circuit("REGISTERS 2 1\nANCILLA 0\nFREDKIN 0 1 x\n");
    FAIL();
  } catch (const CircuitParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_circuit("FREDKIN 0 1 2\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("REGISTERS 2 1\nANCILLA 1\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("REGISTERS 2 1\nANCILLA 0\nTOFFOLI 0 1 2\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("REGISTERS 2 1\nANCILLA 0\nFREDKIN 0 1 1\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("REGISTERS 2 1\nANCILLA 0\nU2 0 1 (1,0)\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit(""), CircuitParseError);
}

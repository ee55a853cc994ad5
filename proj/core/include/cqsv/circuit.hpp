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

// Gate-level lowering of the ancilla-controlled cyclic shift used by the
// SWAP projection, with a dense simulator for equivalence checks and a
// line-oriented text format.
//
// Qubits are numbered big-endian: qubit 0 is the most significant bit of a
// basis index. Ancillas occupy qubits [0, a); register r then holds qubits
// a + r*n ... a + r*n + n - 1.

#ifndef CQSV_CIRCUIT_HPP
#define CQSV_CIRCUIT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cqsv/protocol.hpp"
#include "cqsv/qstate.hpp"

namespace cqsv {

enum class GateKind { controlled_register_swap, fredkin, two_qubit_generic };

/// Operands: controlled_register_swap {control qubit, register, register};
/// fredkin {control, target, target}; two_qubit_generic {q1, q2} with a 4x4
/// payload in the |q1 q2> basis.
struct Gate {
  GateKind kind = GateKind::fredkin;
  std::vector<int> operands;
  std::optional<Matrix> payload;

  static Gate cswap_registers(int control, int r1, int r2);
  static Gate fredkin(int control, int a, int b);
  static Gate two_qubit(int q1, int q2, Matrix unitary);

  friend bool operator==(const Gate& a, const Gate& b);
};

struct Layout {
  int ancillas = 1;
  int registers = 2;
  int register_qubits = 1;

  int num_qubits() const noexcept { return ancillas + registers * register_qubits; }
  int qubit(int reg, int bit) const { return ancillas + reg * register_qubits + bit; }
  void validate() const;

  friend bool operator==(const Layout&, const Layout&) = default;
};

struct GateCounts {
  std::uint64_t controlled_register_swaps = 0;
  std::uint64_t fredkins = 0;
  std::uint64_t two_qubit_generic = 0;
  friend bool operator==(const GateCounts&, const GateCounts&) = default;
};

class Circuit {
 public:
  explicit Circuit(Layout layout);

  /// Throws std::invalid_argument on out-of-range or repeated operands and
  /// on non-unitary payloads.
  void add(Gate gate);

  const Layout& layout() const noexcept { return layout_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const GateCounts& counts() const noexcept { return counts_; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  Layout layout_;
  std::vector<Gate> gates_;
  GateCounts counts_;
};

/// k-1 controlled register swaps on one ancilla; realizes controlled S_k.
Circuit build_cswap_chain(int k, int n);

/// Each controlled register swap becomes n Fredkins, one per bit position.
Circuit lower_to_fredkin(const Circuit& circuit);

/// Fredkin-equivalent count (a register swap counts as n) times five, plus
/// one per generic two-qubit gate.
std::uint64_t two_qubit_count(const Circuit& circuit);

struct ResourceSummary {
  std::uint64_t controlled_register_swaps = 0;
  std::uint64_t fredkins = 0;
  std::uint64_t two_qubit = 0;
  /// nk and 5nk: looser published bounds, reported alongside.
  std::uint64_t fredkin_upper_bound = 0;
  std::uint64_t two_qubit_upper_bound = 0;
};

ResourceSummary resource_summary(const Circuit& circuit);

StateVector simulate_circuit(const Circuit& circuit, const StateVector& input);

/// Full 2^q x 2^q unitary of the gate sequence.
Matrix compiled_unitary(const Circuit& circuit, const EngineLimits& limits = {});

/// Ancilla |+>, circuit, then <+| on the ancilla, evaluated on the full
/// density matrix. Needs a single-ancilla layout; `rho` lives on the
/// registers.
ProjectedState ancilla_swap_projection(const Circuit& circuit, const DensityMatrix& rho,
                                       const EngineLimits& limits = {});

/// Bell-ancilla construction for two parties holding qa and qb qubits of
/// each of two copies. Ancilla 0 controls party A's Fredkins, ancilla 1
/// party B's. Each register is one copy laid out as A then B.
Circuit distributed_construct(int qa, int qb);

enum class DistributedMeasurement {
  /// |++><++| + |--><--|
  parity,
  /// |Phi><Phi|
  bell,
};

ProjectedState distributed_projection(const Circuit& circuit, const DensityMatrix& rho,
                                      DistributedMeasurement measurement = DistributedMeasurement::parity,
                                      const EngineLimits& limits = {});

/// Entrywise max deviation between the distributed result and the
/// monolithic SWAP projection of the two-copy input.
double verify_distributed_identity(const DensityMatrix& rho, int qa, int qb,
                                   DistributedMeasurement measurement = DistributedMeasurement::parity,
                                   const EngineLimits& limits = {});

/// Five two-qubit gates on local qubits {0: control, 1: a, 2: b}.
struct FredkinDecomposition {
  std::vector<Gate> gates;
};

/// Max entrywise distance between the product of the decomposition and the
/// 8x8 Fredkin matrix; throws std::invalid_argument unless it holds exactly
/// five two-qubit gates on local qubits 0..2.
double fredkin_decomposition_error(const FredkinDecomposition& decomposition);

/// A five-gate decomposition built from CNOTs and controlled-sqrt(X).
FredkinDecomposition standard_fredkin_decomposition();

/// Replaces every Fredkin (after lowering register swaps) by the given
/// decomposition. Throws std::invalid_argument if it is off by > 1e-10.
Circuit expand_fredkins(const Circuit& circuit, const FredkinDecomposition& decomposition);

class CircuitParseError : public std::runtime_error {
 public:
  CircuitParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

std::string emit_circuit(const Circuit& circuit);
Circuit parse_circuit(std::string_view text);

}  // namespace cqsv

#endif  // CQSV_CIRCUIT_HPP

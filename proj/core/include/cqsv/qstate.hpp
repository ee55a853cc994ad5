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

// Dense complex linear algebra for multi-qubit states.
//
// Register order is big-endian throughout: the first-listed subsystem is the
// most significant block of a basis index, so |i_1 i_2 ... i_k> has index
// i_1 * d^(k-1) + ... + i_k.

#ifndef CQSV_QSTATE_HPP
#define CQSV_QSTATE_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cqsv/errors.hpp"

namespace cqsv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

inline constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 20;

/// Size cap for the exact engine. Every operation that materializes a
/// dense object checks its total (side) dimension against this.
struct EngineLimits {
  std::size_t max_dimension = kDefaultMaxDimension;

  void check(std::size_t dimension, std::string_view what) const;
};

/// Returns n such that 2^n == dimension, or throws std::invalid_argument.
int qubits_for_dimension(std::size_t dimension);

/// Multiplies `base` by itself `copies` times, throwing DimensionCapError
/// if the running product passes the cap (no overflow on the way).
std::size_t checked_power(std::size_t base, int copies, const EngineLimits& limits,
                          std::string_view what);

class StateVector {
 public:
  /// Takes ownership of normalized amplitudes; length must be a power of two.
  explicit StateVector(Vector amplitudes);

  /// Normalizes first; throws on a zero vector.
  static StateVector normalized(Vector amplitudes);
  static StateVector basis(int num_qubits, std::size_t index);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

  /// |psi><psi|
  Matrix projector() const;
  Complex inner(const StateVector& other) const;

 private:
  Vector amplitudes_;
  int num_qubits_;
};

/// A square complex matrix on a power-of-two dimension. The hermitian flag is
/// a checked claim, not a hint.
class Operator {
 public:
  Operator(Matrix entries, bool hermitian);

  static Operator identity(std::size_t dimension);

  const Matrix& matrix() const noexcept { return entries_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  bool is_hermitian() const noexcept { return hermitian_; }

 private:
  Matrix entries_;
  bool hermitian_;
};

/// Hermitian, unit-trace matrix. Construction checks Hermiticity and trace
/// (both O(d^2)); positivity needs an eigensolver and is checked on demand
/// through is_positive_semidefinite().
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int num_qubits);

  const Matrix& matrix() const noexcept { return entries_; }
  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries_.rows()); }

  double trace() const;
  double purity() const;
  double min_eigenvalue() const;
  std::vector<double> eigenvalues() const;  // ascending
  bool is_positive_semidefinite(double tolerance = kPsdTolerance) const;

 private:
  Matrix entries_;
  int num_qubits_;
};

double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_hermitian(const Matrix& m, double tolerance = kHermitianTolerance);

Operator kron(const Operator& a, const Operator& b, const EngineLimits& limits = {});
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b, const EngineLimits& limits = {});
StateVector kron(const StateVector& a, const StateVector& b, const EngineLimits& limits = {});

DensityMatrix kron_power(const DensityMatrix& rho, int copies, const EngineLimits& limits = {});
StateVector kron_power(const StateVector& psi, int copies, const EngineLimits& limits = {});

/// Reduced matrix on the subsystems in `keep` (any order; the result keeps
/// the original subsystem order). Works on unnormalized matrices too.
Matrix partial_trace(const Matrix& rho, std::span<const std::size_t> keep,
                     std::span<const std::size_t> dims);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            std::span<const std::size_t> dims);

/// Basis-index map of the cyclic shift on k copies of dimension d: the
/// content of copy m moves to copy m+1 (mod k), i.e.
/// S|i_1 i_2 ... i_k> = |i_k i_1 ... i_{k-1}> = |map[i]>.
std::vector<std::size_t> cyclic_shift_map(int k, std::size_t d, const EngineLimits& limits = {});
Operator cyclic_shift_operator(int k, std::size_t d, const EngineLimits& limits = {});

/// <psi|rho|psi>
double fidelity(const StateVector& psi, const DensityMatrix& rho);

/// One factor of a product observable: `op` acting on subsystem `subsystem`.
struct LocalFactor {
  std::size_t subsystem;
  const Matrix* op;
};

/// tr[(op_1 (x) op_2 (x) ... (x) 1) rho] for factors on distinct subsystems.
/// Traces out the untouched subsystems first, so the cost is dominated by
/// one pass over rho.
Complex local_expectation(const Matrix& rho, std::span<const std::size_t> dims,
                          std::span<const LocalFactor> factors);

/// Returns (1 (x) K (x) 1) rho (1 (x) K^dagger (x) 1) with K on `subsystem`.
Matrix conjugate_local(const Matrix& rho, std::span<const std::size_t> dims,
                       std::size_t subsystem, const Matrix& kraus);

}  // namespace cqsv

#endif  // CQSV_QSTATE_HPP

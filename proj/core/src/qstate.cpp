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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace cqsv {
namespace {

struct SubsystemLayout {
  std::vector<std::size_t> strides;
  std::size_t total = 1;
};

SubsystemLayout make_layout(std::span<const std::size_t> dims) {
  SubsystemLayout layout;
  layout.strides.resize(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    if (dims[i] == 0) throw std::invalid_argument("subsystem dimension must be positive");
    layout.strides[i] = layout.total;
    layout.total *= dims[i];
  }
  return layout;
}

// Offsets of every multi-index over `subset` (in subset order, big-endian),
// with all other digits zero.
std::vector<std::size_t> subset_offsets(std::span<const std::size_t> subset,
                                        std::span<const std::size_t> dims,
                                        const SubsystemLayout& layout) {
  std::vector<std::size_t> offsets{0};
  for (std::size_t s : subset) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * dims[s]);
    for (std::size_t base : offsets) {
      for (std::size_t digit = 0; digit < dims[s]; ++digit) {
        next.push_back(base + digit * layout.strides[s]);
      }
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<std::size_t> normalized_subset(std::span<const std::size_t> subset, std::size_t count) {
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("subsystem index listed twice");
  }
  if (!sorted.empty() && sorted.back() >= count) {
    throw std::invalid_argument("subsystem index out of range");
  }
  return sorted;
}

std::vector<std::size_t> complement(std::span<const std::size_t> sorted, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0, j = 0; i < count; ++i) {
    if (j < sorted.size() && sorted[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix is not square");
}

}  // namespace

void EngineLimits::check(std::size_t dimension, std::string_view what) const {
  if (dimension > max_dimension) throw DimensionCapError(std::string(what), dimension, max_dimension);
}

int qubits_for_dimension(std::size_t dimension) {
  if (dimension == 0 || (dimension & (dimension - 1)) != 0) {
    throw std::invalid_argument("dimension " + std::to_string(dimension) + " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dimension) ++n;
  return n;
}

std::size_t checked_power(std::size_t base, int copies, const EngineLimits& limits,
                          std::string_view what) {
  if (copies < 1) throw std::invalid_argument("copy count must be positive");
  std::size_t total = 1;
  for (int i = 0; i < copies; ++i) {
    if (base != 0 && total > limits.max_dimension / base) {
      // Report a saturated value rather than overflowing.
      throw DimensionCapError(std::string(what), std::numeric_limits<std::size_t>::max(),
                              limits.max_dimension);
    }
    total *= base;
  }
  limits.check(total, what);
  return total;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  num_qubits_ = qubits_for_dimension(static_cast<std::size_t>(amplitudes_.size()));
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("state vector norm " + std::to_string(norm) + " is not 1");
  }
}

StateVector StateVector::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  amplitudes /= norm;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis(int num_qubits, std::size_t index) {
  if (num_qubits < 0 || num_qubits > 62) throw std::invalid_argument("qubit count out of range");
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

Matrix StateVector::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

Complex StateVector::inner(const StateVector& other) const {
  if (other.dimension() != dimension()) throw std::invalid_argument("inner product dimension mismatch");
  return amplitudes_.dot(other.amplitudes_);
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(Matrix entries, bool hermitian) : entries_(std::move(entries)), hermitian_(hermitian) {
  require_square(entries_, "Operator");
  qubits_for_dimension(static_cast<std::size_t>(entries_.rows()));
  if (hermitian_ && !cqsv::is_hermitian(entries_)) {
    throw std::invalid_argument("Operator flagged hermitian is not hermitian");
  }
}

Operator Operator::identity(std::size_t dimension) {
  return Operator(Matrix::Identity(static_cast<Eigen::Index>(dimension),
                                   static_cast<Eigen::Index>(dimension)),
                  true);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "DensityMatrix");
  num_qubits_ = qubits_for_dimension(static_cast<std::size_t>(entries_.rows()));
  if (!cqsv::is_hermitian(entries_)) throw InvariantError("density matrix is not hermitian");
  const double tr = trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw InvariantError("density matrix trace " + std::to_string(tr) + " is not 1");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for hermitian rho
  return entries_.squaredNorm();
}

std::vector<double> DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues().front(); }

bool DensityMatrix::is_positive_semidefinite(double tolerance) const {
  return min_eigenvalue() >= -tolerance;
}

// ---------------------------------------------------------------------------
// Free functions

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tolerance) return false;
    }
  }
  return true;
}

Operator kron(const Operator& a, const Operator& b, const EngineLimits& limits) {
  limits.check(a.dimension() * b.dimension(), "kron");
  Matrix out = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return Operator(std::move(out), a.is_hermitian() && b.is_hermitian());
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b, const EngineLimits& limits) {
  limits.check(a.dimension() * b.dimension(), "kron");
  Matrix out = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return DensityMatrix(std::move(out));
}

StateVector kron(const StateVector& a, const StateVector& b, const EngineLimits& limits) {
  limits.check(a.dimension() * b.dimension(), "kron");
  Vector out = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  return StateVector(std::move(out));
}

DensityMatrix kron_power(const DensityMatrix& rho, int copies, const EngineLimits& limits) {
  checked_power(rho.dimension(), copies, limits, "kron_power");
  Matrix acc = rho.matrix();
  for (int i = 1; i < copies; ++i) acc = Eigen::kroneckerProduct(acc, rho.matrix()).eval();
  return DensityMatrix(std::move(acc));
}

StateVector kron_power(const StateVector& psi, int copies, const EngineLimits& limits) {
  checked_power(psi.dimension(), copies, limits, "kron_power");
  Vector acc = psi.amplitudes();
  for (int i = 1; i < copies; ++i) acc = Eigen::kroneckerProduct(acc, psi.amplitudes()).eval();
  return StateVector(std::move(acc));
}

Matrix partial_trace(const Matrix& rho, std::span<const std::size_t> keep,
                     std::span<const std::size_t> dims) {
  require_square(rho, "partial_trace");
  const SubsystemLayout layout = make_layout(dims);
  if (layout.total != static_cast<std::size_t>(rho.rows())) {
    throw std::invalid_argument("partial_trace: subsystem dimensions multiply to " +
                                std::to_string(layout.total) + " but matrix has size " +
                                std::to_string(rho.rows()));
  }
  const auto kept = normalized_subset(keep, dims.size());
  const auto traced = complement(kept, dims.size());
  const auto keep_off = subset_offsets(kept, dims, layout);
  const auto trace_off = subset_offsets(traced, dims, layout);

  const auto n = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      Complex acc{0.0, 0.0};
      const std::size_t row = keep_off[static_cast<std::size_t>(a)];
      const std::size_t col = keep_off[static_cast<std::size_t>(b)];
      for (std::size_t t : trace_off) {
        acc += rho(static_cast<Eigen::Index>(row + t), static_cast<Eigen::Index>(col + t));
      }
      out(a, b) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            std::span<const std::size_t> dims) {
  Matrix reduced = partial_trace(rho.matrix(), keep, dims);
  // Restore exact hermiticity lost to summation order.
  Matrix symmetric = (reduced + reduced.adjoint()) / 2.0;
  return DensityMatrix(std::move(symmetric));
}

std::vector<std::size_t> cyclic_shift_map(int k, std::size_t d, const EngineLimits& limits) {
  if (k < 2) throw std::invalid_argument("cyclic shift needs k >= 2");
  if (d == 0) throw std::invalid_argument("per-copy dimension must be positive");
  const std::size_t total = checked_power(d, k, limits, "cyclic_shift");
  // Moving every copy one slot to the right is a rotation of the digit
  // string: the last digit becomes the first.
  const std::size_t block = total / d;  // d^(k-1)
  std::vector<std::size_t> map(total);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t last = i % d;
    map[i] = last * block + i / d;
  }
  return map;
}

Operator cyclic_shift_operator(int k, std::size_t d, const EngineLimits& limits) {
  const auto map = cyclic_shift_map(k, d, limits);
  const auto n = static_cast<Eigen::Index>(map.size());
  Matrix s = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < map.size(); ++i) {
    s(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return Operator(std::move(s), k == 2);
}

double fidelity(const StateVector& psi, const DensityMatrix& rho) {
  if (psi.dimension() != rho.dimension()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Complex value = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  if (std::abs(value.imag()) > kHermitianTolerance * static_cast<double>(psi.dimension())) {
    throw InvariantError("fidelity has a non-negligible imaginary part");
  }
  return value.real();
}

Complex local_expectation(const Matrix& rho, std::span<const std::size_t> dims,
                          std::span<const LocalFactor> factors) {
  if (factors.empty()) return rho.trace();

  std::vector<LocalFactor> sorted(factors.begin(), factors.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LocalFactor& x, const LocalFactor& y) { return x.subsystem < y.subsystem; });
  std::vector<std::size_t> keep;
  keep.reserve(sorted.size());
  for (const auto& f : sorted) {
    if (f.op == nullptr) throw std::invalid_argument("local_expectation: null factor");
    if (f.subsystem >= dims.size()) throw std::invalid_argument("local_expectation: subsystem out of range");
    if (static_cast<std::size_t>(f.op->rows()) != dims[f.subsystem] ||
        static_cast<std::size_t>(f.op->cols()) != dims[f.subsystem]) {
      throw std::invalid_argument("local_expectation: factor does not match subsystem dimension");
    }
    keep.push_back(f.subsystem);
  }

  const bool all_kept = keep.size() == dims.size();
  const Matrix reduced_storage = all_kept ? Matrix{} : partial_trace(rho, keep, dims);
  const Matrix& reduced = all_kept ? rho : reduced_storage;

  // Digits of each reduced index, one per factor (big-endian).
  const std::size_t m = sorted.size();
  const auto n = static_cast<std::size_t>(reduced.rows());
  std::vector<std::size_t> digits(n * m);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (std::size_t f = m; f-- > 0;) {
      const std::size_t dim = dims[sorted[f].subsystem];
      digits[idx * m + f] = rest % dim;
      rest /= dim;
    }
  }

  Complex total{0.0, 0.0};
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t a = 0; a < n; ++a) {
      const Complex r = reduced(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      if (r == Complex{0.0, 0.0}) continue;
      Complex w{1.0, 0.0};
      for (std::size_t f = 0; f < m; ++f) {
        w *= (*sorted[f].op)(static_cast<Eigen::Index>(digits[a * m + f]),
                             static_cast<Eigen::Index>(digits[b * m + f]));
        if (w == Complex{0.0, 0.0}) break;
      }
      total += w * r;
    }
  }
  return total;
}

namespace {

// (1 (x) K (x) 1) * rho
Matrix left_local(const Matrix& rho, std::span<const std::size_t> dims, std::size_t subsystem,
                  const Matrix& kraus) {
  const SubsystemLayout layout = make_layout(dims);
  if (layout.total != static_cast<std::size_t>(rho.rows())) {
    throw std::invalid_argument("conjugate_local: dimension mismatch");
  }
  const std::size_t dim = dims[subsystem];
  const std::size_t stride = layout.strides[subsystem];
  const std::vector<std::size_t> single{subsystem};
  const auto others = complement(single, dims.size());
  const auto rest_off = subset_offsets(others, dims, layout);

  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    for (std::size_t base : rest_off) {
      for (std::size_t i = 0; i < dim; ++i) {
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < dim; ++j) {
          acc += kraus(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                 rho(static_cast<Eigen::Index>(base + j * stride), c);
        }
        out(static_cast<Eigen::Index>(base + i * stride), c) = acc;
      }
    }
  }
  return out;
}

}  // namespace

Matrix conjugate_local(const Matrix& rho, std::span<const std::size_t> dims,
                       std::size_t subsystem, const Matrix& kraus) {
  if (subsystem >= dims.size()) throw std::invalid_argument("conjugate_local: subsystem out of range");
  if (static_cast<std::size_t>(kraus.rows()) != dims[subsystem] || kraus.rows() != kraus.cols()) {
    throw std::invalid_argument("conjugate_local: Kraus operator does not match subsystem");
  }
  const Matrix left = left_local(rho, dims, subsystem, kraus);
  const Matrix right = left_local(left.adjoint(), dims, subsystem, kraus);
  return right.adjoint();
}

}  // namespace cqsv

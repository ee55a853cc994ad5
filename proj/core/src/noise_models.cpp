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

#include "cqsv/noise_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace cqsv {
namespace {

void require_range(double epsilon, double hi, std::string_view what) {
  if (!(epsilon >= 0.0 && epsilon <= hi)) {
    throw std::invalid_argument(std::string(what) + ": epsilon " + std::to_string(epsilon) +
                                " outside [0, " + std::to_string(hi) + "]");
  }
}

void require_orthogonal(const StateVector& target, const StateVector& psi_perp) {
  if (psi_perp.dimension() != target.dimension()) {
    throw std::invalid_argument("orthogonal direction has the wrong dimension");
  }
  if (std::abs(target.inner(psi_perp)) > 1e-10) {
    throw std::invalid_argument("orthogonal direction overlaps the target");
  }
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

const StateVector& perp_or_default(const NoiseSpec& noise, const Strategy& strategy,
                                   std::optional<StateVector>& storage) {
  if (noise.orthogonal) return *noise.orthogonal;
  storage.emplace(orthogonal_eigenstate(strategy));
  return *storage;
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::independent_white: return "independent_white";
    case NoiseKind::orthogonal_mixture: return "orthogonal_mixture";
    case NoiseKind::unitary_rotation: return "unitary_rotation";
    case NoiseKind::global_white: return "global_white";
    case NoiseKind::global_unitary_control: return "global_unitary_control";
  }
  return "unknown";
}

std::string_view short_tag(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::independent_white: return "IN";
    case NoiseKind::orthogonal_mixture: return "MIX";
    case NoiseKind::unitary_rotation: return "UR";
    case NoiseKind::global_white: return "CN";
    case NoiseKind::global_unitary_control: return "GU";
  }
  return "?";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view text) {
  for (NoiseKind kind : kAllNoiseKinds) {
    if (text == to_string(kind)) return kind;
    const std::string_view tag = short_tag(kind);
    if (text.size() == tag.size()) {
      bool same = true;
      for (std::size_t i = 0; i < tag.size(); ++i) {
        same = same && std::tolower(static_cast<unsigned char>(text[i])) ==
                           std::tolower(static_cast<unsigned char>(tag[i]));
      }
      if (same) return kind;
    }
  }
  return std::nullopt;
}

DensityMatrix white(const StateVector& target, double epsilon) {
  const auto d = static_cast<double>(target.dimension());
  require_range(epsilon, (d - 1.0) / d, "white");
  const double q = d * epsilon / (d - 1.0);
  const auto n = static_cast<Eigen::Index>(target.dimension());
  Matrix rho = (1.0 - q) * target.projector() + (q / d) * Matrix::Identity(n, n);
  return DensityMatrix(hermitian_part(rho));
}

DensityMatrix orthogonal_mixture(const StateVector& target, double epsilon, const StateVector& psi_perp) {
  require_range(epsilon, 1.0, "orthogonal_mixture");
  require_orthogonal(target, psi_perp);
  Matrix rho = (1.0 - epsilon) * target.projector() + epsilon * psi_perp.projector();
  return DensityMatrix(hermitian_part(rho));
}

DensityMatrix unitary_rotation(const StateVector& target, double epsilon, const StateVector& psi_perp) {
  require_range(epsilon, 1.0, "unitary_rotation");
  require_orthogonal(target, psi_perp);
  Vector rotated = std::sqrt(1.0 - epsilon) * target.amplitudes() + std::sqrt(epsilon) * psi_perp.amplitudes();
  const StateVector psi_eps = StateVector::normalized(std::move(rotated));
  return DensityMatrix(hermitian_part(psi_eps.projector()));
}

DensityMatrix global_white(const StateVector& target, int k, double epsilon, const EngineLimits& limits) {
  const auto d = static_cast<double>(target.dimension());
  require_range(epsilon, (d - 1.0) / d, "global_white");
  const std::size_t total = checked_power(target.dimension(), k, limits, "global_white");
  const double q = d * epsilon / (d - 1.0);
  const StateVector product = kron_power(target, k, limits);
  Matrix rho = (1.0 - q) * product.projector();
  rho.diagonal().array() += q / static_cast<double>(total);
  return DensityMatrix(hermitian_part(rho));
}

DensityMatrix global_unitary_control(const StateVector& target, int k, double epsilon,
                                     const StateVector& psi_perp, const EngineLimits& limits) {
  if (k < 1) throw std::invalid_argument("global_unitary_control: k must be positive");
  if (!(epsilon >= 0.0) || k * epsilon > 1.0 + 1e-15) {
    throw std::invalid_argument("global_unitary_control: need 0 <= k*epsilon <= 1, got k*epsilon = " +
                                std::to_string(k * epsilon));
  }
  require_orthogonal(target, psi_perp);
  const std::size_t total = checked_power(target.dimension(), k, limits, "global_unitary_control");

  // |phi'> = (1/sqrt k) sum_i |psi>^{(x)i} (x) |psi_perp> (x) |psi>^{(x)(k-1-i)}
  Vector spread = Vector::Zero(static_cast<Eigen::Index>(total));
  for (int slot = 0; slot < k; ++slot) {
    Vector term = Vector::Ones(1);
    for (int copy = 0; copy < k; ++copy) {
      const Vector& factor = copy == slot ? psi_perp.amplitudes() : target.amplitudes();
      term = Eigen::kroneckerProduct(term, factor).eval();
    }
    spread += term;
  }
  spread /= std::sqrt(static_cast<double>(k));

  const double weight = std::min(1.0, k * epsilon);
  Vector phi = std::sqrt(1.0 - weight) * kron_power(target, k, limits).amplitudes() + std::sqrt(weight) * spread;
  const StateVector state = StateVector::normalized(std::move(phi));
  return DensityMatrix(hermitian_part(state.projector()));
}

DensityMatrix single_copy_state(const NoiseSpec& noise, const Strategy& strategy) {
  std::optional<StateVector> storage;
  switch (noise.kind) {
    case NoiseKind::independent_white:
      return white(strategy.target(), noise.epsilon);
    case NoiseKind::orthogonal_mixture:
      return orthogonal_mixture(strategy.target(), noise.epsilon, perp_or_default(noise, strategy, storage));
    case NoiseKind::unitary_rotation:
      return unitary_rotation(strategy.target(), noise.epsilon, perp_or_default(noise, strategy, storage));
    case NoiseKind::global_white:
    case NoiseKind::global_unitary_control:
      break;
  }
  throw std::invalid_argument(std::string("noise kind ") + std::string(to_string(noise.kind)) +
                              " has no single-copy state");
}

DensityMatrix make_ensemble(const NoiseSpec& noise, const Strategy& strategy, int k, const EngineLimits& limits) {
  if (k < 1) throw std::invalid_argument("ensemble size must be positive");
  if (is_iid(noise.kind)) {
    checked_power(strategy.target().dimension(), k, limits, "make_ensemble");
    return kron_power(single_copy_state(noise, strategy), k, limits);
  }
  if (noise.kind == NoiseKind::global_white) {
    return global_white(strategy.target(), k, noise.epsilon, limits);
  }
  std::optional<StateVector> storage;
  return global_unitary_control(strategy.target(), k, noise.epsilon, perp_or_default(noise, strategy, storage),
                                limits);
}

}  // namespace cqsv

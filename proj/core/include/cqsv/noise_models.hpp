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

#ifndef CQSV_NOISE_MODELS_HPP
#define CQSV_NOISE_MODELS_HPP

#include <optional>
#include <string_view>

#include "cqsv/qstate.hpp"
#include "cqsv/target_states.hpp"

namespace cqsv {

enum class NoiseKind {
  independent_white,       // sigma = (1-q)|psi><psi| + q 1/d on every copy
  orthogonal_mixture,      // (1-eps)|psi><psi| + eps|psi_perp><psi_perp| on every copy
  unitary_rotation,        // |psi_eps> = sqrt(1-eps)|psi> + sqrt(eps)|psi_perp> on every copy
  global_white,            // (1-q)|psi><psi|^{(x)k} + q 1/d^k on the ensemble
  global_unitary_control,  // adversarial pure rotation of the whole ensemble
};

inline constexpr NoiseKind kAllNoiseKinds[] = {
    NoiseKind::independent_white, NoiseKind::orthogonal_mixture, NoiseKind::unitary_rotation,
    NoiseKind::global_white, NoiseKind::global_unitary_control};

std::string_view to_string(NoiseKind kind);
/// Accepts the full names and the short tags in, mix, ur, cn, gu.
std::optional<NoiseKind> parse_noise_kind(std::string_view text);
std::string_view short_tag(NoiseKind kind);

/// True for the kinds that prepare every copy independently.
constexpr bool is_iid(NoiseKind kind) {
  return kind == NoiseKind::independent_white || kind == NoiseKind::orthogonal_mixture ||
         kind == NoiseKind::unitary_rotation;
}

/// Which noise produced an ensemble. epsilon is the per-copy infidelity; for
/// global unitary control the ensemble weight on |phi'> is k * epsilon.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::independent_white;
  double epsilon = 0.0;
  /// Orthogonal direction for the mixture/rotation/adversarial models.
  /// Defaults to orthogonal_eigenstate(strategy).
  std::optional<StateVector> orthogonal;

  /// The collective scheme only purifies below eps = 1/2.
  bool above_purification_threshold() const noexcept { return epsilon >= 0.5; }
};

DensityMatrix white(const StateVector& target, double epsilon);
DensityMatrix orthogonal_mixture(const StateVector& target, double epsilon, const StateVector& psi_perp);
DensityMatrix unitary_rotation(const StateVector& target, double epsilon, const StateVector& psi_perp);
DensityMatrix global_white(const StateVector& target, int k, double epsilon,
                           const EngineLimits& limits = {});
DensityMatrix global_unitary_control(const StateVector& target, int k, double epsilon,
                                     const StateVector& psi_perp, const EngineLimits& limits = {});

/// Single-copy state of an i.i.d. noise kind.
DensityMatrix single_copy_state(const NoiseSpec& noise, const Strategy& strategy);

/// The k-copy ensemble for any noise kind.
DensityMatrix make_ensemble(const NoiseSpec& noise, const Strategy& strategy, int k,
                            const EngineLimits& limits = {});

}  // namespace cqsv

#endif  // CQSV_NOISE_MODELS_HPP

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

// The collective verification round: a SWAP projection on k copies
// (ancilla |+> -> controlled cyclic shift -> post-select ancilla on |+>),
// a uniformly random choice of t copies, then the standard two-outcome test
// {Omega, 1 - Omega} on each chosen copy. A round passes only if the ancilla
// and every measured copy pass.

#ifndef CQSV_PROTOCOL_HPP
#define CQSV_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "cqsv/noise_models.hpp"
#include "cqsv/qstate.hpp"
#include "cqsv/target_states.hpp"

namespace cqsv {

/// Pi_{k,t}: k copies per round, t of them measured, failure budget delta.
struct Scheme {
  int k = 2;
  int t = 1;
  double delta = 0.01;

  void validate() const;
  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// C(n, r); throws std::overflow_error if it does not fit in 64 bits.
std::uint64_t binomial(int n, int r);

/// All size-t subsets of {0, ..., k-1} in lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_subsets(int k, int t);

/// D rho D^dagger with D = (1 + S_k)/2, left unnormalized, plus its trace
/// (the probability that the ancilla is found in |+>).
struct ProjectedState {
  Matrix state;
  double weight = 0.0;
};

ProjectedState swap_projection_apply(const Matrix& rho, int k, std::size_t d, const EngineLimits& limits = {});
ProjectedState swap_projection_apply(const DensityMatrix& rho, int k, std::size_t d,
                                     const EngineLimits& limits = {});

/// Exact operator-level evaluation of Pi_{k,t} on one ensemble. The SWAP
/// projection is computed once; each query then only touches reduced
/// matrices on the copies it needs.
class CollectiveEvaluator {
 public:
  CollectiveEvaluator(const DensityMatrix& ensemble, int k, const EngineLimits& limits = {});

  int copies() const noexcept { return k_; }
  std::size_t copy_dimension() const noexcept { return d_; }
  double ancilla_weight() const noexcept { return projected_.weight; }
  const Matrix& projected_state() const noexcept { return projected_.state; }

  /// tr[(Omega on S (x) 1) D rho D^dagger] for every size-t subset S, in
  /// enumerate_subsets order.
  std::vector<double> subset_pass_terms(int t, const Strategy& strategy) const;

  /// Mean of subset_pass_terms: the overall pass probability.
  double pass_probability(int t, const Strategy& strategy) const;

  /// Target fidelity of an unmeasured copy given that the round passed,
  /// averaged over subsets and over the unmeasured positions. Needs t < k.
  double unmeasured_fidelity(int t, const Strategy& strategy) const;

 private:
  void check_strategy(int t, const Strategy& strategy) const;

  int k_;
  std::size_t d_;
  std::vector<std::size_t> dims_;
  ProjectedState projected_;
};

double pass_probability_exact(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
                              const EngineLimits& limits = {});
double unmeasured_fidelity_exact(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
                                 const EngineLimits& limits = {});

// ---------------------------------------------------------------------------
// Sampling

using RoundRng = std::mt19937_64;

/// Counter-based substream: the generator for round `index` depends only on
/// (seed, index), so any partition of rounds across threads sees the same
/// random numbers.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);
RoundRng make_round_rng(std::uint64_t seed, std::uint64_t index);

struct RoundOutcome {
  bool ancilla_passed = false;
  /// Conjunction over the t measured copies; false when the ancilla failed.
  bool qsv_passed = false;
  std::vector<std::size_t> measured_indices;

  bool passed() const noexcept { return ancilla_passed && qsv_passed; }
};

/// Precomputes everything a round needs so that sampling is cheap and the
/// sampler can be shared across threads.
class RoundSampler {
 public:
  RoundSampler(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
               const EngineLimits& limits = {});

  RoundOutcome sample(RoundRng& rng) const;

  const Scheme& scheme() const noexcept { return scheme_; }
  double ancilla_weight() const noexcept { return weight_; }
  const std::vector<std::vector<std::size_t>>& subsets() const noexcept { return subsets_; }
  /// Conditional pass probability of each sequential measurement for a
  /// subset, obtained from Lueders updates of the post-selected state.
  const std::vector<double>& conditional_chain(std::size_t subset) const { return chains_.at(subset); }

 private:
  Scheme scheme_;
  double weight_;
  std::vector<std::vector<std::size_t>> subsets_;
  std::vector<std::vector<double>> chains_;
};

RoundOutcome run_round(const Scheme& scheme, const NoiseSpec& noise, const Strategy& strategy, RoundRng& rng,
                       const EngineLimits& limits = {});

struct Interval {
  double low = 0.0;
  double high = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Wilson score interval; z = 1.96 gives 95 %.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct RunStats {
  std::uint64_t rounds_attempted = 0;
  std::uint64_t rounds_passed = 0;
  std::uint64_t ancilla_passed = 0;
  /// Exact infidelity of an unmeasured copy after a pass (not sampled);
  /// empty when t == k.
  std::optional<double> posted_unmeasured_infidelity;

  /// Empty when no rounds were attempted.
  std::optional<double> pass_rate() const;
  std::optional<Interval> wilson_ci_95() const;

  /// Order-independent aggregation of round counts.
  void merge(const RunStats& other);

  friend bool operator==(const RunStats&, const RunStats&) = default;
};

struct ExperimentOptions {
  unsigned threads = 1;
  EngineLimits limits{};
};

/// Counts only; rounds [first, first + count) of the substream family.
RunStats sample_rounds(const RoundSampler& sampler, std::uint64_t first, std::uint64_t count,
                       std::uint64_t seed, unsigned threads = 1);

RunStats run_experiment(const Scheme& scheme, const NoiseSpec& noise, const Strategy& strategy,
                        std::uint64_t rounds, std::uint64_t seed, const ExperimentOptions& options = {});

}  // namespace cqsv

#endif  // CQSV_PROTOCOL_HPP

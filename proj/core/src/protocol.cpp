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

#include "cqsv/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace cqsv {
namespace {

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& map) {
  std::vector<std::size_t> inv(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv[map[i]] = i;
  return inv;
}

void require_strategy_matches(const Strategy& strategy, std::size_t d) {
  if (strategy.target().dimension() != d) {
    throw std::invalid_argument("strategy dimension " + std::to_string(strategy.target().dimension()) +
                                " does not match copy dimension " + std::to_string(d));
  }
}

std::size_t copy_dimension_of(const DensityMatrix& ensemble, int k) {
  if (k < 2) throw std::invalid_argument("ensemble needs k >= 2 copies");
  const int n = ensemble.num_qubits();
  if (n % k != 0) {
    throw std::invalid_argument("ensemble of " + std::to_string(n) + " qubits does not split into " +
                                std::to_string(k) + " equal copies");
  }
  return std::size_t{1} << (n / k);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void Scheme::validate() const {
  if (k < 2) throw std::invalid_argument("scheme needs k >= 2, got " + std::to_string(k));
  if (t < 1 || t > k) {
    throw std::invalid_argument("scheme needs 1 <= t <= k, got t = " + std::to_string(t) + ", k = " +
                                std::to_string(k));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("scheme needs 0 < delta < 1, got " + std::to_string(delta));
  }
}

std::uint64_t binomial(int n, int r) {
  if (n < 0 || r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t result = 1;
  for (int i = 1; i <= r; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - r + i);
    // result * num / i is always integral; divide first where possible.
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t reduced = result / g;
    const std::uint64_t div = static_cast<std::uint64_t>(i) / g;
    if (reduced > std::numeric_limits<std::uint64_t>::max() / num) throw std::overflow_error("binomial overflow");
    result = reduced * (num / div);
  }
  return result;
}

std::vector<std::vector<std::size_t>> enumerate_subsets(int k, int t) {
  if (k < 1 || t < 0 || t > k) throw std::invalid_argument("enumerate_subsets: need 0 <= t <= k");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current(static_cast<std::size_t>(t));
  std::iota(current.begin(), current.end(), std::size_t{0});
  while (true) {
    out.push_back(current);
    int i = t - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == static_cast<std::size_t>(k - t + i)) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

ProjectedState swap_projection_apply(const Matrix& rho, int k, std::size_t d, const EngineLimits& limits) {
  const std::size_t total = checked_power(d, k, limits, "swap_projection");
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total) {
    throw std::invalid_argument("swap_projection: matrix size does not match d^k");
  }
  // (S rho)[a][b] = rho[s^-1 a][b], (rho S^dagger)[a][b] = rho[a][s^-1 b]
  const auto inv = inverse_permutation(cyclic_shift_map(k, d, limits));
  const auto n = static_cast<Eigen::Index>(total);
  ProjectedState out;
  out.state.resize(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const auto sb = static_cast<Eigen::Index>(inv[static_cast<std::size_t>(b)]);
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto sa = static_cast<Eigen::Index>(inv[static_cast<std::size_t>(a)]);
      out.state(a, b) = 0.25 * (rho(a, b) + rho(sa, b) + rho(a, sb) + rho(sa, sb));
    }
  }
  out.weight = out.state.trace().real();
  return out;
}

ProjectedState swap_projection_apply(const DensityMatrix& rho, int k, std::size_t d, const EngineLimits& limits) {
  return swap_projection_apply(rho.matrix(), k, d, limits);
}

// ---------------------------------------------------------------------------
// CollectiveEvaluator

CollectiveEvaluator::CollectiveEvaluator(const DensityMatrix& ensemble, int k, const EngineLimits& limits)
    : k_(k), d_(copy_dimension_of(ensemble, k)), dims_(static_cast<std::size_t>(k), d_) {
  projected_ = swap_projection_apply(ensemble, k, d_, limits);
}

void CollectiveEvaluator::check_strategy(int t, const Strategy& strategy) const {
  if (t < 1 || t > k_) throw std::invalid_argument("measured subset size must satisfy 1 <= t <= k");
  require_strategy_matches(strategy, d_);
}

std::vector<double> CollectiveEvaluator::subset_pass_terms(int t, const Strategy& strategy) const {
  check_strategy(t, strategy);
  const Matrix& omega = strategy.omega().matrix();
  std::vector<double> terms;
  for (const auto& subset : enumerate_subsets(k_, t)) {
    std::vector<LocalFactor> factors;
    factors.reserve(subset.size());
    for (std::size_t copy : subset) factors.push_back({copy, &omega});
    terms.push_back(local_expectation(projected_.state, dims_, factors).real());
  }
  return terms;
}

double CollectiveEvaluator::pass_probability(int t, const Strategy& strategy) const {
  const auto terms = subset_pass_terms(t, strategy);
  return std::accumulate(terms.begin(), terms.end(), 0.0) / static_cast<double>(terms.size());
}

double CollectiveEvaluator::unmeasured_fidelity(int t, const Strategy& strategy) const {
  check_strategy(t, strategy);
  if (t >= k_) throw std::invalid_argument("unmeasured fidelity needs t < k");
  const Matrix& omega = strategy.omega().matrix();
  const Matrix target = strategy.target().projector();

  double joint = 0.0;
  std::size_t count = 0;
  for (const auto& subset : enumerate_subsets(k_, t)) {
    for (std::size_t u = 0; u < static_cast<std::size_t>(k_); ++u) {
      if (std::find(subset.begin(), subset.end(), u) != subset.end()) continue;
      std::vector<LocalFactor> factors;
      for (std::size_t copy : subset) factors.push_back({copy, &omega});
      factors.push_back({u, &target});
      joint += local_expectation(projected_.state, dims_, factors).real();
      ++count;
    }
  }
  joint /= static_cast<double>(count);
  const double p = pass_probability(t, strategy);
  if (!(p > 0.0)) throw std::domain_error("pass probability is zero; conditional fidelity undefined");
  return joint / p;
}

double pass_probability_exact(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
                              const EngineLimits& limits) {
  scheme.validate();
  return CollectiveEvaluator(ensemble, scheme.k, limits).pass_probability(scheme.t, strategy);
}

double unmeasured_fidelity_exact(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
                                 const EngineLimits& limits) {
  scheme.validate();
  return CollectiveEvaluator(ensemble, scheme.k, limits).unmeasured_fidelity(scheme.t, strategy);
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

RoundRng make_round_rng(std::uint64_t seed, std::uint64_t index) { return RoundRng(substream_seed(seed, index)); }

RoundSampler::RoundSampler(const Scheme& scheme, const DensityMatrix& ensemble, const Strategy& strategy,
                           const EngineLimits& limits)
    : scheme_(scheme) {
  scheme_.validate();
  const std::size_t d = copy_dimension_of(ensemble, scheme_.k);
  require_strategy_matches(strategy, d);
  const std::vector<std::size_t> dims(static_cast<std::size_t>(scheme_.k), d);

  ProjectedState projected = swap_projection_apply(ensemble, scheme_.k, d, limits);
  weight_ = std::clamp(projected.weight, 0.0, 1.0);
  subsets_ = enumerate_subsets(scheme_.k, scheme_.t);

  const Matrix& omega = strategy.omega().matrix();
  const Matrix post = weight_ > 0.0 ? Matrix(projected.state / projected.weight) : Matrix{};
  for (const auto& subset : subsets_) {
    std::vector<double> chain;
    chain.reserve(subset.size());
    if (weight_ > 0.0) {
      Matrix state = post;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        const LocalFactor factor{subset[i], &omega};
        const double p = std::clamp(local_expectation(state, dims, std::span(&factor, 1)).real(), 0.0, 1.0);
        chain.push_back(p);
        if (p <= 0.0) {
          chain.resize(subset.size(), 0.0);
          break;
        }
        // Lueders update on a pass; skipped after the last measurement.
        if (i + 1 < subset.size()) state = conjugate_local(state, dims, subset[i], strategy.sqrt_omega()) / p;
      }
    }
    chains_.push_back(std::move(chain));
  }
}

RoundOutcome RoundSampler::sample(RoundRng& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RoundOutcome outcome;
  outcome.ancilla_passed = uniform(rng) < weight_;
  if (!outcome.ancilla_passed) return outcome;

  std::uniform_int_distribution<std::size_t> pick(0, subsets_.size() - 1);
  const std::size_t which = pick(rng);
  outcome.measured_indices = subsets_[which];
  outcome.qsv_passed = true;
  for (double p : chains_[which]) {
    if (!(uniform(rng) < p)) {
      outcome.qsv_passed = false;
      break;
    }
  }
  return outcome;
}

RoundOutcome run_round(const Scheme& scheme, const NoiseSpec& noise, const Strategy& strategy, RoundRng& rng,
                       const EngineLimits& limits) {
  const DensityMatrix ensemble = make_ensemble(noise, strategy, scheme.k, limits);
  return RoundSampler(scheme, ensemble, strategy, limits).sample(rng);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::optional<double> RunStats::pass_rate() const {
  if (rounds_attempted == 0) return std::nullopt;
  return static_cast<double>(rounds_passed) / static_cast<double>(rounds_attempted);
}

std::optional<Interval> RunStats::wilson_ci_95() const {
  if (rounds_attempted == 0) return std::nullopt;
  return wilson_interval(rounds_passed, rounds_attempted);
}

void RunStats::merge(const RunStats& other) {
  rounds_attempted += other.rounds_attempted;
  rounds_passed += other.rounds_passed;
  ancilla_passed += other.ancilla_passed;
  if (!posted_unmeasured_infidelity) posted_unmeasured_infidelity = other.posted_unmeasured_infidelity;
}

RunStats sample_rounds(const RoundSampler& sampler, std::uint64_t first, std::uint64_t count,
                       std::uint64_t seed, unsigned threads) {
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    RunStats partial;
    for (std::uint64_t r = begin; r < end; ++r) {
      RoundRng rng = make_round_rng(seed, r);
      const RoundOutcome outcome = sampler.sample(rng);
      ++partial.rounds_attempted;
      partial.ancilla_passed += outcome.ancilla_passed ? 1 : 0;
      partial.rounds_passed += outcome.passed() ? 1 : 0;
    }
    return partial;
  };

  threads = std::max(1u, threads);
  if (threads == 1 || count < 2 * static_cast<std::uint64_t>(threads)) return work(first, first + count);

  std::vector<RunStats> partials(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::uint64_t chunk = count / threads;
  for (unsigned i = 0; i < threads; ++i) {
    const std::uint64_t begin = first + i * chunk;
    const std::uint64_t end = i + 1 == threads ? first + count : begin + chunk;
    pool.emplace_back([&, i, begin, end] { partials[i] = work(begin, end); });
  }
  for (auto& th : pool) th.join();

  RunStats total;
  for (const auto& p : partials) total.merge(p);
  return total;
}

RunStats run_experiment(const Scheme& scheme, const NoiseSpec& noise, const Strategy& strategy,
                        std::uint64_t rounds, std::uint64_t seed, const ExperimentOptions& options) {
  scheme.validate();
  if (rounds == 0) return RunStats{};
  const DensityMatrix ensemble = make_ensemble(noise, strategy, scheme.k, options.limits);
  const RoundSampler sampler(scheme, ensemble, strategy, options.limits);
  RunStats stats = sample_rounds(sampler, 0, rounds, seed, options.threads);
  if (scheme.t < scheme.k) {
    const CollectiveEvaluator evaluator(ensemble, scheme.k, options.limits);
    stats.posted_unmeasured_infidelity = 1.0 - evaluator.unmeasured_fidelity(scheme.t, strategy);
  }
  return stats;
}

}  // namespace cqsv

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

// Closed-form pass probabilities, round and sample counts, output infidelity
// of the unmeasured copies, classical baselines, and the significance test
// used to tell noise models apart from an observed pass rate.
//
// d is taken as a real number so the large-dimension limit can be probed
// without building a state. Counts are ceiled once, after the full real
// expression has been evaluated.

#ifndef CQSV_ANALYTIC_HPP
#define CQSV_ANALYTIC_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cqsv/noise_models.hpp"
#include "cqsv/protocol.hpp"

namespace cqsv::analytic {

enum class Mode { first_order, exact };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Independent white noise.
double p_in(int k, int t, double lambda, double epsilon, double d, Mode mode = Mode::exact);
/// Independent mixture with one orthogonal state.
double p_mix(int k, int t, double lambda, double epsilon, Mode mode = Mode::exact);
/// Independent coherent rotation towards one orthogonal state.
double p_ur(int t, double lambda, double epsilon, Mode mode = Mode::exact);
/// Global white noise on the k-copy ensemble. Requires d*eps/(d-1) <= 1.
double p_cn(int k, int t, double lambda, double epsilon, double d, Mode mode = Mode::exact);
/// Global unitary control. Linear in epsilon, so both modes agree.
double p_gu(int t, double lambda, double epsilon);

double pass_probability(NoiseKind kind, int k, int t, double lambda, double epsilon, double d,
                        Mode mode = Mode::exact);

/// ceil(ln(1/delta) / ln(1/p)); needs 0 < p < 1.
std::uint64_t rounds_M(double p, double delta);

/// Round count before ceiling. first_order uses the linearised exponent
/// c * eps^-1 ln(1/delta); exact uses ln(1/delta) / ln(1/p).
double rounds_real(NoiseKind kind, const Scheme& scheme, double lambda, double epsilon, double d, Mode mode);

/// Infidelity of an unmeasured copy after a passing round. Needs t < k.
double output_infidelity(NoiseKind kind, int k, int t, double lambda, double epsilon, double d,
                         Mode mode = Mode::exact);

struct ComplexityReport {
  std::uint64_t rounds_M = 0;
  std::uint64_t samples_N = 0;
  std::uint64_t unmeasured_copies = 0;
  double rounds_real = 0.0;
  double pass_probability = 1.0;
  /// Empty when t == k (nothing is left unmeasured).
  std::optional<double> output_infidelity;
  Mode mode = Mode::exact;
};

ComplexityReport complexity(const Scheme& scheme, NoiseKind kind, double lambda, double epsilon, double d,
                            Mode mode);

struct Baselines {
  std::uint64_t n_opt = 0;
  /// The following need lambda < 1 (n_adv additionally lambda > 0).
  std::optional<std::uint64_t> n_std;
  std::optional<std::uint64_t> n_adv;
  std::optional<std::uint64_t> m_prime;
  double n_opt_real = 0.0;
  std::optional<double> n_std_real;
  std::optional<double> n_adv_real;
  std::optional<double> m_prime_real;
};

/// Single-copy baselines plus the round count that bounds unmeasured copies
/// under global unitary control with t measured copies.
Baselines baselines(double lambda, double epsilon, double delta, int t = 1);

struct OnlineTaskPlan {
  std::uint64_t rounds = 0;
  std::uint64_t extra_samples = 0;
  double achieved_epsilon = 0.0;
};

/// Rounds needed to hand out `copies_needed` verified copies with Pi_{k,t}
/// under independent white noise, and the infidelity that many rounds
/// certifies. Exact mode inverts the exact round count by bisection at
/// dimension d.
OnlineTaskPlan online_task_plan(std::uint64_t copies_needed, const Scheme& scheme, double lambda,
                                Mode mode = Mode::first_order, double d = 4.0);

/// KL(Bernoulli(f) || Bernoulli(m)) with 0 ln 0 = 0; +inf if supports differ.
double bernoulli_kl(double f, double m);

struct SignificanceResult {
  double observed_rate = 0.0;
  double model_rate = 0.0;
  std::uint64_t total_samples = 0;
  double divergence = 0.0;
  double significance = 1.0;
};

/// exp(-KL(f_s || model_rate) * n_total). Rates must lie in [0, 1].
SignificanceResult significance(double observed_rate, double model_rate, std::uint64_t n_total);

struct ModelSignificance {
  NoiseKind kind;
  SignificanceResult result;
};

/// Significance of every noise model whose predicted pass rate is defined at
/// these parameters. No threshold is applied.
std::vector<ModelSignificance> compare_noise_models(double observed_rate, std::uint64_t n_total,
                                                    const Scheme& scheme, double lambda, double epsilon,
                                                    double d, Mode mode = Mode::exact);

}  // namespace cqsv::analytic

#endif  // CQSV_ANALYTIC_HPP

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

#include "cqsv/analytic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cqsv::analytic {
namespace {

void require_scheme_shape(int k, int t) {
  if (k < 2) throw std::invalid_argument("need k >= 2, got " + std::to_string(k));
  if (t < 1 || t > k) throw std::invalid_argument("need 1 <= t <= k, got t = " + std::to_string(t));
}

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

void require_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

void require_dimension(double d) {
  if (!(d >= 2.0) || !std::isfinite(d)) throw std::invalid_argument("dimension d must be finite and >= 2");
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double ln_inv(double x) { return -std::log(x); }

std::uint64_t ceil_count(double real) {
  if (!std::isfinite(real) || real < 0.0) throw std::domain_error("round count is not finite");
  return static_cast<std::uint64_t>(std::ceil(real));
}

/// Per-round first-order exponent c with p ~ 1 - c * eps.
double first_order_rate(NoiseKind kind, int k, int t, double lambda) {
  const double mt = (1.0 - lambda) * t;
  switch (kind) {
    case NoiseKind::independent_white:
    case NoiseKind::orthogonal_mixture:
      return (static_cast<double>(k) + mt) / 2.0;
    case NoiseKind::global_white:
      return (1.0 + mt) / 2.0;
    case NoiseKind::unitary_rotation:
    case NoiseKind::global_unitary_control:
      return mt;
  }
  throw std::logic_error("unknown noise kind");
}

/// Joint probability that a round passes and a fixed unmeasured copy is the
/// target, for the independent kinds (numerator of F times p).
double independent_joint(int k, int t, double lambda, double epsilon) {
  const double a = 1.0 - epsilon + lambda * epsilon;
  return ((1.0 - epsilon) * std::pow(a, t) + std::pow(1.0 - epsilon, k)) / 2.0;
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::exact ? "exact" : "first_order"; }

std::optional<Mode> parse_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "exact") return Mode::exact;
  if (lower == "first_order" || lower == "first-order") return Mode::first_order;
  return std::nullopt;
}

double p_in(int k, int t, double lambda, double epsilon, double d, Mode mode) {
  require_scheme_shape(k, t);
  require_lambda(lambda);
  require_epsilon(epsilon);
  require_dimension(d);
  if (mode == Mode::first_order) return 1.0 - first_order_rate(NoiseKind::independent_white, k, t, lambda) * epsilon;
  const double a = 1.0 - epsilon + lambda * epsilon;
  return (std::pow(a, t) + std::pow(1.0 - epsilon, k) +
          std::pow(epsilon, k) * std::pow(lambda, t) / std::pow(d - 1.0, k - 1)) /
         2.0;
}

double p_mix(int k, int t, double lambda, double epsilon, Mode mode) {
  require_scheme_shape(k, t);
  require_lambda(lambda);
  require_epsilon(epsilon);
  if (mode == Mode::first_order) {
    return 1.0 - first_order_rate(NoiseKind::orthogonal_mixture, k, t, lambda) * epsilon;
  }
  const double a = 1.0 - epsilon + lambda * epsilon;
  return (std::pow(a, t) + std::pow(1.0 - epsilon, k) + std::pow(epsilon, k) * std::pow(lambda, t)) / 2.0;
}

double p_ur(int t, double lambda, double epsilon, Mode mode) {
  if (t < 1) throw std::invalid_argument("need t >= 1");
  require_lambda(lambda);
  require_epsilon(epsilon);
  if (mode == Mode::first_order) return 1.0 - (1.0 - lambda) * t * epsilon;
  return std::pow(1.0 - epsilon + lambda * epsilon, t);
}

double p_cn(int k, int t, double lambda, double epsilon, double d, Mode mode) {
  require_scheme_shape(k, t);
  require_lambda(lambda);
  require_epsilon(epsilon);
  require_dimension(d);
  const double q = d * epsilon / (d - 1.0);
  if (q > 1.0 + 1e-15) throw std::invalid_argument("global white noise needs d*eps/(d-1) <= 1");
  if (mode == Mode::first_order) return 1.0 - first_order_rate(NoiseKind::global_white, k, t, lambda) * epsilon;
  const double b = lambda + (1.0 - lambda) / d;
  return 1.0 - q + 0.5 * q * (std::pow(b, t) + ((d - 1.0) * std::pow(lambda, t) + 1.0) / std::pow(d, k));
}

double p_gu(int t, double lambda, double epsilon) {
  if (t < 1) throw std::invalid_argument("need t >= 1");
  require_lambda(lambda);
  require_epsilon(epsilon);
  const double loss = epsilon * (1.0 - lambda) * t;
  if (!(loss < 1.0)) throw std::invalid_argument("global unitary control needs eps*(1-lambda)*t < 1");
  return 1.0 - loss;
}

double pass_probability(NoiseKind kind, int k, int t, double lambda, double epsilon, double d, Mode mode) {
  switch (kind) {
    case NoiseKind::independent_white:
      return p_in(k, t, lambda, epsilon, d, mode);
    case NoiseKind::orthogonal_mixture:
      return p_mix(k, t, lambda, epsilon, mode);
    case NoiseKind::unitary_rotation:
      require_scheme_shape(k, t);
      return p_ur(t, lambda, epsilon, mode);
    case NoiseKind::global_white:
      return p_cn(k, t, lambda, epsilon, d, mode);
    case NoiseKind::global_unitary_control:
      require_scheme_shape(k, t);
      return p_gu(t, lambda, epsilon);
  }
  throw std::logic_error("unknown noise kind");
}

std::uint64_t rounds_M(double p, double delta) {
  require_delta(delta);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("rounds_M needs 0 < p < 1");
  return ceil_count(ln_inv(delta) / ln_inv(p));
}

double rounds_real(NoiseKind kind, const Scheme& scheme, double lambda, double epsilon, double d, Mode mode) {
  scheme.validate();
  if (!(epsilon > 0.0)) throw std::domain_error("round count needs eps > 0");
  if (mode == Mode::first_order) {
    require_lambda(lambda);
    const double rate = first_order_rate(kind, scheme.k, scheme.t, lambda);
    if (!(rate > 0.0)) throw std::domain_error("first-order rate vanishes; no finite round count");
    return ln_inv(scheme.delta) / (rate * epsilon);
  }
  const double p = pass_probability(kind, scheme.k, scheme.t, lambda, epsilon, d, mode);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("round count needs 0 < p < 1");
  return ln_inv(scheme.delta) / ln_inv(p);
}

double output_infidelity(NoiseKind kind, int k, int t, double lambda, double epsilon, double d, Mode mode) {
  require_scheme_shape(k, t);
  if (t >= k) throw std::invalid_argument("output infidelity needs t < k");
  require_lambda(lambda);
  require_epsilon(epsilon);
  if (epsilon == 0.0) return 0.0;

  if (mode == Mode::first_order) {
    switch (kind) {
      case NoiseKind::independent_white:
      case NoiseKind::orthogonal_mixture:
        return epsilon / 2.0 + (k - (1.0 - lambda) * t) * epsilon * epsilon / 4.0;
      case NoiseKind::unitary_rotation:
        return epsilon;
      case NoiseKind::global_white: {
        require_dimension(d);
        const double bt = std::pow(lambda + (1.0 - lambda) / d, t);
        return 0.5 * bt * epsilon + d / (4.0 * (d - 1.0)) * (2.0 - bt) * bt * epsilon * epsilon;
      }
      case NoiseKind::global_unitary_control:
        return epsilon + (1.0 - lambda) * t * epsilon * epsilon;
    }
    throw std::logic_error("unknown noise kind");
  }

  switch (kind) {
    case NoiseKind::independent_white:
      return 1.0 - independent_joint(k, t, lambda, epsilon) / p_in(k, t, lambda, epsilon, d);
    case NoiseKind::orthogonal_mixture:
      return 1.0 - independent_joint(k, t, lambda, epsilon) / p_mix(k, t, lambda, epsilon);
    case NoiseKind::unitary_rotation:
      return epsilon;
    case NoiseKind::global_white: {
      const double p = p_cn(k, t, lambda, epsilon, d);
      const double q = d * epsilon / (d - 1.0);
      const double b = lambda + (1.0 - lambda) / d;
      const double joint = (1.0 - q) + 0.5 * q * (std::pow(b, t) / d + 1.0 / std::pow(d, k));
      return 1.0 - joint / p;
    }
    case NoiseKind::global_unitary_control:
      return epsilon / p_gu(t, lambda, epsilon);
  }
  throw std::logic_error("unknown noise kind");
}

ComplexityReport complexity(const Scheme& scheme, NoiseKind kind, double lambda, double epsilon, double d,
                            Mode mode) {
  ComplexityReport report;
  report.mode = mode;
  report.rounds_real = rounds_real(kind, scheme, lambda, epsilon, d, mode);
  report.rounds_M = ceil_count(report.rounds_real);
  report.samples_N = static_cast<std::uint64_t>(scheme.t) * report.rounds_M;
  report.unmeasured_copies = static_cast<std::uint64_t>(scheme.k - scheme.t) * report.rounds_M;
  report.pass_probability = pass_probability(kind, scheme.k, scheme.t, lambda, epsilon, d, mode);
  if (scheme.t < scheme.k) {
    report.output_infidelity = output_infidelity(kind, scheme.k, scheme.t, lambda, epsilon, d, mode);
  }
  return report;
}

Baselines baselines(double lambda, double epsilon, double delta, int t) {
  require_lambda(lambda);
  require_delta(delta);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("baselines need 0 < eps < 1");
  if (t < 1) throw std::invalid_argument("baselines need t >= 1");

  Baselines out;
  const double budget = ln_inv(delta) / epsilon;
  out.n_opt_real = budget;
  out.n_opt = ceil_count(budget);
  if (lambda < 1.0) {
    out.n_std_real = budget / (1.0 - lambda);
    out.n_std = ceil_count(*out.n_std_real);
    const double x = epsilon * (1.0 - lambda) * t;
    out.m_prime_real = ln_inv(delta) / ln_inv(1.0 - x / (1.0 + x));
    out.m_prime = ceil_count(*out.m_prime_real);
  }
  if (lambda > 0.0 && lambda < 1.0) {
    const double base = std::log(delta) / std::log(lambda);
    out.n_adv_real = base * (1.0 + (1.0 - epsilon) / (lambda * epsilon));
    out.n_adv = ceil_count(*out.n_adv_real);
  }
  return out;
}

OnlineTaskPlan online_task_plan(std::uint64_t copies_needed, const Scheme& scheme, double lambda, Mode mode,
                                double d) {
  scheme.validate();
  require_lambda(lambda);
  if (scheme.t >= scheme.k) throw std::invalid_argument("online task needs t < k");
  if (copies_needed == 0) throw std::invalid_argument("online task needs at least one copy");

  OnlineTaskPlan plan;
  const auto per_round = static_cast<std::uint64_t>(scheme.k - scheme.t);
  plan.rounds = (copies_needed + per_round - 1) / per_round;
  plan.extra_samples = static_cast<std::uint64_t>(scheme.t) * plan.rounds;
  const double rounds = static_cast<double>(plan.rounds);

  const double rate = first_order_rate(NoiseKind::independent_white, scheme.k, scheme.t, lambda);
  const double first_order = ln_inv(scheme.delta) / (rate * rounds);
  if (mode == Mode::first_order) {
    plan.achieved_epsilon = first_order;
    return plan;
  }

  // Exact round count is strictly decreasing in eps on (0, (d-1)/d].
  require_dimension(d);
  double lo = 0.0;
  double hi = (d - 1.0) / d;
  auto exact_rounds = [&](double eps) {
    return rounds_real(NoiseKind::independent_white, scheme, lambda, eps, d, Mode::exact);
  };
  if (exact_rounds(hi) > rounds) {
    plan.achieved_epsilon = hi;
    return plan;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (exact_rounds(mid) > rounds) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  plan.achieved_epsilon = hi;
  return plan;
}

double bernoulli_kl(double f, double m) {
  if (!(f >= 0.0 && f <= 1.0 && m >= 0.0 && m <= 1.0)) throw std::invalid_argument("rates must lie in [0, 1]");
  auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
  };
  return term(f, m) + term(1.0 - f, 1.0 - m);
}

SignificanceResult significance(double observed_rate, double model_rate, std::uint64_t n_total) {
  SignificanceResult out;
  out.observed_rate = observed_rate;
  out.model_rate = model_rate;
  out.total_samples = n_total;
  out.divergence = bernoulli_kl(observed_rate, model_rate);
  if (n_total == 0) {
    out.significance = 1.0;
  } else if (std::isinf(out.divergence)) {
    out.significance = 0.0;
  } else {
    // Rounding can leave a tiny negative divergence; significance stays <= 1.
    out.significance = std::exp(-std::max(0.0, out.divergence) * static_cast<double>(n_total));
  }
  return out;
}

std::vector<ModelSignificance> compare_noise_models(double observed_rate, std::uint64_t n_total,
                                                    const Scheme& scheme, double lambda, double epsilon,
                                                    double d, Mode mode) {
  scheme.validate();
  if (!(observed_rate >= 0.0 && observed_rate <= 1.0)) throw std::invalid_argument("observed rate must lie in [0, 1]");
  std::vector<ModelSignificance> out;
  for (NoiseKind kind : kAllNoiseKinds) {
    double rate = 0.0;
    try {
      rate = pass_probability(kind, scheme.k, scheme.t, lambda, epsilon, d, mode);
    } catch (const std::invalid_argument&) {
      continue;  // model undefined at these parameters
    }
    if (!(rate >= 0.0 && rate <= 1.0)) continue;
    out.push_back({kind, significance(observed_rate, rate, n_total)});
  }
  return out;
}

}  // namespace cqsv::analytic

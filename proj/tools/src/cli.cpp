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

#include "cqsv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cqsv/analytic.hpp"
#include "cqsv/circuit.hpp"
#include "cqsv/errors.hpp"
#include "cqsv/noise_models.hpp"
#include "cqsv/protocol.hpp"
#include "cqsv/qstate.hpp"
#include "cqsv/target_states.hpp"

namespace cqsv::cli {
namespace {

namespace an = cqsv::analytic;

constexpr std::string_view kCsvHeader = "# collective-qsv v1";
constexpr double kBellLambda = 1.0 / 3.0;
/// Allowed gap between the operator engine and the closed form before
/// `simulate` reports an invariant violation.
constexpr double kEngineAgreement = 1e-8;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Options

struct Options {
  std::string target = "bell";
  std::optional<double> lambda;
  std::vector<double> epsilon;
  double delta = 0.01;
  std::vector<int> k;
  std::vector<int> t;
  std::vector<std::string> noise;
  std::uint64_t rounds = 10000;
  std::uint64_t seed = 1;
  std::string mode = "first_order";
  std::string out = "-";
  std::size_t max_dimension = kDefaultMaxDimension;

  // discriminate
  std::optional<double> observed;
  std::optional<std::uint64_t> samples;

  // compile
  int register_qubits = 1;
  std::string level = "fredkin";
  std::vector<int> party_qubits;
  bool verify = false;
};

/// bell | ghz:N | dicke:N:W | file:PATH
struct TargetSpec {
  enum class Kind { bell, ghz, dicke, file } kind = Kind::bell;
  int n = 2;
  int w = 1;
  std::string path;

  /// Per-copy dimension; does not materialize the state.
  double dimension() const {
    switch (kind) {
      case Kind::bell:
        return 4.0;
      case Kind::ghz:
      case Kind::dicke:
        return std::ldexp(1.0, n);
      case Kind::file:
        return static_cast<double>(build({}).dimension());
    }
    return 0.0;
  }

  StateVector build(const EngineLimits& limits) const {
    switch (kind) {
      case Kind::bell:
        return bell();
      case Kind::ghz:
        return ghz(n, limits);
      case Kind::dicke:
        return dicke(n, w, limits);
      case Kind::file:
        return read_amplitudes(limits);
    }
    throw std::logic_error("unreachable");
  }

 private:
  // One amplitude per line: "re" or "re im". Blank lines and '#' comments are skipped.
  StateVector read_amplitudes(const EngineLimits& limits) const {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open amplitude file " + path);
    std::vector<Complex> values;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      double re = 0.0, im = 0.0;
      if (!(fields >> re)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          throw UsageError("malformed amplitude line in " + path + ": " + line);
        }
        continue;
      }
      if (!(fields >> im)) im = 0.0;
      values.emplace_back(re, im);
    }
    limits.check(values.size(), "amplitude file");
    Vector amplitudes(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) amplitudes[static_cast<Eigen::Index>(i)] = values[i];
    try {
      return StateVector::normalized(std::move(amplitudes));
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
};

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw UsageError("bad " + what + ": " + text);
  return value;
}

TargetSpec parse_target(const std::string& text) {
  TargetSpec spec;
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ':')) parts.push_back(part);
  if (parts.empty()) throw UsageError("empty --target");
  const std::string& head = parts[0];
  if (head == "bell" && parts.size() == 1) {
    spec.kind = TargetSpec::Kind::bell;
  } else if (head == "ghz" && parts.size() == 2) {
    spec.kind = TargetSpec::Kind::ghz;
    spec.n = parse_int(parts[1], "ghz qubit count");
    if (spec.n < 2) throw UsageError("ghz needs at least 2 qubits");
  } else if (head == "dicke" && parts.size() == 3) {
    spec.kind = TargetSpec::Kind::dicke;
    spec.n = parse_int(parts[1], "dicke qubit count");
    spec.w = parse_int(parts[2], "dicke weight");
    if (spec.n < 2 || spec.w < 1 || spec.w >= spec.n) throw UsageError("dicke needs n >= 2 and 0 < w < n");
  } else if (head == "file" && parts.size() >= 2) {
    spec.kind = TargetSpec::Kind::file;
    spec.path = text.substr(5);
  } else {
    throw UsageError("unknown --target '" + text + "' (bell | ghz:N | dicke:N:W | file:PATH)");
  }
  return spec;
}

double resolve_lambda(const Options& o, const TargetSpec& target, bool allow_one) {
  double lambda = 0.0;
  if (o.lambda) {
    lambda = *o.lambda;
  } else if (target.kind == TargetSpec::Kind::bell) {
    lambda = kBellLambda;
  } else {
    throw UsageError("--lambda is required for target '" + o.target + "'");
  }
  if (!(lambda >= 0.0) || lambda > 1.0 || (!allow_one && lambda == 1.0)) {
    throw UsageError(allow_one ? "--lambda must lie in [0, 1]" : "--lambda must lie in [0, 1)");
  }
  return lambda;
}

an::Mode resolve_mode(const Options& o) {
  const auto mode = an::parse_mode(o.mode);
  if (!mode) throw UsageError("unknown --mode '" + o.mode + "' (first_order | exact)");
  return *mode;
}

std::vector<NoiseKind> resolve_noise(const Options& o, std::vector<NoiseKind> fallback) {
  if (o.noise.empty()) return fallback;
  std::set<int> seen;
  std::vector<NoiseKind> kinds;
  for (const std::string& name : o.noise) {
    const auto kind = parse_noise_kind(name);
    if (!kind) throw UsageError("unknown --noise '" + name + "'");
    if (seen.insert(static_cast<int>(*kind)).second) kinds.push_back(*kind);
  }
  std::sort(kinds.begin(), kinds.end(), [](NoiseKind a, NoiseKind b) { return static_cast<int>(a) < static_cast<int>(b); });
  return kinds;
}

std::vector<double> resolve_epsilons(const Options& o) {
  if (o.epsilon.empty()) throw UsageError("--epsilon list is empty");
  std::vector<double> eps = o.epsilon;
  for (double e : eps) {
    if (!(e >= 0.0) || e > 1.0) throw UsageError("--epsilon values must lie in [0, 1]");
  }
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  return eps;
}

/// Pairs --k with --t elementwise; a single --t (or none, meaning 1) is
/// broadcast. Sorted by (k, t), duplicates removed.
std::vector<Scheme> resolve_schemes(const Options& o) {
  if (o.k.empty()) throw UsageError("scheme list is empty (give --k)");
  std::vector<int> ts = o.t.empty() ? std::vector<int>{1} : o.t;
  if (ts.size() != 1 && ts.size() != o.k.size()) throw UsageError("--t must have one value or as many as --k");
  std::vector<Scheme> schemes;
  for (std::size_t i = 0; i < o.k.size(); ++i) {
    Scheme s{o.k[i], ts.size() == 1 ? ts[0] : ts[i], o.delta};
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    schemes.push_back(s);
  }
  std::sort(schemes.begin(), schemes.end(),
            [](const Scheme& a, const Scheme& b) { return std::pair(a.k, a.t) < std::pair(b.k, b.t); });
  schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
  return schemes;
}

unsigned thread_count() {
  const char* env = std::getenv("CQSV_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
  const std::string text(env);
  const int value = parse_int(text, "CQSV_THREADS");
  if (value < 1) throw UsageError("CQSV_THREADS must be positive");
  return static_cast<unsigned>(value);
}

// ---------------------------------------------------------------------------
// CSV

std::string num(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}
std::string num(std::optional<double> value) { return value ? num(*value) : std::string(); }
std::string num(std::uint64_t value) { return std::to_string(value); }
std::string num(std::optional<std::uint64_t> value) { return value ? num(*value) : std::string(); }
std::string num(int value) { return std::to_string(value); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : width_(columns.size()) {
    text_ << kCsvHeader << '\n';
    row(columns);
  }
  void row(const std::vector<std::string>& fields) {
    if (fields.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) text_ << (i ? "," : "") << fields[i];
    text_ << '\n';
  }
  std::string str() const { return text_.str(); }

 private:
  std::size_t width_;
  std::ostringstream text_;
};

const std::vector<std::string> kResultColumns = {
    "k",         "t",         "noise",        "lambda",     "epsilon",  "delta",   "p_exact",
    "p_closed_form", "rounds_M", "samples_N", "output_infidelity", "pass_rate", "ci_low", "ci_high",
    "seed",      "n_opt",     "flags"};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  file << text;
  if (!file) throw UsageError("write failed for " + path);
}

/// Runs task(i) for i in [0, n) on up to `threads` workers and rethrows the
/// first failure.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// analytic

int cmd_analytic(const Options& o, std::ostream& out) {
  const TargetSpec target = parse_target(o.target);
  const double lambda = resolve_lambda(o, target, true);
  const an::Mode mode = resolve_mode(o);
  const auto schemes = resolve_schemes(o);
  const auto epsilons = resolve_epsilons(o);
  const auto kinds = resolve_noise(o, {std::begin(kAllNoiseKinds), std::end(kAllNoiseKinds)});
  const double d = target.dimension();

  Csv csv(kResultColumns);
  for (const Scheme& s : schemes) {
    for (NoiseKind kind : kinds) {
      for (double eps : epsilons) {
        std::optional<double> p, infidelity;
        std::optional<std::uint64_t> rounds, samples, n_opt;
        std::string flags;
        try {
          p = an::pass_probability(kind, s.k, s.t, lambda, eps, d);
          const auto report = an::complexity(s, kind, lambda, eps, d, mode);
          rounds = report.rounds_M;
          samples = report.samples_N;
          infidelity = report.output_infidelity;
        } catch (const std::invalid_argument&) {
          flags = "out_of_domain";
        } catch (const std::domain_error&) {
          flags = "no_rounds";
        }
        if (eps > 0.0 && eps < 1.0) n_opt = an::baselines(lambda, eps, s.delta).n_opt;
        if (eps >= 0.5) flags += flags.empty() ? "above_threshold" : ";above_threshold";
        csv.row({num(s.k), num(s.t), std::string(short_tag(kind)), num(lambda), num(eps), num(s.delta), "", num(p),
                 num(rounds), num(samples), num(infidelity), "", "", "", "", num(n_opt), flags});
      }
    }
  }
  emit(o.out, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimPoint {
  Scheme scheme;
  NoiseKind kind;
  double epsilon;
  std::uint64_t seed;
  std::vector<std::string> row;
};

int cmd_simulate(const Options& o, std::ostream& out) {
  const TargetSpec target = parse_target(o.target);
  const double lambda = resolve_lambda(o, target, false);
  const an::Mode mode = resolve_mode(o);
  const auto schemes = resolve_schemes(o);
  const auto epsilons = resolve_epsilons(o);
  const auto kinds = resolve_noise(o, {NoiseKind::independent_white});
  const EngineLimits limits{o.max_dimension};
  const StateVector psi = target.build(limits);
  const Strategy strategy = homogeneous_strategy(psi, lambda);
  const double d = static_cast<double>(psi.dimension());

  std::vector<SimPoint> points;
  for (const Scheme& s : schemes) {
    for (NoiseKind kind : kinds) {
      for (double eps : epsilons) {
        points.push_back({s, kind, eps, substream_seed(o.seed, points.size()), {}});
      }
    }
  }

  const unsigned threads = thread_count();
  const bool outer = points.size() >= threads;
  parallel_for(points.size(), outer ? threads : 1, [&](std::size_t i) {
    SimPoint& pt = points[i];
    const NoiseSpec noise{pt.kind, pt.epsilon, std::nullopt};
    const DensityMatrix ensemble = make_ensemble(noise, strategy, pt.scheme.k, limits);
    const double p_exact = pass_probability_exact(pt.scheme, ensemble, strategy, limits);
    const double p_closed = an::pass_probability(pt.kind, pt.scheme.k, pt.scheme.t, lambda, pt.epsilon, d);
    if (std::abs(p_exact - p_closed) > kEngineAgreement) {
      throw InvariantError("engine and closed form disagree for k=" + std::to_string(pt.scheme.k) + " t=" +
                           std::to_string(pt.scheme.t) + " noise=" + std::string(short_tag(pt.kind)) + ": " +
                           num(p_exact) + " vs " + num(p_closed));
    }
    const RunStats stats =
        run_experiment(pt.scheme, noise, strategy, o.rounds, pt.seed, ExperimentOptions{outer ? 1u : threads, limits});

    std::optional<std::uint64_t> rounds, samples, n_opt;
    std::optional<double> infidelity;
    std::string flags;
    try {
      const auto report = an::complexity(pt.scheme, pt.kind, lambda, pt.epsilon, d, mode);
      rounds = report.rounds_M;
      samples = report.samples_N;
    } catch (const std::domain_error&) {
      flags = "no_rounds";
    } catch (const std::invalid_argument&) {
      flags = "out_of_domain";
    }
    if (stats.posted_unmeasured_infidelity) infidelity = stats.posted_unmeasured_infidelity;
    if (pt.epsilon > 0.0 && pt.epsilon < 1.0) n_opt = an::baselines(lambda, pt.epsilon, pt.scheme.delta).n_opt;
    if (pt.epsilon >= 0.5) flags += flags.empty() ? "above_threshold" : ";above_threshold";
    const auto ci = stats.wilson_ci_95();
    pt.row = {num(pt.scheme.k),
              num(pt.scheme.t),
              std::string(short_tag(pt.kind)),
              num(lambda),
              num(pt.epsilon),
              num(pt.scheme.delta),
              num(p_exact),
              num(p_closed),
              num(rounds),
              num(samples),
              num(infidelity),
              num(stats.pass_rate()),
              ci ? num(ci->low) : "",
              ci ? num(ci->high) : "",
              num(pt.seed),
              num(n_opt),
              flags};
  });

  Csv csv(kResultColumns);
  for (const SimPoint& pt : points) csv.row(pt.row);
  emit(o.out, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// compile

int cmd_compile(const Options& o, std::ostream& out, std::ostream& err) {
  Circuit circuit(Layout{});
  if (!o.party_qubits.empty()) {
    if (o.party_qubits.size() != 2) throw UsageError("--party-qubits takes two values: qa qb");
    if (!o.k.empty() && (o.k.size() != 1 || o.k[0] != 2)) throw UsageError("the distributed construction needs k = 2");
    circuit = distributed_construct(o.party_qubits[0], o.party_qubits[1]);
  } else {
    if (o.k.size() != 1) throw UsageError("compile takes exactly one --k");
    circuit = build_cswap_chain(o.k[0], o.register_qubits);
  }

  if (o.level == "fredkin" || o.level == "gates") circuit = lower_to_fredkin(circuit);
  if (o.level == "gates") circuit = expand_fredkins(circuit, standard_fredkin_decomposition());
  if (o.level != "cswap" && o.level != "fredkin" && o.level != "gates") {
    throw UsageError("unknown --level '" + o.level + "' (cswap | fredkin | gates)");
  }

  const ResourceSummary r = resource_summary(circuit);
  std::ostringstream summary;
  summary << "registers=" << circuit.layout().registers << " register_qubits=" << circuit.layout().register_qubits
          << " ancillas=" << circuit.layout().ancillas << '\n'
          << "controlled_register_swaps=" << r.controlled_register_swaps << '\n'
          << "fredkins=" << r.fredkins << '\n'
          << "two_qubit=" << r.two_qubit << '\n'
          << "fredkin_bound_nk=" << r.fredkin_upper_bound << '\n'
          << "two_qubit_bound_5nk=" << r.two_qubit_upper_bound << '\n';

  if (o.verify) {
    const EngineLimits limits{o.max_dimension};
    double deviation = 0.0;
    if (!o.party_qubits.empty()) {
      const int qa = o.party_qubits[0], qb = o.party_qubits[1];
      const std::size_t dim = std::size_t{1} << (2 * (qa + qb));
      limits.check(dim, "distributed verification input");
      // A fixed full-rank input with off-diagonal structure.
      Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
          rho(i, j) = i == j ? Complex(1.0 + static_cast<double>(i % 3), 0.0)
                             : Complex(0.1 / static_cast<double>(1 + i + j), 0.05 * static_cast<double>(i - j) / dim);
        }
      }
      rho /= rho.trace();
      const DensityMatrix input(rho);
      for (auto m : {DistributedMeasurement::parity, DistributedMeasurement::bell}) {
        deviation = std::max(deviation, verify_distributed_identity(input, qa, qb, m, limits));
      }
    } else {
      const int k = o.k[0];
      const std::size_t d = std::size_t{1} << o.register_qubits;
      const Matrix u = compiled_unitary(circuit, limits);
      const Matrix shift = cyclic_shift_operator(k, d, limits).matrix();
      const Eigen::Index half = shift.rows();
      Matrix expected = Matrix::Zero(2 * half, 2 * half);
      expected.topLeftCorner(half, half).setIdentity();
      expected.bottomRightCorner(half, half) = shift;
      deviation = max_abs_diff(u, expected);
    }
    summary << "verify_max_deviation=" << num(deviation) << '\n';
    if (deviation > 1e-10) {
      throw InvariantError("compiled circuit deviates from the controlled cyclic shift by " + num(deviation));
    }
  }

  emit(o.out, emit_circuit(circuit), out);
  (o.out == "-" ? err : out) << summary.str();
  return kOk;
}

// ---------------------------------------------------------------------------
// discriminate

int cmd_discriminate(const Options& o, std::ostream& out) {
  if (!o.observed) throw UsageError("--observed is required");
  if (!o.samples || *o.samples == 0) throw UsageError("--samples must be positive");
  const double f = *o.observed;
  if (!(f >= 0.0 && f <= 1.0)) throw UsageError("--observed must be a rate in [0, 1]");
  const TargetSpec target = parse_target(o.target);
  const double lambda = resolve_lambda(o, target, true);
  const an::Mode mode = resolve_mode(o);
  const auto schemes = resolve_schemes(o);
  const auto epsilons = resolve_epsilons(o);
  if (schemes.size() != 1 || epsilons.size() != 1) throw UsageError("discriminate takes one scheme and one epsilon");
  const auto kinds = resolve_noise(o, {std::begin(kAllNoiseKinds), std::end(kAllNoiseKinds)});

  Csv csv({"noise", "observed_rate", "model_rate", "total_samples", "divergence", "significance"});
  for (const auto& row :
       an::compare_noise_models(f, *o.samples, schemes[0], lambda, epsilons[0], target.dimension(), mode)) {
    if (std::find(kinds.begin(), kinds.end(), row.kind) == kinds.end()) continue;
    const auto& r = row.result;
    csv.row({std::string(short_tag(row.kind)), num(r.observed_rate), num(r.model_rate), num(r.total_samples),
             num(r.divergence), num(r.significance)});
  }
  emit(o.out, csv.str(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// figures

const std::vector<std::string> kFigureColumns = {
    "k",       "t",         "noise",    "lambda",      "epsilon",   "delta",  "d",     "mode", "pass_probability",
    "rounds_M", "samples_N", "rounds_real", "samples_real", "output_infidelity", "n_opt", "n_std", "n_adv"};

void figure_row(Csv& csv, const Scheme& s, NoiseKind kind, double lambda, double eps, double d, an::Mode mode) {
  std::optional<double> p, rounds_real, samples_real, infidelity, n_std_real;
  std::optional<std::uint64_t> rounds, samples, n_opt, n_std, n_adv;
  try {
    const auto report = an::complexity(s, kind, lambda, eps, d, mode);
    p = report.pass_probability;
    rounds = report.rounds_M;
    samples = report.samples_N;
    rounds_real = report.rounds_real;
    samples_real = report.rounds_real * s.t;
    infidelity = report.output_infidelity;
  } catch (const std::invalid_argument&) {
  } catch (const std::domain_error&) {
  }
  if (eps > 0.0 && eps < 1.0) {
    const auto b = an::baselines(lambda, eps, s.delta);
    n_opt = b.n_opt;
    n_std = b.n_std;
    n_adv = b.n_adv;
  }
  csv.row({num(s.k), num(s.t), std::string(short_tag(kind)), num(lambda), num(eps), num(s.delta), num(d),
           std::string(an::to_string(mode)), num(p), num(rounds), num(samples), num(rounds_real), num(samples_real),
           num(infidelity), num(n_opt), num(n_std), num(n_adv)});
}

int cmd_figures(const Options& o, std::ostream& out) {
  const TargetSpec target = parse_target(o.target);
  const double lambda = resolve_lambda(o, target, false);
  const an::Mode mode = resolve_mode(o);
  const double d = target.dimension();
  const double eps_fixed = o.epsilon.empty() ? 0.01 : resolve_epsilons(o).front();
  const int k_sweep = o.k.empty() ? 20 : o.k.front();
  if (k_sweep < 2) throw UsageError("--k for the t-sweep must be at least 2");
  if (o.out == "-") throw UsageError("figures needs --out DIRECTORY");
  std::filesystem::create_directories(o.out);
  const std::filesystem::path dir(o.out);

  // Complexity against infidelity: log-spaced eps in [1e-4, 1e-1].
  {
    Csv csv(kFigureColumns);
    const std::vector<Scheme> schemes = o.k.empty() ? std::vector<Scheme>{{2, 1, o.delta}, {10, 1, o.delta}}
                                                    : resolve_schemes(o);
    for (const Scheme& s : schemes) {
      for (NoiseKind kind : resolve_noise(o, {NoiseKind::independent_white, NoiseKind::global_white})) {
        for (int i = 0; i <= 30; ++i) {
          figure_row(csv, s, kind, lambda, std::pow(10.0, -4.0 + 3.0 * i / 30.0), d, mode);
        }
      }
    }
    emit((dir / "complexity_vs_epsilon.csv").string(), csv.str(), out);
  }
  const auto kinds = resolve_noise(o, {std::begin(kAllNoiseKinds), std::end(kAllNoiseKinds)});
  // Complexity against ensemble size, t = 1, exact forms.
  {
    Csv csv(kFigureColumns);
    for (int k = 2; k <= k_sweep; ++k) {
      for (NoiseKind kind : kinds) figure_row(csv, Scheme{k, 1, o.delta}, kind, lambda, eps_fixed, d, an::Mode::exact);
    }
    emit((dir / "complexity_vs_k.csv").string(), csv.str(), out);
  }
  // Complexity against measured subset size at fixed k, exact forms.
  {
    Csv csv(kFigureColumns);
    for (int t = 1; t <= k_sweep; ++t) {
      for (NoiseKind kind : kinds) figure_row(csv, Scheme{k_sweep, t, o.delta}, kind, lambda, eps_fixed, d, an::Mode::exact);
    }
    emit((dir / "complexity_vs_t.csv").string(), csv.str(), out);
  }
  // Unmeasured-copy infidelity against ensemble size, t = 1, exact forms.
  {
    Csv csv(kFigureColumns);
    for (int k = 2; k <= k_sweep; ++k) {
      for (NoiseKind kind : kinds) figure_row(csv, Scheme{k, 1, o.delta}, kind, lambda, eps_fixed, d, an::Mode::exact);
    }
    emit((dir / "infidelity_vs_k.csv").string(), csv.str(), out);
  }
  out << "wrote complexity_vs_epsilon.csv complexity_vs_k.csv complexity_vs_t.csv infidelity_vs_k.csv to "
      << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--target", o.target, "bell | ghz:N | dicke:N:W | file:PATH")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "second-largest eigenvalue of the local strategy (default 1/3 for bell)");
  cmd->add_option("--epsilon", o.epsilon, "infidelity values")->delimiter(',');
  cmd->add_option("--delta", o.delta, "failure probability")->capture_default_str();
  cmd->add_option("--k", o.k, "copies per round, one per scheme")->delimiter(',');
  cmd->add_option("--t", o.t, "measured copies per round, one per scheme or a single value")->delimiter(',');
  cmd->add_option("--noise", o.noise, "in, mix, ur, cn, gu")->delimiter(',');
  cmd->add_option("--mode", o.mode, "first_order | exact")->capture_default_str();
  cmd->add_option("--out", o.out, "output path, - for stdout")->capture_default_str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"collective quantum state verification toolkit", "cqsv"};
  app.set_config("--config", "", "INI file with one [section] per subcommand; flags override it");
  app.require_subcommand(1);

  auto* analytic = app.add_subcommand("analytic", "closed-form pass probabilities and sample complexities");
  add_common(analytic, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rounds checked against the exact engine");
  add_common(simulate, o);
  simulate->add_option("--rounds", o.rounds, "rounds per sweep point")->capture_default_str();
  simulate->add_option("--seed", o.seed, "base seed")->capture_default_str();
  simulate->add_option("--max-dimension", o.max_dimension, "exact-engine dimension cap")->capture_default_str();

  auto* compile = app.add_subcommand("compile", "emit the controlled cyclic shift as a circuit");
  compile->add_option("--k", o.k, "copies");
  compile->add_option("--register-qubits,-n", o.register_qubits, "qubits per register")->capture_default_str();
  compile->add_option("--level", o.level, "cswap | fredkin | gates")->capture_default_str();
  compile->add_option("--party-qubits", o.party_qubits, "distributed construction: qa,qb")->delimiter(',');
  compile->add_flag("--verify", o.verify, "check the compiled unitary numerically");
  compile->add_option("--max-dimension", o.max_dimension, "dimension cap for --verify")->capture_default_str();
  compile->add_option("--out", o.out, "circuit file, - for stdout")->capture_default_str();

  auto* discriminate = app.add_subcommand("discriminate", "significance of each noise model given an observed pass rate");
  add_common(discriminate, o);
  discriminate->add_option("--observed", o.observed, "observed pass rate f_s");
  discriminate->add_option("--samples", o.samples, "total samples N_total");

  auto* figures = app.add_subcommand("figures", "CSV data for the figure families");
  add_common(figures, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "cqsv: " << e.what() << '\n';
    return kUsage;
  }

  if (o.delta <= 0.0 || o.delta >= 1.0) throw UsageError("--delta must lie in (0, 1)");
  if (analytic->parsed()) return cmd_analytic(o, out);
  if (simulate->parsed()) return cmd_simulate(o, out);
  if (compile->parsed()) return cmd_compile(o, out, err);
  if (discriminate->parsed()) return cmd_discriminate(o, out);
  return cmd_figures(o, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "cqsv: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionCapError& e) {
    err << "cqsv: " << e.what() << '\n';
    return kResourceCap;
  } catch (const std::bad_alloc&) {
    err << "cqsv: out of memory\n";
    return kResourceCap;
  } catch (const InvariantError& e) {
    err << "cqsv: invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    err << "cqsv: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "cqsv: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "cqsv: " << e.what() << '\n';
    return kInvariant;
  }
}

}  // namespace cqsv::cli

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

#include "cqsv/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <sstream>
#include <numbers>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace cqsv {
namespace {

constexpr double kUnitaryTolerance = 1e-12;
constexpr double kDecompositionTolerance = 1e-10;
constexpr std::string_view kCircuitHeader = "# collective-qsv circuit v1";

std::size_t bit_of(int qubit, int num_qubits) {
  return std::size_t{1} << static_cast<unsigned>(num_qubits - 1 - qubit);
}

bool distinct(const std::vector<int>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return false;
    }
  }
  return true;
}

void swap_rows_controlled(Matrix& m, int num_qubits, int c, int a, int b) {
  const std::size_t bc = bit_of(c, num_qubits);
  const std::size_t ba = bit_of(a, num_qubits);
  const std::size_t bb = bit_of(b, num_qubits);
  const auto dim = static_cast<std::size_t>(m.rows());
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & bc) && (i & ba) && !(i & bb)) {
      m.row(static_cast<Eigen::Index>(i)).swap(m.row(static_cast<Eigen::Index>(i ^ ba ^ bb)));
    }
  }
}

/// m <- G m for one gate G.
void apply_gate_rows(Matrix& m, const Gate& gate, const Layout& layout) {
  const int nq = layout.num_qubits();
  const auto& op = gate.operands;
  switch (gate.kind) {
    case GateKind::fredkin:
      swap_rows_controlled(m, nq, op[0], op[1], op[2]);
      return;
    case GateKind::controlled_register_swap:
      for (int j = 0; j < layout.register_qubits; ++j) {
        swap_rows_controlled(m, nq, op[0], layout.qubit(op[1], j), layout.qubit(op[2], j));
      }
      return;
    case GateKind::two_qubit_generic: {
      const std::size_t b1 = bit_of(op[0], nq);
      const std::size_t b2 = bit_of(op[1], nq);
      const Matrix& u = *gate.payload;
      const auto dim = static_cast<std::size_t>(m.rows());
      Matrix block(4, m.cols());
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & (b1 | b2)) continue;
        const std::size_t idx[4] = {i, i | b2, i | b1, i | b1 | b2};
        for (int x = 0; x < 4; ++x) block.row(x) = m.row(static_cast<Eigen::Index>(idx[x]));
        const Matrix mixed = u * block;
        for (int x = 0; x < 4; ++x) m.row(static_cast<Eigen::Index>(idx[x])) = mixed.row(x);
      }
      return;
    }
  }
}

void apply_circuit_rows(Matrix& m, const Circuit& circuit) {
  for (const Gate& gate : circuit.gates()) apply_gate_rows(m, gate, circuit.layout());
}

/// U rho U^dagger for Hermitian rho.
Matrix conjugate_by_circuit(const Circuit& circuit, Matrix rho) {
  apply_circuit_rows(rho, circuit);
  Matrix half = rho.adjoint();
  apply_circuit_rows(half, circuit);
  return half;
}

/// sum_v <v|_anc B |v>_anc with the ancillas as the leading qubits.
Matrix project_ancillas(const Matrix& full, int ancillas, const std::vector<Vector>& outcomes) {
  const Eigen::Index na = Eigen::Index{1} << ancillas;
  const Eigen::Index ds = full.rows() / na;
  Matrix out = Matrix::Zero(ds, ds);
  for (const Vector& v : outcomes) {
    for (Eigen::Index i = 0; i < na; ++i) {
      for (Eigen::Index j = 0; j < na; ++j) {
        const Complex w = std::conj(v(i)) * v(j);
        if (w == Complex{}) continue;
        out += w * full.block(i * ds, j * ds, ds, ds);
      }
    }
  }
  return out;
}

ProjectedState finish_projection(Matrix state) {
  ProjectedState out;
  out.weight = state.trace().real();
  out.state = std::move(state);
  return out;
}

Matrix controlled(const Matrix& u, bool control_first) {
  Matrix m = Matrix::Identity(4, 4);
  if (control_first) {
    m.block(2, 2, 2, 2) = u;
  } else {
    // control is the low bit: indices 1 and 3
    m(1, 1) = u(0, 0);
    m(1, 3) = u(0, 1);
    m(3, 1) = u(1, 0);
    m(3, 3) = u(1, 1);
  }
  return m;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::size_t line) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw CircuitParseError(line, "malformed number '" + std::string(s) + "'");
  }
  return value;
}

int parse_int(std::string_view s, std::size_t line) {
  int value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw CircuitParseError(line, "malformed integer '" + std::string(s) + "'");
  }
  return value;
}

Complex parse_complex(std::string_view s, std::size_t line) {
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') {
    throw CircuitParseError(line, "expected (re,im), got '" + std::string(s) + "'");
  }
  const std::string_view inner = s.substr(1, s.size() - 2);
  const auto comma = inner.find(',');
  if (comma == std::string_view::npos) throw CircuitParseError(line, "expected (re,im)");
  return {parse_double(inner.substr(0, comma), line), parse_double(inner.substr(comma + 1), line)};
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gates and layout

Gate Gate::cswap_registers(int control, int r1, int r2) {
  return {GateKind::controlled_register_swap, {control, r1, r2}, std::nullopt};
}

Gate Gate::fredkin(int control, int a, int b) { return {GateKind::fredkin, {control, a, b}, std::nullopt}; }

Gate Gate::two_qubit(int q1, int q2, Matrix unitary) {
  return {GateKind::two_qubit_generic, {q1, q2}, std::move(unitary)};
}

bool operator==(const Gate& a, const Gate& b) {
  if (a.kind != b.kind || a.operands != b.operands || a.payload.has_value() != b.payload.has_value()) {
    return false;
  }
  if (!a.payload) return true;
  return a.payload->rows() == b.payload->rows() && a.payload->cols() == b.payload->cols() &&
         *a.payload == *b.payload;
}

void Layout::validate() const {
  if (ancillas < 0 || registers < 1 || register_qubits < 1) {
    throw std::invalid_argument("layout needs ancillas >= 0, registers >= 1, register_qubits >= 1");
  }
  if (num_qubits() > 62) throw std::invalid_argument("layout exceeds 62 qubits");
}

Circuit::Circuit(Layout layout) : layout_(layout) { layout_.validate(); }

void Circuit::add(Gate gate) {
  const int nq = layout_.num_qubits();
  auto in_range = [nq](int q) { return q >= 0 && q < nq; };
  const auto& op = gate.operands;
  switch (gate.kind) {
    case GateKind::controlled_register_swap: {
      if (op.size() != 3 || gate.payload) throw std::invalid_argument("CSWAPR takes control, r1, r2");
      const bool regs_ok = op[1] >= 0 && op[1] < layout_.registers && op[2] >= 0 && op[2] < layout_.registers &&
                           op[1] != op[2];
      if (!in_range(op[0]) || !regs_ok) throw std::invalid_argument("CSWAPR operand out of range");
      for (int r : {op[1], op[2]}) {
        if (op[0] >= layout_.qubit(r, 0) && op[0] < layout_.qubit(r, 0) + layout_.register_qubits) {
          throw std::invalid_argument("CSWAPR control lies inside a swapped register");
        }
      }
      ++counts_.controlled_register_swaps;
      break;
    }
    case GateKind::fredkin:
      if (op.size() != 3 || gate.payload) throw std::invalid_argument("FREDKIN takes c, a, b");
      if (!std::all_of(op.begin(), op.end(), in_range) || !distinct(op)) {
        throw std::invalid_argument("FREDKIN operands must be distinct and in range");
      }
      ++counts_.fredkins;
      break;
    case GateKind::two_qubit_generic: {
      if (op.size() != 2 || !gate.payload) throw std::invalid_argument("U2 takes q1, q2 and a 4x4 payload");
      if (!std::all_of(op.begin(), op.end(), in_range) || !distinct(op)) {
        throw std::invalid_argument("U2 operands must be distinct and in range");
      }
      const Matrix& u = *gate.payload;
      if (u.rows() != 4 || u.cols() != 4) throw std::invalid_argument("U2 payload must be 4x4");
      if (max_abs_diff(u.adjoint() * u, Matrix::Identity(4, 4)) > kUnitaryTolerance) {
        throw std::invalid_argument("U2 payload is not unitary");
      }
      ++counts_.two_qubit_generic;
      break;
    }
  }
  gates_.push_back(std::move(gate));
}

// ---------------------------------------------------------------------------
// Construction and lowering

Circuit build_cswap_chain(int k, int n) {
  if (k < 2 || n < 1) throw std::invalid_argument("cswap chain needs k >= 2 and n >= 1");
  Circuit circuit(Layout{1, k, n});
  // Swapping (k-2,k-1) first and (0,1) last moves copy m to m+1.
  for (int r = k - 2; r >= 0; --r) circuit.add(Gate::cswap_registers(0, r, r + 1));
  return circuit;
}

Circuit lower_to_fredkin(const Circuit& circuit) {
  const Layout& layout = circuit.layout();
  Circuit out(layout);
  for (const Gate& gate : circuit.gates()) {
    if (gate.kind != GateKind::controlled_register_swap) {
      out.add(gate);
      continue;
    }
    for (int j = 0; j < layout.register_qubits; ++j) {
      out.add(Gate::fredkin(gate.operands[0], layout.qubit(gate.operands[1], j), layout.qubit(gate.operands[2], j)));
    }
  }
  return out;
}

std::uint64_t two_qubit_count(const Circuit& circuit) {
  const GateCounts& c = circuit.counts();
  const auto n = static_cast<std::uint64_t>(circuit.layout().register_qubits);
  return 5 * (c.fredkins + n * c.controlled_register_swaps) + c.two_qubit_generic;
}

ResourceSummary resource_summary(const Circuit& circuit) {
  const Layout& layout = circuit.layout();
  const GateCounts& c = circuit.counts();
  const auto n = static_cast<std::uint64_t>(layout.register_qubits);
  const auto k = static_cast<std::uint64_t>(layout.registers);
  ResourceSummary s;
  s.controlled_register_swaps = c.controlled_register_swaps;
  s.fredkins = c.fredkins + n * c.controlled_register_swaps;
  s.two_qubit = two_qubit_count(circuit);
  s.fredkin_upper_bound = n * k;
  s.two_qubit_upper_bound = 5 * n * k;
  return s;
}

// ---------------------------------------------------------------------------
// Simulation

StateVector simulate_circuit(const Circuit& circuit, const StateVector& input) {
  if (input.num_qubits() != circuit.layout().num_qubits()) {
    throw std::invalid_argument("input state does not match circuit width");
  }
  Matrix column = input.amplitudes();
  apply_circuit_rows(column, circuit);
  return StateVector(Vector(column.col(0)));
}

Matrix compiled_unitary(const Circuit& circuit, const EngineLimits& limits) {
  const std::size_t dim = std::size_t{1} << circuit.layout().num_qubits();
  limits.check(dim, "compiled_unitary");
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  apply_circuit_rows(u, circuit);
  return u;
}

ProjectedState ancilla_swap_projection(const Circuit& circuit, const DensityMatrix& rho, const EngineLimits& limits) {
  const Layout& layout = circuit.layout();
  if (layout.ancillas != 1) throw std::invalid_argument("ancilla_swap_projection needs exactly one ancilla");
  if (rho.num_qubits() != layout.num_qubits() - 1) {
    throw std::invalid_argument("register state does not match circuit width");
  }
  limits.check(std::size_t{2} * rho.dimension(), "ancilla_swap_projection");
  Vector plus(2);
  plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  const Matrix full = Eigen::kroneckerProduct(Matrix(plus * plus.adjoint()), rho.matrix()).eval();
  return finish_projection(project_ancillas(conjugate_by_circuit(circuit, full), 1, {plus}));
}

Circuit distributed_construct(int qa, int qb) {
  if (qa < 1 || qb < 1) throw std::invalid_argument("each party needs at least one qubit");
  Circuit circuit(Layout{2, 2, qa + qb});
  for (int j = 0; j < qa + qb; ++j) {
    circuit.add(Gate::fredkin(j < qa ? 0 : 1, circuit.layout().qubit(0, j), circuit.layout().qubit(1, j)));
  }
  return circuit;
}

ProjectedState distributed_projection(const Circuit& circuit, const DensityMatrix& rho,
                                      DistributedMeasurement measurement, const EngineLimits& limits) {
  const Layout& layout = circuit.layout();
  if (layout.ancillas != 2) throw std::invalid_argument("distributed projection needs two ancillas");
  if (rho.num_qubits() != layout.num_qubits() - 2) {
    throw std::invalid_argument("register state does not match circuit width");
  }
  limits.check(std::size_t{4} * rho.dimension(), "distributed_projection");

  const double h = 1.0 / std::numbers::sqrt2;
  Vector phi = Vector::Zero(4);
  phi(0) = h;
  phi(3) = h;
  const Matrix full = Eigen::kroneckerProduct(Matrix(phi * phi.adjoint()), rho.matrix()).eval();

  std::vector<Vector> outcomes;
  if (measurement == DistributedMeasurement::bell) {
    outcomes.push_back(phi);
  } else {
    Vector pp(4), mm(4);
    pp << 0.5, 0.5, 0.5, 0.5;
    mm << 0.5, -0.5, -0.5, 0.5;
    outcomes = {pp, mm};
  }
  return finish_projection(project_ancillas(conjugate_by_circuit(circuit, full), 2, outcomes));
}

double verify_distributed_identity(const DensityMatrix& rho, int qa, int qb, DistributedMeasurement measurement,
                                   const EngineLimits& limits) {
  const Circuit circuit = distributed_construct(qa, qb);
  const ProjectedState distributed = distributed_projection(circuit, rho, measurement, limits);
  const ProjectedState monolithic = swap_projection_apply(rho, 2, std::size_t{1} << (qa + qb), limits);
  return std::max(max_abs_diff(distributed.state, monolithic.state),
                  std::abs(distributed.weight - monolithic.weight));
}

// ---------------------------------------------------------------------------
// Fredkin decompositions

double fredkin_decomposition_error(const FredkinDecomposition& decomposition) {
  if (decomposition.gates.size() != 5) throw std::invalid_argument("a Fredkin decomposition has five gates");
  Circuit local(Layout{3, 1, 1});
  for (const Gate& g : decomposition.gates) {
    if (g.kind != GateKind::two_qubit_generic) throw std::invalid_argument("decomposition gates must be U2");
    for (int q : g.operands) {
      if (q < 0 || q > 2) throw std::invalid_argument("decomposition qubits must be 0, 1 or 2");
    }
    local.add(g);
  }
  Circuit reference(Layout{3, 1, 1});
  reference.add(Gate::fredkin(0, 1, 2));
  return max_abs_diff(compiled_unitary(local), compiled_unitary(reference));
}

FredkinDecomposition standard_fredkin_decomposition() {
  const Complex p{0.5, 0.5};
  const Complex m{0.5, -0.5};
  Matrix x(2, 2), v(2, 2);
  x << 0, 1, 1, 0;
  v << p, m, m, p;  // v * v == x
  const Matrix cnot_b_to_a = controlled(x, false);  // on (a, b)
  const Matrix cv_a_to_b = controlled(v, true);     // on (a, b)
  const Matrix cvdag_a_to_b = controlled(v.adjoint(), true);
  const Matrix cnot_first = controlled(x, true);
  const Matrix cv_first = controlled(v, true);

  FredkinDecomposition d;
  d.gates.push_back(Gate::two_qubit(1, 2, cv_a_to_b * cnot_b_to_a));
  d.gates.push_back(Gate::two_qubit(0, 2, cv_first));
  d.gates.push_back(Gate::two_qubit(0, 1, cnot_first));
  d.gates.push_back(Gate::two_qubit(1, 2, cnot_b_to_a * cvdag_a_to_b));
  d.gates.push_back(Gate::two_qubit(0, 1, cnot_first));
  return d;
}

Circuit expand_fredkins(const Circuit& circuit, const FredkinDecomposition& decomposition) {
  if (fredkin_decomposition_error(decomposition) > kDecompositionTolerance) {
    throw std::invalid_argument("decomposition does not reproduce the Fredkin gate");
  }
  const Circuit lowered = lower_to_fredkin(circuit);
  Circuit out(lowered.layout());
  for (const Gate& gate : lowered.gates()) {
    if (gate.kind != GateKind::fredkin) {
      out.add(gate);
      continue;
    }
    for (const Gate& local : decomposition.gates) {
      out.add(Gate::two_qubit(gate.operands[static_cast<std::size_t>(local.operands[0])],
                              gate.operands[static_cast<std::size_t>(local.operands[1])], *local.payload));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

CircuitParseError::CircuitParseError(std::size_t line, const std::string& message)
    : std::runtime_error("circuit line " + std::to_string(line) + ": " + message), line_(line) {}

std::string emit_circuit(const Circuit& circuit) {
  const Layout& layout = circuit.layout();
  std::ostringstream os;
  os << kCircuitHeader << '\n';
  os << "REGISTERS " << layout.registers << ' ' << layout.register_qubits << '\n';
  for (int a = 0; a < layout.ancillas; ++a) os << "ANCILLA " << a << '\n';
  for (const Gate& gate : circuit.gates()) {
    const auto& op = gate.operands;
    switch (gate.kind) {
      case GateKind::controlled_register_swap:
        os << "CSWAPR " << op[0] << ' ' << op[1] << ' ' << op[2];
        break;
      case GateKind::fredkin:
        os << "FREDKIN " << op[0] << ' ' << op[1] << ' ' << op[2];
        break;
      case GateKind::two_qubit_generic:
        os << "U2 " << op[0] << ' ' << op[1];
        for (Eigen::Index r = 0; r < 4; ++r) {
          for (Eigen::Index c = 0; c < 4; ++c) {
            const Complex z = (*gate.payload)(r, c);
            os << " (" << format_double(z.real()) << ',' << format_double(z.imag()) << ')';
          }
        }
        break;
    }
    os << '\n';
  }
  return os.str();
}

Circuit parse_circuit(std::string_view text) {
  std::optional<Layout> layout;
  std::optional<Circuit> circuit;
  int ancillas = 0;
  std::size_t line_no = 0;

  auto ensure_circuit = [&](std::size_t line) -> Circuit& {
    if (!circuit) {
      if (!layout) throw CircuitParseError(line, "gate before REGISTERS header");
      layout->ancillas = ancillas;
      try {
        circuit.emplace(*layout);
      } catch (const std::invalid_argument& e) {
        throw CircuitParseError(line, e.what());
      }
    }
    return *circuit;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    const std::string_view head = tokens[0];

    if (head == "REGISTERS") {
      if (tokens.size() != 3) throw CircuitParseError(line_no, "REGISTERS takes k n");
      if (layout) throw CircuitParseError(line_no, "duplicate REGISTERS header");
      layout = Layout{0, parse_int(tokens[1], line_no), parse_int(tokens[2], line_no)};
    } else if (head == "ANCILLA") {
      if (tokens.size() != 2) throw CircuitParseError(line_no, "ANCILLA takes one qubit index");
      if (circuit) throw CircuitParseError(line_no, "ANCILLA after the first gate");
      if (parse_int(tokens[1], line_no) != ancillas) {
        throw CircuitParseError(line_no, "ancillas must be declared as 0, 1, ... in order");
      }
      ++ancillas;
    } else if (head == "CSWAPR" || head == "FREDKIN") {
      if (tokens.size() != 4) throw CircuitParseError(line_no, std::string(head) + " takes three operands");
      const int a = parse_int(tokens[1], line_no);
      const int b = parse_int(tokens[2], line_no);
      const int c = parse_int(tokens[3], line_no);
      Circuit& circ = ensure_circuit(line_no);
      try {
        circ.add(head == "CSWAPR" ? Gate::cswap_registers(a, b, c) : Gate::fredkin(a, b, c));
      } catch (const std::invalid_argument& e) {
        throw CircuitParseError(line_no, e.what());
      }
    } else if (head == "U2") {
      if (tokens.size() != 19) throw CircuitParseError(line_no, "U2 takes two qubits and 16 entries");
      Matrix u(4, 4);
      for (int i = 0; i < 16; ++i) u(i / 4, i % 4) = parse_complex(tokens[static_cast<std::size_t>(3 + i)], line_no);
      const int q1 = parse_int(tokens[1], line_no);
      const int q2 = parse_int(tokens[2], line_no);
      Circuit& circ = ensure_circuit(line_no);
      try {
        circ.add(Gate::two_qubit(q1, q2, std::move(u)));
      } catch (const std::invalid_argument& e) {
        throw CircuitParseError(line_no, e.what());
      }
    } else {
      throw CircuitParseError(line_no, "unknown directive '" + std::string(head) + "'");
    }
  }
  if (!layout) throw CircuitParseError(line_no, "missing REGISTERS header");
  return ensure_circuit(line_no);
}

}  // namespace cqsv

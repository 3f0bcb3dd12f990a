// Copyright 2026 The qnetsim Authors
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

#ifndef QNETSIM_PROTOCOLS_HPP
#define QNETSIM_PROTOCOLS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnetsim/gates.hpp"
#include "qnetsim/network.hpp"

namespace qnetsim {

struct ProtocolOutcome {
  double fidelity = 0.0;
  double duration = 0.0;
  std::uint64_t bell_pairs_used = 0;
  std::uint64_t restarts = 0;
};

/// Entanglement and average gate fidelity of a d-dimensional channel.
struct MetricPair {
  double f_entanglement = 0.0;
  double f_average = 0.0;
  int dimension = 4;
};

inline double average_fidelity(double f_entanglement, int dimension) {
  return (dimension * f_entanglement + 1.0) / (dimension + 1.0);
}

inline MetricPair make_metric(double f_entanglement, int dimension = 4) {
  return {f_entanglement, average_fidelity(f_entanglement, dimension), dimension};
}

/// Two-body stabilizer checked by a distillation block.
enum class Stabilizer { ZZ, XX };

inline Stabilizer complement(Stabilizer s) { return s == Stabilizer::ZZ ? Stabilizer::XX : Stabilizer::ZZ; }

/// Raised when a protocol cannot succeed (e.g. restart budget exhausted).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace blocks {

inline void require_link(const Network& net, int a, int b) {
  const QubitId ea = Network::electron(a), eb = Network::electron(b);
  const FactoredRegister& reg = net.reg();
  if (!reg.contains(ea) || !reg.contains(eb) || &reg.factor_of(ea) != &reg.factor_of(eb))
    throw std::invalid_argument("missing link between nodes " + std::to_string(a) + " and " + std::to_string(b));
}

/// Moves the electron's state into a carbon of the same node. The electron
/// is left re-initialised: every caller links or resets it before reuse.
inline void store(Network& net, QubitId carbon) {
  const QubitId e = Network::electron(carbon.node);
  net.timed_gate(Gate::SWAP, {e, carbon});
  net.reset_qubit(e);
}

/// Z (or X) readout of a carbon through the freshly initialised electron.
/// The spent carbon is re-initialised afterwards; nothing downstream depends
/// on its residual state, and dropping it keeps register factors small.
template <class Gen>
int read_carbon(Network& net, QubitId carbon, Stabilizer basis, Gen& rng) {
  const QubitId e = Network::electron(carbon.node);
  if (basis == Stabilizer::XX) net.timed_gate(Gate::H, {carbon});
  net.reset_qubit(e);
  net.timed_gate(Gate::CNOT, {carbon, e});
  const int m = net.timed_measure(e, Basis::Z, rng);
  net.reset_qubit(carbon);
  return m;
}

/// Couples a target qubit to the ancilla half held by the node's electron so
/// that a later ancilla readout in the same basis reveals the target's
/// stabilizer parity. ZZ: CNOT(target -> e). XX: CNOT(e -> target).
inline void imprint(Network& net, QubitId target, Stabilizer s) {
  const QubitId e = Network::electron(target.node);
  if (s == Stabilizer::ZZ)
    net.timed_gate(Gate::CNOT, {target, e});
  else
    net.timed_gate(Gate::CNOT, {e, target});
}

inline Basis basis_of(Stabilizer s) { return s == Stabilizer::ZZ ? Basis::Z : Basis::X; }

}  // namespace blocks

/// Block B.1: fuses two entangled states sharing one node. `kept` (a carbon)
/// belongs to the first state, `consumed` (the electron of the same node) to
/// the second. The parity of the two is measured on the electron; an odd
/// outcome is corrected by X on `flip` (the second state's remaining qubits).
template <class Gen>
void block_fusion_overlap(Network& net, QubitId kept, QubitId consumed, std::span<const QubitId> flip, Gen& rng) {
  if (kept.node != consumed.node) throw std::invalid_argument("block_fusion_overlap: states must overlap in exactly one node");
  if (consumed.slot != 0 || kept.slot == 0)
    throw std::invalid_argument("block_fusion_overlap: expects a carbon kept and the electron consumed");
  net.timed_gate(Gate::CNOT, {kept, consumed});
  const int m = net.timed_measure(consumed, Basis::Z, rng);
  if (m == 1)
    for (const QubitId& q : flip) net.pauli_frame(q, Gate::X);
}

/// Block B.2: fuses two states on disjoint node sets through the electron
/// link between x_share.node and y_share.node. Both link halves are measured
/// against the local shares; odd total parity is corrected by X on `y_qubits`.
/// Deterministic.
template <class Gen>
void block_fusion_bell(Network& net, QubitId x_share, QubitId y_share, std::span<const QubitId> y_qubits, Gen& rng) {
  blocks::require_link(net, x_share.node, y_share.node);
  const QubitId ea = Network::electron(x_share.node), ec = Network::electron(y_share.node);
  net.timed_gate(Gate::CNOT, {x_share, ea});
  net.timed_gate(Gate::CNOT, {y_share, ec});
  const int ma = net.timed_measure(ea, Basis::Z, rng);
  const int mc = net.timed_measure(ec, Basis::Z, rng);
  if ((ma ^ mc) == 1)
    for (const QubitId& q : y_qubits) net.pauli_frame(q, Gate::X);
}

/// Block A.2 (single selection): measures the two-body stabilizer of the
/// target on (ti, tj) using the electron link between their nodes. Returns
/// true on even parity.
template <class Gen>
bool single_selection(Network& net, QubitId ti, QubitId tj, Stabilizer s, Gen& rng) {
  blocks::require_link(net, ti.node, tj.node);
  blocks::imprint(net, ti, s);
  blocks::imprint(net, tj, s);
  const int mi = net.timed_measure(Network::electron(ti.node), blocks::basis_of(s), rng);
  const int mj = net.timed_measure(Network::electron(tj.node), blocks::basis_of(s), rng);
  return mi == mj;
}

/// Block C.1 (double selection): generates two ancilla links. The first
/// checks stabilizer `s` of the target and is parked in carbon `slot1`; the
/// second checks the complementary stabilizer of the first ancilla.
/// Returns true iff both parities are even.
template <class Gen>
bool double_selection(Network& net, QubitId ti, QubitId tj, Stabilizer s, int slot1, Gen& rng) {
  const int i = ti.node, j = tj.node;
  const QubitId ai = net.carbon(i, slot1), aj = net.carbon(j, slot1);
  net.generate_link(i, j, rng);
  blocks::imprint(net, ti, s);
  blocks::imprint(net, tj, s);
  blocks::store(net, ai);
  blocks::store(net, aj);
  net.generate_link(i, j, rng);
  const bool second = single_selection(net, ai, aj, complement(s), rng);
  const bool first = blocks::read_carbon(net, ai, s, rng) == blocks::read_carbon(net, aj, s, rng);
  return first && second;
}

/// Block C.2 (triple selection): three ancilla links. The first checks `s`
/// of the target and is parked in carbon `slot1`; the second checks the
/// complementary stabilizer of the first ancilla; the third repeats the `s`
/// parity readout of the first ancilla before it is read out directly.
/// Returns true iff all parities are even.
template <class Gen>
bool triple_selection(Network& net, QubitId ti, QubitId tj, Stabilizer s, int slot1, Gen& rng) {
  const int i = ti.node, j = tj.node;
  const QubitId ai = net.carbon(i, slot1), aj = net.carbon(j, slot1);
  net.generate_link(i, j, rng);
  blocks::imprint(net, ti, s);
  blocks::imprint(net, tj, s);
  blocks::store(net, ai);
  blocks::store(net, aj);
  net.generate_link(i, j, rng);
  const bool second = single_selection(net, ai, aj, complement(s), rng);
  net.generate_link(i, j, rng);
  const bool third = single_selection(net, ai, aj, s, rng);
  const bool first = blocks::read_carbon(net, ai, s, rng) == blocks::read_carbon(net, aj, s, rng);
  return first && second && third;
}

enum class GhzProtocol { Plain, Modicum, Expedient };

inline std::optional<GhzProtocol> ghz_protocol_from_name(std::string_view name) {
  if (name == "plain") return GhzProtocol::Plain;
  if (name == "modicum") return GhzProtocol::Modicum;
  if (name == "expedient") return GhzProtocol::Expedient;
  return std::nullopt;
}

inline std::string_view to_string(GhzProtocol p) {
  switch (p) {
    case GhzProtocol::Plain: return "plain";
    case GhzProtocol::Modicum: return "modicum";
    case GhzProtocol::Expedient: return "expedient";
  }
  return "?";
}

/// Carbons per node a protocol needs.
inline int required_carbons(GhzProtocol p) {
  switch (p) {
    case GhzProtocol::Plain: return 1;
    case GhzProtocol::Modicum: return 2;
    case GhzProtocol::Expedient: return 3;
  }
  return 3;
}

inline constexpr std::uint64_t kMaxRestarts = 100000;

namespace detail {

inline void reset_nodes(Network& net, std::span<const int> nodes) {
  for (int n : nodes)
    for (int s = 0; s <= net.node(n).carbons; ++s) net.reset_qubit({n, s});
}

inline std::vector<int> all_nodes(const Network& net) {
  std::vector<int> v(static_cast<std::size_t>(net.node_count()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
  return v;
}

template <class Gen>
std::vector<QubitId> plain_attempt(Network& net, Gen& rng) {
  constexpr int A = 0, B = 1, C = 2, D = 3;
  const int m = net.node(A).carbons;
  const QubitId cA = net.carbon(A, m), cB = net.carbon(B, m), cC = net.carbon(C, m), cD = net.carbon(D, m);
  net.generate_link(A, B, rng);
  net.generate_link(C, D, rng);
  blocks::store(net, cA);
  blocks::store(net, cB);
  blocks::store(net, cC);
  blocks::store(net, cD);
  net.generate_link(A, C, rng);
  const QubitId y[] = {cC, cD};
  block_fusion_bell(net, cA, cC, y, rng);
  return {cA, cB, cC, cD};
}

/// Returns the GHZ qubits, or nullopt when the distillation step fails.
template <class Gen>
std::optional<std::vector<QubitId>> modicum_attempt(Network& net, Gen& rng) {
  constexpr int A = 0, B = 1, C = 2, D = 3;
  const int m = net.node(A).carbons;
  const QubitId cA = net.carbon(A, m), cB = net.carbon(B, m), cC = net.carbon(C, m), cD = net.carbon(D, m);
  net.generate_link(A, B, rng);
  net.generate_link(C, D, rng);
  blocks::store(net, cA);
  blocks::store(net, cB);
  blocks::store(net, cC);
  blocks::store(net, cD);
  net.generate_link(A, C, rng);
  net.generate_link(B, D, rng);
  const QubitId flip_a[] = {Network::electron(C)};
  block_fusion_overlap(net, cA, Network::electron(A), flip_a, rng);
  const QubitId flip_c[] = {cC, cD};
  block_fusion_overlap(net, cC, Network::electron(C), flip_c, rng);
  if (!single_selection(net, cB, cD, Stabilizer::ZZ, rng)) return std::nullopt;
  return std::vector<QubitId>{cA, cB, cC, cD};
}

/// One two-node branch of Expedient: a stored pair purified by two rounds
/// of double selection (ZZ then XX) and one single selection. Restarts
/// locally until every check passes.
template <class Gen>
void expedient_branch(Network& net, int i, int j, std::uint64_t& restarts, Gen& rng) {
  const int m = net.node(i).carbons;
  const QubitId ti = net.carbon(i, m), tj = net.carbon(j, m);
  const int nodes[] = {i, j};
  for (;;) {
    net.generate_link(i, j, rng);
    blocks::store(net, ti);
    blocks::store(net, tj);
    bool ok = double_selection(net, ti, tj, Stabilizer::ZZ, m - 1, rng);
    if (ok) ok = double_selection(net, ti, tj, Stabilizer::XX, m - 1, rng);
    if (ok) {
      net.generate_link(i, j, rng);
      ok = single_selection(net, ti, tj, Stabilizer::ZZ, rng);
    }
    if (ok) return;
    if (++restarts > kMaxRestarts) throw ProtocolError("expedient: restart budget exhausted");
    net.sync(nodes);
    reset_nodes(net, nodes);
  }
}

template <class Gen>
std::optional<std::vector<QubitId>> expedient_attempt(Network& net, std::uint64_t& restarts, Gen& rng) {
  constexpr int A = 0, B = 1, C = 2, D = 3;
  const int m = net.node(A).carbons;
  const QubitId cA = net.carbon(A, m), cB = net.carbon(B, m), cC = net.carbon(C, m), cD = net.carbon(D, m);
  expedient_branch(net, A, B, restarts, rng);
  expedient_branch(net, C, D, restarts, rng);
  net.generate_link(A, C, rng);
  const QubitId y[] = {cC, cD};
  block_fusion_bell(net, cA, cC, y, rng);
  if (!triple_selection(net, cB, cD, Stabilizer::ZZ, m - 1, rng)) return std::nullopt;
  if (!triple_selection(net, cA, cC, Stabilizer::ZZ, m - 1, rng)) return std::nullopt;
  if (!triple_selection(net, cA, cD, Stabilizer::ZZ, m - 1, rng)) return std::nullopt;
  return std::vector<QubitId>{cA, cB, cC, cD};
}

}  // namespace detail

/// Creates a four-node GHZ state with the chosen protocol, restarting after
/// failed distillation, and returns its fidelity with (|0000> + |1111>)/sqrt(2).
template <class Gen>
ProtocolOutcome run_ghz(Network& net, GhzProtocol protocol, Gen& rng) {
  if (net.node_count() != 4) throw std::invalid_argument("run_ghz: needs a four-node network");
  for (int n = 0; n < 4; ++n)
    if (net.node(n).carbons < required_carbons(protocol))
      throw std::invalid_argument("run_ghz: insufficient carbons for protocol " + std::string(to_string(protocol)));
  const std::uint64_t links_before = net.links_generated();
  const double start = net.clock();
  const std::vector<int> all = detail::all_nodes(net);
  ProtocolOutcome out;
  std::vector<QubitId> ghz;
  for (;;) {
    std::optional<std::vector<QubitId>> result;
    switch (protocol) {
      case GhzProtocol::Plain: result = detail::plain_attempt(net, rng); break;
      case GhzProtocol::Modicum: result = detail::modicum_attempt(net, rng); break;
      case GhzProtocol::Expedient: result = detail::expedient_attempt(net, out.restarts, rng); break;
    }
    net.sync_all();
    if (result) {
      ghz = *result;
      break;
    }
    if (++out.restarts > kMaxRestarts) throw ProtocolError("run_ghz: restart budget exhausted");
    detail::reset_nodes(net, all);
  }
  out.fidelity = net.reg().fidelity_pure(ghz, gates::ghz(4));
  out.duration = net.clock() - start;
  out.bell_pairs_used = net.links_generated() - links_before;
  return out;
}

/// Qubits used by the non-local CNOT: carbons of nodes 0 and 1 plus two
/// noise-free reference qubits outside the network.
struct CnotLayout {
  QubitId control{0, 1};
  QubitId target{1, 1};
  QubitId control_ref{2, 0};
  QubitId target_ref{3, 0};
};

/// (CNOT_{control,target} (x) I)|Omega>, qubit order [control_ref, target_ref, control, target].
inline Vector cnot_choi_target() {
  Vector v = Vector::Zero(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) v((x << 3) | (y << 2) | (x << 1) | (x ^ y)) = 0.5;
  return v;
}

/// Teleportation-based CNOT between the carbons of two nodes, evaluated on
/// the Choi state: control carbon and target carbon each start maximally
/// entangled with a reference qubit.
template <class Gen>
MetricPair run_nonlocal_cnot(Network& net, Gen& rng, const CnotLayout& layout = {}) {
  if (net.node_count() != 2) throw std::invalid_argument("run_nonlocal_cnot: needs a two-node network");
  FactoredRegister& reg = net.reg();
  Matrix bell = Matrix::Zero(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  for (const auto& [ref, data] : {std::pair{layout.control_ref, layout.control}, std::pair{layout.target_ref, layout.target}}) {
    reg.discard(data);
    reg.allocate_state({ref, data}, bell);
  }
  const int a = layout.control.node, b = layout.target.node;
  net.generate_link(a, b, rng);
  const QubitId ea = Network::electron(a), eb = Network::electron(b);
  net.timed_gate(Gate::CNOT, {layout.control, ea});
  const int m1 = net.timed_measure(ea, Basis::Z, rng);
  net.timed_gate(Gate::CNOT, {eb, layout.target});
  const int m2 = net.timed_measure(eb, Basis::X, rng);
  if (m1 == 1) net.pauli_frame(layout.target, Gate::X);
  if (m2 == 1) net.pauli_frame(layout.control, Gate::Z);
  net.sync_all();
  const QubitId order[] = {layout.control_ref, layout.target_ref, layout.control, layout.target};
  return make_metric(reg.fidelity_pure(order, cnot_choi_target()));
}

/// eta*_link = r_ent / r_dec.
inline double link_efficiency(double r_ent, double r_dec) {
  if (!(r_ent > 0.0) || !(r_dec > 0.0)) throw std::invalid_argument("link_efficiency: rates must be positive");
  return r_ent / r_dec;
}

}  // namespace qnetsim

#endif  // QNETSIM_PROTOCOLS_HPP

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

#ifndef QNETSIM_NETWORK_HPP
#define QNETSIM_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnetsim/densmat.hpp"
#include "qnetsim/gates.hpp"
#include "qnetsim/hardware.hpp"
#include "qnetsim/noise.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim {

/// Geometric number of attempts until the first success, support {1, 2, ...}.
template <class Gen>
std::uint64_t sample_attempts(double p_re, Gen& rng) {
  if (!(p_re > 0.0 && p_re <= 1.0)) throw std::invalid_argument("sample_attempts: p_re must be in (0, 1]");
  if (p_re == 1.0) return 1;
  const double u = uniform01(rng);
  return 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p_re)));
}

struct LinkResult {
  std::uint64_t attempts = 0;
  double elapsed = 0.0;
};

enum class Gate { X, Y, Z, H, CNOT, CZ, SWAP };

inline std::optional<Gate> gate_from_name(std::string_view name) {
  if (name == "X") return Gate::X;
  if (name == "Y") return Gate::Y;
  if (name == "Z") return Gate::Z;
  if (name == "H") return Gate::H;
  if (name == "CNOT") return Gate::CNOT;
  if (name == "CZ") return Gate::CZ;
  if (name == "SWAP") return Gate::SWAP;
  return std::nullopt;
}

/// Star-topology nodes (one electron plus up to three carbons each) sharing
/// a factored register.
///
/// Each node keeps its own clock. A node's qubits are decohered whenever its
/// clock advances: idle constants by default, remote-entanglement constants
/// for carbons while their electron is generating a link. Qubits in
/// different nodes only interact through links, so nodes advance
/// independently and are brought to a common time by sync().
///
/// Local operations respect the node's dynamical-decoupling grid: a node
/// whose clock has moved past its anchor (it idled since its last operation)
/// first waits for the next boundary anchor + k * (2 tau + t_pi). Finishing an
/// operation, or heralding a link, restarts the grid at the current time, so
/// consecutive operations run back to back.
class Network {
 public:
  struct Node {
    int carbons = 0;
    double time = 0.0;
    double dd_anchor = 0.0;
    bool re_active = false;
  };

  Network(const HardwareProfile& profile, int n_nodes, int carbons_per_node) : profile_(profile) {
    profile_.validate();
    if (n_nodes < 1) throw std::invalid_argument("build_network: need at least one node");
    if (carbons_per_node < 1 || carbons_per_node > QubitId::kMaxSlot)
      throw std::invalid_argument("build_network: carbons_per_node must be in [1, 3]");
    nodes_.assign(static_cast<std::size_t>(n_nodes), Node{carbons_per_node});
    for (int n = 0; n < n_nodes; ++n)
      for (int s = 0; s <= carbons_per_node; ++s) {
        reg_.allocate_qubit({n, s}, Eigen::Vector2cd(1.0, 0.0));
        accounted_[{n, s}] = 0.0;
      }
  }

  const HardwareProfile& profile() const { return profile_; }
  FactoredRegister& reg() { return reg_; }
  const FactoredRegister& reg() const { return reg_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int n) const { return nodes_.at(static_cast<std::size_t>(n)); }

  static QubitId electron(int n) { return {n, 0}; }
  QubitId carbon(int n, int slot) const {
    if (slot < 1 || slot > node(n).carbons) throw std::invalid_argument("carbon slot out of range");
    return {n, slot};
  }

  /// Latest node clock.
  double clock() const {
    double t = 0.0;
    for (const Node& n : nodes_) t = std::max(t, n.time);
    return t;
  }

  std::uint64_t links_generated() const { return links_; }

  /// Idle plus busy time accounted to q (equals its node clock at all times).
  double accounted_time(QubitId q) const { return accounted_.at(q); }

  /// Adds a noise-free qubit outside every node (for Choi-state references).
  void allocate_reference(QubitId q) {
    if (q.node < node_count()) throw std::invalid_argument("reference qubit must not belong to a node");
    reg_.allocate_qubit(q, Eigen::Vector2cd(1.0, 0.0));
  }

  /// Brings all listed nodes to their common latest time, idling.
  void sync(std::span<const int> nodes) {
    double t = 0.0;
    for (int n : nodes) t = std::max(t, node(n).time);
    for (int n : nodes) advance(n, t - node(n).time, {});
  }
  void sync(std::initializer_list<int> nodes) { sync(std::span<const int>(nodes.begin(), nodes.size())); }
  void sync_all() {
    std::vector<int> all(nodes_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    sync(all);
  }

  /// Waits each listed node until its next decoupling boundary. Returns the
  /// longest wait.
  double dd_align(std::span<const int> nodes) {
    double longest = 0.0;
    for (int n : nodes) {
      const double w = dd_wait(n);
      advance(n, w, {});
      longest = std::max(longest, w);
    }
    return longest;
  }
  double dd_align(std::initializer_list<int> nodes) { return dd_align(std::span<const int>(nodes.begin(), nodes.size())); }

  /// Time node n would wait before its next local operation.
  double dd_wait(int n) const {
    const Node& nd = node(n);
    const double period = profile_.dd_period();
    const double since = nd.time - nd.dd_anchor;
    if (period <= 0.0 || since <= 1e-12 * std::max(1.0, nd.time)) return 0.0;
    const double k = std::ceil(since / period - 1e-9);
    return std::max(0.0, nd.dd_anchor + k * period - nd.time);
  }

  /// Heralded link between the electrons of a and b. Prior electron states
  /// are destroyed; the new pair is the noisy (|00> + |11>)/sqrt(2) resource.
  template <class Gen>
  LinkResult generate_link(int a, int b, Gen& rng) {
    check_node(a);
    check_node(b);
    if (a == b) throw std::invalid_argument("generate_link: nodes must differ");
    sync({a, b});
    const QubitId ea = electron(a), eb = electron(b);
    if (reg_.contains(ea)) reg_.discard(ea);
    if (reg_.contains(eb)) reg_.discard(eb);
    LinkResult r;
    r.attempts = sample_attempts(profile_.p_re, rng);
    r.elapsed = static_cast<double>(r.attempts) * profile_.t_re;
    mut(a).re_active = mut(b).re_active = true;
    const QubitId busy_a[] = {ea};
    const QubitId busy_b[] = {eb};
    advance(a, r.elapsed, busy_a);
    advance(b, r.elapsed, busy_b);
    mut(a).re_active = mut(b).re_active = false;
    reg_.allocate_state({ea, eb}, re_bell_source(profile_.p_n));
    const QubitId second[] = {eb};
    reg_.apply_unitary(second, gates::X());
    mut(a).dd_anchor = node(a).time;
    mut(b).dd_anchor = node(b).time;
    ++links_;
    return r;
  }

  /// Applies a gate with its duration, idle decoherence on the other qubits of
  /// the node, and depolarizing noise after two-qubit gates. Two-qubit gates
  /// must pair the node's electron with one of its carbons. A carbon-controlled
  /// CNOT runs as H(e) CZ H(e).
  void timed_gate(Gate g, std::span<const QubitId> qs) {
    if (qs.empty() || qs.size() > 2) throw std::invalid_argument("timed_gate: expects one or two qubits");
    const int n = qs.front().node;
    for (const QubitId& q : qs) {
      check_node(q.node);
      if (q.node != n) throw std::invalid_argument("timed_gate: qubits in different nodes");
      if (q.slot > node(n).carbons) throw std::invalid_argument("timed_gate: qubit not in node");
    }
    const bool two = qs.size() == 2;
    if (two != (g == Gate::CNOT || g == Gate::CZ || g == Gate::SWAP))
      throw std::invalid_argument("timed_gate: wrong number of qubits for gate");
    if (two && (qs[0].slot == 0) == (qs[1].slot == 0))
      throw std::invalid_argument("timed_gate: two-qubit gates must pair the electron with a carbon");
    dd_align({n});
    if (!two) {
      const bool e = qs[0].slot == 0;
      const Matrix* u = nullptr;
      double d = 0.0;
      switch (g) {
        case Gate::X: u = &gates::X(); d = e ? profile_.te_x : profile_.tc_x; break;
        case Gate::Y: u = &gates::Y(); d = e ? profile_.te_y : profile_.tc_y; break;
        case Gate::Z: u = &gates::Z(); d = e ? profile_.te_z : profile_.tc_z; break;
        case Gate::H: u = &gates::H(); d = e ? profile_.te_h : profile_.tc_h; break;
        default: break;
      }
      reg_.apply_unitary(qs, *u);
      advance(n, d, qs);
    } else if (g == Gate::CZ) {
      noisy_two_qubit(qs, gates::CZ(), profile_.t_cz);
    } else if (g == Gate::CNOT) {
      if (qs[0].slot == 0) {
        noisy_two_qubit(qs, gates::CNOT(), profile_.t_cnot);
      } else {
        const QubitId e[] = {qs[1]};
        reg_.apply_unitary(e, gates::H());
        advance(n, profile_.te_h, e);
        noisy_two_qubit(qs, gates::CZ(), profile_.t_cz);
        reg_.apply_unitary(e, gates::H());
        advance(n, profile_.te_h, e);
      }
    } else {
      const QubitId ec[] = {qs[0].slot == 0 ? qs[0] : qs[1], qs[0].slot == 0 ? qs[1] : qs[0]};
      const QubitId ce[] = {ec[1], ec[0]};
      const double third = profile_.t_swap / 3.0;
      noisy_two_qubit(ec, gates::CNOT(), third);
      noisy_two_qubit(ce, gates::CNOT(), third);
      noisy_two_qubit(ec, gates::CNOT(), third);
    }
    mut(n).dd_anchor = node(n).time;
  }
  void timed_gate(Gate g, std::initializer_list<QubitId> qs) {
    timed_gate(g, std::span<const QubitId>(qs.begin(), qs.size()));
  }

  /// Reads out a communication qubit. X basis adds a Hadamard and its duration.
  template <class Gen>
  int timed_measure(QubitId q, Basis basis, Gen& rng) {
    check_node(q.node);
    if (q.slot != 0) throw std::invalid_argument("timed_measure: only the communication qubit can be read out");
    const int n = q.node;
    dd_align({n});
    const QubitId one[] = {q};
    if (basis == Basis::X) {
      reg_.apply_unitary(one, gates::H());
      advance(n, profile_.te_h, one);
    }
    advance(n, profile_.t_meas, one);
    const int outcome = noisy_measure(reg_, q, Basis::Z, profile_.p_m, rng);
    mut(n).dd_anchor = node(n).time;
    return outcome;
  }

  /// Instantaneous noiseless Pauli (classical feed-forward frame update).
  void pauli_frame(QubitId q, Gate g) {
    const QubitId one[] = {q};
    switch (g) {
      case Gate::X: reg_.apply_unitary(one, gates::X()); break;
      case Gate::Y: reg_.apply_unitary(one, gates::Y()); break;
      case Gate::Z: reg_.apply_unitary(one, gates::Z()); break;
      default: throw std::invalid_argument("pauli_frame: not a Pauli");
    }
  }

  /// Re-prepares q in |0> without time cost (protocol restarts).
  void reset_qubit(QubitId q) {
    if (reg_.contains(q)) reg_.discard(q);
    reg_.allocate_qubit(q, Eigen::Vector2cd(1.0, 0.0));
  }

 private:
  Node& mut(int n) { return nodes_.at(static_cast<std::size_t>(n)); }

  void check_node(int n) const {
    if (n < 0 || n >= node_count()) throw std::invalid_argument("node index out of range: " + std::to_string(n));
  }

  void noisy_two_qubit(std::span<const QubitId> qs, const Matrix& u, double d) {
    reg_.apply_unitary(qs, u);
    depolarize_two_qubit(reg_, qs[0], qs[1], profile_.p_g);
    advance(qs[0].node, d, qs);
  }

  /// Moves node n forward by d, decohering every allocated qubit of the node
  /// not listed in `busy`.
  void advance(int n, double d, std::span<const QubitId> busy) {
    if (d < 0.0) throw std::logic_error("advance: negative duration");
    if (d == 0.0) return;
    Node& nd = mut(n);
    std::optional<SuperOp> electron_op, carbon_op;
    for (int s = 0; s <= nd.carbons; ++s) {
      const QubitId q{n, s};
      accounted_[q] += d;
      if (std::find(busy.begin(), busy.end(), q) != busy.end() || !reg_.contains(q)) continue;
      if (s == 0) {
        if (!electron_op) electron_op = idle_superop(d, profile_.electron_idle());
        reg_.apply_superop(q, *electron_op);
      } else {
        if (!carbon_op) carbon_op = idle_superop(d, nd.re_active ? profile_.carbon_re() : profile_.carbon_idle());
        reg_.apply_superop(q, *carbon_op);
      }
    }
    nd.time += d;
  }

  HardwareProfile profile_;
  FactoredRegister reg_;
  std::vector<Node> nodes_;
  std::map<QubitId, double> accounted_;
  std::uint64_t links_ = 0;
};

/// Builds a network with every qubit in |0>, all clocks and anchors at 0.
inline Network build_network(const HardwareProfile& profile, int n_nodes, int carbons_per_node) {
  return Network(profile, n_nodes, carbons_per_node);
}

}  // namespace qnetsim

#endif  // QNETSIM_NETWORK_HPP

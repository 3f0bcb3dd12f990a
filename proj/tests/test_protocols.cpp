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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qnetsim/protocols.hpp"

namespace qnetsim {
namespace {

constexpr int A = 0, B = 1, C = 2, D = 3;

Vector bell_phi() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

void place(Network& net, std::vector<QubitId> qs, const Matrix& rho) {
  for (const QubitId& q : qs)
    if (net.reg().contains(q)) net.reg().discard(q);
  net.reg().allocate_state(qs, rho);
}

void place_bell(Network& net, QubitId a, QubitId b) { place(net, {a, b}, bell_phi() * bell_phi().adjoint()); }

HardwareProfile with_pn(double p_n) {
  HardwareProfile p = ideal_profile();
  p.p_n = p_n;
  return p;
}

// --- Pure-state oracle on small registers (qubit 0 is the MSB) ---

struct Pure {
  int n;
  Vector v;

  void one(int q, const Matrix& u) {
    const int b = n - 1 - q;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if ((i >> b) & 1) continue;
      const Eigen::Index j = i | (Eigen::Index{1} << b);
      const cplx a0 = v(i), a1 = v(j);
      v(i) = u(0, 0) * a0 + u(0, 1) * a1;
      v(j) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
  void cnot(int c, int t) {
    const int bc = n - 1 - c, bt = n - 1 - t;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (((i >> bc) & 1) && !((i >> bt) & 1)) std::swap(v(i), v(i | (Eigen::Index{1} << bt)));
  }
  /// Probability of outcome m on q; projects without renormalizing.
  double project(int q, int m) {
    const int b = n - 1 - q;
    double p = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (((i >> b) & 1) != m) v(i) = 0.0;
      p += std::norm(v(i));
    }
    return p;
  }
  /// |<ghz_k on qs|psi>|^2 summed over the rest, psi normalized.
  double ghz_fidelity(const std::vector<int>& qs) const {
    const double norm = v.squaredNorm();
    // Sum over assignments of the other qubits of |<ghz|.>|^2.
    double f = 0.0;
    std::vector<int> rest;
    for (int q = 0; q < n; ++q)
      if (std::find(qs.begin(), qs.end(), q) == qs.end()) rest.push_back(q);
    for (int r = 0; r < (1 << rest.size()); ++r) {
      Eigen::Index base = 0;
      for (std::size_t k = 0; k < rest.size(); ++k)
        if ((r >> k) & 1) base |= Eigen::Index{1} << (n - 1 - rest[k]);
      Eigen::Index all = base;
      for (int q : qs) all |= Eigen::Index{1} << (n - 1 - q);
      const cplx amp = (v(base) + v(all)) / std::sqrt(2.0);
      f += std::norm(amp);
    }
    return f / norm;
  }
};

Pure product_of_bells(int n, const std::vector<std::pair<int, int>>& pairs) {
  Pure s{n, Vector::Zero(Eigen::Index{1} << n)};
  s.v(0) = 1.0;
  for (const auto& [a, b] : pairs) {
    s.one(a, gates::H());
    s.cnot(a, b);
  }
  return s;
}

// --- Noise-free oracles ---

TEST(Protocols, NoiseFreeGhz) {
  const std::pair<GhzProtocol, std::uint64_t> cases[] = {
      {GhzProtocol::Plain, 3}, {GhzProtocol::Modicum, 4}, {GhzProtocol::Expedient, 22}};
  for (const auto& [protocol, pairs] : cases) {
    Network net(ideal_profile(), 4, 3);
    Rng rng = derive_stream(1, 0);
    const ProtocolOutcome o = run_ghz(net, protocol, rng);
    EXPECT_NEAR(o.fidelity, 1.0, 1e-9) << to_string(protocol);
    EXPECT_EQ(o.restarts, 0u) << to_string(protocol);
    EXPECT_EQ(o.bell_pairs_used, pairs) << to_string(protocol);
    EXPECT_EQ(o.duration, 0.0);
  }
}

TEST(Protocols, NoiseFreeCnot) {
  Network net(ideal_profile(), 2, 1);
  Rng rng = derive_stream(2, 0);
  const MetricPair m = run_nonlocal_cnot(net, rng);
  EXPECT_NEAR(m.f_entanglement, 1.0, 1e-9);
  EXPECT_NEAR(m.f_average, 1.0, 1e-9);
}

TEST(Protocols, ExpedientLeavesDataCarbonUntouched) {
  Network net(ideal_profile(), 4, 3);
  Rng rng = derive_stream(3, 0);
  run_ghz(net, GhzProtocol::Expedient, rng);
  for (int n = 0; n < 4; ++n) {
    const QubitId data = net.carbon(n, 1);
    EXPECT_EQ(net.reg().factor_of(data).size(), 1);
    const QubitId one[] = {data};
    EXPECT_NEAR(net.reg().fidelity_pure(one, Vector::Unit(2, 0)), 1.0, 0.0);
  }
}

TEST(Protocols, RejectsWrongTopology) {
  Rng rng = derive_stream(4, 0);
  Network three(ideal_profile(), 3, 3);
  EXPECT_THROW(run_ghz(three, GhzProtocol::Plain, rng), std::invalid_argument);
  Network small(ideal_profile(), 4, 1);
  EXPECT_THROW(run_ghz(small, GhzProtocol::Modicum, rng), std::invalid_argument);
  Network four(ideal_profile(), 4, 1);
  EXPECT_THROW(run_nonlocal_cnot(four, rng), std::invalid_argument);
}

// --- Block B.2 ---

TEST(FusionBell, PerfectInputsGiveGhz) {
  Network net(ideal_profile(), 4, 1);
  Rng rng = derive_stream(5, 0);
  for (int rep = 0; rep < 20; ++rep) {
    place_bell(net, net.carbon(A, 1), net.carbon(B, 1));
    place_bell(net, net.carbon(C, 1), net.carbon(D, 1));
    net.generate_link(A, C, rng);
    const QubitId y[] = {net.carbon(C, 1), net.carbon(D, 1)};
    block_fusion_bell(net, net.carbon(A, 1), net.carbon(C, 1), y, rng);
    const QubitId ghz[] = {net.carbon(A, 1), net.carbon(B, 1), net.carbon(C, 1), net.carbon(D, 1)};
    EXPECT_NEAR(net.reg().fidelity_pure(ghz, gates::ghz(4)), 1.0, 1e-12);
  }
}

// Oracle: 6-qubit pure-state branches [cA, cB, cC, cD, eA, eC]. The noisy
// link is 0.9 |phi+> + 0.1 |10>, each branch simulated exactly.
double fusion_bell_oracle(double p_n) {
  double f = 0.0;
  for (int branch = 0; branch < 2; ++branch) {
    const double w = branch == 0 ? 1.0 - p_n : p_n;
    if (w == 0.0) continue;
    for (int ma = 0; ma < 2; ++ma)
      for (int mc = 0; mc < 2; ++mc) {
        Pure s = product_of_bells(6, {{0, 1}, {2, 3}});
        if (branch == 0) {
          s.one(4, gates::H());
          s.cnot(4, 5);
        } else {
          s.one(4, gates::X());
        }
        s.cnot(0, 4);
        s.cnot(2, 5);
        double p = s.project(4, ma);
        p = s.project(5, mc);
        if (p < 1e-15) continue;
        if (ma ^ mc) {
          s.one(2, gates::X());
          s.one(3, gates::X());
        }
        f += w * p * s.ghz_fidelity({0, 1, 2, 3});
      }
  }
  return f;
}

TEST(FusionBell, NoisyLinkMatchesOracle) {
  const double oracle = fusion_bell_oracle(0.1);
  EXPECT_LT(oracle, 1.0);
  EXPECT_NEAR(fusion_bell_oracle(0.0), 1.0, 1e-12);
  Network net(with_pn(0.1), 4, 1);
  Rng rng = derive_stream(6, 0);
  for (int rep = 0; rep < 20; ++rep) {
    place_bell(net, net.carbon(A, 1), net.carbon(B, 1));
    place_bell(net, net.carbon(C, 1), net.carbon(D, 1));
    net.generate_link(A, C, rng);
    const QubitId y[] = {net.carbon(C, 1), net.carbon(D, 1)};
    block_fusion_bell(net, net.carbon(A, 1), net.carbon(C, 1), y, rng);
    const QubitId ghz[] = {net.carbon(A, 1), net.carbon(B, 1), net.carbon(C, 1), net.carbon(D, 1)};
    // Every outcome branch has the same fidelity here.
    EXPECT_NEAR(net.reg().fidelity_pure(ghz, gates::ghz(4)), oracle, 1e-12);
  }
}

TEST(FusionBell, MissingLinkThrows) {
  Network net(ideal_profile(), 4, 1);
  Rng rng = derive_stream(7, 0);
  const QubitId y[] = {net.carbon(C, 1)};
  EXPECT_THROW(block_fusion_bell(net, net.carbon(A, 1), net.carbon(C, 1), y, rng), std::invalid_argument);
}

TEST(FusionBell, DeterministicSoNoRestarts) {
  Network net(with_pn(0.1), 4, 3);
  Rng rng = derive_stream(8, 0);
  for (int rep = 0; rep < 50; ++rep) EXPECT_EQ(run_ghz(net, GhzProtocol::Plain, rng).restarts, 0u);
}

// --- Block B.1 ---

TEST(FusionOverlap, PerfectInputsGiveGhz3) {
  Network net(ideal_profile(), 3, 1);
  Rng rng = derive_stream(9, 0);
  for (int rep = 0; rep < 20; ++rep) {
    place_bell(net, net.carbon(A, 1), net.carbon(B, 1));
    place_bell(net, Network::electron(A), net.carbon(C, 1));
    const QubitId flip[] = {net.carbon(C, 1)};
    block_fusion_overlap(net, net.carbon(A, 1), Network::electron(A), flip, rng);
    const QubitId ghz[] = {net.carbon(A, 1), net.carbon(B, 1), net.carbon(C, 1)};
    EXPECT_NEAR(net.reg().fidelity_pure(ghz, gates::ghz(3)), 1.0, 1e-12);
  }
}

TEST(FusionOverlap, RejectsNonOverlappingStates) {
  Network net(ideal_profile(), 3, 1);
  Rng rng = derive_stream(10, 0);
  const QubitId flip[] = {net.carbon(C, 1)};
  EXPECT_THROW(block_fusion_overlap(net, net.carbon(A, 1), Network::electron(B), flip, rng), std::invalid_argument);
}

// Oracle: first-order Pauli expansion of the depolarized fusing gate,
// enumerating the 15 Paulis on (kept, consumed) exactly.
double fusion_overlap_oracle(double p_g) {
  // Qubits: 0 = cA (kept), 1 = cB, 2 = cC, 3 = eA (consumed).
  double f = 0.0;
  for (int pk = 0; pk < 16; ++pk) {
    const double w = pk == 0 ? 1.0 - p_g : p_g / 15.0;
    for (int m = 0; m < 2; ++m) {
      Pure s = product_of_bells(4, {{0, 1}, {3, 2}});
      s.cnot(0, 3);
      s.one(0, gates::pauli(pk / 4));
      s.one(3, gates::pauli(pk % 4));
      const double p = s.project(3, m);
      if (p < 1e-15) continue;
      if (m) s.one(2, gates::X());
      f += w * p * s.ghz_fidelity({0, 1, 2});
    }
  }
  return f;
}

TEST(FusionOverlap, GateNoiseFirstOrder) {
  HardwareProfile p = ideal_profile();
  p.p_g = 0.01;
  const double oracle = fusion_overlap_oracle(p.p_g);
  EXPECT_NEAR(1.0 - oracle, 14.0 / 15.0 * p.p_g, 1e-12);
  Network net(p, 3, 1);
  Rng rng = derive_stream(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    place_bell(net, net.carbon(A, 1), net.carbon(B, 1));
    place_bell(net, Network::electron(A), net.carbon(C, 1));
    const QubitId flip[] = {net.carbon(C, 1)};
    block_fusion_overlap(net, net.carbon(A, 1), Network::electron(A), flip, rng);
    const QubitId ghz[] = {net.carbon(A, 1), net.carbon(B, 1), net.carbon(C, 1)};
    EXPECT_NEAR(net.reg().fidelity_pure(ghz, gates::ghz(3)), oracle, 1e-12);
  }
}

// Same noisy inputs, the roles of the two shared-node qubits exchanged.
TEST(FusionOverlap, InvariantUnderWhichSharedQubitIsMeasured) {
  HardwareProfile p = ideal_profile();
  p.p_g = 0.02;
  const Matrix werner = 0.9 * bell_phi() * bell_phi().adjoint() + 0.1 * Matrix::Identity(4, 4) / 4.0;
  std::vector<double> first, second;
  for (int variant = 0; variant < 2; ++variant) {
    Network net(p, 3, 1);
    Rng rng = derive_stream(12, 0);
    for (int rep = 0; rep < 20; ++rep) {
      const QubitId cA = net.carbon(A, 1), cB = net.carbon(B, 1), cC = net.carbon(C, 1), eA = Network::electron(A);
      if (variant == 0) {
        place(net, {cA, cB}, werner);
        place(net, {eA, cC}, werner);
        const QubitId flip[] = {cC};
        block_fusion_overlap(net, cA, eA, flip, rng);
      } else {
        place(net, {eA, cB}, werner);
        place(net, {cA, cC}, werner);
        const QubitId flip[] = {cB};
        block_fusion_overlap(net, cA, eA, flip, rng);
      }
      const QubitId ghz[] = {cA, cB, cC};
      (variant == 0 ? first : second).push_back(net.reg().fidelity_pure(ghz, gates::ghz(3)));
    }
  }
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_NEAR(first[i], second[i], 1e-12);
}

// --- Block A.2 ---

TEST(SingleSelection, PerfectInputsAlwaysSucceed) {
  Network net(ideal_profile(), 2, 1);
  Rng rng = derive_stream(13, 0);
  for (Stabilizer s : {Stabilizer::ZZ, Stabilizer::XX})
    for (int rep = 0; rep < 20; ++rep) {
      place_bell(net, net.carbon(A, 1), net.carbon(B, 1));
      net.generate_link(A, B, rng);
      EXPECT_TRUE(single_selection(net, net.carbon(A, 1), net.carbon(B, 1), s, rng));
      const QubitId t[] = {net.carbon(A, 1), net.carbon(B, 1)};
      EXPECT_NEAR(net.reg().fidelity_pure(t, bell_phi()), 1.0, 1e-12);
    }
}

// Oracle for a 0.9 |phi+> + 0.1 |10> target checked by a perfect ancilla:
// ZZ flags every |10> component (success 0.9, output 1); XX flags half
// (success 0.95, output 0.9 / 0.95).
TEST(SingleSelection, DistillsNetworkState) {
  Matrix noisy = 0.9 * bell_phi() * bell_phi().adjoint();
  noisy(2, 2) += 0.1;
  struct Case {
    Stabilizer s;
    double p_success, f_out;
  };
  for (const Case& c : {Case{Stabilizer::ZZ, 0.9, 1.0}, Case{Stabilizer::XX, 0.95, 0.9 / 0.95}}) {
    Network net(ideal_profile(), 2, 1);
    Rng rng = derive_stream(14, 0);
    const int n = 4000;
    int ok = 0;
    for (int rep = 0; rep < n; ++rep) {
      place(net, {net.carbon(A, 1), net.carbon(B, 1)}, noisy);
      net.generate_link(A, B, rng);
      if (!single_selection(net, net.carbon(A, 1), net.carbon(B, 1), c.s, rng)) continue;
      ++ok;
      const QubitId t[] = {net.carbon(A, 1), net.carbon(B, 1)};
      ASSERT_NEAR(net.reg().fidelity_pure(t, bell_phi()), c.f_out, 1e-12);
      EXPECT_GT(c.f_out, 0.9);
    }
    EXPECT_NEAR(static_cast<double>(ok) / n, c.p_success, 4.0 * std::sqrt(c.p_success * (1 - c.p_success) / n));
  }
}

// --- Blocks C.1 and C.2 ---

TEST(DoubleSelection, NoiseFreeSuccessAndLinkCount) {
  Network net(ideal_profile(), 2, 2);
  Rng rng = derive_stream(15, 0);
  for (Stabilizer s : {Stabilizer::ZZ, Stabilizer::XX}) {
    place_bell(net, net.carbon(A, 2), net.carbon(B, 2));
    const std::uint64_t before = net.links_generated();
    EXPECT_TRUE(double_selection(net, net.carbon(A, 2), net.carbon(B, 2), s, 1, rng));
    EXPECT_EQ(net.links_generated() - before, 2u);
    const QubitId t[] = {net.carbon(A, 2), net.carbon(B, 2)};
    EXPECT_NEAR(net.reg().fidelity_pure(t, bell_phi()), 1.0, 1e-12);
  }
}

TEST(TripleSelection, NoiseFreeSuccessAndLinkCount) {
  Network net(ideal_profile(), 2, 2);
  Rng rng = derive_stream(16, 0);
  for (Stabilizer s : {Stabilizer::ZZ, Stabilizer::XX}) {
    place_bell(net, net.carbon(A, 2), net.carbon(B, 2));
    const std::uint64_t before = net.links_generated();
    EXPECT_TRUE(triple_selection(net, net.carbon(A, 2), net.carbon(B, 2), s, 1, rng));
    EXPECT_EQ(net.links_generated() - before, 3u);
    const QubitId t[] = {net.carbon(A, 2), net.carbon(B, 2)};
    EXPECT_NEAR(net.reg().fidelity_pure(t, bell_phi()), 1.0, 1e-12);
  }
}

// Same noisy target, same noisy ancillas: the extra check can only reject more.
TEST(DoubleSelection, SucceedsNoMoreOftenThanSingle) {
  const HardwareProfile p = with_pn(0.1);
  Matrix noisy = 0.9 * bell_phi() * bell_phi().adjoint();
  noisy(2, 2) += 0.1;
  const int n = 4000;
  int single_ok = 0, double_ok = 0;
  Rng rng = derive_stream(17, 0);
  for (int rep = 0; rep < n; ++rep) {
    Network a(p, 2, 2), b(p, 2, 2);
    place(a, {a.carbon(A, 2), a.carbon(B, 2)}, noisy);
    place(b, {b.carbon(A, 2), b.carbon(B, 2)}, noisy);
    a.generate_link(A, B, rng);
    single_ok += single_selection(a, a.carbon(A, 2), a.carbon(B, 2), Stabilizer::ZZ, rng);
    double_ok += double_selection(b, b.carbon(A, 2), b.carbon(B, 2), Stabilizer::ZZ, 1, rng);
  }
  const double ps = static_cast<double>(single_ok) / n, pd = static_cast<double>(double_ok) / n;
  EXPECT_LT(pd, ps);
}

// --- GHZ protocols ---

TEST(Ghz, PairAccounting) {
  // Only network errors, so Modicum restarts happen but durations stay zero.
  Rng rng = derive_stream(18, 0);
  for (int rep = 0; rep < 200; ++rep) {
    Network net(with_pn(0.1), 4, 3);
    const ProtocolOutcome plain = run_ghz(net, GhzProtocol::Plain, rng);
    EXPECT_EQ(plain.bell_pairs_used, 3u);
    const ProtocolOutcome mod = run_ghz(net, GhzProtocol::Modicum, rng);
    EXPECT_EQ(mod.bell_pairs_used, 4u * (mod.restarts + 1));
  }
}

TEST(Ghz, ModicumBeatsPlainAtZeroCost) {
  const int n = 10000;
  std::vector<double> plain, mod;
  Rng rng = derive_stream(19, 0);
  for (int rep = 0; rep < n; ++rep) {
    Network a(with_pn(0.1), 4, 3);
    plain.push_back(run_ghz(a, GhzProtocol::Plain, rng).fidelity);
    Network b(with_pn(0.1), 4, 3);
    mod.push_back(run_ghz(b, GhzProtocol::Modicum, rng).fidelity);
  }
  auto stats = [](const std::vector<double>& xs) {
    double m = 0.0, v = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    for (double x : xs) v += (x - m) * (x - m);
    return std::pair{m, std::sqrt(v / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()))};
  };
  const auto [mp, sp] = stats(plain);
  const auto [mm, sm] = stats(mod);
  EXPECT_GE(mm + 3.0 * std::hypot(sp, sm), mp);
  EXPECT_GT(mm, mp);
}

TEST(Ghz, PlainFidelityInvariantUnderRelabeling) {
  Rng rng = derive_stream(20, 0);
  Network net(purified_profile(), 4, 1);
  run_ghz(net, GhzProtocol::Plain, rng);
  std::vector<QubitId> qs{net.carbon(A, 1), net.carbon(B, 1), net.carbon(C, 1), net.carbon(D, 1)};
  const double ref = net.reg().fidelity_pure(qs, gates::ghz(4));
  std::sort(qs.begin(), qs.end());
  do {
    EXPECT_NEAR(net.reg().fidelity_pure(qs, gates::ghz(4)), ref, 1e-12);
  } while (std::next_permutation(qs.begin(), qs.end()));
}

TEST(Ghz, ProtocolNames) {
  for (GhzProtocol p : {GhzProtocol::Plain, GhzProtocol::Modicum, GhzProtocol::Expedient})
    EXPECT_EQ(ghz_protocol_from_name(to_string(p)), p);
  EXPECT_FALSE(ghz_protocol_from_name("fancy").has_value());
  EXPECT_EQ(required_carbons(GhzProtocol::Plain), 1);
  EXPECT_EQ(required_carbons(GhzProtocol::Expedient), 3);
}

// --- Metrics ---

TEST(Metrics, AverageFidelityAlgebra) {
  EXPECT_EQ(average_fidelity(1.0, 4), 1.0);
  EXPECT_EQ(average_fidelity(1.0 / 16.0, 4), 0.25);
  const MetricPair m = make_metric(0.7);
  EXPECT_EQ(m.dimension, 4);
  EXPECT_NEAR(m.f_average, (4 * 0.7 + 1) / 5, 1e-15);
}

TEST(Metrics, ChoiTargetIsNormalized) {
  EXPECT_NEAR(cnot_choi_target().squaredNorm(), 1.0, 1e-15);
}

TEST(Metrics, LinkEfficiency) {
  EXPECT_EQ(link_efficiency(3.0, 3.0), 1.0);
  const double t_re = 6e-6;
  EXPECT_NEAR(link_efficiency(1e-4 / t_re, 1.0 / (1e5 * t_re)), 10.0, 1e-9);
  EXPECT_NEAR(link_efficiency(1e-4 / t_re, 1.0 / (2e3 * t_re)), 0.2, 1e-12);
  EXPECT_THROW(link_efficiency(0.0, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace qnetsim

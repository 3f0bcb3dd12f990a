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

#include <cmath>
#include <numbers>
#include <random>

#include "qnetsim/pulse.hpp"

namespace qnetsim {
namespace {

// Population of m_s = -1 after driving one nitrogen block for time t.
double block_inversion(const PulseParameters& p, int m_i, double delta, double t) {
  Eigen::Vector3cd psi(0.0, 1.0, 0.0);
  const auto steps = static_cast<std::size_t>(std::llround(t / p.dt));
  for (std::size_t j = 0; j < steps; ++j)
    psi = step_propagator(hamiltonian_block(p, m_i, delta, (static_cast<double>(j) + 0.5) * p.dt), p.dt) * psi;
  return std::norm(psi(2));
}

// Detuning (Hz) that maximizes the block's inversion at time t.
double resonance_offset_hz(const PulseParameters& p, int m_i, double t) {
  double best = -1.0, at = 0.0;
  for (double f = -5e3; f <= 5e3; f += 100.0) {
    const double v = block_inversion(p, m_i, kTwoPi * f, t);
    if (v > best) best = v, at = f;
  }
  double lo = at - 100.0, hi = at + 100.0;
  for (int it = 0; it < 25; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (block_inversion(p, m_i, kTwoPi * a, t) < block_inversion(p, m_i, kTwoPi * b, t))
      lo = a;
    else
      hi = b;
  }
  return 0.5 * (lo + hi);
}

TEST(Hamiltonian, StaticOnlyIsDiagonal) {
  PulseParameters p;
  p.omega = 0.0;
  const Matrix9 h = hamiltonian_at(p, 0.0, 1.234e-6);
  EXPECT_EQ((h - Matrix9(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, Hermitian) {
  PulseParameters p;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> t(0.0, 8e-6);
  for (int i = 0; i < 100; ++i) {
    const Matrix9 h = hamiltonian_at(p, kTwoPi * 3e3, t(gen));
    ASSERT_EQ((h - h.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Hamiltonian, DriveElementPerTone) {
  PulseParameters p;
  PulseParameters off = p;
  off.omega = 0.0;
  // At t = 0 with zero phases the three tones add in phase.
  const spin1::Matrix3 drive = hamiltonian_block(p, 0, 0.0, 0.0) - hamiltonian_block(off, 0, 0.0, 0.0);
  const int m0 = spin1::index_of(0), mm = spin1::index_of(-1);
  EXPECT_NEAR(std::abs(drive(m0, mm)), 3.0 * p.omega / 2.0, 1e-6);
  EXPECT_NEAR(std::abs(drive(mm, m0)), 3.0 * p.omega / 2.0, 1e-6);
}

TEST(Hamiltonian, LayoutMatchesBlocks) {
  PulseParameters p;
  const Matrix9 h = hamiltonian_at(p, 0.0, 2e-6);
  for (int mi = -1; mi <= 1; ++mi) {
    const spin1::Matrix3 b = hamiltonian_block(p, mi, 0.0, 2e-6);
    const int n = spin1::index_of(mi);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(h(3 * r + n, 3 * c + n), b(r, c));
  }
}

// A single resonant coupling of strength omega/2 follows sin^2(omega t / 2).
TEST(Propagator, TwoLevelRabiOracle) {
  const double omega = kTwoPi * 92e3, dt = 1e-9;
  spin1::Matrix3 h = spin1::Matrix3::Zero();
  h(1, 2) = h(2, 1) = omega / 2.0;
  const spin1::Matrix3 u = step_propagator(h, dt);
  Eigen::Vector3cd psi(0.0, 1.0, 0.0);
  double worst = 0.0, best_p = 0.0, best_t = 0.0;
  for (int j = 1; j <= 8000; ++j) {
    psi = u * psi;
    const double t = j * dt;
    const double pop = std::norm(psi(2));
    worst = std::max(worst, std::abs(pop - std::pow(std::sin(omega * t / 2.0), 2)));
    if (pop > best_p) best_p = pop, best_t = t;
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_NEAR(best_t, std::numbers::pi / omega, 1e-9);
  EXPECT_NEAR(best_t, 5.43e-6, 0.01e-6);
}

TEST(Propagator, StepIsUnitary) {
  PulseParameters p;
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> t(0.0, 8e-6);
  for (int i = 0; i < 100; ++i) {
    const spin1::Matrix3 u = step_propagator(hamiltonian_block(p, i % 3 - 1, 0.0, t(gen)), p.dt);
    ASSERT_LT((u.adjoint() * u - spin1::Matrix3::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Propagate, NormDriftSmall) {
  PulseParameters p;
  p.duration = 5.5e-6;
  EXPECT_LT(propagate(p, 0.0, 100).max_norm_drift, 1e-8);
}

TEST(Propagate, ConvergesInStepSize) {
  PulseParameters p;
  p.duration = 5.5e-6;
  PulseParameters fine = p;
  fine.dt = p.dt / 2;
  const PulseTrajectory a = propagate(p, kTwoPi * 2e3, 1000000), b = propagate(fine, kTwoPi * 2e3, 1000000);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_LT(std::abs(a.p0[n].back() - b.p0[n].back()), 1e-6);
    EXPECT_LT(std::abs(a.pm1[n].back() - b.pm1[n].back()), 1e-6);
  }
}

TEST(Propagate, GlobalPhaseInvariance) {
  PulseParameters p;
  p.duration = 5.5e-6;
  PulseParameters q = p;
  for (double& ph : q.phases) ph += 0.7;
  const PulseTrajectory a = propagate(p, 0.0, 500), b = propagate(q, 0.0, 500);
  ASSERT_EQ(a.pm1_avg.size(), b.pm1_avg.size());
  for (std::size_t i = 0; i < a.pm1_avg.size(); ++i) {
    ASSERT_LT(std::abs(a.pm1_avg[i] - b.pm1_avg[i]), 1e-9);
    ASSERT_LT(std::abs(a.p0_avg[i] - b.p0_avg[i]), 1e-9);
  }
}

TEST(Propagate, RecordingSchedule) {
  PulseParameters p;
  p.duration = 1e-6;
  const PulseTrajectory tr = propagate(p, 0.0, 300);
  // t = 0, 300, 600, 900 and the final step.
  ASSERT_EQ(tr.t.size(), 5u);
  EXPECT_NEAR(tr.t.back(), 1e-6, 1e-18);
  EXPECT_EQ(tr.p0_avg.front(), 1.0);
  EXPECT_THROW(propagate(p, 0.0, 0), std::invalid_argument);
}

TEST(Propagate, InversionPeak) {
  PulseParameters p;
  const double t_pi = inversion_peak_time(p);
  EXPECT_NEAR(t_pi, 5.5e-6, 0.2e-6);
  EXPECT_GT(inversion_at(p, 0.0, t_pi), 0.99);
}

TEST(Parameters, StepSizeValidation) {
  PulseParameters p;
  p.dt = 1e-8;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = PulseParameters{};
  p.omega = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

// Off-resonant tones shift the outer transitions by a couple of kHz but
// cancel for m_I = 0.
TEST(AcStark, ResonanceOffsets) {
  const PulseParameters p;
  const double t = 5.47e-6;
  const double centre = resonance_offset_hz(p, 0, t);
  const double up = resonance_offset_hz(p, 1, t);
  const double down = resonance_offset_hz(p, -1, t);
  EXPECT_LT(std::abs(centre), 200.0);
  EXPECT_GT(std::abs(up), 1.5e3);
  EXPECT_LT(std::abs(up), 3.0e3);
  EXPECT_NEAR(up, -down, 100.0);
}

TEST(AcStark, ClosedForm) {
  EXPECT_NEAR(ac_stark(kTwoPi * 92e3, kTwoPi * 2.18e6) / kTwoPi, 1.94e3, 5.0);
  EXPECT_EQ(ac_stark(0.0, 1.0), 0.0);
  EXPECT_EQ(ac_stark(3.0, -2.0), -ac_stark(3.0, 2.0));
  EXPECT_THROW(ac_stark(1.0, 0.0), std::invalid_argument);
}

TEST(Infidelity, NoDetuningLeavesOnlyLightShiftResidual) {
  PulseParameters p;
  p.sigma_f = 0.0;
  const InfidelityEstimate e = inversion_infidelity(p, 2, 3);
  EXPECT_GT(e.mean, 0.0);
  EXPECT_LT(e.mean, 1e-3);
  EXPECT_NEAR(e.stderr_, 0.0, 1e-12);
}

TEST(Infidelity, DeterministicAndThreadIndependent) {
  PulseParameters p;
  const InfidelityEstimate a = inversion_infidelity(p, 8, 4, 1), b = inversion_infidelity(p, 8, 4, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(Infidelity, DetuningSamplesAreGaussian) {
  PulseParameters p;
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = detuning_sample(p, 5, static_cast<std::size_t>(i)) / kTwoPi;
    s += d;
    s2 += d * d;
  }
  const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
  EXPECT_NEAR(s / n, 0.0, 4.0 * p.sigma_f / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sd, p.sigma_f, 0.01 * p.sigma_f);
}

// The zero-field splitting, quadrupole and nuclear Zeeman defaults are not
// measured values; their exact size barely matters.
TEST(Sensitivity, StaticDefaultsSweep) {
  const PulseParameters base;
  const double t = inversion_peak_time(base);
  const double ref = inversion_at(base, kTwoPi * 3e3, t);
  for (double scale : {0.9, 1.1}) {
    PulseParameters d = base, q = base, g = base;
    d.d *= scale;
    q.q *= scale;
    g.gamma_n_bz *= scale;
    EXPECT_NEAR(inversion_at(d, kTwoPi * 3e3, t), ref, 1e-5) << "D x" << scale;
    EXPECT_NEAR(inversion_at(q, kTwoPi * 3e3, t), ref, 1e-12) << "Q x" << scale;
    EXPECT_NEAR(inversion_at(g, kTwoPi * 3e3, t), ref, 1e-12) << "gamma_N x" << scale;
  }
}

}  // namespace
}  // namespace qnetsim

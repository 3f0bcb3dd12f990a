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

#ifndef QNETSIM_PULSE_HPP
#define QNETSIM_PULSE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "qnetsim/parallel.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Nitrogen-14 gyromagnetic ratio (Hz/T) and the default field (T).
inline constexpr double kGammaN14 = 3.0766e6;
inline constexpr double kDefaultBz = 46.8e-4;

/// Three-tone weak-pulse drive of the electron (spin 1) coupled to the
/// nitrogen (spin 1). All frequencies in rad/s, except sigma_f in Hz.
struct PulseParameters {
  double d = kTwoPi * 2.877e9;
  double q = -kTwoPi * 4.945e6;
  double gamma_n_bz = kTwoPi * kGammaN14 * kDefaultBz;
  double a_par = kTwoPi * 2.18e6;
  double omega = kTwoPi * 92e3;
  std::array<double, 3> phases{0.0, 0.0, 0.0};
  double sigma_f = 4.5e3;
  double duration = 8e-6;
  double dt = 1e-9;

  /// Largest non-secular frequency scale (Hz) the stepper must resolve. The
  /// zero-field term only dresses the undriven m_s = +1 level and enters the
  /// step exponential exactly.
  double max_frequency_hz() const {
    return std::max({std::abs(a_par), std::abs(omega), std::abs(q), std::abs(gamma_n_bz)}) / kTwoPi;
  }

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("pulse: omega must be positive");
    if (!(dt > 0.0) || !(duration >= 0.0)) throw std::invalid_argument("pulse: dt must be positive and duration non-negative");
    if (!(sigma_f >= 0.0)) throw std::invalid_argument("pulse: sigma_f must be non-negative");
    if (dt > 1.0 / (50.0 * max_frequency_hz())) throw std::invalid_argument("pulse: step size too coarse for the fastest frequency");
  }
};

namespace spin1 {

using Matrix3 = Eigen::Matrix3cd;

/// Basis order m = +1, 0, -1.
inline const Matrix3& sz() {
  static const Matrix3 m = Eigen::Vector3cd(1.0, 0.0, -1.0).asDiagonal();
  return m;
}
inline const Matrix3& sx() {
  static const Matrix3 m = [] {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix3 r = Matrix3::Zero();
    r(0, 1) = r(1, 0) = r(1, 2) = r(2, 1) = s;
    return r;
  }();
  return m;
}
inline const Matrix3& sy() {
  static const Matrix3 m = [] {
    const std::complex<double> s(0.0, 1.0 / std::sqrt(2.0));
    Matrix3 r = Matrix3::Zero();
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 2) = -s;
    r(2, 1) = s;
    return r;
  }();
  return m;
}
inline int index_of(int m) { return 1 - m; }

}  // namespace spin1

using Matrix9 = Eigen::Matrix<std::complex<double>, 9, 9>;

/// Electron block of the Hamiltonian for nitrogen projection m_i, plus the
/// quasi-static detuning delta * S_z.
inline spin1::Matrix3 hamiltonian_block(const PulseParameters& p, int m_i, double delta, double t) {
  using spin1::Matrix3;
  Matrix3 h = Matrix3::Zero();
  h(0, 0) += 2.0 * p.d;
  const double mi = m_i;
  const double nuclear = p.q * mi * mi + p.gamma_n_bz * mi;
  h += Matrix3::Identity() * nuclear;
  h += (p.a_par * mi + delta) * spin1::sz();
  const double tone[3] = {0.0, p.a_par, -p.a_par};
  const double amp = p.omega / std::sqrt(2.0);
  for (int k = 0; k < 3; ++k) {
    const double arg = tone[k] * t + p.phases[static_cast<std::size_t>(k)];
    h += amp * (std::cos(arg) * spin1::sx() - std::sin(arg) * spin1::sy());
  }
  return h;
}

/// Full electron (x) nitrogen Hamiltonian, index (1 - m_s) * 3 + (1 - m_i).
inline Matrix9 hamiltonian_at(const PulseParameters& p, double delta, double t) {
  Matrix9 h = Matrix9::Zero();
  for (int mi = -1; mi <= 1; ++mi) {
    const spin1::Matrix3 b = hamiltonian_block(p, mi, delta, t);
    const int n = spin1::index_of(mi);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) h(3 * r + n, 3 * c + n) = b(r, c);
  }
  return h;
}

/// exp(-i H dt) for a Hermitian 3x3 H.
inline spin1::Matrix3 step_propagator(const spin1::Matrix3& h, double dt) {
  Eigen::SelfAdjointEigenSolver<spin1::Matrix3> es(h);
  const Eigen::Vector3cd phase = (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -dt)).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

struct PulseTrajectory {
  std::vector<double> t;
  /// Per nitrogen projection (index 1 - m_i): populations of m_s = 0 and -1.
  std::array<std::vector<double>, 3> p0, pm1;
  std::vector<double> p0_avg, pm1_avg;
  double max_norm_drift = 0.0;
};

/// Integrates the electron from m_s = 0 for each nitrogen projection with
/// midpoint-Hamiltonian step exponentials, recording every `record_every`
/// steps (and the final step). Nitrogen projections are averaged as an equal
/// classical mixture.
inline PulseTrajectory propagate(const PulseParameters& p, double delta, std::size_t record_every = 1) {
  p.validate();
  if (record_every == 0) throw std::invalid_argument("propagate: record_every must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::llround(p.duration / p.dt));
  PulseTrajectory tr;
  auto record = [&](std::size_t j, const std::array<Eigen::Vector3cd, 3>& psi) {
    tr.t.push_back(static_cast<double>(j) * p.dt);
    double a0 = 0.0, a1 = 0.0;
    for (std::size_t n = 0; n < 3; ++n) {
      const double q0 = std::norm(psi[n](1)), q1 = std::norm(psi[n](2));
      tr.p0[n].push_back(q0);
      tr.pm1[n].push_back(q1);
      a0 += q0;
      a1 += q1;
      tr.max_norm_drift = std::max(tr.max_norm_drift, std::abs(psi[n].squaredNorm() - 1.0));
    }
    tr.p0_avg.push_back(a0 / 3.0);
    tr.pm1_avg.push_back(a1 / 3.0);
  };
  std::array<Eigen::Vector3cd, 3> psi;
  for (Eigen::Vector3cd& v : psi) v = Eigen::Vector3cd(0.0, 1.0, 0.0);
  record(0, psi);
  for (std::size_t j = 0; j < steps; ++j) {
    const double tm = (static_cast<double>(j) + 0.5) * p.dt;
    for (int mi = -1; mi <= 1; ++mi) {
      const std::size_t n = static_cast<std::size_t>(spin1::index_of(mi));
      psi[n] = step_propagator(hamiltonian_block(p, mi, delta, tm), p.dt) * psi[n];
    }
    if ((j + 1) % record_every == 0 || j + 1 == steps) record(j + 1, psi);
  }
  return tr;
}

/// Time of maximal nitrogen-averaged inversion at zero detuning.
inline double inversion_peak_time(const PulseParameters& p) {
  const PulseTrajectory tr = propagate(p, 0.0);
  const auto it = std::max_element(tr.pm1_avg.begin(), tr.pm1_avg.end());
  return tr.t[static_cast<std::size_t>(it - tr.pm1_avg.begin())];
}

/// Nitrogen-averaged m_s = -1 population after driving for t_pi.
inline double inversion_at(PulseParameters p, double delta, double t_pi) {
  p.duration = t_pi;
  const PulseTrajectory tr = propagate(p, delta, static_cast<std::size_t>(-1));
  return tr.pm1_avg.back();
}

/// Quasi-static detuning (rad/s) of sample i: Gaussian with standard
/// deviation 2 pi sigma_f, drawn from derive_stream(seed, i).
inline double detuning_sample(const PulseParameters& p, std::uint64_t seed, std::size_t i) {
  if (p.sigma_f == 0.0) return 0.0;
  Rng rng = derive_stream(seed, i);
  std::normal_distribution<double> gauss(0.0, kTwoPi * p.sigma_f);
  return gauss(rng);
}

struct InfidelityEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double t_pi = 0.0;
};

/// Averages 1 - P(-1) at the zero-detuning peak time over Gaussian detunings
/// with standard deviation 2 pi sigma_f. Sample i uses derive_stream(seed, i).
inline InfidelityEstimate inversion_infidelity(const PulseParameters& p, std::size_t n_samples, std::uint64_t seed,
                                               unsigned threads = 1) {
  if (n_samples < 2) throw std::invalid_argument("inversion_infidelity: need at least two samples");
  InfidelityEstimate out;
  out.t_pi = inversion_peak_time(p);
  const std::vector<double> inf = parallel_map(n_samples, threads, [&](std::size_t i) {
    return 1.0 - inversion_at(p, detuning_sample(p, seed, i), out.t_pi);
  });
  double s = 0.0, s2 = 0.0;
  for (double x : inf) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(n_samples);
  out.mean = s / n;
  out.stderr_ = std::sqrt(std::max(0.0, (s2 / n - out.mean * out.mean) / (n - 1.0)));
  return out;
}

/// Second-order light shift of a transition detuned by delta from a tone of
/// Rabi frequency omega: omega^2 / (2 delta).
inline double ac_stark(double omega, double delta) {
  if (delta == 0.0) throw std::invalid_argument("ac_stark: zero detuning");
  return omega * omega / (2.0 * delta);
}

}  // namespace qnetsim

#endif  // QNETSIM_PULSE_HPP

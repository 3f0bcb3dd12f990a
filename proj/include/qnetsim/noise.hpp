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

#ifndef QNETSIM_NOISE_HPP
#define QNETSIM_NOISE_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "qnetsim/densmat.hpp"
#include "qnetsim/gates.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Relaxation (t1) and coherence (t2) times in seconds. A non-finite t1
/// means no amplitude damping.
struct DecoherencePair {
  double t1 = kInfiniteTime;
  double t2 = kInfiniteTime;
};

struct KrausSet {
  std::vector<Matrix> ops;
  int arity = 1;

  /// max |sum K^dagger K - I|
  double completeness_error() const {
    const Eigen::Index d = Eigen::Index{1} << arity;
    Matrix s = Matrix::Zero(d, d);
    for (const Matrix& k : ops) s += k.adjoint() * k;
    return (s - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  }
};

/// Generalized amplitude damping towards I/2, gamma1 = 1 - exp(-t/t1).
inline KrausSet gad_kraus(double t, double t1) {
  if (!(t >= 0.0)) throw std::invalid_argument("gad_kraus: negative duration");
  if (!(t1 > 0.0)) throw std::invalid_argument("gad_kraus: t1 must be positive");
  const double g = std::isinf(t1) ? 0.0 : -std::expm1(-t / t1);
  const double s = std::sqrt(0.5);
  // sqrt(1 - g) without cancellation for t >> t1.
  const double a = std::isinf(t1) ? 1.0 : std::exp(-0.5 * t / t1);
  const double b = std::sqrt(g);
  return KrausSet{{gates::make(2, {s, 0, 0, s * a}),  //
                   gates::make(2, {0, s * b, 0, 0}),  //
                   gates::make(2, {s * a, 0, 0, s}),  //
                   gates::make(2, {0, 0, s * b, 0})},
                  1};
}

/// Pure-dephasing time with the amplitude-damping contribution removed:
/// 1/T2bar = 2/T2 - 1/T1. T2 == 2*T1 (pure relaxation) gives infinity.
inline double effective_t2bar(const DecoherencePair& pair) {
  if (!(pair.t1 > 0.0) || !(pair.t2 > 0.0)) throw std::invalid_argument("effective_t2bar: times must be positive");
  const double rate = 2.0 / pair.t2 - (std::isinf(pair.t1) ? 0.0 : 1.0 / pair.t1);
  if (rate < 0.0) throw std::invalid_argument("effective_t2bar: t2 exceeds 2*t1");
  return rate == 0.0 ? kInfiniteTime : 1.0 / rate;
}

/// Phase damping, gamma2 = 1 - exp(-t/t2bar).
inline KrausSet pd_kraus(double t, double t2bar) {
  if (!(t >= 0.0)) throw std::invalid_argument("pd_kraus: negative duration");
  if (!(t2bar > 0.0)) throw std::invalid_argument("pd_kraus: t2bar must be positive");
  const double g = std::isinf(t2bar) ? 0.0 : -std::expm1(-t / t2bar);
  const double keep = std::isinf(t2bar) ? 1.0 : std::exp(-0.5 * t / t2bar);
  return KrausSet{{gates::make(2, {1, 0, 0, keep}),  //
                   gates::make(2, {0, 0, 0, std::sqrt(g)})},
                  1};
}

/// GAD(t, T1) followed by PD(t, T2bar) as one Liouville operator.
inline SuperOp idle_superop(double t, const DecoherencePair& pair) {
  const double t2bar = effective_t2bar(pair);
  const KrausSet pd = pd_kraus(t, t2bar);
  SuperOp s = superop_from_kraus(pd.ops);
  if (!std::isinf(pair.t1)) s = s * superop_from_kraus(gad_kraus(t, pair.t1).ops);
  return s;
}

inline void idle_decoherence(FactoredRegister& reg, QubitId q, double t, const DecoherencePair& pair) {
  if (!(t >= 0.0)) throw std::invalid_argument("idle_decoherence: negative duration");
  if (t == 0.0) return;
  reg.apply_superop(q, idle_superop(t, pair));
}

inline void depolarize_two_qubit(FactoredRegister& reg, QubitId q1, QubitId q2, double p_g) {
  if (p_g == 0.0) return;
  reg.depolarize_pair(q1, q2, p_g);
}

enum class Basis { Z, X };

/// Projective measurement with symmetric error: with probability p_m both the
/// reported outcome and the post-measurement state are flipped. For the X
/// basis a Hadamard is applied first; callers charge its duration.
template <class Gen>
int noisy_measure(FactoredRegister& reg, QubitId q, Basis basis, double p_m, Gen& rng) {
  if (!(p_m >= 0.0 && p_m <= 1.0)) throw std::invalid_argument("noisy_measure: p_m out of range");
  const QubitId one[] = {q};
  if (basis == Basis::X) reg.apply_unitary(one, gates::H());
  int outcome = reg.measure_z(q, rng);
  if (p_m > 0.0 && uniform01(rng) < p_m) {
    reg.apply_unitary(one, gates::X());
    outcome ^= 1;
  }
  return outcome;
}

/// (1 - p_n)|psi+><psi+| + p_n |11><11|, psi+ = (|01> + |10>)/sqrt(2).
inline Matrix re_bell_source(double p_n) {
  if (!(p_n >= 0.0 && p_n <= 1.0)) throw std::invalid_argument("re_bell_source: p_n out of range");
  Matrix rho = Matrix::Zero(4, 4);
  const double h = 0.5 * (1.0 - p_n);
  rho(1, 1) = h;
  rho(1, 2) = h;
  rho(2, 1) = h;
  rho(2, 2) = h;
  rho(3, 3) = p_n;
  return rho;
}

/// Combined Gaussian-envelope dephasing time: (sum 1/T_i^2)^(-1/2).
inline double quadrature_combine(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("quadrature_combine: empty list");
  double s = 0.0;
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("quadrature_combine: times must be positive");
    s += 1.0 / (t * t);
  }
  return 1.0 / std::sqrt(s);
}

}  // namespace qnetsim

#endif  // QNETSIM_NOISE_HPP

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

#ifndef QNETSIM_DEPHASING_HPP
#define QNETSIM_DEPHASING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qnetsim/parallel.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim {

/// Electron repump (reset) time distribution.
struct ResetModel {
  enum class Kind { TwoTimescale, SingleExponential };
  Kind kind = Kind::TwoTimescale;
  double a = 0.480;
  double tau1 = 142e-9;
  double b = 0.503;
  double tau2 = 905e-9;
  double single_mean = 200e-9;

  static ResetModel two_timescale(double a, double tau1, double b, double tau2) {
    return {Kind::TwoTimescale, a, tau1, b, tau2, 0.0};
  }
  static ResetModel single_exponential(double mean) { return {Kind::SingleExponential, 0.0, 0.0, 0.0, 0.0, mean}; }

  double mean() const { return kind == Kind::SingleExponential ? single_mean : (a * tau1 + b * tau2) / (a + b); }

  void validate() const {
    if (kind == Kind::SingleExponential) {
      if (!(single_mean > 0.0)) throw std::invalid_argument("reset model: mean must be positive");
      return;
    }
    if (!(a > 0.0 && b > 0.0 && tau1 > 0.0 && tau2 > 0.0))
      throw std::invalid_argument("reset model: two-timescale parameters must be positive");
  }
};

/// Draws from the exponential mixture (weight a/(a+b) on tau1) or from the
/// single exponential.
template <class Gen>
double sample_reset_time(const ResetModel& m, Gen& rng) {
  if (m.kind == ResetModel::Kind::SingleExponential) return sample_exponential(rng, m.single_mean);
  const double tau = uniform01(rng) * (m.a + m.b) < m.a ? m.tau1 : m.tau2;
  return sample_exponential(rng, tau);
}

/// Spin projection after initialisation: 0 with 1 - p_init, +-1 with p_init/2 each.
template <class Gen>
int sample_initial_state(double p_init, Gen& rng) {
  if (!(p_init >= 0.0 && p_init <= 1.0)) throw std::invalid_argument("sample_initial_state: p_init out of range");
  const double u = uniform01(rng);
  if (u >= p_init) return 0;
  return u < 0.5 * p_init ? -1 : +1;
}

/// Inversion probability of an alpha rotation on 0 <-> -1.
inline double p_mw_from_alpha(double alpha) {
  const double s = std::sin(0.5 * alpha);
  return s * s;
}

struct DephasingConfig {
  double a_par = 2.0 * std::numbers::pi * 80.0;
  double p_init = 0.03;
  double p_mw = 0.5;
  double p_opt = 0.01;
  double p_echo = 0.01;
  double t_a = 6.1e-6;
  double t_b = 2.4e-6;
  ResetModel reset{};
  std::size_t n_trials = 1000000;
  std::size_t n_samples = 1000;
  bool echo_enabled = false;
  /// Constant added to every trial phase (rotating-frame shift).
  double phase_offset = 0.0;

  /// Free-evolution time after the echo: t_b/2 - <t_c>, so that on average
  /// the second half plus the reset lasts t_b/2.
  double echo_second_half() const { return std::max(0.0, 0.5 * t_b - reset.mean()); }

  void validate() const {
    for (double p : {p_init, p_mw, p_opt, p_echo})
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("dephasing config: probability out of range");
    if (!(t_a >= 0.0 && t_b >= 0.0)) throw std::invalid_argument("dephasing config: negative duration");
    if (!std::isfinite(a_par) || !std::isfinite(phase_offset)) throw std::invalid_argument("dephasing config: non-finite frequency");
    if (n_trials < 1) throw std::invalid_argument("dephasing config: n_trials must be positive");
    if (n_samples < 2) throw std::invalid_argument("dephasing config: need at least two samples");
    reset.validate();
    if (echo_enabled && reset.mean() > 0.5 * t_b)
      throw std::invalid_argument("dephasing config: mean reset time exceeds t_b/2 with echo");
  }
};

/// Sequence as run in the experiments (no electron echo).
inline DephasingConfig no_echo_config() { return DephasingConfig{}; }

/// Faster sequence with an electron echo and single-exponential 200 ns reset.
inline DephasingConfig echo_config() {
  DephasingConfig c;
  c.t_a = 5.1e-6;
  c.t_b = 1.3e-6;
  c.p_init = 0.01;
  c.p_echo = 0.01;
  c.reset = ResetModel::single_exponential(200e-9);
  c.echo_enabled = true;
  return c;
}

/// Phase (rad) picked up by the nuclear spin in one entangling attempt.
template <class Gen>
double run_trial(const DephasingConfig& c, Gen& rng) {
  int s = sample_initial_state(c.p_init, rng);
  double acc = s * c.t_a;
  // Microwave alpha pulse; +1 is untouched.
  if (s != 1 && uniform01(rng) < c.p_mw) s = s == 0 ? -1 : 0;
  // Optical pi pulse: 0 -> -1 or +1.
  if (s == 0) {
    const double u = uniform01(rng);
    if (u < c.p_opt) s = u < 0.5 * c.p_opt ? -1 : +1;
  }
  if (!c.echo_enabled) {
    acc += s * c.t_b;
  } else {
    acc += s * (0.5 * c.t_b);
    if (s != 1 && uniform01(rng) >= c.p_echo) s = s == 0 ? -1 : 0;
    acc += s * c.echo_second_half();
  }
  if (s != 0) acc += s * sample_reset_time(c.reset, rng);
  return c.a_par * acc + c.phase_offset;
}

/// Sample-averaged fidelity after n = 0..N trials.
struct FidelityCurve {
  std::vector<double> mean_f;
  std::vector<double> stderr_f;

  std::size_t n_trials() const { return mean_f.empty() ? 0 : mean_f.size() - 1; }
  /// Sample-averaged cos(Phi - mean Phi) at n.
  double mean_cos(std::size_t n) const { return 2.0 * mean_f.at(n) - 1.0; }
};

struct FidelityEstimate {
  double mean = 1.0;
  double stderr_ = 0.0;
};

namespace detail {

inline constexpr std::size_t kDephasingShards = 4;

// Cumulative phases reach 1e4-1e5 rad, where a double's spacing is ~1e-11.
// Extended precision keeps phi - mean accurate to well below 1e-12.
using PhaseSum = long double;

inline std::pair<std::size_t, std::size_t> shard_range(std::size_t shard, std::size_t shards, std::size_t k) {
  return {k * shard / shards, k * (shard + 1) / shards};
}

inline FidelityEstimate cos_moments_to_fidelity(double sum_cos, double sum_cos2, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double m = sum_cos / kk;
  const double var = std::max(0.0, (sum_cos2 / kk - m * m) * kk / (kk - 1.0));
  return {0.5 + 0.5 * m, 0.5 * std::sqrt(var / kk)};
}

}  // namespace detail

/// Full fidelity curve. Sample k uses stream derive_stream(seed, k); the
/// samples are split into a fixed number of shards, so the result does not
/// depend on `threads`. Two passes regenerate identical phase walks: the
/// first accumulates the mean phase per n, the second the cosine moments.
inline FidelityCurve run_ensemble(const DephasingConfig& c, std::uint64_t seed, unsigned threads = 1) {
  c.validate();
  const std::size_t N = c.n_trials, K = c.n_samples;
  const std::size_t shards = std::min(K, detail::kDephasingShards);

  auto pass_sum = [&](std::size_t shard) {
    std::vector<detail::PhaseSum> sum(N + 1, 0.0L);
    const auto [lo, hi] = detail::shard_range(shard, shards, K);
    for (std::size_t k = lo; k < hi; ++k) {
      Rng rng = derive_stream(seed, k);
      detail::PhaseSum phi = 0.0L;
      for (std::size_t n = 1; n <= N; ++n) {
        phi += run_trial(c, rng);
        sum[n] += phi;
      }
    }
    return sum;
  };
  std::vector<detail::PhaseSum> mean_phi(N + 1, 0.0L);
  for (const std::vector<detail::PhaseSum>& part : parallel_map(shards, threads, pass_sum))
    for (std::size_t n = 0; n <= N; ++n) mean_phi[n] += part[n];
  for (detail::PhaseSum& v : mean_phi) v /= static_cast<detail::PhaseSum>(K);

  struct Moments {
    std::vector<double> c1, c2;
  };
  auto pass_cos = [&](std::size_t shard) {
    Moments m{std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0)};
    const auto [lo, hi] = detail::shard_range(shard, shards, K);
    for (std::size_t k = lo; k < hi; ++k) {
      Rng rng = derive_stream(seed, k);
      detail::PhaseSum phi = 0.0L;
      m.c1[0] += 1.0;
      m.c2[0] += 1.0;
      for (std::size_t n = 1; n <= N; ++n) {
        phi += run_trial(c, rng);
        const double x = std::cos(static_cast<double>(phi - mean_phi[n]));
        m.c1[n] += x;
        m.c2[n] += x * x;
      }
    }
    return m;
  };
  std::vector<double> s1(N + 1, 0.0), s2(N + 1, 0.0);
  for (const Moments& part : parallel_map(shards, threads, pass_cos))
    for (std::size_t n = 0; n <= N; ++n) {
      s1[n] += part.c1[n];
      s2[n] += part.c2[n];
    }

  FidelityCurve curve;
  curve.mean_f.resize(N + 1);
  curve.stderr_f.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    const FidelityEstimate e = detail::cos_moments_to_fidelity(s1[n], s2[n], K);
    curve.mean_f[n] = e.mean;
    curve.stderr_f[n] = e.stderr_;
  }
  curve.mean_f[0] = 1.0;
  curve.stderr_f[0] = 0.0;
  return curve;
}

/// Fidelity after exactly N trials only (same streams as run_ensemble).
inline FidelityEstimate final_fidelity(const DephasingConfig& c, std::uint64_t seed, unsigned threads = 1) {
  c.validate();
  const std::size_t K = c.n_samples;
  const std::vector<detail::PhaseSum> phi = parallel_map(K, threads, [&](std::size_t k) {
    Rng rng = derive_stream(seed, k);
    detail::PhaseSum p = 0.0L;
    for (std::size_t n = 0; n < c.n_trials; ++n) p += run_trial(c, rng);
    return p;
  });
  detail::PhaseSum mean = 0.0L;
  for (detail::PhaseSum p : phi) mean += p;
  mean /= static_cast<detail::PhaseSum>(K);
  double s1 = 0.0, s2 = 0.0;
  for (detail::PhaseSum p : phi) {
    const double x = std::cos(static_cast<double>(p - mean));
    s1 += x;
    s2 += x * x;
  }
  return detail::cos_moments_to_fidelity(s1, s2, K);
}

/// First n at which the sample-averaged cosine drops below 1/e, linearly
/// interpolated between neighbouring trial counts. nullopt: not reached.
inline std::optional<double> decay_constant(const FidelityCurve& curve) {
  const double threshold = std::exp(-1.0);
  for (std::size_t n = 1; n <= curve.n_trials(); ++n) {
    const double hi = curve.mean_cos(n - 1), lo = curve.mean_cos(n);
    if (lo < threshold) {
      if (hi <= lo) return static_cast<double>(n);
      return static_cast<double>(n - 1) + (hi - threshold) / (hi - lo);
    }
  }
  return std::nullopt;
}

struct GridCell {
  double p_init = 0.0;
  double p_echo = 0.0;
  FidelityEstimate fidelity;
};

/// F(N) over a (p_init, p_echo) grid. Every cell reuses the same seed
/// (common random numbers), which keeps neighbouring cells comparable.
inline std::vector<GridCell> sweep_echo_grid(const DephasingConfig& base, std::span<const double> p_inits,
                                             std::span<const double> p_echos, std::uint64_t seed, unsigned threads = 1) {
  if (p_inits.empty() || p_echos.empty()) throw std::invalid_argument("sweep_echo_grid: empty grid");
  std::vector<GridCell> out;
  out.reserve(p_inits.size() * p_echos.size());
  for (double pi : p_inits)
    for (double pe : p_echos) {
      DephasingConfig c = base;
      c.p_init = pi;
      c.p_echo = pe;
      out.push_back({pi, pe, final_fidelity(c, seed, threads)});
    }
  return out;
}

}  // namespace qnetsim

#endif  // QNETSIM_DEPHASING_HPP

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

#ifndef QNETSIM_EXPERIMENTS_HPP
#define QNETSIM_EXPERIMENTS_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qnetsim/config.hpp"
#include "qnetsim/densmat.hpp"
#include "qnetsim/dephasing.hpp"
#include "qnetsim/network.hpp"
#include "qnetsim/parallel.hpp"
#include "qnetsim/protocols.hpp"
#include "qnetsim/pulse.hpp"
#include "qnetsim/rng.hpp"

namespace qnetsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitInvariant = 2 };

/// Shortest decimal text that parses back to exactly x.
inline std::string format_real(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

/// Minimal CSV writer; fields never contain separators.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (std::string_view c : cols) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
  }

  CsvWriter& field(double x) { return put(format_real(x)); }
  CsvWriter& field(std::uint64_t x) { return put(std::to_string(x)); }
  CsvWriter& field(std::string_view s) { return put(std::string(s)); }
  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& put(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }
  std::ostream& os_;
  bool first_ = true;
};

struct SampleStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return s;
}

/// Linear-interpolation quantile (q in [0, 1]).
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// p16, p50, p84: the central 68.2% interval and the median.
inline std::array<double, 3> duration_percentiles(const std::vector<double>& xs) {
  return {quantile(xs, 0.159), quantile(xs, 0.5), quantile(xs, 0.841)};
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct GhzRow {
  ProtocolOutcome outcome;
  double wall = 0.0;
};

inline void run_ghz_experiment(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const std::size_t reps = cfg.repetitions(1000);
  const std::vector<GhzRow> rows = parallel_map(reps, cfg.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    Network net(cfg.profile, 4, cfg.carbons);
    Rng rng = derive_stream(cfg.master_seed, i);
    GhzRow r{run_ghz(net, cfg.protocol, rng), 0.0};
    net.reg().validate();
    r.wall = seconds_since(t0);
    return r;
  });
  CsvWriter w(csv);
  w.header({"rep_index", "seed_stream", "protocol", "fidelity", "duration", "bell_pairs_used", "restarts", "wall_duration"});
  std::vector<double> f, d, pairs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ProtocolOutcome& o = rows[i].outcome;
    w.field(std::uint64_t{i}).field(stream_key(cfg.master_seed, i)).field(to_string(cfg.protocol)).field(o.fidelity);
    w.field(o.duration).field(std::uint64_t{o.bell_pairs_used}).field(std::uint64_t{o.restarts}).field(rows[i].wall).end();
    f.push_back(o.fidelity);
    d.push_back(o.duration);
    pairs.push_back(static_cast<double>(o.bell_pairs_used));
  }
  const SampleStats fs = sample_stats(f);
  const auto p = duration_percentiles(d);
  log << "ghz " << to_string(cfg.protocol) << ": reps=" << reps << " fidelity=" << format_real(fs.mean) << " +- "
      << format_real(fs.stderr_) << " duration p16/p50/p84=" << format_real(p[0]) << "/" << format_real(p[1]) << "/"
      << format_real(p[2]) << " s mean_pairs=" << format_real(sample_stats(pairs).mean) << '\n';
}

struct CnotRep {
  MetricPair metric;
  double duration = 0.0;
};

inline void run_cnot_sweep(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const std::size_t reps = cfg.repetitions(10000);
  CsvWriter w(csv);
  w.header({"rep_index", "seed_stream", "n_1e", "reps", "f_average", "f_average_stderr", "f_entanglement", "duration_p16",
            "duration_p50", "duration_p84", "wall_duration"});
  for (std::size_t j = 0; j < cfg.cnot_n_1e.size(); ++j) {
    const auto t0 = std::chrono::steady_clock::now();
    const double n = cfg.cnot_n_1e[j];
    const HardwareProfile prof = with_memory_lifetime(cfg.profile, n);
    // Every point reuses streams 0..reps-1.
    const std::vector<CnotRep> out = parallel_map(reps, cfg.threads, [&](std::size_t i) {
      Network net(prof, 2, 1);
      Rng rng = derive_stream(cfg.master_seed, i);
      CnotRep r{run_nonlocal_cnot(net, rng), 0.0};
      net.reg().validate();
      r.duration = net.clock();
      return r;
    });
    std::vector<double> fav, fe, d;
    for (const CnotRep& r : out) {
      fav.push_back(r.metric.f_average);
      fe.push_back(r.metric.f_entanglement);
      d.push_back(r.duration);
    }
    const SampleStats s = sample_stats(fav);
    const auto p = duration_percentiles(d);
    w.field(std::uint64_t{j}).field(stream_key(cfg.master_seed, 0)).field(n).field(std::uint64_t{reps}).field(s.mean);
    w.field(s.stderr_).field(sample_stats(fe).mean).field(p[0]).field(p[1]).field(p[2]).field(seconds_since(t0)).end();
    log << "cnot-sweep n_1e=" << format_real(n) << ": f_average=" << format_real(s.mean) << " +- " << format_real(s.stderr_) << '\n';
  }
}

/// Up to `points` log-spaced trial counts in [1, n_max], plus 0 and n_max.
inline std::vector<std::size_t> log_spaced_counts(std::size_t n_max, std::size_t points) {
  std::vector<std::size_t> out{0};
  if (points == 0 || points >= n_max) {
    for (std::size_t n = 1; n <= n_max; ++n) out.push_back(n);
    return out;
  }
  const double top = std::log(static_cast<double>(n_max));
  for (std::size_t k = 0; k < points; ++k) {
    const double x = points == 1 ? top : top * static_cast<double>(k) / static_cast<double>(points - 1);
    const auto n = static_cast<std::size_t>(std::llround(std::exp(x)));
    if (n > out.back()) out.push_back(std::min(n, n_max));
  }
  if (out.back() != n_max) out.push_back(n_max);
  return out;
}

inline DephasingConfig dephasing_for(const RunConfig& cfg) {
  DephasingConfig c = cfg.dephasing;
  if (cfg.reps) c.n_samples = *cfg.reps;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return c;
}

inline void run_dephasing(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const DephasingConfig c = dephasing_for(cfg);
  const FidelityCurve curve = run_ensemble(c, cfg.master_seed, cfg.threads);
  const double wall = seconds_since(t0);
  CsvWriter w(csv);
  w.header({"rep_index", "seed_stream", "n", "fidelity", "fidelity_stderr", "wall_duration"});
  const std::vector<std::size_t> ns = log_spaced_counts(c.n_trials, cfg.curve_points);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    w.field(std::uint64_t{j}).field(stream_key(cfg.master_seed, 0)).field(std::uint64_t{ns[j]});
    w.field(curve.mean_f[ns[j]]).field(curve.stderr_f[ns[j]]).field(wall).end();
  }
  const std::optional<double> tau = decay_constant(curve);
  log << "dephasing: F(" << c.n_trials << ")=" << format_real(curve.mean_f.back()) << " +- " << format_real(curve.stderr_f.back())
      << " decay_constant=" << (tau ? format_real(*tau) : std::string("not reached")) << '\n';
}

inline void run_dephasing_grid(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const DephasingConfig base = dephasing_for(cfg);
  CsvWriter w(csv);
  w.header({"rep_index", "seed_stream", "p_init", "p_echo", "fidelity", "fidelity_stderr", "wall_duration"});
  std::size_t j = 0;
  for (double pi : cfg.grid_p_init)
    for (double pe : cfg.grid_p_echo) {
      const auto t0 = std::chrono::steady_clock::now();
      const double one_i[] = {pi}, one_e[] = {pe};
      const GridCell cell = sweep_echo_grid(base, one_i, one_e, cfg.master_seed, cfg.threads).front();
      w.field(std::uint64_t{j++}).field(stream_key(cfg.master_seed, 0)).field(pi).field(pe);
      w.field(cell.fidelity.mean).field(cell.fidelity.stderr_).field(seconds_since(t0)).end();
      log << "dephasing-grid p_init=" << format_real(pi) << " p_echo=" << format_real(pe)
          << ": F=" << format_real(cell.fidelity.mean) << '\n';
    }
}

/// Norm drift beyond this is a broken propagator, not rounding.
inline constexpr double kMaxNormDrift = 1e-9;

inline void run_pulse(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  const PulseParameters& p = cfg.pulse;
  const std::size_t samples = cfg.repetitions(1000);
  const PulseTrajectory ideal = propagate(p, 0.0);
  if (ideal.max_norm_drift > kMaxNormDrift) throw InvariantViolation("pulse: state norm drifted");
  const auto peak = std::max_element(ideal.pm1_avg.begin(), ideal.pm1_avg.end());
  const double t_pi = ideal.t[static_cast<std::size_t>(peak - ideal.pm1_avg.begin())];
  struct Row {
    double delta, infidelity, wall;
  };
  const std::vector<Row> rows = parallel_map(samples, cfg.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const double delta = detuning_sample(p, cfg.master_seed, i);
    PulseParameters q = p;
    q.duration = t_pi;
    const PulseTrajectory tr = propagate(q, delta, static_cast<std::size_t>(-1));
    if (tr.max_norm_drift > kMaxNormDrift) throw InvariantViolation("pulse: state norm drifted");
    return Row{delta, 1.0 - tr.pm1_avg.back(), seconds_since(t0)};
  });
  CsvWriter w(csv);
  w.header({"rep_index", "seed_stream", "t_pi", "detuning_hz", "infidelity", "wall_duration"});
  std::vector<double> inf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.field(std::uint64_t{i}).field(stream_key(cfg.master_seed, i)).field(t_pi).field(rows[i].delta / kTwoPi);
    w.field(rows[i].infidelity).field(rows[i].wall).end();
    inf.push_back(rows[i].infidelity);
  }
  const SampleStats s = sample_stats(inf);
  log << "pulse: t_pi=" << format_real(t_pi) << " s infidelity=" << format_real(s.mean) << " +- " << format_real(s.stderr_)
      << " (sigma_f=" << format_real(p.sigma_f) << " Hz)\n";
}

}  // namespace detail

/// Runs cfg.experiment, writing CSV to `csv` and a human summary to `log`.
/// Throws ConfigError for bad configurations and InvariantViolation when a
/// state stops being a valid density matrix.
inline void run_experiment_or_throw(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  cfg.validate();
  if (cfg.experiment == "ghz") return detail::run_ghz_experiment(cfg, csv, log);
  if (cfg.experiment == "cnot-sweep") return detail::run_cnot_sweep(cfg, csv, log);
  if (cfg.experiment == "dephasing") return detail::run_dephasing(cfg, csv, log);
  if (cfg.experiment == "dephasing-grid") return detail::run_dephasing_grid(cfg, csv, log);
  if (cfg.experiment == "pulse") return detail::run_pulse(cfg, csv, log);
  throw ConfigError(0, "unknown experiment '" + cfg.experiment + "'");
}

/// As run_experiment_or_throw, mapping failures to exit codes.
inline int run_experiment(const RunConfig& cfg, std::ostream& csv, std::ostream& log) {
  try {
    run_experiment_or_throw(cfg, csv, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    log << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qnetsim

#endif  // QNETSIM_EXPERIMENTS_HPP

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

#ifndef QNETSIM_CONFIG_HPP
#define QNETSIM_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnetsim/dephasing.hpp"
#include "qnetsim/hardware.hpp"
#include "qnetsim/protocols.hpp"
#include "qnetsim/pulse.hpp"

namespace qnetsim {

/// Malformed or inconsistent configuration. line() is 0 when the problem is
/// not tied to a particular line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline constexpr std::string_view kExperiments[] = {"ghz", "cnot-sweep", "dephasing", "dephasing-grid", "pulse"};

inline bool is_experiment(std::string_view name) {
  for (std::string_view e : kExperiments)
    if (e == name) return true;
  return false;
}

struct RunConfig {
  std::string experiment;
  std::string profile_name = "purified";
  HardwareProfile profile = purified_profile();
  /// Repetitions (ghz, cnot-sweep per point), samples (dephasing, pulse).
  std::optional<std::size_t> reps;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  std::string out;

  GhzProtocol protocol = GhzProtocol::Plain;
  int carbons = 3;
  std::vector<double> cnot_n_1e{83333.0};

  std::string dephasing_preset = "no_echo";
  DephasingConfig dephasing = no_echo_config();
  std::size_t curve_points = 200;
  std::vector<double> grid_p_init{0.0, 0.01, 0.02, 0.03};
  std::vector<double> grid_p_echo{0.0, 0.01, 0.02, 0.03};

  PulseParameters pulse;

  std::size_t repetitions(std::size_t fallback) const { return reps.value_or(fallback); }

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// `allow_inf` admits "inf" (used for lifetimes: no decay).
inline double parse_real(std::string_view v, int line, std::string_view key, bool allow_inf = false) {
  v = trim(v);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || std::isnan(x) || (!allow_inf && std::isinf(x)))
    throw ConfigError(line, "key '" + std::string(key) + "' expects a real number, got '" + std::string(v) + "'");
  return x;
}

/// Counts accept exponent notation (1e6) as long as the value is integral.
inline std::size_t parse_count(std::string_view v, int line, std::string_view key) {
  const double x = parse_real(v, line, key);
  if (x < 0.0 || x != std::floor(x) || x > 9007199254740992.0)
    throw ConfigError(line, "key '" + std::string(key) + "' expects a non-negative integer, got '" + std::string(trim(v)) + "'");
  return static_cast<std::size_t>(x);
}

inline std::uint64_t parse_u64(std::string_view v, int line, std::string_view key) {
  v = trim(v);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(line, "key '" + std::string(key) + "' expects an unsigned 64-bit integer, got '" + std::string(v) + "'");
  return x;
}

inline bool parse_bool(std::string_view v, int line, std::string_view key) {
  v = trim(v);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, "key '" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> parse_list(std::string_view v, int line, std::string_view key) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.find(',', start);
    out.push_back(parse_real(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start), line, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry, std::less<>>;

}  // namespace detail

/// Parses flat `key = value` text with `[section]` headers. Keys before the
/// first header belong to [run]. '#' starts a comment.
inline RunConfig parse_config_text(std::string_view text) {
  using detail::Entry;
  using detail::trim;
  static const std::map<std::string, int, std::less<>> sections{
      {"run", 0}, {"hardware", 1}, {"protocols", 2}, {"dephasing", 3}, {"pulse", 4}};
  std::map<std::string, detail::Section, std::less<>> raw;
  std::string current = "run";
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(name)) throw ConfigError(line_no, "unknown section '" + name + "'");
      current = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (value.empty()) throw ConfigError(line_no, "missing value for key '" + key + "'");
    auto& sec = raw[current];
    if (sec.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = Entry{value, line_no};
  }

  RunConfig cfg;
  auto take = [&](std::string_view section, std::string_view key) -> std::optional<Entry> {
    auto s = raw.find(section);
    if (s == raw.end()) return std::nullopt;
    auto it = s->second.find(key);
    if (it == s->second.end()) return std::nullopt;
    Entry e = it->second;
    s->second.erase(it);
    return e;
  };
  using detail::parse_bool;
  using detail::parse_count;
  using detail::parse_list;
  using detail::parse_real;
  using detail::parse_u64;

  // [run]
  if (auto e = take("run", "experiment")) {
    if (!is_experiment(e->value)) throw ConfigError(e->line, "unknown experiment '" + e->value + "'");
    cfg.experiment = e->value;
  }
  if (auto e = take("run", "seed")) cfg.master_seed = parse_u64(e->value, e->line, "seed");
  if (auto e = take("run", "reps")) {
    cfg.reps = parse_count(e->value, e->line, "reps");
    if (*cfg.reps < 1) throw ConfigError(e->line, "reps must be at least 1");
  }
  if (auto e = take("run", "threads")) {
    const std::size_t t = parse_count(e->value, e->line, "threads");
    if (t < 1 || t > 4096) throw ConfigError(e->line, "threads must be in [1, 4096]");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (auto e = take("run", "out")) cfg.out = e->value;

  // [hardware]: preset first, then per-field overrides.
  if (auto e = take("hardware", "profile")) {
    auto p = profile_by_name(e->value);
    if (!p) throw ConfigError(e->line, "unknown profile '" + e->value + "' (expected purified or natural)");
    cfg.profile_name = e->value;
    cfg.profile = *p;
  }
  std::optional<double> n_1e;
  int n_1e_line = 0;
  if (auto e = take("hardware", "n_1e")) {
    n_1e = parse_real(e->value, e->line, "n_1e");
    n_1e_line = e->line;
    if (!(*n_1e > 0.0)) throw ConfigError(e->line, "n_1e must be positive");
  }
  for (const ProfileField& f : kProfileFields)
    if (auto e = take("hardware", f.name)) {
      cfg.profile.*f.member = parse_real(e->value, e->line, f.name, !f.probability);
      if (n_1e && (f.name == "t1n_re" || f.name == "t2n_re"))
        throw ConfigError(e->line, "n_1e and " + std::string(f.name) + " are mutually exclusive");
    }
  if (n_1e) {
    if (!(cfg.profile.t_re > 0.0)) throw ConfigError(n_1e_line, "n_1e requires t_re > 0");
    cfg.profile = with_memory_lifetime(cfg.profile, *n_1e);
  }

  // [protocols]
  if (auto e = take("protocols", "protocol")) {
    auto p = ghz_protocol_from_name(e->value);
    if (!p) throw ConfigError(e->line, "unknown protocol '" + e->value + "' (expected plain, modicum or expedient)");
    cfg.protocol = *p;
  }
  if (auto e = take("protocols", "carbons")) {
    const std::size_t c = parse_count(e->value, e->line, "carbons");
    if (c < 1 || c > static_cast<std::size_t>(QubitId::kMaxSlot)) throw ConfigError(e->line, "carbons must be in [1, 3]");
    cfg.carbons = static_cast<int>(c);
  }
  if (auto e = take("protocols", "cnot_n_1e")) {
    cfg.cnot_n_1e = parse_list(e->value, e->line, "cnot_n_1e");
    for (double n : cfg.cnot_n_1e)
      if (!(n > 0.0)) throw ConfigError(e->line, "cnot_n_1e values must be positive");
  }

  // [dephasing]
  if (auto e = take("dephasing", "preset")) {
    if (e->value == "no_echo") cfg.dephasing = no_echo_config();
    else if (e->value == "echo") cfg.dephasing = echo_config();
    else throw ConfigError(e->line, "unknown dephasing preset '" + e->value + "' (expected no_echo or echo)");
    cfg.dephasing_preset = e->value;
  }
  DephasingConfig& dc = cfg.dephasing;
  if (auto e = take("dephasing", "a_par_hz")) dc.a_par = kTwoPi * parse_real(e->value, e->line, "a_par_hz");
  const std::pair<std::string_view, double DephasingConfig::*> deph_reals[] = {
      {"p_init", &DephasingConfig::p_init}, {"p_mw", &DephasingConfig::p_mw},   {"p_opt", &DephasingConfig::p_opt},
      {"p_echo", &DephasingConfig::p_echo}, {"t_a", &DephasingConfig::t_a},     {"t_b", &DephasingConfig::t_b},
      {"phase_offset", &DephasingConfig::phase_offset}};
  for (const auto& [name, member] : deph_reals)
    if (auto e = take("dephasing", name)) dc.*member = parse_real(e->value, e->line, name);
  if (auto e = take("dephasing", "alpha")) dc.p_mw = p_mw_from_alpha(parse_real(e->value, e->line, "alpha"));
  if (auto e = take("dephasing", "echo")) dc.echo_enabled = parse_bool(e->value, e->line, "echo");
  if (auto e = take("dephasing", "n_trials")) dc.n_trials = parse_count(e->value, e->line, "n_trials");
  if (auto e = take("dephasing", "n_samples")) dc.n_samples = parse_count(e->value, e->line, "n_samples");
  if (auto e = take("dephasing", "reset")) {
    if (e->value == "two_timescale") dc.reset.kind = ResetModel::Kind::TwoTimescale;
    else if (e->value == "single") dc.reset.kind = ResetModel::Kind::SingleExponential;
    else throw ConfigError(e->line, "unknown reset model '" + e->value + "' (expected two_timescale or single)");
  }
  const std::pair<std::string_view, double ResetModel::*> reset_reals[] = {
      {"reset_a", &ResetModel::a},       {"reset_tau1", &ResetModel::tau1},
      {"reset_b", &ResetModel::b},       {"reset_tau2", &ResetModel::tau2},
      {"reset_mean", &ResetModel::single_mean}};
  for (const auto& [name, member] : reset_reals)
    if (auto e = take("dephasing", name)) dc.reset.*member = parse_real(e->value, e->line, name);
  if (auto e = take("dephasing", "curve_points")) cfg.curve_points = parse_count(e->value, e->line, "curve_points");
  if (auto e = take("dephasing", "grid_p_init")) cfg.grid_p_init = parse_list(e->value, e->line, "grid_p_init");
  if (auto e = take("dephasing", "grid_p_echo")) cfg.grid_p_echo = parse_list(e->value, e->line, "grid_p_echo");

  // [pulse]; frequencies in Hz, field in tesla.
  PulseParameters& pp = cfg.pulse;
  const std::pair<std::string_view, double PulseParameters::*> pulse_hz[] = {
      {"d_hz", &PulseParameters::d}, {"q_hz", &PulseParameters::q}, {"a_par_hz", &PulseParameters::a_par},
      {"omega_hz", &PulseParameters::omega}};
  for (const auto& [name, member] : pulse_hz)
    if (auto e = take("pulse", name)) pp.*member = kTwoPi * parse_real(e->value, e->line, name);
  if (auto e = take("pulse", "b_z")) pp.gamma_n_bz = kTwoPi * kGammaN14 * parse_real(e->value, e->line, "b_z");
  if (auto e = take("pulse", "sigma_f")) pp.sigma_f = parse_real(e->value, e->line, "sigma_f");
  if (auto e = take("pulse", "duration")) pp.duration = parse_real(e->value, e->line, "duration");
  if (auto e = take("pulse", "dt")) pp.dt = parse_real(e->value, e->line, "dt");
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string name = "phase" + std::to_string(k + 1);
    if (auto e = take("pulse", name)) pp.phases[k] = parse_real(e->value, e->line, name);
  }

  for (const auto& [section, entries] : raw)
    if (!entries.empty()) {
      const auto& [key, entry] = *entries.begin();
      throw ConfigError(entry.line, "unknown key '" + key + "' in [" + section + "]");
    }
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline void RunConfig::validate() const {
  try {
    profile.validate();
    dephasing.validate();
    pulse.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (reps && *reps < 1) throw ConfigError(0, "reps must be at least 1");
  if (carbons < required_carbons(protocol))
    throw ConfigError(0, "protocol " + std::string(to_string(protocol)) + " needs " + std::to_string(required_carbons(protocol)) +
                             " carbons per node");
  if (cnot_n_1e.empty()) throw ConfigError(0, "cnot_n_1e must not be empty");
  if (grid_p_init.empty() || grid_p_echo.empty()) throw ConfigError(0, "dephasing grid lists must not be empty");
  for (double p : grid_p_init)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(0, "grid_p_init values must be probabilities");
  for (double p : grid_p_echo)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(0, "grid_p_echo values must be probabilities");
}

}  // namespace qnetsim

#endif  // QNETSIM_CONFIG_HPP

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

#ifndef QNETSIM_HARDWARE_HPP
#define QNETSIM_HARDWARE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qnetsim/noise.hpp"

namespace qnetsim {

/// Error probabilities, durations (s) and decoherence times (s) of a node.
struct HardwareProfile {
  double p_g = 0.01;
  double p_m = 0.01;
  double p_n = 0.1;
  double p_re = 1e-4;
  double t_meas = 4.0e-6;
  double t_re = 6.0e-6;

  double te_x = 0.14e-6;
  double te_y = 0.14e-6;
  double te_z = 0.10e-6;
  double te_h = 0.10e-6;

  double tc_x = 13e-3;
  double tc_y = 13e-3;
  double tc_z = 6.5e-3;
  double tc_h = 6.5e-3;

  double t_cnot = 25e-3;
  double t_cz = 25e-3;
  double t_swap = 75e-3;

  double t1n_idle = 300.0;
  double t2n_idle = 10.0;
  double t1n_re = 1.2;
  double t2n_re = 1.2;
  double t2e_idle = 1.0;

  double dd_tau = 2500 * 6.0e-6;
  double dd_pi = 13e-3;

  DecoherencePair carbon_idle() const { return {t1n_idle, t2n_idle}; }
  DecoherencePair carbon_re() const { return {t1n_re, t2n_re}; }
  DecoherencePair electron_idle() const { return {kInfiniteTime, t2e_idle}; }
  double dd_period() const { return 2.0 * dd_tau + dd_pi; }

  /// Throws std::invalid_argument if a probability or duration is out of range.
  void validate() const;
};

struct ProfileField {
  std::string_view name;
  double HardwareProfile::*member;
  bool probability;
};

/// Config-file names of every profile parameter.
inline constexpr std::array<ProfileField, 24> kProfileFields{{
    {"p_g", &HardwareProfile::p_g, true},
    {"p_m", &HardwareProfile::p_m, true},
    {"p_n", &HardwareProfile::p_n, true},
    {"p_re", &HardwareProfile::p_re, true},
    {"t_meas", &HardwareProfile::t_meas, false},
    {"t_re", &HardwareProfile::t_re, false},
    {"te_x", &HardwareProfile::te_x, false},
    {"te_y", &HardwareProfile::te_y, false},
    {"te_z", &HardwareProfile::te_z, false},
    {"te_h", &HardwareProfile::te_h, false},
    {"tc_x", &HardwareProfile::tc_x, false},
    {"tc_y", &HardwareProfile::tc_y, false},
    {"tc_z", &HardwareProfile::tc_z, false},
    {"tc_h", &HardwareProfile::tc_h, false},
    {"t_cnot", &HardwareProfile::t_cnot, false},
    {"t_cz", &HardwareProfile::t_cz, false},
    {"t_swap", &HardwareProfile::t_swap, false},
    {"t1n_idle", &HardwareProfile::t1n_idle, false},
    {"t2n_idle", &HardwareProfile::t2n_idle, false},
    {"t1n_re", &HardwareProfile::t1n_re, false},
    {"t2n_re", &HardwareProfile::t2n_re, false},
    {"t2e_idle", &HardwareProfile::t2e_idle, false},
    {"dd_tau", &HardwareProfile::dd_tau, false},
    {"dd_pi", &HardwareProfile::dd_pi, false},
}};

inline std::optional<ProfileField> find_profile_field(std::string_view name) {
  for (const ProfileField& f : kProfileFields)
    if (f.name == name) return f;
  return std::nullopt;
}

inline void HardwareProfile::validate() const {
  for (const ProfileField& f : kProfileFields) {
    const double v = this->*f.member;
    if (f.probability ? !(v >= 0.0 && v <= 1.0) : !(v >= 0.0))
      throw std::invalid_argument("hardware profile: parameter " + std::string(f.name) + " out of range");
  }
  if (std::abs(t_swap - 3.0 * t_cnot) > 1e-12 * std::max(1.0, t_swap))
    throw std::invalid_argument("hardware profile: t_swap must equal 3 * t_cnot");
  for (const DecoherencePair& p : {carbon_idle(), carbon_re(), electron_idle()}) effective_t2bar(p);
}

/// General parameters plus the 0.01% 13C device (purified sample).
inline HardwareProfile purified_profile() { return HardwareProfile{}; }

/// General parameters plus the 1.1% 13C device (natural abundance).
inline HardwareProfile natural_profile() {
  HardwareProfile p;
  p.tc_x = 1.0e-3;
  p.tc_y = 1.0e-3;
  p.tc_z = 0.5e-3;
  p.tc_h = 0.5e-3;
  p.t_cnot = 0.5e-3;
  p.t_cz = 0.5e-3;
  p.t_swap = 1.5e-3;
  p.t1n_idle = 300.0;
  p.t2n_idle = 10.0;
  p.t1n_re = 0.03;
  p.t2n_re = 0.012;
  p.t2e_idle = 1.0;
  p.dd_tau = 250 * p.t_re;
  p.dd_pi = 1.0e-3;
  return p;
}

inline std::optional<HardwareProfile> profile_by_name(std::string_view name) {
  if (name == "purified") return purified_profile();
  if (name == "natural") return natural_profile();
  return std::nullopt;
}

/// Noise-free, zero-duration profile with deterministic links.
inline HardwareProfile ideal_profile() {
  HardwareProfile p;
  for (const ProfileField& f : kProfileFields) p.*f.member = 0.0;
  p.p_re = 1.0;
  p.t1n_idle = p.t2n_idle = p.t1n_re = p.t2n_re = p.t2e_idle = kInfiniteTime;
  return p;
}

/// Sets T1 = T2 = n_1e * t_re for carbons during remote entanglement.
inline HardwareProfile with_memory_lifetime(HardwareProfile p, double n_1e) {
  p.t1n_re = n_1e * p.t_re;
  p.t2n_re = n_1e * p.t_re;
  return p;
}

}  // namespace qnetsim

#endif  // QNETSIM_HARDWARE_HPP

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

#ifndef QNETSIM_DENSMAT_HPP
#define QNETSIM_DENSMAT_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnetsim/rng.hpp"

namespace qnetsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised when a numerical invariant (trace, Hermiticity, positivity,
/// unitarity, Kraus completeness) is breached beyond tolerance.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Slot 0 is the communication qubit of a node, slots 1..3 are carbons.
struct QubitId {
  int node = 0;
  int slot = 0;

  static constexpr int kMaxSlot = 3;

  friend auto operator<=>(const QubitId&, const QubitId&) = default;
};

inline std::string to_string(const QubitId& q) {
  return "(" + std::to_string(q.node) + "," + std::to_string(q.slot) + ")";
}

/// Dense density matrix over an ordered list of qubits. qubits[0] is the most
/// significant bit of the basis index.
struct Factor {
  std::vector<QubitId> qubits;
  Matrix rho;

  int size() const { return static_cast<int>(qubits.size()); }
};

namespace detail {

inline constexpr double kTol = 1e-10;
inline constexpr double kDegenerateBranch = 1e-15;

inline int bit_position(int n_qubits, int index_in_factor) { return n_qubits - 1 - index_in_factor; }

/// Basis indices of the 2^k sub-block addressed by `positions` (MSB first)
/// with the remaining bits fixed to `base`.
inline void gather_indices(std::uint64_t base, std::span<const int> positions, std::vector<std::uint64_t>& out) {
  const std::size_t k = positions.size();
  const std::size_t n = std::size_t{1} << k;
  out.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::uint64_t idx = base;
    for (std::size_t j = 0; j < k; ++j) {
      if ((a >> (k - 1 - j)) & 1U) idx |= std::uint64_t{1} << positions[j];
    }
    out[a] = idx;
  }
}

inline std::uint64_t mask_of(std::span<const int> positions) {
  std::uint64_t mask = 0;
  for (int p : positions) mask |= std::uint64_t{1} << p;
  return mask;
}

/// m <- (op on positions) * m.
inline void apply_left(Matrix& m, std::span<const int> positions, const Matrix& op) {
  const std::uint64_t dim = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t mask = mask_of(positions);
  const Eigen::Index n = op.rows();
  std::vector<std::uint64_t> idx;
  Vector v(n);
  Vector w(n);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    gather_indices(base, positions, idx);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index a = 0; a < n; ++a) v(a) = m(static_cast<Eigen::Index>(idx[a]), c);
      w.noalias() = op * v;
      for (Eigen::Index a = 0; a < n; ++a) m(static_cast<Eigen::Index>(idx[a]), c) = w(a);
    }
  }
}

/// Returns op * rho * op^dagger for Hermitian rho.
inline Matrix sandwich(const Matrix& rho, std::span<const int> positions, const Matrix& op) {
  Matrix t = rho;
  apply_left(t, positions, op);
  Matrix u = t.adjoint();
  apply_left(u, positions, op);
  return u;
}

inline void hermitize(Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  m.swap(h);
}

/// Kronecker product a (x) b, with a on the most significant bits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Reduced state over `keep` (factor-local indices, in the order given).
inline Matrix partial_trace_keep(const Matrix& rho, int n_qubits, std::span<const int> keep) {
  std::vector<int> keep_pos;
  keep_pos.reserve(keep.size());
  for (int i : keep) keep_pos.push_back(bit_position(n_qubits, i));
  std::vector<int> traced_pos;
  for (int i = 0; i < n_qubits; ++i) {
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced_pos.push_back(bit_position(n_qubits, i));
  }
  const std::uint64_t dk = std::uint64_t{1} << keep.size();
  const std::uint64_t dt = std::uint64_t{1} << traced_pos.size();
  auto compose = [&](std::uint64_t a, std::uint64_t r) {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < keep_pos.size(); ++j)
      if ((a >> (keep_pos.size() - 1 - j)) & 1U) idx |= std::uint64_t{1} << keep_pos[j];
    for (std::size_t j = 0; j < traced_pos.size(); ++j)
      if ((r >> j) & 1U) idx |= std::uint64_t{1} << traced_pos[j];
    return static_cast<Eigen::Index>(idx);
  };
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::uint64_t a = 0; a < dk; ++a)
    for (std::uint64_t b = 0; b < dk; ++b) {
      cplx s = 0.0;
      for (std::uint64_t r = 0; r < dt; ++r) s += rho(compose(a, r), compose(b, r));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
    }
  return out;
}

/// Reorders qubits: output qubit j is input qubit perm[j].
inline Matrix permute_qubits(const Matrix& m, std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  const Eigen::Index dim = m.rows();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index out = 0; out < dim; ++out) {
    Eigen::Index in = 0;
    for (int j = 0; j < n; ++j) {
      if ((out >> (n - 1 - j)) & 1) in |= Eigen::Index{1} << (n - 1 - perm[static_cast<std::size_t>(j)]);
    }
    map[static_cast<std::size_t>(out)] = in;
  }
  Matrix r(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) r(i, j) = m(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  return r;
}

}  // namespace detail

/// 4x4 Liouville representation of a single-qubit channel acting on the
/// row-major vectorised 2x2 block [b00, b01, b10, b11].
using SuperOp = Eigen::Matrix4cd;

inline SuperOp superop_from_kraus(std::span<const Matrix> kraus) {
  SuperOp s = SuperOp::Zero();
  for (const Matrix& k : kraus)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) s(2 * i + j, 2 * a + b) += k(i, a) * std::conj(k(j, b));
  return s;
}

/// Global state as a set of disjoint dense factors. Two-qubit operations
/// merge the factors they span; measurement and discard shrink them.
class FactoredRegister {
 public:
  void allocate_qubit(QubitId id, const Eigen::Vector2cd& amplitudes) {
    if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-12)
      throw std::invalid_argument("allocate_qubit: amplitudes not normalized for " + to_string(id));
    Matrix rho = amplitudes * amplitudes.adjoint();
    allocate_state(std::vector<QubitId>{id}, rho);
  }

  /// Allocates a group of qubits jointly in the given mixed state.
  void allocate_state(const std::vector<QubitId>& ids, const Matrix& rho) {
    const Eigen::Index dim = Eigen::Index{1} << ids.size();
    if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("allocate_state: dimension mismatch");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (contains(ids[i])) throw std::invalid_argument("allocate: duplicate qubit " + to_string(ids[i]));
      if (ids[i].slot < 0 || ids[i].slot > QubitId::kMaxSlot) throw std::invalid_argument("allocate: slot out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (ids[i] == ids[j]) throw std::invalid_argument("allocate: duplicate qubit " + to_string(ids[i]));
    }
    check_state(rho, "allocate_state");
    factors_.push_back(Factor{ids, rho});
    for (const QubitId& q : ids) index_[q] = factors_.size() - 1;
  }

  bool contains(QubitId q) const { return index_.count(q) != 0; }
  std::size_t qubit_count() const { return index_.size(); }
  std::size_t factor_count() const { return factors_.size(); }
  const std::vector<Factor>& factors() const { return factors_; }

  std::vector<QubitId> qubits() const {
    std::vector<QubitId> out;
    out.reserve(index_.size());
    for (const auto& [q, f] : index_) out.push_back(q);
    return out;
  }

  const Factor& factor_of(QubitId q) const { return factors_[owner(q)]; }

  /// Applies a unitary on 1..3 qubits (qubits[0] is the operator's MSB).
  void apply_unitary(std::span<const QubitId> qs, const Matrix& u) {
    check_arity(qs, u, "apply_unitary");
    const Eigen::Index d = u.rows();
    if ((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > detail::kTol)
      throw InvariantViolation("apply_unitary: matrix is not unitary");
    const std::size_t f = merge(qs);
    Factor& fac = factors_[f];
    const auto pos = positions(fac, qs);
    fac.rho = detail::sandwich(fac.rho, pos, u);
  }

  /// Applies a CPTP map given by Kraus operators on 1..3 qubits.
  void apply_channel(std::span<const QubitId> qs, std::span<const Matrix> kraus) {
    if (kraus.empty()) throw std::invalid_argument("apply_channel: empty Kraus set");
    check_arity(qs, kraus.front(), "apply_channel");
    const Eigen::Index d = kraus.front().rows();
    Matrix completeness = Matrix::Zero(d, d);
    for (const Matrix& k : kraus) {
      if (k.rows() != d || k.cols() != d) throw std::invalid_argument("apply_channel: inconsistent Kraus dimensions");
      completeness += k.adjoint() * k;
    }
    if ((completeness - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > detail::kTol)
      throw InvariantViolation("apply_channel: incomplete Kraus set");
    if (qs.size() == 1) {
      apply_superop(qs.front(), superop_from_kraus(kraus));
      return;
    }
    const std::size_t f = merge(qs);
    Factor& fac = factors_[f];
    const auto pos = positions(fac, qs);
    Matrix out = Matrix::Zero(fac.rho.rows(), fac.rho.cols());
    for (const Matrix& k : kraus) out += detail::sandwich(fac.rho, pos, k);
    detail::hermitize(out);
    fac.rho.swap(out);
    check_trace(fac, "apply_channel");
  }

  /// Single-qubit channel in Liouville form. Does not re-verify complete
  /// positivity; callers build `s` from a checked Kraus set.
  void apply_superop(QubitId q, const SuperOp& s) {
    Factor& fac = factors_[owner(q)];
    const int n = fac.size();
    const int b = detail::bit_position(n, local_index(fac, q));
    const std::uint64_t bit = std::uint64_t{1} << b;
    const std::uint64_t dim = static_cast<std::uint64_t>(fac.rho.rows());
    Eigen::Vector4cd v;
    for (std::uint64_t r = 0; r < dim; ++r) {
      if (r & bit) continue;
      for (std::uint64_t c = 0; c < dim; ++c) {
        if (c & bit) continue;
        const auto r0 = static_cast<Eigen::Index>(r), r1 = static_cast<Eigen::Index>(r | bit);
        const auto c0 = static_cast<Eigen::Index>(c), c1 = static_cast<Eigen::Index>(c | bit);
        v << fac.rho(r0, c0), fac.rho(r0, c1), fac.rho(r1, c0), fac.rho(r1, c1);
        const Eigen::Vector4cd w = s * v;
        fac.rho(r0, c0) = w(0);
        fac.rho(r0, c1) = w(1);
        fac.rho(r1, c0) = w(2);
        fac.rho(r1, c1) = w(3);
      }
    }
  }

  /// rho <- (1 - 16p/15) rho + (4p/15) I_4 (x) Tr_{q1,q2}(rho): the uniform
  /// mixture over the 15 non-identity two-qubit Pauli products.
  void depolarize_pair(QubitId q1, QubitId q2, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarize_pair: probability out of range");
    const std::vector<QubitId> qs{q1, q2};
    const std::size_t f = merge(qs);
    Factor& fac = factors_[f];
    const auto pos = positions(fac, qs);
    const std::uint64_t mask = detail::mask_of(pos);
    const std::uint64_t dim = static_cast<std::uint64_t>(fac.rho.rows());
    const double keep = 1.0 - 16.0 * p / 15.0;
    const double mix = 4.0 * p / 15.0;
    std::vector<std::uint64_t> ri, ci;
    for (std::uint64_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      detail::gather_indices(r, pos, ri);
      for (std::uint64_t c = 0; c < dim; ++c) {
        if (c & mask) continue;
        detail::gather_indices(c, pos, ci);
        cplx tr = 0.0;
        for (int a = 0; a < 4; ++a) tr += fac.rho(static_cast<Eigen::Index>(ri[a]), static_cast<Eigen::Index>(ci[a]));
        for (int a = 0; a < 4; ++a)
          for (int bb = 0; bb < 4; ++bb) {
            cplx& e = fac.rho(static_cast<Eigen::Index>(ri[a]), static_cast<Eigen::Index>(ci[bb]));
            e = keep * e + (a == bb ? mix * tr : cplx{0.0});
          }
      }
    }
  }

  /// Probability of outcome 0 for a Z measurement of q.
  double prob_zero(QubitId q) const {
    const Factor& fac = factors_[owner(q)];
    const int b = detail::bit_position(fac.size(), local_index(fac, q));
    double p0 = 0.0;
    for (Eigen::Index i = 0; i < fac.rho.rows(); ++i)
      if (((i >> b) & 1) == 0) p0 += fac.rho(i, i).real();
    return p0;
  }

  /// Projects q onto |outcome>, renormalizes, and splits q into its own
  /// factor. Throws on a branch with probability below 1e-15.
  void project_z(QubitId q, int outcome) {
    const double p0 = prob_zero(q);
    const double p = outcome == 0 ? p0 : 1.0 - p0;
    if (p < detail::kDegenerateBranch)
      throw InvariantViolation("project_z: degenerate measurement branch on " + to_string(q));
    const std::size_t f = owner(q);
    Factor& fac = factors_[f];
    const int n = fac.size();
    const int li = local_index(fac, q);
    const int b = detail::bit_position(n, li);
    if (n == 1) {
      fac.rho = Matrix::Zero(2, 2);
      fac.rho(outcome, outcome) = 1.0;
      return;
    }
    const Eigen::Index half = fac.rho.rows() / 2;
    auto expand = [&](Eigen::Index i) {
      const Eigen::Index low = i & ((Eigen::Index{1} << b) - 1);
      const Eigen::Index high = (i >> b) << (b + 1);
      return high | (Eigen::Index{outcome} << b) | low;
    };
    Matrix sub(half, half);
    for (Eigen::Index i = 0; i < half; ++i)
      for (Eigen::Index j = 0; j < half; ++j) sub(i, j) = fac.rho(expand(i), expand(j));
    sub /= p;
    fac.rho.swap(sub);
    fac.qubits.erase(fac.qubits.begin() + li);
    Matrix single = Matrix::Zero(2, 2);
    single(outcome, outcome) = 1.0;
    factors_.push_back(Factor{{q}, single});
    index_[q] = factors_.size() - 1;
  }

  /// Samples a Z outcome from the diagonal marginal and projects.
  template <class Gen>
  int measure_z(QubitId q, Gen& rng) {
    const double p0 = prob_zero(q);
    const int outcome = uniform01(rng) < p0 ? 0 : 1;
    project_z(q, outcome);
    return outcome;
  }

  /// Partial-traces q out of its factor and deallocates it.
  void discard(QubitId q) {
    const std::size_t f = owner(q);
    Factor& fac = factors_[f];
    const int li = local_index(fac, q);
    if (fac.size() == 1) {
      remove_factor(f);
    } else {
      std::vector<int> keep;
      for (int i = 0; i < fac.size(); ++i)
        if (i != li) keep.push_back(i);
      fac.rho = detail::partial_trace_keep(fac.rho, fac.size(), keep);
      fac.qubits.erase(fac.qubits.begin() + li);
    }
    index_.erase(q);
  }

  /// Reduced density matrix of `qs`, in that order (qs[0] is the MSB).
  Matrix reduced_state(std::span<const QubitId> qs) const {
    std::vector<std::size_t> order;  // distinct owning factors, first-seen order
    for (const QubitId& q : qs) {
      const std::size_t f = owner(q);
      if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
    }
    Matrix combined = Matrix::Identity(1, 1);
    std::vector<QubitId> grouped;
    for (std::size_t f : order) {
      const Factor& fac = factors_[f];
      std::vector<int> keep;
      for (const QubitId& q : qs) {
        if (owner(q) != f) continue;
        if (std::count(qs.begin(), qs.end(), q) != 1) throw std::invalid_argument("reduced_state: repeated qubit");
        keep.push_back(local_index(fac, q));
        grouped.push_back(q);
      }
      combined = detail::kron(combined, detail::partial_trace_keep(fac.rho, fac.size(), keep));
    }
    std::vector<int> perm(qs.size());
    for (std::size_t j = 0; j < qs.size(); ++j)
      perm[j] = static_cast<int>(std::find(grouped.begin(), grouped.end(), qs[j]) - grouped.begin());
    return detail::permute_qubits(combined, perm);
  }

  /// <target| rho_reduced |target> with target ordered like `qs`.
  double fidelity_pure(std::span<const QubitId> qs, const Vector& target) const {
    const Eigen::Index dim = Eigen::Index{1} << qs.size();
    if (target.size() != dim) throw std::invalid_argument("fidelity_pure: dimension mismatch");
    if (std::abs(target.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("fidelity_pure: target not normalized");
    const Matrix r = reduced_state(qs);
    return (target.adjoint() * r * target)(0, 0).real();
  }

  /// Verifies trace, Hermiticity and positivity of every factor.
  void validate(double tol = detail::kTol) const {
    for (const Factor& f : factors_) check_state(f.rho, "validate", tol);
  }

 private:
  std::size_t owner(QubitId q) const {
    auto it = index_.find(q);
    if (it == index_.end()) throw std::invalid_argument("qubit not allocated: " + to_string(q));
    return it->second;
  }

  static int local_index(const Factor& fac, QubitId q) {
    return static_cast<int>(std::find(fac.qubits.begin(), fac.qubits.end(), q) - fac.qubits.begin());
  }

  static std::vector<int> positions(const Factor& fac, std::span<const QubitId> qs) {
    std::vector<int> pos;
    pos.reserve(qs.size());
    for (const QubitId& q : qs) pos.push_back(detail::bit_position(fac.size(), local_index(fac, q)));
    return pos;
  }

  void check_arity(std::span<const QubitId> qs, const Matrix& op, const char* what) const {
    if (qs.empty() || qs.size() > 3) throw std::invalid_argument(std::string(what) + ": expects 1..3 qubits");
    if (op.rows() != (Eigen::Index{1} << qs.size()) || op.cols() != op.rows())
      throw std::invalid_argument(std::string(what) + ": operator dimension mismatch");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      owner(qs[i]);
      for (std::size_t j = 0; j < i; ++j)
        if (qs[i] == qs[j]) throw std::invalid_argument(std::string(what) + ": repeated qubit");
    }
  }

  /// Merges the factors owning `qs` into one and returns its index.
  std::size_t merge(std::span<const QubitId> qs) {
    std::size_t target = owner(qs.front());
    for (std::size_t i = 1; i < qs.size(); ++i) {
      const std::size_t other = owner(qs[i]);
      if (other == target) continue;
      Factor& a = factors_[target];
      Factor& b = factors_[other];
      a.rho = detail::kron(a.rho, b.rho);
      a.qubits.insert(a.qubits.end(), b.qubits.begin(), b.qubits.end());
      for (const QubitId& q : b.qubits) index_[q] = target;
      const std::size_t last = factors_.size() - 1;
      remove_factor(other);
      if (target == last) target = other;
    }
    return target;
  }

  void remove_factor(std::size_t f) {
    const std::size_t last = factors_.size() - 1;
    if (f != last) {
      factors_[f] = std::move(factors_[last]);
      for (const QubitId& q : factors_[f].qubits) index_[q] = f;
    }
    factors_.pop_back();
  }

  static void check_trace(const Factor& f, const char* what) {
    if (std::abs(f.rho.trace() - cplx{1.0}) > detail::kTol) throw InvariantViolation(std::string(what) + ": trace not preserved");
  }

  static void check_state(const Matrix& rho, const char* what, double tol = detail::kTol) {
    if (std::abs(rho.trace() - cplx{1.0}) > tol) throw InvariantViolation(std::string(what) + ": trace deviates from 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw InvariantViolation(std::string(what) + ": not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw InvariantViolation(std::string(what) + ": negative eigenvalue");
  }

  std::vector<Factor> factors_;
  std::map<QubitId, std::size_t> index_;
};

}  // namespace qnetsim

#endif  // QNETSIM_DENSMAT_HPP

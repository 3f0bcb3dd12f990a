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

#ifndef QNETSIM_GATES_HPP
#define QNETSIM_GATES_HPP

#include <cmath>
#include <initializer_list>

#include "qnetsim/densmat.hpp"

namespace qnetsim::gates {

inline Matrix make(int dim, std::initializer_list<cplx> row_major) {
  Matrix m(dim, dim);
  auto it = row_major.begin();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = *it++;
  return m;
}

inline const Matrix& I() {
  static const Matrix m = make(2, {1, 0, 0, 1});
  return m;
}
inline const Matrix& X() {
  static const Matrix m = make(2, {0, 1, 1, 0});
  return m;
}
inline const Matrix& Y() {
  static const Matrix m = make(2, {0, cplx{0, -1}, cplx{0, 1}, 0});
  return m;
}
inline const Matrix& Z() {
  static const Matrix m = make(2, {1, 0, 0, -1});
  return m;
}
inline const Matrix& H() {
  static const double s = 1.0 / std::sqrt(2.0);
  static const Matrix m = make(2, {s, s, s, -s});
  return m;
}
/// Control is the first (most significant) qubit.
inline const Matrix& CNOT() {
  static const Matrix m = make(4, {1, 0, 0, 0,  //
                                   0, 1, 0, 0,  //
                                   0, 0, 0, 1,  //
                                   0, 0, 1, 0});
  return m;
}
inline const Matrix& CZ() {
  static const Matrix m = make(4, {1, 0, 0, 0,  //
                                   0, 1, 0, 0,  //
                                   0, 0, 1, 0,  //
                                   0, 0, 0, -1});
  return m;
}
inline const Matrix& SWAP() {
  static const Matrix m = make(4, {1, 0, 0, 0,  //
                                   0, 0, 1, 0,  //
                                   0, 1, 0, 0,  //
                                   0, 0, 0, 1});
  return m;
}

/// Pauli by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
inline const Matrix& pauli(int k) {
  switch (k) {
    case 1: return X();
    case 2: return Y();
    case 3: return Z();
    default: return I();
  }
}

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
inline Vector ghz(int n) {
  Vector v = Vector::Zero(Eigen::Index{1} << n);
  v(0) = 1.0 / std::sqrt(2.0);
  v(v.size() - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace qnetsim::gates

#endif  // QNETSIM_GATES_HPP

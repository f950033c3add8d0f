/**
 * Copyright 2026 The hetcv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <random>

#include "hetcv/fock.hpp"

namespace hetcv {

// Haar-distributed pure state on {|0>, ..., |E>}.
template <class Engine>
FockVector random_fock_vector(int cutoff, Engine& rng) {
  std::normal_distribution<double> g;
  CVector v(cutoff + 1);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return FockVector::normalized(v);
}

// Ginibre-type random density matrix G G^dagger / Tr of the given rank
// (rank <= 0 means full rank).
template <class Engine>
DensityMatrix random_density_matrix(int cutoff, Engine& rng, int rank = 0) {
  std::normal_distribution<double> g;
  const int dim = cutoff + 1;
  const int r = rank <= 0 ? dim : std::min(rank, dim);
  CMatrix gin(dim, r);
  for (Eigen::Index i = 0; i < gin.size(); ++i) gin.data()[i] = cplx(g(rng), g(rng));
  CMatrix m = gin * gin.adjoint();
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

// Random complex operator with standard-normal entries.
template <class Engine>
FockOperator random_operator(int cutoff, Engine& rng) {
  std::normal_distribution<double> g;
  CMatrix m(cutoff + 1, cutoff + 1);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(g(rng), g(rng));
  return FockOperator(std::move(m));
}

}  // namespace hetcv

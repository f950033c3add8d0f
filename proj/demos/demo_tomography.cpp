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

// Tomography of a lossy superposition of |0> and |1>.

#include <cstdio>

#include "hetcv/fock.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/tomography.hpp"

int main() {
  using namespace hetcv;
  const auto plus = FockVector::normalized(CVector::Ones(2));
  const DensityMatrix rho = apply_loss(DensityMatrix::pure(plus), 0.9);

  const double eps = 0.1;
  const double eps_prime = 0.1;
  const std::size_t n = 200000;
  const SampleList samples = sample_q(rho, n, 2026);
  const TomographyReport rep = tomography_run(samples, 1, eps, eps_prime);

  std::printf("n = %zu, radius = %.3f, failure bound = %.3g\n", n, rep.confidence_radius,
              rep.failure_probability());
  for (int k = 0; k <= 1; ++k)
    for (int l = 0; l <= 1; ++l)
      std::printf("rho[%d][%d] true % .4f%+.4fi  estimate % .4f%+.4fi\n", k, l, rho(k, l).real(),
                  rho(k, l).imag(), rep.estimates(k, l).real(), rep.estimates(k, l).imag());
  std::printf("samples needed for a 5%% guarantee: %lld\n",
              static_cast<long long>(required_samples_tomography(1, eps, eps_prime, 0.05)));
}

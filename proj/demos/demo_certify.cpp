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

// Certify the vacuum against an honest and a dishonest source.

#include <cstdio>

#include "hetcv/certify.hpp"
#include "hetcv/heterodyne.hpp"

int main() {
  using namespace hetcv;
  const int E = 20;
  const auto psi = FockVector::basis(0, 0);
  CertificationParams p;
  p.n = 200000;
  p.m = 1;
  p.E = E;
  p.eps = 0.05;
  p.eps_prime = 0.05;
  p.s = suggest_support_threshold(p.n, support_tail_probability(DensityMatrix::fock(0, E), E));

  for (int n_photons : {0, 1}) {
    const auto samples = sample_q(DensityMatrix::fock(n_photons, 1), static_cast<std::size_t>(p.n), 7);
    const auto rep = certify(samples, psi, p);
    std::printf("|%d>: r = %lld (s = %lld) %s, fidelity estimate %.4f +- %.2f\n", n_photons,
                static_cast<long long>(rep.r), static_cast<long long>(p.s), rep.passed ? "pass" : "fail",
                rep.fidelity_estimate, rep.radius);
    std::printf("     log P_support = %.3f, log P_hoeffding = %.3f\n", rep.budget.term("support"),
                rep.budget.term("hoeffding"));
  }
}

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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "hetcv/oracle.hpp"
#include "hetcv/random_states.hpp"
#include "hetcv/tomography.hpp"
#include "test_support.hpp"

namespace hetcv {
namespace {

TEST(EstimateElement, SingleOriginSample) {
  const SampleList s{{cplx(0.0)}};
  EXPECT_NEAR(estimate_element(s, 0, 0, 0.1).real(), 10.0, 1e-12);
}

TEST(EstimateElement, Errors) {
  const SampleList none;
  EXPECT_THROW(estimate_element(none, 0, 0, 0.1), ParameterError);
  const SampleList s{{cplx(0.1, 0.2)}};
  EXPECT_THROW(estimate_element(s, 0, 0, 3.0, 3), ParameterError);
  EXPECT_THROW(estimate_element(s, 0, 0, -0.1), ParameterError);
  EXPECT_THROW(estimate_element(s, 4, 0, 0.1, 3), ParameterError);
  try {
    estimate_element(s, 1, 2, 2.0, 3);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 2)"), std::string::npos) << e.what();
  }
}

TEST(EstimateElement, VacuumNearOne) {
  const auto s = sample_q(DensityMatrix::fock(0, 0), 100000, 1);
  EXPECT_NEAR(estimate_element(s, 0, 0, 0.1).real(), 1.0, 0.05);
}

TEST(Accumulator, BatchesMatchOneShot) {
  std::mt19937_64 rng(3);
  const auto rho = random_density_matrix(2, rng);
  const auto s = sample_q(rho, 10000, 5);
  TomographyAccumulator one(2, 0.2);
  one.add(s);
  TomographyAccumulator many(2, 0.2);
  const std::span<const HeterodyneSample> all(s);
  for (std::size_t i = 0; i < s.size(); i += 777) many.add(all.subspan(i, std::min<std::size_t>(777, s.size() - i)));
  EXPECT_EQ(one.count(), many.count());
  EXPECT_EQ(one.estimates(), many.estimates());
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l)
      EXPECT_NEAR(std::abs(one.estimates()(k, l) - estimate_element(s, k, l, 0.2, 2)), 0.0, 1e-12);
}

TEST(Accumulator, EmptyIsAnError) {
  TomographyAccumulator acc(1, 0.1);
  EXPECT_THROW(acc.estimates(), ParameterError);
}

TEST(FailureBound, Frozen) {
  EXPECT_NEAR(tomography_failure_log_prob(1e5, 1, 0.1, 0.1), 2.0979157766584706, 1e-12);
  EXPECT_NEAR(tomography_failure_log_prob(3e8, 2, 0.2, 0.1), 1.7528000829781748, 1e-12);
}

TEST(FailureBound, MatchesDirectSum) {
  for (int e = 0; e <= 4; ++e) {
    for (double n : {1e3, 1e6, 1e9}) {
      std::vector<double> x;
      for (int k = 0; k <= e; ++k)
        for (int l = k; l <= e; ++l) {
          const double c = std::pow((k + 1.0) * (l + 1.0), 1.0 + 0.5 * (k + l)) * std::pow(2.0, l - k) *
                           testing::ref_binomial(l, k);
          x.push_back(-n * std::pow(0.3, 2.0 + k + l) * 0.04 / (4 * c));
        }
      const double top = *std::max_element(x.begin(), x.end());
      double direct = 0.0;
      for (double v : x) direct += std::exp(v - top);
      const double want = std::log(4 * direct) + top;
      EXPECT_NEAR(tomography_failure_log_prob(n, e, 0.3, 0.2), want, 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(FailureBound, DecreasesInN) {
  double prev = tomography_failure_log_prob(1e4, 2, 0.2, 0.2);
  for (double n = 2e4; n < 1e10; n *= 3) {
    const double cur = tomography_failure_log_prob(n, 2, 0.2, 0.2);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Planner, FrozenValues) {
  EXPECT_EQ(required_samples_tomography(0, 0.1, 0.1, 0.05), 175282);
  EXPECT_EQ(required_samples_tomography(1, 0.1, 0.1, 0.05), 280449705);
  EXPECT_EQ(required_samples_tomography(2, 0.2, 0.2, 0.01), 6824652586LL);
}

TEST(Planner, HandInversionAtZeroCutoff) {
  const double hand = 4.0 * std::log(80.0) / 1e-4;
  EXPECT_NEAR(double(required_samples_tomography(0, 0.1, 0.1, 0.05)), std::ceil(hand), 1.0);
}

TEST(Planner, MinimalAndMonotone) {
  for (int e = 0; e <= 3; ++e) {
    const auto n = required_samples_tomography(e, 0.3, 0.2, 0.1);
    EXPECT_LE(tomography_failure_log_prob(double(n), e, 0.3, 0.2), std::log(0.1));
    EXPECT_GT(tomography_failure_log_prob(double(n - 1), e, 0.3, 0.2), std::log(0.1));
  }
  EXPECT_LT(required_samples_tomography(0, 0.1, 0.1, 0.5), required_samples_tomography(0, 0.1, 0.1, 0.05));
}

TEST(Planner, Errors) {
  EXPECT_THROW(required_samples_tomography(0, 0.1, 0.1, 1.0), ParameterError);
  EXPECT_THROW(required_samples_tomography(0, 0.1, 0.1, 0.0), ParameterError);
  EXPECT_THROW(required_samples_tomography(-1, 0.1, 0.1, 0.1), ParameterError);
  EXPECT_THROW(required_samples_tomography(30, 0.01, 0.01, 0.1), ParameterError);
}

TEST(Tomography, BiasContract) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const int e = t % 6;
    const auto rho = random_density_matrix(e, rng);
    const double eps = 0.05 + 0.01 * (t % 10);
    for (int k = 0; k <= e; ++k)
      for (int l = 0; l <= e; ++l) {
        const cplx bias = expected_f_elem(rho, k, l, element_config(k, l, eps, e)) - rho(k, l);
        EXPECT_LE(std::abs(bias), eps + 1e-12);
      }
  }
}

TEST(Tomography, HermitizeIsExact) {
  std::mt19937_64 rng(32);
  const auto rho = random_density_matrix(2, rng);
  const auto s = sample_q(rho, 20000, 8);
  const auto rep = tomography_run(s, 2, 0.2, 0.2, true);
  EXPECT_TRUE(rep.hermitized);
  EXPECT_EQ(rep.estimates, rep.estimates.adjoint().eval());
}

TEST(Tomography, ConjugatePairsAgreeWithoutHermitize) {
  std::mt19937_64 rng(33);
  const auto rho = random_density_matrix(2, rng);
  const auto s = sample_q(rho, 20000, 9);
  const auto rep = tomography_run(s, 2, 0.2, 0.2, false);
  for (int k = 0; k <= 2; ++k)
    for (int l = 0; l <= 2; ++l)
      EXPECT_NEAR(std::abs(rep.estimates(k, l) - std::conj(rep.estimates(l, k))), 0.0, 1e-9);
}

TEST(Tomography, ReportFields) {
  const auto s = sample_q(DensityMatrix::fock(0, 0), 1000, 1);
  const auto rep = tomography_run(s, 1, 0.1, 0.05);
  EXPECT_EQ(rep.cutoff(), 1);
  EXPECT_EQ(rep.sample_count, 1000u);
  EXPECT_DOUBLE_EQ(rep.confidence_radius, 0.15);
  EXPECT_NEAR(rep.failure_log_prob, tomography_failure_log_prob(1000, 1, 0.1, 0.05), 0.0);
  EXPECT_LE(rep.failure_probability(), 1.0);
}

TEST(Tomography, LossyStateWithinRadius) {
  const auto plus = FockVector::normalized(CVector::Ones(2));
  const auto rho = apply_loss(DensityMatrix::pure(plus), 0.8);
  const auto s = sample_q(rho, 400000, 10);
  const auto rep = tomography_run(s, 1, 0.1, 0.1);
  for (int k = 0; k <= 1; ++k)
    for (int l = 0; l <= 1; ++l) EXPECT_LE(std::abs(rep.estimates(k, l) - rho(k, l)), 0.2);
}

}  // namespace
}  // namespace hetcv

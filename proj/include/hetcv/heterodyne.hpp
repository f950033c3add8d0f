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

/// @file heterodyne.hpp
/// @brief Husimi Q function evaluation and exact heterodyne sampling.
///
/// Heterodyne detection of rho yields alpha distributed with density
/// Uniform double in [0, 1) from the top 53 bits of one engine output.
template <class Eng>
inline double unit_uniform(Eng& rng) {
  static_assert(Eng::min() == 0 && Eng::max() == ~std::uint64_t{0}, "needs a full 64-bit engine");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Q_rho(alpha) = <alpha|rho|alpha> / pi. Samples are drawn by picking an
/// eigenvector v of rho by weight, then rejection-sampling Q_v under the
/// envelope
///
///   Q_v(alpha) <= d * sum_n |v_n|^2 Q_{|n>}(alpha),
///
/// where d is the number of non-zero amplitudes of v (Cauchy-Schwarz). A
/// proposal from the envelope is a Fock index n drawn with weight |v_n|^2,
/// a radius with |alpha|^2 ~ Gamma(n+1, 1) and a uniform phase. The mean
/// acceptance rate is exactly 1/d >= 1/(E+1).
///
/// Random streams: sample i of a stream family lives in chunk i / kStreamChunk,
/// and every chunk owns an engine seeded from (seed, family, chunk). Output
/// therefore depends only on the inputs and the seed, never on the number of
/// worker threads.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "hetcv/errors.hpp"
#include "hetcv/fock.hpp"

namespace hetcv {

/// One heterodyne outcome alpha = (q + i p).
struct HeterodyneSample {
  cplx value;

  friend bool operator==(const HeterodyneSample&, const HeterodyneSample&) = default;
};

using SampleList = std::vector<HeterodyneSample>;
using Engine = std::mt19937_64;

inline constexpr std::size_t kStreamChunk = 4096;
inline constexpr std::uint64_t kMaxRejectionIterations = 1'000'000;

/// Stream families. Distinct families never share an engine.
enum class StreamFamily : std::uint64_t {
  kDirect = 0,
  kSupport = 1,
  kEstimate = 2,
  kPermutation = 3,
  kBadSet = 4,
  kMixture = 5,
};

inline Engine stream_engine(std::uint64_t seed, StreamFamily family, std::uint64_t chunk) {
  const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  const auto fam = static_cast<std::uint64_t>(family);
  std::seed_seq seq{lo(seed), hi(seed), lo(fam), lo(chunk), hi(chunk)};
  return Engine(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
template <class Eng>
inline double unit_uniform(Eng& rng) {
  static_assert(Eng::min() == 0 && Eng::max() == ~std::uint64_t{0}, "needs a full 64-bit engine");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Q_rho(alpha) = <alpha|rho|alpha> / pi. Rounding negatives are clamped to 0.
inline double q_eval(const DensityMatrix& rho, cplx alpha) {
  const int e = rho.cutoff();
  CVector c(e + 1);  // c_n = <n|alpha>
  for (int n = 0; n <= e; ++n) c[n] = coherent_overlap(alpha, n);
  const double q = c.dot(rho.entries() * c).real() / std::numbers::pi;
  return std::max(q, 0.0);
}

struct SamplingStats {
  std::uint64_t accepted = 0;
  std::uint64_t proposals = 0;
};

/// Rejection sampler for the Q function of one pure state.
class PureStateSampler {
 public:
  explicit PureStateSampler(const FockVector& v) {
    for (int n = 0; n <= v.cutoff(); ++n) {
      if (std::norm(v[n]) > 0.0) {
        support_.push_back(n);
        amps_.push_back(v[n]);
      }
    }
    double acc = 0.0;
    for (const cplx& a : amps_) {
      acc += std::norm(a);
      cumulative_.push_back(acc);
    }
    for (double& c : cumulative_) c /= acc;
    max_n_ = support_.back();
    inv_sqrt_.resize(max_n_ + 1, 1.0);
    for (int n = 1; n <= max_n_; ++n) inv_sqrt_[n] = 1.0 / std::sqrt(static_cast<double>(n));
  }

  /// Number of non-zero amplitudes; 1/support_size() is the mean acceptance.
  std::size_t support_size() const noexcept { return support_.size(); }

  template <class Eng>
  cplx draw(Eng& rng, std::uint64_t& proposals) const {
    const double d = static_cast<double>(support_.size());
    for (std::uint64_t iter = 0; iter < kMaxRejectionIterations; ++iter) {
      ++proposals;
      std::size_t idx = 0;
      if (support_.size() > 1) {
        const double u = unit_uniform(rng);
        while (idx + 1 < cumulative_.size() && u >= cumulative_[idx]) ++idx;
      }
      const double r2 = gamma_integer(support_[idx] + 1, rng);
      // Uniform phase by the polar method.
      double x, y, s;
      do {
        x = 2.0 * unit_uniform(rng) - 1.0;
        y = 2.0 * unit_uniform(rng) - 1.0;
        s = x * x + y * y;
      } while (s > 1.0 || s == 0.0);
      const double scale = std::sqrt(r2 / s);
      const cplx alpha(x * scale, y * scale);
      if (support_.size() == 1) return alpha;

      // c_n = conj(alpha)^n / sqrt(n!); the common exp(-|alpha|^2/2) cancels.
      const cplx ac = std::conj(alpha);
      cplx c = 1.0;
      cplx overlap = 0.0;
      double envelope = 0.0;
      std::size_t next = 0;
      for (int n = 0; n <= max_n_; ++n) {
        if (n > 0) c *= ac * inv_sqrt_[n];
        if (support_[next] == n) {
          const cplx t = amps_[next] * c;
          overlap += t;
          envelope += std::norm(t);
          ++next;
        }
      }
      if (unit_uniform(rng) * d * envelope <= std::norm(overlap)) return alpha;
    }
    throw ConsistencyError("heterodyne sampler: rejection loop exceeded 10^6 iterations");
  }

 private:
  // Gamma(shape, 1) for integer shape: a sum of `shape` unit exponentials.
  template <class Eng>
  static double gamma_integer(int shape, Eng& rng) {
    if (shape <= 12) {
      double prod = 1.0;
      for (int i = 0; i < shape; ++i) prod *= 1.0 - unit_uniform(rng);
      return -std::log(prod);
    }
    std::gamma_distribution<double> g(static_cast<double>(shape), 1.0);
    return g(rng);
  }

  std::vector<int> support_;
  std::vector<cplx> amps_;
  std::vector<double> cumulative_;
  std::vector<double> inv_sqrt_;
  int max_n_ = 0;
};

namespace detail {

// Fills out[i] = draw(engine_of_chunk, i) for i in [0, out.size()), where the
// chunk of sample i is first_chunk + i / kStreamChunk.
template <class Draw>
void fill_chunked(std::span<HeterodyneSample> out, std::uint64_t seed, StreamFamily family,
                  std::uint64_t first_chunk, unsigned threads, Draw&& draw) {
  const std::size_t chunks = (out.size() + kStreamChunk - 1) / kStreamChunk;
  auto run_chunk = [&](std::size_t c) {
    Engine rng = stream_engine(seed, family, first_chunk + c);
    const std::size_t begin = c * kStreamChunk;
    const std::size_t end = std::min(out.size(), begin + kStreamChunk);
    for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng, i);
  };
  if (threads <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  const unsigned workers = std::min<std::size_t>(threads, chunks);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Heterodyne sampler for a mixed state.
class QSampler {
 public:
  explicit QSampler(const DensityMatrix& rho) : cutoff_(rho.cutoff()) {
    double acc = 0.0;
    for (const auto& comp : spectral_decompose(rho)) {
      components_.emplace_back(comp.vector);
      acc += comp.weight;
      cumulative_.push_back(acc);
    }
    for (double& c : cumulative_) c /= acc;
  }

  int cutoff() const noexcept { return cutoff_; }

  template <class Eng>
  HeterodyneSample draw(Eng& rng, std::uint64_t& proposals) const {
    std::size_t idx = 0;
    if (components_.size() > 1) {
      const double u = unit_uniform(rng);
      while (idx + 1 < cumulative_.size() && u >= cumulative_[idx]) ++idx;
    }
    return {components_[idx].draw(rng, proposals)};
  }

  /// Samples [first_chunk * kStreamChunk, first_chunk * kStreamChunk + count)
  /// of the direct stream for `seed`.
  SampleList sample(std::size_t count, std::uint64_t seed, unsigned threads = 1,
                    std::uint64_t first_chunk = 0, SamplingStats* stats = nullptr) const {
    SampleList out(count);
    std::vector<std::uint64_t> proposals((count + kStreamChunk - 1) / kStreamChunk, 0);
    detail::fill_chunked(out, seed, StreamFamily::kDirect, first_chunk, threads,
                         [&](Engine& rng, std::size_t i) {
                           return draw(rng, proposals[i / kStreamChunk]);
                         });
    if (stats) {
      stats->accepted += count;
      stats->proposals += std::accumulate(proposals.begin(), proposals.end(), std::uint64_t{0});
    }
    return out;
  }

 private:
  int cutoff_;
  std::vector<PureStateSampler> components_;
  std::vector<double> cumulative_;
};

/// `count` i.i.d. heterodyne samples of rho. Deterministic in (rho, count, seed).
inline SampleList sample_q(const DensityMatrix& rho, std::size_t count, std::uint64_t seed,
                           unsigned threads = 1) {
  return QSampler(rho).sample(count, seed, threads);
}

/// Number of samples with |alpha|^2 > cutoff (strict).
inline std::size_t support_count(std::span<const HeterodyneSample> samples, int cutoff) {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](const auto& s) {
    return std::norm(s.value) > static_cast<double>(cutoff);
  }));
}

/// Exact probability that |alpha|^2 > x under Q_rho:
/// sum_n rho_nn e^{-x} sum_{j<=n} x^j / j!.
inline double support_tail_probability(const DensityMatrix& rho, double x) {
  double total = 0.0;
  double partial = 0.0;
  double term = std::exp(-x);
  for (int n = 0; n <= rho.cutoff(); ++n) {
    if (n > 0) term *= x / n;
    partial += term;
    total += rho(n, n).real() * partial;
  }
  return std::clamp(total, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Adversary models for the multi-copy protocols.

/// Every subsystem is |psi>.
struct HonestIID {
  FockVector psi;
};

/// Every subsystem is rho.
struct NoisyIID {
  DensityMatrix rho;
};

/// One component i.i.d. state, drawn once per run with the given weights.
struct MixtureIID {
  std::vector<double> weights;
  std::vector<DensityMatrix> states;
};

/// A seeded subset of round(bad_fraction * (n + k)) positions holds `bad`,
/// the rest `good`. Not permutation invariant; used for negative tests.
struct SubsetSwap {
  DensityMatrix good;
  DensityMatrix bad;
  double bad_fraction;
};

using AdversaryModel = std::variant<HonestIID, NoisyIID, MixtureIID, SubsetSwap>;

inline void validate_adversary(const AdversaryModel& adv) {
  if (const auto* mix = std::get_if<MixtureIID>(&adv)) {
    if (mix->weights.empty() || mix->weights.size() != mix->states.size())
      throw ParameterError("MixtureIID: weights and states must be non-empty and equally long");
    double sum = 0.0;
    for (double w : mix->weights) {
      if (!(w >= 0.0)) throw ParameterError("MixtureIID: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ParameterError("MixtureIID: weights must sum to 1, residual " +
                           std::to_string(std::abs(sum - 1.0)));
  }
  if (const auto* swap = std::get_if<SubsetSwap>(&adv)) {
    if (!(swap->bad_fraction >= 0.0 && swap->bad_fraction <= 1.0))
      throw ParameterError("SubsetSwap: bad_fraction must lie in [0, 1]");
  }
}

/// Counts that define one protocol run. Certification mode is k = q = 0.
struct ProtocolShape {
  std::int64_t n = 0;  ///< subsystems after the support-estimation step
  std::int64_t k = 0;  ///< support-estimation samples
  std::int64_t q = 0;  ///< 4q subsystems are discarded
  std::int64_t m = 0;  ///< subsystems kept unmeasured

  bool certification_mode() const noexcept { return k == 0 && q == 0; }
  std::int64_t estimate_count() const noexcept { return n - 4 * q - m; }
};

inline void validate_shape(const ProtocolShape& s) {
  if (s.m < 1) throw ParameterError("protocol: m must be at least 1");
  if (s.k < 0 || s.q < 0) throw ParameterError("protocol: k and q must be non-negative");
  if (!s.certification_mode()) {
    if (s.k < 1) throw ParameterError("protocol: k must be at least 1");
    if (s.q < s.m) throw ParameterError("protocol: need q >= m");
  }
  if (s.estimate_count() < 1) throw ParameterError("protocol: need n - 4q - m >= 1");
}

struct ProtocolSamples {
  SampleList support_samples;   ///< beta_1..beta_k
  SampleList estimate_samples;  ///< alpha_1..alpha_{n-4q-m}
  /// Exact states of the m unmeasured subsystems (simulation ground truth).
  std::vector<DensityMatrix> kept_states;
  std::uint64_t rng_seed = 0;
  ProtocolShape shape;
};

/// Simulates n + k subsystems under the adversary model, applies a seeded
/// uniform permutation and splits it into k support samples, 4q discarded,
/// n - 4q - m estimate samples and m kept subsystems (all without
/// replacement).
inline ProtocolSamples run_protocol_sampling(const AdversaryModel& adv, const ProtocolShape& shape,
                                             std::uint64_t seed, unsigned threads = 1) {
  validate_shape(shape);
  validate_adversary(adv);
  const auto total = static_cast<std::size_t>(shape.n + shape.k);

  std::vector<DensityMatrix> table;
  std::vector<std::uint8_t> state_of(total, 0);
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, HonestIID>) {
          table.push_back(DensityMatrix::pure(model.psi));
        } else if constexpr (std::is_same_v<T, NoisyIID>) {
          table.push_back(model.rho);
        } else if constexpr (std::is_same_v<T, MixtureIID>) {
          Engine rng = stream_engine(seed, StreamFamily::kMixture, 0);
          std::discrete_distribution<std::size_t> pick(model.weights.begin(), model.weights.end());
          table.push_back(model.states[pick(rng)]);
        } else {
          table.push_back(model.good);
          table.push_back(model.bad);
          const auto bad = static_cast<std::size_t>(std::llround(model.bad_fraction * total));
          std::vector<std::size_t> idx(total);
          std::iota(idx.begin(), idx.end(), 0);
          Engine rng = stream_engine(seed, StreamFamily::kBadSet, 0);
          for (std::size_t i = 0; i < bad; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, total - 1);
            std::swap(idx[i], idx[pick(rng)]);
            state_of[idx[i]] = 1;
          }
        }
      },
      adv);

  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), 0);
  {
    Engine rng = stream_engine(seed, StreamFamily::kPermutation, 0);
    for (std::size_t i = total; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(perm[i - 1], perm[pick(rng)]);
    }
  }

  std::vector<QSampler> samplers;
  for (const auto& rho : table) samplers.emplace_back(rho);

  ProtocolSamples out;
  out.shape = shape;
  out.rng_seed = seed;
  const auto k = static_cast<std::size_t>(shape.k);
  const auto discard = static_cast<std::size_t>(4 * shape.q);
  const auto est = static_cast<std::size_t>(shape.estimate_count());

  out.support_samples.resize(k);
  detail::fill_chunked(out.support_samples, seed, StreamFamily::kSupport, 0, threads,
                       [&](Engine& rng, std::size_t i) {
                         std::uint64_t p = 0;
                         return samplers[state_of[perm[i]]].draw(rng, p);
                       });
  out.estimate_samples.resize(est);
  const std::size_t est_offset = k + discard;
  detail::fill_chunked(out.estimate_samples, seed, StreamFamily::kEstimate, 0, threads,
                       [&](Engine& rng, std::size_t i) {
                         std::uint64_t p = 0;
                         return samplers[state_of[perm[est_offset + i]]].draw(rng, p);
                       });
  for (std::size_t i = est_offset + est; i < total; ++i) out.kept_states.push_back(table[state_of[perm[i]]]);
  return out;
}

}  // namespace hetcv

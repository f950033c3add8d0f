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

/// @file run.hpp
/// @brief Command dispatch shared by the hetcv tool and the tests.
///
/// Commands: sample, tomography, certify, verify, plan, oracle. Every
/// command produces a JSON report echoing its inputs; exit status is 0 on
/// success, 1 on parameter/validation/parse errors and 2 on internal
/// inconsistencies.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "hetcv/certify.hpp"
#include "hetcv/errors.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/io.hpp"
#include "hetcv/oracle.hpp"
#include "hetcv/tomography.hpp"

namespace hetcv {

struct RunConfig {
  std::string command;
  std::string state_path;     ///< --state
  std::string target_path;    ///< --target
  std::string operator_path;  ///< --operator (oracle)
  std::string samples;        ///< --samples: a file path or a count
  std::string support_samples;  ///< --support-samples (verify)
  std::string output_path;      ///< --out
  std::string convergence_path;  ///< --convergence (tomography TSV)
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool hermitize = false;
  std::optional<int> cutoff;
  std::optional<double> eps;
  std::optional<double> eps_prime;
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<std::int64_t> n, k, q, m, s;
};

struct RunResult {
  int exit_code = 0;
  json report;      ///< empty on error
  json error;       ///< {"type", "message", ["line", "field"]} on error
};

inline json to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"seed", c.seed}, {"threads", c.threads}, {"hermitize", c.hermitize}};
  auto put_s = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  put_s("state", c.state_path);
  put_s("target", c.target_path);
  put_s("operator", c.operator_path);
  put_s("samples", c.samples);
  put_s("support_samples", c.support_samples);
  put_s("out", c.output_path);
  put_s("convergence", c.convergence_path);
  auto put_o = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put_o("E", c.cutoff);
  put_o("eps", c.eps);
  put_o("eps_prime", c.eps_prime);
  put_o("eta", c.eta);
  put_o("delta", c.delta);
  put_o("n", c.n);
  put_o("k", c.k);
  put_o("q", c.q);
  put_o("m", c.m);
  put_o("s", c.s);
  return j;
}

namespace detail {

inline constexpr std::size_t kSampleBlock = kStreamChunk * 64;

template <class T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw ParameterError(std::string("missing required flag ") + flag);
  return *v;
}

inline const std::string& require(const std::string& v, const char* flag) {
  if (v.empty()) throw ParameterError(std::string("missing required flag ") + flag);
  return v;
}

/// A --samples argument that is all digits is a count, anything else a path.
inline std::optional<std::uint64_t> sample_count_arg(const std::string& arg) {
  if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc() || ptr != arg.data() + arg.size()) throw ParameterError("bad sample count '" + arg + "'");
  return v;
}

/// Feeds `consume` with the samples named by --samples: either read from a
/// file or drawn from --state in deterministic blocks.
template <class Consume>
std::uint64_t for_each_sample_block(const RunConfig& c, Consume&& consume) {
  const std::string& arg = require(c.samples, "--samples");
  if (const auto count = sample_count_arg(arg)) {
    const DensityMatrix rho = as_density_matrix(load_state_spec(require(c.state_path, "--state")));
    const QSampler sampler(rho);
    std::uint64_t done = 0;
    while (done < *count) {
      const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kSampleBlock, *count - done));
      const SampleList block = sampler.sample(len, c.seed, c.threads, done / kStreamChunk);
      consume(std::span<const HeterodyneSample>(block));
      done += len;
    }
    return done;
  }
  const SampleList all = read_samples(arg);
  consume(std::span<const HeterodyneSample>(all));
  return all.size();
}

inline SampleList collect_samples(const RunConfig& c) {
  SampleList out;
  for_each_sample_block(c, [&](std::span<const HeterodyneSample> b) { out.insert(out.end(), b.begin(), b.end()); });
  return out;
}

inline json run_sample(const RunConfig& c) {
  const StateSpec spec = load_state_spec(require(c.state_path, "--state"));
  const auto count = sample_count_arg(require(c.samples, "--samples"));
  if (!count) throw ParameterError("sample: --samples must be a count");
  const std::string& out = require(c.output_path, "--out");
  const QSampler sampler(as_density_matrix(spec));
  SamplingStats stats;
  const SampleList samples = sampler.sample(static_cast<std::size_t>(*count), c.seed, c.threads, 0, &stats);
  write_samples(out, samples);
  return {{"state", state_to_json(spec)},
          {"sample_count", samples.size()},
          {"sample_file", out},
          {"proposals", stats.proposals},
          {"acceptance_rate", stats.proposals ? double(stats.accepted) / double(stats.proposals) : 1.0}};
}

inline json run_tomography(const RunConfig& c) {
  const int e = require(c.cutoff, "--cutoff");
  const double eps = require(c.eps, "--eps");
  const double eps_prime = require(c.eps_prime, "--eps-prime");
  TomographyAccumulator acc(e, eps);
  std::string table;
  std::uint64_t next_checkpoint = 1;
  auto checkpoint = [&]() {
    const CMatrix est = acc.estimates();
    char buf[160];
    for (int k = 0; k <= e; ++k)
      for (int l = 0; l <= e; ++l) {
        const cplx v = est(k, l);
        std::snprintf(buf, sizeof buf, "%llu\t%d\t%d\t%.17g\t%.17g\n",
                      static_cast<unsigned long long>(acc.count()), k, l, v.real(), v.imag());
        table += buf;
      }
  };
  for_each_sample_block(c, [&](std::span<const HeterodyneSample> block) {
    if (c.convergence_path.empty()) {
      acc.add(block);
      return;
    }
    while (!block.empty()) {
      const std::uint64_t want = next_checkpoint - acc.count();
      const auto take = static_cast<std::size_t>(std::min<std::uint64_t>(want, block.size()));
      acc.add(block.first(take));
      block = block.subspan(take);
      if (acc.count() == next_checkpoint) {
        checkpoint();
        next_checkpoint *= 2;
      }
    }
  });
  if (acc.count() == 0) throw ParameterError("tomography: no samples");
  if (!c.convergence_path.empty()) {
    if (table.empty() || acc.count() * 2 != next_checkpoint) checkpoint();
    write_text_file(c.convergence_path, "n\tk\tl\tre\tim\n" + table);
  }
  const TomographyReport rep = make_tomography_report(acc, eps_prime, c.hermitize);
  json j = to_json(rep);
  if (!c.state_path.empty() && sample_count_arg(c.samples)) {
    const DensityMatrix rho = as_density_matrix(load_state_spec(c.state_path)).padded(std::max(e, 0));
    if (rho.cutoff() == e) {
      double worst = 0.0;
      for (int k = 0; k <= e; ++k)
        for (int l = 0; l <= e; ++l) worst = std::max(worst, std::abs(rep.estimates(k, l) - rho(k, l)));
      j["max_abs_error"] = worst;
    }
  }
  return j;
}

inline json run_certify(const RunConfig& c) {
  const FockVector psi = as_pure_target(load_state_spec(require(c.target_path, "--target")));
  CertificationParams p;
  p.m = c.m.value_or(1);
  p.s = require(c.s, "--s");
  p.E = require(c.cutoff, "--cutoff");
  p.eps = require(c.eps, "--eps");
  p.eps_prime = require(c.eps_prime, "--eps-prime");
  const auto count = sample_count_arg(require(c.samples, "--samples"));
  SampleList samples;
  if (!count) samples = read_samples(c.samples);
  p.n = c.n.value_or(count ? static_cast<std::int64_t>(*count) : static_cast<std::int64_t>(samples.size()));
  validate(p, psi);
  if (count) samples = collect_samples(c);
  return to_json(certify(samples, psi, p));
}

inline json run_verify(const RunConfig& c) {
  const FockVector psi = as_pure_target(load_state_spec(require(c.target_path, "--target")));
  VerificationParams p;
  p.n = require(c.n, "--n");
  p.k = require(c.k, "--k");
  p.q = require(c.q, "--q");
  p.m = require(c.m, "--m");
  p.s = require(c.s, "--s");
  p.E = require(c.cutoff, "--cutoff");
  p.eps = require(c.eps, "--eps");
  p.eps_prime = require(c.eps_prime, "--eps-prime");
  validate(p, psi);
  ProtocolSamples ps;
  if (!c.samples.empty() && !sample_count_arg(c.samples)) {
    ps.estimate_samples = read_samples(c.samples);
    ps.support_samples = read_samples(require(c.support_samples, "--support-samples"));
    ps.shape = {p.n, p.k, p.q, p.m};
  } else {
    const DensityMatrix rho = as_density_matrix(load_state_spec(require(c.state_path, "--state")));
    ps = run_protocol_sampling(NoisyIID{rho}, {p.n, p.k, p.q, p.m}, c.seed, c.threads);
  }
  json j = to_json(verify(ps, psi, p));
  j["downstream_bound"] = downstream_bound(std::clamp(1.0 - (j["fidelity_estimate"].get<double>() -
                                                             j["radius"].get<double>()),
                                                      0.0, 1.0));
  return j;
}

inline json run_plan(const RunConfig& c) {
  const int e = require(c.cutoff, "--cutoff");
  json j = json::object();
  if (c.eps || c.eps_prime || c.delta) {
    const double eps = require(c.eps, "--eps");
    const double eps_prime = require(c.eps_prime, "--eps-prime");
    const double delta = c.delta.value_or(0.05);
    const std::int64_t n = required_samples_tomography(e, eps, eps_prime, delta);
    j["tomography"] = {{"E", e},
                       {"eps", eps},
                       {"eps_prime", eps_prime},
                       {"delta", delta},
                       {"n", n},
                       {"failure_log_prob", tomography_failure_log_prob(double(n), e, eps, eps_prime)}};
  }
  if (c.m) {
    const VerificationParams p = scaling_suggest(*c.m, e);
    json v = {{"params", to_json(p)}};
    if (!c.target_path.empty()) {
      const FockVector psi = as_pure_target(load_state_spec(c.target_path));
      v["budget"] = to_json(verification_budget(p, psi));
    }
    j["verification"] = std::move(v);
  }
  if (j.empty()) throw ParameterError("plan: give --eps/--eps-prime[/--delta] and/or --m");
  return j;
}

inline json run_oracle(const RunConfig& c) {
  const DensityMatrix rho = as_density_matrix(load_state_spec(require(c.state_path, "--state")));
  const double eta = require(c.eta, "--eta");
  const int e = c.cutoff.value_or(rho.cutoff());
  const EstimatorConfig cfg(eta, e);
  if (rho.cutoff() > e) throw ParameterError("oracle: state cutoff exceeds --cutoff");
  const DensityMatrix r = rho.padded(e);
  json j = {{"eta", eta}, {"E", e}};
  CMatrix table(e + 1, e + 1);
  for (int k = 0; k <= e; ++k)
    for (int l = 0; l <= e; ++l) table(k, l) = expected_f_elem(r, k, l, cfg);
  j["expected_f_elem"] = to_json(table);
  j["rho"] = to_json(r.entries());
  if (!c.operator_path.empty()) {
    const FockOperator a = parse_operator_spec(read_text_file(c.operator_path));
    const cplx exact = expected_f_op(r, a, cfg);
    j["operator"] = {{"expected_f_op", to_json(exact)},
                     {"trace_product", to_json(trace_product(a, r))},
                     {"bias_bound", eta * k_const(a)}};
  }
  return j;
}

inline json structured_error(const char* type, const std::exception& e) {
  json j = {{"type", type}, {"message", e.what()}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    if (p->line()) j["line"] = p->line();
    if (!p->field().empty()) j["field"] = p->field();
  }
  return j;
}

}  // namespace detail

/// Executes one command. The report is written to config.output_path for
/// every command except `sample` (whose --out is the sample file); it is
/// always returned in the result.
inline RunResult run(const RunConfig& config) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    json body;
    if (config.command == "sample")
      body = detail::run_sample(config);
    else if (config.command == "tomography")
      body = detail::run_tomography(config);
    else if (config.command == "certify")
      body = detail::run_certify(config);
    else if (config.command == "verify")
      body = detail::run_verify(config);
    else if (config.command == "plan")
      body = detail::run_plan(config);
    else if (config.command == "oracle")
      body = detail::run_oracle(config);
    else
      throw ParameterError("unknown command '" + config.command + "'");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.report = {{"command", config.command},
                  {"inputs", to_json(config)},
                  {"seed", config.seed},
                  {"result", std::move(body)},
                  {"wall_clock_seconds", secs}};
    if (config.command != "sample" && !config.output_path.empty())
      write_text_file(config.output_path, res.report.dump(2) + "\n");
  } catch (const ParseError& e) {
    res.exit_code = 1;
    res.error = detail::structured_error("parse_error", e);
  } catch (const ValidationError& e) {
    res.exit_code = 1;
    res.error = detail::structured_error("validation_error", e);
  } catch (const ParameterError& e) {
    res.exit_code = 1;
    res.error = detail::structured_error("parameter_error", e);
  } catch (const ConsistencyError& e) {
    res.exit_code = 2;
    res.error = detail::structured_error("consistency_error", e);
  } catch (const std::exception& e) {
    res.exit_code = 2;
    res.error = detail::structured_error("internal_error", e);
  }
  return res;
}

}  // namespace hetcv

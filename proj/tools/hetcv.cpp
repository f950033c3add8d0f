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

// hetcv command-line tool.

#include <iostream>

#include <CLI11.hpp>

#include "hetcv/run.hpp"

namespace {

void add_common(CLI::App* cmd, hetcv::RunConfig& c) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--out", c.output_path, "Output path");
  cmd->add_option("--threads", c.threads, "Sampling threads")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterodyne tomography, certification and verification of bounded-support states"};
  app.require_subcommand(1);
  hetcv::RunConfig c;

  auto* sample = app.add_subcommand("sample", "Draw heterodyne samples of a state");
  sample->add_option("--state", c.state_path, "State spec (JSON)")->required();
  sample->add_option("--samples", c.samples, "Number of samples")->required();
  add_common(sample, c);

  auto* tomo = app.add_subcommand("tomography", "Estimate all density-matrix elements");
  tomo->add_option("--samples", c.samples, "Sample file, or a count to draw from --state")->required();
  tomo->add_option("--state", c.state_path, "State to sample when --samples is a count");
  tomo->add_option("-E,--cutoff", c.cutoff, "Energy cutoff")->required();
  tomo->add_option("--eps", c.eps)->required();
  tomo->add_option("--eps-prime", c.eps_prime)->required();
  tomo->add_flag("--hermitize", c.hermitize, "Report (M + M^dagger)/2");
  tomo->add_option("--convergence", c.convergence_path, "Write estimate-vs-n table (TSV)");
  add_common(tomo, c);

  auto* cert = app.add_subcommand("certify", "Certify fidelity with a pure target (i.i.d. copies)");
  cert->add_option("--target", c.target_path, "Target state spec (amplitudes)")->required();
  cert->add_option("--samples", c.samples, "Sample file, or a count to draw from --state")->required();
  cert->add_option("--state", c.state_path, "State to sample when --samples is a count");
  cert->add_option("-E,--cutoff", c.cutoff)->required();
  cert->add_option("--eps", c.eps)->required();
  cert->add_option("--eps-prime", c.eps_prime)->required();
  cert->add_option("--m", c.m, "Copies certified (default 1)");
  cert->add_option("--n", c.n, "Samples measured (default: all)");
  cert->add_option("--s", c.s, "Support threshold")->required();
  add_common(cert, c);

  auto* ver = app.add_subcommand("verify", "Verify fidelity without the i.i.d. assumption");
  ver->add_option("--target", c.target_path)->required();
  ver->add_option("--state", c.state_path, "Prepared state to simulate");
  ver->add_option("--samples", c.samples, "Estimate-sample file");
  ver->add_option("--support-samples", c.support_samples, "Support-sample file");
  ver->add_option("-E,--cutoff", c.cutoff)->required();
  ver->add_option("--eps", c.eps)->required();
  ver->add_option("--eps-prime", c.eps_prime)->required();
  ver->add_option("--n", c.n)->required();
  ver->add_option("--k", c.k)->required();
  ver->add_option("--q", c.q)->required();
  ver->add_option("--m", c.m)->required();
  ver->add_option("--s", c.s)->required();
  add_common(ver, c);

  auto* plan = app.add_subcommand("plan", "Sample counts and verification parameter scaling");
  plan->add_option("-E,--cutoff", c.cutoff)->required();
  plan->add_option("--eps", c.eps);
  plan->add_option("--eps-prime", c.eps_prime);
  plan->add_option("--delta", c.delta, "Tomography failure probability (default 0.05)");
  plan->add_option("--m", c.m, "Suggest verification parameters for m copies");
  plan->add_option("--target", c.target_path, "Target for the suggested budget");
  add_common(plan, c);

  auto* oracle = app.add_subcommand("oracle", "Closed-form heterodyne expectations of the estimators");
  oracle->add_option("--state", c.state_path)->required();
  oracle->add_option("--eta", c.eta)->required();
  oracle->add_option("-E,--cutoff", c.cutoff);
  oracle->add_option("--operator", c.operator_path, "Operator spec for f_A");
  add_common(oracle, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  c.command = app.get_subcommands().front()->get_name();

  const hetcv::RunResult res = hetcv::run(c);
  if (res.exit_code != 0) {
    std::cerr << hetcv::json{{"error", res.error}}.dump(2) << "\n";
    return res.exit_code;
  }
  if (c.command == "sample" || c.output_path.empty()) std::cout << res.report.dump(2) << "\n";
  return 0;
}

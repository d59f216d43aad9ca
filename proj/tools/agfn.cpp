//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agfn/commands.hpp"

int main(int argc, char **argv) {
  using namespace agfn::cli;
  Options o;
  CLI::App app { "Atom-level GFlowNet for conditional molecule generation" };
  app.require_subcommand(1);

  long n = -1;
  int workers = 0;
  auto common = [&](CLI::App *cmd) {
    cmd->add_option("--config", o.config, "Run configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--workers", workers, "Sampling worker threads");
  };

  CLI::App *pre = app.add_subcommand("pretrain", "Pretrain on cheap rewards");
  common(pre);
  pre->add_flag("--resume", o.resume, "Continue from <checkpoint_dir>/last.ckpt");
  pre->add_flag("--force", o.force, "Accept a config hash mismatch");

  CLI::App *fine = app.add_subcommand(
      "finetune", "Finetune a pretrained model, or train a task model");
  common(fine);
  fine->add_option("--prior", o.prior, "Pretrained checkpoint");
  fine->add_option("--objective", o.objective, "tb or rtb")
      ->check(CLI::IsMember({ "tb", "rtb" }));
  fine->add_option("--seed-scaffold", o.seed_scaffold,
                   "SMILES installed as the frozen initial state");
  fine->add_flag("--resume", o.resume, "Continue from <checkpoint_dir>/last.ckpt");
  fine->add_flag("--force", o.force, "Accept a config hash mismatch");

  CLI::App *smp = app.add_subcommand("sample", "Draw molecules from a model");
  common(smp);
  smp->add_option("--checkpoint", o.checkpoint, "Model checkpoint")
      ->required();
  smp->add_option("--n", n, "Number of samples");
  smp->add_option("--out", o.out, "Output file")->required();
  smp->add_option("--seed-scaffold", o.seed_scaffold,
                  "SMILES installed as the frozen initial state");
  smp->add_flag("--force", o.force, "Accept a config hash mismatch");

  CLI::App *ev = app.add_subcommand("evaluate", "Compute sample metrics");
  common(ev);
  ev->add_option("samples", o.samples, "Sample file")->required();
  ev->add_option("--out", o.out, "Report file (table goes to <out>.tsv)");
  ev->add_flag("--strict", o.strict, "Fail on the first unparseable line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (n >= 0)
    o.n = n;
  if (workers != 0)
    o.workers = workers;

  return guarded(
      [&] {
        if (*pre)
          return pretrain(o, std::cerr);
        if (*fine)
          return finetune(o, std::cerr);
        if (*smp)
          return sample(o, std::cerr);
        return evaluate(o, std::cout, std::cerr);
      },
      std::cerr);
}

// Copyright 2026 The PrivRec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// privrec: batch experiments over recommendation instances.
//
//   privrec --mode leakage --instance inst.json --algo p-rec-sim --out run1
//
// A --config JSON file may supply any setting; flags given on the command
// line take precedence over it.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "privrec/experiment.h"

int main(int argc, char** argv) {
  CLI::App app{"Exact privacy and loss analysis of collaborative recommenders"};
  privrec::ExperimentConfig flags;
  std::string config_path;
  bool no_timestamp = false;

  CLI::Option* mode =
      app.add_option("--mode", flags.mode,
                     "loss | leakage | sweep | adversary-demo | lemma-suite");
  CLI::Option* instance =
      app.add_option("--instance", flags.instance_path, "Instance JSON file");
  CLI::Option* algo = app.add_option(
      "--algo", flags.algorithm,
      "p-rec-sim | p-rec | follow-majority | uniform (default p-rec)");
  CLI::Option* seed = app.add_option("--seed", flags.seed, "Base seed");
  CLI::Option* num_seeds = app.add_option("--num-seeds", flags.num_seeds,
                                          "Episodes per run (default 1000)");
  CLI::Option* cap = app.add_option("--cap", flags.cap,
                                    "Enumeration cap on m^T (default 1048576)");
  CLI::Option* out = app.add_option(
      "--out", flags.out, "Output prefix for .json/.csv/.trace.jsonl");
  CLI::Option* no_ts = app.add_flag("--no-timestamp", no_timestamp,
                                    "Omit the timestamp line from CSV output");
  CLI::Option* strict = app.add_flag("--strict", flags.strict,
                                     "Treat warnings (P < 6m) as violations");
  CLI::Option* sequences =
      app.add_flag("--sequences", flags.include_sequences,
                   "Include the per-sequence table in leakage reports");
  app.add_option("--config", config_path, "ExperimentConfig JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? privrec::kExitOk : privrec::kExitUsage;
  }

  privrec::ExperimentConfig config;
  if (!config_path.empty()) {
    auto loaded = privrec::ReadConfigFile(config_path);
    if (!loaded.ok()) {
      std::cerr << "error: " << loaded.status().message() << "\n";
      return privrec::kExitUsage;
    }
    config = *std::move(loaded);
  }
  if (*mode) config.mode = flags.mode;
  if (*instance) config.instance_path = flags.instance_path;
  if (*algo) config.algorithm = flags.algorithm;
  if (*seed) config.seed = flags.seed;
  if (*num_seeds) config.num_seeds = flags.num_seeds;
  if (*cap) config.cap = flags.cap;
  if (*out) config.out = flags.out;
  if (*no_ts) config.timestamp = false;
  if (*strict) config.strict = true;
  if (*sequences) config.include_sequences = true;

  if (config.mode.empty()) {
    std::cerr << "error: --mode is required\n" << app.help();
    return privrec::kExitUsage;
  }
  return privrec::RunExperiment(config, std::cout, std::cerr);
}

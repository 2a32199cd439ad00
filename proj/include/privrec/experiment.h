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

// Batch experiment runner behind the `privrec` command.
//
// Modes:
//   loss            exact expected loss plus seeded episodes
//   leakage         exact leakage over every removal-adjacent pair
//   sweep           grid over (T, D, R, P, n) of peer-family instances
//   adversary-demo  adaptive and oblivious two-object constructions
//   lemma-suite     seeded sweeps of the three phi inequalities
//
// With an output prefix, reports go to <prefix>.json and <prefix>.csv (and
// <prefix>.trace.jsonl in loss mode); otherwise the JSON report is printed.

#ifndef PRIVREC_EXPERIMENT_H_
#define PRIVREC_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "privrec/analyzer.h"
#include "privrec/generators.h"
#include "privrec/phi.h"

namespace privrec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitCap = 3,
  kExitInvariant = 4,
};

struct SweepGrid {
  int num_objects = 2;
  std::vector<int> rounds{8};
  std::vector<int> diversity{0};
  std::vector<int> radius{0};
  std::vector<int> peers{12};
  std::vector<int> voters{24};
  NonPeerStyle style = NonPeerStyle::kBlock;
};

struct AdversaryDemoSpec {
  int num_rounds = 16;
  int diversity = 3;
  int radius = 2;
  int copies = 1;
  int64_t paths = 1000;
};

struct ExperimentConfig {
  std::string mode;
  // Instance file; when empty, `generator` must be set (loss/leakage).
  std::string instance_path;
  std::optional<PeerFamilySpec> generator;
  std::string algorithm = "p-rec";
  uint64_t seed = 0;
  int num_seeds = 1000;
  uint64_t cap = kDefaultEnumerationCap;
  std::string out;
  bool timestamp = true;
  // Treat warnings (bounds outside P >= 6m) as invariant violations.
  bool strict = false;
  bool include_sequences = false;
  int64_t lemma_trials = 100000;
  SweepGrid grid;
  AdversaryDemoSpec adversary;
};

// Reads every known key of an ExperimentConfig JSON document on top of
// `base`. Unknown keys are rejected by name.
absl::StatusOr<ExperimentConfig> ConfigFromJson(const nlohmann::json& doc,
                                                ExperimentConfig base = {});
absl::StatusOr<ExperimentConfig> ReadConfigFile(const std::string& path,
                                                ExperimentConfig base = {});

struct LemmaSweepReport {
  int64_t trials = 0;
  int64_t shift_bound_violations = 0;
  int64_t ratio_bound_violations = 0;
  int64_t shift_transfer_violations = 0;
  int64_t boundary_violations = 0;
  std::vector<std::string> messages;  // first few failures

  int64_t total_violations() const {
    return shift_bound_violations + ratio_bound_violations +
           shift_transfer_violations + boundary_violations;
  }
};

// `trials` random cases per inequality plus fixed boundary cases.
LemmaSweepReport SweepPhiLemmas(const PhiParams& params, int64_t trials,
                                uint64_t seed);

// Fixed, versioned header of the sweep CSV.
std::string SweepCsvHeader();

// Runs `config`; diagnostics go to `err`, the report to `out` when no prefix
// is configured. Returns an ExitCode.
int RunExperiment(const ExperimentConfig& config, std::ostream& out,
                  std::ostream& err);

}  // namespace privrec

#endif  // PRIVREC_EXPERIMENT_H_

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

#ifndef PRIVREC_EPISODE_H_
#define PRIVREC_EPISODE_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "absl/status/statusor.h"
#include "privrec/algorithm.h"
#include "privrec/model.h"

namespace privrec {

// One round of an episode. W and C are taken at the start of the round.
struct RoundTrace {
  int t = 0;
  RoundDistribution probs;
  int pick = 0;
  bool liked = false;
  int surviving_weight = 0;
  int64_t surviving_credit = 0;
};

struct EpisodeResult {
  RecommendationSequence sequence;
  int loss = 0;
  std::vector<RoundTrace> trace;
  AlgoState final_state;
};

// Plays all T rounds. Round t draws RoundUniform(seed, t) and inverts the
// exact round distribution, so equal seeds give equal episodes.
absl::StatusOr<EpisodeResult> RunEpisode(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    uint64_t seed, bool record_trace = true);

// JSON-lines, one record per round:
//   {"t":0,"probs":[...],"pick":1,"liked":true,"W":24,"C":24}
// Records carry "warning":"manual_params" when the algorithm runs with
// manually overridden parameters.
void WriteTraceJsonl(std::ostream& out, const EpisodeResult& episode,
                     const RecommendationAlgorithm& algorithm);

}  // namespace privrec

#endif  // PRIVREC_EPISODE_H_

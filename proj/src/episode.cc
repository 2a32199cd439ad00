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

#include "privrec/episode.h"

#include <utility>
#include <vector>

#include "json.hpp"
#include "privrec/rng.h"

namespace privrec {

absl::StatusOr<EpisodeResult> RunEpisode(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    uint64_t seed, bool record_trace) {
  EpisodeResult result;
  result.sequence.picks.reserve(instance.num_rounds);
  if (record_trace) result.trace.reserve(instance.num_rounds);
  AlgoState state = algorithm.InitialState(instance.pattern);
  for (int t = 0; t < instance.num_rounds; ++t) {
    absl::StatusOr<RoundDistribution> dist =
        algorithm.Distribution(state, instance.pattern, t);
    if (!dist.ok()) return dist.status();
    const int pick = SampleObject(*dist, RoundUniform(seed, t));
    const bool liked = instance.client.Likes(t, pick);
    if (!liked) ++result.loss;
    result.sequence.picks.push_back(pick);
    if (record_trace) {
      result.trace.push_back({t, *dist, pick, liked, state.SurvivingWeight(),
                              state.SurvivingCredit()});
    }
    state = algorithm.Update(state, instance.pattern, t, pick, liked);
  }
  result.final_state = std::move(state);
  return result;
}

void WriteTraceJsonl(std::ostream& out, const EpisodeResult& episode,
                     const RecommendationAlgorithm& algorithm) {
  const AlgoParams* params = algorithm.params();
  const bool flagged = params != nullptr && params->manual_override;
  for (const RoundTrace& r : episode.trace) {
    nlohmann::json rec{{"t", r.t},
                       {"probs", std::vector<double>(r.probs.probs.begin(),
                                                     r.probs.probs.end())},
                       {"pick", r.pick},
                       {"liked", r.liked},
                       {"W", r.surviving_weight},
                       {"C", r.surviving_credit}};
    if (flagged) rec["warning"] = "manual_params";
    out << rec.dump() << "\n";
  }
}

}  // namespace privrec

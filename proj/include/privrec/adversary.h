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

// Adversarial instance builders for the lower-bound arguments.
//
// The configuration builders work with two objects per round, alpha = 0 and
// beta = 1, and two single-voter patterns U and U' (optionally duplicated
// `copies` times). Each round uses one of four settings:
//
//   S1: client likes {alpha};        U -> alpha, U' -> alpha
//   S2: client likes {beta};         U -> beta,  U' -> beta
//   S3: client likes {alpha, beta};  U -> alpha, U' -> beta
//   S4: client likes {alpha};        U -> alpha, U' -> beta
//
// S3 rounds add to the client's diversity, S4 rounds to the distance of U'.

#ifndef PRIVREC_ADVERSARY_H_
#define PRIVREC_ADVERSARY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "privrec/algorithm.h"
#include "privrec/analyzer.h"
#include "privrec/model.h"

namespace privrec {

inline constexpr int kAlpha = 0;
inline constexpr int kBeta = 1;

enum class Setting { kS1 = 1, kS2 = 2, kS3 = 3, kS4 = 4 };
enum class CaseTag { k1a, k1b, k2a, k2b };

std::string_view SettingName(Setting s);  // "S1".."S4"
std::string_view CaseTagName(CaseTag c);  // "1.a".."2.b"

struct Configuration {
  int num_rounds = 0;
  int copies = 1;
  // Budgets the configuration was generated under (after truncation when
  // D + R > T).
  int diversity = 0;
  int radius = 0;
  ClientPrefs client;
  VotingPattern pattern_u;
  VotingPattern pattern_u_prime;
  std::vector<Setting> setting_log;
  // At most `radius` S4 rounds.
  bool legal = true;
  std::vector<std::string> warnings;

  // Filled by the adaptive builder only: case per round, realized picks of
  // the U execution, E[L_t | b_<t] and E[E_t | b_<t] along that path.
  std::vector<CaseTag> case_tags;
  std::vector<int> picks;
  std::vector<double> expected_loss;
  std::vector<double> expected_leakage;

  int CountSetting(Setting s) const;
  // Client with pattern U, declared D and R, P = n = copies.
  Instance AsInstance() const;
};

// {setting_log, legal, case_tags, adjacent_voters}; pairs with
// InstanceToJson(config.AsInstance()).
nlohmann::json ConfigurationSidecarToJson(const Configuration& config);

// Per-round setting draw of the oblivious adversary: X = 0 (S3/S4) with
// probability (D+R)/(2T), X = 1 (S1) and X = 2 (S2) splitting the rest.
struct XtDistribution {
  double p0 = 0;
  double p1 = 0;
  double p2 = 0;

  static absl::StatusOr<XtDistribution> For(int T, int D, int R);
};

// Sum_j p_j ln(p_j / q_j); +inf when q_j = 0 < p_j.
double RelativeEntropy(const RoundDistribution& p, const RoundDistribution& q);

// First R rounds: the client likes one uniformly random object. Later rounds:
// object 0. P voters vote object 0 every round, so all are peers.
absl::StatusOr<Instance> BuildLossLowerBoundInstance(int m, int T, int R, int P,
                                                     uint64_t seed);

// P voters who each vote the client's lowest-index liked object every round.
VotingPattern BuildPeerOnlyPattern(const ClientPrefs& client, int P, int m,
                                   std::string_view id_prefix = "peer");

// 2P+1 patterns walking from the peer-only pattern of `client_a` (voter ids
// "a0".."a{P-1}") to that of `client_b` ("b0".."b{P-1}") through the middle
// pattern holding both peer groups; consecutive elements are 1-step
// adjacent. The clients must agree on every round but `t`, and their
// lowest-index liked objects at `t` must differ.
absl::StatusOr<std::vector<VotingPattern>> BuildPatternChain(
    const ClientPrefs& client_a, const ClientPrefs& client_b, int t, int P,
    int m);

// Round by round, fixes the client's round-k preference to whichever of
// {alpha} / {beta} gives `algorithm` the larger exact round-k expected loss
// against the peer-only pattern (ties keep alpha).
absl::StatusOr<ClientPrefs> BuildWorstClientSim(
    const RecommendationAlgorithm& algorithm, int m, int T, int P,
    uint64_t cap = kDefaultEnumerationCap);

// Oblivious random configuration. When D + R > T the budgets are truncated
// to D' = min(D, T), R' = T - D'. Requires D + R <= 2T.
absl::StatusOr<Configuration> GenerateObliviousConfiguration(int T, int D,
                                                             int R,
                                                             uint64_t seed,
                                                             int copies = 1);

struct FollowProbabilities {
  double p_alpha = 0;        // Pr[alpha] when U votes alpha
  double p_beta = 0;         // Pr[beta] when U votes beta
  double p_alpha_prime = 0;  // same for U'
  double p_beta_prime = 0;
};

// Replays rounds [0, t) of `prefix` along `history` (the shared picks b_<t),
// then queries the round-t distribution under each hypothetical vote.
absl::StatusOr<FollowProbabilities> ComputeFollowProbabilities(
    const RecommendationAlgorithm& algorithm, const Configuration& prefix,
    std::span<const int> history, int t);

// Adaptive construction following the case table:
//   1.a  min(p_a, p_b) <= 3/4, p_a <= 3/4       -> S1
//   1.b  min(p_a, p_b) <= 3/4, otherwise        -> S2
//   2.a  min(p_a, p_b) >  3/4, p'_b <= 1/2      -> S2
//   2.b  min(p_a, p_b) >  3/4, p'_b >  1/2      -> S3 for the first D such
//        rounds, S4 for the next R, S1 afterwards.
// The history is realized by sampling the U execution with `seed`.
absl::StatusOr<Configuration> BuildAdaptiveConfiguration(
    const RecommendationAlgorithm& algorithm, int T, int D, int R,
    uint64_t seed = 0, int copies = 1);

struct LeakageEstimate {
  double mean = 0;
  double standard_error = 0;
  // Smallest per-round relative-entropy term seen on any path.
  double min_round_term = 0;
  int64_t paths = 0;
};

// Samples paths of the U execution and sums, along each, the exact per-round
// relative entropy between the U and U' round distributions. The path mean
// is an unbiased estimate of E[E] = KL(Pr || Pr').
absl::StatusOr<LeakageEstimate> EstimateExpectedLeakage(
    const RecommendationAlgorithm& algorithm, const Configuration& config,
    int64_t num_paths, uint64_t seed);

// Same estimator, averaging also over legal oblivious configurations: each
// path draws a fresh configuration (redrawing illegal ones) and one path on
// it.
absl::StatusOr<LeakageEstimate> EstimateObliviousLeakage(
    const RecommendationAlgorithm& algorithm, int T, int D, int R, int copies,
    int64_t num_paths, uint64_t seed);

}  // namespace privrec

#endif  // PRIVREC_ADVERSARY_H_

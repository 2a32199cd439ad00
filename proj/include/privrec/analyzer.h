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

// Exact analysis by enumerating every recommendation sequence b in
// {0..m-1}^T.
//
// For two executions of one algorithm on adjacent voting patterns (the
// instance's pattern and `adjacent`), the per-round privacy leakage is
//
//   E_t(b) = ln Pr[b_t | b_<t] - ln Pr'[b_t | b_<t],
//
// and E(b) = sum_t E_t(b) = ln Pr[b] - ln Pr'[b]. On a finite outcome space
// max_b |E(b)| is the smallest epsilon for which the pair satisfies the
// epsilon-DP inequality over every event S. All sequence probabilities are
// carried in log space.

#ifndef PRIVREC_ANALYZER_H_
#define PRIVREC_ANALYZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "privrec/algorithm.h"
#include "privrec/model.h"

namespace privrec {

inline constexpr uint64_t kDefaultEnumerationCap = uint64_t{1} << 20;
// |E_t| above this counts as a leaking round.
inline constexpr double kLeakageZeroThreshold = 1e-9;
inline constexpr double kBoundTolerance = 1e-9;

// m^T, or ResourceExhausted naming the cap that would be required.
absl::StatusOr<uint64_t> SequenceCount(int num_objects, int num_rounds,
                                       uint64_t cap);

struct LossReport {
  double expected_loss = 0;
  std::vector<double> per_round_expected_loss;
  // Sum of Pr[b] over all enumerated sequences; 1 up to rounding.
  double total_probability = 0;
};

absl::StatusOr<LossReport> ExactLoss(const RecommendationAlgorithm& algorithm,
                                     const Instance& instance,
                                     uint64_t cap = kDefaultEnumerationCap);

struct SequenceLeakage {
  std::vector<int> picks;
  double log_pr = 0;
  double log_pr_prime = 0;
  double leakage = 0;  // E(b), accumulated as sum_t E_t(b)
};

// One edge (prefix b_<t, pick b_t) of the enumeration tree. The W/C columns
// come from the execution on the larger of the two patterns.
struct RoundLeakage {
  int t = 0;
  std::vector<int> prefix;  // b_<t followed by b_t
  double leakage = 0;       // E_t(b)
  int w = 0;                // W_t(b)
  int w_next = 0;           // W_{t+1}(b)
  int64_t c = 0;            // C_t(b)
  int64_t c_next = 0;       // C_{t+1}(b)
};

struct LeakageReport {
  std::string pair_id;
  int num_objects = 0;
  bool primary_is_larger = true;
  std::vector<SequenceLeakage> per_sequence;
  std::vector<RoundLeakage> rounds;
  double max_abs_leakage = 0;
  // sum_b Pr[b] E(b): relative entropy of the two output distributions.
  double kl_forward = 0;
  double total_probability = 0;
  double total_probability_prime = 0;
  // max_b |sum_t E_t(b) - (ln Pr[b] - ln Pr'[b])| over finite sequences.
  double max_direct_mismatch = 0;
  // Per-round leakage/shrinkage violations found for p-REC runs. Whether they
  // are errors or warnings is up to the caller (see BoundsApply()).
  std::vector<std::string> per_round_violations;
};

struct LeakageOptions {
  uint64_t cap = kDefaultEnumerationCap;
  bool keep_sequences = true;
  bool keep_rounds = true;
  std::string pair_id;
};

// Requires IsAdjacentStep(instance.pattern, adjacent). For algorithms of the
// p-REC family the per-round credit checks (and, with D = R = 0, the
// surviving-weight checks) are run over every edge.
absl::StatusOr<LeakageReport> ExactLeakage(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    const VotingPattern& adjacent, const LeakageOptions& options = {});

// |E_t(b)| <= 3 lambda / W_t(b).
std::vector<std::string> CheckLeakagePerWeight(
    std::span<const RoundLeakage> rounds, const AlgoParams& params);
// |E_t(b)| > 0 implies W_{t+1}(b) <= W_t(b) (1 - 1/(3m)).
std::vector<std::string> CheckWeightShrinkage(
    std::span<const RoundLeakage> rounds, int num_objects);
// |E_t(b)| <= 3(2D+2R+1) lambda / C_t(b), and |E_t(b)| > 0 implies
// C_{t+1}(b) <= C_t(b) (1 - 1/(3m(2D+2R+1))).
std::vector<std::string> CheckCreditLeakageAndShrinkage(
    std::span<const RoundLeakage> rounds, const AlgoParams& params,
    int num_objects);

// The per-round and total bounds below are proved for P >= 6m only.
bool BoundsApply(int num_objects, int peers);

struct Bound {
  double value = 0;
  bool precondition_ok = true;
  std::string warning;
};

// 18 m^2 ln(T) / P.
Bound EpsilonBoundSim(int m, int T, int P);
// 36 m^2 (2D+2R+1) ln(T/(R+1)) / P.
Bound EpsilonBoundGeneral(int m, int T, int P, int D, int R);
// 2m ln(n/P) + m/2.
Bound LossBoundSim(int m, int n, int P);
// 2m (2R+1) ln((2R+1) n / ((R+1) P)) + gamma T.
Bound LossBoundGeneral(int m, int n, int P, int R, double gamma, int T);

// Sum of per-step max|E| along a chain of 1-step adjacent patterns: an upper
// bound on max|E| between the chain's endpoints. `instance` supplies the
// client and shape; its pattern is ignored.
absl::StatusOr<double> ChainLeakageBound(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    std::span<const VotingPattern> chain,
    uint64_t cap = kDefaultEnumerationCap);

nlohmann::json LossReportToJson(const LossReport& report);
nlohmann::json LeakageReportToJson(const LeakageReport& report,
                                   bool include_sequences);
// "pair_id,max_abs_E,kl_forward,bound,margin"
std::string LeakageCsvHeader();
std::string LeakageCsvRow(const LeakageReport& report, double bound);

}  // namespace privrec

#endif  // PRIVREC_ANALYZER_H_

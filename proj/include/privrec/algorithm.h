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

// Recommendation algorithms for the collaborative recommendation game.
//
// p-REC keeps a 0/1 weight per voter and recommends object j of round t with
// probability
//
//   gamma / m + (1 - gamma) * phi(x_j) / sum_k phi(x_k),
//
// where x_j is the fraction of surviving (weight-1) voters that voted j. The
// simple variant kicks a voter out on its first disagreement; the general
// variant spends per-voter D-credit and R-credit first. Two non-private
// baselines (follow-the-majority and uniform) share the same interface.
//
// Every algorithm exposes its exact per-round distribution; sampling is a
// separate inverse-CDF step, so exact analysis and simulation evaluate the
// same formula.

#ifndef PRIVREC_ALGORITHM_H_
#define PRIVREC_ALGORITHM_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/inlined_vector.h"
#include "absl/status/statusor.h"
#include "privrec/model.h"
#include "privrec/phi.h"

namespace privrec {

enum class AlgorithmKind { kPRecSim, kPRec, kFollowMajority, kUniform };

// "p-rec-sim", "p-rec", "follow-majority", "uniform".
std::string_view AlgorithmName(AlgorithmKind kind);
absl::StatusOr<AlgorithmKind> ParseAlgorithmKind(std::string_view name);

struct AlgoParams {
  double gamma = 0;
  double lambda = 0;
  double rho = 0;
  int diversity = 0;  // D
  int radius = 0;     // R
  // Set when the values did not come from the derived constructors.
  bool manual_override = false;

  PhiParams phi() const { return {lambda, rho}; }

  // gamma = m/(3T-1), lambda = 2m ln T, rho = 1/(2m), D = R = 0.
  static absl::StatusOr<AlgoParams> ForSim(int m, int T);
  // gamma = m/(3T/(R+1) - 1), lambda = 2m ln(T/(R+1)), rho = 1/(2m).
  // Fails unless gamma lands in (0, 1) and lambda > 0, which needs
  // T/(R+1) > max(1, (m+1)/3).
  static absl::StatusOr<AlgoParams> ForGeneral(int m, int T, int D, int R);
  // Arbitrary values with gamma in [0, 1] and lambda > 0; flagged.
  static absl::StatusOr<AlgoParams> Manual(double gamma, double lambda,
                                           double rho, int D, int R);
};

// Weight and credit bookkeeping, indexed by voter position in the pattern.
struct AlgoState {
  std::vector<uint8_t> weight;
  std::vector<int> credit_d;
  std::vector<int> credit_r;
  int round = 0;

  // Every voter at weight 1 with 2D D-credit and 2R+1 R-credit.
  static AlgoState Initial(int num_voters, int D, int R);

  // W: number of surviving voters.
  int SurvivingWeight() const;
  // C: total D- plus R-credit held by surviving voters.
  int64_t SurvivingCredit() const;

  friend bool operator==(const AlgoState&, const AlgoState&) = default;
};

using Probabilities = absl::InlinedVector<double, 4>;

struct RoundDistribution {
  Probabilities probs;

  int size() const { return static_cast<int>(probs.size()); }
  friend bool operator==(const RoundDistribution&,
                         const RoundDistribution&) = default;
};

// x_j = (surviving voters on j) / (surviving voters). FailedPrecondition
// ("degenerate") when no voter survives.
absl::StatusOr<Probabilities> VoteFractions(const AlgoState& state,
                                            const VotingPattern& pattern,
                                            int t);

// The p-REC mixture. Falls back to uniform when no voter survives, and the
// phi branch falls back to uniform if every phi(x_j) is zero (unreachable
// with derived parameters since max_j x_j >= 1/m > rho).
absl::StatusOr<RoundDistribution> PRecDistribution(const AlgoParams& params,
                                                   const AlgoState& state,
                                                   const VotingPattern& pattern,
                                                   int t);

// Point mass on the largest surviving-vote fraction, lowest index on ties.
// Uniform when no voter survives.
RoundDistribution FollowMajorityDistribution(const AlgoState& state,
                                             const VotingPattern& pattern,
                                             int t);

RoundDistribution UniformDistribution(int num_objects);

// Simple-variant update: on "dislike" zero every voter on `recommended`, on
// "like" zero every voter elsewhere. Weights never return to 1.
AlgoState UpdateSim(const AlgoState& state, const VotingPattern& pattern, int t,
                    int recommended, bool liked);

// Credit update: on "dislike" every voter on `recommended` loses one
// R-credit; on "like" every voter elsewhere loses one D-credit. Then
// weight = 1 iff R-credit > 0 and D-credit + R-credit > 0. Decrements also
// hit voters that are already out, and credits may go negative.
AlgoState UpdateCredit(const AlgoState& state, const VotingPattern& pattern,
                       int t, int recommended, bool liked);

// Inverse CDF in object-index order; `u` in [0, 1). Never returns an object
// with probability zero.
int SampleObject(const RoundDistribution& dist, double u);

class RecommendationAlgorithm {
 public:
  virtual ~RecommendationAlgorithm() = default;

  virtual std::string name() const = 0;
  virtual AlgoState InitialState(const VotingPattern& pattern) const = 0;
  virtual absl::StatusOr<RoundDistribution> Distribution(
      const AlgoState& state, const VotingPattern& pattern, int t) const = 0;
  virtual AlgoState Update(const AlgoState& state, const VotingPattern& pattern,
                           int t, int recommended, bool liked) const = 0;
  // Parameters of the p-REC family; nullptr for baselines.
  virtual const AlgoParams* params() const { return nullptr; }
};

// Simple variant: params.diversity and params.radius must be 0.
absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> MakePRecSim(
    const AlgoParams& params);
std::unique_ptr<RecommendationAlgorithm> MakePRec(const AlgoParams& params);
// Stateless baselines: every voter always counts.
std::unique_ptr<RecommendationAlgorithm> MakeFollowMajority();
std::unique_ptr<RecommendationAlgorithm> MakeUniform();

// Builds `kind` with parameters derived from the instance's T, m and
// declared D, R.
absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> MakeAlgorithm(
    AlgorithmKind kind, const Instance& instance);

}  // namespace privrec

#endif  // PRIVREC_ALGORITHM_H_

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

#include "privrec/analyzer.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privrec/adversary.h"
#include "privrec/generators.h"

namespace privrec {
namespace {

using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::Not;
using ::testing::SizeIs;

Instance OneRound(std::vector<int> votes, std::set<int> likes) {
  Instance instance;
  instance.num_rounds = 1;
  instance.num_objects = 2;
  instance.client.likes = {likes};
  instance.pattern = VotingPattern{1, 2, {}};
  for (size_t i = 0; i < votes.size(); ++i) {
    instance.pattern.voters.push_back(
        {VoterId{"v" + std::to_string(i)}, {votes[i]}});
  }
  instance.voters = instance.pattern.size();
  instance.peers = PeerCount(instance.client, instance.pattern, 0);
  return instance;
}

VotingPattern WithoutVoter(const VotingPattern& p, int index) {
  VotingPattern q = p;
  q.voters.erase(q.voters.begin() + index);
  return q;
}

TEST(SequenceCountTest, PowerOrCap) {
  EXPECT_EQ(*SequenceCount(2, 10, kDefaultEnumerationCap), 1024u);
  EXPECT_EQ(*SequenceCount(2, 20, kDefaultEnumerationCap), uint64_t{1} << 20);
  absl::StatusOr<uint64_t> over = SequenceCount(2, 21, kDefaultEnumerationCap);
  EXPECT_EQ(over.status().code(), absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(SequenceCount(3, 40, 1000).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(ExactLossTest, CapIsEnforced) {
  Instance instance = *RandomValidInstance(1, {});
  auto algo = MakeUniform();
  EXPECT_EQ(ExactLoss(*algo, instance, 1).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(ExactLossTest, SingleRoundWithoutPeersLosesAllButExploration) {
  Instance instance = OneRound({1, 1, 1}, {0});
  const double gamma = 0.3;
  auto algo = MakePRec(*AlgoParams::Manual(gamma, 4.0, 0.25, 0, 0));
  LossReport r = *ExactLoss(*algo, instance);
  EXPECT_NEAR(r.expected_loss, 1 - gamma / 2, 1e-15);
  EXPECT_NEAR(r.total_probability, 1.0, 1e-15);
  ASSERT_THAT(r.per_round_expected_loss, SizeIs(1));
}

TEST(ExactLossTest, UniformLosesHalfPerSingleLikeRound) {
  Instance instance = *RandomValidInstance(9, {});
  auto algo = MakeUniform();
  double expected = 0;
  for (const auto& likes : instance.client.likes) {
    expected += 1.0 - static_cast<double>(likes.size()) / instance.num_objects;
  }
  EXPECT_NEAR(ExactLoss(*algo, instance)->expected_loss, expected, 1e-12);
}

TEST(ExactLeakageTest, RemovingOneOfTwelveIdenticalPeersLeaksNothing) {
  Instance instance = OneRound(std::vector<int>(12, 0), {0});
  // T = 1 makes the derived parameters degenerate; use fixed ones instead.
  EXPECT_FALSE(MakeAlgorithm(AlgorithmKind::kPRecSim, instance).ok());
  auto algo = MakePRec(*AlgoParams::Manual(0.25, 4.0, 0.25, 0, 0));
  LeakageReport r =
      *ExactLeakage(*algo, instance, WithoutVoter(instance.pattern, 0));
  EXPECT_EQ(r.max_abs_leakage, 0.0);
  EXPECT_EQ(r.kl_forward, 0.0);
}

// Independent two-round evaluation of the simple variant.
struct TwoRoundOracle {
  double gamma, lambda, rho;

  double PhiOf(double x) const {
    return x > rho ? std::exp(lambda * x) - std::exp(lambda * rho) : 0.0;
  }
  double Prob(const std::vector<std::vector<int>>& votes,
              const std::vector<bool>& alive, int t, int pick) const {
    double count[2] = {0, 0}, w = 0;
    for (size_t i = 0; i < votes.size(); ++i) {
      if (!alive[i]) continue;
      count[votes[i][t]] += 1;
      w += 1;
    }
    if (w == 0) return 0.5;
    const double f0 = PhiOf(count[0] / w), f1 = PhiOf(count[1] / w);
    const double f = pick == 0 ? f0 : f1;
    return gamma / 2 + (1 - gamma) * f / (f0 + f1);
  }
  // Pr[b0 b1] for a client liking `liked[t]` only.
  double Sequence(const std::vector<std::vector<int>>& votes,
                  const std::vector<int>& liked, int b0, int b1) const {
    std::vector<bool> alive(votes.size(), true);
    const double p0 = Prob(votes, alive, 0, b0);
    for (size_t i = 0; i < votes.size(); ++i) {
      const bool on_pick = votes[i][0] == b0;
      if (b0 == liked[0] ? !on_pick : on_pick) alive[i] = false;
    }
    return p0 * Prob(votes, alive, 1, b1);
  }
};

TEST(ExactLeakageTest, TwoRoundThirteenVoterExampleMatchesOracle) {
  // Seven peers vote (0, 1), six others vote (1, 0); the neighbour drops one
  // of the six, turning a 7:6 split into 7:5.
  Instance instance;
  instance.num_rounds = 2;
  instance.num_objects = 2;
  instance.client.likes = {{0}, {1}};
  instance.pattern = VotingPattern{2, 2, {}};
  std::vector<std::vector<int>> votes;
  for (int i = 0; i < 13; ++i) {
    std::vector<int> v =
        i < 7 ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
    votes.push_back(v);
    instance.pattern.voters.push_back({VoterId{"v" + std::to_string(i)}, v});
  }
  instance.peers = 7;
  instance.voters = 13;
  std::vector<std::vector<int>> votes_prime(votes.begin(), votes.end() - 1);

  auto algo = *MakeAlgorithm(AlgorithmKind::kPRecSim, instance);
  const AlgoParams& p = *algo->params();
  TwoRoundOracle oracle{p.gamma, p.lambda, p.rho};
  double max_abs = 0, kl = 0, loss = 0;
  for (int b0 = 0; b0 < 2; ++b0) {
    for (int b1 = 0; b1 < 2; ++b1) {
      const double pr = oracle.Sequence(votes, {0, 1}, b0, b1);
      const double pr_prime = oracle.Sequence(votes_prime, {0, 1}, b0, b1);
      const double e = std::log(pr) - std::log(pr_prime);
      max_abs = std::max(max_abs, std::abs(e));
      kl += pr * e;
      loss += pr * ((b0 != 0) + (b1 != 1));
    }
  }

  LeakageReport r =
      *ExactLeakage(*algo, instance, WithoutVoter(instance.pattern, 12));
  EXPECT_NEAR(r.max_abs_leakage, max_abs, 1e-12);
  EXPECT_NEAR(r.kl_forward, kl, 1e-12);
  EXPECT_GT(r.max_abs_leakage, 0.0);
  EXPECT_LT(r.max_direct_mismatch, 1e-12);
  EXPECT_THAT(r.per_sequence, SizeIs(4));
  EXPECT_NEAR(ExactLoss(*algo, instance)->expected_loss, loss, 1e-12);
}

TEST(ExactLeakageTest, RemovingAnAlreadyKickedVoterLeaksNothing) {
  // Voter x votes a disliked object in round 0, so any round-0 outcome
  // removes it: a liked pick drops voters elsewhere, a disliked pick drops
  // voters on it. Its round-1 vote never counts.
  Instance instance;
  instance.num_rounds = 2;
  instance.num_objects = 2;
  instance.client.likes = {{0}, {0}};
  instance.pattern = VotingPattern{2, 2, {}};
  for (int i = 0; i < 6; ++i) {
    instance.pattern.voters.push_back(
        {VoterId{"p" + std::to_string(i)}, {0, 0}});
  }
  instance.pattern.voters.push_back({VoterId{"x"}, {1, 1}});
  instance.peers = 6;
  instance.voters = 7;
  VotingPattern without_x = WithoutVoter(instance.pattern, 6);
  auto algo = MakePRec(*AlgoParams::Manual(0.25, 4.0, 0.25, 0, 0));
  LeakageReport r = *ExactLeakage(*algo, instance, without_x);
  for (const RoundLeakage& e : r.rounds) {
    if (e.t == 1) {
      EXPECT_EQ(e.leakage, 0.0) << "prefix " << e.prefix[0];
    }
  }
}

TEST(ExactLeakageTest, NonAdjacentPairIsRejected) {
  Instance instance = OneRound({0, 0, 1}, {0});
  auto algo = MakeUniform();
  EXPECT_EQ(ExactLeakage(*algo, instance, instance.pattern).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PerRoundChecksTest, HoldOnPeerFamilies) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    PeerFamilySpec spec;
    spec.style = NonPeerStyle::kBlock;
    spec.client_seed = seed;
    spec.assignment_seed = seed + 100;
    Instance instance = *BuildPeerFamilyInstance(spec);
    auto algo = *MakeAlgorithm(AlgorithmKind::kPRecSim, instance);
    VotingPattern adj =
        WithoutVoter(instance.pattern, instance.pattern.size() - 1);
    LeakageReport r = *ExactLeakage(*algo, instance, adj);
    EXPECT_THAT(r.per_round_violations, IsEmpty());
    EXPECT_THAT(CheckLeakagePerWeight(r.rounds, *algo->params()), IsEmpty());
    EXPECT_THAT(CheckWeightShrinkage(r.rounds, 2), IsEmpty());
    EXPECT_LE(r.max_abs_leakage,
              EpsilonBoundSim(2, 8, instance.peers).value + kBoundTolerance);
  }
}

TEST(PerRoundChecksTest, NegativeControlsAreReported) {
  AlgoParams params = *AlgoParams::ForSim(2, 8);
  RoundLeakage bad;
  bad.t = 3;
  bad.prefix = {0, 1, 0, 1};
  bad.leakage = 10.0;
  bad.w = 12;
  bad.w_next = 12;
  bad.c = 12;
  bad.c_next = 12;
  std::vector<RoundLeakage> rounds = {bad};
  EXPECT_THAT(CheckLeakagePerWeight(rounds, params), SizeIs(1));
  EXPECT_THAT(CheckWeightShrinkage(rounds, 2), SizeIs(1));
  EXPECT_THAT(CheckCreditLeakageAndShrinkage(rounds, params, 2),
              Not(IsEmpty()));
  rounds[0].leakage = 0;
  EXPECT_THAT(CheckLeakagePerWeight(rounds, params), IsEmpty());
  EXPECT_THAT(CheckWeightShrinkage(rounds, 2), IsEmpty());
  EXPECT_THAT(CheckCreditLeakageAndShrinkage(rounds, params, 2), IsEmpty());
}

TEST(BoundsTest, FrozenValues) {
  EXPECT_NEAR(EpsilonBoundSim(2, 8, 12).value, 6 * std::log(8.0), 1e-12);
  EXPECT_NEAR(EpsilonBoundSim(2, 8, 12).value, 12.4766, 1e-4);
  EXPECT_NEAR(EpsilonBoundGeneral(2, 8, 12, 1, 1).value, 60 * std::log(4.0),
              1e-12);
  EXPECT_NEAR(EpsilonBoundGeneral(2, 8, 12, 1, 1).value, 83.1777, 1e-4);
  EXPECT_NEAR(LossBoundSim(2, 24, 12).value, 4 * std::log(2.0) + 1, 1e-12);
  EXPECT_NEAR(LossBoundSim(2, 24, 12).value, 3.7726, 1e-4);
  EXPECT_EQ(EpsilonBoundSim(2, 1, 12).value, 0.0);
  EXPECT_EQ(EpsilonBoundGeneral(2, 8, 12, 0, 7).value, 0.0);
  // 4 * 3 * ln(3 * 24 / (2 * 12)) + gamma T
  EXPECT_NEAR(LossBoundGeneral(2, 24, 12, 1, 0.1, 8).value,
              12 * std::log(3.0) + 0.8, 1e-12);
}

TEST(BoundsTest, PreconditionsAreFlagged) {
  EXPECT_TRUE(BoundsApply(2, 12));
  EXPECT_FALSE(BoundsApply(2, 11));
  Bound b = EpsilonBoundSim(2, 8, 11);
  EXPECT_FALSE(b.precondition_ok);
  EXPECT_THAT(b.warning, HasSubstr("6m=12"));
  EXPECT_FALSE(EpsilonBoundGeneral(2, 8, 12, 0, 8).precondition_ok);
  EXPECT_FALSE(LossBoundSim(2, 3, 4).precondition_ok);
  EXPECT_TRUE(std::isinf(LossBoundSim(2, 3, 0).value));
}

TEST(BoundsTest, EpsilonBoundsShrinkWithPeers) {
  for (int P = 12; P < 100; ++P) {
    EXPECT_GT(EpsilonBoundSim(2, 16, P).value,
              EpsilonBoundSim(2, 16, P + 1).value);
    EXPECT_GT(EpsilonBoundGeneral(3, 16, P, 1, 1).value,
              EpsilonBoundGeneral(3, 16, P + 1, 1, 1).value);
  }
}

TEST(ChainTest, SumsStepsAndBoundsEndpoints) {
  Instance instance = *BuildLossLowerBoundInstance(2, 6, 2, 12, 3);
  instance.pattern.voters.resize(4);
  VotingPattern end = instance.pattern;
  end.voters.erase(end.voters.begin(), end.voters.begin() + 2);
  VotingPattern mid = WithoutVoter(instance.pattern, 0);
  std::vector<VotingPattern> chain = {instance.pattern, mid, end};
  auto algo = MakePRec(*AlgoParams::ForSim(2, 6));
  const double total = *ChainLeakageBound(*algo, instance, chain);
  Instance step = instance;
  const double a = ExactLeakage(*algo, step, mid)->max_abs_leakage;
  step.pattern = mid;
  const double b = ExactLeakage(*algo, step, end)->max_abs_leakage;
  EXPECT_NEAR(total, a + b, 1e-12);
}

TEST(ChainTest, BrokenChainNamesTheStep) {
  Instance instance = OneRound({0, 0, 1}, {0});
  std::vector<VotingPattern> chain = {instance.pattern, instance.pattern};
  absl::StatusOr<double> r = ChainLeakageBound(*MakeUniform(), instance, chain);
  EXPECT_THAT(r.status().message(), HasSubstr("chain step 0"));
}

TEST(ExportTest, JsonAndCsv) {
  Instance instance = OneRound({0, 0, 1}, {0});
  auto algo = MakePRec(*AlgoParams::Manual(0.25, 4.0, 0.25, 0, 0));
  LeakageOptions options;
  options.pair_id = "drop-v2";
  LeakageReport r = *ExactLeakage(*algo, instance,
                                  WithoutVoter(instance.pattern, 2), options);
  nlohmann::json with = LeakageReportToJson(r, true);
  nlohmann::json without = LeakageReportToJson(r, false);
  EXPECT_EQ(with["pair_id"], "drop-v2");
  EXPECT_TRUE(with.contains("per_sequence"));
  EXPECT_FALSE(without.contains("per_sequence"));
  EXPECT_EQ(LeakageCsvHeader(), "pair_id,max_abs_E,kl_forward,bound,margin");
  const std::string row = LeakageCsvRow(r, 2.0);
  EXPECT_EQ(row.substr(0, 8), "drop-v2,");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 4);
  nlohmann::json loss = LossReportToJson(*ExactLoss(*algo, instance));
  EXPECT_TRUE(loss.contains("expected_loss"));
}

}  // namespace
}  // namespace privrec

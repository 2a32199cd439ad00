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

#include "privrec/adversary.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privrec/rng.h"

namespace privrec {
namespace {

using ::testing::Each;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::SizeIs;

// Always recommends beta, whatever the votes.
class AlwaysBeta : public RecommendationAlgorithm {
 public:
  std::string name() const override { return "always-beta"; }
  AlgoState InitialState(const VotingPattern& pattern) const override {
    return AlgoState::Initial(pattern.size(), 0, 0);
  }
  absl::StatusOr<RoundDistribution> Distribution(const AlgoState&,
                                                 const VotingPattern& pattern,
                                                 int) const override {
    RoundDistribution d;
    d.probs.assign(pattern.num_objects, 0.0);
    d.probs[kBeta] = 1.0;
    return d;
  }
  AlgoState Update(const AlgoState& state, const VotingPattern&, int, int,
                   bool) const override {
    return state;
  }
};

TEST(NamesTest, SettingsAndCases) {
  EXPECT_EQ(SettingName(Setting::kS1), "S1");
  EXPECT_EQ(SettingName(Setting::kS4), "S4");
  EXPECT_EQ(CaseTagName(CaseTag::k1a), "1.a");
  EXPECT_EQ(CaseTagName(CaseTag::k2b), "2.b");
}

TEST(XtDistributionTest, SplitsRemainderEvenly) {
  XtDistribution x = *XtDistribution::For(16, 3, 2);
  EXPECT_DOUBLE_EQ(x.p0, 5.0 / 32);
  EXPECT_DOUBLE_EQ(x.p1, x.p2);
  EXPECT_DOUBLE_EQ(x.p0 + x.p1 + x.p2, 1.0);
  EXPECT_FALSE(XtDistribution::For(4, 5, 4).ok());
}

TEST(RelativeEntropyTest, KnownValues) {
  RoundDistribution p{{0.5, 0.5}};
  RoundDistribution q{{0.25, 0.75}};
  EXPECT_DOUBLE_EQ(RelativeEntropy(p, p), 0.0);
  EXPECT_NEAR(RelativeEntropy(p, q),
              0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3), 1e-15);
  EXPECT_TRUE(std::isinf(RelativeEntropy(p, RoundDistribution{{1.0, 0.0}})));
  EXPECT_DOUBLE_EQ(RelativeEntropy(RoundDistribution{{1.0, 0.0}}, p),
                   std::log(2.0));
}

TEST(LossLowerBoundTest, ShapeAndValidity) {
  Instance instance = *BuildLossLowerBoundInstance(3, 6, 2, 12, 5);
  EXPECT_THAT(Validate(instance), IsEmpty());
  EXPECT_EQ(instance.peers, 12);
  for (int t = 0; t < 6; ++t) {
    EXPECT_THAT(instance.client.likes[t], SizeIs(1));
    if (t >= 2) EXPECT_EQ(instance.client.likes[t], std::set<int>{0});
  }
  for (const Voter& v : instance.pattern.voters) {
    EXPECT_THAT(v.votes, Each(0));
  }
}

TEST(LossLowerBoundTest, UniformLosesTwoThirdsPerRound) {
  Instance instance = *BuildLossLowerBoundInstance(3, 6, 2, 12, 5);
  EXPECT_NEAR(ExactLoss(*MakeUniform(), instance)->expected_loss, 6 * 2.0 / 3,
              1e-12);
}

TEST(PeerOnlyPatternTest, VotesLowestLiked) {
  ClientPrefs client{{{2}, {0, 1}, {1}}};
  VotingPattern p = BuildPeerOnlyPattern(client, 4, 3, "z");
  ASSERT_EQ(p.size(), 4);
  EXPECT_EQ(p.voters[0].id.value, "z0");
  for (const Voter& v : p.voters) {
    EXPECT_EQ(v.votes, (std::vector<int>{2, 0, 1}));
  }
  EXPECT_EQ(PeerCount(client, p, 0), 4);
}

TEST(PatternChainTest, WalksBetweenPeerGroups) {
  ClientPrefs a{{{0}, {1}, {0}}};
  ClientPrefs b{{{0}, {0}, {0}}};
  std::vector<VotingPattern> chain = *BuildPatternChain(a, b, 1, 3, 2);
  ASSERT_THAT(chain, SizeIs(7));
  EXPECT_EQ(chain.front(), BuildPeerOnlyPattern(a, 3, 2, "a"));
  EXPECT_EQ(chain.back(), BuildPeerOnlyPattern(b, 3, 2, "b"));
  EXPECT_EQ(chain[3].size(), 6);
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    EXPECT_TRUE(IsAdjacentStep(chain[k], chain[k + 1])) << k;
  }
}

TEST(PatternChainTest, RejectsClientsThatDifferElsewhere) {
  ClientPrefs a{{{0}, {1}}};
  ClientPrefs b{{{1}, {0}}};
  EXPECT_FALSE(BuildPatternChain(a, b, 1, 2, 2).ok());
  EXPECT_FALSE(BuildPatternChain(a, a, 1, 2, 2).ok());
}

TEST(WorstClientTest, UniformLosesHalfEachRound) {
  ClientPrefs worst = *BuildWorstClientSim(*MakeUniform(), 2, 5, 12);
  ASSERT_EQ(worst.num_rounds(), 5);
  Instance instance;
  instance.num_rounds = 5;
  instance.num_objects = 2;
  instance.client = worst;
  instance.pattern = BuildPeerOnlyPattern(worst, 12, 2);
  LossReport r = *ExactLoss(*MakeUniform(), instance);
  for (double l : r.per_round_expected_loss) EXPECT_DOUBLE_EQ(l, 0.5);
  // Ties keep alpha.
  for (int t = 0; t < 5; ++t) EXPECT_EQ(worst.likes[t], std::set<int>{kAlpha});
}

TEST(WorstClientTest, FollowMajorityLosesNothing) {
  ClientPrefs worst = *BuildWorstClientSim(*MakeFollowMajority(), 2, 5, 12);
  Instance instance;
  instance.num_rounds = 5;
  instance.num_objects = 2;
  instance.client = worst;
  instance.pattern = BuildPeerOnlyPattern(worst, 12, 2);
  EXPECT_EQ(ExactLoss(*MakeFollowMajority(), instance)->expected_loss, 0.0);
}

TEST(WorstClientTest, NoRandomClientDoesWorse) {
  auto algo = MakePRec(*AlgoParams::ForSim(2, 6));
  auto loss_of = [&](const ClientPrefs& client) {
    Instance instance;
    instance.num_rounds = 6;
    instance.num_objects = 2;
    instance.client = client;
    instance.pattern = BuildPeerOnlyPattern(client, 12, 2);
    return ExactLoss(*algo, instance)->expected_loss;
  };
  const double worst = loss_of(*BuildWorstClientSim(*algo, 2, 6, 12));
  for (uint64_t seed = 0; seed < 50; ++seed) {
    StreamRng rng(seed, 9);
    ClientPrefs client;
    for (int t = 0; t < 6; ++t) {
      client.likes.push_back({static_cast<int>(rng() % 2)});
    }
    EXPECT_LE(loss_of(client), worst + 1e-12);
  }
}

TEST(ObliviousConfigurationTest, SettingsAreConsistent) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Configuration c = *GenerateObliviousConfiguration(16, 3, 2, seed, 2);
    ASSERT_THAT(c.setting_log, SizeIs(16));
    EXPECT_EQ(c.pattern_u.size(), 2);
    bool seen_s4 = false;
    for (int t = 0; t < 16; ++t) {
      const Setting s = c.setting_log[t];
      const int u = c.pattern_u.voters[0].votes[t];
      const int u_prime = c.pattern_u_prime.voters[0].votes[t];
      switch (s) {
        case Setting::kS1:
          EXPECT_EQ(c.client.likes[t], std::set<int>{kAlpha});
          EXPECT_EQ(u, kAlpha);
          EXPECT_EQ(u_prime, kAlpha);
          break;
        case Setting::kS2:
          EXPECT_EQ(c.client.likes[t], std::set<int>{kBeta});
          EXPECT_EQ(u, kBeta);
          EXPECT_EQ(u_prime, kBeta);
          break;
        case Setting::kS3:
          EXPECT_FALSE(seen_s4) << "S3 after S4";
          EXPECT_EQ(c.client.likes[t], (std::set<int>{kAlpha, kBeta}));
          EXPECT_EQ(u, kAlpha);
          EXPECT_EQ(u_prime, kBeta);
          break;
        case Setting::kS4:
          seen_s4 = true;
          EXPECT_EQ(c.client.likes[t], std::set<int>{kAlpha});
          EXPECT_EQ(u, kAlpha);
          EXPECT_EQ(u_prime, kBeta);
          break;
      }
    }
    EXPECT_LE(c.CountSetting(Setting::kS3), 3);
    EXPECT_EQ(c.legal, c.CountSetting(Setting::kS4) <= 2);
    if (c.legal) {
      Instance instance = c.AsInstance();
      EXPECT_THAT(Validate(instance), IsEmpty());
      EXPECT_EQ(*Distance(c.client, c.pattern_u_prime.voters[0].votes),
                c.CountSetting(Setting::kS4));
    }
  }
}

TEST(ObliviousConfigurationTest, TruncatesOversizedBudgets) {
  Configuration c = *GenerateObliviousConfiguration(6, 5, 4, 1);
  EXPECT_EQ(c.diversity, 5);
  EXPECT_EQ(c.radius, 1);
  ASSERT_FALSE(c.warnings.empty());
  EXPECT_THAT(c.warnings[0], HasSubstr("truncated to D'=5, R'=1"));
  EXPECT_FALSE(GenerateObliviousConfiguration(6, 8, 5, 1).ok());
}

TEST(ObliviousConfigurationTest, SidecarJson) {
  Configuration c = *GenerateObliviousConfiguration(8, 2, 1, 3);
  nlohmann::json j = ConfigurationSidecarToJson(c);
  EXPECT_EQ(j["setting_log"].size(), 8u);
  EXPECT_EQ(j["legal"], c.legal);
  EXPECT_TRUE(j.contains("adjacent_voters"));
  EXPECT_TRUE(j.contains("warnings"));
}

TEST(FollowProbabilitiesTest, FollowMajorityIsDeterministic) {
  Configuration c = *GenerateObliviousConfiguration(4, 1, 1, 2);
  FollowProbabilities f =
      *ComputeFollowProbabilities(*MakeFollowMajority(), c, {}, 0);
  EXPECT_EQ(f.p_alpha, 1.0);
  EXPECT_EQ(f.p_beta, 1.0);
  EXPECT_EQ(f.p_alpha_prime, 1.0);
  EXPECT_EQ(f.p_beta_prime, 1.0);
  EXPECT_FALSE(
      ComputeFollowProbabilities(*MakeFollowMajority(), c, {}, 2).ok());
}

TEST(AdaptiveConfigurationTest, FollowMajorityTrace) {
  Configuration c =
      *BuildAdaptiveConfiguration(*MakeFollowMajority(), 10, 3, 2, 7);
  ASSERT_THAT(c.case_tags, SizeIs(10));
  EXPECT_THAT(c.case_tags, Each(CaseTag::k2b));
  for (int t = 0; t < 10; ++t) {
    const Setting expected =
        t < 3 ? Setting::kS3 : (t < 5 ? Setting::kS4 : Setting::kS1);
    EXPECT_EQ(c.setting_log[t], expected) << t;
    EXPECT_EQ(c.expected_loss[t], 0.0);
  }
  EXPECT_TRUE(c.legal);
}

TEST(AdaptiveConfigurationTest, PRecLeaksInBudgetRounds) {
  auto algo = MakePRec(*AlgoParams::ForGeneral(2, 16, 3, 2));
  Configuration c = *BuildAdaptiveConfiguration(*algo, 16, 3, 2, 11);
  int budget_rounds = 0;
  for (int t = 0; t < 16; ++t) {
    const Setting s = c.setting_log[t];
    if (c.case_tags[t] == CaseTag::k2b &&
        (s == Setting::kS3 || s == Setting::kS4)) {
      ++budget_rounds;
      // KL(Bern(3/4) || Bern(1/2)) is about 0.1308.
      EXPECT_GE(c.expected_leakage[t], 0.13) << t;
    }
  }
  EXPECT_GT(budget_rounds, 0);
}

TEST(AdaptiveConfigurationTest, AlwaysBetaGetsAlphaRounds) {
  AlwaysBeta algo;
  Configuration c = *BuildAdaptiveConfiguration(algo, 8, 2, 2, 1);
  EXPECT_THAT(c.case_tags, Each(CaseTag::k1a));
  EXPECT_THAT(c.setting_log, Each(Setting::kS1));
  for (double l : c.expected_loss) EXPECT_GE(l, 0.25);
  EXPECT_THAT(c.expected_leakage, Each(0.0));
}

TEST(EstimatorTest, IdenticalPatternsLeakNothing) {
  // D = R = 0: only S1 and S2 rounds, so U and U' vote alike.
  Configuration c = *GenerateObliviousConfiguration(8, 0, 0, 4);
  EXPECT_EQ(c.pattern_u.voters[0].votes, c.pattern_u_prime.voters[0].votes);
  LeakageEstimate e =
      *EstimateExpectedLeakage(*MakePRec(*AlgoParams::ForSim(2, 8)), c, 200, 1);
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.standard_error, 0.0);
  EXPECT_EQ(e.paths, 200);
}

// Pr[b] under `pattern` by stepping the algorithm along b.
double SequenceProbability(const RecommendationAlgorithm& algo,
                           const Configuration& c, const VotingPattern& pattern,
                           const std::vector<int>& b) {
  AlgoState s = algo.InitialState(pattern);
  double pr = 1;
  for (int t = 0; t < c.num_rounds; ++t) {
    pr *= algo.Distribution(s, pattern, t)->probs[b[t]];
    s = algo.Update(s, pattern, t, b[t], c.client.Likes(t, b[t]));
  }
  return pr;
}

TEST(EstimatorTest, AgreesWithEnumeratedRelativeEntropy) {
  Configuration c = *GenerateObliviousConfiguration(8, 2, 1, 6, 3);
  auto algo = MakePRec(*AlgoParams::ForGeneral(2, 8, 2, 1));
  double kl = 0;
  for (int mask = 0; mask < 256; ++mask) {
    std::vector<int> b(8);
    for (int t = 0; t < 8; ++t) b[t] = (mask >> t) & 1;
    const double p = SequenceProbability(*algo, c, c.pattern_u, b);
    const double q = SequenceProbability(*algo, c, c.pattern_u_prime, b);
    if (p > 0) kl += p * std::log(p / q);
  }
  LeakageEstimate e = *EstimateExpectedLeakage(*algo, c, 20000, 3);
  EXPECT_GE(e.min_round_term, 0.0);
  EXPECT_NEAR(e.mean, kl, std::max(5 * e.standard_error, 1e-9));
  EXPECT_EQ(e.mean, EstimateExpectedLeakage(*algo, c, 20000, 3)->mean);
}

}  // namespace
}  // namespace privrec

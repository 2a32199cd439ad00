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
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privrec/instance_io.h"
#include "privrec/rng.h"

namespace privrec {

namespace {

constexpr int kTwoObjects = 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

VotingPattern CopiesPattern(int T, int copies, std::string_view prefix) {
  VotingPattern p{T, kTwoObjects, {}};
  for (int i = 0; i < copies; ++i) {
    p.voters.push_back({VoterId{absl::StrCat(std::string(prefix), i)},
                        std::vector<int>(T, kAlpha)});
  }
  return p;
}

void SetVotes(VotingPattern& pattern, int t, int object) {
  for (Voter& v : pattern.voters) v.votes[t] = object;
}

Configuration EmptyConfiguration(int T, int D, int R, int copies) {
  Configuration c;
  c.num_rounds = T;
  c.copies = copies;
  c.diversity = D;
  c.radius = R;
  c.client.likes.assign(T, std::set<int>{kAlpha});
  c.pattern_u = CopiesPattern(T, copies, "u");
  c.pattern_u_prime = CopiesPattern(T, copies, "w");
  return c;
}

void ApplySetting(Configuration& c, int t, Setting s) {
  switch (s) {
    case Setting::kS1:
      c.client.likes[t] = {kAlpha};
      SetVotes(c.pattern_u, t, kAlpha);
      SetVotes(c.pattern_u_prime, t, kAlpha);
      break;
    case Setting::kS2:
      c.client.likes[t] = {kBeta};
      SetVotes(c.pattern_u, t, kBeta);
      SetVotes(c.pattern_u_prime, t, kBeta);
      break;
    case Setting::kS3:
      c.client.likes[t] = {kAlpha, kBeta};
      SetVotes(c.pattern_u, t, kAlpha);
      SetVotes(c.pattern_u_prime, t, kBeta);
      break;
    case Setting::kS4:
      c.client.likes[t] = {kAlpha};
      SetVotes(c.pattern_u, t, kAlpha);
      SetVotes(c.pattern_u_prime, t, kBeta);
      break;
  }
  if (static_cast<int>(c.setting_log.size()) <= t) c.setting_log.resize(t + 1);
  c.setting_log[t] = s;
}

// Probability of `object` under `algorithm` when every voter of `pattern`
// votes `vote` at round t.
absl::StatusOr<double> FollowProbability(
    const RecommendationAlgorithm& algorithm, const AlgoState& state,
    VotingPattern& pattern, int t, int vote) {
  const std::vector<int> saved = [&] {
    std::vector<int> v;
    for (const Voter& voter : pattern.voters) v.push_back(voter.votes[t]);
    return v;
  }();
  SetVotes(pattern, t, vote);
  absl::StatusOr<RoundDistribution> dist =
      algorithm.Distribution(state, pattern, t);
  for (size_t i = 0; i < saved.size(); ++i) {
    pattern.voters[i].votes[t] = saved[i];
  }
  if (!dist.ok()) return dist.status();
  return dist->probs[vote];
}

absl::StatusOr<FollowProbabilities> QueryFollowProbabilities(
    const RecommendationAlgorithm& algorithm, const AlgoState& state_u,
    const AlgoState& state_u_prime, Configuration& config, int t) {
  FollowProbabilities f;
  for (auto [slot, state, pattern, vote] :
       {std::tuple{&f.p_alpha, &state_u, &config.pattern_u, kAlpha},
        std::tuple{&f.p_beta, &state_u, &config.pattern_u, kBeta},
        std::tuple{&f.p_alpha_prime, &state_u_prime, &config.pattern_u_prime,
                   kAlpha},
        std::tuple{&f.p_beta_prime, &state_u_prime, &config.pattern_u_prime,
                   kBeta}}) {
    absl::StatusOr<double> p =
        FollowProbability(algorithm, *state, *pattern, t, vote);
    if (!p.ok()) return p.status();
    *slot = *p;
  }
  return f;
}

struct PathSample {
  double total = 0;
  double min_term = kInf;
};

// One sampled path of the U execution with the exact per-round relative
// entropy summed along it.
absl::StatusOr<PathSample> SamplePath(const RecommendationAlgorithm& algorithm,
                                      const Configuration& config,
                                      uint64_t path_seed) {
  PathSample out;
  AlgoState s = algorithm.InitialState(config.pattern_u);
  AlgoState s_prime = algorithm.InitialState(config.pattern_u_prime);
  for (int t = 0; t < config.num_rounds; ++t) {
    absl::StatusOr<RoundDistribution> p =
        algorithm.Distribution(s, config.pattern_u, t);
    if (!p.ok()) return p.status();
    absl::StatusOr<RoundDistribution> q =
        algorithm.Distribution(s_prime, config.pattern_u_prime, t);
    if (!q.ok()) return q.status();
    const double term = RelativeEntropy(*p, *q);
    out.total += term;
    out.min_term = std::min(out.min_term, term);
    const int pick = SampleObject(*p, RoundUniform(path_seed, t));
    const bool liked = config.client.Likes(t, pick);
    s = algorithm.Update(s, config.pattern_u, t, pick, liked);
    s_prime = algorithm.Update(s_prime, config.pattern_u_prime, t, pick, liked);
  }
  return out;
}

class MeanAccumulator {
 public:
  void Add(double v) {
    ++n_;
    if (!std::isfinite(v)) {
      infinite_ = true;
      return;
    }
    // Welford.
    double delta = v - mean_;
    mean_ += delta / n_;
    m2_ += delta * (v - mean_);
  }
  LeakageEstimate Estimate(double min_term) const {
    LeakageEstimate e;
    e.paths = n_;
    e.min_round_term = min_term;
    if (infinite_) {
      e.mean = kInf;
      e.standard_error = kInf;
    } else if (n_ > 0) {
      e.mean = mean_;
      e.standard_error = n_ > 1 ? std::sqrt(m2_ / (n_ - 1) / n_) : 0;
    }
    return e;
  }

 private:
  int64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
  bool infinite_ = false;
};

}  // namespace

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kS1:
      return "S1";
    case Setting::kS2:
      return "S2";
    case Setting::kS3:
      return "S3";
    case Setting::kS4:
      return "S4";
  }
  return "?";
}

std::string_view CaseTagName(CaseTag c) {
  switch (c) {
    case CaseTag::k1a:
      return "1.a";
    case CaseTag::k1b:
      return "1.b";
    case CaseTag::k2a:
      return "2.a";
    case CaseTag::k2b:
      return "2.b";
  }
  return "?";
}

int Configuration::CountSetting(Setting s) const {
  return static_cast<int>(
      std::count(setting_log.begin(), setting_log.end(), s));
}

Instance Configuration::AsInstance() const {
  Instance instance;
  instance.num_rounds = num_rounds;
  instance.num_objects = kTwoObjects;
  instance.client = client;
  instance.pattern = pattern_u;
  instance.radius = radius;
  instance.diversity = diversity;
  instance.peers = copies;
  instance.voters = copies;
  return instance;
}

nlohmann::json ConfigurationSidecarToJson(const Configuration& config) {
  nlohmann::json settings = nlohmann::json::array();
  for (Setting s : config.setting_log) settings.push_back(SettingName(s));
  nlohmann::json tags = nlohmann::json::array();
  for (CaseTag c : config.case_tags) tags.push_back(CaseTagName(c));
  return {{"setting_log", std::move(settings)},
          {"legal", config.legal},
          {"case_tags", std::move(tags)},
          {"adjacent_voters", PatternToJson(config.pattern_u_prime)},
          {"warnings", config.warnings}};
}

absl::StatusOr<XtDistribution> XtDistribution::For(int T, int D, int R) {
  if (T < 1 || D < 0 || R < 0 || D + R > 2 * T) {
    return absl::InvalidArgumentError(absl::StrCat(
        "X_t probabilities need T >= 1 and 0 <= D + R <= 2T; got T=", T,
        " D=", D, " R=", R));
  }
  XtDistribution x;
  x.p0 = static_cast<double>(D + R) / (2.0 * T);
  x.p1 = (1 - x.p0) / 2;
  x.p2 = x.p1;
  return x;
}

double RelativeEntropy(const RoundDistribution& p, const RoundDistribution& q) {
  double total = 0;
  for (int j = 0; j < p.size(); ++j) {
    if (p.probs[j] <= 0) continue;
    if (q.probs[j] <= 0) return kInf;
    total += p.probs[j] * std::log(p.probs[j] / q.probs[j]);
  }
  return total;
}

absl::StatusOr<Instance> BuildLossLowerBoundInstance(int m, int T, int R, int P,
                                                     uint64_t seed) {
  if (m < 2 || T < 1 || R < 0 || R > T || P < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("need m >= 2, T >= 1, 0 <= R <= T, P >= 0; got m=", m,
                     " T=", T, " R=", R, " P=", P));
  }
  Instance instance;
  instance.num_rounds = T;
  instance.num_objects = m;
  StreamRng rng(seed, 0);
  for (int t = 0; t < T; ++t) {
    int liked = 0;
    if (t < R) liked = std::min(m - 1, static_cast<int>(rng.Uniform() * m));
    instance.client.likes.push_back({liked});
  }
  instance.pattern = VotingPattern{T, m, {}};
  for (int i = 0; i < P; ++i) {
    instance.pattern.voters.push_back(
        {VoterId{absl::StrCat("v", i)}, std::vector<int>(T, 0)});
  }
  instance.radius = R;
  instance.diversity = 0;
  instance.peers = P;
  instance.voters = P;
  return instance;
}

VotingPattern BuildPeerOnlyPattern(const ClientPrefs& client, int P, int m,
                                   std::string_view id_prefix) {
  const int T = client.num_rounds();
  VotingPattern pattern{T, m, {}};
  std::vector<int> votes(T);
  for (int t = 0; t < T; ++t) votes[t] = client.LowestLiked(t);
  for (int i = 0; i < P; ++i) {
    pattern.voters.push_back(
        {VoterId{absl::StrCat(std::string(id_prefix), i)}, votes});
  }
  return pattern;
}

absl::StatusOr<std::vector<VotingPattern>> BuildPatternChain(
    const ClientPrefs& client_a, const ClientPrefs& client_b, int t, int P,
    int m) {
  const int T = client_a.num_rounds();
  if (client_b.num_rounds() != T || t < 0 || t >= T || P < 1) {
    return absl::InvalidArgumentError(
        "chain needs equal-length clients, 0 <= t < T and P >= 1");
  }
  for (int s = 0; s < T; ++s) {
    if (s != t && client_a.likes[s] != client_b.likes[s]) {
      return absl::InvalidArgumentError(
          absl::StrCat("clients differ at round ", s, ", not only at ", t));
    }
    if (client_a.likes[s].empty() || client_b.likes[s].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("empty like-set at round ", s));
    }
  }
  if (client_a.LowestLiked(t) == client_b.LowestLiked(t)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clients must favor different objects at round ", t));
  }
  const VotingPattern a_peers = BuildPeerOnlyPattern(client_a, P, m, "a");
  const VotingPattern b_peers = BuildPeerOnlyPattern(client_b, P, m, "b");
  auto mix = [&](int num_a, int num_b) {
    VotingPattern p{T, m, {}};
    p.voters.insert(p.voters.end(), a_peers.voters.begin(),
                    a_peers.voters.begin() + num_a);
    p.voters.insert(p.voters.end(), b_peers.voters.begin(),
                    b_peers.voters.begin() + num_b);
    return p;
  };
  std::vector<VotingPattern> chain;
  chain.reserve(2 * P + 1);
  for (int k = 0; k < P; ++k) chain.push_back(mix(P, k));       // V_A^(1..P)
  chain.push_back(mix(P, P));                                   // V
  for (int k = P - 1; k >= 0; --k) chain.push_back(mix(k, P));  // V_B^(P..1)
  return chain;
}

absl::StatusOr<ClientPrefs> BuildWorstClientSim(
    const RecommendationAlgorithm& algorithm, int m, int T, int P,
    uint64_t cap) {
  if (m != kTwoObjects) {
    return absl::InvalidArgumentError("worst-client construction needs m = 2");
  }
  absl::StatusOr<uint64_t> count = SequenceCount(m, T, cap);
  if (!count.ok()) return count.status();
  ClientPrefs client;
  client.likes.assign(T, std::set<int>{kAlpha});
  for (int k = 0; k < T; ++k) {
    // Round-k loss depends only on rounds 0..k, so enumerate a truncated
    // game.
    double loss[2] = {0, 0};
    for (int choice : {kAlpha, kBeta}) {
      Instance truncated;
      truncated.num_rounds = k + 1;
      truncated.num_objects = m;
      truncated.client.likes.assign(client.likes.begin(),
                                    client.likes.begin() + k + 1);
      truncated.client.likes[k] = {choice};
      truncated.pattern = BuildPeerOnlyPattern(truncated.client, P, m);
      absl::StatusOr<LossReport> report = ExactLoss(algorithm, truncated, cap);
      if (!report.ok()) return report.status();
      loss[choice] = report->per_round_expected_loss[k];
    }
    client.likes[k] = {loss[kBeta] > loss[kAlpha] ? kBeta : kAlpha};
  }
  return client;
}

absl::StatusOr<Configuration> GenerateObliviousConfiguration(int T, int D,
                                                             int R,
                                                             uint64_t seed,
                                                             int copies) {
  absl::StatusOr<XtDistribution> x_check = XtDistribution::For(T, D, R);
  if (!x_check.ok()) return x_check.status();
  if (copies < 1) return absl::InvalidArgumentError("copies must be >= 1");
  int d = D;
  int r = R;
  if (D + R > T) {
    d = std::min(D, T);
    r = T - d;
  }
  absl::StatusOr<XtDistribution> x = XtDistribution::For(T, d, r);
  if (!x.ok()) return x.status();

  Configuration c = EmptyConfiguration(T, d, r, copies);
  if (D + R > T) {
    c.warnings.push_back(
        absl::StrCat("D + R > T: truncated to D'=", d, ", R'=", r));
  }
  if (D + R < 6 * std::log(static_cast<double>(T))) {
    c.warnings.push_back(absl::StrCat(
        "D + R = ", D + R, " < 6 ln T = ", 6 * std::log(static_cast<double>(T)),
        "; legality is not guaranteed with high probability"));
  }
  StreamRng rng(seed, 0);
  int s3 = 0;
  int s4 = 0;
  for (int t = 0; t < T; ++t) {
    const double u = rng.Uniform();
    Setting s;
    if (u < x->p0) {
      s = s3 < d ? Setting::kS3 : Setting::kS4;
    } else if (u < x->p0 + x->p1) {
      s = Setting::kS1;
    } else {
      s = Setting::kS2;
    }
    if (s == Setting::kS3) ++s3;
    if (s == Setting::kS4) ++s4;
    ApplySetting(c, t, s);
  }
  c.legal = s4 <= r;
  return c;
}

absl::StatusOr<FollowProbabilities> ComputeFollowProbabilities(
    const RecommendationAlgorithm& algorithm, const Configuration& prefix,
    std::span<const int> history, int t) {
  if (t < 0 || t >= prefix.num_rounds || static_cast<int>(history.size()) < t) {
    return absl::InvalidArgumentError(
        "history must cover rounds [0, t) of the configuration");
  }
  Configuration scratch = prefix;
  AlgoState s = algorithm.InitialState(scratch.pattern_u);
  AlgoState s_prime = algorithm.InitialState(scratch.pattern_u_prime);
  for (int r = 0; r < t; ++r) {
    const bool liked = scratch.client.Likes(r, history[r]);
    s = algorithm.Update(s, scratch.pattern_u, r, history[r], liked);
    s_prime = algorithm.Update(s_prime, scratch.pattern_u_prime, r, history[r],
                               liked);
  }
  return QueryFollowProbabilities(algorithm, s, s_prime, scratch, t);
}

absl::StatusOr<Configuration> BuildAdaptiveConfiguration(
    const RecommendationAlgorithm& algorithm, int T, int D, int R,
    uint64_t seed, int copies) {
  if (T < 1 || D < 0 || R < 0 || copies < 1) {
    return absl::InvalidArgumentError(
        "need T >= 1, D >= 0, R >= 0, copies >= 1");
  }
  Configuration c = EmptyConfiguration(T, D, R, copies);
  AlgoState s = algorithm.InitialState(c.pattern_u);
  AlgoState s_prime = algorithm.InitialState(c.pattern_u_prime);
  int s3 = 0;
  int s4 = 0;
  for (int t = 0; t < T; ++t) {
    absl::StatusOr<FollowProbabilities> f =
        QueryFollowProbabilities(algorithm, s, s_prime, c, t);
    if (!f.ok()) return f.status();
    CaseTag tag;
    Setting setting;
    if (std::min(f->p_alpha, f->p_beta) <= 0.75) {
      tag = f->p_alpha <= 0.75 ? CaseTag::k1a : CaseTag::k1b;
      setting = tag == CaseTag::k1a ? Setting::kS1 : Setting::kS2;
    } else if (f->p_beta_prime <= 0.5) {
      tag = CaseTag::k2a;
      setting = Setting::kS2;
    } else {
      tag = CaseTag::k2b;
      if (s3 < D) {
        setting = Setting::kS3;
        ++s3;
      } else if (s4 < R) {
        setting = Setting::kS4;
        ++s4;
      } else {
        setting = Setting::kS1;
      }
    }
    ApplySetting(c, t, setting);
    c.case_tags.push_back(tag);

    absl::StatusOr<RoundDistribution> p =
        algorithm.Distribution(s, c.pattern_u, t);
    if (!p.ok()) return p.status();
    absl::StatusOr<RoundDistribution> q =
        algorithm.Distribution(s_prime, c.pattern_u_prime, t);
    if (!q.ok()) return q.status();
    double loss = 0;
    for (int j = 0; j < p->size(); ++j) {
      if (!c.client.Likes(t, j)) loss += p->probs[j];
    }
    c.expected_loss.push_back(loss);
    c.expected_leakage.push_back(RelativeEntropy(*p, *q));

    const int pick = SampleObject(*p, RoundUniform(seed, t));
    const bool liked = c.client.Likes(t, pick);
    c.picks.push_back(pick);
    s = algorithm.Update(s, c.pattern_u, t, pick, liked);
    s_prime = algorithm.Update(s_prime, c.pattern_u_prime, t, pick, liked);
  }
  c.legal = s4 <= R;
  return c;
}

absl::StatusOr<LeakageEstimate> EstimateExpectedLeakage(
    const RecommendationAlgorithm& algorithm, const Configuration& config,
    int64_t num_paths, uint64_t seed) {
  if (num_paths < 1)
    return absl::InvalidArgumentError("num_paths must be >= 1");
  MeanAccumulator acc;
  double min_term = kInf;
  for (int64_t i = 0; i < num_paths; ++i) {
    absl::StatusOr<PathSample> path =
        SamplePath(algorithm, config, StreamKey(seed, i));
    if (!path.ok()) return path.status();
    acc.Add(path->total);
    min_term = std::min(min_term, path->min_term);
  }
  return acc.Estimate(min_term);
}

absl::StatusOr<LeakageEstimate> EstimateObliviousLeakage(
    const RecommendationAlgorithm& algorithm, int T, int D, int R, int copies,
    int64_t num_paths, uint64_t seed) {
  if (num_paths < 1)
    return absl::InvalidArgumentError("num_paths must be >= 1");
  MeanAccumulator acc;
  double min_term = kInf;
  for (int64_t i = 0; i < num_paths; ++i) {
    const uint64_t path_key = StreamKey(seed, i);
    absl::StatusOr<Configuration> config;
    for (uint64_t attempt = 0;; ++attempt) {
      config = GenerateObliviousConfiguration(
          T, D, R, StreamKey(path_key, attempt), copies);
      if (!config.ok()) return config.status();
      if (config->legal) break;
      if (attempt > 10000) {
        return absl::FailedPreconditionError(
            "could not draw a legal configuration");
      }
    }
    absl::StatusOr<PathSample> path =
        SamplePath(algorithm, *config, Mix64(path_key));
    if (!path.ok()) return path.status();
    acc.Add(path->total);
    min_term = std::min(min_term, path->min_term);
  }
  return acc.Estimate(min_term);
}

}  // namespace privrec

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

#include "privrec/algorithm.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privrec {

namespace {

absl::Status CheckRange(const AlgoParams& p) {
  if (!(p.gamma >= 0 && p.gamma <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in [0, 1], got ", p.gamma));
  }
  if (!(p.lambda > 0) || !std::isfinite(p.lambda)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be positive, got ", p.lambda));
  }
  if (!std::isfinite(p.rho)) {
    return absl::InvalidArgumentError("rho must be finite");
  }
  if (p.diversity < 0 || p.radius < 0) {
    return absl::InvalidArgumentError("D and R must be non-negative");
  }
  return absl::OkStatus();
}

class PRecAlgorithm final : public RecommendationAlgorithm {
 public:
  PRecAlgorithm(AlgoParams params, bool simple)
      : params_(params), simple_(simple) {}

  std::string name() const override {
    return std::string(AlgorithmName(simple_ ? AlgorithmKind::kPRecSim
                                             : AlgorithmKind::kPRec));
  }
  AlgoState InitialState(const VotingPattern& pattern) const override {
    return AlgoState::Initial(pattern.size(), params_.diversity,
                              params_.radius);
  }
  absl::StatusOr<RoundDistribution> Distribution(const AlgoState& state,
                                                 const VotingPattern& pattern,
                                                 int t) const override {
    return PRecDistribution(params_, state, pattern, t);
  }
  AlgoState Update(const AlgoState& state, const VotingPattern& pattern, int t,
                   int recommended, bool liked) const override {
    return simple_ ? UpdateSim(state, pattern, t, recommended, liked)
                   : UpdateCredit(state, pattern, t, recommended, liked);
  }
  const AlgoParams* params() const override { return &params_; }

 private:
  AlgoParams params_;
  bool simple_;
};

class FollowMajority final : public RecommendationAlgorithm {
 public:
  std::string name() const override {
    return std::string(AlgorithmName(AlgorithmKind::kFollowMajority));
  }
  AlgoState InitialState(const VotingPattern& pattern) const override {
    return AlgoState::Initial(pattern.size(), 0, 0);
  }
  absl::StatusOr<RoundDistribution> Distribution(const AlgoState& state,
                                                 const VotingPattern& pattern,
                                                 int t) const override {
    return FollowMajorityDistribution(state, pattern, t);
  }
  AlgoState Update(const AlgoState& state, const VotingPattern&, int, int,
                   bool) const override {
    AlgoState next = state;
    ++next.round;
    return next;
  }
};

class Uniform final : public RecommendationAlgorithm {
 public:
  std::string name() const override {
    return std::string(AlgorithmName(AlgorithmKind::kUniform));
  }
  AlgoState InitialState(const VotingPattern& pattern) const override {
    return AlgoState::Initial(pattern.size(), 0, 0);
  }
  absl::StatusOr<RoundDistribution> Distribution(const AlgoState&,
                                                 const VotingPattern& pattern,
                                                 int) const override {
    return UniformDistribution(pattern.num_objects);
  }
  AlgoState Update(const AlgoState& state, const VotingPattern&, int, int,
                   bool) const override {
    AlgoState next = state;
    ++next.round;
    return next;
  }
};

}  // namespace

std::string_view AlgorithmName(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kPRecSim:
      return "p-rec-sim";
    case AlgorithmKind::kPRec:
      return "p-rec";
    case AlgorithmKind::kFollowMajority:
      return "follow-majority";
    case AlgorithmKind::kUniform:
      return "uniform";
  }
  return "unknown";
}

absl::StatusOr<AlgorithmKind> ParseAlgorithmKind(std::string_view name) {
  for (AlgorithmKind kind :
       {AlgorithmKind::kPRecSim, AlgorithmKind::kPRec,
        AlgorithmKind::kFollowMajority, AlgorithmKind::kUniform}) {
    if (AlgorithmName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown algorithm '", std::string(name),
      "' (expected p-rec-sim, p-rec, follow-majority or uniform)"));
}

absl::StatusOr<AlgoParams> AlgoParams::ForSim(int m, int T) {
  return ForGeneral(m, T, 0, 0);
}

absl::StatusOr<AlgoParams> AlgoParams::ForGeneral(int m, int T, int D, int R) {
  if (m < 2 || T < 1 || D < 0 || R < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("need m >= 2, T >= 1, D >= 0, R >= 0; got m=", m, " T=", T,
                     " D=", D, " R=", R));
  }
  const double span = static_cast<double>(T) / (R + 1);
  AlgoParams p;
  p.gamma = m / (3.0 * T / (R + 1) - 1);
  p.lambda = 2.0 * m * std::log(span);
  p.rho = 1.0 / (2.0 * m);
  p.diversity = D;
  p.radius = R;
  if (!(p.gamma > 0 && p.gamma < 1) || !(p.lambda > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("derived parameters degenerate for m=", m, " T=", T,
                     " R=", R, " (gamma=", p.gamma, ", lambda=", p.lambda,
                     "); need T/(R+1) > max(1, (m+1)/3)"));
  }
  return p;
}

absl::StatusOr<AlgoParams> AlgoParams::Manual(double gamma, double lambda,
                                              double rho, int D, int R) {
  AlgoParams p{gamma, lambda, rho, D, R, /*manual_override=*/true};
  if (absl::Status s = CheckRange(p); !s.ok()) return s;
  return p;
}

AlgoState AlgoState::Initial(int num_voters, int D, int R) {
  AlgoState s;
  s.weight.assign(num_voters, 1);
  s.credit_d.assign(num_voters, 2 * D);
  s.credit_r.assign(num_voters, 2 * R + 1);
  return s;
}

int AlgoState::SurvivingWeight() const {
  int w = 0;
  for (uint8_t x : weight) w += x;
  return w;
}

int64_t AlgoState::SurvivingCredit() const {
  int64_t c = 0;
  for (size_t i = 0; i < weight.size(); ++i) {
    if (weight[i]) c += credit_d[i] + credit_r[i];
  }
  return c;
}

absl::StatusOr<Probabilities> VoteFractions(const AlgoState& state,
                                            const VotingPattern& pattern,
                                            int t) {
  Probabilities counts(pattern.num_objects, 0.0);
  int total = 0;
  for (int i = 0; i < pattern.size(); ++i) {
    if (state.weight[i]) {
      counts[pattern.voters[i].votes[t]] += 1;
      ++total;
    }
  }
  if (total == 0) {
    return absl::FailedPreconditionError("degenerate: no surviving voters");
  }
  for (double& c : counts) c /= total;
  return counts;
}

absl::StatusOr<RoundDistribution> PRecDistribution(const AlgoParams& params,
                                                   const AlgoState& state,
                                                   const VotingPattern& pattern,
                                                   int t) {
  const int m = pattern.num_objects;
  absl::StatusOr<Probabilities> x = VoteFractions(state, pattern, t);
  if (!x.ok()) return UniformDistribution(m);

  Probabilities phi(m, 0.0);
  double phi_sum = 0;
  for (int j = 0; j < m; ++j) {
    absl::StatusOr<double> v = Phi(params.phi(), (*x)[j]);
    if (!v.ok()) return v.status();
    phi[j] = *v;
    phi_sum += *v;
  }
  RoundDistribution dist;
  dist.probs.resize(m);
  const double explore = params.gamma / m;
  for (int j = 0; j < m; ++j) {
    const double follow = phi_sum > 0 ? phi[j] / phi_sum : 1.0 / m;
    dist.probs[j] = explore + (1 - params.gamma) * follow;
  }
  return dist;
}

RoundDistribution FollowMajorityDistribution(const AlgoState& state,
                                             const VotingPattern& pattern,
                                             int t) {
  absl::StatusOr<Probabilities> x = VoteFractions(state, pattern, t);
  if (!x.ok()) return UniformDistribution(pattern.num_objects);
  int best = 0;
  for (int j = 1; j < pattern.num_objects; ++j) {
    if ((*x)[j] > (*x)[best]) best = j;
  }
  RoundDistribution dist;
  dist.probs.assign(pattern.num_objects, 0.0);
  dist.probs[best] = 1.0;
  return dist;
}

RoundDistribution UniformDistribution(int num_objects) {
  RoundDistribution dist;
  dist.probs.assign(num_objects, 1.0 / num_objects);
  return dist;
}

AlgoState UpdateSim(const AlgoState& state, const VotingPattern& pattern, int t,
                    int recommended, bool liked) {
  AlgoState next = state;
  for (int i = 0; i < pattern.size(); ++i) {
    const bool on_recommended = pattern.voters[i].votes[t] == recommended;
    if (on_recommended != liked) next.weight[i] = 0;
  }
  ++next.round;
  return next;
}

AlgoState UpdateCredit(const AlgoState& state, const VotingPattern& pattern,
                       int t, int recommended, bool liked) {
  AlgoState next = state;
  for (int i = 0; i < pattern.size(); ++i) {
    const bool on_recommended = pattern.voters[i].votes[t] == recommended;
    if (!liked && on_recommended) --next.credit_r[i];
    if (liked && !on_recommended) --next.credit_d[i];
    next.weight[i] =
        next.credit_r[i] > 0 && next.credit_d[i] + next.credit_r[i] > 0;
  }
  ++next.round;
  return next;
}

int SampleObject(const RoundDistribution& dist, double u) {
  double cumulative = 0;
  int last_positive = 0;
  for (int j = 0; j < dist.size(); ++j) {
    if (dist.probs[j] <= 0) continue;
    last_positive = j;
    cumulative += dist.probs[j];
    if (u < cumulative) return j;
  }
  return last_positive;
}

absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> MakePRecSim(
    const AlgoParams& params) {
  if (params.diversity != 0 || params.radius != 0) {
    return absl::InvalidArgumentError("the simple variant requires D = R = 0");
  }
  return std::make_unique<PRecAlgorithm>(params, /*simple=*/true);
}

std::unique_ptr<RecommendationAlgorithm> MakePRec(const AlgoParams& params) {
  return std::make_unique<PRecAlgorithm>(params, /*simple=*/false);
}

std::unique_ptr<RecommendationAlgorithm> MakeFollowMajority() {
  return std::make_unique<FollowMajority>();
}

std::unique_ptr<RecommendationAlgorithm> MakeUniform() {
  return std::make_unique<Uniform>();
}

absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> MakeAlgorithm(
    AlgorithmKind kind, const Instance& instance) {
  switch (kind) {
    case AlgorithmKind::kPRecSim: {
      absl::StatusOr<AlgoParams> p =
          AlgoParams::ForSim(instance.num_objects, instance.num_rounds);
      if (!p.ok()) return p.status();
      return MakePRecSim(*p);
    }
    case AlgorithmKind::kPRec: {
      absl::StatusOr<AlgoParams> p =
          AlgoParams::ForGeneral(instance.num_objects, instance.num_rounds,
                                 instance.diversity, instance.radius);
      if (!p.ok()) return p.status();
      return MakePRec(*p);
    }
    case AlgorithmKind::kFollowMajority:
      return MakeFollowMajority();
    case AlgorithmKind::kUniform:
      return MakeUniform();
  }
  return absl::InvalidArgumentError("unknown algorithm kind");
}

}  // namespace privrec

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
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace privrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier summation.
class CompensatedSum {
 public:
  void Add(double v) {
    if (!std::isfinite(v) || !std::isfinite(sum_)) {
      sum_ += v;
      return;
    }
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      compensation_ += (sum_ - t) + v;
    } else {
      compensation_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const {
    return std::isfinite(sum_) ? sum_ + compensation_ : sum_;
  }

 private:
  double sum_ = 0;
  double compensation_ = 0;
};

double SafeLog(double p) { return p > 0 ? std::log(p) : -kInf; }

// sum_i exp(logs[i]), scaled by the largest term before exponentiating.
double SumExpLogs(const std::vector<double>& logs) {
  double top = -kInf;
  for (double l : logs) top = std::max(top, l);
  if (top == -kInf) return 0;
  CompensatedSum s;
  for (double l : logs) s.Add(std::exp(l - top));
  return s.value() * std::exp(top);
}

std::string PrefixString(const std::vector<int>& prefix) {
  return absl::StrCat("[", absl::StrJoin(prefix, ","), "]");
}

class LossEnumerator {
 public:
  LossEnumerator(const RecommendationAlgorithm& algorithm,
                 const Instance& instance)
      : algorithm_(algorithm),
        instance_(instance),
        per_round_(instance.num_rounds) {}

  absl::Status Run() {
    return Visit(0, algorithm_.InitialState(instance_.pattern), 0.0);
  }

  LossReport Report() const {
    LossReport report;
    CompensatedSum total;
    for (const CompensatedSum& s : per_round_) {
      report.per_round_expected_loss.push_back(s.value());
      total.Add(s.value());
    }
    report.expected_loss = total.value();
    report.total_probability = SumExpLogs(leaf_logs_);
    return report;
  }

 private:
  absl::Status Visit(int t, const AlgoState& state, double log_pr) {
    if (t == instance_.num_rounds) {
      leaf_logs_.push_back(log_pr);
      return absl::OkStatus();
    }
    absl::StatusOr<RoundDistribution> dist =
        algorithm_.Distribution(state, instance_.pattern, t);
    if (!dist.ok()) return dist.status();
    const double pr_prefix = std::exp(log_pr);
    for (int j = 0; j < dist->size(); ++j) {
      const double p = dist->probs[j];
      if (p <= 0) continue;
      const bool liked = instance_.client.Likes(t, j);
      if (!liked) per_round_[t].Add(pr_prefix * p);
      absl::Status s =
          Visit(t + 1, algorithm_.Update(state, instance_.pattern, t, j, liked),
                log_pr + std::log(p));
      if (!s.ok()) return s;
    }
    return absl::OkStatus();
  }

  const RecommendationAlgorithm& algorithm_;
  const Instance& instance_;
  std::vector<CompensatedSum> per_round_;
  std::vector<double> leaf_logs_;
};

class LeakageEnumerator {
 public:
  LeakageEnumerator(const RecommendationAlgorithm& algorithm,
                    const Instance& instance, const VotingPattern& adjacent,
                    const LeakageOptions& options)
      : algorithm_(algorithm),
        instance_(instance),
        adjacent_(adjacent),
        options_(options) {
    report_.pair_id = options.pair_id;
    report_.num_objects = instance.num_objects;
    report_.primary_is_larger = instance.pattern.size() > adjacent.size();
  }

  absl::Status Run() {
    std::vector<int> prefix;
    prefix.reserve(instance_.num_rounds);
    return Visit(0, algorithm_.InitialState(instance_.pattern),
                 algorithm_.InitialState(adjacent_), 0.0, 0.0, 0.0, prefix);
  }

  LeakageReport Finish() && {
    report_.total_probability = SumExpLogs(logs_);
    report_.total_probability_prime = SumExpLogs(logs_prime_);
    report_.kl_forward = kl_.value();
    if (const AlgoParams* params = algorithm_.params()) {
      auto append = [&](std::vector<std::string> v) {
        for (std::string& s : v) {
          report_.per_round_violations.push_back(std::move(s));
        }
      };
      if (params->diversity == 0 && params->radius == 0) {
        append(CheckLeakagePerWeight(report_.rounds, *params));
        append(CheckWeightShrinkage(report_.rounds, instance_.num_objects));
      }
      append(CheckCreditLeakageAndShrinkage(report_.rounds, *params,
                                            instance_.num_objects));
    }
    if (!options_.keep_rounds) report_.rounds.clear();
    return std::move(report_);
  }

 private:
  absl::Status Visit(int t, const AlgoState& state,
                     const AlgoState& state_prime, double log_pr,
                     double log_pr_prime, double leakage_sum,
                     std::vector<int>& prefix) {
    if (t == instance_.num_rounds) {
      Leaf(log_pr, log_pr_prime, leakage_sum, prefix);
      return absl::OkStatus();
    }
    absl::StatusOr<RoundDistribution> dist =
        algorithm_.Distribution(state, instance_.pattern, t);
    if (!dist.ok()) return dist.status();
    absl::StatusOr<RoundDistribution> dist_prime =
        algorithm_.Distribution(state_prime, adjacent_, t);
    if (!dist_prime.ok()) return dist_prime.status();

    const AlgoState& larger = report_.primary_is_larger ? state : state_prime;
    for (int j = 0; j < dist->size(); ++j) {
      const double p = dist->probs[j];
      const double p_prime = dist_prime->probs[j];
      if (p <= 0 && p_prime <= 0) continue;
      const double log_p = SafeLog(p);
      const double log_p_prime = SafeLog(p_prime);
      const double leakage = log_p - log_p_prime;
      const bool liked = instance_.client.Likes(t, j);
      AlgoState next = algorithm_.Update(state, instance_.pattern, t, j, liked);
      AlgoState next_prime =
          algorithm_.Update(state_prime, adjacent_, t, j, liked);
      prefix.push_back(j);
      const AlgoState& larger_next =
          report_.primary_is_larger ? next : next_prime;
      report_.rounds.push_back({t, prefix, leakage, larger.SurvivingWeight(),
                                larger_next.SurvivingWeight(),
                                larger.SurvivingCredit(),
                                larger_next.SurvivingCredit()});
      absl::Status s =
          Visit(t + 1, next, next_prime, log_pr + log_p,
                log_pr_prime + log_p_prime, leakage_sum + leakage, prefix);
      prefix.pop_back();
      if (!s.ok()) return s;
    }
    return absl::OkStatus();
  }

  void Leaf(double log_pr, double log_pr_prime, double leakage_sum,
            const std::vector<int>& prefix) {
    logs_.push_back(log_pr);
    logs_prime_.push_back(log_pr_prime);
    report_.max_abs_leakage =
        std::max(report_.max_abs_leakage, std::abs(leakage_sum));
    if (std::isfinite(log_pr) && std::isfinite(log_pr_prime)) {
      report_.max_direct_mismatch =
          std::max(report_.max_direct_mismatch,
                   std::abs(leakage_sum - (log_pr - log_pr_prime)));
    }
    if (std::isfinite(log_pr)) kl_.Add(std::exp(log_pr) * leakage_sum);
    if (options_.keep_sequences) {
      report_.per_sequence.push_back(
          {prefix, log_pr, log_pr_prime, leakage_sum});
    }
  }

  const RecommendationAlgorithm& algorithm_;
  const Instance& instance_;
  const VotingPattern& adjacent_;
  LeakageOptions options_;
  LeakageReport report_;
  std::vector<double> logs_;
  std::vector<double> logs_prime_;
  CompensatedSum kl_;
};

}  // namespace

absl::StatusOr<uint64_t> SequenceCount(int num_objects, int num_rounds,
                                       uint64_t cap) {
  if (num_objects < 1 || num_rounds < 0) {
    return absl::InvalidArgumentError("bad instance shape");
  }
  long double count = std::pow(static_cast<long double>(num_objects),
                               static_cast<long double>(num_rounds));
  if (count > static_cast<long double>(cap)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "enumeration needs m^T = %d^%d = %.0Lf sequences, cap is %d; rerun "
        "with cap >= %.0Lf",
        num_objects, num_rounds, count, cap, count));
  }
  return static_cast<uint64_t>(count);
}

absl::StatusOr<LossReport> ExactLoss(const RecommendationAlgorithm& algorithm,
                                     const Instance& instance, uint64_t cap) {
  absl::StatusOr<uint64_t> count =
      SequenceCount(instance.num_objects, instance.num_rounds, cap);
  if (!count.ok()) return count.status();
  LossEnumerator e(algorithm, instance);
  if (absl::Status s = e.Run(); !s.ok()) return s;
  return e.Report();
}

absl::StatusOr<LeakageReport> ExactLeakage(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    const VotingPattern& adjacent, const LeakageOptions& options) {
  if (!IsAdjacentStep(instance.pattern, adjacent)) {
    return absl::InvalidArgumentError(
        "patterns are not adjacent (need exactly one voter difference and "
        "identical shared votes)");
  }
  absl::StatusOr<uint64_t> count =
      SequenceCount(instance.num_objects, instance.num_rounds, options.cap);
  if (!count.ok()) return count.status();
  LeakageEnumerator e(algorithm, instance, adjacent, options);
  if (absl::Status s = e.Run(); !s.ok()) return s;
  return std::move(e).Finish();
}

std::vector<std::string> CheckLeakagePerWeight(
    std::span<const RoundLeakage> rounds, const AlgoParams& params) {
  std::vector<std::string> out;
  for (const RoundLeakage& r : rounds) {
    if (r.w == 0) continue;
    const double bound = 3 * params.lambda / r.w;
    if (!(std::abs(r.leakage) <= bound + kBoundTolerance)) {
      out.push_back(absl::StrFormat(
          "per-round leakage: t=%d b=%s |E_t|=%.12g > 3*lambda/W=%.12g (W=%d)",
          r.t, PrefixString(r.prefix), std::abs(r.leakage), bound, r.w));
    }
  }
  return out;
}

std::vector<std::string> CheckWeightShrinkage(
    std::span<const RoundLeakage> rounds, int num_objects) {
  std::vector<std::string> out;
  const double shrink = 1 - 1.0 / (3.0 * num_objects);
  for (const RoundLeakage& r : rounds) {
    if (!(std::abs(r.leakage) > kLeakageZeroThreshold)) continue;
    if (!(r.w_next <= r.w * shrink + kBoundTolerance)) {
      out.push_back(absl::StrFormat(
          "weight shrinkage: t=%d b=%s W_next=%d > W*(1-1/3m)=%.12g", r.t,
          PrefixString(r.prefix), r.w_next, r.w * shrink));
    }
  }
  return out;
}

std::vector<std::string> CheckCreditLeakageAndShrinkage(
    std::span<const RoundLeakage> rounds, const AlgoParams& params,
    int num_objects) {
  std::vector<std::string> out;
  const double budget = 2.0 * params.diversity + 2.0 * params.radius + 1;
  const double shrink = 1 - 1.0 / (3.0 * num_objects * budget);
  for (const RoundLeakage& r : rounds) {
    if (r.c > 0) {
      const double bound = 3 * budget * params.lambda / r.c;
      if (!(std::abs(r.leakage) <= bound + kBoundTolerance)) {
        out.push_back(absl::StrFormat(
            "per-round credit leakage: t=%d b=%s |E_t|=%.12g > "
            "3(2D+2R+1)*lambda/C=%.12g (C=%d)",
            r.t, PrefixString(r.prefix), std::abs(r.leakage), bound, r.c));
      }
    }
    if (std::abs(r.leakage) > kLeakageZeroThreshold &&
        !(r.c_next <= r.c * shrink + kBoundTolerance)) {
      out.push_back(absl::StrFormat(
          "credit shrinkage: t=%d b=%s C_next=%d > C*(1-1/(3m(2D+2R+1)))=%.12g",
          r.t, PrefixString(r.prefix), r.c_next, r.c * shrink));
    }
  }
  return out;
}

bool BoundsApply(int num_objects, int peers) {
  return peers >= 6 * num_objects;
}

Bound EpsilonBoundSim(int m, int T, int P) {
  Bound b;
  b.value = P > 0 ? 18.0 * m * m * std::log(static_cast<double>(T)) / P : kInf;
  if (!BoundsApply(m, P)) {
    b.precondition_ok = false;
    b.warning = absl::StrCat("P=", P, " < 6m=", 6 * m,
                             "; bound is outside its proven regime");
  }
  return b;
}

Bound EpsilonBoundGeneral(int m, int T, int P, int D, int R) {
  Bound b;
  b.value = P > 0 ? 36.0 * m * m * (2.0 * D + 2.0 * R + 1) *
                        std::log(static_cast<double>(T) / (R + 1)) / P
                  : kInf;
  if (!BoundsApply(m, P)) {
    b.precondition_ok = false;
    b.warning = absl::StrCat("P=", P, " < 6m=", 6 * m,
                             "; bound is outside its proven regime");
  } else if (R >= T) {
    b.precondition_ok = false;
    b.warning = absl::StrCat("R=", R, " >= T=", T);
  }
  return b;
}

Bound LossBoundSim(int m, int n, int P) {
  Bound b;
  b.value =
      P > 0 ? 2.0 * m * std::log(static_cast<double>(n) / P) + m / 2.0 : kInf;
  if (!(n >= P && P >= 1)) {
    b.precondition_ok = false;
    b.warning = absl::StrCat("requires n >= P >= 1, got n=", n, " P=", P);
  }
  return b;
}

Bound LossBoundGeneral(int m, int n, int P, int R, double gamma, int T) {
  Bound b;
  const double rho = 1.0 / (2.0 * m);
  b.value = P > 0 ? ((2.0 * R + 1) / rho) *
                            std::log((2.0 * R + 1) * n / ((R + 1.0) * P)) +
                        gamma * T
                  : kInf;
  if (!(n >= P && P >= 1)) {
    b.precondition_ok = false;
    b.warning = absl::StrCat("requires n >= P >= 1, got n=", n, " P=", P);
  }
  return b;
}

absl::StatusOr<double> ChainLeakageBound(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    std::span<const VotingPattern> chain, uint64_t cap) {
  double total = 0;
  for (size_t k = 0; k + 1 < chain.size(); ++k) {
    Instance step = instance;
    step.pattern = chain[k];
    LeakageOptions options;
    options.cap = cap;
    options.keep_sequences = false;
    options.keep_rounds = false;
    absl::StatusOr<LeakageReport> r =
        ExactLeakage(algorithm, step, chain[k + 1], options);
    if (!r.ok()) {
      return absl::Status(
          r.status().code(),
          absl::StrCat("chain step ", k, ": ", r.status().message()));
    }
    total += r->max_abs_leakage;
  }
  return total;
}

nlohmann::json LossReportToJson(const LossReport& report) {
  return {{"expected_loss", report.expected_loss},
          {"per_round_expected_loss", report.per_round_expected_loss},
          {"total_probability", report.total_probability}};
}

namespace {

// JSON has no infinity; encode it as a string.
nlohmann::json Real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json LeakageReportToJson(const LeakageReport& report,
                                   bool include_sequences) {
  nlohmann::json doc{
      {"pair_id", report.pair_id},
      {"max_abs_E", Real(report.max_abs_leakage)},
      {"kl_forward", Real(report.kl_forward)},
      {"total_probability", report.total_probability},
      {"total_probability_prime", report.total_probability_prime},
      {"per_round_violations", report.per_round_violations}};
  if (include_sequences) {
    nlohmann::json rows = nlohmann::json::array();
    for (const SequenceLeakage& s : report.per_sequence) {
      rows.push_back({{"b", s.picks},
                      {"logPr", Real(s.log_pr)},
                      {"logPr_prime", Real(s.log_pr_prime)},
                      {"E", Real(s.leakage)}});
    }
    doc["per_sequence"] = std::move(rows);
  }
  return doc;
}

std::string LeakageCsvHeader() {
  return "pair_id,max_abs_E,kl_forward,bound,margin";
}

std::string LeakageCsvRow(const LeakageReport& report, double bound) {
  return absl::StrFormat("%s,%.17g,%.17g,%.17g,%.17g", report.pair_id,
                         report.max_abs_leakage, report.kl_forward, bound,
                         bound - report.max_abs_leakage);
}

}  // namespace privrec

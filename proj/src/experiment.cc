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

#include "privrec/experiment.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "privrec/adversary.h"
#include "privrec/algorithm.h"
#include "privrec/episode.h"
#include "privrec/instance_io.h"
#include "privrec/model.h"
#include "privrec/rng.h"

namespace privrec {

namespace {

using json = nlohmann::json;

constexpr double kProbabilityTolerance = 1e-9;
constexpr int kMaxLemmaMessages = 10;

// ---------------------------------------------------------------------------
// Config decoding.

template <typename T>
absl::Status ReadField(const json& doc, const char* key, T& value) {
  if (!doc.contains(key)) return absl::OkStatus();
  const json& v = doc[key];
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", key, "' must be a boolean"));
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", key, "' must be an integer"));
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", key, "' must be a string"));
    }
  } else if constexpr (std::is_same_v<T, std::vector<int>>) {
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) {
          return e.is_number_integer();
        })) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", key, "' must be an array of integers"));
    }
  }
  value = v.get<T>();
  return absl::OkStatus();
}

absl::Status CheckKeys(const json& doc, std::string_view where,
                       std::initializer_list<std::string_view> known) {
  if (!doc.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", std::string(where), "' must be an object"));
  }
  for (const auto& [key, unused] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown field '",
          where.empty() ? "" : absl::StrCat(std::string(where), "."), key,
          "'"));
    }
  }
  return absl::OkStatus();
}

#define PRIVREC_RETURN_IF_ERROR(expr)  \
  do {                                 \
    absl::Status status_ = (expr);     \
    if (!status_.ok()) return status_; \
  } while (false)

absl::Status ReadStyle(const json& doc, std::string_view where,
                       NonPeerStyle& style) {
  std::string name;
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "style", name));
  if (name.empty()) return absl::OkStatus();
  if (name == "staggered") {
    style = NonPeerStyle::kStaggered;
  } else if (name == "block") {
    style = NonPeerStyle::kBlock;
  } else if (name == "random") {
    style = NonPeerStyle::kRandom;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", std::string(where),
                     "' must be \"staggered\", \"block\" or \"random\"; got \"",
                     name, "\""));
  }
  return absl::OkStatus();
}

absl::StatusOr<PeerFamilySpec> GeneratorFromJson(const json& doc) {
  PRIVREC_RETURN_IF_ERROR(CheckKeys(doc, "generator",
                                    {"m", "T", "n", "P", "D", "R", "style",
                                     "client_seed", "assignment_seed"}));
  PeerFamilySpec spec;
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "m", spec.num_objects));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "T", spec.num_rounds));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "n", spec.voters));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "P", spec.peers));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "D", spec.diversity));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "R", spec.radius));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "client_seed", spec.client_seed));
  PRIVREC_RETURN_IF_ERROR(
      ReadField(doc, "assignment_seed", spec.assignment_seed));
  PRIVREC_RETURN_IF_ERROR(ReadStyle(doc, "generator.style", spec.style));
  return spec;
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string Timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string Real(double v) {
  if (std::isnan(v)) return "";
  return absl::StrFormat("%.17g", v);
}

json JsonReal(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

class Output {
 public:
  Output(const ExperimentConfig& config, std::ostream& out, std::ostream& err)
      : config_(config), out_(out), err_(err) {}

  // CSV with an optional leading timestamp comment line.
  absl::Status WriteCsv(const std::string& header,
                        const std::vector<std::string>& rows) {
    std::ostringstream csv;
    if (config_.timestamp) csv << "# generated " << Timestamp() << "\n";
    csv << header << "\n";
    for (const std::string& row : rows) csv << row << "\n";
    if (config_.out.empty()) {
      // Without a prefix the sweep prints its CSV, other modes their JSON.
      if (config_.mode == "sweep") out_ << csv.str();
      return absl::OkStatus();
    }
    std::ofstream file(config_.out + ".csv");
    if (!file) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot write ", config_.out, ".csv"));
    }
    file << csv.str();
    return absl::OkStatus();
  }

  absl::Status WriteReport(const json& report) {
    if (config_.out.empty()) {
      if (config_.mode != "sweep") out_ << report.dump(2) << "\n";
      return absl::OkStatus();
    }
    return WriteJsonFile(config_.out + ".json", report);
  }

  std::ostream& err() { return err_; }

 private:
  const ExperimentConfig& config_;
  std::ostream& out_;
  std::ostream& err_;
};

int ExitFor(const absl::Status& status, std::ostream& err) {
  err << "error: " << status.message() << "\n";
  switch (status.code()) {
    case absl::StatusCode::kResourceExhausted:
      return kExitCap;
    case absl::StatusCode::kInternal:
      return kExitInvariant;
    default:
      return kExitUsage;
  }
}

// Tracks assertion failures and warnings for one run.
class Findings {
 public:
  explicit Findings(bool strict) : strict_(strict) {}

  void Violation(std::string message) {
    violations_.push_back(std::move(message));
  }
  void Warning(std::string message) { warnings_.push_back(std::move(message)); }
  // Failure of an inequality that is only proved for P >= 6m.
  void BoundCheck(bool applies, std::string message) {
    if (applies) {
      Violation(std::move(message));
    } else {
      Warning(std::move(message));
    }
  }

  json ToJson() const {
    return {{"violations", violations_}, {"warnings", warnings_}};
  }

  int Finish(std::ostream& err) const {
    for (const std::string& w : warnings_) err << "warning: " << w << "\n";
    for (const std::string& v : violations_) err << "violation: " << v << "\n";
    if (!violations_.empty() || (strict_ && !warnings_.empty())) {
      return kExitInvariant;
    }
    return kExitOk;
  }

 private:
  bool strict_;
  std::vector<std::string> violations_;
  std::vector<std::string> warnings_;
};

absl::StatusOr<Instance> LoadInstance(const ExperimentConfig& config) {
  absl::StatusOr<Instance> instance;
  if (!config.instance_path.empty()) {
    instance = ReadInstanceFile(config.instance_path);
  } else if (config.generator.has_value()) {
    instance = BuildPeerFamilyInstance(*config.generator);
  } else {
    return absl::InvalidArgumentError(
        "mode needs --instance or a 'generator' entry in --config");
  }
  if (!instance.ok()) return instance.status();
  std::vector<Violation> violations = Validate(*instance);
  if (!violations.empty()) {
    std::vector<std::string> lines;
    for (const Violation& v : violations) lines.push_back(v.message);
    return absl::InvalidArgumentError(
        absl::StrCat("invalid instance: ", absl::StrJoin(lines, "; ")));
  }
  return instance;
}

absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> LoadAlgorithm(
    const ExperimentConfig& config, const Instance& instance) {
  absl::StatusOr<AlgorithmKind> kind = ParseAlgorithmKind(config.algorithm);
  if (!kind.ok()) return kind.status();
  return MakeAlgorithm(*kind, instance);
}

// Leakage bound matching the algorithm, or nullopt for baselines.
std::optional<Bound> EpsilonBoundFor(const RecommendationAlgorithm& algorithm,
                                     const Instance& instance) {
  const AlgoParams* params = algorithm.params();
  if (params == nullptr) return std::nullopt;
  if (algorithm.name() == AlgorithmName(AlgorithmKind::kPRecSim)) {
    return EpsilonBoundSim(instance.num_objects, instance.num_rounds,
                           instance.peers);
  }
  return EpsilonBoundGeneral(instance.num_objects, instance.num_rounds,
                             instance.peers, params->diversity, params->radius);
}

std::optional<Bound> LossBoundFor(const RecommendationAlgorithm& algorithm,
                                  const Instance& instance) {
  const AlgoParams* params = algorithm.params();
  if (params == nullptr || instance.peers < 1) return std::nullopt;
  if (algorithm.name() == AlgorithmName(AlgorithmKind::kPRecSim)) {
    return LossBoundSim(instance.num_objects, instance.voters, instance.peers);
  }
  return LossBoundGeneral(instance.num_objects, instance.voters, instance.peers,
                          params->radius, params->gamma, instance.num_rounds);
}

// ---------------------------------------------------------------------------
// Modes.

int RunLoss(const ExperimentConfig& config, Output& output) {
  absl::StatusOr<Instance> instance = LoadInstance(config);
  if (!instance.ok()) return ExitFor(instance.status(), output.err());
  absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> algorithm =
      LoadAlgorithm(config, *instance);
  if (!algorithm.ok()) return ExitFor(algorithm.status(), output.err());
  absl::StatusOr<LossReport> exact =
      ExactLoss(**algorithm, *instance, config.cap);
  if (!exact.ok()) return ExitFor(exact.status(), output.err());

  Findings findings(config.strict);
  if (std::abs(exact->total_probability - 1) > kProbabilityTolerance) {
    findings.Violation(
        absl::StrCat("total probability ", exact->total_probability, " != 1"));
  }
  if ((*algorithm)->params() != nullptr &&
      (*algorithm)->params()->manual_override) {
    findings.Warning("manually overridden parameters");
  }
  std::optional<Bound> bound = LossBoundFor(**algorithm, *instance);
  if (bound.has_value()) {
    if (!bound->precondition_ok) findings.Warning(bound->warning);
    if (exact->expected_loss > bound->value + kBoundTolerance) {
      findings.BoundCheck(bound->precondition_ok,
                          absl::StrCat("expected loss ", exact->expected_loss,
                                       " exceeds bound ", bound->value));
    }
  }

  double sum = 0;
  double sum_sq = 0;
  std::ofstream trace;
  if (!config.out.empty()) trace.open(config.out + ".trace.jsonl");
  for (int i = 0; i < config.num_seeds; ++i) {
    const uint64_t seed = config.seed + static_cast<uint64_t>(i);
    absl::StatusOr<EpisodeResult> episode =
        RunEpisode(**algorithm, *instance, seed, i == 0);
    if (!episode.ok()) return ExitFor(episode.status(), output.err());
    if (i == 0 && trace.is_open())
      WriteTraceJsonl(trace, *episode, **algorithm);
    sum += episode->loss;
    sum_sq += static_cast<double>(episode->loss) * episode->loss;
  }
  const int n = config.num_seeds;
  const double mean = n > 0 ? sum / n : 0;
  const double var = n > 1 ? (sum_sq - n * mean * mean) / (n - 1) : 0;
  const double stderr_mean = n > 0 ? std::sqrt(std::max(0.0, var) / n) : 0;

  const double bound_value = bound.has_value()
                                 ? bound->value
                                 : std::numeric_limits<double>::quiet_NaN();
  json report{{"mode", "loss"},
              {"algorithm", (*algorithm)->name()},
              {"T", instance->num_rounds},
              {"m", instance->num_objects},
              {"exact", LossReportToJson(*exact)},
              {"episodes",
               {{"seeds", n},
                {"first_seed", config.seed},
                {"mean_loss", mean},
                {"standard_error", stderr_mean}}},
              {"loss_bound", JsonReal(bound_value)},
              {"checks", findings.ToJson()}};
  absl::Status s = output.WriteReport(report);
  if (s.ok()) {
    s = output.WriteCsv(
        "algo,expected_loss,episode_mean_loss,episodes,loss_bound,margin",
        {absl::StrCat((*algorithm)->name(), ",", Real(exact->expected_loss),
                      ",", Real(mean), ",", n, ",", Real(bound_value), ",",
                      Real(bound_value - exact->expected_loss))});
  }
  if (!s.ok()) return ExitFor(s, output.err());
  return findings.Finish(output.err());
}

struct LeakageSummary {
  std::vector<LeakageReport> reports;
  double max_abs_leakage = 0;
};

// Exact leakage of every removal-adjacent pair; records findings.
absl::StatusOr<LeakageSummary> AllRemovalPairs(
    const RecommendationAlgorithm& algorithm, const Instance& instance,
    const ExperimentConfig& config, std::optional<Bound> bound,
    Findings& findings) {
  absl::StatusOr<std::vector<VotingPattern>> neighbors =
      NeighborsByRemoval(instance.pattern);
  if (!neighbors.ok()) return neighbors.status();
  const bool applies = BoundsApply(instance.num_objects, instance.peers);
  LeakageSummary summary;
  for (size_t i = 0; i < neighbors->size(); ++i) {
    LeakageOptions options;
    options.cap = config.cap;
    options.keep_sequences = config.include_sequences;
    options.keep_rounds = false;
    options.pair_id = absl::StrCat("-", instance.pattern.voters[i].id.value);
    absl::StatusOr<LeakageReport> report =
        ExactLeakage(algorithm, instance, (*neighbors)[i], options);
    if (!report.ok()) return report.status();
    const std::string& id = report->pair_id;
    for (double total :
         {report->total_probability, report->total_probability_prime}) {
      if (std::abs(total - 1) > kProbabilityTolerance) {
        findings.Violation(
            absl::StrCat(id, ": total probability ", total, " != 1"));
      }
    }
    if (report->kl_forward < -kProbabilityTolerance) {
      findings.Violation(
          absl::StrCat(id, ": negative kl_forward ", report->kl_forward));
    }
    if (report->max_direct_mismatch > kProbabilityTolerance) {
      findings.Violation(absl::StrCat(id, ": sum of E_t differs from E by ",
                                      report->max_direct_mismatch));
    }
    for (const std::string& v : report->per_round_violations) {
      findings.BoundCheck(applies, absl::StrCat(id, ": ", v));
    }
    if (bound.has_value() &&
        report->max_abs_leakage > bound->value + kBoundTolerance) {
      findings.BoundCheck(applies,
                          absl::StrCat(id, ": max|E| ", report->max_abs_leakage,
                                       " exceeds bound ", bound->value));
    }
    summary.max_abs_leakage =
        std::max(summary.max_abs_leakage, report->max_abs_leakage);
    summary.reports.push_back(*std::move(report));
  }
  return summary;
}

int RunLeakage(const ExperimentConfig& config, Output& output) {
  absl::StatusOr<Instance> instance = LoadInstance(config);
  if (!instance.ok()) return ExitFor(instance.status(), output.err());
  absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> algorithm =
      LoadAlgorithm(config, *instance);
  if (!algorithm.ok()) return ExitFor(algorithm.status(), output.err());

  Findings findings(config.strict);
  std::optional<Bound> bound = EpsilonBoundFor(**algorithm, *instance);
  if (bound.has_value() && !bound->precondition_ok) {
    findings.Warning(bound->warning);
  }
  absl::StatusOr<LeakageSummary> summary =
      AllRemovalPairs(**algorithm, *instance, config, bound, findings);
  if (!summary.ok()) return ExitFor(summary.status(), output.err());

  const double bound_value = bound.has_value()
                                 ? bound->value
                                 : std::numeric_limits<double>::quiet_NaN();
  json pairs = json::array();
  std::vector<std::string> rows;
  for (const LeakageReport& r : summary->reports) {
    pairs.push_back(LeakageReportToJson(r, config.include_sequences));
    rows.push_back(LeakageCsvRow(r, bound_value));
  }
  json report{{"mode", "leakage"},
              {"algorithm", (*algorithm)->name()},
              {"T", instance->num_rounds},
              {"m", instance->num_objects},
              {"P", instance->peers},
              {"max_abs_E", JsonReal(summary->max_abs_leakage)},
              {"epsilon_bound", JsonReal(bound_value)},
              {"margin", JsonReal(bound_value - summary->max_abs_leakage)},
              {"pairs", std::move(pairs)},
              {"checks", findings.ToJson()}};
  absl::Status s = output.WriteReport(report);
  if (s.ok()) s = output.WriteCsv(LeakageCsvHeader(), rows);
  if (!s.ok()) return ExitFor(s, output.err());
  return findings.Finish(output.err());
}

int RunSweep(const ExperimentConfig& config, Output& output) {
  const SweepGrid& g = config.grid;
  std::vector<std::tuple<int, int, int, int, int>> cells;
  for (int T : g.rounds) {
    for (int D : g.diversity) {
      for (int R : g.radius) {
        for (int P : g.peers) {
          for (int n : g.voters) cells.emplace_back(T, D, R, P, n);
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  Findings findings(config.strict);
  std::vector<std::string> rows;
  json cell_reports = json::array();
  for (const auto& [T, D, R, P, n] : cells) {
    const std::string key =
        absl::StrFormat("T=%d D=%d R=%d P=%d n=%d", T, D, R, P, n);
    PeerFamilySpec spec;
    spec.num_objects = g.num_objects;
    spec.num_rounds = T;
    spec.diversity = D;
    spec.radius = R;
    spec.peers = P;
    spec.voters = n;
    spec.style = g.style;
    spec.client_seed = config.seed;
    spec.assignment_seed = config.seed;
    absl::StatusOr<Instance> instance = BuildPeerFamilyInstance(spec);
    if (!instance.ok()) {
      findings.Warning(
          absl::StrCat(key, " skipped: ", instance.status().message()));
      continue;
    }
    absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> algorithm =
        LoadAlgorithm(config, *instance);
    if (!algorithm.ok()) {
      findings.Warning(
          absl::StrCat(key, " skipped: ", algorithm.status().message()));
      continue;
    }
    const bool exact = SequenceCount(g.num_objects, T, config.cap).ok();
    double loss = 0;
    double max_abs = std::numeric_limits<double>::quiet_NaN();
    if (exact) {
      absl::StatusOr<LossReport> report =
          ExactLoss(**algorithm, *instance, config.cap);
      if (!report.ok()) return ExitFor(report.status(), output.err());
      loss = report->expected_loss;
    } else {
      // Sampled cell: episode mean loss, no leakage figure.
      for (int i = 0; i < config.num_seeds; ++i) {
        absl::StatusOr<EpisodeResult> episode =
            RunEpisode(**algorithm, *instance,
                       config.seed + static_cast<uint64_t>(i), false);
        if (!episode.ok()) return ExitFor(episode.status(), output.err());
        loss += episode->loss;
      }
      loss /= std::max(1, config.num_seeds);
    }
    std::optional<Bound> loss_bound = LossBoundFor(**algorithm, *instance);
    std::optional<Bound> eps_bound = EpsilonBoundFor(**algorithm, *instance);
    if (exact && n > 0) {
      absl::StatusOr<LeakageSummary> summary =
          AllRemovalPairs(**algorithm, *instance, config, eps_bound, findings);
      if (!summary.ok()) return ExitFor(summary.status(), output.err());
      max_abs = summary->max_abs_leakage;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double lb = loss_bound ? loss_bound->value : nan;
    const double eb = eps_bound ? eps_bound->value : nan;
    if (exact && loss_bound && loss > lb + kBoundTolerance) {
      findings.BoundCheck(
          loss_bound->precondition_ok,
          absl::StrCat(key, ": expected loss ", loss, " exceeds bound ", lb));
    }
    rows.push_back(absl::StrCat(
        "1,", g.num_objects, ",", T, ",", D, ",", R, ",", P, ",", n, ",",
        (*algorithm)->name(), ",", exact ? "exact" : "sampled", ",", Real(loss),
        ",", Real(lb), ",", Real(max_abs), ",", Real(eb)));
    cell_reports.push_back({{"cell", key},
                            {"exact", exact},
                            {"loss", loss},
                            {"loss_bound", JsonReal(lb)},
                            {"max_abs_E", JsonReal(max_abs)},
                            {"epsilon_bound", JsonReal(eb)}});
  }
  json report{{"mode", "sweep"},
              {"algorithm", config.algorithm},
              {"cells", std::move(cell_reports)},
              {"checks", findings.ToJson()}};
  absl::Status s = output.WriteCsv(SweepCsvHeader(), rows);
  if (s.ok()) s = output.WriteReport(report);
  if (!s.ok()) return ExitFor(s, output.err());
  return findings.Finish(output.err());
}

json EstimateToJson(const LeakageEstimate& e) {
  return {{"mean", JsonReal(e.mean)},
          {"standard_error", JsonReal(e.standard_error)},
          {"min_round_term", JsonReal(e.min_round_term)},
          {"paths", e.paths}};
}

int RunAdversaryDemo(const ExperimentConfig& config, Output& output) {
  const AdversaryDemoSpec& a = config.adversary;
  Instance shape;
  shape.num_rounds = a.num_rounds;
  shape.num_objects = 2;
  shape.diversity = a.diversity;
  shape.radius = a.radius;
  shape.peers = a.copies;
  shape.voters = a.copies;
  absl::StatusOr<std::unique_ptr<RecommendationAlgorithm>> algorithm =
      LoadAlgorithm(config, shape);
  if (!algorithm.ok()) return ExitFor(algorithm.status(), output.err());

  Findings findings(config.strict);
  absl::StatusOr<Configuration> adaptive = BuildAdaptiveConfiguration(
      **algorithm, a.num_rounds, a.diversity, a.radius, config.seed, a.copies);
  if (!adaptive.ok()) return ExitFor(adaptive.status(), output.err());
  absl::StatusOr<LeakageEstimate> adaptive_estimate =
      EstimateExpectedLeakage(**algorithm, *adaptive, a.paths, config.seed);
  if (!adaptive_estimate.ok()) {
    return ExitFor(adaptive_estimate.status(), output.err());
  }
  absl::StatusOr<LeakageEstimate> oblivious_estimate =
      EstimateObliviousLeakage(**algorithm, a.num_rounds, a.diversity, a.radius,
                               a.copies, a.paths, config.seed);
  if (!oblivious_estimate.ok()) {
    return ExitFor(oblivious_estimate.status(), output.err());
  }
  for (const LeakageEstimate* e : {&*adaptive_estimate, &*oblivious_estimate}) {
    if (e->min_round_term < -kProbabilityTolerance) {
      findings.Violation(absl::StrCat("negative per-round relative entropy ",
                                      e->min_round_term));
    }
  }
  for (const std::string& w : adaptive->warnings) findings.Warning(w);

  std::vector<std::string> rows;
  for (int t = 0; t < a.num_rounds; ++t) {
    rows.push_back(absl::StrCat(
        t, ",", std::string(CaseTagName(adaptive->case_tags[t])), ",",
        std::string(SettingName(adaptive->setting_log[t])), ",",
        adaptive->picks[t], ",", Real(adaptive->expected_loss[t]), ",",
        Real(adaptive->expected_leakage[t])));
  }
  json report{
      {"mode", "adversary-demo"},
      {"algorithm", (*algorithm)->name()},
      {"T", a.num_rounds},
      {"D", a.diversity},
      {"R", a.radius},
      {"copies", a.copies},
      {"adaptive",
       {{"instance", InstanceToJson(adaptive->AsInstance())},
        {"sidecar", ConfigurationSidecarToJson(*adaptive)},
        {"estimate", EstimateToJson(*adaptive_estimate)}}},
      {"oblivious", {{"estimate", EstimateToJson(*oblivious_estimate)}}},
      {"checks", findings.ToJson()}};
  absl::Status s = output.WriteReport(report);
  if (s.ok()) {
    s = output.WriteCsv("t,case,setting,pick,expected_loss,expected_leakage",
                        rows);
  }
  if (!s.ok()) return ExitFor(s, output.err());
  return findings.Finish(output.err());
}

int RunLemmaSuite(const ExperimentConfig& config, Output& output) {
  // lambda = 2m ln T at (m, T) = (2, 8), (3, 64), (2, 1024).
  const std::vector<PhiParams> grid = {
      {4 * std::log(8.0), 0.25},
      {6 * std::log(64.0), 1.0 / 6},
      {4 * std::log(1024.0), 0.25},
  };
  Findings findings(config.strict);
  std::vector<std::string> rows;
  json runs = json::array();
  for (size_t i = 0; i < grid.size(); ++i) {
    LemmaSweepReport r =
        SweepPhiLemmas(grid[i], config.lemma_trials, StreamKey(config.seed, i));
    for (const std::string& m : r.messages) findings.Violation(m);
    rows.push_back(absl::StrCat(
        Real(grid[i].lambda), ",", Real(grid[i].rho), ",", r.trials, ",",
        r.shift_bound_violations, ",", r.ratio_bound_violations, ",",
        r.shift_transfer_violations, ",", r.boundary_violations));
    runs.push_back({{"lambda", grid[i].lambda},
                    {"rho", grid[i].rho},
                    {"trials", r.trials},
                    {"shift_bound_violations", r.shift_bound_violations},
                    {"ratio_bound_violations", r.ratio_bound_violations},
                    {"shift_transfer_violations", r.shift_transfer_violations},
                    {"boundary_violations", r.boundary_violations}});
    if (r.total_violations() > static_cast<int64_t>(r.messages.size())) {
      findings.Violation(absl::StrCat(
          r.total_violations() - static_cast<int64_t>(r.messages.size()),
          " further violations not listed"));
    }
  }
  json report{{"mode", "lemma-suite"},
              {"runs", std::move(runs)},
              {"checks", findings.ToJson()}};
  absl::Status s = output.WriteReport(report);
  if (s.ok()) {
    s = output.WriteCsv(
        "lambda,rho,trials,shift_bound_violations,ratio_bound_violations,"
        "shift_transfer_violations,boundary_violations",
        rows);
  }
  if (!s.ok()) return ExitFor(s, output.err());
  return findings.Finish(output.err());
}

void Record(LemmaSweepReport& report, int64_t& counter,
            const absl::StatusOr<bool>& result, const std::string& what) {
  if (result.ok() && *result) return;
  ++counter;
  if (static_cast<int>(report.messages.size()) < kMaxLemmaMessages) {
    report.messages.push_back(
        result.ok() ? absl::StrCat(what, " violated")
                    : absl::StrCat(what, ": ", result.status().message()));
  }
}

}  // namespace

absl::StatusOr<ExperimentConfig> ConfigFromJson(const json& doc,
                                                ExperimentConfig base) {
  PRIVREC_RETURN_IF_ERROR(
      CheckKeys(doc, "",
                {"mode", "instance", "generator", "algo", "seed", "num_seeds",
                 "cap", "out", "no_timestamp", "strict", "include_sequences",
                 "lemma_trials", "grid", "adversary"}));
  ExperimentConfig c = std::move(base);
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "mode", c.mode));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "instance", c.instance_path));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "algo", c.algorithm));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "seed", c.seed));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "num_seeds", c.num_seeds));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "cap", c.cap));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "out", c.out));
  bool no_timestamp = !c.timestamp;
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "no_timestamp", no_timestamp));
  c.timestamp = !no_timestamp;
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "strict", c.strict));
  PRIVREC_RETURN_IF_ERROR(
      ReadField(doc, "include_sequences", c.include_sequences));
  PRIVREC_RETURN_IF_ERROR(ReadField(doc, "lemma_trials", c.lemma_trials));
  if (doc.contains("generator")) {
    absl::StatusOr<PeerFamilySpec> spec = GeneratorFromJson(doc["generator"]);
    if (!spec.ok()) return spec.status();
    c.generator = *spec;
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    PRIVREC_RETURN_IF_ERROR(
        CheckKeys(g, "grid", {"m", "T", "D", "R", "P", "n", "style"}));
    PRIVREC_RETURN_IF_ERROR(ReadStyle(g, "grid.style", c.grid.style));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "m", c.grid.num_objects));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "T", c.grid.rounds));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "D", c.grid.diversity));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "R", c.grid.radius));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "P", c.grid.peers));
    PRIVREC_RETURN_IF_ERROR(ReadField(g, "n", c.grid.voters));
  }
  if (doc.contains("adversary")) {
    const json& a = doc["adversary"];
    PRIVREC_RETURN_IF_ERROR(
        CheckKeys(a, "adversary", {"T", "D", "R", "copies", "paths"}));
    PRIVREC_RETURN_IF_ERROR(ReadField(a, "T", c.adversary.num_rounds));
    PRIVREC_RETURN_IF_ERROR(ReadField(a, "D", c.adversary.diversity));
    PRIVREC_RETURN_IF_ERROR(ReadField(a, "R", c.adversary.radius));
    PRIVREC_RETURN_IF_ERROR(ReadField(a, "copies", c.adversary.copies));
    PRIVREC_RETURN_IF_ERROR(ReadField(a, "paths", c.adversary.paths));
  }
  return c;
}

absl::StatusOr<ExperimentConfig> ReadConfigFile(const std::string& path,
                                                ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream text;
  text << in.rdbuf();
  json doc = json::parse(text.str(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  return ConfigFromJson(doc, std::move(base));
}

LemmaSweepReport SweepPhiLemmas(const PhiParams& params, int64_t trials,
                                uint64_t seed) {
  LemmaSweepReport report;
  report.trials = trials;
  const double lo = -1.0;
  const double hi = 2.0;
  const double ratio_bound_floor = params.rho + std::log(2.0) / params.lambda;

  StreamRng rng1(seed, 1);
  for (int64_t i = 0; i < trials; ++i) {
    const double x = lo + (hi - lo) * rng1.Uniform();
    const double x_prime = lo + (hi - lo) * rng1.Uniform();
    Record(report, report.shift_bound_violations,
           CheckPhiShiftBound(params, x, x_prime),
           absl::StrFormat("shift bound(x=%.17g, x'=%.17g)", x, x_prime));
  }
  StreamRng rng2(seed, 2);
  for (int64_t i = 0; i < trials; ++i) {
    double a = ratio_bound_floor + (hi - ratio_bound_floor) * rng2.Uniform();
    double b = ratio_bound_floor + (hi - ratio_bound_floor) * rng2.Uniform();
    if (a < b) std::swap(a, b);
    Record(report, report.ratio_bound_violations,
           CheckPhiRatioBound(params, a, b),
           absl::StrFormat("ratio bound(x=%.17g, x'=%.17g)", a, b));
  }
  StreamRng rng3(seed, 3);
  for (int64_t i = 0; i < trials; ++i) {
    const int n = 1 + std::min(5, static_cast<int>(rng3.Uniform() * 6));
    std::vector<double> xs(n + 1);
    std::vector<double> thetas(n);
    for (double& x : xs) x = lo + (hi - lo) * rng3.Uniform();
    std::sort(xs.begin(), xs.end());
    for (double& th : thetas) th = rng3.Uniform() * 0.5;
    Record(report, report.shift_transfer_violations,
           CheckPhiShiftTransfer(params, xs, thetas),
           absl::StrFormat("shift transfer(n=%d, x1=%.17g)", n, xs[0]));
  }

  // Boundary cases: equal arguments, the truncation point, the ratio-bound
  // floor, zero shifts.
  const double rho = params.rho;
  const std::vector<std::pair<double, double>> l1 = {
      {rho, rho}, {rho, rho + 0.5}, {rho + 0.5, rho},
      {lo, hi},   {hi, lo},         {hi, hi}};
  for (auto [x, xp] : l1) {
    Record(report, report.boundary_violations,
           CheckPhiShiftBound(params, x, xp),
           absl::StrFormat("shift bound boundary (%.17g, %.17g)", x, xp));
  }
  const std::vector<std::pair<double, double>> l2 = {
      {ratio_bound_floor, ratio_bound_floor},
      {ratio_bound_floor + 1.0 / 12, ratio_bound_floor},
      {hi, ratio_bound_floor}};
  for (auto [x, xp] : l2) {
    Record(report, report.boundary_violations,
           CheckPhiRatioBound(params, x, xp),
           absl::StrFormat("ratio bound boundary (%.17g, %.17g)", x, xp));
  }
  const std::vector<double> xs = {rho - 0.1, rho, rho + 0.2, rho + 0.2};
  const std::vector<double> zero(3, 0.0);
  const std::vector<double> shifts = {0.0, 0.3, 0.1};
  Record(report, report.boundary_violations,
         CheckPhiShiftTransfer(params, xs, zero),
         "shift transfer boundary (zero shifts)");
  Record(report, report.boundary_violations,
         CheckPhiShiftTransfer(params, xs, shifts),
         "shift transfer boundary (ties at rho)");
  return report;
}

std::string SweepCsvHeader() {
  return "schema_v1,m,T,D,R,P,n,algo,kind,loss,loss_bound,max_abs_E,"
         "epsilon_bound";
}

int RunExperiment(const ExperimentConfig& config, std::ostream& out,
                  std::ostream& err) {
  Output output(config, out, err);
  if (config.num_seeds < 0 || config.lemma_trials < 0) {
    err << "error: --num-seeds and lemma_trials must be non-negative\n";
    return kExitUsage;
  }
  if (config.mode == "loss") return RunLoss(config, output);
  if (config.mode == "leakage") return RunLeakage(config, output);
  if (config.mode == "sweep") return RunSweep(config, output);
  if (config.mode == "adversary-demo") return RunAdversaryDemo(config, output);
  if (config.mode == "lemma-suite") return RunLemmaSuite(config, output);
  err << "error: unknown --mode '" << config.mode
      << "' (loss, leakage, sweep, adversary-demo, lemma-suite)\n";
  return kExitUsage;
}

}  // namespace privrec

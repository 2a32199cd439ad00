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

#include "privrec/instance_io.h"

#include <fstream>
#include <sstream>
#include <utility>

#include "absl/strings/str_cat.h"

namespace privrec {

namespace {

using nlohmann::json;

absl::StatusOr<int> IntField(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing field '", name, "'"));
  }
  if (!it->is_number_integer()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", name, "' must be an integer"));
  }
  return it->get<int>();
}

absl::StatusOr<std::vector<int>> IntArray(const json& node,
                                          const std::string& where) {
  if (!node.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", where, "' must be an array of integers"));
  }
  std::vector<int> out;
  out.reserve(node.size());
  for (const json& e : node) {
    if (!e.is_number_integer()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", where, "' must contain only integers"));
    }
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

json PatternToJson(const VotingPattern& pattern) {
  json voters = json::array();
  for (const Voter& v : pattern.voters) {
    voters.push_back({{"id", v.id.value}, {"votes", v.votes}});
  }
  return voters;
}

json InstanceToJson(const Instance& instance) {
  json likes = json::array();
  for (const auto& s : instance.client.likes) {
    likes.push_back(std::vector<int>(s.begin(), s.end()));
  }
  return json{
      {"T", instance.num_rounds},  {"m", instance.num_objects},
      {"likes", std::move(likes)}, {"voters", PatternToJson(instance.pattern)},
      {"R", instance.radius},      {"D", instance.diversity},
      {"P", instance.peers},       {"n", instance.voters}};
}

absl::StatusOr<VotingPattern> PatternFromJson(const json& voters,
                                              int num_rounds, int num_objects) {
  if (!voters.is_array()) {
    return absl::InvalidArgumentError("field 'voters' must be an array");
  }
  VotingPattern pattern{num_rounds, num_objects, {}};
  for (size_t i = 0; i < voters.size(); ++i) {
    const json& v = voters[i];
    std::string where = absl::StrCat("voters[", i, "]");
    if (!v.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", where, "' must be an object"));
    }
    auto id = v.find("id");
    if (id == v.end() || !id->is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", where, ".id' must be a string"));
    }
    auto votes = v.find("votes");
    if (votes == v.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing field '", where, ".votes'"));
    }
    absl::StatusOr<std::vector<int>> parsed =
        IntArray(*votes, absl::StrCat(where, ".votes"));
    if (!parsed.ok()) return parsed.status();
    pattern.voters.push_back(
        {VoterId{id->get<std::string>()}, *std::move(parsed)});
  }
  return pattern;
}

absl::StatusOr<Instance> InstanceFromJson(const json& doc) {
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("instance must be a JSON object");
  }
  Instance instance;
  for (auto [name, slot] :
       {std::pair{"T", &instance.num_rounds},
        std::pair{"m", &instance.num_objects}, std::pair{"R", &instance.radius},
        std::pair{"D", &instance.diversity}, std::pair{"P", &instance.peers},
        std::pair{"n", &instance.voters}}) {
    absl::StatusOr<int> v = IntField(doc, name);
    if (!v.ok()) return v.status();
    *slot = *v;
  }
  auto likes = doc.find("likes");
  if (likes == doc.end() || !likes->is_array()) {
    return absl::InvalidArgumentError(
        "field 'likes' must be an array of integer arrays");
  }
  for (size_t t = 0; t < likes->size(); ++t) {
    absl::StatusOr<std::vector<int>> set =
        IntArray((*likes)[t], absl::StrCat("likes[", t, "]"));
    if (!set.ok()) return set.status();
    instance.client.likes.emplace_back(set->begin(), set->end());
  }
  auto voters = doc.find("voters");
  if (voters == doc.end()) {
    return absl::InvalidArgumentError("missing field 'voters'");
  }
  absl::StatusOr<VotingPattern> pattern =
      PatternFromJson(*voters, instance.num_rounds, instance.num_objects);
  if (!pattern.ok()) return pattern.status();
  instance.pattern = *std::move(pattern);
  return instance;
}

absl::StatusOr<Instance> ParseInstance(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("instance is not well-formed JSON");
  }
  return InstanceFromJson(doc);
}

absl::StatusOr<Instance> ReadInstanceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Instance> instance = ParseInstance(buffer.str());
  if (!instance.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", instance.status().message()));
  }
  return instance;
}

absl::Status WriteJsonFile(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << doc.dump(2) << "\n";
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("short write to ", path));
}

}  // namespace privrec

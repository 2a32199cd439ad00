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

#include "privrec/model.h"

#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privrec {

namespace {

std::map<VoterId, const std::vector<int>*> VotesById(
    const VotingPattern& pattern) {
  std::map<VoterId, const std::vector<int>*> out;
  for (const Voter& v : pattern.voters) out.emplace(v.id, &v.votes);
  return out;
}

}  // namespace

int ClientPrefs::LowestLiked(int t) const {
  return likes[t].empty() ? -1 : *likes[t].begin();
}

std::optional<int> VotingPattern::Find(const VoterId& id) const {
  for (int i = 0; i < size(); ++i) {
    if (voters[i].id == id) return i;
  }
  return std::nullopt;
}

bool operator==(const VotingPattern& a, const VotingPattern& b) {
  if (a.num_rounds != b.num_rounds || a.num_objects != b.num_objects ||
      a.size() != b.size()) {
    return false;
  }
  auto lhs = VotesById(a);
  auto rhs = VotesById(b);
  if (lhs.size() != rhs.size()) return false;
  for (const auto& [id, votes] : lhs) {
    auto it = rhs.find(id);
    if (it == rhs.end() || *it->second != *votes) return false;
  }
  return true;
}

std::vector<Violation> Validate(const Instance& instance) {
  std::vector<Violation> out;
  const int T = instance.num_rounds;
  const int m = instance.num_objects;
  if (T < 1) out.push_back({absl::StrCat("round count T=", T, " < 1")});
  if (m < 2) out.push_back({absl::StrCat("object count m=", m, " < 2")});

  const ClientPrefs& client = instance.client;
  if (client.num_rounds() != T) {
    out.push_back({absl::StrCat("client has ", client.num_rounds(),
                                " like-sets, expected ", T)});
  }
  for (int t = 0; t < client.num_rounds(); ++t) {
    if (client.likes[t].empty()) {
      out.push_back({absl::StrCat("empty like-set at round ", t), t});
    }
    for (int j : client.likes[t]) {
      if (j < 0 || j >= m) {
        out.push_back(
            {absl::StrCat("liked object ", j, " out of range at round ", t),
             t});
      }
    }
  }

  const VotingPattern& pattern = instance.pattern;
  if (pattern.num_rounds != T || pattern.num_objects != m) {
    out.push_back({absl::StrCat(
        "pattern shape (T=", pattern.num_rounds, ", m=", pattern.num_objects,
        ") differs from instance (T=", T, ", m=", m, ")")});
  }
  std::set<VoterId> seen;
  bool shapes_ok = true;
  for (const Voter& v : pattern.voters) {
    if (!seen.insert(v.id).second) {
      out.push_back({"duplicate voter id", std::nullopt, v.id.value});
    }
    if (static_cast<int>(v.votes.size()) != T) {
      shapes_ok = false;
      out.push_back(
          {absl::StrCat("voter has ", v.votes.size(), " votes, expected ", T),
           std::nullopt, v.id.value});
      continue;
    }
    for (int t = 0; t < T; ++t) {
      if (v.votes[t] < 0 || v.votes[t] >= m) {
        out.push_back(
            {absl::StrCat("vote out of range: ", v.votes[t], " at round ", t),
             t, v.id.value});
        shapes_ok = false;
      }
    }
  }

  if (instance.radius < 0 || instance.radius > T) {
    out.push_back(
        {absl::StrCat("radius R=", instance.radius, " outside [0, T]")});
  }
  if (instance.diversity < 0 || instance.diversity > T) {
    out.push_back(
        {absl::StrCat("declared D=", instance.diversity, " outside [0, T]")});
  }
  if (instance.peers < 0 || instance.voters < 0) {
    out.push_back({"declared P and n must be non-negative"});
  }
  if (client.num_rounds() == T) {
    if (int d = Diversity(client); d > instance.diversity) {
      out.push_back({absl::StrCat("client diversity ", d,
                                  " exceeds declared D=", instance.diversity)});
    }
    if (shapes_ok) {
      int p = PeerCount(client, pattern, instance.radius);
      if (p < instance.peers) {
        out.push_back({absl::StrCat("peer count ", p,
                                    " below declared P=", instance.peers)});
      }
    }
  }
  if (pattern.size() > instance.voters) {
    out.push_back({absl::StrCat("voter count ", pattern.size(),
                                " exceeds declared n=", instance.voters)});
  }
  return out;
}

absl::StatusOr<int> Distance(const ClientPrefs& client,
                             std::span<const int> voter_votes) {
  if (static_cast<int>(voter_votes.size()) != client.num_rounds()) {
    return absl::InvalidArgumentError(
        absl::StrCat("vote sequence has length ", voter_votes.size(),
                     ", client has ", client.num_rounds(), " rounds"));
  }
  int d = 0;
  for (int t = 0; t < client.num_rounds(); ++t) {
    if (!client.Likes(t, voter_votes[t])) ++d;
  }
  return d;
}

int PeerCount(const ClientPrefs& client, const VotingPattern& pattern,
              int radius) {
  int count = 0;
  for (const Voter& v : pattern.voters) {
    absl::StatusOr<int> d = Distance(client, v.votes);
    if (d.ok() && *d <= radius) ++count;
  }
  return count;
}

int Diversity(const ClientPrefs& client) {
  int d = 0;
  for (const auto& s : client.likes) {
    if (s.size() > 1) ++d;
  }
  return d;
}

bool IsAdjacentStep(const VotingPattern& a, const VotingPattern& b) {
  if (a.num_rounds != b.num_rounds || a.num_objects != b.num_objects) {
    return false;
  }
  auto lhs = VotesById(a);
  auto rhs = VotesById(b);
  int symmetric_difference = 0;
  for (const auto& [id, votes] : lhs) {
    auto it = rhs.find(id);
    if (it == rhs.end()) {
      ++symmetric_difference;
    } else if (*it->second != *votes) {
      return false;
    }
  }
  for (const auto& [id, votes] : rhs) {
    if (!lhs.contains(id)) ++symmetric_difference;
  }
  return symmetric_difference == 1;
}

absl::StatusOr<std::vector<VotingPattern>> NeighborsByRemoval(
    const VotingPattern& pattern) {
  if (pattern.empty()) {
    return absl::InvalidArgumentError("pattern has no voters to remove");
  }
  std::vector<VotingPattern> out;
  out.reserve(pattern.voters.size());
  for (int removed = 0; removed < pattern.size(); ++removed) {
    VotingPattern p{pattern.num_rounds, pattern.num_objects, {}};
    p.voters.reserve(pattern.voters.size() - 1);
    for (int i = 0; i < pattern.size(); ++i) {
      if (i != removed) p.voters.push_back(pattern.voters[i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace privrec

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

// Domain types for the online collaborative recommendation game.
//
// Objects are fresh every round, so an object is addressed by its index
// 0..m-1 within the round. Rounds are 0-based throughout the library and in
// every file format.

#ifndef PRIVREC_MODEL_H_
#define PRIVREC_MODEL_H_

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace privrec {

// Opaque, ordered voter token.
struct VoterId {
  std::string value;

  friend auto operator<=>(const VoterId&, const VoterId&) = default;
  friend bool operator==(const VoterId&, const VoterId&) = default;
};

// The client's like-sets, one per round.
struct ClientPrefs {
  std::vector<std::set<int>> likes;

  int num_rounds() const { return static_cast<int>(likes.size()); }
  // Deterministic, truthful feedback on object `object` of round `t`.
  bool Likes(int t, int object) const { return likes[t].contains(object); }
  // Lowest-index liked object of round `t`; -1 when the set is empty.
  int LowestLiked(int t) const;
};

struct Voter {
  VoterId id;
  // One object index per round.
  std::vector<int> votes;
};

// The complete vote table V<U>. Voter order is storage order only; equality
// compares the voter set and each voter's votes.
struct VotingPattern {
  int num_rounds = 0;
  int num_objects = 0;
  std::vector<Voter> voters;

  int size() const { return static_cast<int>(voters.size()); }
  bool empty() const { return voters.empty(); }
  // Index of `id` in `voters`, if present.
  std::optional<int> Find(const VoterId& id) const;

  friend bool operator==(const VotingPattern& a, const VotingPattern& b);
};

struct RecommendationSequence {
  std::vector<int> picks;
};

struct Instance {
  int num_rounds = 0;   // T
  int num_objects = 0;  // m
  ClientPrefs client;
  VotingPattern pattern;
  int radius = 0;     // declared R
  int diversity = 0;  // declared D
  int peers = 0;      // declared P
  int voters = 0;     // declared n
};

struct Violation {
  std::string message;
  std::optional<int> round = std::nullopt;
  std::optional<std::string> voter = std::nullopt;
};

// Every violated invariant of `instance`; empty when the instance is valid.
std::vector<Violation> Validate(const Instance& instance);

// Number of rounds in which the voter voted an object the client dislikes.
absl::StatusOr<int> Distance(const ClientPrefs& client,
                             std::span<const int> voter_votes);

// Number of voters within distance `radius` of the client.
int PeerCount(const ClientPrefs& client, const VotingPattern& pattern,
              int radius);

// Number of rounds in which the client likes more than one object.
int Diversity(const ClientPrefs& client);

// True iff the voter sets differ by exactly one voter and every shared voter
// votes identically in both patterns.
bool IsAdjacentStep(const VotingPattern& a, const VotingPattern& b);

// All patterns obtained from `pattern` by deleting a single voter, in voter
// order.
absl::StatusOr<std::vector<VotingPattern>> NeighborsByRemoval(
    const VotingPattern& pattern);

}  // namespace privrec

#endif  // PRIVREC_MODEL_H_

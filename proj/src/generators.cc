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

#include "privrec/generators.h"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privrec/rng.h"

namespace privrec {

namespace {

int UniformInt(StreamRng& rng, int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(rng.Uniform() * span));
}

// Fisher-Yates with our own index draws, so results do not depend on the
// standard library's distribution implementation.
void Shuffle(std::vector<int>& v, StreamRng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[UniformInt(rng, 0, i)]);
  }
}

// Uniform object the client dislikes at round t; -1 if it likes all.
int DislikedObject(const ClientPrefs& client, int t, int m, StreamRng& rng) {
  std::vector<int> disliked;
  for (int j = 0; j < m; ++j) {
    if (!client.Likes(t, j)) disliked.push_back(j);
  }
  if (disliked.empty()) return -1;
  return disliked[UniformInt(rng, 0, static_cast<int>(disliked.size()) - 1)];
}

int LikedObject(const ClientPrefs& client, int t, StreamRng& rng) {
  const std::set<int>& likes = client.likes[t];
  auto it = likes.begin();
  std::advance(it, UniformInt(rng, 0, static_cast<int>(likes.size()) - 1));
  return *it;
}

// Largest R for which gamma = m/(3T/(R+1) - 1) lies in (0, 1) and
// lambda = 2m ln(T/(R+1)) > 0; -1 if none.
int MaxDerivableRadius(int m, int T) {
  int best = -1;
  for (int r = 0; r <= T; ++r) {
    const double ratio = static_cast<double>(T) / (r + 1);
    if (ratio > 1.0 && 3.0 * ratio - 1.0 > m) best = r;
  }
  return best;
}

}  // namespace

absl::StatusOr<Instance> BuildPeerFamilyInstance(const PeerFamilySpec& spec) {
  const int m = spec.num_objects;
  const int T = spec.num_rounds;
  const int D = spec.diversity;
  const int R = spec.radius;
  if (m < 2 || T < 1 || D < 0 || R < 0 || spec.peers < 0 ||
      spec.voters < spec.peers) {
    return absl::InvalidArgumentError(
        "need m >= 2, T >= 1, D >= 0, R >= 0, 0 <= P <= n");
  }
  if (D > T || (spec.voters > spec.peers && T - D < R + 1) ||
      (spec.peers > 0 && T - D < R)) {
    return absl::InvalidArgumentError(
        absl::StrCat("T - D single-like rounds (", T - D,
                     ") cannot host R + 1 non-peer defections"));
  }

  Instance instance;
  instance.num_rounds = T;
  instance.num_objects = m;
  instance.radius = R;
  instance.diversity = D;
  instance.peers = spec.peers;
  instance.voters = spec.voters;

  StreamRng client_rng(spec.client_seed, 0);
  std::vector<int> rounds(T);
  std::iota(rounds.begin(), rounds.end(), 0);
  Shuffle(rounds, client_rng);
  std::vector<bool> diverse(T, false);
  for (int k = 0; k < D; ++k) diverse[rounds[k]] = true;
  std::vector<int> single_rounds;
  for (int t = 0; t < T; ++t) {
    std::set<int> likes{UniformInt(client_rng, 0, m - 1)};
    if (diverse[t]) {
      int other = UniformInt(client_rng, 0, m - 2);
      if (other >= *likes.begin()) ++other;
      likes.insert(other);
    } else {
      single_rounds.push_back(t);
    }
    instance.client.likes.push_back(std::move(likes));
  }
  const ClientPrefs& client = instance.client;
  const int num_single = static_cast<int>(single_rounds.size());

  instance.pattern = VotingPattern{T, m, {}};
  StreamRng rng(spec.assignment_seed, 1);
  const int block_start =
      num_single > R ? UniformInt(rng, 0, num_single - R - 1) : 0;
  for (int i = 0; i < spec.peers; ++i) {
    std::vector<int> votes(T);
    for (int t = 0; t < T; ++t) votes[t] = LikedObject(client, t, rng);
    std::vector<int> pool = single_rounds;
    Shuffle(pool, rng);
    for (int k = 0; k < R; ++k) {
      votes[pool[k]] = DislikedObject(client, pool[k], m, rng);
    }
    instance.pattern.voters.push_back(
        {VoterId{absl::StrCat("p", i)}, std::move(votes)});
  }
  for (int i = 0; i < spec.voters - spec.peers; ++i) {
    std::vector<int> votes(T);
    if (spec.style != NonPeerStyle::kRandom) {
      for (int t = 0; t < T; ++t) votes[t] = client.LowestLiked(t);
      const int start = spec.style == NonPeerStyle::kStaggered
                            ? i % (num_single - R)
                            : block_start;
      for (int k = start; k < start + R + 1; ++k) {
        votes[single_rounds[k]] =
            DislikedObject(client, single_rounds[k], m, rng);
      }
    } else {
      int distance = 0;
      std::vector<int> liked_single;
      for (int t = 0; t < T; ++t) {
        votes[t] = UniformInt(rng, 0, m - 1);
        if (!client.Likes(t, votes[t])) {
          ++distance;
        } else if (!diverse[t]) {
          liked_single.push_back(t);
        }
      }
      Shuffle(liked_single, rng);
      for (int k = 0; distance < R + 1; ++k, ++distance) {
        const int t = liked_single[k];
        votes[t] = DislikedObject(client, t, m, rng);
      }
    }
    instance.pattern.voters.push_back(
        {VoterId{absl::StrCat("q", i)}, std::move(votes)});
  }
  return instance;
}

absl::StatusOr<Instance> RandomValidInstance(
    uint64_t seed, const RandomInstanceLimits& limits) {
  if (limits.min_rounds < 1 || limits.max_rounds < limits.min_rounds ||
      limits.min_objects < 2 || limits.max_objects < limits.min_objects ||
      limits.max_voters < 0) {
    return absl::InvalidArgumentError("inconsistent instance limits");
  }
  StreamRng rng(seed, 0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int T = UniformInt(rng, limits.min_rounds, limits.max_rounds);
    const int m = UniformInt(rng, limits.min_objects, limits.max_objects);
    int max_radius = T;
    if (limits.derived_params) {
      max_radius = MaxDerivableRadius(m, T);
      if (max_radius < 0) continue;
    }
    const int R = limits.zero_budgets ? 0 : UniformInt(rng, 0, max_radius);

    Instance instance;
    instance.num_rounds = T;
    instance.num_objects = m;
    for (int t = 0; t < T; ++t) {
      std::set<int> likes{UniformInt(rng, 0, m - 1)};
      if (!limits.zero_budgets && rng.Uniform() < 0.3) {
        likes.insert(UniformInt(rng, 0, m - 1));
      }
      instance.client.likes.push_back(std::move(likes));
    }
    const int diversity = Diversity(instance.client);
    instance.diversity =
        limits.zero_budgets ? 0 : UniformInt(rng, diversity, T);
    instance.radius = R;

    const int n = UniformInt(rng, 0, limits.max_voters);
    instance.pattern = VotingPattern{T, m, {}};
    const double follow = rng.Uniform();
    for (int i = 0; i < n; ++i) {
      std::vector<int> votes(T);
      for (int t = 0; t < T; ++t) {
        votes[t] = rng.Uniform() < follow ? LikedObject(instance.client, t, rng)
                                          : UniformInt(rng, 0, m - 1);
      }
      instance.pattern.voters.push_back(
          {VoterId{absl::StrCat("v", i)}, std::move(votes)});
    }
    instance.voters = n;
    instance.peers = PeerCount(instance.client, instance.pattern, R);
    return instance;
  }
  return absl::InvalidArgumentError(
      "no round count within limits admits derived parameters");
}

}  // namespace privrec

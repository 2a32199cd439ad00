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

// Seeded instance generators for experiments and property tests.

#ifndef PRIVREC_GENERATORS_H_
#define PRIVREC_GENERATORS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "privrec/model.h"

namespace privrec {

enum class NonPeerStyle {
  // Non-peer i follows the client, then defects for R+1 consecutive
  // single-like rounds starting at a staggered offset.
  kStaggered,
  // All non-peers follow the client, then defect together for R+1
  // consecutive single-like rounds from one seeded start.
  kBlock,
  // Random votes, topped up with disliked votes to distance R+1.
  kRandom,
};

// P peers plus n-P non-peers at distance > R. The client likes one object per
// round, two in the first D rounds picked by `client_seed`. Peers vote liked
// objects except in R single-like rounds; non-peer votes are drawn from
// `assignment_seed`.
struct PeerFamilySpec {
  int num_objects = 2;
  int num_rounds = 8;
  int voters = 24;
  int peers = 12;
  int diversity = 0;
  int radius = 0;
  NonPeerStyle style = NonPeerStyle::kStaggered;
  uint64_t client_seed = 0;
  uint64_t assignment_seed = 0;
};

absl::StatusOr<Instance> BuildPeerFamilyInstance(const PeerFamilySpec& spec);

struct RandomInstanceLimits {
  int min_rounds = 1;
  int max_rounds = 8;
  int min_objects = 2;
  int max_objects = 3;
  int max_voters = 10;
  // Force a singleton-like client and D = R = 0.
  bool zero_budgets = false;
  // Keep R small enough that the derived p-REC parameters exist.
  bool derived_params = true;
};

// A random instance that passes Validate(): declared D is at least the
// client's diversity, declared P equals the concrete peer count at R and
// declared n the voter count. Votes lean towards liked objects so that peers
// are common.
absl::StatusOr<Instance> RandomValidInstance(
    uint64_t seed, const RandomInstanceLimits& limits);

}  // namespace privrec

#endif  // PRIVREC_GENERATORS_H_

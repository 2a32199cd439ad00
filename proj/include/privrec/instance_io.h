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

// Instance JSON:
//
//   {"T": 2, "m": 2, "likes": [[0], [1]],
//    "voters": [{"id": "v0", "votes": [0, 1]}],
//    "R": 0, "D": 0, "P": 1, "n": 1}
//
// Rounds are 0-based: likes[t] and votes[t] describe round t.

#ifndef PRIVREC_INSTANCE_IO_H_
#define PRIVREC_INSTANCE_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "privrec/model.h"

namespace privrec {

nlohmann::json PatternToJson(const VotingPattern& pattern);
nlohmann::json InstanceToJson(const Instance& instance);

// Structural decoding only; semantic checks belong to Validate(). Errors name
// the offending field.
absl::StatusOr<VotingPattern> PatternFromJson(const nlohmann::json& voters,
                                              int num_rounds, int num_objects);
absl::StatusOr<Instance> InstanceFromJson(const nlohmann::json& doc);
absl::StatusOr<Instance> ParseInstance(std::string_view text);

absl::StatusOr<Instance> ReadInstanceFile(const std::string& path);
absl::Status WriteJsonFile(const std::string& path, const nlohmann::json& doc);

}  // namespace privrec

#endif  // PRIVREC_INSTANCE_IO_H_

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

// The truncated-and-shifted exponential response
//
//   phi(x) = 0                              if x <= rho
//          = exp(lambda x) - exp(lambda rho) otherwise
//
// and checkers for three inequalities it satisfies. The checkers exist to
// audit the floating-point implementation; each returns true when the
// inequality holds up to kLemmaRelativeTolerance.

#ifndef PRIVREC_PHI_H_
#define PRIVREC_PHI_H_

#include <span>

#include "absl/status/statusor.h"

namespace privrec {

inline constexpr double kLemmaRelativeTolerance = 1e-12;

struct PhiParams {
  double lambda = 1.0;  // > 0
  double rho = 0.0;
};

// Evaluated as exp(lambda rho) * expm1(lambda (x - rho)) above the threshold.
// Returns OutOfRange instead of infinity when the result is not
// representable, InvalidArgument for lambda <= 0 or non-finite x.
absl::StatusOr<double> Phi(const PhiParams& params, double x);

// phi(x) <= e^{lambda|x-x'|} phi(x') + (e^{lambda|x-x'|} - 1) e^{lambda rho}.
absl::StatusOr<bool> CheckPhiShiftBound(const PhiParams& params, double x,
                                        double x_prime);

// phi(x) / phi(x') <= e^{2 lambda (x - x')} for x >= x' >= rho + ln2/lambda.
// InvalidArgument when the ordering precondition fails.
absl::StatusOr<bool> CheckPhiRatioBound(const PhiParams& params, double x,
                                        double x_prime);

// sum_i phi(x_i + theta_i) + phi(x_{n+1})
//     <= sum_i phi(x_i) + phi(x_{n+1} + sum_i theta_i)
// for non-decreasing xs (n+1 entries) and non-negative thetas (n entries).
absl::StatusOr<bool> CheckPhiShiftTransfer(const PhiParams& params,
                                           std::span<const double> xs,
                                           std::span<const double> thetas);

}  // namespace privrec

#endif  // PRIVREC_PHI_H_

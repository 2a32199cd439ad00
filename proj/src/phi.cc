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

#include "privrec/phi.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privrec {

namespace {

const double kMaxExponent = std::log(std::numeric_limits<double>::max());

absl::Status CheckParams(const PhiParams& params) {
  if (!(params.lambda > 0) || !std::isfinite(params.lambda)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lambda must be positive and finite, got ", params.lambda));
  }
  if (!std::isfinite(params.rho)) {
    return absl::InvalidArgumentError("rho must be finite");
  }
  return absl::OkStatus();
}

// exp(v), refusing to return infinity.
absl::StatusOr<double> GuardedExp(double v) {
  if (v > kMaxExponent) {
    return absl::OutOfRangeError(absl::StrCat("exp(", v, ") overflows double"));
  }
  return std::exp(v);
}

absl::StatusOr<double> GuardedExpm1(double v) {
  if (v > kMaxExponent) {
    return absl::OutOfRangeError(
        absl::StrCat("expm1(", v, ") overflows double"));
  }
  return std::expm1(v);
}

bool AtMost(double lhs, double rhs) {
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  return lhs <= rhs + kLemmaRelativeTolerance * scale;
}

}  // namespace

absl::StatusOr<double> Phi(const PhiParams& params, double x) {
  if (absl::Status s = CheckParams(params); !s.ok()) return s;
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError("phi argument must be finite");
  }
  if (x <= params.rho) return 0.0;
  if (params.lambda * x > kMaxExponent) {
    return absl::OutOfRangeError(
        absl::StrCat("phi overflow: lambda*x = ", params.lambda * x,
                     " exceeds ", kMaxExponent));
  }
  absl::StatusOr<double> base = GuardedExp(params.lambda * params.rho);
  if (!base.ok()) return base.status();
  absl::StatusOr<double> tail = GuardedExpm1(params.lambda * (x - params.rho));
  if (!tail.ok()) return tail.status();
  double value = *base * *tail;
  if (!std::isfinite(value)) {
    return absl::OutOfRangeError("phi overflow");
  }
  return value;
}

absl::StatusOr<bool> CheckPhiShiftBound(const PhiParams& params, double x,
                                        double x_prime) {
  absl::StatusOr<double> lhs = Phi(params, x);
  if (!lhs.ok()) return lhs.status();
  absl::StatusOr<double> phi_prime = Phi(params, x_prime);
  if (!phi_prime.ok()) return phi_prime.status();
  const double gap = params.lambda * std::abs(x - x_prime);
  absl::StatusOr<double> growth = GuardedExp(gap);
  if (!growth.ok()) return growth.status();
  absl::StatusOr<double> growth_m1 = GuardedExpm1(gap);
  if (!growth_m1.ok()) return growth_m1.status();
  absl::StatusOr<double> base = GuardedExp(params.lambda * params.rho);
  if (!base.ok()) return base.status();
  const double rhs = *growth * *phi_prime + *growth_m1 * *base;
  if (!std::isfinite(rhs)) return absl::OutOfRangeError("shift bound overflow");
  return AtMost(*lhs, rhs);
}

absl::StatusOr<bool> CheckPhiRatioBound(const PhiParams& params, double x,
                                        double x_prime) {
  if (absl::Status s = CheckParams(params); !s.ok()) return s;
  const double threshold = params.rho + std::log(2.0) / params.lambda;
  if (!(x >= x_prime) || !(x_prime >= threshold)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ratio bound requires x >= x' >= rho + ln2/lambda = ", threshold,
        ", got x=", x, ", x'=", x_prime));
  }
  absl::StatusOr<double> top = Phi(params, x);
  if (!top.ok()) return top.status();
  absl::StatusOr<double> bottom = Phi(params, x_prime);
  if (!bottom.ok()) return bottom.status();
  absl::StatusOr<double> growth = GuardedExp(2 * params.lambda * (x - x_prime));
  if (!growth.ok()) return growth.status();
  // Cross-multiplied; bottom > 0 on the admissible range.
  const double rhs = *growth * *bottom;
  if (!std::isfinite(rhs)) return absl::OutOfRangeError("ratio bound overflow");
  return AtMost(*top, rhs);
}

absl::StatusOr<bool> CheckPhiShiftTransfer(const PhiParams& params,
                                           std::span<const double> xs,
                                           std::span<const double> thetas) {
  if (absl::Status s = CheckParams(params); !s.ok()) return s;
  if (thetas.empty() || xs.size() != thetas.size() + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("shift transfer needs n >= 1 thetas and n+1 xs, got ",
                     thetas.size(), " and ", xs.size()));
  }
  if (!std::is_sorted(xs.begin(), xs.end())) {
    return absl::InvalidArgumentError(
        "shift transfer requires non-decreasing xs");
  }
  double theta_sum = 0;
  for (double theta : thetas) {
    if (!(theta >= 0)) {
      return absl::InvalidArgumentError("shift transfer requires thetas >= 0");
    }
    theta_sum += theta;
  }
  double lhs = 0;
  double rhs = 0;
  for (size_t i = 0; i < thetas.size(); ++i) {
    absl::StatusOr<double> shifted = Phi(params, xs[i] + thetas[i]);
    if (!shifted.ok()) return shifted.status();
    absl::StatusOr<double> plain = Phi(params, xs[i]);
    if (!plain.ok()) return plain.status();
    lhs += *shifted;
    rhs += *plain;
  }
  absl::StatusOr<double> last = Phi(params, xs.back());
  if (!last.ok()) return last.status();
  absl::StatusOr<double> last_shifted = Phi(params, xs.back() + theta_sum);
  if (!last_shifted.ok()) return last_shifted.status();
  lhs += *last;
  rhs += *last_shifted;
  return AtMost(lhs, rhs);
}

}  // namespace privrec

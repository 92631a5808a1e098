// Copyright 2026 The privmoment Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Privacy calculus: sensitivities, Gaussian-mechanism calibration under zCDP,
// additive composition and the zCDP -> (eps, delta) conversion. All
// arithmetic is plain 64-bit floating point.

#ifndef PRIVMOMENT_PRIVACY_HPP_
#define PRIVMOMENT_PRIVACY_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace privmoment {

struct ZcdpBudget {
  double rho = 0.0;

  explicit ZcdpBudget(double rho_in = 0.0);
  friend bool operator==(const ZcdpBudget&, const ZcdpBudget&) = default;
};

struct ApproxDpBudget {
  double eps;
  double delta;

  ApproxDpBudget(double eps_in, double delta_in);
  friend bool operator==(const ApproxDpBudget&, const ApproxDpBudget&) = default;
};

/// Ordered record of privacy charges. Values are appended functionally:
/// with_charge returns a new ledger.
class BudgetLedger {
 public:
  struct ZcdpCharge {
    std::string label;
    ZcdpBudget budget;
  };
  struct ApproxCharge {
    std::string label;
    ApproxDpBudget budget;
  };

  [[nodiscard]] BudgetLedger with_charge(std::string label, ZcdpBudget b) const;
  [[nodiscard]] BudgetLedger with_charge(std::string label, ApproxDpBudget b) const;

  const std::vector<ZcdpCharge>& zcdp_charges() const { return zcdp_; }
  const std::vector<ApproxCharge>& approx_charges() const { return approx_; }
  bool empty() const { return zcdp_.empty() && approx_.empty(); }

 private:
  std::vector<ZcdpCharge> zcdp_;
  std::vector<ApproxCharge> approx_;
};

/// 4 R^2 / n: replacing one point of norm <= R moves the second moment by at
/// most this much in spectral norm.
double sensitivity_second_moment(double radius, std::size_t n);

/// sigma = delta_sens / sqrt(2 rho_step).
double gaussian_sigma_for_zcdp(double delta_sens, double rho_step);

/// Sum of the zCDP charges (compensated summation).
ZcdpBudget compose(const BudgetLedger& ledger);

/// An (eps, delta) guarantee as produced by composition or conversion. Unlike
/// ApproxDpBudget it admits eps == 0 (e.g. converting rho == 0).
struct ApproxGuarantee {
  double eps = 0.0;
  double delta = 0.0;
};

/// Basic composition of the (eps, delta) charges: eps and delta each add up.
ApproxGuarantee compose_approx(const BudgetLedger& ledger);

/// eps = rho + sqrt(2 rho ln(1/delta)); delta passes through. Throws
/// std::invalid_argument unless rho >= 0 and 0 < delta < 1.
ApproxGuarantee zcdp_to_approx(double rho, double delta);

}  // namespace privmoment

#endif  // PRIVMOMENT_PRIVACY_HPP_

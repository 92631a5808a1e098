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

#include "privmoment/privacy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace privmoment {
namespace {

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

ZcdpBudget::ZcdpBudget(double rho_in) : rho(rho_in) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("ZcdpBudget: rho must be finite and non-negative");
  }
}

ApproxDpBudget::ApproxDpBudget(double eps_in, double delta_in) : eps(eps_in), delta(delta_in) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("ApproxDpBudget: eps must be finite and positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("ApproxDpBudget: delta must lie in (0, 1)");
  }
}

BudgetLedger BudgetLedger::with_charge(std::string label, ZcdpBudget b) const {
  BudgetLedger next = *this;
  next.zcdp_.push_back({std::move(label), b});
  return next;
}

BudgetLedger BudgetLedger::with_charge(std::string label, ApproxDpBudget b) const {
  BudgetLedger next = *this;
  next.approx_.push_back({std::move(label), b});
  return next;
}

double sensitivity_second_moment(double radius, std::size_t n) {
  if (!(radius >= 0.0)) throw std::invalid_argument("sensitivity: radius must be non-negative");
  if (n == 0) throw std::invalid_argument("sensitivity: n must be positive");
  return 4.0 * radius * radius / static_cast<double>(n);
}

double gaussian_sigma_for_zcdp(double delta_sens, double rho_step) {
  if (!(rho_step > 0.0)) throw std::invalid_argument("gaussian_sigma_for_zcdp: rho must be positive");
  if (!(delta_sens >= 0.0)) {
    throw std::invalid_argument("gaussian_sigma_for_zcdp: sensitivity must be non-negative");
  }
  return delta_sens / std::sqrt(2.0 * rho_step);
}

ZcdpBudget compose(const BudgetLedger& ledger) {
  CompensatedSum s;
  for (const auto& c : ledger.zcdp_charges()) s.add(c.budget.rho);
  return ZcdpBudget(s.value());
}

ApproxGuarantee compose_approx(const BudgetLedger& ledger) {
  CompensatedSum eps;
  CompensatedSum delta;
  for (const auto& c : ledger.approx_charges()) {
    eps.add(c.budget.eps);
    delta.add(c.budget.delta);
  }
  return {eps.value(), delta.value()};
}

ApproxGuarantee zcdp_to_approx(double rho, double delta) {
  if (!(rho >= 0.0)) throw std::invalid_argument("zcdp_to_approx: rho must be non-negative");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("zcdp_to_approx: delta must lie in (0, 1)");
  }
  return {rho + std::sqrt(2.0 * rho * std::log(1.0 / delta)), delta};
}

}  // namespace privmoment

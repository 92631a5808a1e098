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

#include "report.hpp"

#include <cmath>
#include <stdexcept>

#include "dataset_io.hpp"

namespace privmoment::cli {
namespace {

using Json = nlohmann::ordered_json;

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json::json_pointer pointer_for(const std::string& key) {
  std::string p;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    p += '/';
    p += key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return Json::json_pointer(p);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

void Report::put(const std::string& key, std::string text, Json value) {
  if (key.empty() || key.find('=') != std::string::npos) {
    throw std::invalid_argument("Report: invalid key '" + key + "'");
  }
  for (auto& [k, v] : lines_) {
    if (k == key) {
      v = std::move(text);
      summary_[pointer_for(key)] = std::move(value);
      return;
    }
  }
  lines_.emplace_back(key, std::move(text));
  summary_[pointer_for(key)] = std::move(value);
}

void Report::set(const std::string& key, const std::string& value) { put(key, value, value); }

void Report::set(const std::string& key, double value) {
  put(key, format_number(value), number_json(value));
}

void Report::set(const std::string& key, std::uint64_t value) {
  put(key, std::to_string(value), value);
}

void Report::set(const std::string& key, bool value) {
  put(key, value ? "true" : "false", value);
}

void Report::set_matrix(const std::string& key, const SymMat& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    std::string text;
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (j > 0) text += ' ';
      text += format_number(m(i, j));
      row.push_back(number_json(m(i, j)));
    }
    lines_.emplace_back(key + "." + std::to_string(i), std::move(text));
    rows.push_back(std::move(row));
  }
  summary_[pointer_for(key)] = std::move(rows);
}

void Report::set_ledger(const std::string& key, const BudgetLedger& ledger) {
  const auto& z = ledger.zcdp_charges();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::string k = key + ".zcdp." + std::to_string(i);
    set(k + ".label", z[i].label);
    set(k + ".rho", z[i].budget.rho);
  }
  const auto& a = ledger.approx_charges();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string k = key + ".approx." + std::to_string(i);
    set(k + ".label", a[i].label);
    set(k + ".eps", a[i].budget.eps);
    set(k + ".delta", a[i].budget.delta);
  }
  if (!z.empty()) set(key + ".total_rho", compose(ledger).rho);
  if (!a.empty()) {
    const ApproxGuarantee g = compose_approx(ledger);
    set(key + ".total_eps", g.eps);
    set(key + ".total_delta", g.delta);
  }
}

bool Report::has(const std::string& key) const {
  for (const auto& kv : lines_) {
    if (kv.first == key) return true;
  }
  return false;
}

std::string Report::get(const std::string& key) const {
  for (const auto& kv : lines_) {
    if (kv.first == key) return kv.second;
  }
  throw std::out_of_range("Report: no key '" + key + "'");
}

std::string Report::render(const std::optional<std::string>& timestamp) const {
  std::string out;
  if (timestamp) out += "timestamp=" + *timestamp + "\n";
  for (const auto& [k, v] : lines_) out += k + "=" + v + "\n";
  out += "summary=" + summary_.dump() + "\n";
  return out;
}

}  // namespace privmoment::cli

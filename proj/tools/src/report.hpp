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

// Run reports: ordered key=value lines followed by one "summary=" line
// holding the same content as a JSON object. Dotted keys become nested
// objects in the summary. An optional timestamp line comes first and is the
// only non-deterministic part of a report.

#ifndef PRIVMOMENT_TOOLS_REPORT_HPP_
#define PRIVMOMENT_TOOLS_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "privmoment/linalg.hpp"
#include "privmoment/privacy.hpp"

namespace privmoment::cli {

class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value) { set(key, static_cast<std::uint64_t>(value)); }
  void set(const std::string& key, bool value);
  /// One line per row: key.<i>=v0 v1 ...; a nested array in the summary.
  void set_matrix(const std::string& key, const SymMat& m);
  void set_ledger(const std::string& key, const BudgetLedger& ledger);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }
  const nlohmann::ordered_json& summary() const { return summary_; }

  std::string render(const std::optional<std::string>& timestamp) const;

 private:
  void put(const std::string& key, std::string text, nlohmann::ordered_json value);

  std::vector<std::pair<std::string, std::string>> lines_;
  nlohmann::ordered_json summary_ = nlohmann::ordered_json::object();
};

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

}  // namespace privmoment::cli

#endif  // PRIVMOMENT_TOOLS_REPORT_HPP_

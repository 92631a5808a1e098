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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "commands.hpp"
#include "dataset_io.hpp"
#include "gtest/gtest.h"
#include "privmoment/datagen.hpp"
#include "privmoment/rng.hpp"

namespace privmoment::cli {
namespace {

namespace fs = std::filesystem;
using Kind = DatasetFormatError::Kind;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("privmoment_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int invoke(const std::vector<std::string>& args, std::string* out = nullptr,
             std::string* err = nullptr) {
    std::ostringstream o;
    std::ostringstream e;
    const int rc = run(args, o, e, RunEnv{std::nullopt, false});
    if (out) *out = o.str();
    if (err) *err = e.str();
    return rc;
  }

  fs::path dir_;
};

Kind parse_error_kind(const std::string& text, std::size_t* line = nullptr) {
  try {
    parse_dataset_text(text);
  } catch (const DatasetFormatError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return Kind::kIo;
}

TEST(DatasetIoTest, TextAndBinaryRoundTripExactly) {
  Rng r(1);
  const Dataset x = gen_gaussian(SymMat::diagonal({1e-300, 3.0, 1e12}), 200, r);
  for (FileFormat f : {FileFormat::kText, FileFormat::kBinary}) {
    const std::string s = serialize_dataset(x, f);
    const Dataset y = f == FileFormat::kText ? parse_dataset_text(s) : parse_dataset_binary(s);
    EXPECT_EQ(y.points(), x.points());
    EXPECT_EQ(y.radius(), x.radius());
  }
}

TEST(DatasetIoTest, ShortestRoundTripFormatting) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(DatasetIoTest, DistinctErrors) {
  EXPECT_EQ(parse_error_kind(""), Kind::kEmptyFile);
  EXPECT_EQ(parse_error_kind("2 x 1\n"), Kind::kMalformedHeader);
  std::size_t line = 0;
  EXPECT_EQ(parse_error_kind("2 2 5\n1 2\n3\n", &line), Kind::kRowLength);
  EXPECT_EQ(line, 3u);
  EXPECT_EQ(parse_error_kind("2 1 5\n1 abc\n", &line), Kind::kBadNumber);
  EXPECT_EQ(line, 2u);
  EXPECT_EQ(parse_error_kind("1 1 5\nnan\n"), Kind::kNonFinite);
  EXPECT_EQ(parse_error_kind("1 2 5\n1\n"), Kind::kRowCount);
  EXPECT_EQ(parse_error_kind("1 1 1\n2\n"), Kind::kRadiusExceeded);
  EXPECT_THROW(parse_dataset_binary("PMV1"), DatasetFormatError);
}

TEST_F(CliTest, GenWritesReadableData) {
  for (const std::string fmt : {"text", "binary"}) {
    const std::string out = path("g." + fmt);
    ASSERT_EQ(invoke({"--seed", "3", "gen", "--dist", "gaussian", "--diag", "1,4", "--n", "100",
                      "--output", out, "--format", fmt}),
              kExitOk);
    const Dataset x = read_dataset(out);
    EXPECT_EQ(x.size(), 100u);
    EXPECT_EQ(x.dim(), 2u);
  }
}

TEST_F(CliTest, UsageErrorsExitOne) {
  std::string err;
  EXPECT_EQ(invoke({"estimate", "--rho", "1", "--m", "1"}, nullptr, &err), kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}), kExitUsage);
  EXPECT_EQ(invoke({"estimate", "--data", path("missing.txt"), "--rho", "1", "--m", "1"}, nullptr,
                   &err),
            kExitUsage);
  EXPECT_NE(err.find("cannot open"), std::string::npos);
  std::ofstream(path("bad.txt")) << "2 1 5\n1 2 3\n";
  EXPECT_EQ(invoke({"estimate", "--data", path("bad.txt"), "--rho", "1", "--m", "1"}), kExitUsage);
}

TEST_F(CliTest, BaselineAbortExitsTwoWithThreshold) {
  const std::string data = path("small.txt");
  ASSERT_EQ(invoke({"--seed", "4", "gen", "--dist", "gaussian", "--diag", "1,2", "--n", "50",
                    "--output", data}),
            kExitOk);
  std::string out;
  EXPECT_EQ(invoke({"--seed", "5", "baseline", "--data", data, "--eps", "1", "--delta", "1e-6",
                    "--m", "5"},
                   &out),
            kExitFailure);
  EXPECT_NE(out.find("status=failure"), std::string::npos);
  EXPECT_NE(out.find("abort.threshold="), std::string::npos);
  EXPECT_NE(out.find("abort.slack="), std::string::npos);
  EXPECT_NE(out.find("ledger.total_eps=1"), std::string::npos);
}

TEST_F(CliTest, DeterministicGivenSeed) {
  const std::string data = path("d.txt");
  ASSERT_EQ(invoke({"--seed", "6", "gen", "--dist", "gaussian", "--diag", "1,2,3", "--n", "500",
                    "--output", data}),
            kExitOk);
  const std::vector<std::string> args = {"--seed", "7", "estimate", "--data", data, "--rho", "1",
                                         "--m", "2"};
  std::string a;
  std::string b;
  ASSERT_EQ(invoke(args, &a), kExitOk);
  ASSERT_EQ(invoke(args, &b), kExitOk);
  EXPECT_EQ(a, b);
  std::ostringstream o;
  std::ostringstream e;
  EXPECT_EQ(run(args, o, e, RunEnv{std::nullopt, true}), kExitOk);
  EXPECT_EQ(o.str().rfind("timestamp=", 0), 0u);
  EXPECT_EQ(o.str().substr(o.str().find('\n') + 1), a);
}

TEST_F(CliTest, EnvironmentSeedFallback) {
  const std::string data = path("d.txt");
  ASSERT_EQ(invoke({"--seed", "6", "gen", "--dist", "gaussian", "--diag", "1", "--n", "100",
                    "--output", data}),
            kExitOk);
  const std::vector<std::string> tail = {"estimate", "--data", data, "--rho", "1", "--m", "1"};
  std::ostringstream o1;
  std::ostringstream e1;
  run(tail, o1, e1, RunEnv{"9", false});
  std::vector<std::string> flagged = {"--seed", "9"};
  flagged.insert(flagged.end(), tail.begin(), tail.end());
  std::string o2;
  invoke(flagged, &o2);
  EXPECT_NE(o1.str().find("seed_source=env"), std::string::npos);
  const auto line = [](const std::string& s) {
    const auto p = s.find("sigma_hat.0=");
    return s.substr(p, s.find('\n', p) - p);
  };
  EXPECT_EQ(line(o1.str()), line(o2));
}

TEST_F(CliTest, RawDataFieldsNeedUnsafeFlag) {
  const std::string data = path("d.txt");
  ASSERT_EQ(invoke({"--seed", "8", "gen", "--dist", "gaussian", "--diag", "1,1e6", "--n", "2000",
                    "--output", data}),
            kExitOk);
  const std::vector<std::string> base = {"--seed", "9", "estimate", "--data", data, "--rho", "1",
                                         "--m", "1"};
  std::string safe;
  ASSERT_EQ(invoke(base, &safe), kExitOk);
  EXPECT_EQ(safe.find("shrunk"), std::string::npos);
  std::vector<std::string> unsafe = base;
  unsafe.push_back("--unsafe-diagnostics");
  std::string diag;
  ASSERT_EQ(invoke(unsafe, &diag), kExitOk);
  EXPECT_NE(diag.find(".shrunk="), std::string::npos);
}

TEST_F(CliTest, GroundTruthAddsErrorAndLoewnerLines) {
  const std::string data = path("d.txt");
  const std::string truth = path("t.json");
  ASSERT_EQ(invoke({"--seed", "10", "gen", "--dist", "gaussian", "--diag", "1,2", "--n", "5000",
                    "--output", data, "--truth", truth}),
            kExitOk);
  std::string out;
  ASSERT_EQ(invoke({"--seed", "11", "estimate", "--data", data, "--rho", "1", "--m", "1",
                    "--ground-truth", truth},
                   &out),
            kExitOk);
  EXPECT_NE(out.find("metrics.rel_spectral_error="), std::string::npos);
  const bool pass = out.find("metrics.loewner_check=pass") != std::string::npos;
  const bool fail = out.find("metrics.loewner_check=fail") != std::string::npos;
  EXPECT_TRUE(pass != fail);
}

TEST_F(CliTest, BenchEmitsOneRecordPerCell) {
  const std::string table = path("b.csv");
  std::string out;
  ASSERT_EQ(invoke({"--seed", "12", "bench", "--etas", "0,0.001,0.01", "--n", "2000", "--runs", "1",
                    "--m", "10", "--table", table},
                   &out),
            kExitOk);
  EXPECT_NE(out.find("bench.cells=3"), std::string::npos);
  std::ifstream in(table);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("cell,eta,", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);  // one recursive and one baseline record per cell
}

TEST_F(CliTest, ReportFileOption) {
  const std::string data = path("d.txt");
  const std::string rep = path("r.txt");
  std::string out;
  ASSERT_EQ(invoke({"--seed", "1", "--report", rep, "gen", "--dist", "gaussian", "--diag", "1",
                    "--n", "10", "--output", data},
                   &out),
            kExitOk);
  EXPECT_TRUE(out.empty());
  EXPECT_TRUE(fs::exists(rep));
}

#ifdef PRIVMOMENT_TOOL_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const std::string tool = PRIVMOMENT_TOOL_PATH;
  const auto status = [&](const std::string& args) {
    const int s = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  const std::string data = path("d.txt");
  EXPECT_EQ(status("--seed 1 gen --dist gaussian --diag 1,2 --n 50 --output " + data), 0);
  EXPECT_EQ(status("estimate --rho 1"), 1);
  EXPECT_EQ(status("--seed 1 baseline --data " + data + " --eps 1 --delta 1e-6 --m 5"), 2);
}
#endif

}  // namespace
}  // namespace privmoment::cli

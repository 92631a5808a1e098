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

#include "dataset_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

namespace privmoment::cli {
namespace {

using Kind = DatasetFormatError::Kind;

constexpr std::string_view kMagic = "PMV1";
constexpr std::size_t kBinaryHeader = 4 + 3 * 8;

std::string describe(Kind kind, std::size_t line, const std::string& detail) {
  std::string s(kind_name(kind));
  if (line > 0) s += " at line " + std::to_string(line);
  if (!detail.empty()) s += ": " + detail;
  return s;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DatasetFormatError(Kind::kBadNumber, line, "cannot parse '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) {
    throw DatasetFormatError(Kind::kNonFinite, line, "value '" + std::string(tok) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view tok, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
    throw DatasetFormatError(Kind::kMalformedHeader, line,
                             std::string(what) + " must be a positive integer, got '" +
                                 std::string(tok) + "'");
  }
  return v;
}

void check_radius(std::span<const double> row, double radius, std::size_t line) {
  double s = 0.0;
  for (double v : row) s += v * v;
  if (std::sqrt(s) > radius * (1.0 + Dataset::kRadiusSlack)) {
    throw DatasetFormatError(Kind::kRadiusExceeded, line,
                             "row norm exceeds the declared radius " + format_double(radius));
  }
}

std::uint64_t load_u64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

void store_u64(std::string& out, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

}  // namespace

DatasetFormatError::DatasetFormatError(Kind kind, std::size_t line, const std::string& detail)
    : std::runtime_error(describe(kind, line, detail)), kind_(kind), line_(line) {}

std::string_view kind_name(DatasetFormatError::Kind kind) {
  switch (kind) {
    case Kind::kIo: return "I/O error";
    case Kind::kEmptyFile: return "empty file";
    case Kind::kMalformedHeader: return "malformed header";
    case Kind::kBadNumber: return "bad number";
    case Kind::kNonFinite: return "non-finite value";
    case Kind::kRowLength: return "row length mismatch";
    case Kind::kRowCount: return "row count mismatch";
    case Kind::kRadiusExceeded: return "radius exceeded";
    case Kind::kTruncated: return "truncated file";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset parse_dataset_text(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back(text.substr(pos, end - pos));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  // Trailing blank lines are allowed; interior ones are rows of length 0.
  while (!lines.empty() && tokens(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DatasetFormatError(Kind::kEmptyFile, 0, "");

  const auto header = tokens(lines[0]);
  if (header.size() != 3) {
    throw DatasetFormatError(Kind::kMalformedHeader, 1,
                             "expected 'd n R', got " + std::to_string(header.size()) + " fields");
  }
  const std::uint64_t d = parse_count(header[0], 1, "d");
  const std::uint64_t n = parse_count(header[1], 1, "n");
  double radius;
  try {
    radius = parse_double(header[2], 1);
  } catch (const DatasetFormatError& e) {
    throw DatasetFormatError(Kind::kMalformedHeader, 1, std::string("radius: ") + e.what());
  }
  if (radius < 0.0) throw DatasetFormatError(Kind::kMalformedHeader, 1, "radius is negative");

  const std::size_t rows = lines.size() - 1;
  if (rows != n) {
    const std::size_t at = rows > n ? static_cast<std::size_t>(n) + 2 : lines.size();
    throw DatasetFormatError(Kind::kRowCount, at,
                             "header declares " + std::to_string(n) + " rows, file has " +
                                 std::to_string(rows));
  }
  Matrix pts(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line = i + 2;
    const auto toks = tokens(lines[i + 1]);
    if (toks.size() != d) {
      throw DatasetFormatError(Kind::kRowLength, line,
                               "expected " + std::to_string(d) + " values, got " +
                                   std::to_string(toks.size()));
    }
    auto row = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(toks[j], line);
    check_radius(row, radius, line);
  }
  return Dataset(std::move(pts), radius);
}

Dataset parse_dataset_binary(std::string_view bytes) {
  if (bytes.empty()) throw DatasetFormatError(Kind::kEmptyFile, 0, "");
  if (bytes.size() < kBinaryHeader) {
    throw DatasetFormatError(Kind::kTruncated, 0, "header needs " + std::to_string(kBinaryHeader) + " bytes");
  }
  if (bytes.substr(0, 4) != kMagic) throw DatasetFormatError(Kind::kMalformedHeader, 0, "bad magic");
  const std::uint64_t d = load_u64(bytes.data() + 4);
  const std::uint64_t n = load_u64(bytes.data() + 12);
  const double radius = std::bit_cast<double>(load_u64(bytes.data() + 20));
  if (d == 0 || n == 0) throw DatasetFormatError(Kind::kMalformedHeader, 0, "d and n must be positive");
  if (!std::isfinite(radius) || radius < 0.0) {
    throw DatasetFormatError(Kind::kMalformedHeader, 0, "radius must be finite and non-negative");
  }
  const std::uint64_t limit = (std::numeric_limits<std::uint64_t>::max() - kBinaryHeader) / 8;
  if (d > limit / n) throw DatasetFormatError(Kind::kMalformedHeader, 0, "d * n overflows");
  const std::uint64_t expected = kBinaryHeader + 8 * d * n;
  if (bytes.size() < expected) {
    throw DatasetFormatError(Kind::kTruncated, 0,
                             "expected " + std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw DatasetFormatError(Kind::kRowCount, 0, "trailing bytes after " + std::to_string(n) + " rows");
  }
  Matrix pts(n, d);
  const char* p = bytes.data() + kBinaryHeader;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = pts.row(i);
    for (std::size_t j = 0; j < d; ++j, p += 8) {
      row[j] = std::bit_cast<double>(load_u64(p));
      if (!std::isfinite(row[j])) {
        throw DatasetFormatError(Kind::kNonFinite, 0, "row " + std::to_string(i));
      }
    }
    double s = 0.0;
    for (double v : row) s += v * v;
    if (std::sqrt(s) > radius * (1.0 + Dataset::kRadiusSlack)) {
      throw DatasetFormatError(Kind::kRadiusExceeded, 0, "row " + std::to_string(i));
    }
  }
  return Dataset(std::move(pts), radius);
}

std::string serialize_dataset(const Dataset& ds, FileFormat format) {
  std::string out;
  if (format == FileFormat::kBinary) {
    out.reserve(kBinaryHeader + 8 * ds.size() * ds.dim());
    out.append(kMagic);
    store_u64(out, ds.dim());
    store_u64(out, ds.size());
    store_u64(out, std::bit_cast<std::uint64_t>(ds.radius()));
    for (double v : ds.points().data()) store_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
  }
  out += std::to_string(ds.dim()) + " " + std::to_string(ds.size()) + " " +
         format_double(ds.radius()) + "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.point(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetFormatError(Kind::kIo, 0, "cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw DatasetFormatError(Kind::kIo, 0, "read failed for '" + path + "'");
  if (bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == kMagic) {
    return parse_dataset_binary(bytes);
  }
  return parse_dataset_text(bytes);
}

void write_dataset(const Dataset& ds, const std::string& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetFormatError(Kind::kIo, 0, "cannot write '" + path + "'");
  const std::string bytes = serialize_dataset(ds, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DatasetFormatError(Kind::kIo, 0, "write failed for '" + path + "'");
}

}  // namespace privmoment::cli

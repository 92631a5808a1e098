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

// Dataset files.
//
// Text: first line "d n R", then n lines of d whitespace-separated decimal
// values, each written in the shortest form that parses back to the same
// double.
//
// Binary: the bytes "PMV1", three little-endian uint64 words (d, n, bit
// pattern of R), then n*d little-endian IEEE-754 doubles in row-major order.

#ifndef PRIVMOMENT_TOOLS_DATASET_IO_HPP_
#define PRIVMOMENT_TOOLS_DATASET_IO_HPP_

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "privmoment/dataset.hpp"

namespace privmoment::cli {

enum class FileFormat { kText, kBinary };

class DatasetFormatError : public std::runtime_error {
 public:
  enum class Kind {
    kIo,
    kEmptyFile,
    kMalformedHeader,
    kBadNumber,
    kNonFinite,
    kRowLength,
    kRowCount,
    kRadiusExceeded,
    kTruncated,
  };

  /// `line` is 1-based for text files and 0 when not applicable.
  DatasetFormatError(Kind kind, std::size_t line, const std::string& detail);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

std::string_view kind_name(DatasetFormatError::Kind kind);

/// Shortest decimal that round-trips to exactly `v`.
std::string format_double(double v);

Dataset parse_dataset_text(std::string_view text);
Dataset parse_dataset_binary(std::string_view bytes);

std::string serialize_dataset(const Dataset& ds, FileFormat format);

/// Detects the format from the magic bytes.
Dataset read_dataset(const std::string& path);
void write_dataset(const Dataset& ds, const std::string& path, FileFormat format);

}  // namespace privmoment::cli

#endif  // PRIVMOMENT_TOOLS_DATASET_IO_HPP_

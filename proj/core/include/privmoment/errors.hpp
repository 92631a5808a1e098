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

#ifndef PRIVMOMENT_ERRORS_HPP_
#define PRIVMOMENT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace privmoment {

// Argument validation failures use std::invalid_argument directly. The types
// below cover conditions a caller may want to tell apart.

/// An iterative numerical routine hit its iteration cap.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix that must be positive definite is not (at the requested floor).
class NotPositiveDefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace privmoment

#endif  // PRIVMOMENT_ERRORS_HPP_

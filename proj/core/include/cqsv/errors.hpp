// Copyright 2026 The collective-qsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQSV_ERRORS_HPP
#define CQSV_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqsv {

/// Raised when an exact (dense) computation would exceed the configured
/// dimension cap. Callers are expected to fall back to closed forms.
class DimensionCapError : public std::length_error {
 public:
  DimensionCapError(const std::string& what, std::size_t requested, std::size_t cap)
      : std::length_error(what + ": dimension " + std::to_string(requested) +
                          " exceeds cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

/// A numerical invariant (Hermiticity, trace, positivity, normalization)
/// failed on a value produced internally.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqsv

#endif  // CQSV_ERRORS_HPP

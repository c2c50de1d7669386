// Copyright 2026 The mmvir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generated-case property suite shared by the unit tests and the acceptance
// binary. Each property draws its cases from a seeded generator and reports
// how many cases ran and which failed.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mmvir::props {

struct PropertyResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
  /// Records one case; `detail` is only evaluated on failure.
  void check(bool pass, const std::function<std::string()>& detail);
};

struct Property {
  std::string module;
  std::string name;
  std::size_t cases = 0;
  std::function<PropertyResult(std::uint64_t seed, std::size_t cases)> run;
};

/// Every property, grouped by module.
const std::vector<Property>& all_properties();

}  // namespace mmvir::props

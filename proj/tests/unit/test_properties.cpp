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

#include <gtest/gtest.h>

#include "properties.hpp"

namespace mmvir::props {
namespace {

class PropertyTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(PropertyTest, Holds) {
  const auto& p = all_properties()[GetParam()];
  const auto r = p.run(0x5eed0000ULL + GetParam(), p.cases);
  EXPECT_EQ(r.cases, p.cases) << p.name;
  EXPECT_TRUE(r.ok()) << p.module << ": " << p.name << ": " << r.failures << " failures, first: " << r.first_failure;
}

std::string property_name(const ::testing::TestParamInfo<std::size_t>& info) {
  const auto& p = all_properties()[info.param];
  std::string s = p.module + "_" + std::to_string(info.param);
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

INSTANTIATE_TEST_SUITE_P(All, PropertyTest, ::testing::Range<std::size_t>(0, all_properties().size()), property_name);

TEST(PropertySuite, CoversAtLeastTenThousandCases) {
  std::size_t total = 0;
  for (const auto& p : all_properties()) total += p.cases;
  EXPECT_GE(total, 10000u);
}

}  // namespace
}  // namespace mmvir::props

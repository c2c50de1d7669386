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

#pragma once

#include <string>
#include <string_view>

namespace mmvir::text {

/// Porter (1980) suffix stripping, following the author's reference C
/// implementation (including its "bli" and "logi" rules). Input is expected
/// lowercase; words of length <= 2 and words with non-letters are returned
/// unchanged.
std::string porter_stem(std::string_view word);

}  // namespace mmvir::text

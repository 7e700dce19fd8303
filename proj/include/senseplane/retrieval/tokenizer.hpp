// Copyright 2026 The Senseplane Authors
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
#include <vector>

namespace senseplane::retrieval {

// Lowercases, splits on non-alphanumerics and drops stopwords and
// numeric-only tokens.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view token);
bool is_negation(std::string_view token);

}  // namespace senseplane::retrieval

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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace senseplane::secure {

enum class GuardVerdict { kPass, kAbstain, kHumanConfirm };

std::string_view to_string(GuardVerdict verdict);
GuardVerdict guard_verdict_from_string(std::string_view name);

struct GuardRules {
  // Case-insensitive regexes; any hit means abstain.
  std::vector<std::string> forbidden_topics;
  // An unsafe verb and a protected object in the same sentence means a human
  // must confirm.
  std::vector<std::string> unsafe_verbs;
  std::vector<std::string> protected_objects;

  static GuardRules defaults();
};

// Rules compiled once for repeated checks.
class PolicyGuard {
 public:
  explicit PolicyGuard(const GuardRules& rules);
  ~PolicyGuard();
  PolicyGuard(PolicyGuard&&) noexcept;
  PolicyGuard& operator=(PolicyGuard&&) noexcept;

  GuardVerdict check(std::string_view text) const;

 private:
  struct Compiled;
  std::unique_ptr<Compiled> compiled_;
};

GuardVerdict policy_guard(std::string_view text, const GuardRules& rules);

}  // namespace senseplane::secure

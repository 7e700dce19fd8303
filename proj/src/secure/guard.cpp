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

#include "senseplane/secure/guard.hpp"

#include <optional>

#include <boost/regex.hpp>

#include "senseplane/error.hpp"

namespace senseplane::secure {
namespace {

boost::regex word_alternation(const std::vector<std::string>& words) {
  std::string alt;
  for (const auto& w : words) {
    if (!alt.empty()) alt += '|';
    alt += w;
  }
  return boost::regex("\\b(?:" + alt + ")\\b", boost::regex::icase);
}

}  // namespace

std::string_view to_string(GuardVerdict verdict) {
  switch (verdict) {
    case GuardVerdict::kPass: return "pass";
    case GuardVerdict::kAbstain: return "abstain";
    case GuardVerdict::kHumanConfirm: return "human-confirm";
  }
  return "pass";
}

GuardVerdict guard_verdict_from_string(std::string_view name) {
  if (name == "pass") return GuardVerdict::kPass;
  if (name == "abstain") return GuardVerdict::kAbstain;
  if (name == "human-confirm") return GuardVerdict::kHumanConfirm;
  fail(ErrorCode::kFormatError, "unknown guard verdict: " + std::string(name));
}

GuardRules GuardRules::defaults() {
  GuardRules r;
  r.forbidden_topics = {R"(\bweapons?\b)", R"(\bexplosives?\b)", R"(\bself[- ]harm\b)",
                        R"(\bcovert(ly)? (track|follow|record)\w*)",
                        R"(\bidentify (the )?(person|resident) (by|from) (face|voice|gait)\b)"};
  r.unsafe_verbs = {"disable", "disarm", "override", "bypass", "unlock", "shut off", "turn off",
                    "increase the dose", "double the dose"};
  r.protected_objects = {"smoke detectors?", "fire alarms?", "alarms?", "door locks?",
                         "front door",       "gas valves?", "insulin pump", "oxygen",
                         "medication",       "fire exits?", "breakers?"};
  return r;
}

struct PolicyGuard::Compiled {
  std::vector<boost::regex> topics;
  std::optional<boost::regex> verbs;
  std::optional<boost::regex> objects;
};

PolicyGuard::PolicyGuard(const GuardRules& rules) : compiled_(std::make_unique<Compiled>()) {
  if (rules.forbidden_topics.empty() && (rules.unsafe_verbs.empty() || rules.protected_objects.empty())) {
    fail(ErrorCode::kInvalidArgument, "guard rules are empty");
  }
  for (const auto& topic : rules.forbidden_topics) {
    compiled_->topics.emplace_back(topic, boost::regex::icase);
  }
  if (!rules.unsafe_verbs.empty() && !rules.protected_objects.empty()) {
    compiled_->verbs = word_alternation(rules.unsafe_verbs);
    compiled_->objects = word_alternation(rules.protected_objects);
  }
}

PolicyGuard::~PolicyGuard() = default;
PolicyGuard::PolicyGuard(PolicyGuard&&) noexcept = default;
PolicyGuard& PolicyGuard::operator=(PolicyGuard&&) noexcept = default;

GuardVerdict PolicyGuard::check(std::string_view text) const {
  const std::string s(text);
  for (const auto& topic : compiled_->topics) {
    if (boost::regex_search(s, topic)) return GuardVerdict::kAbstain;
  }
  if (!compiled_->verbs) return GuardVerdict::kPass;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] != '.' && s[i] != '!' && s[i] != '?' && s[i] != '\n') continue;
    const auto first = s.begin() + static_cast<std::ptrdiff_t>(start);
    const auto last = s.begin() + static_cast<std::ptrdiff_t>(i);
    if (boost::regex_search(first, last, *compiled_->verbs) &&
        boost::regex_search(first, last, *compiled_->objects)) {
      return GuardVerdict::kHumanConfirm;
    }
    start = i + 1;
  }
  return GuardVerdict::kPass;
}

GuardVerdict policy_guard(std::string_view text, const GuardRules& rules) {
  return PolicyGuard(rules).check(text);
}

}  // namespace senseplane::secure

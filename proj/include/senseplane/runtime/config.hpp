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

#include <filesystem>
#include <string>

#include "senseplane/runtime/pipeline.hpp"

namespace senseplane::runtime {

// JSON config. Every key is optional and falls back to the default; unknown
// keys are rejected with ConfigError so typos never pass silently. The key
// set mirrors the struct fields (see docs/config.md).
PipelineConfig config_from_json(std::string_view text);
std::string config_to_json(const PipelineConfig& config);

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& config, const std::filesystem::path& path);

}  // namespace senseplane::runtime

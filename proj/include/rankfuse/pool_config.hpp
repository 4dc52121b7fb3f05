// Copyright (C) 2026 The rankfuse Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/fusion.hpp"

namespace rankfuse {

/// One entry of a pool configuration file.
struct PoolSpec {
  std::string system_name;
  std::optional<double> weight;
  bool uses_relevance_judgments = false;
  /// Paths or glob patterns, relative to the configuration file.
  std::vector<std::string> run_files;
};

/// Accepts either a JSON array of pool entries or an object with a "pools" array.
std::vector<PoolSpec> parse_pool_specs(std::string_view json_text);

/// Expands globs (sorted, relative to base_dir), parses every run file and
/// fills omitted weights with default_weights().
std::vector<RunPool> load_pools(const std::vector<PoolSpec>& specs, const std::filesystem::path& base_dir);

/// parse_pool_specs + load_pools for a configuration file.
std::vector<RunPool> load_pool_config(const std::filesystem::path& config_path);

/// Sorted matches of a glob pattern, or the path itself when it has no wildcard.
std::vector<std::filesystem::path> expand_glob(const std::filesystem::path& pattern);

}  // namespace rankfuse

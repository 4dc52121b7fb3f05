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

#include "rankfuse/pool_config.hpp"

#include <glob.h>

#include <algorithm>
#include <set>

#include "json_util.hpp"
#include "rankfuse/corpus_io.hpp"

namespace rankfuse {

namespace detail {

std::vector<PoolSpec> pool_specs_from_json(const json& pools, const std::string& path) {
  if (!pools.is_array()) throw ValidationError(path + ": expected an array of pools");
  std::vector<PoolSpec> specs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto& p = pools[i];
    const auto where = path + "[" + std::to_string(i) + "]";
    if (!p.is_object()) throw ValidationError(where + ": expected an object");
    PoolSpec s;
    s.system_name = get_as<std::string>(p, "system_name", where);
    if (s.system_name.empty()) throw ValidationError(where + ".system_name: empty");
    if (!names.insert(s.system_name).second)
      throw ValidationError(where + ".system_name: duplicate name '" + s.system_name + "'");
    if (p.contains("weight") && !p.at("weight").is_null()) {
      s.weight = get_as<double>(p, "weight", where);
      if (!(*s.weight > 0.0)) throw ValidationError(where + ".weight: must be positive");
    }
    s.uses_relevance_judgments = get_or<bool>(p, "uses_relevance_judgments", false, where);
    s.run_files = get_as<std::vector<std::string>>(p, "run_files", where);
    if (s.run_files.empty()) throw ValidationError(where + ".run_files: empty");
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace detail

std::vector<PoolSpec> parse_pool_specs(std::string_view json_text) {
  auto doc = detail::parse_json(json_text, "pool config");
  if (doc.is_object()) {
    if (!doc.contains("pools")) throw ValidationError("pool config: missing 'pools'");
    return detail::pool_specs_from_json(doc.at("pools"), "pools");
  }
  return detail::pool_specs_from_json(doc, "pools");
}

std::vector<std::filesystem::path> expand_glob(const std::filesystem::path& pattern) {
  const auto s = pattern.string();
  if (s.find_first_of("*?[") == std::string::npos) return {pattern};
  glob_t g{};
  int rc = ::glob(s.c_str(), 0, nullptr, &g);
  std::vector<std::filesystem::path> out;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw Error("glob failed for " + s);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RunPool> load_pools(const std::vector<PoolSpec>& specs, const std::filesystem::path& base_dir) {
  std::vector<RunPool> pools;
  for (const auto& s : specs) {
    RunPool pool;
    pool.system_name = s.system_name;
    pool.uses_relevance_judgments = s.uses_relevance_judgments;
    for (const auto& pattern : s.run_files) {
      std::filesystem::path p(pattern);
      if (p.is_relative()) p = base_dir / p;
      auto matches = expand_glob(p);
      if (matches.empty()) throw Error("pool '" + s.system_name + "': no run files match " + p.string());
      for (const auto& m : matches) {
        try {
          pool.runs.push_back(parse_run(read_file(m)));
        } catch (const Error& e) {
          throw Error("pool '" + s.system_name + "': " + m.string() + ": " + e.what());
        }
      }
    }
    pools.push_back(std::move(pool));
  }
  pools = default_weights(std::move(pools));
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (specs[i].weight) pools[i].weight = *specs[i].weight;
  return pools;
}

std::vector<RunPool> load_pool_config(const std::filesystem::path& config_path) {
  auto specs = parse_pool_specs(read_file(config_path));
  return load_pools(specs, config_path.parent_path());
}

}  // namespace rankfuse

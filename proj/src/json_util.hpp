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

#include <string>
#include <string_view>

#include <json.hpp>

#include "rankfuse/pool_config.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse::detail {

using nlohmann::json;

inline json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": invalid JSON: " + e.what(), 0);
  }
}

/// Typed member access with the JSON path in error messages.
template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key + ": missing");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path + "." + key + ": wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get_as<T>(obj, key, path);
}

std::vector<PoolSpec> pool_specs_from_json(const json& pools, const std::string& path);

}  // namespace rankfuse::detail

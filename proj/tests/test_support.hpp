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

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse::testing {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(RANKFUSE_TEST_DATA) / name; }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("rankfuse_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string doc_name(int i) { return "d" + std::to_string(i); }

// Random valid run: per topic, a random subset of `n_docs` documents in a
// random order with strictly decreasing scores.
inline Run random_run(std::mt19937_64& rng, int n_topics, int n_docs, const std::string& tag) {
  Run run;
  run.tag = tag;
  std::uniform_int_distribution<int> len(1, n_docs);
  for (int t = 1; t <= n_topics; ++t) {
    std::vector<int> docs(static_cast<std::size_t>(n_docs));
    for (int i = 0; i < n_docs; ++i) docs[static_cast<std::size_t>(i)] = i;
    std::shuffle(docs.begin(), docs.end(), rng);
    docs.resize(static_cast<std::size_t>(len(rng)));
    auto& entries = run.topics[t];
    for (std::size_t r = 0; r < docs.size(); ++r)
      entries.push_back({doc_name(docs[r]), static_cast<int>(r) + 1, 100.0 - static_cast<double>(r)});
  }
  return run;
}

}  // namespace rankfuse::testing

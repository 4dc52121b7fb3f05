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

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rankfuse {

using TopicNumber = int;

/// Base class for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct Topic {
  TopicNumber number = 0;
  std::string query;
  std::string question;
  std::string narrative;
};

struct Doc {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::string full_text;
};

struct RunEntry {
  std::string doc_id;
  int rank = 0;
  double score = 0.0;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// A ranked list per topic. Within a topic ranks are 1..n, doc ids unique and
/// scores non-increasing; see validate_run().
struct Run {
  std::string tag;
  std::map<TopicNumber, std::vector<RunEntry>> topics;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, entries] : topics) n += entries.size();
    return n;
  }

  friend bool operator==(const Run&, const Run&) = default;
};

/// Graded judgments keyed by (topic, doc_id). Grades are always >= 0.
struct Qrels {
  std::map<std::pair<TopicNumber, std::string>, int> judgments;

  /// Grade for (topic, doc), or -1 when unjudged.
  int grade(TopicNumber topic, const std::string& doc_id) const {
    auto it = judgments.find({topic, doc_id});
    return it == judgments.end() ? -1 : it->second;
  }

  friend bool operator==(const Qrels&, const Qrels&) = default;
};

}  // namespace rankfuse

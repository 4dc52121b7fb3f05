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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

/// Parses a `<topics>` document of `<topic number="N">` elements with
/// query/question/narrative children. Field text is trimmed and internal
/// whitespace runs collapse to one space. Only the five predefined XML
/// entities are resolved.
std::vector<Topic> parse_topics(std::string_view xml);

/// Parses TREC run text (`topic Q0 doc_id rank score tag`). Entries are grouped
/// per topic, ordered by rank and validated with validate_run(). The tag is
/// taken from the first line.
Run parse_run(std::string_view text);

/// Throws ValidationError naming the topic and the violated invariant.
void validate_run(const Run& run);

/// TREC run text: topics ascending, entries in rank order, scores with 6
/// significant digits.
std::string write_run(const Run& run);

struct QrelsParseResult {
  Qrels qrels;
  std::size_t dropped_negative = 0;
  std::size_t duplicates = 0;
};

/// Parses `topic iteration doc_id grade`. Negative grades are dropped and
/// counted; a repeated (topic, doc) keeps the last grade.
QrelsParseResult parse_qrels(std::string_view text);

std::string write_qrels(const Qrels& qrels);

/// JSON Lines with keys doc_id (required), title, abstract, full_text.
std::vector<Doc> load_corpus(std::string_view jsonl);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rankfuse

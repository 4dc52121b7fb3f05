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

#include "rankfuse/text.hpp"

#include <algorithm>
#include <iterator>

namespace rankfuse {

namespace {

constexpr std::string_view kStopwords[] = {
    "about", "above",   "after",   "again",   "against", "all",     "am",      "an",     "and",     "any",
    "are",   "as",      "at",      "be",      "because", "been",    "before",  "being",  "below",   "between",
    "both",  "but",     "by",      "can",     "could",   "did",     "do",      "does",   "doing",   "don",
    "down",  "during",  "each",    "few",     "for",     "from",    "further", "had",    "has",     "have",
    "having", "he",     "her",     "here",    "hers",    "herself", "him",     "himself", "his",    "how",
    "if",    "in",      "into",    "is",      "it",      "its",     "itself",  "just",   "me",      "more",
    "most",  "my",      "myself",  "no",      "nor",     "not",     "now",     "of",     "off",     "on",
    "once",  "only",    "or",      "other",   "our",     "ours",    "ourselves", "out",  "over",    "own",
    "same",  "she",     "should",  "so",      "some",    "such",    "than",    "that",   "the",     "their",
    "theirs", "them",   "themselves", "then", "there",   "these",   "they",    "this",   "those",   "through",
    "to",    "too",     "under",   "until",   "up",      "very",    "was",     "we",     "were",    "what",
    "when",  "where",   "which",   "while",   "who",     "whom",    "why",     "will",   "with",    "would",
    "you",   "your",    "yours",   "yourself", "yourselves", "also", "may",
};

const std::vector<std::string_view>& sorted_stopwords() {
  static const auto sorted = [] {
    std::vector<std::string_view> s(std::begin(kStopwords), std::end(kStopwords));
    std::sort(s.begin(), s.end());
    return s;
  }();
  return sorted;
}

bool is_alnum_ascii(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

}  // namespace

bool is_stopword(std::string_view token) {
  const auto& s = sorted_stopwords();
  return std::binary_search(s.begin(), s.end(), token);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2 && !is_stopword(cur)) out.push_back(porter_stem(cur));
    cur.clear();
  };
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (is_alnum_ascii(c)) {
      cur.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace rankfuse

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

// Porter stemmer following the rules as originally published (M.F. Porter,
// "An algorithm for suffix stripping", Program 14(3), 1980), without the
// later departures of the reference C implementation.

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

#include "rankfuse/text.hpp"

namespace rankfuse {

namespace {

using Rule = std::pair<std::string_view, std::string_view>;

class Stemmer {
 public:
  explicit Stemmer(std::string_view w) : w_(w) {}

  std::string run() {
    if (w_.size() <= 2) return w_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends cvc where the final c is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace(std::string_view suffix, std::string_view with) {
    w_.resize(stem_len(suffix));
    w_.append(with);
  }

  // Longest matching suffix wins; when its condition fails nothing changes.
  template <typename Cond>
  bool apply_longest(std::initializer_list<Rule> rules, Cond cond) {
    const Rule* best = nullptr;
    for (const auto& r : rules)
      if (ends(r.first) && (!best || r.first.size() > best->first.size())) best = &r;
    if (!best || !cond(*best)) return false;
    replace(best->first, best->second);
    return true;
  }

  void step1a() {
    apply_longest({{"sses", "ss"}, {"ies", "i"}, {"ss", "ss"}, {"s", ""}}, [](const Rule&) { return true; });
  }

  void step1b() {
    bool cleanup = false;
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace("eed", "ee");
    } else if (ends("ed") && has_vowel(stem_len("ed"))) {
      replace("ed", "");
      cleanup = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      replace("ing", "");
      cleanup = true;
    }
    if (!cleanup) return;
    if (ends("at") || ends("bl") || ends("iz")) {
      w_.push_back('e');
    } else if (double_consonant(w_.size())) {
      char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_.push_back('e');
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    apply_longest({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
                   {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
                   {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                   {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
                   {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}},
                  [&](const Rule& r) { return measure(stem_len(r.first)) > 0; });
  }

  void step3() {
    apply_longest({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"},
                   {"ful", ""},     {"ness", ""}},
                  [&](const Rule& r) { return measure(stem_len(r.first)) > 0; });
  }

  void step4() {
    apply_longest({{"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},  {"able", ""},
                   {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ion", ""},
                   {"ou", ""},   {"ism", ""},  {"ate", ""},  {"iti", ""}, {"ous", ""}, {"ive", ""},
                   {"ize", ""}},
                  [&](const Rule& r) {
                    auto len = stem_len(r.first);
                    if (measure(len) <= 1) return false;
                    if (r.first == "ion") return len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
                    return true;
                  });
  }

  void step5a() {
    if (!ends("e")) return;
    auto len = stem_len("e");
    int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
  }

  std::string w_;
};

}  // namespace

std::string porter_stem(std::string_view word) { return Stemmer(word).run(); }

}  // namespace rankfuse

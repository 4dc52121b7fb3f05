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

#include "rankfuse/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "strings.hpp"

namespace rankfuse {

namespace {

// Minimal XML reader: elements, attributes, text, comments, CDATA and the
// prolog. Enough for topic files; no DTDs and no custom entities.
struct XmlElement {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<std::unique_ptr<XmlElement>> children;
  std::string text;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return &v;
    return nullptr;
  }
  const XmlElement* child(std::string_view key) const {
    for (const auto& c : children)
      if (c->name == key) return c.get();
    return nullptr;
  }
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view src) : src_(src) {}

  std::unique_ptr<XmlElement> parse_document() {
    skip_misc();
    if (at_end() || peek() != '<') fail("expected root element");
    auto root = parse_element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("malformed XML: " + msg, line_); }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_)
      if (src_[pos_] == '\n') ++line_;
  }

  void skip_ws() {
    while (!at_end() && detail::is_space(peek())) advance();
  }

  void skip_until(std::string_view terminator) {
    auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail("unterminated construct, expected '" + std::string(terminator) + "'");
    advance(end + terminator.size() - pos_);
  }

  // Prolog, comments, processing instructions and doctype around the root.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>");
      } else if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek())) advance();
    if (start == pos_) fail("expected a name");
    return std::string(src_.substr(start, pos_ - start));
  }

  void append_decoded(std::string& out, std::string_view raw) const {
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else fail("unsupported entity '&" + std::string(ent) + ";'");
      i = semi + 1;
    }
  }

  std::unique_ptr<XmlElement> parse_element() {
    auto el = std::make_unique<XmlElement>();
    el->line = line_;
    advance();  // '<'
    el->name = parse_name();
    for (;;) {
      skip_ws();
      if (at_end()) fail("unterminated start tag <" + el->name + ">");
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      auto key = parse_name();
      skip_ws();
      if (at_end() || peek() != '=') fail("expected '=' after attribute " + key);
      advance();
      skip_ws();
      if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted value for attribute " + key);
      char quote = peek();
      advance();
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string value;
      append_decoded(value, src_.substr(pos_, end - pos_));
      advance(end + 1 - pos_);
      el->attrs.emplace_back(std::move(key), std::move(value));
    }
    // Content.
    for (;;) {
      if (at_end()) fail("missing end tag </" + el->name + ">");
      if (starts_with("</")) {
        advance(2);
        auto name = parse_name();
        if (name != el->name) fail("mismatched end tag </" + name + ">, expected </" + el->name + ">");
        skip_ws();
        if (at_end() || peek() != '>') fail("expected '>' in end tag");
        advance();
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<![CDATA[")) {
        advance(9);
        auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        el->text.append(src_.substr(pos_, end - pos_));
        advance(end + 3 - pos_);
      } else if (starts_with("<?")) {
        skip_until("?>");
      } else if (peek() == '<') {
        el->children.push_back(parse_element());
      } else {
        std::size_t start = pos_;
        while (!at_end() && peek() != '<') advance();
        append_decoded(el->text, src_.substr(start, pos_ - start));
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string field_text(const XmlElement& topic, std::string_view name) {
  const auto* c = topic.child(name);
  return c ? detail::normalize_ws(c->text) : std::string();
}

}  // namespace

std::vector<Topic> parse_topics(std::string_view xml) {
  auto root = XmlReader(xml).parse_document();
  if (root->name != "topics") throw ParseError("root element must be <topics>, found <" + root->name + ">", root->line);

  std::vector<Topic> topics;
  std::set<TopicNumber> seen;
  for (const auto& el : root->children) {
    if (el->name != "topic") continue;
    const auto* number = el->attr("number");
    if (!number) throw ParseError("<topic> element is missing the 'number' attribute", el->line);
    auto n = detail::parse_int<TopicNumber>(detail::normalize_ws(*number));
    if (!n || *n <= 0)
      throw ParseError("<topic> number attribute '" + *number + "' is not a positive integer", el->line);
    if (!seen.insert(*n).second) throw ParseError("duplicate topic number " + std::to_string(*n), el->line);

    Topic t;
    t.number = *n;
    t.query = field_text(*el, "query");
    t.question = field_text(*el, "question");
    t.narrative = field_text(*el, "narrative");
    if (t.query.empty()) throw ParseError("topic " + std::to_string(*n) + " has an empty <query>", el->line);
    topics.push_back(std::move(t));
  }
  return topics;
}

namespace {

struct PendingEntry {
  RunEntry entry;
  std::size_t line;
};

void check_topic(TopicNumber topic, const std::vector<PendingEntry>& entries) {
  std::unordered_set<std::string_view> docs;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [e, line] = entries[i];
    auto where = [&, line = line] {
      return "topic " + std::to_string(topic) + (line ? ", line " + std::to_string(line) : std::string()) + ": ";
    };
    int expected = static_cast<int>(i) + 1;
    if (e.rank < 1) throw ValidationError(where() + "non-positive rank " + std::to_string(e.rank));
    if (e.rank < expected) throw ValidationError(where() + "duplicate rank " + std::to_string(e.rank));
    if (e.rank > expected)
      throw ValidationError(where() + "rank gap: expected rank " + std::to_string(expected) + ", found " +
                            std::to_string(e.rank));
    if (!docs.insert(e.doc_id).second) throw ValidationError(where() + "duplicate doc_id " + e.doc_id);
    if (i > 0 && e.score > entries[i - 1].entry.score)
      throw ValidationError(where() + "score increases with rank at rank " + std::to_string(e.rank));
  }
}

}  // namespace

void validate_run(const Run& run) {
  for (const auto& [topic, entries] : run.topics) {
    std::vector<PendingEntry> pending;
    pending.reserve(entries.size());
    for (const auto& e : entries) pending.push_back({e, 0});
    check_topic(topic, pending);
  }
}

Run parse_run(std::string_view text) {
  Run run;
  std::map<TopicNumber, std::vector<PendingEntry>> grouped;
  bool have_tag = false;
  detail::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    auto cols = detail::split_ws(line);
    if (cols.empty()) return;
    if (cols.size() != 6) throw ParseError("expected 6 columns (topic Q0 doc_id rank score tag), found " +
                                               std::to_string(cols.size()), lineno);
    auto topic = detail::parse_int<TopicNumber>(cols[0]);
    if (!topic) throw ParseError("non-numeric topic '" + std::string(cols[0]) + "'", lineno);
    auto rank = detail::parse_int<int>(cols[3]);
    if (!rank) throw ParseError("non-numeric rank '" + std::string(cols[3]) + "'", lineno);
    auto score = detail::parse_double(cols[4]);
    if (!score) throw ParseError("non-numeric score '" + std::string(cols[4]) + "'", lineno);
    if (!have_tag) {
      run.tag = std::string(cols[5]);
      have_tag = true;
    }
    grouped[*topic].push_back({RunEntry{std::string(cols[2]), *rank, *score}, lineno});
  });

  for (auto& [topic, entries] : grouped) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const PendingEntry& a, const PendingEntry& b) { return a.entry.rank < b.entry.rank; });
    check_topic(topic, entries);
    auto& out = run.topics[topic];
    out.reserve(entries.size());
    for (auto& p : entries) out.push_back(std::move(p.entry));
  }
  return run;
}

std::string write_run(const Run& run) {
  std::string out;
  for (const auto& [topic, entries] : run.topics) {
    const std::string prefix = std::to_string(topic) + " Q0 ";
    for (const auto& e : entries) {
      out += prefix;
      out += e.doc_id;
      out += ' ';
      out += std::to_string(e.rank);
      out += ' ';
      out += detail::format_g(e.score, 6);
      out += ' ';
      out += run.tag;
      out += '\n';
    }
  }
  return out;
}

QrelsParseResult parse_qrels(std::string_view text) {
  QrelsParseResult result;
  detail::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    auto cols = detail::split_ws(line);
    if (cols.empty()) return;
    if (cols.size() != 4)
      throw ParseError("expected 4 columns (topic iteration doc_id grade), found " + std::to_string(cols.size()),
                       lineno);
    auto topic = detail::parse_int<TopicNumber>(cols[0]);
    if (!topic) throw ParseError("non-numeric topic '" + std::string(cols[0]) + "'", lineno);
    auto grade = detail::parse_int<int>(cols[3]);
    if (!grade) throw ParseError("non-numeric grade '" + std::string(cols[3]) + "'", lineno);
    if (*grade < 0) {
      ++result.dropped_negative;
      return;
    }
    auto [it, inserted] = result.qrels.judgments.insert_or_assign({*topic, std::string(cols[2])}, *grade);
    if (!inserted) ++result.duplicates;
  });
  return result;
}

std::string write_qrels(const Qrels& qrels) {
  std::string out;
  for (const auto& [key, grade] : qrels.judgments) {
    out += std::to_string(key.first);
    out += " 0 ";
    out += key.second;
    out += ' ';
    out += std::to_string(grade);
    out += '\n';
  }
  return out;
}

std::vector<Doc> load_corpus(std::string_view jsonl) {
  std::vector<Doc> docs;
  std::unordered_set<std::string> ids;
  detail::for_each_line(jsonl, [&](std::string_view line, std::size_t lineno) {
    if (detail::split_ws(line).empty()) return;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", lineno);
    auto text_field = [&](const char* key, bool required) -> std::string {
      auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) {
        if (required) throw ParseError(std::string("missing '") + key + "'", lineno);
        return {};
      }
      if (!it->is_string()) throw ParseError(std::string("'") + key + "' must be a string", lineno);
      return it->get<std::string>();
    };
    Doc d;
    d.doc_id = text_field("doc_id", true);
    if (d.doc_id.empty() || std::any_of(d.doc_id.begin(), d.doc_id.end(), detail::is_space))
      throw ParseError("doc_id must be a non-empty token without whitespace", lineno);
    d.title = text_field("title", false);
    d.abstract = text_field("abstract", false);
    d.full_text = text_field("full_text", false);
    if (d.abstract.empty() && d.full_text.empty())
      throw ValidationError("line " + std::to_string(lineno) + ": document " + d.doc_id +
                            " has neither abstract nor full_text");
    if (!ids.insert(d.doc_id).second) throw ValidationError("duplicate doc_id " + d.doc_id);
    docs.push_back(std::move(d));
  });
  return docs;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace rankfuse

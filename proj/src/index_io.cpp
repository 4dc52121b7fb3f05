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

#include <bit>
#include <cmath>
#include <cstring>

#include "rankfuse/corpus_io.hpp"
#include "rankfuse/lexical.hpp"

namespace rankfuse {

namespace {

constexpr char kMagic[4] = {'R', 'F', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }

  template <typename T>
  void fixed(T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }

  void f64(double v) { fixed(std::bit_cast<std::uint64_t>(v)); }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<char>((v & 0x7f) | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<char>(v));
  }

  void str(const std::string& s) {
    varint(s.size());
    out_.append(s);
  }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("index file: " + what + " at byte " + std::to_string(pos_), 0);
  }

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail("unexpected end of data");
  }

  template <typename T>
  T fixed() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  double f64() { return std::bit_cast<double>(fixed<std::uint64_t>()); }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      auto byte = static_cast<unsigned char>(in_[pos_++]);
      v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return v;
    }
    fail("varint too long");
  }

  std::uint32_t u32_varint() {
    auto v = varint();
    if (v > 0xffffffffULL) fail("value out of 32-bit range");
    return static_cast<std::uint32_t>(v);
  }

  std::string str() {
    auto n = varint();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_index(const InvertedIndex& index) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.fixed<std::uint32_t>(kVersion);
  w.fixed<std::uint8_t>(static_cast<std::uint8_t>(index.field_source()));
  w.fixed<std::uint64_t>(index.n_docs());
  w.f64(index.avg_doc_len());
  for (std::uint32_t d = 0; d < index.n_docs(); ++d) {
    w.str(index.doc_id(d));
    w.varint(index.doc_len(d));
  }
  w.fixed<std::uint64_t>(index.vocabulary_size());
  for (std::uint32_t t = 0; t < index.vocabulary_size(); ++t) {
    w.str(index.term(t));
    auto plist = index.postings(t);
    w.varint(plist.size());
    std::uint32_t prev = 0;
    for (std::size_t i = 0; i < plist.size(); ++i) {
      // First gap is the ordinal itself.
      w.varint(i == 0 ? plist[i].doc : plist[i].doc - prev);
      w.varint(plist[i].count);
      prev = plist[i].doc;
    }
  }
  return w.take();
}

InvertedIndex deserialize_index(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(r.raw(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0) r.fail("bad magic, not an index file");
  auto version = r.fixed<std::uint32_t>();
  if (version != kVersion)
    throw ParseError("index file version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kVersion) + ")",
                     0);
  auto field_byte = r.fixed<std::uint8_t>();
  if (field_byte > 1) r.fail("unknown field source");
  auto n_docs = r.fixed<std::uint64_t>();
  const double stored_avg = r.f64();
  if (n_docs > bytes.size()) r.fail("implausible document count");

  std::vector<std::string> doc_ids;
  std::vector<std::uint32_t> doc_len;
  doc_ids.reserve(n_docs);
  doc_len.reserve(n_docs);
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    doc_ids.push_back(r.str());
    doc_len.push_back(r.u32_varint());
  }

  auto n_terms = r.fixed<std::uint64_t>();
  if (n_terms > bytes.size()) r.fail("implausible vocabulary size");
  std::vector<std::string> terms;
  std::vector<std::vector<Posting>> postings;
  terms.reserve(n_terms);
  postings.reserve(n_terms);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    terms.push_back(r.str());
    auto df = r.varint();
    if (df > n_docs) r.fail("document frequency exceeds document count");
    std::vector<Posting> plist;
    plist.reserve(df);
    std::uint64_t doc = 0;
    for (std::uint64_t i = 0; i < df; ++i) {
      doc = i == 0 ? r.varint() : doc + r.varint();
      if (doc >= n_docs) r.fail("posting references unknown document");
      plist.push_back({static_cast<std::uint32_t>(doc), r.u32_varint()});
    }
    postings.push_back(std::move(plist));
  }
  if (!r.done()) r.fail("trailing bytes");

  auto index = InvertedIndex::from_parts(static_cast<FieldSource>(field_byte), std::move(doc_ids),
                                         std::move(doc_len), std::move(terms), std::move(postings));
  if (std::abs(index.avg_doc_len() - stored_avg) > 1e-9 * std::max(1.0, std::abs(stored_avg)))
    throw ValidationError("index file: stored average document length disagrees with document lengths");
  return index;
}

void save_index(const InvertedIndex& index, const std::filesystem::path& path) {
  write_file(path, serialize_index(index));
}

InvertedIndex load_index(const std::filesystem::path& path) { return deserialize_index(read_file(path)); }

}  // namespace rankfuse

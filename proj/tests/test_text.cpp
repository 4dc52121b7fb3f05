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


#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "rankfuse/corpus_io.hpp"
#include "rankfuse/text.hpp"
#include "test_support.hpp"

using namespace rankfuse;

TEST_CASE("stems agree with the reference Porter table", "[text][porter]") {
  // word<TAB>stem pairs frozen from an independent implementation of the original algorithm.
  std::istringstream table(read_file(testing::data_path("porter_stems.tsv")));
  std::string line;
  std::size_t n = 0;
  std::size_t mismatches = 0;
  while (std::getline(table, line)) {
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const auto word = line.substr(0, tab);
    const auto want = line.substr(tab + 1);
    const auto got = porter_stem(word);
    if (got != want) {
      ++mismatches;
      UNSCOPED_INFO(word << ": got " << got << ", want " << want);
    }
    ++n;
  }
  CHECK(n > 1000);
  CHECK(mismatches == 0);
}

TEST_CASE("classic Porter examples", "[text][porter]") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("generalization") == "gener");
  CHECK(porter_stem("immunity") == "immun");
  CHECK(porter_stem("infection") == "infect");
  CHECK(porter_stem("spread") == "spread");
  // Words of one or two letters are left alone.
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("") == "");
}

TEST_CASE("tokenizer pipeline", "[text][tokenize]") {
  using V = std::vector<std::string>;
  CHECK(tokenize("Covid covid spread") == V{"covid", "covid", "spread"});
  CHECK(tokenize("post-infection COVID-19 immunity") == V{"post", "infect", "covid", "19", "immun"});
  // Single characters and stopwords are dropped.
  CHECK(tokenize("a b c the of and x") == V{});
  CHECK(tokenize("") == V{});
  CHECK(tokenize("   ,,, ---") == V{});
  // Non-ASCII bytes separate tokens.
  CHECK(tokenize("caf\xc3\xa9s masks") == V{"caf", "mask"});
  CHECK(tokenize("T-cell") == V{"cell"});
}

TEST_CASE("stopword list", "[text][tokenize]") {
  CHECK(is_stopword("the"));
  CHECK(is_stopword("and"));
  CHECK(is_stopword("which"));
  CHECK_FALSE(is_stopword("covid"));
  CHECK_FALSE(is_stopword("vaccine"));
}

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
#include <vector>

namespace rankfuse {

/// Porter (1980) suffix stripping. Input is expected lowercase ASCII.
std::string porter_stem(std::string_view word);

bool is_stopword(std::string_view lowercase_token);

/// The single analysis pipeline used for documents and queries: ASCII
/// lowercase, split on anything that is not [a-z0-9], drop tokens shorter
/// than two characters, drop stopwords, Porter-stem.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace rankfuse

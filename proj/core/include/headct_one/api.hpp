// Copyright 2026 The HeadCT-ONE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEADCT_ONE_API_HPP_
#define HEADCT_ONE_API_HPP_

// Document-level entry points. Everything crosses this boundary as the JSON
// interchange documents, which keeps language bindings free of a second
// copy of the data model.

#include <string>
#include <string_view>

namespace headct::api {

// Graph documents are loaded leniently; unnormalized graphs are normalized
// with the built-in ontologies and default config before scoring when
// auto_normalize is set. An empty scheme document means unit weights.
std::string score_documents(std::string_view gt_document,
                            std::string_view pred_document,
                            std::string_view scheme_document = {},
                            bool auto_normalize = false);

// An empty config document means the default configuration.
std::string normalize_document(std::string_view graph_document,
                               std::string_view config_document = {});

// Corpus given as a JSON array of graph documents.
std::string top_k_scheme_document(std::string_view corpus_document, int k,
                                  double multiplier);

// {"finding": <table>, "descriptor": <table>, "anatomy": <table>}
std::string builtin_ontologies_document();

}  // namespace headct::api

#endif  // HEADCT_ONE_API_HPP_

// Copyright 2026 The Proactiva Authors.
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

#ifndef PROACTIVA_KNOWLEDGE_BASE_H_
#define PROACTIVA_KNOWLEDGE_BASE_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proactiva/embedding.h"

namespace proactiva {

enum class ScenarioFamily { kInVehicleFunctions, kEnvironmentalInformation, kUserProfile };

std::string_view family_name(ScenarioFamily family);
ScenarioFamily family_from_name(std::string_view name);

using KnowledgeRow = std::map<std::string, std::string>;

// One scenario's table, In-Car style: declared columns plus rows of
// column -> value. Rows keep file order.
struct KnowledgeBase {
  std::string scenario;
  ScenarioFamily family = ScenarioFamily::kInVehicleFunctions;
  std::vector<std::string> fields;
  std::vector<KnowledgeRow> rows;
  std::string source_path;
};

struct KnowledgeEntry {
  std::string kb_scenario;
  std::size_t row_index = 0;
  std::string flattened_text;
};

// KB file: {"scenario": ..., "family": ..., "fields": [...], "rows": [{...}]}.
// Throws ParseError (with line), Error(kSchemaViolation), Error(kEmptyKnowledgeBase).
KnowledgeBase parse_knowledge_base(std::string_view document, std::string source_path = "");
KnowledgeBase load_knowledge_base(const std::string& path);

// Every *.json file in `dir`, sorted by file name.
std::vector<KnowledgeBase> load_knowledge_dir(const std::string& dir);

// "field: value; field: value" in declared field order, skipping empty values.
// Throws Error(kIndexOutOfRange).
KnowledgeEntry flatten_row(const KnowledgeBase& kb, std::size_t row_index);

// Inverse of the flattening above: the (field, value) pairs in order.
std::vector<std::pair<std::string, std::string>> parse_flattened(std::string_view flattened);

std::string entry_id(std::string_view scenario, std::size_t row_index);
// Throws Error(kParseError) if `id` is not "{scenario}#{row_index}".
std::pair<std::string, std::size_t> decode_entry_id(std::string_view id);

// One store entry per row, id "{scenario}#{row}", meta {scenario, family}.
// Duplicate scenario names raise Error(kDuplicateId) naming both source files.
VectorStore index_knowledge(const std::vector<KnowledgeBase>& kbs, const Embedder& embedder);

}  // namespace proactiva

#endif  // PROACTIVA_KNOWLEDGE_BASE_H_

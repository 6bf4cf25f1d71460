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

#include "proactiva/knowledge_base.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

namespace {

constexpr std::string_view kPairSep = "; ";
constexpr std::string_view kKeySep = ": ";

std::size_t line_of(std::string_view doc, std::size_t byte) {
  byte = std::min(byte, doc.size());
  return 1 + static_cast<std::size_t>(std::count(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string value_to_string(const json& v, const std::string& column) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  if (v.is_null()) return "";
  throw Error(ErrorCode::kSchemaViolation, "column '" + column + "' holds a non-scalar value");
}

}  // namespace

std::string_view family_name(ScenarioFamily family) {
  switch (family) {
    case ScenarioFamily::kInVehicleFunctions: return "InVehicleFunctions";
    case ScenarioFamily::kEnvironmentalInformation: return "EnvironmentalInformation";
    case ScenarioFamily::kUserProfile: return "UserProfile";
  }
  return "InVehicleFunctions";
}

ScenarioFamily family_from_name(std::string_view name) {
  if (name == "InVehicleFunctions") return ScenarioFamily::kInVehicleFunctions;
  if (name == "EnvironmentalInformation") return ScenarioFamily::kEnvironmentalInformation;
  if (name == "UserProfile") return ScenarioFamily::kUserProfile;
  throw Error(ErrorCode::kSchemaViolation, "unknown scenario family '" + std::string(name) + "'");
}

KnowledgeBase parse_knowledge_base(std::string_view document, std::string source_path) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(source_path + ": " + e.what(), line_of(document, e.byte));
  }

  KnowledgeBase kb;
  kb.source_path = std::move(source_path);
  try {
    kb.scenario = j.at("scenario").get<std::string>();
    kb.family = family_from_name(j.at("family").get<std::string>());
    kb.fields = j.at("fields").get<std::vector<std::string>>();
    if (text::trim(kb.scenario).empty()) {
      throw Error(ErrorCode::kSchemaViolation, "scenario name is blank");
    }
    if (kb.fields.empty()) throw Error(ErrorCode::kSchemaViolation, "no fields declared");
    std::set<std::string> declared(kb.fields.begin(), kb.fields.end());
    if (declared.size() != kb.fields.size()) {
      throw Error(ErrorCode::kSchemaViolation, "duplicate field names in " + kb.scenario);
    }
    const auto& rows = j.at("rows");
    if (!rows.is_array()) throw Error(ErrorCode::kSchemaViolation, "rows must be a list");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_object()) {
        throw Error(ErrorCode::kSchemaViolation, "row " + std::to_string(i) + " is not an object");
      }
      KnowledgeRow row;
      for (const auto& [column, value] : rows[i].items()) {
        if (!declared.contains(column)) {
          throw Error(ErrorCode::kSchemaViolation, "row " + std::to_string(i) +
                                                       " has undeclared column '" + column + "'");
        }
        row.emplace(column, value_to_string(value, column));
      }
      if (std::all_of(row.begin(), row.end(),
                      [](const auto& kv) { return text::trim(kv.second).empty(); })) {
        throw Error(ErrorCode::kSchemaViolation, "row " + std::to_string(i) + " has no values");
      }
      kb.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, kb.source_path + ": " + e.what());
  }
  if (kb.rows.empty()) {
    throw Error(ErrorCode::kEmptyKnowledgeBase, "knowledge base '" + kb.scenario + "' has no rows");
  }
  return kb;
}

KnowledgeBase load_knowledge_base(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_knowledge_base(buf.str(), path);
}

std::vector<KnowledgeBase> load_knowledge_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeBase> kbs;
  for (const auto& f : files) kbs.push_back(load_knowledge_base(f.string()));
  return kbs;
}

KnowledgeEntry flatten_row(const KnowledgeBase& kb, std::size_t row_index) {
  if (row_index >= kb.rows.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "row " + std::to_string(row_index) + " of " +
                                                 std::to_string(kb.rows.size()) + " in " +
                                                 kb.scenario);
  }
  const auto& row = kb.rows[row_index];
  std::vector<std::string> parts;
  for (const auto& field : kb.fields) {
    auto it = row.find(field);
    if (it == row.end() || text::trim(it->second).empty()) continue;
    parts.push_back(field + std::string(kKeySep) + std::string(text::trim(it->second)));
  }
  return KnowledgeEntry{kb.scenario, row_index, text::join(parts, kPairSep)};
}

std::vector<std::pair<std::string, std::string>> parse_flattened(std::string_view flattened) {
  std::vector<std::pair<std::string, std::string>> out;
  while (!flattened.empty()) {
    auto end = flattened.find(kPairSep);
    auto pair = flattened.substr(0, end);
    auto colon = pair.find(kKeySep);
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "flattened pair without ': ' separator");
    }
    out.emplace_back(std::string(pair.substr(0, colon)),
                     std::string(pair.substr(colon + kKeySep.size())));
    if (end == std::string_view::npos) break;
    flattened.remove_prefix(end + kPairSep.size());
  }
  return out;
}

std::string entry_id(std::string_view scenario, std::size_t row_index) {
  return std::string(scenario) + "#" + std::to_string(row_index);
}

std::pair<std::string, std::size_t> decode_entry_id(std::string_view id) {
  auto hash = id.rfind('#');
  if (hash == std::string_view::npos || hash == 0 || hash + 1 == id.size()) {
    throw Error(ErrorCode::kParseError, "bad entry id '" + std::string(id) + "'");
  }
  std::size_t row = 0;
  for (char c : id.substr(hash + 1)) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kParseError, "bad entry id '" + std::string(id) + "'");
    row = row * 10 + static_cast<std::size_t>(c - '0');
  }
  return {std::string(id.substr(0, hash)), row};
}

VectorStore index_knowledge(const std::vector<KnowledgeBase>& kbs, const Embedder& embedder) {
  std::map<std::string, const KnowledgeBase*> seen;
  std::size_t total_rows = 0;
  for (const auto& kb : kbs) {
    auto [it, inserted] = seen.emplace(kb.scenario, &kb);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateId, "scenario '" + kb.scenario + "' defined in both " +
                                               it->second->source_path + " and " + kb.source_path);
    }
    total_rows += kb.rows.size();
  }
  if (total_rows == 0) throw Error(ErrorCode::kEmptyKnowledgeBase, "nothing to index");

  VectorStore store(embedder.dim());
  for (const auto& kb : kbs) {
    for (std::size_t r = 0; r < kb.rows.size(); ++r) {
      auto entry = flatten_row(kb, r);
      add_entry(store, entry_id(kb.scenario, r), std::move(entry.flattened_text),
                Meta{{"scenario", kb.scenario}, {"family", std::string(family_name(kb.family))}},
                embedder);
    }
  }
  return store;
}

}  // namespace proactiva

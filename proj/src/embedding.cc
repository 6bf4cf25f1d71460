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

#include "proactiva/embedding.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "httplib.h"
#include "proactiva/error.h"
#include "proactiva/text.h"

namespace proactiva {

using nlohmann::json;

Vector::Vector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::kInvalidVector, "vector has no components");
  for (double c : components_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidVector, "non-finite component");
  }
}

double Vector::norm() const {
  double s = 0.0;
  for (double c : components_) s += c * c;
  return std::sqrt(s);
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  auto ac = a.components();
  auto bc = b.components();
  const double dot = std::inner_product(ac.begin(), ac.end(), bc.begin(), 0.0);
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

DeterministicEmbedder::DeterministicEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "embedder dim must be positive");
}

Vector DeterministicEmbedder::embed(std::string_view raw) const {
  auto trimmed = text::trim(raw);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed blank text");

  std::string norm = " ";
  bool in_space = false;
  for (unsigned char c : trimmed) {
    if (std::isspace(c)) {
      if (!in_space) norm += ' ';
      in_space = true;
    } else {
      norm += static_cast<char>(std::tolower(c));
      in_space = false;
    }
  }
  norm += ' ';

  std::vector<double> counts(dim_, 0.0);
  for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t j = i; j < i + 3; ++j) {
      h ^= static_cast<unsigned char>(norm[j]);
      h *= 1099511628211ULL;
    }
    counts[h % dim_] += 1.0;
  }
  double n = 0.0;
  for (double c : counts) n += c * c;
  n = std::sqrt(n);
  for (double& c : counts) c /= n;
  return Vector(std::move(counts));
}

RemoteEmbedder::RemoteEmbedder(HttpBackendOptions options, std::string model, std::size_t dim)
    : options_(std::move(options)), url_(split_url(options_.base_url)), model_(std::move(model)),
      dim_(dim) {}

Vector RemoteEmbedder::embed(std::string_view raw) const {
  auto trimmed = text::trim(raw);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed blank text");
  httplib::Client client(url_.origin);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
  json body{{"model", model_}, {"input", std::string(trimmed)}};
  auto result = client.Post(url_.path_prefix + "/embeddings", headers, body.dump(),
                            "application/json");
  if (!result) {
    throw BackendUnavailable("embedding request failed: " + httplib::to_string(result.error()),
                             true);
  }
  if (result->status != 200) {
    throw BackendUnavailable("embedding server returned HTTP " + std::to_string(result->status),
                             result->status == 429 || result->status >= 500);
  }
  std::vector<double> components;
  try {
    components = json::parse(result->body).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, e.what());
  }
  if (components.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding has " +
                                                   std::to_string(components.size()) +
                                                   " components, expected " + std::to_string(dim_));
  }
  return Vector(std::move(components));
}

VectorStore::VectorStore(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidConfig, "store dim must be positive");
}

void VectorStore::add(std::string id, Vector vector, std::string payload_text, Meta payload_meta) {
  if (vector.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "entry '" + id + "' has dim " +
                                                   std::to_string(vector.dim()) + ", store has " +
                                                   std::to_string(dim_));
  }
  if (by_id_.contains(id)) throw Error(ErrorCode::kDuplicateId, "id '" + id + "' already stored");
  by_id_.emplace(id, entries_.size());
  entries_.push_back(
      StoreEntry{std::move(id), std::move(vector), std::move(payload_text), std::move(payload_meta)});
}

const StoreEntry* VectorStore::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<SearchHit> VectorStore::top_k(const Vector& query, std::size_t k) const {
  if (k < 1) throw Error(ErrorCode::kPreconditionFailed, "k must be >= 1");
  if (entries_.empty()) throw Error(ErrorCode::kEmptyStore, "vector store is empty");
  if (query.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dim " + std::to_string(query.dim()) + ", store dim " + std::to_string(dim_));
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    scored.emplace_back(cosine_similarity(query, entries_[i].vector), i);
  }
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = entries_[scored[i].second];
    hits.push_back(SearchHit{e.id, scored[i].first, e.payload_text, e.payload_meta});
  }
  return hits;
}

json VectorStore::to_json() const {
  json entries = json::array();
  for (const auto& e : entries_) {
    auto comps = e.vector.components();
    entries.push_back({{"id", e.id},
                       {"text", e.payload_text},
                       {"meta", e.payload_meta},
                       {"vector", std::vector<double>(comps.begin(), comps.end())}});
  }
  return json{{"dim", dim_}, {"entries", entries}};
}

VectorStore VectorStore::from_json(const json& j) {
  try {
    VectorStore store(j.at("dim").get<std::size_t>());
    for (const auto& e : j.at("entries")) {
      store.add(e.at("id").get<std::string>(), Vector(e.at("vector").get<std::vector<double>>()),
                e.at("text").get<std::string>(), e.value("meta", Meta{}));
    }
    return store;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad store document: ") + e.what());
  }
}

void VectorStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << to_json().dump(1) << '\n';
}

VectorStore VectorStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

void add_entry(VectorStore& store, std::string id, std::string text, Meta meta,
               const Embedder& embedder) {
  if (store.find(id) != nullptr) throw Error(ErrorCode::kDuplicateId, "id '" + id + "' already stored");
  auto vector = embedder.embed(text);
  store.add(std::move(id), std::move(vector), std::move(text), std::move(meta));
}

}  // namespace proactiva

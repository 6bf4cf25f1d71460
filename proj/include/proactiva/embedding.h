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

#ifndef PROACTIVA_EMBEDDING_H_
#define PROACTIVA_EMBEDDING_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "proactiva/http_backend.h"

namespace proactiva {

// Dense embedding. Components are always finite.
class Vector {
 public:
  // Throws Error(kInvalidVector) for an empty or non-finite input.
  explicit Vector(std::vector<double> components);

  std::size_t dim() const { return components_.size(); }
  std::span<const double> components() const { return components_; }
  double norm() const;

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> components_;
};

// dot(a,b) / (|a||b|), clamped to [-1, 1].
// Throws Error(kDimensionMismatch) or Error(kZeroVector).
double cosine_similarity(const Vector& a, const Vector& b);

enum class EmbedderKind { kDeterministic, kRemote };

class Embedder {
 public:
  virtual ~Embedder() = default;
  // Throws Error(kEmptyText) for blank input.
  virtual Vector embed(std::string_view text) const = 0;
  virtual std::size_t dim() const = 0;
  virtual EmbedderKind kind() const = 0;
};

// Feature-hashed character-trigram counts, L2-normalized.
//
// Text is lower-cased, runs of whitespace collapse to one space, and the
// result is padded with a space on both sides. Each byte trigram is hashed
// with 64-bit FNV-1a into one of `dim` buckets.
class DeterministicEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit DeterministicEmbedder(std::size_t dim = kDefaultDim);

  Vector embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_; }
  EmbedderKind kind() const override { return EmbedderKind::kDeterministic; }

 private:
  std::size_t dim_;
};

// OpenAI-compatible embeddings endpoint: POST {base}/embeddings {model, input}.
class RemoteEmbedder : public Embedder {
 public:
  RemoteEmbedder(HttpBackendOptions options, std::string model, std::size_t dim);

  Vector embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_; }
  EmbedderKind kind() const override { return EmbedderKind::kRemote; }

 private:
  HttpBackendOptions options_;
  SplitUrl url_;
  std::string model_;
  std::size_t dim_;
};

using Meta = std::map<std::string, std::string>;

struct StoreEntry {
  std::string id;
  Vector vector;
  std::string payload_text;
  Meta payload_meta;
};

struct SearchHit {
  std::string id;
  double score = 0.0;
  std::string payload_text;
  Meta payload_meta;
};

// Exact in-memory store. Build single-threaded, then query from any number
// of threads; mutation concurrent with queries is not supported.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<StoreEntry>& entries() const { return entries_; }

  // Throws Error(kDuplicateId) or Error(kDimensionMismatch).
  void add(std::string id, Vector vector, std::string payload_text, Meta payload_meta = {});

  const StoreEntry* find(std::string_view id) const;

  // min(k, size) hits by descending score; equal scores keep insertion order.
  // Throws Error(kEmptyStore), Error(kDimensionMismatch), Error(kPreconditionFailed) for k < 1.
  std::vector<SearchHit> top_k(const Vector& query, std::size_t k) const;

  // {dim, entries:[{id, text, meta, vector}]}
  nlohmann::json to_json() const;
  static VectorStore from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static VectorStore load(const std::string& path);

 private:
  std::size_t dim_;
  std::vector<StoreEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Embeds `text` and stores it under `id`.
void add_entry(VectorStore& store, std::string id, std::string text, Meta meta,
               const Embedder& embedder);

}  // namespace proactiva

#endif  // PROACTIVA_EMBEDDING_H_

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Cross-flow pattern recommendations: every annotation's definition is
// embedded once, and a query ranks the other flows' annotations for the same
// product feature by cosine similarity.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/util.hpp"
#include "kb/embedder.hpp"

namespace flowy::related {

inline constexpr const char* kRelatedFormat = "flowy-related/1";
inline constexpr std::size_t kDefaultK = 4;

struct RelatedEntry {
  std::string annotation_id;
  std::string flow_id;
  std::string product_feature;
  EmbeddingVector embedding;
  bool operator==(const RelatedEntry&) const = default;
};

struct RelatedHit {
  std::string annotation_id;
  std::string flow_id;
  double score = 0.0;
};

// Immutable once built; safe to share between threads.
class RelatedIndex {
 public:
  RelatedIndex() = default;

  // `features` maps flow id to product feature. Throws Error{validation} for
  // an annotation whose flow is unknown or whose definition cannot be
  // embedded, and Error{client} when the embedder fails.
  static RelatedIndex build(std::span<const PatternAnnotation> annotations,
                            const std::map<std::string, std::string>& features, kb::Embedder& embedder);

  // Same-feature annotations from other flows, by descending score, ties by
  // annotation id. Throws Error{not_found} for an unknown id and
  // Error{invalid_argument} for k == 0.
  std::vector<RelatedHit> rank_related(const std::string& annotation_id, std::size_t k = kDefaultK) const;

  const std::string& embedder_name() const { return embedder_name_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<RelatedEntry>& entries() const { return entries_; }
  bool contains(const std::string& annotation_id) const { return by_id_.count(annotation_id) != 0; }

  std::string to_json_text() const;
  static RelatedIndex from_json_text(const std::string& text, const std::string& what);

 private:
  void add(RelatedEntry entry);

  std::string embedder_name_;
  std::size_t dimension_ = 0;
  std::vector<RelatedEntry> entries_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> by_feature_;
};

RelatedIndex load_index(const std::filesystem::path& path);
WriteStatus save_index(const RelatedIndex& index, const std::filesystem::path& path);

// Readers take a snapshot and keep using it while a rebuild swaps in a new one.
class IndexHolder {
 public:
  std::shared_ptr<const RelatedIndex> get() const {
    std::lock_guard lock(mutex_);
    return index_;
  }
  void set(std::shared_ptr<const RelatedIndex> index) {
    std::lock_guard lock(mutex_);
    index_ = std::move(index);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const RelatedIndex> index_ = std::make_shared<const RelatedIndex>();
};

}  // namespace flowy::related

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "related/related.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "kb/knowledge_base.hpp"

namespace flowy::related {

void RelatedIndex::add(RelatedEntry entry) {
  if (by_id_.count(entry.annotation_id))
    throw Error(ErrorCode::validation, "duplicate annotation id '" + entry.annotation_id + "' in related index");
  if (dimension_ == 0) dimension_ = entry.embedding.dimension();
  if (entry.embedding.dimension() != dimension_ || !entry.embedding.all_finite() || entry.embedding.norm() == 0.0)
    throw Error(ErrorCode::validation, "bad embedding for annotation '" + entry.annotation_id + "'");
  const std::size_t idx = entries_.size();
  by_id_[entry.annotation_id] = idx;
  by_feature_[entry.product_feature].push_back(idx);
  entries_.push_back(std::move(entry));
}

RelatedIndex RelatedIndex::build(std::span<const PatternAnnotation> annotations,
                                 const std::map<std::string, std::string>& features, kb::Embedder& embedder) {
  RelatedIndex index;
  index.embedder_name_ = embedder.name();
  index.dimension_ = embedder.dimension();
  std::vector<std::string> texts;
  texts.reserve(annotations.size());
  for (const auto& a : annotations) {
    if (!features.count(a.flow_id))
      throw Error(ErrorCode::validation, "annotation '" + a.id + "' belongs to unknown flow '" + a.flow_id + "'");
    texts.push_back(a.definition);
  }
  std::vector<EmbeddingVector> vectors;
  if (!texts.empty()) {
    try {
      vectors = embedder.embed(texts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::client) throw;
      throw Error(ErrorCode::validation, std::string("cannot embed annotation definitions: ") + e.what());
    }
  }
  if (vectors.size() != annotations.size())
    throw Error(ErrorCode::client, "embedder returned " + std::to_string(vectors.size()) + " vectors for " +
                                      std::to_string(annotations.size()) + " definitions");
  for (std::size_t i = 0; i < annotations.size(); ++i)
    index.add(RelatedEntry{annotations[i].id, annotations[i].flow_id, features.at(annotations[i].flow_id),
                           std::move(vectors[i])});
  return index;
}

std::vector<RelatedHit> RelatedIndex::rank_related(const std::string& annotation_id, std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
  const auto it = by_id_.find(annotation_id);
  if (it == by_id_.end()) throw Error(ErrorCode::not_found, "annotation '" + annotation_id + "' is not indexed");
  const RelatedEntry& self = entries_[it->second];
  std::vector<RelatedHit> hits;
  for (std::size_t idx : by_feature_.at(self.product_feature)) {
    const RelatedEntry& other = entries_[idx];
    if (other.flow_id == self.flow_id) continue;
    hits.push_back(RelatedHit{other.annotation_id, other.flow_id, kb::cosine_similarity(self.embedding, other.embedding)});
  }
  auto better = [](const RelatedHit& a, const RelatedHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.annotation_id < b.annotation_id;
  };
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), better);
  hits.resize(n);
  return hits;
}

std::string RelatedIndex::to_json_text() const {
  json entries = json::array();
  for (const auto& e : entries_)
    entries.push_back({{"annotation_id", e.annotation_id},
                       {"flow_id", e.flow_id},
                       {"product_feature", e.product_feature},
                       {"embedding", e.embedding}});
  return dump_canonical(
      {{"format", kRelatedFormat}, {"embedder", embedder_name_}, {"dimension", dimension_}, {"entries", entries}});
}

RelatedIndex RelatedIndex::from_json_text(const std::string& text, const std::string& what) {
  const json j = parse_json(text, what);
  if (j.value("format", std::string{}) != kRelatedFormat)
    throw Error(ErrorCode::parse, what + ": not a " + std::string(kRelatedFormat) + " document");
  RelatedIndex index;
  try {
    index.embedder_name_ = j.at("embedder").get<std::string>();
    index.dimension_ = j.at("dimension").get<std::size_t>();
    for (const auto& e : j.at("entries"))
      index.add(RelatedEntry{e.at("annotation_id").get<std::string>(), e.at("flow_id").get<std::string>(),
                             e.at("product_feature").get<std::string>(), e.at("embedding").get<EmbeddingVector>()});
  } catch (const json::exception& e) {
    throw_decode_error(what, e.what());
  }
  return index;
}

RelatedIndex load_index(const std::filesystem::path& path) {
  return RelatedIndex::from_json_text(read_file(path), path.string());
}

WriteStatus save_index(const RelatedIndex& index, const std::filesystem::path& path) {
  return write_file_atomic(path, index.to_json_text());
}

}  // namespace flowy::related

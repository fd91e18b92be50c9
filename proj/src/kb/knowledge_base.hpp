// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Design-pattern knowledge base: articles are chunked, embedded and searched
// by exhaustive cosine scan. Corpus sizes are tens of articles, so there is
// no approximate index.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/util.hpp"
#include "kb/embedder.hpp"

namespace flowy::kb {

inline constexpr const char* kCorpusManifest = "corpus.json";
inline constexpr const char* kCorpusFormat = "flowy-corpus/1";
inline constexpr const char* kSnapshotFormat = "flowy-kb/1";

struct Article {
  std::string id;
  std::string title;
  std::vector<std::string> feature_tags;
  std::string body;  // canonical: UTF-8, "\n" line endings, trimmed
  bool operator==(const Article&) const = default;
};

// Parses an article file: a header block delimited by "---" lines with
// `id:`, `title:` and comma-separated `features:`, followed by the body.
Article parse_article(const std::string& text, const std::string& what);

struct ArticleChunk {
  std::string article_id;
  std::size_t chunk_index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string text;
  EmbeddingVector embedding;  // empty until embedded
  bool operator==(const ArticleChunk&) const = default;
};

struct ChunkConfig {
  std::size_t max_chars = 1500;
  std::size_t overlap = 200;
};

// Greedy splitter. Each chunk ends at the last paragraph boundary ("\n\n",
// cut either before or after the separator) that keeps it within max_chars
// and still advances past the overlap, or at max_chars when there is none.
// The next chunk starts `overlap` bytes before the previous end. Throws
// Error{invalid_argument} for an empty body or overlap >= max_chars.
std::vector<ArticleChunk> chunk_article(const std::string& article_id, const std::string& body,
                                        const ChunkConfig& config = {});

// dot(a, b) / (|a| |b|). Throws Error{invalid_argument} on a dimension
// mismatch or a zero vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct ScoredChunk {
  const ArticleChunk* chunk = nullptr;
  double score = 0.0;
};

// Fixed-dimension set of embedded chunks. Read-only use is thread-safe.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dimension = 256) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  const std::vector<ArticleChunk>& chunks() const { return chunks_; }

  // Throws Error{validation} on a wrong dimension, zero norm, non-finite
  // entry or duplicate (article_id, chunk_index).
  void add(ArticleChunk chunk);

  // Top-k by descending cosine, ties by (article_id, chunk_index).
  std::vector<ScoredChunk> search(const EmbeddingVector& query, std::size_t k) const;

 private:
  std::size_t dimension_;
  std::vector<ArticleChunk> chunks_;
  std::set<std::pair<std::string, std::size_t>> keys_;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(std::size_t dimension, std::string embedder_name, ChunkConfig chunking);

  std::size_t dimension() const { return store_.dimension(); }
  const std::string& embedder_name() const { return embedder_name_; }
  const ChunkConfig& chunking() const { return chunking_; }
  const std::map<std::string, Article>& articles() const { return articles_; }
  const Article* find_article(const std::string& id) const;
  const VectorStore& store() const { return store_; }

  void add_article(Article article, std::vector<ArticleChunk> embedded_chunks);

  // Embeds `query_text` and returns the top-k chunks. Embedder failures
  // surface as Error{client, retriable=true} carrying the cause.
  std::vector<ScoredChunk> retrieve(const std::string& query_text, std::size_t k, Embedder& embedder) const;

  std::string to_snapshot() const;
  static KnowledgeBase from_snapshot(const std::string& text, const std::string& what);

 private:
  std::string embedder_name_;
  ChunkConfig chunking_;
  std::map<std::string, Article> articles_;
  VectorStore store_;
};

struct CorpusManifest {
  std::size_t dimension = 256;
  ChunkConfig chunking;
};

CorpusManifest read_corpus_manifest(const std::filesystem::path& corpus_dir);

// Reads `corpus.json` and every `articles/*.md` (sorted by file name),
// chunks and embeds them. Throws Error{validation} when the embedder's
// dimension differs from the manifest's or article ids collide.
KnowledgeBase ingest_corpus(const std::filesystem::path& corpus_dir, Embedder& embedder);

KnowledgeBase load_snapshot(const std::filesystem::path& path);
// Atomic write; identical content is left untouched.
WriteStatus save_snapshot(const KnowledgeBase& kb, const std::filesystem::path& path);

}  // namespace flowy::kb

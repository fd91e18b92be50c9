// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "kb/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "core/util.hpp"

namespace flowy::kb {

Article parse_article(const std::string& raw, const std::string& what) {
  const std::string text = normalize_newlines(raw);
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    const auto nl = text.find('\n', pos);
    const auto stop = nl == std::string::npos ? text.size() : nl;
    line = text.substr(pos, stop - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    return true;
  };

  std::string line;
  if (!next_line(line) || trim(line) != "---") throw Error(ErrorCode::parse, what + ": missing '---' header block");
  Article a;
  bool closed = false;
  while (next_line(line)) {
    if (trim(line) == "---") {
      closed = true;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::parse, what + ": malformed header line '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (key == "id") {
      a.id = value;
    } else if (key == "title") {
      a.title = value;
    } else if (key == "features") {
      std::istringstream tags(value);
      std::string tag;
      while (std::getline(tags, tag, ','))
        if (auto t = trim(tag); !t.empty()) a.feature_tags.push_back(std::move(t));
    }
  }
  if (!closed) throw Error(ErrorCode::parse, what + ": header block is not closed");
  if (!is_valid_id(a.id)) throw Error(ErrorCode::parse, what + ": article id '" + a.id + "' must match [A-Za-z0-9._-]+");
  a.body = trim(std::string_view(text).substr(pos));
  if (a.body.empty()) throw Error(ErrorCode::parse, what + ": article body is empty");
  return a;
}

std::vector<ArticleChunk> chunk_article(const std::string& article_id, const std::string& body,
                                        const ChunkConfig& config) {
  if (body.empty()) throw Error(ErrorCode::invalid_argument, "cannot chunk an empty body");
  if (config.overlap >= config.max_chars)
    throw Error(ErrorCode::invalid_argument, "chunk overlap must be smaller than max_chars");

  const std::size_t n = body.size();
  auto is_boundary = [&](std::size_t p) {
    const bool after = p >= 2 && body[p - 2] == '\n' && body[p - 1] == '\n';
    const bool before = p + 1 < n && body[p] == '\n' && body[p + 1] == '\n';
    return after || before;
  };

  std::vector<ArticleChunk> chunks;
  std::size_t start = 0;
  while (true) {
    ArticleChunk c;
    c.article_id = article_id;
    c.chunk_index = chunks.size();
    c.char_start = start;
    if (n - start <= config.max_chars) {
      c.char_end = n;
      c.text = body.substr(start);
      chunks.push_back(std::move(c));
      break;
    }
    const std::size_t limit = start + config.max_chars;
    const std::size_t floor = start + config.overlap;  // cut must exceed this to make progress
    std::size_t end = 0;
    for (std::size_t p = limit; p > floor; --p) {
      if (is_boundary(p)) {
        end = p;
        break;
      }
    }
    if (end == 0) {
      end = utf8_floor(body, limit);
      if (end <= floor) end = limit;
    }
    c.char_end = end;
    c.text = body.substr(start, end - start);
    chunks.push_back(std::move(c));

    std::size_t next = utf8_floor(body, end - config.overlap);
    if (next <= start) next = end - config.overlap;
    start = next;
  }
  return chunks;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw Error(ErrorCode::invalid_argument, "dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                                                 std::to_string(b.dimension()));
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::invalid_argument, "cosine similarity of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void VectorStore::add(ArticleChunk chunk) {
  const std::string key = chunk.article_id + "#" + std::to_string(chunk.chunk_index);
  if (chunk.embedding.dimension() != dimension_)
    throw Error(ErrorCode::validation, "chunk " + key + " has dimension " + std::to_string(chunk.embedding.dimension()) +
                                           ", store expects " + std::to_string(dimension_));
  if (!chunk.embedding.all_finite()) throw Error(ErrorCode::validation, "chunk " + key + " has non-finite embedding");
  if (chunk.embedding.norm() == 0.0) throw Error(ErrorCode::validation, "chunk " + key + " has a zero embedding");
  if (!keys_.emplace(chunk.article_id, chunk.chunk_index).second)
    throw Error(ErrorCode::validation, "duplicate chunk " + key);
  chunks_.push_back(std::move(chunk));
}

std::vector<ScoredChunk> VectorStore::search(const EmbeddingVector& query, std::size_t k) const {
  std::vector<ScoredChunk> scored;
  scored.reserve(chunks_.size());
  for (const auto& c : chunks_) scored.push_back({&c, cosine_similarity(query, c.embedding)});
  const auto better = [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.chunk->article_id, a.chunk->chunk_index) < std::tie(b.chunk->article_id, b.chunk->chunk_index);
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  scored.resize(take);
  return scored;
}

KnowledgeBase::KnowledgeBase(std::size_t dimension, std::string embedder_name, ChunkConfig chunking)
    : embedder_name_(std::move(embedder_name)), chunking_(chunking), store_(dimension) {}

const Article* KnowledgeBase::find_article(const std::string& id) const {
  const auto it = articles_.find(id);
  return it == articles_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_article(Article article, std::vector<ArticleChunk> embedded_chunks) {
  if (articles_.count(article.id)) throw Error(ErrorCode::validation, "duplicate article id '" + article.id + "'");
  for (auto& c : embedded_chunks) {
    if (c.article_id != article.id || c.char_end > article.body.size() || c.char_start >= c.char_end ||
        article.body.compare(c.char_start, c.char_end - c.char_start, c.text) != 0)
      throw Error(ErrorCode::validation, "chunk " + std::to_string(c.chunk_index) + " of '" + article.id +
                                             "' does not match the article body");
    store_.add(std::move(c));
  }
  articles_.emplace(article.id, std::move(article));
}

std::vector<ScoredChunk> KnowledgeBase::retrieve(const std::string& query_text, std::size_t k,
                                                 Embedder& embedder) const {
  if (store_.empty() || k == 0) return {};
  EmbeddingVector q;
  try {
    q = embedder.embed_one(query_text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::client, std::string("query embedding failed: ") + e.what(), true);
  }
  return store_.search(q, k);
}

std::string KnowledgeBase::to_snapshot() const {
  json doc{{"format", kSnapshotFormat},
           {"dimension", dimension()},
           {"embedder", embedder_name_},
           {"chunking", {{"max_chars", chunking_.max_chars}, {"overlap", chunking_.overlap}}},
           {"articles", json::array()},
           {"chunks", json::array()}};
  for (const auto& [id, a] : articles_)
    doc["articles"].push_back({{"id", a.id}, {"title", a.title}, {"feature_tags", a.feature_tags}, {"body", a.body}});
  // Article-id order, so the snapshot does not depend on ingestion order.
  std::vector<const ArticleChunk*> ordered;
  for (const auto& c : store_.chunks()) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(), [](const ArticleChunk* a, const ArticleChunk* b) {
    return std::tie(a->article_id, a->chunk_index) < std::tie(b->article_id, b->chunk_index);
  });
  for (const auto* pc : ordered) {
    const auto& c = *pc;
    doc["chunks"].push_back({{"article_id", c.article_id},
                             {"chunk_index", c.chunk_index},
                             {"char_start", c.char_start},
                             {"char_end", c.char_end},
                             {"embedding", c.embedding}});
  }
  return dump_canonical(doc);
}

KnowledgeBase KnowledgeBase::from_snapshot(const std::string& text, const std::string& what) {
  const json doc = parse_json(text, what);
  try {
    if (doc.value("format", std::string{}) != kSnapshotFormat)
      throw Error(ErrorCode::parse, what + ": format must be \"" + std::string(kSnapshotFormat) + "\"");
    ChunkConfig chunking{doc.at("chunking").at("max_chars").get<std::size_t>(),
                         doc.at("chunking").at("overlap").get<std::size_t>()};
    KnowledgeBase kb(doc.at("dimension").get<std::size_t>(), doc.at("embedder").get<std::string>(), chunking);
    std::map<std::string, std::vector<ArticleChunk>> by_article;
    for (const auto& jc : doc.at("chunks")) {
      ArticleChunk c;
      c.article_id = jc.at("article_id").get<std::string>();
      c.chunk_index = jc.at("chunk_index").get<std::size_t>();
      c.char_start = jc.at("char_start").get<std::size_t>();
      c.char_end = jc.at("char_end").get<std::size_t>();
      c.embedding = jc.at("embedding").get<EmbeddingVector>();
      by_article[c.article_id].push_back(std::move(c));
    }
    for (const auto& ja : doc.at("articles")) {
      Article a{ja.at("id").get<std::string>(), ja.at("title").get<std::string>(),
                ja.at("feature_tags").get<std::vector<std::string>>(), ja.at("body").get<std::string>()};
      auto chunks = std::move(by_article[a.id]);
      by_article.erase(a.id);
      for (auto& c : chunks) {
        if (c.char_end > a.body.size() || c.char_start >= c.char_end)
          throw Error(ErrorCode::validation, what + ": chunk offsets outside article '" + a.id + "'");
        c.text = a.body.substr(c.char_start, c.char_end - c.char_start);
      }
      kb.add_article(std::move(a), std::move(chunks));
    }
    if (!by_article.empty())
      throw Error(ErrorCode::validation, what + ": chunks reference unknown article '" + by_article.begin()->first + "'");
    return kb;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, what + ": " + e.what());
  }
}

CorpusManifest read_corpus_manifest(const std::filesystem::path& corpus_dir) {
  const auto path = corpus_dir / kCorpusManifest;
  const json doc = parse_json(read_file(path), path.string());
  if (doc.value("format", std::string{}) != kCorpusFormat)
    throw Error(ErrorCode::parse, path.string() + ": format must be \"" + std::string(kCorpusFormat) + "\"");
  CorpusManifest m;
  try {
    m.dimension = doc.at("dimension").get<std::size_t>();
    m.chunking.max_chars = doc.value("chunk_max_chars", m.chunking.max_chars);
    m.chunking.overlap = doc.value("chunk_overlap", m.chunking.overlap);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, path.string() + ": " + e.what());
  }
  if (m.dimension == 0) throw Error(ErrorCode::validation, path.string() + ": dimension must be positive");
  return m;
}

KnowledgeBase ingest_corpus(const std::filesystem::path& corpus_dir, Embedder& embedder) {
  std::error_code ec;
  if (!std::filesystem::is_directory(corpus_dir, ec))
    throw Error(ErrorCode::io, "corpus directory not found: " + corpus_dir.string());
  const auto manifest = read_corpus_manifest(corpus_dir);
  if (embedder.dimension() != manifest.dimension)
    throw Error(ErrorCode::validation, "corpus declares dimension " + std::to_string(manifest.dimension) +
                                           " but embedder '" + embedder.name() + "' produces " +
                                           std::to_string(embedder.dimension()));

  std::vector<std::filesystem::path> files;
  const auto articles_dir = corpus_dir / "articles";
  if (std::filesystem::is_directory(articles_dir, ec))
    for (const auto& entry : std::filesystem::directory_iterator(articles_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".md") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  KnowledgeBase kb(manifest.dimension, embedder.name(), manifest.chunking);
  for (const auto& file : files) {
    Article article = parse_article(read_file(file), file.string());
    auto chunks = chunk_article(article.id, article.body, manifest.chunking);
    std::vector<std::string> texts;
    for (const auto& c : chunks) texts.push_back(c.text);
    auto vectors = embedder.embed(texts);
    if (vectors.size() != chunks.size())
      throw Error(ErrorCode::client, "embedder returned " + std::to_string(vectors.size()) + " vectors for " +
                                         std::to_string(chunks.size()) + " chunks");
    for (std::size_t i = 0; i < chunks.size(); ++i) chunks[i].embedding = std::move(vectors[i]);
    kb.add_article(std::move(article), std::move(chunks));
  }
  return kb;
}

KnowledgeBase load_snapshot(const std::filesystem::path& path) {
  return KnowledgeBase::from_snapshot(read_file(path), path.string());
}

WriteStatus save_snapshot(const KnowledgeBase& kb, const std::filesystem::path& path) {
  return write_file_atomic(path, kb.to_snapshot());
}

}  // namespace flowy::kb

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "core/error.hpp"
#include "core/util.hpp"
#include "kb/knowledge_base.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace flowy;
using namespace flowy::kb;
namespace fs = std::filesystem;

namespace {

EmbeddingVector vec(std::initializer_list<double> v) { return EmbeddingVector{std::vector<double>(v)}; }

ArticleChunk chunk(const std::string& article, std::size_t index, EmbeddingVector e) {
  ArticleChunk c;
  c.article_id = article;
  c.chunk_index = index;
  c.text = article;
  c.char_end = article.size();
  c.embedding = std::move(e);
  return c;
}

std::string random_body(std::mt19937& rng, std::size_t approx) {
  static const std::vector<std::string> pieces{"word ", "longer words here ", "\n\n", "\xC3\xA9t\xC3\xA9 ",
                                               "\xE2\x86\x92 ", "x", ".\n"};
  std::string s = "Start";
  while (s.size() < approx) s += pieces[rng() % pieces.size()];
  return s;
}

}  // namespace

TEST_SUITE("kb") {

TEST_CASE("chunking a body without paragraph breaks") {
  const std::string body(3000, 'a');
  const auto chunks = chunk_article("a", body);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].char_start == 0);
  CHECK(chunks[0].char_end == 1500);
  CHECK(chunks[1].char_start == 1300);
  CHECK(chunks[1].char_end == 2800);
  CHECK(chunks[2].char_start == 2600);
  CHECK(chunks[2].char_end == 3000);
  for (std::size_t i = 0; i < chunks.size(); ++i) CHECK(chunks[i].chunk_index == i);
}

TEST_CASE("chunking cuts on either side of a paragraph separator") {
  const auto chunks = chunk_article("a", "A\n\nB", {2, 0});
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].text == "A");
  CHECK(chunks[1].text == "\n\n");
  CHECK(chunks[2].text == "B");
}

TEST_CASE("short bodies are one chunk and bad settings are rejected") {
  const auto chunks = chunk_article("a", "short");
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].text == "short");
  CHECK_THROWS_AS(chunk_article("a", ""), Error);
  CHECK_THROWS_AS(chunk_article("a", "text", {10, 10}), Error);
}

TEST_CASE("chunking matches the reference splitter and covers the body") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t max = 20 + rng() % 200;
    const std::size_t overlap = rng() % (max / 2);
    const std::string body = random_body(rng, 50 + rng() % 1500);
    const auto chunks = chunk_article("a", body, {max, overlap});
    const auto spans = testing::oracle::chunk_spans(body, max, overlap);
    REQUIRE(chunks.size() == spans.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(chunks[i].char_start == spans[i].start);
      CHECK(chunks[i].char_end == spans[i].end);
      CHECK(chunks[i].text == body.substr(spans[i].start, spans[i].end - spans[i].start));
      CHECK(chunks[i].text.size() <= max);
      if (i > 0) {
        CHECK(chunks[i].char_start <= chunks[i - 1].char_end);
        if (overlap > 0) CHECK(chunks[i].char_start < chunks[i - 1].char_end);
        CHECK(chunks[i].char_start > chunks[i - 1].char_start);
      }
    }
    CHECK(chunks.front().char_start == 0);
    CHECK(chunks.back().char_end == body.size());
  }
}

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(vec({1, 0}), vec({1, 0})) == 1.0);
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == 0.0);
  CHECK(cosine_similarity(vec({1, 0}), vec({-2, 0})) == -1.0);
  CHECK(cosine_similarity(vec({3, 4}), vec({6, 8})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), Error);
  CHECK_THROWS_AS(cosine_similarity(vec({0, 0}), vec({1, 0})), Error);
}

TEST_CASE("search returns the top-k by cosine") {
  VectorStore store(2);
  store.add(chunk("c1", 0, vec({1, 0})));
  store.add(chunk("c2", 0, vec({0, 1})));
  store.add(chunk("c3", 0, vec({0.7, 0.7})));
  const auto hits = store.search(vec({1, 0}), 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].chunk->article_id == "c1");
  CHECK(hits[0].score == doctest::Approx(1.0));
  CHECK(hits[1].chunk->article_id == "c3");
  CHECK(hits[1].score == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(store.search(vec({1, 0}), 10).size() == 3);
  CHECK(store.search(vec({1, 0}), 0).empty());
  CHECK(VectorStore(2).search(vec({1, 0}), 3).empty());
}

TEST_CASE("equal scores are ordered by article then chunk") {
  VectorStore store(2);
  store.add(chunk("b", 1, vec({1, 1})));
  store.add(chunk("b", 0, vec({2, 2})));
  store.add(chunk("a", 5, vec({1, 1})));
  const auto hits = store.search(vec({1, 1}), 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk->article_id == "a");
  CHECK(hits[1].chunk->chunk_index == 0);
  CHECK(hits[2].chunk->chunk_index == 1);
}

TEST_CASE("search equals a full scan on random stores") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 8;
    VectorStore store(dim);
    std::vector<testing::oracle::RankedItem> keys;
    std::vector<std::vector<double>> vectors;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = std::round(g(rng) * 2.0) / 2.0;  // coarse values force ties
      v[0] += 0.25;
      const std::string id = "art" + std::to_string(rng() % 7);
      const std::size_t index = i;
      store.add(chunk(id, index, EmbeddingVector{v}));
      keys.push_back({id, index, 0.0});
      vectors.push_back(v);
    }
    std::vector<double> q(dim);
    for (auto& x : q) x = g(rng);
    for (std::size_t k = 0; k <= n + 1; ++k) {
      const auto got = store.search(EmbeddingVector{q}, k);
      const auto want = testing::oracle::full_scan_top_k(keys, vectors, q, k);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].chunk->article_id == want[i].article_id);
        CHECK(got[i].chunk->chunk_index == want[i].chunk_index);
        CHECK(got[i].score == want[i].score);
      }
    }
  }
}

TEST_CASE("vector store rejects bad entries") {
  VectorStore store(2);
  store.add(chunk("a", 0, vec({1, 0})));
  CHECK_THROWS_AS(store.add(chunk("a", 0, vec({0, 1}))), Error);
  CHECK_THROWS_AS(store.add(chunk("b", 0, vec({1, 0, 0}))), Error);
  CHECK_THROWS_AS(store.add(chunk("c", 0, vec({0, 0}))), Error);
  CHECK_THROWS_AS(store.add(chunk("d", 0, vec({std::numeric_limits<double>::quiet_NaN(), 1}))), Error);
  CHECK(store.size() == 1);
}

TEST_CASE("mock embedder is a normalized pure function") {
  MockEmbedder e;
  CHECK(e.dimension() == 256);
  CHECK(e.name() == "mock-trigram-v1");
  const auto a = e.embed_text("Sort menu");
  CHECK(a == e.embed_text("Sort menu"));
  CHECK(a.dimension() == 256);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(a, e.embed_text("sort MENU")) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<std::string> texts{"a b c", "other words"};
  const auto batch = e.embed(texts);
  REQUIRE(batch.size() == 2);
  CHECK(batch[1] == e.embed_text("other words"));
  CHECK(MockEmbedder(32).embed_text("x").dimension() == 32);
}

TEST_CASE("article headers are parsed") {
  const auto a = parse_article("---\r\nid: x1\r\ntitle: T\r\nfeatures: A, B ,\r\n---\r\n\r\nBody text.\r\n", "x");
  CHECK(a.id == "x1");
  CHECK(a.title == "T");
  CHECK(a.feature_tags == std::vector<std::string>{"A", "B"});
  CHECK(a.body == "Body text.");
  CHECK_THROWS_AS(parse_article("no header", "x"), Error);
  CHECK_THROWS_AS(parse_article("---\nid: x\n", "x"), Error);
  CHECK_THROWS_AS(parse_article("---\nid: bad id\n---\nb", "x"), Error);
  CHECK_THROWS_AS(parse_article("---\nid: x\n---\n  ", "x"), Error);
}

TEST_CASE("fixture corpus ingests into the expected chunks") {
  MockEmbedder e;
  const auto kb = ingest_corpus(testing::corpus_dir(), e);
  CHECK(kb.articles().size() == 6);
  std::size_t expected = 0;
  for (const auto& [id, a] : kb.articles()) expected += testing::oracle::chunk_spans(a.body, 1500, 200).size();
  CHECK(kb.store().size() == expected);
  for (const auto& c : kb.store().chunks()) {
    const auto* a = kb.find_article(c.article_id);
    REQUIRE(a);
    CHECK(a->body.substr(c.char_start, c.char_end - c.char_start) == c.text);
  }
  const auto hits = kb.retrieve("Filter & Sort", 4, e);
  REQUIRE(hits.size() == 4);
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].score >= hits[i].score);
}

TEST_CASE("snapshot round-trip and file save") {
  MockEmbedder e;
  const auto kb = ingest_corpus(testing::corpus_dir(), e);
  const auto text = kb.to_snapshot();
  const auto back = KnowledgeBase::from_snapshot(text, "snap");
  CHECK(back.to_snapshot() == text);
  CHECK(back.embedder_name() == "mock-trigram-v1");
  testing::TempDir dir;
  CHECK(save_snapshot(kb, dir / "kb.json") == WriteStatus::written);
  CHECK(save_snapshot(kb, dir / "kb.json") == WriteStatus::unchanged);
  CHECK(load_snapshot(dir / "kb.json").to_snapshot() == text);
  CHECK_THROWS_AS(KnowledgeBase::from_snapshot("{\"format\":\"other\"}", "snap"), Error);
}

TEST_CASE("ingest refuses an embedder of the wrong dimension") {
  MockEmbedder e(64);
  try {
    ingest_corpus(testing::corpus_dir(), e);
    FAIL("expected a validation error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::validation);
  }
}

TEST_CASE("embedder failure during retrieval is a retriable client error") {
  MockEmbedder e;
  const auto kb = ingest_corpus(testing::corpus_dir(), e);
  testing::FailingEmbedder failing;
  try {
    kb.retrieve("Subscribing", 3, failing);
    FAIL("expected a client error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::client);
    CHECK(err.retriable());
  }
}

TEST_CASE("duplicate article ids are rejected") {
  testing::TempDir dir;
  testing::copy_tree(testing::corpus_dir(), dir.path());
  fs::copy_file(dir / "articles/02-sorting.md", dir / "articles/99-copy.md");
  MockEmbedder e;
  CHECK_THROWS_AS(ingest_corpus(dir.path(), e), Error);
}

}  // TEST_SUITE

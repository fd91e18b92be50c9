// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <set>

#include "core/error.hpp"
#include "oracles.hpp"
#include "related/related.hpp"
#include "store/store.hpp"
#include "support.hpp"

using namespace flowy;
using namespace flowy::related;

namespace {

PatternAnnotation ann(const std::string& id, const std::string& flow, const std::string& definition) {
  PatternAnnotation a;
  a.id = id;
  a.flow_id = flow;
  a.pattern_name = id;
  a.definition = definition;
  return a;
}

struct Corpus {
  std::vector<PatternAnnotation> annotations;
  std::map<std::string, std::string> features;
};

Corpus from_store() {
  Corpus c;
  const auto store = store::Store::open(testing::fixture_store());
  for (const auto& doc : store->flows()) {
    c.features[doc.flow.id] = doc.flow.product_feature;
    for (const auto& a : doc.annotations) c.annotations.push_back(a);
  }
  return c;
}

// Ranks by scoring every other annotation directly.
std::vector<std::pair<std::string, double>> full_scan(const Corpus& c, const std::string& id, std::size_t k) {
  kb::MockEmbedder e;
  const auto self = std::find_if(c.annotations.begin(), c.annotations.end(), [&](const auto& a) { return a.id == id; });
  const auto q = e.embed_text(self->definition).values;
  std::vector<std::pair<std::string, double>> all;
  for (const auto& a : c.annotations) {
    if (a.flow_id == self->flow_id || c.features.at(a.flow_id) != c.features.at(self->flow_id)) continue;
    all.emplace_back(a.id, testing::oracle::cosine(q, e.embed_text(a.definition).values));
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_SUITE("related") {

TEST_CASE("ranking equals a full scan for every annotation and k") {
  const auto c = from_store();
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build(c.annotations, c.features, e);
  CHECK(index.size() == c.annotations.size());
  for (const auto& a : c.annotations) {
    for (std::size_t k : {1u, 2u, 4u, 100u}) {
      const auto got = index.rank_related(a.id, k);
      const auto want = full_scan(c, a.id, k);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].annotation_id == want[i].first);
        CHECK(std::abs(got[i].score - want[i].second) <= 1e-12);
        CHECK(got[i].flow_id != a.flow_id);
      }
    }
  }
}

TEST_CASE("results stay within the feature and outside the flow") {
  const auto c = from_store();
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build(c.annotations, c.features, e);
  std::set<std::string> features;
  for (const auto& a : c.annotations) {
    features.insert(c.features.at(a.flow_id));
    for (const auto& hit : index.rank_related(a.id, 100)) {
      CHECK(hit.flow_id != a.flow_id);
      CHECK(c.features.at(hit.flow_id) == c.features.at(a.flow_id));
    }
  }
  CHECK(features.size() == 3);
}

TEST_CASE("a planted duplicate ranks first with score one") {
  Corpus c;
  c.features = {{"f1", "X"}, {"f2", "X"}, {"f3", "X"}, {"f4", "Y"}};
  const std::string def = "Tabs across the top switch between saved searches.";
  c.annotations = {ann("f1.p1", "f1", def), ann("f1.p2", "f1", def), ann("f2.p1", "f2", "Something unrelated here."),
                   ann("f3.p1", "f3", def), ann("f4.p1", "f4", def)};
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build(c.annotations, c.features, e);
  const auto hits = index.rank_related("f1.p1", 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].annotation_id == "f3.p1");
  CHECK(std::abs(hits[0].score - 1.0) <= 1e-9);
  CHECK(hits[1].annotation_id == "f2.p1");
}

TEST_CASE("bad queries") {
  Corpus c;
  c.features = {{"f1", "X"}};
  c.annotations = {ann("f1.p1", "f1", "A definition.")};
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build(c.annotations, c.features, e);
  CHECK(index.rank_related("f1.p1").empty());
  try {
    index.rank_related("nope");
    FAIL("expected not_found");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::not_found);
  }
  try {
    index.rank_related("f1.p1", 0);
    FAIL("expected invalid_argument");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::invalid_argument);
  }
}

TEST_CASE("build rejects unknown flows and surfaces embedder failures") {
  const std::vector<PatternAnnotation> one{ann("f9.p1", "f9", "x")};
  kb::MockEmbedder e;
  try {
    RelatedIndex::build(one, {}, e);
    FAIL("expected validation");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::validation);
  }
  testing::FailingEmbedder failing;
  try {
    RelatedIndex::build(one, {{"f9", "X"}}, failing);
    FAIL("expected client");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::client);
  }
}

TEST_CASE("an empty index is valid") {
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build({}, {}, e);
  CHECK(index.size() == 0);
  const auto back = RelatedIndex::from_json_text(index.to_json_text(), "idx");
  CHECK(back.size() == 0);
}

TEST_CASE("json round-trip and idempotent save") {
  const auto c = from_store();
  kb::MockEmbedder e;
  const auto index = RelatedIndex::build(c.annotations, c.features, e);
  const auto text = index.to_json_text();
  const auto back = RelatedIndex::from_json_text(text, "idx");
  CHECK(back.entries() == index.entries());
  CHECK(back.embedder_name() == "mock-trigram-v1");
  testing::TempDir dir;
  CHECK(save_index(index, dir / "related.json") == WriteStatus::written);
  CHECK(save_index(back, dir / "related.json") == WriteStatus::unchanged);
  CHECK(load_index(dir / "related.json").to_json_text() == text);
  CHECK_THROWS_AS(RelatedIndex::from_json_text("{}", "idx"), Error);
}

TEST_CASE("holder hands out snapshots") {
  IndexHolder holder;
  CHECK(holder.get()->size() == 0);
  auto old = holder.get();
  Corpus c;
  c.features = {{"f1", "X"}};
  c.annotations = {ann("f1.p1", "f1", "A definition.")};
  kb::MockEmbedder e;
  holder.set(std::make_shared<const RelatedIndex>(RelatedIndex::build(c.annotations, c.features, e)));
  CHECK(old->size() == 0);
  CHECK(holder.get()->size() == 1);
}

}  // TEST_SUITE

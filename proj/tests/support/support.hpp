// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance tests.

#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "annotator/chain.hpp"
#include "annotator/model_client.hpp"
#include "core/dataset.hpp"
#include "core/model.hpp"
#include "kb/embedder.hpp"
#include "kb/knowledge_base.hpp"
#include "segmark/segmark.hpp"

namespace flowy::testing {

inline std::filesystem::path fixtures_dir() { return FLOWY_FIXTURES_DIR; }
inline std::filesystem::path docs_dir() { return FLOWY_DOCS_DIR; }
inline std::filesystem::path dataset_dir() { return fixtures_dir() / "dataset"; }
inline std::filesystem::path corpus_dir() { return fixtures_dir() / "corpus"; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

// Copies a directory tree (used to mutate fixtures safely).
void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to);

// Every regular file under `root` with its bytes, keyed by relative path.
std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root);

// Model client that replays scripted replies and records every request.
// A reply of std::nullopt throws a non-retriable client error.
class ScriptedClient final : public annotator::ModelClient {
 public:
  using Reply = std::function<std::string(const annotator::ModelRequest&)>;

  void push(annotator::ModelRole role, std::string text);
  void push_error(annotator::ModelRole role, bool retriable = false);
  // Used once the queue for a role is empty; defaults to the mock client.
  void set_fallback(Reply fallback) { fallback_ = std::move(fallback); }

  annotator::ModelResponse send(const annotator::ModelRequest& request) override;
  std::vector<annotator::ModelRequest> requests() const;
  std::size_t count(annotator::ModelRole role) const;

 private:
  struct Item {
    std::optional<std::string> text;
    bool retriable = false;
  };
  mutable std::mutex mutex_;
  std::map<annotator::ModelRole, std::deque<Item>> queue_;
  std::vector<annotator::ModelRequest> requests_;
  Reply fallback_;
  annotator::MockModelClient mock_;
};

// Embedder that always throws a client error.
class FailingEmbedder final : public kb::Embedder {
 public:
  explicit FailingEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}
  std::vector<EmbeddingVector> embed(std::span<const std::string>) override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "failing"; }

 private:
  std::size_t dimension_;
};

// Rectangle mask without a bitmask.
SegmentMask box_mask(const std::string& id, BBox box);
// Mask with a bitmask filled by `inside(x, y)` in bbox-local coordinates.
SegmentMask bit_mask(const std::string& id, BBox box, const std::function<bool(int, int)>& inside);

// The bundled dataset and knowledge base, loaded once per process.
const Dataset& fixture_dataset();
const kb::KnowledgeBase& fixture_kb();

// A store produced once per process from the bundled dataset and corpus by
// the mock pipeline. Treat it as read-only; copy it to mutate.
const std::filesystem::path& fixture_store();

// Chain input for one dataset flow: filtered masks and marks per screen.
// Image refs point into the dataset so HTTP adapters can read them.
annotator::FlowContext flow_context(const Dataset& dataset, const std::string& flow_id,
                                    const segmark::FilterConfig& thresholds = {});

// A reply the chain accepts: one fenced JSON object.
std::string fenced(const json& j);

// A complete draft in the annotation reply format.
json draft_json(const std::string& name, std::vector<MarkAnchor> anchors);

}  // namespace flowy::testing

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Batch operations behind the CLI and the C API: knowledge-base ingestion,
// the annotation batch (segmark, retrieval, chain, store) and the
// related-design rebuild.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "annotator/chain.hpp"
#include "annotator/model_client.hpp"
#include "core/dataset.hpp"
#include "kb/embedder.hpp"
#include "segmark/segmark.hpp"
#include "store/store.hpp"

namespace flowy::pipeline {

enum class ClientMode { mock, http };

struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path corpus_dir;   // empty: use the store's kb.json
  std::filesystem::path store_dir;
  std::filesystem::path canned_dir;   // mock responses keyed by request hash

  segmark::FilterConfig thresholds;
  annotator::ChainConfig chain;
  std::size_t workers = 4;
  ClientMode mode = ClientMode::mock;

  std::string model_endpoint;
  std::string model_key;
  std::map<annotator::ModelRole, std::string> models;
  std::string embed_endpoint;
  std::string embed_key;
  std::string embed_model = "default";
  std::size_t embed_dimension = 256;

  std::vector<std::string> only_flows;  // empty: every flow

  // Throws Error{config} naming the first bad field.
  void validate() const;
};

std::unique_ptr<kb::Embedder> make_embedder(const RunConfig& config);
annotator::ClientSet make_clients(const RunConfig& config);

// Produces masks and text regions for a screenshot when the dataset has
// none for that screen. The default pipeline has no preprocessor.
struct ScreenInputs {
  std::vector<SegmentMask> masks;
  std::vector<TextRegion> texts;
};

class Preprocessor {
 public:
  virtual ~Preprocessor() = default;
  virtual ScreenInputs run(const Screen& screen, const std::filesystem::path& image_path) = 0;
};

struct FlowOutcome {
  std::string flow_id;
  bool ok = false;
  std::string error;
  std::size_t annotations = 0;
  std::size_t marks = 0;
  std::size_t warnings = 0;
  store::WriteTally files;
};

struct RelatedSummary {
  std::size_t annotations = 0;
  std::map<std::string, std::size_t> per_feature;
  WriteStatus status = WriteStatus::unchanged;
  json to_json() const;
};

struct AnnotateSummary {
  std::vector<FlowOutcome> flows;  // dataset order
  store::WriteTally files;
  RelatedSummary related;
  std::vector<Violation> store_problems;

  std::size_t ok_count() const;
  std::size_t failed_count() const { return flows.size() - ok_count(); }
  std::size_t annotation_count() const;
  json to_json() const;
};

struct Environment {
  kb::Embedder* embedder = nullptr;
  annotator::ClientSet clients;
  Preprocessor* preprocessor = nullptr;
  std::function<void(const FlowOutcome&)> on_flow;  // called under a lock
};

// Validates the dataset (Error{validation} listing violations), loads or
// ingests the knowledge base, runs every flow on a bounded worker pool,
// rewrites the manifest and rebuilds the related-design index. Per-flow
// failures are reported in the summary, never thrown.
AnnotateSummary annotate(const RunConfig& config, const Environment& env);

struct IngestSummary {
  std::size_t articles = 0;
  std::size_t chunks = 0;
  std::size_t dimension = 0;
  std::string embedder;
  WriteStatus status = WriteStatus::unchanged;
  json to_json() const;
};

// Ingests `corpus_dir` and writes `<store_dir>/kb.json`.
IngestSummary ingest(const std::filesystem::path& corpus_dir, const std::filesystem::path& store_dir,
                     kb::Embedder& embedder);

// Re-embeds every stored annotation's definition and replaces related.json.
// On failure the previous index file is left as it was.
RelatedSummary rebuild_related(const std::filesystem::path& store_dir, kb::Embedder& embedder);

}  // namespace flowy::pipeline

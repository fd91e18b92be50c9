// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk store of precomputed pipeline output:
//
//   store.json                 catalog, feature list, failed flows
//   flows/<flow_id>.json       flow, screens, annotations (+ hover summaries)
//   assets/screens/<sid>.png   original screenshots
//   assets/marked/<sid>.png    Set-of-Mark overlays
//   assets/marked/<sid>.json   MarkedScreen sidecars
//   traces/<flow_id>.ndjson    chain traces
//   kb.json, related.json      knowledge-base snapshot, related-design index
//
// Every file is written atomically and left untouched when its content is
// unchanged, so re-running a deterministic batch changes nothing.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "annotator/trace.hpp"
#include "core/model.hpp"
#include "core/util.hpp"
#include "kb/knowledge_base.hpp"
#include "related/related.hpp"

namespace flowy::store {

inline constexpr const char* kStoreManifest = "store.json";
inline constexpr const char* kStoreFormat = "flowy-store/1";
inline constexpr const char* kFlowFormat = "flowy-flow/1";
inline constexpr const char* kKbFile = "kb.json";
inline constexpr const char* kRelatedFile = "related.json";

std::string flow_doc_ref(const std::string& flow_id);
std::string trace_ref(const std::string& flow_id);
std::string screen_image_ref(const std::string& screen_id);
std::string marked_image_ref(const std::string& screen_id);
std::string marked_sidecar_ref(const std::string& screen_id);

// First sentence of each facet; list facets use their first item.
struct HoverSummary {
  std::string purpose;
  std::string advantages;
  std::string disadvantages;
  std::string considerations;
  bool operator==(const HoverSummary&) const = default;
};

HoverSummary hover_summary(const PatternAnnotation& a);

struct FlowDoc {
  FlowExample flow;
  std::vector<Screen> screens;        // flow order; image_ref is store-relative
  std::vector<MarkedScreen> marked;   // parallel to screens
  std::vector<PatternAnnotation> annotations;
  std::vector<std::string> warnings;
  bool operator==(const FlowDoc&) const = default;
};

struct FailedFlow {
  std::string flow_id;
  std::string error;
  bool operator==(const FailedFlow&) const = default;
};

struct WriteTally {
  std::size_t written = 0;
  std::size_t unchanged = 0;
  void add(WriteStatus s) { (s == WriteStatus::written ? written : unchanged) += 1; }
  void add(const WriteTally& o) {
    written += o.written;
    unchanged += o.unchanged;
  }
};

// Safe to use from several threads as long as each flow is written by one.
class StoreWriter {
 public:
  explicit StoreWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Screenshot copy, overlay and sidecar for one screen. Model requests refer
  // to these files, so they are written before the chain runs.
  WriteTally write_screen(const MarkedScreen& marked, std::string_view screen_png, std::string_view overlay_png);

  // Writes the trace, then the flow document last.
  WriteTally write_flow(const FlowDoc& doc, const annotator::ChainTrace& trace);

  // Records the trace and removes any previous document for the flow.
  WriteTally write_failure(const std::string& flow_id, const annotator::ChainTrace& trace);

  // Rebuilds store.json from the flow documents on disk. `failures` replace
  // earlier entries for the same flow; a flow with a document is never
  // listed as failed.
  WriteStatus write_manifest(const std::vector<FailedFlow>& failures);

 private:
  std::filesystem::path root_;
};

std::string flow_doc_to_json(const FlowDoc& doc);

// Loaded, validated store. Immutable after open(); safe for concurrent reads.
class Store {
 public:
  // Throws Error{io} when `root` is not a directory. Flow documents that fail
  // validation are left out and reported by problems().
  static std::shared_ptr<const Store> open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<FlowDoc>& flows() const { return flows_; }
  const FlowDoc* find_flow(const std::string& id) const;
  // Returns the owning flow and annotation, or {nullptr, nullptr}.
  std::pair<const FlowDoc*, const PatternAnnotation*> find_annotation(const std::string& id) const;
  std::vector<const PatternAnnotation*> annotations() const;
  std::vector<std::string> features() const;

  const std::vector<FailedFlow>& failed() const { return failed_; }
  const std::vector<Violation>& problems() const { return problems_; }
  const kb::KnowledgeBase* knowledge_base() const { return kb_ ? &*kb_ : nullptr; }
  // Empty index when related.json is absent.
  std::shared_ptr<const related::RelatedIndex> related() const { return related_.get(); }

 private:
  std::filesystem::path root_;
  std::vector<FlowDoc> flows_;
  std::map<std::string, std::size_t> flow_index_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> annotation_index_;
  std::vector<FailedFlow> failed_;
  std::vector<Violation> problems_;
  std::optional<kb::KnowledgeBase> kb_;
  related::IndexHolder related_;
};

// Every problem a loaded store would hide, plus cross-file consistency:
// manifest vs documents, related index vs annotations, source-ref offsets.
std::vector<Violation> verify_store(const std::filesystem::path& root);

// Problems with one annotation's source refs against `kb`: unknown article,
// offsets out of range, or an excerpt that differs from the article slice.
std::vector<std::string> source_ref_problems(const PatternAnnotation& a, const kb::KnowledgeBase& kb);

}  // namespace flowy::store

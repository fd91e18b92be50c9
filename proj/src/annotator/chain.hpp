// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// The annotation chain for one user flow:
//
//   retrieve  feature-name query against the knowledge base
//   ground    per screen: original + marked image -> what each mark is
//   annotate  per flow: explanations + retrieved excerpts -> pattern drafts
//   cite      per draft: ask for supporting quotations, keep verbatim ones
//
// Every model exchange asks for one fenced JSON object. An unusable reply
// gets one repair round that shows the model its answer and the problems.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "annotator/model_client.hpp"
#include "annotator/trace.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "kb/knowledge_base.hpp"

namespace flowy::annotator {

struct ElementExplanation {
  std::string screen_id;
  int mark = 0;
  std::string role_text;  // empty when the model skipped the mark
  bool operator==(const ElementExplanation&) const = default;
};

struct ScreenContext {
  Screen screen;
  MarkedScreen marked;
  std::map<std::string, SegmentMask> masks;  // kept masks by id
  std::vector<TextRegion> texts;
  std::string image_ref;  // store-relative original screenshot
};

struct FlowContext {
  FlowExample flow;
  std::vector<ScreenContext> screens;  // flow order

  bool has_mark(const std::string& screen_id, int mark) const;
  std::size_t mark_count() const;
};

struct ChainConfig {
  std::size_t retrieval_k = 4;
  // Appends the flow title to the feature-name query.
  bool enrich_query_with_title = false;
  // Attempts per model exchange: the first request plus repair rounds.
  int max_attempts = 2;
};

// A model exchange that never produced a usable reply.
class ChainError : public Error {
 public:
  ChainError(const std::string& message, std::vector<std::string> raw_responses)
      : Error(ErrorCode::client, message), raw_responses_(std::move(raw_responses)) {}
  const std::vector<std::string>& raw_responses() const { return raw_responses_; }

 private:
  std::vector<std::string> raw_responses_;
};

std::string retrieval_query(const FlowExample& flow, const ChainConfig& config);

// One request per screen with marks. Throws ChainError when a screen's reply
// stays unparseable.
std::vector<ElementExplanation> run_grounding(const FlowContext& flow, ModelClient& client, ChainTrace& trace,
                                              const ChainConfig& config = {});

// One request for the whole flow. Returns validated drafts with ids
// "<flow_id>.p<n>" and no source refs. Throws ChainError when no valid
// draft survives the repair round.
std::vector<PatternAnnotation> run_annotation(const FlowContext& flow, std::span<const ElementExplanation> explanations,
                                              std::span<const kb::ScoredChunk> retrieved,
                                              const kb::KnowledgeBase& kb, ModelClient& client, ChainTrace& trace,
                                              const ChainConfig& config = {});

// Resolves a quoted passage against the article's canonical body. Returns
// nullopt when the article is unknown or the passage is not a verbatim
// substring.
std::optional<SourceRef> verify_passage(const kb::KnowledgeBase& kb, const std::string& article_id,
                                        const std::string& passage);

// Never throws for model trouble: a failing client leaves the draft with no
// refs and a trace warning.
PatternAnnotation select_sources(const PatternAnnotation& draft, std::span<const kb::ScoredChunk> retrieved,
                                 const kb::KnowledgeBase& kb, ModelClient& client, ChainTrace& trace,
                                 const ChainConfig& config = {});

struct ChainResult {
  std::string flow_id;
  bool ok = false;
  std::string error;
  std::vector<PatternAnnotation> annotations;
  ChainTrace trace;
};

// Runs all stages in order. Never throws: failures are reported in the result
// and the trace.
ChainResult run_chain(const FlowContext& flow, const kb::KnowledgeBase& kb, kb::Embedder& embedder,
                      const ClientSet& clients, const ChainConfig& config = {});

}  // namespace flowy::annotator

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "pipeline/pipeline.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "kb/knowledge_base.hpp"
#include "related/related.hpp"

namespace flowy::pipeline {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(thresholds.iou_text)) throw Error(ErrorCode::config, "iou_text must be in (0, 1)");
  if (!unit(thresholds.min_area_frac)) throw Error(ErrorCode::config, "min_area_frac must be in (0, 1)");
  if (workers < 1) throw Error(ErrorCode::config, "workers must be at least 1");
  if (chain.retrieval_k < 1) throw Error(ErrorCode::config, "retrieval_k must be at least 1");
  if (chain.max_attempts < 1) throw Error(ErrorCode::config, "max_attempts must be at least 1");
  if (embed_dimension < 1) throw Error(ErrorCode::config, "embed_dimension must be at least 1");
  if (store_dir.empty()) throw Error(ErrorCode::config, "no store directory configured");
  if (mode == ClientMode::http && embed_endpoint.empty())
    throw Error(ErrorCode::config, "http mode needs an embedding endpoint");
}

std::unique_ptr<kb::Embedder> make_embedder(const RunConfig& config) {
  if (config.mode == ClientMode::mock) return std::make_unique<kb::MockEmbedder>(config.embed_dimension);
  return std::make_unique<kb::HttpEmbedder>(
      kb::HttpEmbedderConfig{config.embed_endpoint, config.embed_key, config.embed_model, config.embed_dimension, 64});
}

annotator::ClientSet make_clients(const RunConfig& config) {
  if (config.mode == ClientMode::mock)
    return annotator::ClientSet::uniform(std::make_shared<annotator::MockModelClient>(config.canned_dir));
  annotator::HttpModelConfig http{config.model_endpoint, config.model_key, config.models, "default", config.store_dir};
  return annotator::ClientSet::uniform(std::make_shared<annotator::HttpModelClient>(std::move(http)));
}

json RelatedSummary::to_json() const {
  return {{"annotations", annotations},
          {"features", per_feature},
          {"status", status == WriteStatus::written ? "written" : "unchanged"}};
}

std::size_t AnnotateSummary::ok_count() const {
  std::size_t n = 0;
  for (const auto& f : flows) n += f.ok ? 1 : 0;
  return n;
}

std::size_t AnnotateSummary::annotation_count() const {
  std::size_t n = 0;
  for (const auto& f : flows) n += f.annotations;
  return n;
}

json AnnotateSummary::to_json() const {
  json per_flow = json::array();
  json failures = json::array();
  for (const auto& f : flows) {
    per_flow.push_back({{"flow_id", f.flow_id},
                        {"ok", f.ok},
                        {"annotations", f.annotations},
                        {"marks", f.marks},
                        {"warnings", f.warnings}});
    if (!f.ok) failures.push_back({{"flow_id", f.flow_id}, {"error", f.error}});
  }
  return {{"command", "annotate"},
          {"flows_total", flows.size()},
          {"flows_ok", ok_count()},
          {"flows_failed", failed_count()},
          {"annotations", annotation_count()},
          {"files_written", files.written},
          {"files_unchanged", files.unchanged},
          {"status", files.written == 0 ? "unchanged" : "written"},
          {"failures", std::move(failures)},
          {"flows", std::move(per_flow)},
          {"related", related.to_json()},
          {"store_problems", store_problems}};
}

json IngestSummary::to_json() const {
  return {{"command", "ingest-kb"},
          {"articles", articles},
          {"chunks", chunks},
          {"dimension", dimension},
          {"embedder", embedder},
          {"status", status == WriteStatus::written ? "written" : "unchanged"}};
}

IngestSummary ingest(const fs::path& corpus_dir, const fs::path& store_dir, kb::Embedder& embedder) {
  const auto kb = kb::ingest_corpus(corpus_dir, embedder);
  IngestSummary s;
  s.articles = kb.articles().size();
  s.chunks = kb.store().size();
  s.dimension = kb.dimension();
  s.embedder = kb.embedder_name();
  s.status = kb::save_snapshot(kb, store_dir / store::kKbFile);
  return s;
}

RelatedSummary rebuild_related(const fs::path& store_dir, kb::Embedder& embedder) {
  const auto st = store::Store::open(store_dir);
  std::vector<PatternAnnotation> annotations;
  std::map<std::string, std::string> features;
  RelatedSummary s;
  for (const auto& doc : st->flows()) {
    features[doc.flow.id] = doc.flow.product_feature;
    for (const auto& a : doc.annotations) {
      annotations.push_back(a);
      s.per_feature[doc.flow.product_feature] += 1;
    }
  }
  const auto index = related::RelatedIndex::build(annotations, features, embedder);
  s.annotations = index.size();
  s.status = related::save_index(index, store_dir / store::kRelatedFile);
  return s;
}

namespace {

struct Shared {
  const RunConfig& config;
  const Environment& env;
  const Dataset& dataset;
  const kb::KnowledgeBase& kb;
  store::StoreWriter& writer;
};

FlowOutcome process_flow(const FlowExample& flow, const Shared& sh) {
  FlowOutcome out;
  out.flow_id = flow.id;
  annotator::ChainTrace failure_trace(flow.id);
  try {
    annotator::FlowContext ctx;
    ctx.flow = flow;
    store::FlowDoc doc;
    doc.flow = flow;
    for (const Screen* screen : sh.dataset.screens_of(flow)) {
      const fs::path image_path = sh.dataset.root / screen->image_ref;
      std::vector<SegmentMask> masks = sh.dataset.masks_of(screen->id);
      std::vector<TextRegion> texts = sh.dataset.texts_of(screen->id);
      if (masks.empty() && texts.empty() && sh.env.preprocessor) {
        auto inputs = sh.env.preprocessor->run(*screen, image_path);
        masks = std::move(inputs.masks);
        texts = std::move(inputs.texts);
      }
      const auto filtered = segmark::filter_masks(masks, texts, *screen, sh.config.thresholds);
      const auto marks = segmark::assign_marks(filtered.kept);
      std::map<std::string, SegmentMask> by_id;
      for (const auto& m : filtered.kept) by_id.emplace(m.id, m);
      auto rendered = segmark::render_marked_image(*screen, image_path, marks, by_id,
                                                   store::marked_image_ref(screen->id));
      rendered.marked.removed = filtered.removed;
      out.files.add(sh.writer.write_screen(rendered.marked, read_file(image_path), rendered.png));
      out.marks += marks.size();

      Screen stored = *screen;
      stored.image_ref = store::screen_image_ref(screen->id);
      ctx.screens.push_back(annotator::ScreenContext{stored, rendered.marked, std::move(by_id), texts, stored.image_ref});
      doc.screens.push_back(stored);
      doc.marked.push_back(rendered.marked);
    }

    auto result = annotator::run_chain(ctx, sh.kb, *sh.env.embedder, sh.env.clients, sh.config.chain);
    out.warnings = result.trace.warnings().size();
    if (!result.ok) {
      out.error = result.error;
      out.files.add(sh.writer.write_failure(flow.id, result.trace));
      return out;
    }
    doc.annotations = std::move(result.annotations);
    doc.warnings = result.trace.warnings();
    out.files.add(sh.writer.write_flow(doc, result.trace));
    out.annotations = doc.annotations.size();
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.annotations = 0;
    out.error = e.what();
    failure_trace.append({{"stage", "pipeline"}, {"event", "error"}, {"message", e.what()}});
    try {
      out.files.add(sh.writer.write_failure(flow.id, failure_trace));
    } catch (const std::exception&) {
      // The flow is already reported as failed; a missing trace is secondary.
    }
  }
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::string msg = "dataset has " + std::to_string(violations.size()) + " violation(s)";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + violations[i].subject + ": " + violations[i].message;
  return msg;
}

}  // namespace

AnnotateSummary annotate(const RunConfig& config, const Environment& env) {
  config.validate();
  if (config.mode == ClientMode::http && config.model_endpoint.empty())
    throw Error(ErrorCode::config, "http mode needs a model endpoint");
  if (!env.embedder) throw Error(ErrorCode::config, "no embedder configured");
  for (auto role : {annotator::ModelRole::grounding, annotator::ModelRole::annotation,
                    annotator::ModelRole::source_selection})
    env.clients.for_role(role);

  auto loaded = load_dataset(config.dataset_dir);
  auto violations = std::move(loaded.violations);
  for (auto& v : check_dataset(loaded.dataset)) violations.push_back(std::move(v));
  if (!violations.empty()) throw Error(ErrorCode::validation, describe(violations));
  const Dataset& dataset = loaded.dataset;

  std::error_code ec;
  fs::create_directories(config.store_dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create store " + config.store_dir.string() + ": " + ec.message());

  AnnotateSummary summary;
  kb::KnowledgeBase kb;
  const fs::path kb_path = config.store_dir / store::kKbFile;
  if (!config.corpus_dir.empty()) {
    kb = kb::ingest_corpus(config.corpus_dir, *env.embedder);
    summary.files.add(kb::save_snapshot(kb, kb_path));
  } else if (fs::is_regular_file(kb_path, ec)) {
    kb = kb::load_snapshot(kb_path);
  } else {
    throw Error(ErrorCode::config, "no corpus given and the store has no knowledge base; run ingest-kb first");
  }
  if (kb.embedder_name() != env.embedder->name() || kb.dimension() != env.embedder->dimension())
    throw Error(ErrorCode::config, "knowledge base was embedded with '" + kb.embedder_name() + "' (" +
                                       std::to_string(kb.dimension()) + "), not '" + env.embedder->name() + "' (" +
                                       std::to_string(env.embedder->dimension()) + ")");

  std::vector<const FlowExample*> todo;
  for (const auto& f : dataset.flows) {
    if (!config.only_flows.empty() &&
        std::find(config.only_flows.begin(), config.only_flows.end(), f.id) == config.only_flows.end())
      continue;
    todo.push_back(&f);
  }
  for (const auto& id : config.only_flows)
    if (!dataset.find_flow(id)) throw Error(ErrorCode::not_found, "dataset has no flow '" + id + "'");

  store::StoreWriter writer(config.store_dir);
  const Shared shared{config, env, dataset, kb, writer};
  summary.flows.resize(todo.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      summary.flows[i] = process_flow(*todo[i], shared);
      if (env.on_flow) {
        std::lock_guard lock(report);
        env.on_flow(summary.flows[i]);
      }
    }
  };
  const std::size_t n_threads = std::min(config.workers, std::max<std::size_t>(todo.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  std::vector<store::FailedFlow> failures;
  for (const auto& f : summary.flows) {
    summary.files.add(f.files);
    if (!f.ok) failures.push_back(store::FailedFlow{f.flow_id, f.error});
  }
  summary.files.add(writer.write_manifest(failures));

  summary.related = rebuild_related(config.store_dir, *env.embedder);
  summary.files.add(summary.related.status);
  summary.store_problems = store::verify_store(config.store_dir);
  return summary;
}

}  // namespace flowy::pipeline

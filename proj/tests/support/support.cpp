// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "core/util.hpp"
#include "pipeline/pipeline.hpp"

namespace flowy::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "flowy-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) out[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
  return out;
}

void ScriptedClient::push(annotator::ModelRole role, std::string text) {
  std::lock_guard lock(mutex_);
  queue_[role].push_back(Item{std::move(text), false});
}

void ScriptedClient::push_error(annotator::ModelRole role, bool retriable) {
  std::lock_guard lock(mutex_);
  queue_[role].push_back(Item{std::nullopt, retriable});
}

annotator::ModelResponse ScriptedClient::send(const annotator::ModelRequest& request) {
  std::optional<Item> item;
  Reply fallback;
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    auto& q = queue_[request.role];
    if (!q.empty()) {
      item = std::move(q.front());
      q.pop_front();
    }
    fallback = fallback_;
  }
  if (item) {
    if (!item->text) throw Error(ErrorCode::client, "scripted failure", item->retriable);
    return annotator::ModelResponse{*item->text, 1, 1};
  }
  if (fallback) return annotator::ModelResponse{fallback(request), 1, 1};
  return mock_.send(request);
}

std::vector<annotator::ModelRequest> ScriptedClient::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t ScriptedClient::count(annotator::ModelRole role) const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& r : requests_) n += r.role == role ? 1 : 0;
  return n;
}

std::vector<EmbeddingVector> FailingEmbedder::embed(std::span<const std::string>) {
  throw Error(ErrorCode::client, "embedding service unavailable", true);
}

SegmentMask box_mask(const std::string& id, BBox box) {
  SegmentMask m;
  m.id = id;
  m.bbox = box;
  m.area_px = box.area();
  return m;
}

SegmentMask bit_mask(const std::string& id, BBox box, const std::function<bool(int, int)>& inside) {
  SegmentMask m;
  m.id = id;
  m.bbox = box;
  Bitmask bits(box.w, box.h);
  for (int y = 0; y < box.h; ++y)
    for (int x = 0; x < box.w; ++x) bits.set(x, y, inside(x, y));
  m.area_px = bits.popcount();
  m.bitmask = std::move(bits);
  return m;
}

const Dataset& fixture_dataset() {
  static const Dataset ds = load_dataset(dataset_dir()).dataset;
  return ds;
}

const kb::KnowledgeBase& fixture_kb() {
  static const kb::KnowledgeBase kb = [] {
    kb::MockEmbedder e;
    return kb::ingest_corpus(corpus_dir(), e);
  }();
  return kb;
}

const fs::path& fixture_store() {
  static TempDir dir;
  static const fs::path root = [] {
    pipeline::RunConfig cfg;
    cfg.dataset_dir = dataset_dir();
    cfg.corpus_dir = corpus_dir();
    cfg.store_dir = dir / "store";
    cfg.workers = 2;
    kb::MockEmbedder embedder;
    pipeline::Environment env;
    env.embedder = &embedder;
    env.clients = pipeline::make_clients(cfg);
    const auto summary = pipeline::annotate(cfg, env);
    if (summary.failed_count() != 0) throw std::runtime_error("fixture store has failed flows");
    return cfg.store_dir;
  }();
  return root;
}

annotator::FlowContext flow_context(const Dataset& dataset, const std::string& flow_id,
                                    const segmark::FilterConfig& thresholds) {
  const auto* flow = dataset.find_flow(flow_id);
  if (!flow) throw std::runtime_error("no fixture flow " + flow_id);
  annotator::FlowContext ctx;
  ctx.flow = *flow;
  for (const auto* s : dataset.screens_of(*flow)) {
    annotator::ScreenContext sc;
    sc.screen = *s;
    const auto filtered = segmark::filter_masks(dataset.masks_of(s->id), dataset.texts_of(s->id), *s, thresholds);
    for (const auto& m : filtered.kept) sc.masks[m.id] = m;
    sc.marked.screen_id = s->id;
    sc.marked.kept_marks = segmark::assign_marks(filtered.kept);
    sc.marked.removed = filtered.removed;
    sc.marked.overlay_image_ref = s->image_ref;
    sc.texts = dataset.texts_of(s->id);
    sc.image_ref = s->image_ref;
    ctx.screens.push_back(std::move(sc));
  }
  return ctx;
}

std::string fenced(const json& j) { return "Here you go.\n```json\n" + j.dump(2) + "\n```\n"; }

json draft_json(const std::string& name, std::vector<MarkAnchor> anchors) {
  return json{{"pattern_name", name},
              {"kind", "component_layout"},
              {"definition", name + " is a test pattern."},
              {"purpose", "Lets tests exercise the chain."},
              {"advantages", {"Easy to check."}},
              {"disadvantages", {"Not real."}},
              {"considerations", {"Keep it small."}},
              {"anchors", anchors}};
}

}  // namespace flowy::testing

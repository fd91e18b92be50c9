// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "store/store.hpp"

#include <algorithm>
#include <system_error>

#include "core/error.hpp"
#include "core/serialize.hpp"

namespace flowy::store {

namespace fs = std::filesystem;

std::string flow_doc_ref(const std::string& flow_id) { return "flows/" + flow_id + ".json"; }
std::string trace_ref(const std::string& flow_id) { return "traces/" + flow_id + ".ndjson"; }
std::string screen_image_ref(const std::string& screen_id) { return "assets/screens/" + screen_id + ".png"; }
std::string marked_image_ref(const std::string& screen_id) { return "assets/marked/" + screen_id + ".png"; }
std::string marked_sidecar_ref(const std::string& screen_id) { return "assets/marked/" + screen_id + ".json"; }

HoverSummary hover_summary(const PatternAnnotation& a) {
  auto first = [](const std::vector<std::string>& v) { return v.empty() ? std::string{} : first_sentence(v.front()); };
  return HoverSummary{first_sentence(a.purpose), first(a.advantages), first(a.disadvantages), first(a.considerations)};
}

namespace {

json summary_json(const HoverSummary& s) {
  return {{"purpose", s.purpose},
          {"advantages", s.advantages},
          {"disadvantages", s.disadvantages},
          {"considerations", s.considerations}};
}

FlowDoc flow_doc_from_json(const json& j, const std::string& what) {
  if (j.value("format", std::string{}) != kFlowFormat)
    throw Error(ErrorCode::parse, what + ": not a " + std::string(kFlowFormat) + " document");
  FlowDoc doc;
  doc.flow = decode<FlowExample>(j.at("flow"), what);
  doc.screens = decode<std::vector<Screen>>(j.at("screens"), what);
  doc.annotations = decode<std::vector<PatternAnnotation>>(j.at("annotations"), what);
  doc.warnings = decode<std::vector<std::string>>(j.value("warnings", json::array()), what);
  return doc;
}

json read_json_file(const fs::path& path) { return parse_json(read_file(path), path.string()); }

std::vector<std::string> flow_doc_ids(const fs::path& root) {
  std::vector<std::string> ids;
  std::error_code ec;
  const fs::path dir = root / "flows";
  if (!fs::is_directory(dir, ec)) return ids;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<FailedFlow> read_failed(const fs::path& root) {
  std::vector<FailedFlow> out;
  std::error_code ec;
  if (!fs::is_regular_file(root / kStoreManifest, ec)) return out;
  const json j = read_json_file(root / kStoreManifest);
  for (const auto& f : j.value("failed", json::array()))
    out.push_back(FailedFlow{f.at("flow_id").get<std::string>(), f.value("error", std::string{})});
  return out;
}

// Problems that make one flow document unusable.
std::vector<std::string> flow_problems(const FlowDoc& doc, const fs::path& root, const kb::KnowledgeBase* kb) {
  std::vector<std::string> problems;
  std::error_code ec;
  if (!is_valid_id(doc.flow.id)) problems.push_back("invalid flow id");
  if (doc.screens.empty()) problems.push_back("flow has no screens");
  if (doc.screens.size() != doc.marked.size()) problems.push_back("screen and sidecar counts differ");
  std::vector<std::string> ids;
  for (const auto& s : doc.screens) ids.push_back(s.id);
  if (ids != doc.flow.screen_ids) problems.push_back("screen list differs from the flow's screen_ids");
  for (std::size_t i = 0; i < doc.screens.size(); ++i) {
    const auto& s = doc.screens[i];
    if (s.flow_id != doc.flow.id) problems.push_back("screen '" + s.id + "' belongs to another flow");
    if (!fs::is_regular_file(root / s.image_ref, ec)) problems.push_back("missing image " + s.image_ref);
    if (i < doc.marked.size()) {
      const auto& m = doc.marked[i];
      if (m.screen_id != s.id) problems.push_back("sidecar for '" + s.id + "' names another screen");
      if (!fs::is_regular_file(root / m.overlay_image_ref, ec))
        problems.push_back("missing image " + m.overlay_image_ref);
      for (std::size_t k = 0; k < m.kept_marks.size(); ++k)
        if (m.kept_marks[k].number != static_cast<int>(k + 1))
          problems.push_back("marks on '" + s.id + "' are not numbered 1..N");
    }
  }
  auto mark_exists = [&](const MarkAnchor& anchor) {
    for (const auto& m : doc.marked) {
      if (m.screen_id != anchor.screen_id) continue;
      return anchor.mark >= 1 && anchor.mark <= static_cast<int>(m.kept_marks.size());
    }
    return false;
  };
  std::set<std::string> seen;
  for (const auto& a : doc.annotations) {
    const std::string label = "annotation '" + a.id + "': ";
    if (!seen.insert(a.id).second) problems.push_back(label + "duplicate id");
    if (a.flow_id != doc.flow.id) problems.push_back(label + "belongs to another flow");
    for (const auto& p : annotation_problems(a, mark_exists)) problems.push_back(label + p);
    if (kb)
      for (const auto& p : source_ref_problems(a, *kb)) problems.push_back(label + p);
    else if (!a.source_refs.empty())
      problems.push_back(label + "has source refs but the store has no knowledge-base snapshot");
  }
  return problems;
}

}  // namespace

std::vector<std::string> source_ref_problems(const PatternAnnotation& a, const kb::KnowledgeBase& kb) {
  std::vector<std::string> problems;
  for (const auto& r : a.source_refs) {
    const auto* article = kb.find_article(r.article_id);
    if (!article) {
      problems.push_back("source ref cites unknown article '" + r.article_id + "'");
      continue;
    }
    if (r.char_start >= r.char_end || r.char_end > article->body.size()) {
      problems.push_back("source ref offsets [" + std::to_string(r.char_start) + ", " + std::to_string(r.char_end) +
                         ") are outside article '" + r.article_id + "'");
      continue;
    }
    if (article->body.compare(r.char_start, r.char_end - r.char_start, r.excerpt) != 0)
      problems.push_back("source ref excerpt does not match article '" + r.article_id + "' at [" +
                         std::to_string(r.char_start) + ", " + std::to_string(r.char_end) + ")");
  }
  return problems;
}

std::string flow_doc_to_json(const FlowDoc& doc) {
  json annotations = json::array();
  for (const auto& a : doc.annotations) {
    json j = a;
    j["summary"] = summary_json(hover_summary(a));
    annotations.push_back(std::move(j));
  }
  return dump_canonical({{"format", kFlowFormat},
                         {"flow", doc.flow},
                         {"screens", doc.screens},
                         {"annotations", std::move(annotations)},
                         {"warnings", doc.warnings}});
}

StoreWriter::StoreWriter(fs::path root) : root_(std::move(root)) {}

WriteTally StoreWriter::write_screen(const MarkedScreen& marked, std::string_view screen_png,
                                     std::string_view overlay_png) {
  WriteTally tally;
  tally.add(write_file_atomic(root_ / screen_image_ref(marked.screen_id), screen_png));
  tally.add(write_file_atomic(root_ / marked_image_ref(marked.screen_id), overlay_png));
  tally.add(write_file_atomic(root_ / marked_sidecar_ref(marked.screen_id), dump_canonical(marked)));
  return tally;
}

WriteTally StoreWriter::write_flow(const FlowDoc& doc, const annotator::ChainTrace& trace) {
  WriteTally tally;
  tally.add(write_file_atomic(root_ / trace_ref(doc.flow.id), trace.to_ndjson()));
  tally.add(write_file_atomic(root_ / flow_doc_ref(doc.flow.id), flow_doc_to_json(doc)));
  return tally;
}

WriteTally StoreWriter::write_failure(const std::string& flow_id, const annotator::ChainTrace& trace) {
  WriteTally tally;
  tally.add(write_file_atomic(root_ / trace_ref(flow_id), trace.to_ndjson()));
  std::error_code ec;
  fs::remove(root_ / flow_doc_ref(flow_id), ec);
  if (ec) throw Error(ErrorCode::io, "cannot remove " + (root_ / flow_doc_ref(flow_id)).string() + ": " + ec.message());
  return tally;
}

WriteStatus StoreWriter::write_manifest(const std::vector<FailedFlow>& failures) {
  json flows = json::array();
  std::set<std::string> features;
  std::set<std::string> present;
  for (const auto& id : flow_doc_ids(root_)) {
    const fs::path path = root_ / flow_doc_ref(id);
    const FlowDoc doc = flow_doc_from_json(read_json_file(path), path.string());
    present.insert(doc.flow.id);
    features.insert(doc.flow.product_feature);
    flows.push_back({{"id", doc.flow.id},
                     {"app_name", doc.flow.app_name},
                     {"product_feature", doc.flow.product_feature},
                     {"title", doc.flow.title},
                     {"document", flow_doc_ref(doc.flow.id)},
                     {"screen_count", doc.screens.size()},
                     {"annotation_count", doc.annotations.size()}});
  }
  std::map<std::string, std::string> failed;
  for (const auto& f : read_failed(root_)) failed[f.flow_id] = f.error;
  for (const auto& f : failures) failed[f.flow_id] = f.error;
  json failed_json = json::array();
  for (const auto& [id, error] : failed)
    if (!present.count(id)) failed_json.push_back({{"flow_id", id}, {"error", error}});
  return write_file_atomic(root_ / kStoreManifest, dump_canonical({{"format", kStoreFormat},
                                                                    {"flows", std::move(flows)},
                                                                    {"features", features},
                                                                    {"failed", std::move(failed_json)}}));
}

std::shared_ptr<const Store> Store::open(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::io, "store directory " + root.string() + " does not exist");
  auto store = std::make_shared<Store>();
  store->root_ = root;

  if (fs::is_regular_file(root / kKbFile, ec)) store->kb_ = kb::load_snapshot(root / kKbFile);
  if (fs::is_regular_file(root / kStoreManifest, ec)) {
    const json manifest = read_json_file(root / kStoreManifest);
    if (manifest.value("format", std::string{}) != kStoreFormat)
      throw Error(ErrorCode::parse, (root / kStoreManifest).string() + ": not a " + kStoreFormat + " document");
    store->failed_ = read_failed(root);
  }

  for (const auto& id : flow_doc_ids(root)) {
    const fs::path path = root / flow_doc_ref(id);
    try {
      FlowDoc doc = flow_doc_from_json(read_json_file(path), path.string());
      if (doc.flow.id != id) throw Error(ErrorCode::validation, "document names flow '" + doc.flow.id + "'");
      for (const auto& s : doc.screens) {
        const fs::path sidecar = root / marked_sidecar_ref(s.id);
        doc.marked.push_back(decode<MarkedScreen>(read_json_file(sidecar), sidecar.string()));
      }
      const auto problems = flow_problems(doc, root, store->knowledge_base());
      if (!problems.empty()) {
        for (const auto& p : problems) store->problems_.push_back(Violation{id, p});
        continue;
      }
      store->flow_index_[id] = store->flows_.size();
      store->flows_.push_back(std::move(doc));
    } catch (const Error& e) {
      store->problems_.push_back(Violation{id, e.what()});
    }
  }
  for (std::size_t f = 0; f < store->flows_.size(); ++f)
    for (std::size_t a = 0; a < store->flows_[f].annotations.size(); ++a)
      store->annotation_index_[store->flows_[f].annotations[a].id] = {f, a};

  if (fs::is_regular_file(root / kRelatedFile, ec))
    store->related_.set(std::make_shared<const related::RelatedIndex>(related::load_index(root / kRelatedFile)));
  return store;
}

const FlowDoc* Store::find_flow(const std::string& id) const {
  const auto it = flow_index_.find(id);
  return it == flow_index_.end() ? nullptr : &flows_[it->second];
}

std::pair<const FlowDoc*, const PatternAnnotation*> Store::find_annotation(const std::string& id) const {
  const auto it = annotation_index_.find(id);
  if (it == annotation_index_.end()) return {nullptr, nullptr};
  const FlowDoc& doc = flows_[it->second.first];
  return {&doc, &doc.annotations[it->second.second]};
}

std::vector<const PatternAnnotation*> Store::annotations() const {
  std::vector<const PatternAnnotation*> out;
  for (const auto& f : flows_)
    for (const auto& a : f.annotations) out.push_back(&a);
  return out;
}

std::vector<std::string> Store::features() const {
  std::set<std::string> s;
  for (const auto& f : flows_) s.insert(f.flow.product_feature);
  return {s.begin(), s.end()};
}

std::vector<Violation> verify_store(const fs::path& root) {
  std::vector<Violation> out;
  std::shared_ptr<const Store> store;
  try {
    store = Store::open(root);
  } catch (const Error& e) {
    out.push_back(Violation{root.string(), e.what()});
    return out;
  }
  out = store->problems();

  std::error_code ec;
  std::set<std::string> docs;
  for (const auto& id : flow_doc_ids(root)) docs.insert(id);
  if (!fs::is_regular_file(root / kStoreManifest, ec)) {
    if (!docs.empty()) out.push_back(Violation{kStoreManifest, "missing while flow documents exist"});
  } else {
    std::set<std::string> listed;
    for (const auto& f : read_json_file(root / kStoreManifest).value("flows", json::array()))
      listed.insert(f.value("id", std::string{}));
    for (const auto& id : docs)
      if (!listed.count(id)) out.push_back(Violation{kStoreManifest, "does not list flow '" + id + "'"});
    for (const auto& id : listed)
      if (!docs.count(id)) out.push_back(Violation{kStoreManifest, "lists flow '" + id + "' without a document"});
  }

  const auto index = store->related();
  if (fs::is_regular_file(root / kRelatedFile, ec)) {
    std::set<std::string> annotated;
    for (const auto* a : store->annotations()) {
      annotated.insert(a->id);
      if (!index->contains(a->id))
        out.push_back(Violation{kRelatedFile, "does not index annotation '" + a->id + "'"});
    }
    for (const auto& e : index->entries())
      if (!annotated.count(e.annotation_id))
        out.push_back(Violation{kRelatedFile, "indexes unknown annotation '" + e.annotation_id + "'"});
    if (const auto* kb = store->knowledge_base(); kb && index->size() && index->entries().front().embedding.dimension() != kb->dimension())
      out.push_back(Violation{kRelatedFile, "embedding dimension differs from the knowledge base"});
  } else if (!store->annotations().empty()) {
    out.push_back(Violation{kRelatedFile, "missing while annotations exist"});
  }
  return out;
}

}  // namespace flowy::store

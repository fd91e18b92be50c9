// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/serialize.hpp"

#include "core/error.hpp"

namespace flowy {

void throw_decode_error(const std::string& what, const std::string& detail) {
  throw Error(ErrorCode::parse, what + ": " + detail);
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, what + ": " + e.what());
  }
}

std::string dump_canonical(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

void to_json(json& j, const BBox& b) { j = json::array({b.x, b.y, b.w, b.h}); }

void from_json(const json& j, BBox& b) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::parse, "bbox must be an array [x, y, w, h]");
  b = BBox{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

void to_json(json& j, const Point& p) { j = json{{"x", p.x}, {"y", p.y}}; }

void from_json(const json& j, Point& p) {
  p.x = j.at("x").get<int>();
  p.y = j.at("y").get<int>();
}

void to_json(json& j, const FlowExample& f) {
  j = json{{"id", f.id},
           {"app_name", f.app_name},
           {"product_feature", f.product_feature},
           {"title", f.title},
           {"screen_ids", f.screen_ids}};
}

void from_json(const json& j, FlowExample& f) {
  f.id = j.at("id").get<std::string>();
  f.app_name = j.at("app_name").get<std::string>();
  f.product_feature = j.at("product_feature").get<std::string>();
  f.title = j.value("title", std::string{});
  f.screen_ids = j.at("screen_ids").get<std::vector<std::string>>();
}

void to_json(json& j, const Screen& s) {
  j = json{{"id", s.id},
           {"flow_id", s.flow_id},
           {"image", s.image_ref},
           {"width", s.width_px},
           {"height", s.height_px},
           {"order_index", s.order_index}};
}

void from_json(const json& j, Screen& s) {
  s.id = j.at("id").get<std::string>();
  s.flow_id = j.at("flow_id").get<std::string>();
  s.image_ref = j.at("image").get<std::string>();
  s.width_px = j.at("width").get<int>();
  s.height_px = j.at("height").get<int>();
  s.order_index = j.at("order_index").get<int>();
}

void to_json(json& j, const TextRegion& t) {
  j = json{{"bbox", t.bbox}, {"text", t.text}, {"confidence", t.confidence}};
}

void from_json(const json& j, TextRegion& t) {
  t.bbox = j.at("bbox").get<BBox>();
  t.text = j.value("text", std::string{});
  t.confidence = j.value("confidence", 1.0);
}

void to_json(json& j, const SegmentMask& m) {
  j = json{{"id", m.id}, {"screen_id", m.screen_id}, {"bbox", m.bbox}, {"area_px", m.area_px}};
  if (m.bitmask) j["rle"] = json{{"counts", m.bitmask->to_rle()}};
}

void from_json(const json& j, SegmentMask& m) {
  m.id = j.at("id").get<std::string>();
  m.screen_id = j.value("screen_id", std::string{});
  m.bbox = j.at("bbox").get<BBox>();
  m.area_px = j.at("area_px").get<long long>();
  m.bitmask.reset();
  if (j.contains("rle") && !j["rle"].is_null()) {
    const auto counts = j["rle"].at("counts").get<std::vector<long long>>();
    if (m.bbox.w < 0 || m.bbox.h < 0) throw Error(ErrorCode::parse, "mask '" + m.id + "' has negative bbox size");
    try {
      m.bitmask = Bitmask::from_rle(m.bbox.w, m.bbox.h, counts);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse, "mask '" + m.id + "': " + e.what());
    }
  }
}

void to_json(json& j, const Mark& m) {
  j = json{{"number", m.number}, {"mask_id", m.mask_id}, {"label_anchor", m.label_anchor}};
}

void from_json(const json& j, Mark& m) {
  m.number = j.at("number").get<int>();
  m.mask_id = j.at("mask_id").get<std::string>();
  m.label_anchor = j.at("label_anchor").get<Point>();
}

void to_json(json& j, const MarkAnchor& a) { j = json{{"screen_id", a.screen_id}, {"mark", a.mark}}; }

void from_json(const json& j, MarkAnchor& a) {
  a.screen_id = j.at("screen_id").get<std::string>();
  a.mark = j.at("mark").get<int>();
}

void to_json(json& j, const SourceRef& r) {
  j = json{{"article_id", r.article_id},
           {"excerpt", r.excerpt},
           {"char_start", r.char_start},
           {"char_end", r.char_end}};
}

void from_json(const json& j, SourceRef& r) {
  r.article_id = j.at("article_id").get<std::string>();
  r.excerpt = j.at("excerpt").get<std::string>();
  r.char_start = j.at("char_start").get<std::size_t>();
  r.char_end = j.at("char_end").get<std::size_t>();
}

void to_json(json& j, const PatternAnnotation& a) {
  j = json{{"id", a.id},
           {"flow_id", a.flow_id},
           {"pattern_name", a.pattern_name},
           {"kind", std::string(to_string(a.kind))},
           {"definition", a.definition},
           {"purpose", a.purpose},
           {"advantages", a.advantages},
           {"disadvantages", a.disadvantages},
           {"considerations", a.considerations},
           {"anchors", a.anchors},
           {"source_refs", a.source_refs}};
}

void from_json(const json& j, PatternAnnotation& a) {
  a.id = j.at("id").get<std::string>();
  a.flow_id = j.at("flow_id").get<std::string>();
  a.pattern_name = j.at("pattern_name").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  const auto parsed = parse_pattern_kind(kind);
  if (!parsed) throw Error(ErrorCode::parse, "annotation '" + a.id + "' has unknown kind '" + kind + "'");
  a.kind = *parsed;
  a.definition = j.at("definition").get<std::string>();
  a.purpose = j.at("purpose").get<std::string>();
  a.advantages = j.at("advantages").get<std::vector<std::string>>();
  a.disadvantages = j.at("disadvantages").get<std::vector<std::string>>();
  a.considerations = j.at("considerations").get<std::vector<std::string>>();
  a.anchors = j.value("anchors", std::vector<MarkAnchor>{});
  a.source_refs = j.value("source_refs", std::vector<SourceRef>{});
}

void to_json(json& j, const EmbeddingVector& e) { j = e.values; }

void from_json(const json& j, EmbeddingVector& e) { e.values = j.get<std::vector<double>>(); }

void to_json(json& j, const RemovedMask& r) {
  j = json{{"mask_id", r.mask_id}, {"reason", std::string(to_string(r.reason))}};
}

void from_json(const json& j, RemovedMask& r) {
  r.mask_id = j.at("mask_id").get<std::string>();
  const auto reason = j.at("reason").get<std::string>();
  const auto parsed = parse_removal_reason(reason);
  if (!parsed) throw Error(ErrorCode::parse, "unknown removal reason '" + reason + "'");
  r.reason = *parsed;
}

void to_json(json& j, const MarkedScreen& m) {
  j = json{{"screen_id", m.screen_id},
           {"kept_marks", m.kept_marks},
           {"overlay_image", m.overlay_image_ref},
           {"removed", m.removed}};
}

void from_json(const json& j, MarkedScreen& m) {
  m.screen_id = j.at("screen_id").get<std::string>();
  m.kept_marks = j.at("kept_marks").get<std::vector<Mark>>();
  m.overlay_image_ref = j.at("overlay_image").get<std::string>();
  m.removed = j.at("removed").get<std::vector<RemovedMask>>();
}

void to_json(json& j, const Violation& v) { j = json{{"subject", v.subject}, {"message", v.message}}; }

}  // namespace flowy

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/dataset.hpp"

#include <set>

#include "core/error.hpp"
#include "core/serialize.hpp"
#include "core/util.hpp"
#include "image/image.hpp"

namespace flowy {

const FlowExample* Dataset::find_flow(const std::string& id) const {
  for (const auto& f : flows)
    if (f.id == id) return &f;
  return nullptr;
}

const Screen* Dataset::find_screen(const std::string& id) const {
  for (const auto& s : screens)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<const Screen*> Dataset::screens_of(const FlowExample& flow) const {
  std::vector<const Screen*> out;
  for (const auto& id : flow.screen_ids)
    if (const auto* s = find_screen(id)) out.push_back(s);
  return out;
}

const std::vector<SegmentMask>& Dataset::masks_of(const std::string& screen_id) const {
  static const std::vector<SegmentMask> kEmpty;
  const auto it = masks.find(screen_id);
  return it == masks.end() ? kEmpty : it->second;
}

const std::vector<TextRegion>& Dataset::texts_of(const std::string& screen_id) const {
  static const std::vector<TextRegion> kEmpty;
  const auto it = texts.find(screen_id);
  return it == texts.end() ? kEmpty : it->second;
}

namespace {

std::string bbox_str(const BBox& b) {
  return "[" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " + std::to_string(b.w) + ", " +
         std::to_string(b.h) + "]";
}

void load_sidecars(LoadedDataset& out, const json& entry, const Screen& screen) {
  const auto& root = out.dataset.root;
  if (entry.contains("masks")) {
    const std::string rel = entry["masks"].is_string() ? entry["masks"].get<std::string>() : "";
    try {
      const json doc = parse_json(read_file(root / rel), rel);
      auto masks = decode<std::vector<SegmentMask>>(doc.at("masks"), rel);
      for (auto& m : masks)
        if (m.screen_id.empty()) m.screen_id = screen.id;
      out.dataset.masks[screen.id] = std::move(masks);
    } catch (const std::exception& e) {
      out.violations.push_back({screen.id, std::string("mask sidecar unreadable: ") + e.what()});
    }
  }
  if (entry.contains("text_regions")) {
    const std::string rel = entry["text_regions"].is_string() ? entry["text_regions"].get<std::string>() : "";
    try {
      const json doc = parse_json(read_file(root / rel), rel);
      out.dataset.texts[screen.id] = decode<std::vector<TextRegion>>(doc.at("text_regions"), rel);
    } catch (const std::exception& e) {
      out.violations.push_back({screen.id, std::string("text region sidecar unreadable: ") + e.what()});
    }
  }
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) throw Error(ErrorCode::io, "dataset directory not found: " + root.string());

  LoadedDataset out;
  out.dataset.root = root;
  json manifest;
  try {
    manifest = parse_json(read_file(root / kDatasetManifest), kDatasetManifest);
  } catch (const Error& e) {
    out.violations.push_back({kDatasetManifest, e.what()});
    return out;
  }
  if (manifest.value("format", std::string{}) != kDatasetFormat)
    out.violations.push_back({kDatasetManifest, std::string("format must be \"") + kDatasetFormat + "\""});

  for (const auto& entry : manifest.value("flows", json::array())) {
    try {
      out.dataset.flows.push_back(decode<FlowExample>(entry, "flow entry"));
    } catch (const Error& e) {
      out.violations.push_back({entry.value("id", std::string("<flow>")), e.what()});
    }
  }
  for (const auto& entry : manifest.value("screens", json::array())) {
    Screen screen;
    try {
      screen = decode<Screen>(entry, "screen entry");
    } catch (const Error& e) {
      out.violations.push_back({entry.value("id", std::string("<screen>")), e.what()});
      continue;
    }
    load_sidecars(out, entry, screen);
    out.dataset.screens.push_back(std::move(screen));
  }
  return out;
}

std::vector<Violation> check_dataset(const Dataset& ds) {
  std::vector<Violation> v;
  std::set<std::string> flow_ids;
  std::map<std::string, std::string> owner_of_screen;

  for (const auto& f : ds.flows) {
    if (!is_valid_id(f.id)) v.push_back({f.id, "flow id must match [A-Za-z0-9._-]+"});
    if (!flow_ids.insert(f.id).second) v.push_back({f.id, "duplicate flow id"});
    if (f.screen_ids.empty()) v.push_back({f.id, "flow has no screens"});
    if (trim(f.product_feature).empty()) v.push_back({f.id, "product_feature is empty"});
    std::set<std::string> seen;
    for (const auto& sid : f.screen_ids) {
      if (!seen.insert(sid).second) {
        v.push_back({f.id, "screen '" + sid + "' listed twice"});
        continue;
      }
      if (!ds.find_screen(sid)) v.push_back({f.id, "unknown screen '" + sid + "'"});
      const auto [it, fresh] = owner_of_screen.emplace(sid, f.id);
      if (!fresh) v.push_back({sid, "screen listed by flows '" + it->second + "' and '" + f.id + "'"});
    }
  }

  std::set<std::string> screen_ids;
  std::set<std::string> mask_ids;
  std::map<std::string, std::set<int>> orders_by_flow;
  for (const auto& s : ds.screens) {
    if (!is_valid_id(s.id)) v.push_back({s.id, "screen id must match [A-Za-z0-9._-]+"});
    if (!screen_ids.insert(s.id).second) v.push_back({s.id, "duplicate screen id"});
    const auto* flow = ds.find_flow(s.flow_id);
    if (!flow) {
      v.push_back({s.id, "unknown flow '" + s.flow_id + "'"});
    } else if (owner_of_screen.count(s.id) == 0 || owner_of_screen[s.id] != s.flow_id) {
      v.push_back({s.id, "flow '" + s.flow_id + "' does not list this screen"});
    }
    if (s.width_px <= 0 || s.height_px <= 0) v.push_back({s.id, "width and height must be positive"});
    if (s.order_index < 0) v.push_back({s.id, "order_index must be non-negative"});
    if (!orders_by_flow[s.flow_id].insert(s.order_index).second)
      v.push_back({s.id, "order_index " + std::to_string(s.order_index) + " repeated within flow '" + s.flow_id + "'"});

    try {
      const auto size = image::read_png_size(ds.root / s.image_ref);
      if (size.width != s.width_px || size.height != s.height_px)
        v.push_back({s.id, "image is " + std::to_string(size.width) + "x" + std::to_string(size.height) +
                               ", manifest says " + std::to_string(s.width_px) + "x" + std::to_string(s.height_px)});
    } catch (const Error& e) {
      v.push_back({s.id, e.what()});
    }

    for (const auto& m : ds.masks_of(s.id)) {
      if (!is_valid_id(m.id)) v.push_back({m.id, "mask id must match [A-Za-z0-9._-]+"});
      if (!mask_ids.insert(m.id).second) v.push_back({m.id, "duplicate mask id"});
      if (m.screen_id != s.id) v.push_back({m.id, "mask belongs to '" + m.screen_id + "' but is listed under '" + s.id + "'"});
      if (!m.bbox.within(s.width_px, s.height_px))
        v.push_back({m.id, "bbox " + bbox_str(m.bbox) + " outside screen " + std::to_string(s.width_px) + "x" +
                               std::to_string(s.height_px)});
      const long long expected = m.bitmask ? m.bitmask->popcount() : m.bbox.area();
      if (m.area_px <= 0) v.push_back({m.id, "area_px must be positive"});
      if (m.area_px != expected)
        v.push_back({m.id, "area_px " + std::to_string(m.area_px) + " does not match " +
                               (m.bitmask ? "bitmask popcount " : "bbox area ") + std::to_string(expected)});
    }
    for (std::size_t i = 0; i < ds.texts_of(s.id).size(); ++i) {
      const auto& t = ds.texts_of(s.id)[i];
      const std::string subject = s.id + "#text" + std::to_string(i);
      if (!t.bbox.within(s.width_px, s.height_px)) v.push_back({subject, "text bbox " + bbox_str(t.bbox) + " outside screen"});
      if (!(t.confidence >= 0.0 && t.confidence <= 1.0)) v.push_back({subject, "confidence outside [0, 1]"});
    }
  }
  return v;
}

std::vector<Violation> validate_dataset(const std::filesystem::path& root) {
  auto loaded = load_dataset(root);
  auto v = std::move(loaded.violations);
  auto more = check_dataset(loaded.dataset);
  v.insert(v.end(), more.begin(), more.end());
  return v;
}

}  // namespace flowy

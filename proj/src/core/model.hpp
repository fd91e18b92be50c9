// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Domain types shared by every module. All of them are plain values: once a
// dataset, corpus or store is loaded they are never mutated, so they can be
// shared freely between worker threads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowy {

// Axis-aligned pixel rectangle, half-open: covers [x, x+w) x [y, y+h).
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }
  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool within(int width, int height) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && right() <= width && bottom() <= height;
  }
  bool operator==(const BBox&) const = default;
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

// Boolean grid the size of a mask's bbox, row-major. Persisted as
// uncompressed run lengths that alternate 0-runs and 1-runs, starting with 0.
class Bitmask {
 public:
  Bitmask() = default;
  Bitmask(int width, int height);

  static Bitmask from_rle(int width, int height, const std::vector<long long>& counts);
  std::vector<long long> to_rle() const;

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  long long popcount() const;

  bool operator==(const Bitmask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct FlowExample {
  std::string id;
  std::string app_name;
  std::string product_feature;
  std::string title;
  std::vector<std::string> screen_ids;
  bool operator==(const FlowExample&) const = default;
};

struct Screen {
  std::string id;
  std::string flow_id;
  std::string image_ref;  // relative to the dataset root
  int width_px = 0;
  int height_px = 0;
  int order_index = 0;
  bool operator==(const Screen&) const = default;
};

struct TextRegion {
  BBox bbox;
  std::string text;
  double confidence = 1.0;
  bool operator==(const TextRegion&) const = default;
};

struct SegmentMask {
  std::string id;
  std::string screen_id;
  BBox bbox;
  std::optional<Bitmask> bitmask;  // bbox-sized when present
  long long area_px = 0;
  bool operator==(const SegmentMask&) const = default;
};

struct Mark {
  int number = 0;
  std::string mask_id;
  Point label_anchor;
  bool operator==(const Mark&) const = default;
};

enum class PatternKind { component_layout, user_interaction, feature_specific };

std::string_view to_string(PatternKind kind);
std::optional<PatternKind> parse_pattern_kind(std::string_view text);

struct MarkAnchor {
  std::string screen_id;
  int mark = 0;
  bool operator==(const MarkAnchor&) const = default;
};

// Offsets are byte offsets into the article's canonical (UTF-8,
// "\n"-normalized) body.
struct SourceRef {
  std::string article_id;
  std::string excerpt;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool operator==(const SourceRef&) const = default;
};

struct PatternAnnotation {
  std::string id;
  std::string flow_id;
  std::string pattern_name;
  PatternKind kind = PatternKind::component_layout;
  std::string definition;
  std::string purpose;
  std::vector<std::string> advantages;
  std::vector<std::string> disadvantages;
  std::vector<std::string> considerations;
  std::vector<MarkAnchor> anchors;
  std::vector<SourceRef> source_refs;
  bool operator==(const PatternAnnotation&) const = default;
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  double norm() const;
  bool all_finite() const;
  bool operator==(const EmbeddingVector&) const = default;
};

enum class RemovalReason { text_overlap, tiny };

std::string_view to_string(RemovalReason reason);
std::optional<RemovalReason> parse_removal_reason(std::string_view text);

struct RemovedMask {
  std::string mask_id;
  RemovalReason reason = RemovalReason::tiny;
  bool operator==(const RemovedMask&) const = default;
};

struct MarkedScreen {
  std::string screen_id;
  std::vector<Mark> kept_marks;
  std::string overlay_image_ref;  // relative to the store root
  std::vector<RemovedMask> removed;
  bool operator==(const MarkedScreen&) const = default;
};

// One invariant breach, named by the id of the offending record.
struct Violation {
  std::string subject;
  std::string message;
  bool operator==(const Violation&) const = default;
};

// Invariant checks for an annotation in isolation; `mark_exists` resolves
// anchors against whatever marks the caller knows about.
template <typename MarkLookup>
std::vector<std::string> annotation_problems(const PatternAnnotation& a, MarkLookup&& mark_exists) {
  std::vector<std::string> problems;
  auto blank = [](const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; };
  auto blank_list = [&](const std::vector<std::string>& v) {
    if (v.empty()) return true;
    for (const auto& s : v)
      if (blank(s)) return true;
    return false;
  };
  if (blank(a.pattern_name)) problems.push_back("pattern_name is empty");
  if (blank(a.definition)) problems.push_back("definition is empty");
  if (blank(a.purpose)) problems.push_back("purpose is empty");
  if (blank_list(a.advantages)) problems.push_back("advantages must be a non-empty list of non-empty strings");
  if (blank_list(a.disadvantages)) problems.push_back("disadvantages must be a non-empty list of non-empty strings");
  if (blank_list(a.considerations)) problems.push_back("considerations must be a non-empty list of non-empty strings");
  for (const auto& anchor : a.anchors) {
    if (!mark_exists(anchor))
      problems.push_back("anchor references unknown mark " + std::to_string(anchor.mark) + " on screen '" +
                         anchor.screen_id + "'");
  }
  return problems;
}

}  // namespace flowy

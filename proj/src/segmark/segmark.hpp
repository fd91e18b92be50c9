// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Turns raw segmentation masks and OCR text boxes into the numbered
// Set-of-Mark overlay for one screen: drop masks that mostly duplicate a text
// region or are too small, number the rest in reading order, then draw them.

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "image/image.hpp"

namespace flowy::segmark {

// Rectangle IoU. Zero-area unions yield 0.
double compute_iou(const BBox& a, const BBox& b);
// Uses per-pixel geometry when both masks carry bitmasks, bboxes otherwise.
double compute_iou(const SegmentMask& a, const SegmentMask& b);
// Text regions are boxes, so this is always rectangle geometry.
double compute_iou(const SegmentMask& mask, const TextRegion& text);

struct FilterConfig {
  double iou_text = 0.55;        // strictly greater removes
  double min_area_frac = 0.005;  // strictly less removes
};

struct FilterResult {
  std::vector<SegmentMask> kept;  // input order
  std::vector<RemovedMask> removed;
};

// Text overlap is tested first, so a mask that is both overlapping and tiny is
// reported as text_overlap.
FilterResult filter_masks(std::span<const SegmentMask> masks, std::span<const TextRegion> texts,
                          const Screen& screen, const FilterConfig& config = {});

// Numbers 1..N by (top y, left x, mask id); anchors at the bbox top-left.
std::vector<Mark> assign_marks(std::span<const SegmentMask> kept);

inline constexpr int kBadgeDiameter = 24;

struct RenderResult {
  image::Image image;
  int badges_drawn = 0;
};

// Draws outlines and badges onto a copy of `base`. Throws Error{invalid_argument}
// when a mark names a mask not in `masks`.
RenderResult draw_marks(const image::Image& base, std::span<const Mark> marks,
                        const std::map<std::string, SegmentMask>& masks);

struct RenderedScreen {
  std::string png;  // encoded overlay
  MarkedScreen marked;
  int badges_drawn = 0;
};

// Loads the screenshot at `image_path`, draws the marks and encodes the
// overlay. `overlay_ref` is recorded in the returned MarkedScreen. Throws
// Error{io} naming the path when the screenshot cannot be read.
RenderedScreen render_marked_image(const Screen& screen, const std::filesystem::path& image_path,
                                   std::span<const Mark> marks, const std::map<std::string, SegmentMask>& masks,
                                   const std::string& overlay_ref);

}  // namespace flowy::segmark

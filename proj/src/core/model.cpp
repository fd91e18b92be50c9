// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace flowy {

Bitmask::Bitmask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorCode::invalid_argument, "bitmask dimensions must be non-negative");
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

Bitmask Bitmask::from_rle(int width, int height, const std::vector<long long>& counts) {
  Bitmask mask(width, height);
  const long long total = static_cast<long long>(width) * height;
  long long pos = 0;
  bool value = false;
  for (long long run : counts) {
    if (run < 0) throw Error(ErrorCode::parse, "negative run length in RLE");
    if (pos + run > total) throw Error(ErrorCode::parse, "RLE runs exceed bitmask size");
    if (value) std::fill_n(mask.bits_.begin() + pos, run, std::uint8_t{1});
    pos += run;
    value = !value;
  }
  if (pos != total)
    throw Error(ErrorCode::parse, "RLE runs cover " + std::to_string(pos) + " of " + std::to_string(total) + " cells");
  return mask;
}

std::vector<long long> Bitmask::to_rle() const {
  std::vector<long long> counts;
  std::uint8_t current = 0;
  long long run = 0;
  for (std::uint8_t b : bits_) {
    if (b != current) {
      counts.push_back(run);
      run = 0;
      current = b;
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

long long Bitmask::popcount() const { return std::accumulate(bits_.begin(), bits_.end(), 0LL); }

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::component_layout: return "component_layout";
    case PatternKind::user_interaction: return "user_interaction";
    case PatternKind::feature_specific: return "feature_specific";
  }
  return "component_layout";
}

std::optional<PatternKind> parse_pattern_kind(std::string_view text) {
  if (text == "component_layout") return PatternKind::component_layout;
  if (text == "user_interaction") return PatternKind::user_interaction;
  if (text == "feature_specific") return PatternKind::feature_specific;
  return std::nullopt;
}

std::string_view to_string(RemovalReason reason) {
  return reason == RemovalReason::text_overlap ? "text_overlap" : "tiny";
}

std::optional<RemovalReason> parse_removal_reason(std::string_view text) {
  if (text == "text_overlap") return RemovalReason::text_overlap;
  if (text == "tiny") return RemovalReason::tiny;
  return std::nullopt;
}

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

bool EmbeddingVector::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace flowy

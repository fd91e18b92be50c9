// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations written for checking, not speed. They share no
// code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace flowy::testing::oracle {

// Counts pixels one by one over the union of the two boxes.
inline double pixel_iou(const SegmentMask& a, const SegmentMask& b) {
  const bool bits = a.bitmask.has_value() && b.bitmask.has_value();
  auto covers = [bits](const SegmentMask& m, int x, int y) {
    if (x < m.bbox.x || y < m.bbox.y || x >= m.bbox.x + m.bbox.w || y >= m.bbox.y + m.bbox.h) return false;
    return !bits || m.bitmask->at(x - m.bbox.x, y - m.bbox.y);
  };
  const int x0 = std::min(a.bbox.x, b.bbox.x);
  const int y0 = std::min(a.bbox.y, b.bbox.y);
  const int x1 = std::max(a.bbox.x + a.bbox.w, b.bbox.x + b.bbox.w);
  const int y1 = std::max(a.bbox.y + a.bbox.h, b.bbox.y + b.bbox.h);
  long long inter = 0;
  long long uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool ia = covers(a, x, y);
      const bool ib = covers(b, x, y);
      inter += (ia && ib) ? 1 : 0;
      uni += (ia || ib) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct RankedItem {
  std::string article_id;
  std::size_t chunk_index = 0;
  double score = 0.0;
};

// Scores everything, sorts everything, keeps the first k.
inline std::vector<RankedItem> full_scan_top_k(const std::vector<RankedItem>& keys,
                                               const std::vector<std::vector<double>>& vectors,
                                               const std::vector<double>& query, std::size_t k) {
  std::vector<RankedItem> all = keys;
  for (std::size_t i = 0; i < all.size(); ++i) all[i].score = cosine(query, vectors[i]);
  std::stable_sort(all.begin(), all.end(), [](const RankedItem& x, const RankedItem& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.article_id != y.article_id) return x.article_id < y.article_id;
    return x.chunk_index < y.chunk_index;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

// Chunk spans: collect every paragraph cut position up front, then take the
// largest one in (start + overlap, start + max] for each chunk.
inline std::vector<Span> chunk_spans(const std::string& body, std::size_t max_chars, std::size_t overlap) {
  std::set<std::size_t> cuts;
  for (std::size_t i = 0; i + 1 < body.size(); ++i) {
    if (body[i] == '\n' && body[i + 1] == '\n') {
      cuts.insert(i);      // before the separator
      cuts.insert(i + 2);  // after it
    }
  }
  auto is_continuation = [&](std::size_t p) {
    return p < body.size() && (static_cast<unsigned char>(body[p]) & 0xC0) == 0x80;
  };
  std::vector<Span> spans;
  std::size_t start = 0;
  for (;;) {
    if (body.size() - start <= max_chars) {
      spans.push_back({start, body.size()});
      return spans;
    }
    const std::size_t hi = start + max_chars;
    const std::size_t lo = start + overlap;
    std::size_t end = 0;
    auto it = cuts.upper_bound(hi);
    if (it != cuts.begin()) {
      --it;
      if (*it > lo) end = *it;
    }
    if (end == 0) {
      end = hi;
      while (end > 0 && is_continuation(end)) --end;
      if (end <= lo) end = hi;
    }
    spans.push_back({start, end});
    std::size_t next = end - overlap;
    while (next > 0 && is_continuation(next)) --next;
    if (next <= start) next = end - overlap;
    start = next;
  }
}

}  // namespace flowy::testing::oracle

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "segmark/segmark.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "core/error.hpp"

namespace flowy::segmark {

namespace {

long long overlap_area(const BBox& a, const BBox& b) {
  const long long w = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const long long h = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  return w * h;
}

double ratio(long long inter, long long uni) {
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double compute_iou(const BBox& a, const BBox& b) {
  const long long inter = overlap_area(a, b);
  const long long uni = std::max(0LL, a.area()) + std::max(0LL, b.area()) - inter;
  return ratio(inter, uni);
}

double compute_iou(const SegmentMask& a, const SegmentMask& b) {
  if (!a.bitmask || !b.bitmask) return compute_iou(a.bbox, b.bbox);
  const int x0 = std::max(a.bbox.x, b.bbox.x);
  const int x1 = std::min(a.bbox.right(), b.bbox.right());
  const int y0 = std::max(a.bbox.y, b.bbox.y);
  const int y1 = std::min(a.bbox.bottom(), b.bbox.bottom());
  long long inter = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      if (a.bitmask->at(x - a.bbox.x, y - a.bbox.y) && b.bitmask->at(x - b.bbox.x, y - b.bbox.y)) ++inter;
  return ratio(inter, a.bitmask->popcount() + b.bitmask->popcount() - inter);
}

double compute_iou(const SegmentMask& mask, const TextRegion& text) { return compute_iou(mask.bbox, text.bbox); }

FilterResult filter_masks(std::span<const SegmentMask> masks, std::span<const TextRegion> texts, const Screen& screen,
                          const FilterConfig& config) {
  FilterResult out;
  const double screen_area = static_cast<double>(screen.width_px) * static_cast<double>(screen.height_px);
  for (const auto& m : masks) {
    const bool overlaps_text =
        std::any_of(texts.begin(), texts.end(), [&](const TextRegion& t) { return compute_iou(m, t) > config.iou_text; });
    if (overlaps_text) {
      out.removed.push_back({m.id, RemovalReason::text_overlap});
    } else if (static_cast<double>(m.area_px) / screen_area < config.min_area_frac) {
      out.removed.push_back({m.id, RemovalReason::tiny});
    } else {
      out.kept.push_back(m);
    }
  }
  return out;
}

std::vector<Mark> assign_marks(std::span<const SegmentMask> kept) {
  std::vector<const SegmentMask*> order;
  order.reserve(kept.size());
  for (const auto& m : kept) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const SegmentMask* a, const SegmentMask* b) {
    return std::tie(a->bbox.y, a->bbox.x, a->id) < std::tie(b->bbox.y, b->bbox.x, b->id);
  });
  std::vector<Mark> marks;
  marks.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    marks.push_back(Mark{static_cast<int>(i + 1), order[i]->id, Point{order[i]->bbox.x, order[i]->bbox.y}});
  return marks;
}

namespace {

using image::Rgba;

constexpr std::array<Rgba, 10> kPalette{{
    {230, 25, 75, 255},
    {60, 180, 75, 255},
    {0, 130, 200, 255},
    {245, 130, 48, 255},
    {145, 30, 180, 255},
    {70, 240, 240, 255},
    {240, 50, 230, 255},
    {210, 245, 60, 255},
    {0, 128, 128, 255},
    {170, 110, 40, 255},
}};

// 5x7 digit glyphs, one byte per row, low 5 bits used, MSB on the left.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kDigits{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1E, 0x01, 0x01, 0x0E, 0x01, 0x01, 0x1E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

Rgba color_for(int number) { return kPalette[static_cast<std::size_t>(number - 1) % kPalette.size()]; }

Rgba contrast_for(Rgba c) {
  const int luma = (299 * c.r + 587 * c.g + 114 * c.b) / 1000;
  return luma > 140 ? Rgba{0, 0, 0, 255} : Rgba{255, 255, 255, 255};
}

void draw_outline(image::Image& img, const SegmentMask& m, Rgba color) {
  const BBox& b = m.bbox;
  if (m.bitmask) {
    const auto& bm = *m.bitmask;
    auto on = [&](int x, int y) { return x >= 0 && y >= 0 && x < bm.width() && y < bm.height() && bm.at(x, y); };
    for (int y = 0; y < bm.height(); ++y)
      for (int x = 0; x < bm.width(); ++x)
        if (on(x, y) && (!on(x - 1, y) || !on(x + 1, y) || !on(x, y - 1) || !on(x, y + 1)))
          img.set(b.x + x, b.y + y, color);
    return;
  }
  for (int t = 0; t < 2; ++t) {
    for (int x = b.x; x < b.right(); ++x) {
      img.set(x, b.y + t, color);
      img.set(x, b.bottom() - 1 - t, color);
    }
    for (int y = b.y; y < b.bottom(); ++y) {
      img.set(b.x + t, y, color);
      img.set(b.right() - 1 - t, y, color);
    }
  }
}

void draw_badge(image::Image& img, int number, Point anchor) {
  const Rgba fill = color_for(number);
  const Rgba ink = contrast_for(fill);
  const int d = kBadgeDiameter;
  const int bx = std::clamp(anchor.x, 0, std::max(0, img.width() - d));
  const int by = std::clamp(anchor.y, 0, std::max(0, img.height() - d));
  // Squared distances in half-pixel units keep the disc test in integers.
  const int r2 = d * d;
  const int inner2 = (d - 2) * (d - 2);
  for (int y = 0; y < d; ++y) {
    for (int x = 0; x < d; ++x) {
      const int dx = 2 * x + 1 - d;
      const int dy = 2 * y + 1 - d;
      const int dist2 = dx * dx + dy * dy;
      if (dist2 > r2) continue;
      img.set(bx + x, by + y, dist2 > inner2 ? ink : fill);
    }
  }

  const std::string digits = std::to_string(number);
  const int scale = digits.size() == 1 ? 2 : 1;
  const int glyph_w = 5 * scale;
  const int text_w = static_cast<int>(digits.size()) * glyph_w + (static_cast<int>(digits.size()) - 1) * scale;
  const int text_h = 7 * scale;
  int ox = bx + (d - text_w) / 2;
  const int oy = by + (d - text_h) / 2;
  for (char ch : digits) {
    const auto& glyph = kDigits[static_cast<std::size_t>(ch - '0')];
    for (int row = 0; row < 7; ++row)
      for (int col = 0; col < 5; ++col)
        if (glyph[row] & (0x10 >> col))
          for (int sy = 0; sy < scale; ++sy)
            for (int sx = 0; sx < scale; ++sx) img.set(ox + col * scale + sx, oy + row * scale + sy, ink);
    ox += glyph_w + scale;
  }
}

}  // namespace

RenderResult draw_marks(const image::Image& base, std::span<const Mark> marks,
                        const std::map<std::string, SegmentMask>& masks) {
  RenderResult out{base, 0};
  for (const auto& mark : marks) {
    const auto it = masks.find(mark.mask_id);
    if (it == masks.end())
      throw Error(ErrorCode::invalid_argument, "mark " + std::to_string(mark.number) + " references unknown mask '" +
                                                   mark.mask_id + "'");
    draw_outline(out.image, it->second, color_for(mark.number));
  }
  for (const auto& mark : marks) {
    draw_badge(out.image, mark.number, mark.label_anchor);
    ++out.badges_drawn;
  }
  return out;
}

RenderedScreen render_marked_image(const Screen& screen, const std::filesystem::path& image_path,
                                   std::span<const Mark> marks, const std::map<std::string, SegmentMask>& masks,
                                   const std::string& overlay_ref) {
  const image::Image base = image::load_png(image_path);
  auto drawn = draw_marks(base, marks, masks);
  RenderedScreen out;
  out.png = image::encode_png(drawn.image);
  out.badges_drawn = drawn.badges_drawn;
  out.marked.screen_id = screen.id;
  out.marked.kept_marks.assign(marks.begin(), marks.end());
  out.marked.overlay_image_ref = overlay_ref;
  return out;
}

}  // namespace flowy::segmark

// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/dataset.hpp"
#include "core/error.hpp"
#include "image/image.hpp"
#include "oracles.hpp"
#include "segmark/segmark.hpp"
#include "support.hpp"

using namespace flowy;
using flowy::testing::bit_mask;
using flowy::testing::box_mask;

namespace {

Screen screen_of(int w, int h) {
  Screen s;
  s.id = "s";
  s.flow_id = "f";
  s.width_px = w;
  s.height_px = h;
  return s;
}

TextRegion text_at(BBox b) { return TextRegion{b, "label", 0.9}; }

}  // namespace

TEST_SUITE("segmark") {

TEST_CASE("rectangle iou examples") {
  using segmark::compute_iou;
  CHECK(compute_iou(BBox{0, 0, 10, 10}, BBox{0, 0, 10, 10}) == 1.0);
  CHECK(compute_iou(BBox{0, 0, 10, 10}, BBox{10, 0, 10, 10}) == 0.0);
  CHECK(compute_iou(BBox{0, 0, 10, 10}, BBox{5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(compute_iou(BBox{0, 0, 10, 10}, BBox{0, 0, 20, 10}) == 0.5);
  CHECK(compute_iou(BBox{0, 0, 0, 0}, BBox{0, 0, 0, 0}) == 0.0);
}

TEST_CASE("bitmask iou uses pixels only when both masks have them") {
  auto left_half = bit_mask("a", {0, 0, 10, 10}, [](int x, int) { return x < 5; });
  auto full = bit_mask("b", {0, 0, 10, 10}, [](int, int) { return true; });
  CHECK(segmark::compute_iou(left_half, full) == 0.5);
  CHECK(segmark::compute_iou(left_half, box_mask("c", {0, 0, 10, 10})) == 1.0);
  CHECK(segmark::compute_iou(left_half, text_at({0, 0, 10, 10})) == 1.0);
}

TEST_CASE("iou agrees with pixel counting on random shapes") {
  std::mt19937 rng(11);
  auto rnd = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); };
  for (int i = 0; i < 100; ++i) {
    BBox a{rnd(0, 30), rnd(0, 30), rnd(1, 25), rnd(1, 25)};
    BBox b{rnd(0, 30), rnd(0, 30), rnd(1, 25), rnd(1, 25)};
    const unsigned salt = rng();
    auto shape = [salt](int x, int y) { return ((x * 7 + y * 13 + static_cast<int>(salt % 5)) % 3) != 0; };
    const auto ma = bit_mask("a", a, shape);
    const auto mb = bit_mask("b", b, shape);
    CHECK(std::abs(segmark::compute_iou(ma, mb) - testing::oracle::pixel_iou(ma, mb)) <= 1e-12);
    CHECK(std::abs(segmark::compute_iou(a, b) - testing::oracle::pixel_iou(box_mask("a", a), box_mask("b", b))) <=
          1e-12);
  }
}

TEST_CASE("iou is symmetric and bounded") {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    BBox a{static_cast<int>(rng() % 50), static_cast<int>(rng() % 50), 1 + static_cast<int>(rng() % 40),
           1 + static_cast<int>(rng() % 40)};
    BBox b{static_cast<int>(rng() % 50), static_cast<int>(rng() % 50), 1 + static_cast<int>(rng() % 40),
           1 + static_cast<int>(rng() % 40)};
    const double x = segmark::compute_iou(a, b);
    CHECK(x == segmark::compute_iou(b, a));
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("text overlap threshold is strict") {
  const auto screen = screen_of(100, 100);
  // Text box inside a 1-pixel-high mask: iou = text width / mask width.
  auto run = [&](int text_w, int mask_w) {
    const std::vector<SegmentMask> masks{box_mask("m", {0, 0, mask_w, 100})};
    const std::vector<TextRegion> texts{text_at({0, 0, text_w, 100})};
    return segmark::filter_masks(masks, texts, screen);
  };
  CHECK(run(27, 50).kept.size() == 1);  // 0.54
  CHECK(run(11, 20).kept.size() == 1);  // 0.55 exactly
  const auto removed = run(14, 25);     // 0.56
  REQUIRE(removed.removed.size() == 1);
  CHECK(removed.removed[0].reason == RemovalReason::text_overlap);
}

TEST_CASE("minimum area threshold is strict") {
  const auto screen = screen_of(100, 100);
  auto run = [&](int area) {
    const std::vector<SegmentMask> masks{box_mask("m", {0, 0, area, 1})};
    return segmark::filter_masks(masks, {}, screen);
  };
  CHECK(run(40).removed.size() == 1);  // 0.4%
  CHECK(run(49).removed.size() == 1);
  CHECK(run(50).kept.size() == 1);     // 0.5% exactly
  CHECK(run(60).kept.size() == 1);
  CHECK(run(40).removed[0].reason == RemovalReason::tiny);
}

TEST_CASE("overlap is reported before size") {
  const std::vector<SegmentMask> masks{box_mask("m", {0, 0, 2, 2})};
  const std::vector<TextRegion> texts{text_at({0, 0, 2, 2})};
  const auto r = segmark::filter_masks(masks, texts, screen_of(100, 100));
  REQUIRE(r.removed.size() == 1);
  CHECK(r.removed[0].reason == RemovalReason::text_overlap);
}

TEST_CASE("thresholds are configurable") {
  const std::vector<SegmentMask> masks{box_mask("m", {0, 0, 10, 10})};
  const std::vector<TextRegion> texts{text_at({0, 0, 10, 6})};  // iou 0.6
  CHECK(segmark::filter_masks(masks, texts, screen_of(100, 100)).kept.empty());
  CHECK(segmark::filter_masks(masks, texts, screen_of(100, 100), {0.7, 0.005}).kept.size() == 1);
  CHECK(segmark::filter_masks(masks, {}, screen_of(100, 100), {0.55, 0.02}).kept.empty());
}

TEST_CASE("filtering partitions the input") {
  const auto ds = load_dataset(testing::dataset_dir()).dataset;
  for (const auto& s : ds.screens) {
    const auto& masks = ds.masks_of(s.id);
    const auto& texts = ds.texts_of(s.id);
    const auto r = segmark::filter_masks(masks, texts, s);
    CHECK(r.kept.size() + r.removed.size() == masks.size());
    for (const auto& k : r.kept) {
      CHECK(static_cast<double>(k.area_px) / (s.width_px * s.height_px) >= 0.005);
      for (const auto& t : texts) CHECK(segmark::compute_iou(k, t) <= 0.55);
    }
  }
}

TEST_CASE("scaling screen and boxes by powers of two keeps every decision") {
  const auto ds = load_dataset(testing::dataset_dir()).dataset;
  for (int factor : {2, 4}) {
    for (std::size_t i = 0; i < ds.screens.size(); i += 7) {
      const auto& s = ds.screens[i];
      std::vector<SegmentMask> masks;
      for (auto m : ds.masks_of(s.id)) {
        m.bbox = {m.bbox.x * factor, m.bbox.y * factor, m.bbox.w * factor, m.bbox.h * factor};
        m.bitmask.reset();
        m.area_px = m.bbox.area();
        masks.push_back(m);
      }
      std::vector<TextRegion> texts;
      for (auto t : ds.texts_of(s.id)) {
        t.bbox = {t.bbox.x * factor, t.bbox.y * factor, t.bbox.w * factor, t.bbox.h * factor};
        texts.push_back(t);
      }
      std::vector<SegmentMask> base;
      for (auto m : ds.masks_of(s.id)) {
        m.bitmask.reset();
        m.area_px = m.bbox.area();
        base.push_back(m);
      }
      auto big = s;
      big.width_px *= factor;
      big.height_px *= factor;
      const auto a = segmark::filter_masks(base, ds.texts_of(s.id), s);
      const auto b = segmark::filter_masks(masks, texts, big);
      CHECK(a.removed == b.removed);
    }
  }
}

TEST_CASE("marks are numbered in reading order") {
  const std::vector<SegmentMask> kept{box_mask("c", {50, 10, 5, 5}), box_mask("a", {10, 40, 5, 5}),
                                      box_mask("b", {5, 10, 5, 5}), box_mask("d", {5, 10, 9, 9})};
  const auto marks = segmark::assign_marks(kept);
  REQUIRE(marks.size() == 4);
  CHECK(marks[0].mask_id == "b");
  CHECK(marks[1].mask_id == "d");
  CHECK(marks[2].mask_id == "c");
  CHECK(marks[3].mask_id == "a");
  for (std::size_t i = 0; i < marks.size(); ++i) CHECK(marks[i].number == static_cast<int>(i) + 1);
  CHECK(marks[2].label_anchor == Point{50, 10});
}

TEST_CASE("mark numbering ignores input order") {
  const auto ds = load_dataset(testing::dataset_dir()).dataset;
  std::mt19937 rng(5);
  for (std::size_t i = 0; i < ds.screens.size(); i += 5) {
    auto masks = ds.masks_of(ds.screens[i].id);
    const auto expected = segmark::assign_marks(masks);
    std::shuffle(masks.begin(), masks.end(), rng);
    CHECK(segmark::assign_marks(masks) == expected);
  }
  CHECK(segmark::assign_marks({}).empty());
}

TEST_CASE("png encode and decode round-trip") {
  image::Image img(7, 5, {10, 20, 30, 255});
  img.set(3, 2, {200, 100, 50, 128});
  const auto png = image::encode_png(img);
  CHECK(image::decode_png(png) == img);
  CHECK(image::encode_png(img) == png);
  CHECK_THROWS_AS(image::decode_png("not a png"), Error);
}

TEST_CASE("rendering is deterministic and draws one badge per mark") {
  const auto ds = load_dataset(testing::dataset_dir()).dataset;
  const auto& s = *ds.find_screen("fs-01.s1");
  const auto r = segmark::filter_masks(ds.masks_of(s.id), ds.texts_of(s.id), s);
  const auto marks = segmark::assign_marks(r.kept);
  std::map<std::string, SegmentMask> by_id;
  for (const auto& m : r.kept) by_id[m.id] = m;
  const auto path = ds.root / s.image_ref;
  const auto a = segmark::render_marked_image(s, path, marks, by_id, "assets/marked/x.png");
  const auto b = segmark::render_marked_image(s, path, marks, by_id, "assets/marked/x.png");
  CHECK(a.png == b.png);
  CHECK(a.badges_drawn == static_cast<int>(marks.size()));
  CHECK(a.marked.kept_marks == marks);
  CHECK(a.marked.overlay_image_ref == "assets/marked/x.png");
  const auto overlay = image::decode_png(a.png);
  CHECK(overlay.width() == s.width_px);
  CHECK(overlay.height() == s.height_px);
  CHECK_FALSE(overlay == image::load_png(path));
}

TEST_CASE("rendering rejects unknown masks and unreadable images") {
  const std::vector<Mark> marks{{1, "ghost", {0, 0}}};
  CHECK_THROWS_AS(segmark::draw_marks(image::Image(10, 10), marks, {}), Error);
  try {
    segmark::render_marked_image(screen_of(10, 10), "/nonexistent/x.png", {}, {}, "o.png");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
    CHECK(std::string(e.what()).find("/nonexistent/x.png") != std::string::npos);
  }
}

}  // TEST_SUITE

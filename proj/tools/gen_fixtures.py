#!/usr/bin/env python3
# Copyright 2026 The Flowy Authors
# SPDX-License-Identifier: Apache-2.0
"""Generates the bundled fixture dataset under fixtures/dataset.

Screens are synthetic 360x640 mock-ups drawn with Pillow. Each component
gets a segmentation mask; every text label also gets a tight "text" mask
and each screen carries a few tiny icon masks, so the Set-of-Mark filter
has something to remove. Output is a pure function of this script.

Usage: gen_fixtures.py [output_dir]
"""

import json
import random
import sys
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

W, H = 360, 640
FONT = ImageFont.load_default(size=14)
FONT_BIG = ImageFont.load_default(size=20)

PALETTES = [
    ((246, 247, 251), (52, 92, 214), (34, 38, 51)),
    ((252, 248, 243), (214, 98, 52), (51, 40, 34)),
    ((243, 250, 246), (32, 150, 102), (30, 48, 40)),
    ((250, 245, 252), (140, 70, 200), (44, 34, 52)),
    ((244, 248, 252), (20, 120, 170), (28, 40, 52)),
]

FEATURES = {
    "Filter & Sort": ("fs", [
        ("Larder", "Narrow groceries by diet"),
        ("Tuneloft", "Sort playlists by mood"),
        ("Parcelly", "Filter shipments by status"),
        ("Roomful", "Filter rentals by price"),
        ("Stitchbox", "Sort fabrics by colour"),
        ("Trailmate", "Filter hikes by length"),
        ("Booknook", "Sort books by rating"),
        ("Cartwheel", "Filter bikes by size"),
        ("Plantly", "Filter plants by light"),
        ("Gigsy", "Sort concerts by date"),
        ("Dishdash", "Filter menus by cuisine"),
    ]),
    "Search & Find": ("sf", [
        ("Larder", "Find a recipe by ingredient"),
        ("Tuneloft", "Search for an artist"),
        ("Roomful", "Search rentals near me"),
        ("Booknook", "Find a book by author"),
        ("Clinicly", "Find a doctor"),
        ("Jobjar", "Search job openings"),
        ("Atlasy", "Search a place on the map"),
        ("Threadly", "Find a past conversation"),
        ("Fixit", "Search help articles"),
        ("Petpal", "Find a pet sitter"),
    ]),
    "Subscribing": ("sub", [
        ("Tuneloft", "Upgrade to premium"),
        ("Newsleaf", "Subscribe to the daily paper"),
        ("Fitloop", "Start a free trial"),
        ("Booknook", "Join the reading club"),
        ("Cloudnest", "Buy more storage"),
        ("Lingo Lab", "Unlock all lessons"),
        ("Streamly", "Choose a streaming plan"),
        ("Mealkit Co", "Subscribe to weekly boxes"),
        ("Focusly", "Go ad-free"),
        ("Podhaven", "Support a podcast"),
    ]),
}

ITEMS = ["Oat milk", "Trail mix", "Green tea", "Rye bread", "Olive oil", "Honey", "Lentils", "Basil",
         "Granola", "Miso", "Pesto", "Salsa", "Tofu", "Quinoa", "Berries", "Yogurt"]


class Screen:
    def __init__(self, sid, palette, title):
        self.sid = sid
        self.bg, self.accent, self.ink = palette
        self.img = Image.new("RGB", (W, H), self.bg)
        self.draw = ImageDraw.Draw(self.img)
        self.masks = []
        self.texts = []
        self.n = 0
        self.status_bar()
        self.text(16, 44, title, FONT_BIG, self.ink)

    def mask_id(self):
        self.n += 1
        return f"{self.sid}.m{self.n}"

    def status_bar(self):
        self.draw.rectangle([0, 0, W - 1, 27], fill=self.ink)
        self.text(12, 7, "9:41", FONT, (255, 255, 255), with_mask=False)
        # Signal and battery glyphs: tiny masks.
        for x in (300, 316, 332):
            self.draw.rectangle([x, 10, x + 9, 19], fill=(255, 255, 255))
            self.add_box_mask((x, 10, 10, 10))

    def text(self, x, y, s, font, fill, with_mask=True):
        x, y = int(x), int(y)
        self.draw.text((x, y), s, font=font, fill=fill)
        l, t, r, b = (int(round(v)) for v in self.draw.textbbox((x, y), s, font=font))
        box = (l, t, r - l, b - t)
        self.texts.append({"bbox": list(box), "text": s, "confidence": 0.97})
        if with_mask:
            # A segmenter also picks up the glyphs as a region of their own.
            self.add_box_mask((l - 1, t - 1, r - l + 2, b - t + 2))
        return box

    def add_box_mask(self, box):
        x, y, w, h = box
        self.masks.append({"id": self.mask_id(), "screen_id": self.sid, "bbox": [x, y, w, h], "area_px": w * h})

    def add_shape_mask(self, box, radius):
        x, y, w, h = box
        shape = Image.new("1", (w, h), 0)
        ImageDraw.Draw(shape).rounded_rectangle([0, 0, w - 1, h - 1], radius=radius, fill=1)
        bits = shape.convert("L").tobytes()
        counts, cur, run = [], 0, 0
        for v in bits:
            v = 1 if v else 0
            if v == cur:
                run += 1
            else:
                counts.append(run)
                cur, run = v, 1
        counts.append(run)
        self.masks.append({"id": self.mask_id(), "screen_id": self.sid, "bbox": [x, y, w, h],
                           "area_px": sum(1 for v in bits if v), "rle": {"counts": counts}})

    def button(self, x, y, w, h, label, filled=True):
        fill = self.accent if filled else self.bg
        self.draw.rounded_rectangle([x, y, x + w - 1, y + h - 1], radius=min(h // 2, 12), fill=fill,
                                    outline=self.accent, width=2)
        self.add_shape_mask((x, y, w, h), min(h // 2, 12))
        tw = self.draw.textlength(label, font=FONT)
        self.text(x + (w - tw) / 2, y + (h - 16) / 2, label, FONT, (255, 255, 255) if filled else self.accent)

    def card(self, x, y, w, h, title, subtitle):
        self.draw.rounded_rectangle([x, y, x + w - 1, y + h - 1], radius=10, fill=(255, 255, 255),
                                    outline=(220, 222, 230))
        self.add_shape_mask((x, y, w, h), 10)
        self.draw.ellipse([x + 10, y + 10, x + 49, y + 49], fill=self.accent)
        self.text(x + 60, y + 12, title, FONT, self.ink)
        self.text(x + 60, y + 32, subtitle, FONT, (110, 114, 130))
        # Chevron glyph.
        self.draw.rectangle([x + w - 20, y + h // 2 - 4, x + w - 13, y + h // 2 + 3], fill=(160, 164, 180))
        self.add_box_mask((x + w - 20, y + h // 2 - 4, 8, 8))

    def row(self, x, y, w, h, label):
        self.draw.rectangle([x, y, x + w - 1, y + h - 1], fill=(255, 255, 255))
        self.draw.line([x, y + h - 1, x + w - 1, y + h - 1], fill=(225, 227, 235))
        self.add_box_mask((x, y, w, h))
        self.text(x + 14, y + (h - 16) // 2, label, FONT, self.ink)

    def toggle(self, x, y, on):
        self.draw.rounded_rectangle([x, y, x + 51, y + 29], radius=15, fill=self.accent if on else (200, 202, 210))
        self.add_shape_mask((x, y, 52, 30), 15)
        cx = x + 37 if on else x + 15
        self.draw.ellipse([cx - 11, y + 4, cx + 11, y + 26], fill=(255, 255, 255))

    def field(self, x, y, w, h, placeholder):
        self.draw.rounded_rectangle([x, y, x + w - 1, y + h - 1], radius=h // 2, fill=(255, 255, 255),
                                    outline=(200, 204, 214), width=2)
        self.add_shape_mask((x, y, w, h), h // 2)
        self.text(x + 40, y + (h - 16) // 2, placeholder, FONT, (130, 134, 150))
        self.draw.ellipse([x + 14, y + h // 2 - 7, x + 27, y + h // 2 + 6], outline=self.ink, width=2)

    def chip(self, x, y, label, on):
        w = int(self.draw.textlength(label, font=FONT)) + 28
        self.draw.rounded_rectangle([x, y, x + w - 1, y + 31], radius=16,
                                    fill=self.accent if on else (255, 255, 255), outline=self.accent)
        self.add_shape_mask((x, y, w, 32), 16)
        self.text(x + 14, y + 8, label, FONT, (255, 255, 255) if on else self.accent)
        return w

    def tab_bar(self, labels, active):
        top = H - 60
        self.draw.rectangle([0, top, W - 1, H - 1], fill=(255, 255, 255))
        self.add_box_mask((0, top, W, 60))
        step = W // len(labels)
        for i, label in enumerate(labels):
            tw = self.draw.textlength(label, font=FONT)
            self.text(i * step + (step - tw) / 2, top + 30, label, FONT,
                      self.accent if i == active else (140, 144, 160))

    def save(self, root):
        self.img.save(root / "screens" / f"{self.sid}.png", optimize=False)
        (root / "masks" / f"{self.sid}.json").write_text(json.dumps({"masks": self.masks}, indent=1) + "\n")
        (root / "text" / f"{self.sid}.json").write_text(json.dumps({"text_regions": self.texts}, indent=1) + "\n")


def filter_flow(rng, fid, app, title, palette):
    items = rng.sample(ITEMS, 6)
    screens = []
    s = Screen(f"{fid}.s1", palette, f"{app} results")
    s.button(16, 84, 100, 36, "Filter")
    s.button(128, 84, 100, 36, "Sort", filled=False)
    for i, it in enumerate(items[:4]):
        s.card(16, 136 + i * 84, 328, 72, it, f"{rng.randint(2, 40)} options")
    s.tab_bar(["Home", "Browse", "Saved"], 1)
    screens.append(s)

    s = Screen(f"{fid}.s2", palette, "Filters")
    x = 16
    for label in ("Price", "Rating", "Nearby"):
        x += s.chip(x, 88, label, label == "Price") + 8
    for i, label in enumerate(("In stock only", "Free delivery", "On sale")):
        s.row(0, 140 + i * 60, W, 56, label)
        s.toggle(290, 153 + i * 60, on=(i + rng.randint(0, 1)) % 2 == 0)
    s.button(16, 560, 156, 44, "Reset", filled=False)
    s.button(188, 560, 156, 44, "Apply")
    screens.append(s)

    s = Screen(f"{fid}.s3", palette, "Sort by")
    for i, label in enumerate(("Most relevant", "Newest first", "Price: low to high", "Top rated")):
        s.row(0, 90 + i * 60, W, 56, label)
    s.button(16, 560, 328, 44, "Show results")
    screens.append(s)

    if rng.random() < 0.6:
        s = Screen(f"{fid}.s4", palette, f"{rng.randint(3, 24)} results")
        x = 16
        for label in ("Under $20", "In stock"):
            x += s.chip(x, 84, label + "  x", True) + 8
        for i, it in enumerate(items[2:5]):
            s.card(16, 132 + i * 84, 328, 72, it, "Matches your filters")
        s.tab_bar(["Home", "Browse", "Saved"], 1)
        screens.append(s)
    return screens


def search_flow(rng, fid, app, title, palette):
    query = rng.choice(["basil", "jazz", "studio", "tolkien", "dentist", "designer", "lisbon", "invoice",
                        "password", "corgi"])
    screens = []
    s = Screen(f"{fid}.s1", palette, app)
    s.field(16, 84, 328, 44, "Search")
    s.text(16, 148, "Recent", FONT, (110, 114, 130))
    for i, it in enumerate(rng.sample(ITEMS, 3)):
        s.row(0, 172 + i * 56, W, 52, it)
    s.tab_bar(["Home", "Search", "Profile"], 1)
    screens.append(s)

    s = Screen(f"{fid}.s2", palette, "Search")
    s.field(16, 84, 328, 44, query)
    for i in range(4):
        s.row(0, 140 + i * 56, W, 52, f"{query} {['nearby', 'popular', 'new', 'top'][i]}")
    screens.append(s)

    s = Screen(f"{fid}.s3", palette, f"Results for {query}")
    x = 16
    for label in ("All", "People", "Places"):
        x += s.chip(x, 84, label, label == "All") + 8
    for i in range(3):
        s.card(16, 132 + i * 84, 328, 72, f"{query.title()} {i + 1}", f"{rng.randint(1, 9)} km away")
    s.tab_bar(["Home", "Search", "Profile"], 1)
    screens.append(s)

    if rng.random() < 0.5:
        s = Screen(f"{fid}.s4", palette, f"{query.title()} 1")
        s.card(16, 88, 328, 72, "Overview", "Open now")
        s.button(16, 180, 156, 44, "Save", filled=False)
        s.button(188, 180, 156, 44, "Open")
        screens.append(s)
    return screens


def subscribe_flow(rng, fid, app, title, palette):
    price = rng.choice([3, 4, 5, 7, 9])
    screens = []
    s = Screen(f"{fid}.s1", palette, f"{app} Plus")
    s.text(16, 84, "Everything, no limits", FONT, (110, 114, 130))
    s.card(16, 120, 328, 72, "Monthly", f"${price}.99 per month")
    s.card(16, 204, 328, 72, "Yearly", f"${price * 10}.99 per year")
    s.button(16, 300, 328, 48, "Start free trial")
    s.button(16, 360, 328, 40, "Not now", filled=False)
    screens.append(s)

    s = Screen(f"{fid}.s2", palette, "Compare plans")
    for i, label in enumerate(("Offline access", "No ads", "Family sharing")):
        s.row(0, 90 + i * 60, W, 56, label)
        s.toggle(290, 103 + i * 60, on=True)
    s.button(16, 560, 328, 44, "Continue")
    screens.append(s)

    s = Screen(f"{fid}.s3", palette, "Confirm")
    s.card(16, 88, 328, 72, "Yearly plan", f"${price * 10}.99 after trial")
    s.field(16, 180, 328, 44, "Card number")
    s.button(16, 560, 328, 44, "Subscribe")
    screens.append(s)

    if rng.random() < 0.5:
        s = Screen(f"{fid}.s4", palette, "You're in")
        s.text(16, 90, "Your trial runs for 7 days", FONT, (110, 114, 130))
        s.button(16, 130, 328, 44, "Get started")
        screens.append(s)
    return screens


BUILDERS = {"Filter & Sort": filter_flow, "Search & Find": search_flow, "Subscribing": subscribe_flow}


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures" / "dataset"
    for sub in ("screens", "masks", "text"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240517)
    flows, screens = [], []
    for feature, (prefix, apps) in FEATURES.items():
        for i, (app, title) in enumerate(apps):
            fid = f"{prefix}-{i + 1:02d}"
            palette = PALETTES[rng.randrange(len(PALETTES))]
            built = BUILDERS[feature](rng, fid, app, title, palette)
            flows.append({"id": fid, "app_name": app, "product_feature": feature, "title": title,
                          "screen_ids": [s.sid for s in built]})
            for order, s in enumerate(built):
                s.save(root)
                screens.append({"id": s.sid, "flow_id": fid, "image": f"screens/{s.sid}.png", "width": W,
                                "height": H, "order_index": order, "masks": f"masks/{s.sid}.json",
                                "text_regions": f"text/{s.sid}.json"})
    manifest = {"format": "flowy-dataset/1", "flows": flows, "screens": screens}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    print(f"{len(flows)} flows, {len(screens)} screens -> {root}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generate the bundled mini corpus: 60 images across two food categories.

Deterministic (seeded); rerunning rewrites data/mini_corpus in place. Each
category has a distinct color palette and an aligned cue vocabulary so that
cue-following separates the categories while a shared "recipe" term keeps
both categories reachable from mixed queries.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "mini_corpus"

CATEGORIES = {
    "zoodles": {
        "prefix": "z",
        "label": 1,
        "base_color": (52, 140, 64),
        "terms": ["zoodles", "zucchini", "noodles", "spiralized", "veggie", "green", "fresh", "healthy"],
    },
    "bolognese": {
        "prefix": "b",
        "label": 0,
        "base_color": (168, 46, 38),
        "terms": ["spaghetti", "bolognese", "pasta", "sauce", "beef", "tomato", "italian", "hearty"],
    },
}
SHARED_TERMS = ["recipe", "homemade", "dinner", "kitchen"]


def make_raster(rng, width, height, base_color, accent_box):
    base = np.array(base_color, dtype=np.int32) + rng.integers(-25, 26, size=3)
    # 4px block noise: varies histograms without defeating PNG compression
    block = 4
    bh_, bw_ = -(-height // block), -(-width // block)
    noise = rng.integers(-18, 19, size=(bh_, bw_, 3))
    noise = np.repeat(np.repeat(noise, block, axis=0), block, axis=1)[:height, :width]
    raster = np.clip(base[None, None, :] + noise, 0, 255)
    x, y, w, h = accent_box
    raster[y : y + h, x : x + w] = np.clip(raster[y : y + h, x : x + w] + 45, 0, 255)
    return raster.astype(np.uint8)


def main():
    rng = np.random.default_rng(7)
    (OUT / "images").mkdir(parents=True, exist_ok=True)
    records = []
    for category, spec in CATEGORIES.items():
        pool = spec["terms"]
        for i in range(30):
            image_id = f"{spec['prefix']}{i:03d}"
            width = int(rng.integers(64, 161))
            height = int(rng.integers(48, 121))
            title_terms = [pool[int(t)] for t in rng.choice(len(pool), size=2, replace=False)]
            title = " ".join(title_terms + [SHARED_TERMS[int(rng.integers(0, len(SHARED_TERMS)))]])
            desc_terms = [pool[int(t)] for t in rng.choice(len(pool), size=3, replace=False)]
            description = " ".join(desc_terms + ["recipe"])

            bw = int(rng.integers(width // 4, width // 2))
            bh = int(rng.integers(height // 4, height // 2))
            bx = int(rng.integers(0, width - bw))
            by = int(rng.integers(0, height - bh))
            cues = [
                {
                    "id": f"{image_id}-v0",
                    "kind": "visual",
                    "bbox": [bx, by, bw, bh],
                    "terms": sorted(
                        {pool[int(t)] for t in rng.choice(len(pool), size=2, replace=False)}
                    ),
                }
            ]
            if i % 2 == 0:
                cues.append(
                    {
                        "id": f"{image_id}-t0",
                        "kind": "text",
                        "terms": [pool[int(rng.integers(0, len(pool)))], "recipe"],
                    }
                )
            if i % 3 == 0:
                cues.append(
                    {
                        "id": f"{image_id}-b0",
                        "kind": "bookmark",
                        "terms": [category],
                    }
                )

            raster = make_raster(rng, width, height, spec["base_color"], (bx, by, bw, bh))
            Image.fromarray(raster).save(OUT / "images" / f"{image_id}.png")
            records.append(
                {
                    "id": image_id,
                    "uri": f"images/{image_id}.png",
                    "width": width,
                    "height": height,
                    "title": title,
                    "description": description,
                    "category": category,
                    "label": spec["label"],
                    "cues": cues,
                }
            )

    records.sort(key=lambda r: r["id"])
    manifest = {"corpus": "mini_corpus", "images": records}
    with open(OUT / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(records)} images to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

from pathlib import Path

import numpy as np
import pytest

from iftrec.domain import Cue, ImageDoc, Patch
from iftrec.ingest import Store, load_manifest

REPO_ROOT = Path(__file__).resolve().parent.parent
MINI_CORPUS = REPO_ROOT / "data" / "mini_corpus"


def make_image(image_id, title="", description="", category=None, label=None, cues=(), w=100, h=80):
    return ImageDoc(
        id=image_id,
        uri=f"{image_id}.png",
        width=w,
        height=h,
        title=title,
        description=description,
        category=category,
        label=label,
        cues=tuple(cues),
    )


def make_cue(cue_id, terms, kind="text", bbox=None):
    region = Patch(*bbox) if bbox is not None else None
    if kind == "visual" and region is None:
        region = Patch(0, 0, 10, 10)
    return Cue(id=cue_id, kind=kind, terms=tuple(terms), region=region)


def flat_raster(r, g, b, w=8, h=8):
    return np.full((h, w, 3), (r, g, b), dtype=np.uint8)


@pytest.fixture(scope="session")
def mini_manifest():
    return load_manifest(MINI_CORPUS / "manifest.json")


@pytest.fixture(scope="session")
def mini_store(mini_manifest):
    return Store.build(mini_manifest, base_dir=MINI_CORPUS)

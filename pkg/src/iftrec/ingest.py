"""Corpus loading, category labeling, and store persistence.

A persisted store is one directory:

    manifest.json    corpus manifest (schema below)
    features.bin     versioned binary: feature vectors + color histograms
    vocab.txt        one vocabulary term per line, order = tf-idf vector order
    embeddings.tsv   optional sidecar, ``<image_id>\\t<v1>,<v2>,...`` per line

features.bin layout (all integers little-endian):

    magic            4 bytes  b"IFST"
    version          uint32   format version (currently 1)
    config length    uint32
    config           UTF-8 JSON: {"bins_per_channel": B, "vocab_top_k": K}
    image count      uint32
    feature dim      uint32
    histogram dim    uint32
    per image:       uint16 id length, id UTF-8, dim float64 features,
                     histogram dim float64 histogram entries
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .domain import Cue, ImageDoc, Patch
from .errors import InvalidInputError, NotFoundError, SchemaError, StoreVersionError
from .features import (
    CorpusStats,
    TfIdfModel,
    build_tfidf,
    extract_color_histogram,
    image_feature_vector,
    image_terms,
    load_embeddings,
    save_embeddings,
)

STORE_FORMAT_VERSION = 1
_MAGIC = b"IFST"

WIKIART_SUBCLASSES = (
    "abstract_painting",
    "cityscape",
    "genre_painting",
    "illustration",
    "landscape",
    "nude_painting",
    "portrait",
    "religious_painting",
    "sketch_and_study",
    "still_life",
)

# Subclasses whose reported per-class accuracy clears the 0.5 threshold.
DEFAULT_INTERESTED = frozenset(
    {"illustration", "nude_painting", "still_life", "abstract_painting"}
)

WIKIART_SUBCLASS_ACCURACY = {
    "illustration": 0.66,
    "nude_painting": 0.65,
    "still_life": 0.57,
    "abstract_painting": 0.54,
    "landscape": 0.14,
    "cityscape": 0.28,
    "religious_painting": 0.32,
    "sketch_and_study": 0.35,
    "genre_painting": 0.36,
    "portrait": 0.37,
}

_IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}


@dataclass(frozen=True)
class StoreConfig:
    bins_per_channel: int = 4
    vocab_top_k: int = 32

    def to_dict(self) -> dict:
        return {"bins_per_channel": self.bins_per_channel, "vocab_top_k": self.vocab_top_k}


@dataclass(frozen=True)
class CorpusManifest:
    corpus: str
    images: tuple[ImageDoc, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))


def _validate_cue_record(rec, image_rec, where: str, violations: list[str]):
    if not isinstance(rec, dict):
        violations.append(f"{where}: cue record must be an object")
        return
    cue_id = rec.get("id")
    if not isinstance(cue_id, str) or not cue_id:
        violations.append(f"{where}: cue id must be a non-empty string")
    kind = rec.get("kind")
    if kind not in ("visual", "text", "bookmark"):
        violations.append(f"{where}: unknown cue kind {kind!r}")
    terms = rec.get("terms", [])
    if not isinstance(terms, list) or any(not isinstance(t, str) for t in terms):
        violations.append(f"{where}: cue terms must be a list of strings")
        terms = []
    if kind in ("text", "bookmark") and not terms:
        violations.append(f"{where}: {kind} cues require at least one term")
    bbox = rec.get("bbox")
    if kind == "visual" and bbox is None:
        violations.append(f"{where}: visual cues require a bbox")
    if kind in ("text", "bookmark") and bbox is not None:
        violations.append(f"{where}: {kind} cues must not carry a bbox")
    if bbox is not None:
        if (
            not isinstance(bbox, list)
            or len(bbox) != 4
            or any(not isinstance(v, int) for v in bbox)
        ):
            violations.append(f"{where}: bbox must be [x, y, w, h] integers")
        else:
            x, y, w, h = bbox
            if w <= 0 or h <= 0 or x < 0 or y < 0:
                violations.append(f"{where}: bbox must have non-negative origin and positive size")
            else:
                iw, ih = image_rec.get("width"), image_rec.get("height")
                if isinstance(iw, int) and isinstance(ih, int) and (x + w > iw or y + h > ih):
                    violations.append(f"{where}: bbox [{x},{y},{w},{h}] exceeds image bounds")


def _validate_image_record(rec, idx: int, seen_ids: set[str], violations: list[str]):
    if not isinstance(rec, dict):
        violations.append(f"images[{idx}]: record must be an object")
        return
    image_id = rec.get("id")
    where = f"image {image_id!r}" if isinstance(image_id, str) else f"images[{idx}]"
    if not isinstance(image_id, str) or not image_id:
        violations.append(f"{where}: id must be a non-empty string")
    elif image_id in seen_ids:
        violations.append(f"{where}: duplicate image id")
    else:
        seen_ids.add(image_id)
    if not isinstance(rec.get("uri"), str):
        violations.append(f"{where}: uri must be a string")
    for dim in ("width", "height"):
        v = rec.get(dim)
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            violations.append(f"{where}: {dim} must be a positive integer")
    label = rec.get("label")
    if label is not None and label not in (0, 1):
        violations.append(f"{where}: label must be 0 or 1, got {label!r}")
    cues = rec.get("cues", [])
    if not isinstance(cues, list):
        violations.append(f"{where}: cues must be a list")
        cues = []
    cue_ids = set()
    for cue in cues:
        if isinstance(cue, dict) and isinstance(cue.get("id"), str):
            if cue["id"] in cue_ids:
                violations.append(f"{where}: duplicate cue id {cue['id']!r}")
            cue_ids.add(cue["id"])
        _validate_cue_record(cue, rec, f"{where} cue {cue.get('id') if isinstance(cue, dict) else idx!r}", violations)


def manifest_from_dict(payload: dict) -> CorpusManifest:
    """Validate a raw manifest dict, collecting every violation before raising."""
    violations: list[str] = []
    if not isinstance(payload, dict):
        raise SchemaError(["manifest must be a JSON object"])
    corpus = payload.get("corpus")
    if not isinstance(corpus, str) or not corpus:
        violations.append("manifest: corpus must be a non-empty string")
    records = payload.get("images")
    if not isinstance(records, list):
        violations.append("manifest: images must be a list")
        records = []
    seen: set[str] = set()
    for idx, rec in enumerate(records):
        _validate_image_record(rec, idx, seen, violations)
    if violations:
        raise SchemaError(violations)

    images = []
    for rec in records:
        cues = tuple(
            Cue(
                id=c["id"],
                kind=c["kind"],
                terms=tuple(c.get("terms", [])),
                region=Patch(*c["bbox"]) if c.get("bbox") is not None else None,
            )
            for c in rec.get("cues", [])
        )
        images.append(
            ImageDoc(
                id=rec["id"],
                uri=rec["uri"],
                width=rec["width"],
                height=rec["height"],
                title=rec.get("title", ""),
                description=rec.get("description", ""),
                category=rec.get("category"),
                label=rec.get("label"),
                cues=cues,
            )
        )
    return CorpusManifest(corpus=corpus, images=tuple(images))


def manifest_to_dict(manifest: CorpusManifest) -> dict:
    records = []
    for img in manifest.images:
        rec = {
            "id": img.id,
            "uri": img.uri,
            "width": img.width,
            "height": img.height,
            "title": img.title,
            "description": img.description,
        }
        if img.category is not None:
            rec["category"] = img.category
        if img.label is not None:
            rec["label"] = int(img.label)
        rec["cues"] = [
            {
                "id": c.id,
                "kind": c.kind,
                **({"bbox": c.region.as_bbox()} if c.region is not None else {}),
                "terms": list(c.terms),
            }
            for c in img.cues
        ]
        records.append(rec)
    return {"corpus": manifest.corpus, "images": records}


def load_manifest(path) -> CorpusManifest:
    """Load and validate a manifest; relative uris resolve against its directory."""
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"manifest {path} does not exist")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError([f"manifest is not valid JSON: {exc}"]) from None
    manifest = manifest_from_dict(payload)
    base = path.resolve().parent
    resolved = tuple(
        img
        if "://" in img.uri or Path(img.uri).is_absolute()
        else replace(img, uri=str(base / img.uri))
        for img in manifest.images
    )
    return CorpusManifest(corpus=manifest.corpus, images=resolved)


def save_manifest(manifest: CorpusManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest_to_dict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_category_dir(root, subclasses=None) -> CorpusManifest:
    """Build a manifest from a directory tree with one subdirectory per category."""
    root = Path(root)
    if not root.is_dir():
        raise InvalidInputError(f"category root {root} is not a directory")
    selected = tuple(subclasses) if subclasses is not None else WIKIART_SUBCLASSES
    if not selected:
        raise InvalidInputError("at least one subclass must be selected")
    images = []
    for subclass in selected:
        sub = root / subclass
        if not sub.is_dir():
            warnings.warn(f"subclass directory {sub} is missing; skipped")
            continue
        for file in sorted(sub.iterdir()):
            if file.suffix.lower() not in _IMAGE_EXTENSIONS:
                continue
            with Image.open(file) as im:
                width, height = im.size
            images.append(
                ImageDoc(
                    id=f"{subclass}__{file.stem}",
                    uri=str(file.resolve()),
                    width=width,
                    height=height,
                    title=file.stem.replace("_", " ").replace("-", " "),
                    category=subclass,
                )
            )
    if not images:
        raise InvalidInputError(f"no images found under {root} for the selected subclasses")
    return CorpusManifest(corpus=root.name, images=tuple(images))


def derive_labels(
    manifest: CorpusManifest,
    interested_categories=None,
    accuracies=None,
    threshold: float = 0.5,
) -> CorpusManifest:
    """Label images by category membership in the interested set.

    When per-category accuracies are supplied, the interested set is derived
    as the categories whose accuracy clears the threshold. Images without a
    category keep an explicit label when present; otherwise they are errors.
    """
    if accuracies is not None:
        interested = {c for c, acc in accuracies.items() if acc >= threshold}
    elif interested_categories is not None:
        interested = set(interested_categories)
    else:
        interested = set(DEFAULT_INTERESTED)
    unlabelable = [
        img.id for img in manifest.images if img.category is None and img.label is None
    ]
    if unlabelable:
        raise InvalidInputError(
            f"images without category or explicit label: {', '.join(sorted(unlabelable))}"
        )
    relabeled = tuple(
        replace(img, label=int(img.category in interested)) if img.category is not None else img
        for img in manifest.images
    )
    return CorpusManifest(corpus=manifest.corpus, images=relabeled)


class Store:
    """A corpus plus its precomputed features, shared read-only once built."""

    def __init__(
        self,
        manifest: CorpusManifest,
        tfidf: TfIdfModel,
        histograms: dict[str, np.ndarray],
        feature_vectors: dict[str, np.ndarray],
        config: StoreConfig,
        embeddings: dict[str, np.ndarray] | None = None,
    ):
        self.manifest = manifest
        self.config = config
        self.images: dict[str, ImageDoc] = {
            img.id: img for img in sorted(manifest.images, key=lambda i: i.id)
        }
        self.order: tuple[str, ...] = tuple(self.images)
        self.tfidf = tfidf
        self.histograms = histograms
        self.feature_vectors = feature_vectors
        self.embeddings = embeddings
        self.stats = CorpusStats(
            max_width=max(i.width for i in self.images.values()),
            max_height=max(i.height for i in self.images.values()),
            ids=frozenset(self.images),
        )
        self.terms_map: dict[str, list[str]] = {
            i: image_terms(img) for i, img in self.images.items()
        }
        self.doc_vectors: dict[str, dict[str, float]] = {
            i: tfidf.doc_vector(terms) for i, terms in self.terms_map.items()
        }

    @property
    def visual_space(self) -> str:
        return "embedding" if self.embeddings else "histogram"

    def visual_vector(self, image_id: str) -> np.ndarray | None:
        if self.embeddings:
            return self.embeddings.get(image_id)
        return self.histograms.get(image_id)

    def find_cue(self, cue_id: str, image_id: str | None = None):
        """Locate a cue, scoped to one image when an image id is given."""
        if image_id is not None:
            img = self.images.get(image_id)
            if img is None:
                return None
            cue = img.cue_by_id(cue_id)
            return (img, cue) if cue is not None else None
        for img in self.images.values():
            cue = img.cue_by_id(cue_id)
            if cue is not None:
                return img, cue
        return None

    def categories(self) -> set[str]:
        return {img.category for img in self.images.values() if img.category is not None}

    def feature_matrix(self) -> tuple[np.ndarray, tuple[str, ...]]:
        missing = [i for i in self.order if i not in self.feature_vectors]
        if missing:
            raise InvalidInputError(f"no feature vectors for: {', '.join(missing)}")
        return np.stack([self.feature_vectors[i] for i in self.order]), self.order

    def label_vector(self) -> np.ndarray:
        missing = [i for i in self.order if self.images[i].label is None]
        if missing:
            raise InvalidInputError(f"unlabeled images: {', '.join(missing)}")
        return np.array([self.images[i].label for i in self.order], dtype=np.int64)

    def docs(self) -> list[list[str]]:
        return [self.terms_map[i] for i in self.order]

    def attach_embeddings(self, path) -> list[str]:
        vectors, unknown = load_embeddings(path, known_ids=self.images)
        self.embeddings = vectors
        return unknown

    @classmethod
    def build(cls, manifest: CorpusManifest, base_dir=None, config: StoreConfig = StoreConfig()):
        """Compute histograms and feature vectors from the image files on disk."""
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        ordered = sorted(manifest.images, key=lambda i: i.id)
        rasters: dict[str, np.ndarray] = {}
        missing = []
        for img in ordered:
            path = Path(img.uri)
            if not path.is_absolute():
                path = base / path
            if not path.exists():
                missing.append(img.id)
                continue
            with Image.open(path) as im:
                rasters[img.id] = np.asarray(im.convert("RGB"))
        if missing:
            raise InvalidInputError(f"image files missing for: {', '.join(missing)}")
        return cls.from_images(list(manifest.images), rasters, config, corpus=manifest.corpus)

    @classmethod
    def from_images(
        cls,
        images: list[ImageDoc],
        rasters: dict[str, np.ndarray] | None = None,
        config: StoreConfig = StoreConfig(),
        corpus: str = "memory",
    ):
        """Assemble a store from in-memory images; rasters are optional."""
        if not images:
            raise InvalidInputError("a store requires at least one image")
        manifest = CorpusManifest(corpus=corpus, images=tuple(images))
        ordered = sorted(manifest.images, key=lambda i: i.id)
        if len({i.id for i in ordered}) != len(ordered):
            raise InvalidInputError("duplicate image ids in corpus")
        tfidf = build_tfidf([image_terms(img) for img in ordered])
        stats = CorpusStats(
            max_width=max(i.width for i in ordered),
            max_height=max(i.height for i in ordered),
            ids=frozenset(i.id for i in ordered),
        )
        histograms: dict[str, np.ndarray] = {}
        feature_vectors: dict[str, np.ndarray] = {}
        for img in ordered:
            raster = (rasters or {}).get(img.id)
            if raster is None:
                continue
            hist = extract_color_histogram(raster, config.bins_per_channel)
            histograms[img.id] = hist.bins
            feature_vectors[img.id] = image_feature_vector(
                img, tfidf, stats, hist, vocab_top_k=config.vocab_top_k
            )
        return cls(manifest, tfidf, histograms, feature_vectors, config)


def save_store(store: Store, path) -> None:
    """Persist a store directory; see the module docstring for the layout."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    save_manifest(store.manifest, path / "manifest.json")
    with open(path / "vocab.txt", "w", encoding="utf-8") as fh:
        for term in store.tfidf.vocabulary:
            fh.write(term + "\n")
    config_blob = json.dumps(store.config.to_dict(), sort_keys=True).encode("utf-8")
    ids = [i for i in store.order if i in store.feature_vectors]
    dim = store.feature_vectors[ids[0]].size if ids else 0
    hist_dim = store.histograms[ids[0]].size if ids else 0
    with open(path / "features.bin", "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", STORE_FORMAT_VERSION))
        fh.write(struct.pack("<I", len(config_blob)))
        fh.write(config_blob)
        fh.write(struct.pack("<III", len(ids), dim, hist_dim))
        for image_id in ids:
            raw = image_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(store.feature_vectors[image_id].astype("<f8").tobytes())
            fh.write(store.histograms[image_id].astype("<f8").tobytes())
    if store.embeddings:
        save_embeddings(path / "embeddings.tsv", store.embeddings)


def load_store(path) -> Store:
    """Load a persisted store; pixel files are not touched."""
    path = Path(path)
    if not path.is_dir():
        raise NotFoundError(f"store directory {path} does not exist")
    manifest = load_manifest(path / "manifest.json")

    bin_path = path / "features.bin"
    if not bin_path.exists():
        raise NotFoundError(f"store {path} has no features.bin")
    blob = bin_path.read_bytes()
    if blob[:4] != _MAGIC:
        raise SchemaError(["features.bin: bad magic bytes"])
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != STORE_FORMAT_VERSION:
        raise StoreVersionError(found=version, supported=STORE_FORMAT_VERSION)
    (config_len,) = struct.unpack_from("<I", blob, 8)
    offset = 12
    config = StoreConfig(**json.loads(blob[offset : offset + config_len].decode("utf-8")))
    offset += config_len
    count, dim, hist_dim = struct.unpack_from("<III", blob, offset)
    offset += 12
    feature_vectors: dict[str, np.ndarray] = {}
    histograms: dict[str, np.ndarray] = {}
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        image_id = blob[offset : offset + id_len].decode("utf-8")
        offset += id_len
        feature_vectors[image_id] = np.frombuffer(blob, "<f8", dim, offset).copy()
        offset += 8 * dim
        histograms[image_id] = np.frombuffer(blob, "<f8", hist_dim, offset).copy()
        offset += 8 * hist_dim

    ordered = sorted(manifest.images, key=lambda i: i.id)
    tfidf = build_tfidf([image_terms(img) for img in ordered])
    with open(path / "vocab.txt", "r", encoding="utf-8") as fh:
        vocab = tuple(line.rstrip("\n") for line in fh if line.rstrip("\n"))
    if vocab != tfidf.vocabulary:
        raise SchemaError(["vocab.txt does not match the vocabulary derived from manifest.json"])

    store = Store(manifest, tfidf, histograms, feature_vectors, config)
    sidecar = path / "embeddings.tsv"
    if sidecar.exists():
        store.attach_embeddings(sidecar)
    return store

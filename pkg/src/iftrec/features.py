"""Classical visual and textual feature extraction.

Visual features are joint RGB color histograms plus shape statistics; text
features are tf-idf weights over a cleaned keyword vocabulary. A precomputed
embedding sidecar (one `<image_id>\\t<v1>,<v2>,...` record per line) can stand
in for the histogram pathway when richer vectors are available.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .domain import ImageDoc
from .errors import InvalidInputError, SchemaError

# Fixed list so text cleaning is reproducible bit-exactly across machines.
STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    me more most my myself no nor not now of off on once only or other our
    ours ourselves out over own same she should so some such than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why will with would you your yours yourself yourselves
    """.split()
)

_TOKEN_CLEANER = re.compile(r"[^a-z0-9]+")


def tokenize_and_clean(text: str) -> list[str]:
    """Lowercase, strip punctuation, drop stopwords and one-character tokens."""
    if not text:
        return []
    words = _TOKEN_CLEANER.sub(" ", text.lower()).split()
    return [w for w in words if len(w) >= 2 and w not in STOPWORDS]


def image_terms(image: ImageDoc) -> list[str]:
    """All searchable terms of an image: cleaned title + description + cue terms."""
    terms = tokenize_and_clean(image.title)
    terms += tokenize_and_clean(image.description)
    for cue in image.cues:
        terms.extend(cue.terms)
    return terms


@dataclass(frozen=True)
class ColorHistogram:
    """L1-normalized joint RGB histogram with ``bins_per_channel**3`` entries."""

    bins: np.ndarray
    bins_per_channel: int


def extract_color_histogram(pixels, bins_per_channel: int = 4) -> ColorHistogram:
    """Joint RGB histogram of an HxWx3 raster, normalized to sum to 1."""
    if bins_per_channel < 1:
        raise InvalidInputError(f"bins_per_channel must be >= 1, got {bins_per_channel}")
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.size == 0:
        raise InvalidInputError("raster must be a non-empty HxWx3 RGB array")
    b = bins_per_channel
    bucketed = (arr.astype(np.int64) * b) // 256
    np.clip(bucketed, 0, b - 1, out=bucketed)
    flat = (bucketed[..., 0] * b + bucketed[..., 1]) * b + bucketed[..., 2]
    counts = np.bincount(flat.ravel(), minlength=b**3).astype(np.float64)
    return ColorHistogram(bins=counts / counts.sum(), bins_per_channel=b)


def extract_shape(image: ImageDoc) -> tuple[int, int, float]:
    """Width, height, and aspect ratio (width/height) of an image."""
    if image.width <= 0 or image.height <= 0:
        raise InvalidInputError(f"image {image.id!r} has non-positive dimensions")
    return image.width, image.height, image.width / image.height


@dataclass
class TfIdfModel:
    """Smoothed tf-idf weights over a fixed, alphabetically ordered vocabulary."""

    vocabulary: tuple[str, ...]
    doc_freq: dict[str, int]
    corpus_size: int
    _idf: dict[str, float] = field(init=False, repr=False)

    def __post_init__(self):
        n = self.corpus_size
        self._idf = {t: math.log((1 + n) / (1 + df)) + 1.0 for t, df in self.doc_freq.items()}

    def idf(self, term: str) -> float:
        return self._idf.get(term, 0.0)

    def vector(self, term_counts: Mapping[str, float]) -> dict[str, float]:
        """Sparse tf-idf vector; terms outside the vocabulary contribute nothing."""
        return {
            t: c * self._idf[t] for t, c in term_counts.items() if c > 0 and t in self._idf
        }

    def doc_vector(self, terms: Iterable[str]) -> dict[str, float]:
        return self.vector(Counter(terms))

    @staticmethod
    def cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
        """Cosine similarity of sparse vectors; 0 when either vector is zero."""
        nu = math.sqrt(sum(x * x for x in u.values()))
        nv = math.sqrt(sum(x * x for x in v.values()))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        if len(u) > len(v):
            u, v = v, u
        dot = sum(x * v.get(t, 0.0) for t, x in u.items())
        return dot / (nu * nv)


def build_tfidf(docs: list[list[str]]) -> TfIdfModel:
    """Fit document frequencies over term-list documents.

    idf(t) = ln((1+N)/(1+df(t))) + 1, so terms present in every document still
    carry weight 1 and unseen terms never divide by zero.
    """
    if not docs:
        raise InvalidInputError("tf-idf requires at least one document")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc))
    vocab = tuple(sorted(df))
    return TfIdfModel(vocabulary=vocab, doc_freq=dict(df), corpus_size=len(docs))


def top_terms(tfidf: TfIdfModel, k: int) -> tuple[str, ...]:
    """The k corpus-level terms with highest document frequency, in vocabulary order."""
    ranked = sorted(tfidf.doc_freq.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return tuple(sorted(t for t, _ in ranked))


@dataclass(frozen=True)
class CorpusStats:
    """Per-corpus normalizers for shape features."""

    max_width: int
    max_height: int
    ids: frozenset[str]


def image_feature_vector(
    image: ImageDoc,
    tfidf: TfIdfModel,
    stats: CorpusStats,
    histogram: ColorHistogram,
    vocab_top_k: int = 32,
) -> np.ndarray:
    """Concatenated feature vector: normalized shape, color histogram, top-K tf-idf.

    Width and height are normalized by the corpus maxima; the tf-idf block holds
    this image's weights for the corpus-level top-K terms in vocabulary order.
    """
    if image.id not in stats.ids:
        raise InvalidInputError(f"image {image.id!r} is not part of the corpus statistics")
    w, h, aspect = extract_shape(image)
    tvec = tfidf.doc_vector(image_terms(image))
    block = [tvec.get(t, 0.0) for t in top_terms(tfidf, vocab_top_k)]
    head = [w / stats.max_width, h / stats.max_height, aspect]
    return np.concatenate([head, histogram.bins, block])


def load_embeddings(
    path, known_ids: Iterable[str] | None = None
) -> tuple[dict[str, np.ndarray], list[str]]:
    """Load an embedding sidecar file.

    Returns the id -> vector map and, when ``known_ids`` is given, the list of
    row ids that do not belong to the corpus (those rows are dropped).
    """
    known = None if known_ids is None else set(known_ids)
    vectors: dict[str, np.ndarray] = {}
    unknown: list[str] = []
    dim: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise SchemaError([f"line {lineno}: expected '<id>\\t<v1>,<v2>,...'"])
            image_id, payload = parts
            try:
                vec = np.array([float(x) for x in payload.split(",")], dtype=np.float64)
            except ValueError:
                raise SchemaError([f"line {lineno}: non-numeric embedding entry"]) from None
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise SchemaError(
                    [f"line {lineno}: dimension {vec.size} does not match {dim}"]
                )
            if known is not None and image_id not in known:
                unknown.append(image_id)
                continue
            vectors[image_id] = vec
    return vectors, unknown


def save_embeddings(path, vectors: Mapping[str, np.ndarray]) -> None:
    """Write an embedding sidecar; float repr round-trips bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for image_id in sorted(vectors):
            row = ",".join(repr(float(x)) for x in vectors[image_id])
            fh.write(f"{image_id}\t{row}\n")

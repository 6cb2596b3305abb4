"""Search, similar-item retrieval, scent re-ranking, and preference options."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import InvalidInputError, NotFoundError
from .features import TfIdfModel, tokenize_and_clean
from .scent import (
    DEFAULT_SCENT,
    ScentConfig,
    ScentScore,
    SessionProfile,
    embedding_similarity,
    histogram_similarity,
    score_image,
)


@dataclass(frozen=True)
class RankedItem:
    image_id: str
    score: float
    scent: ScentScore | None = None
    matched_cues: tuple[str, ...] = ()


def _sorted_items(items: list[RankedItem]) -> list[RankedItem]:
    return sorted(items, key=lambda it: (-it.score, it.image_id))


def _matching_cues(image, terms: set[str]) -> tuple[str, ...]:
    return tuple(c.id for c in image.cues if terms.intersection(c.terms))


def search(query: str, store, k: int) -> list[RankedItem]:
    """Top-k images by tf-idf cosine against the cleaned query; zero scores excluded."""
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    terms = tokenize_and_clean(query)
    if not terms:
        raise InvalidInputError("query is empty after cleaning", field="query")
    qvec = store.tfidf.doc_vector(terms)
    term_set = set(terms)
    hits = []
    for image_id in store.order:
        score = TfIdfModel.cosine(qvec, store.doc_vectors[image_id])
        if score > 0.0:
            hits.append(
                RankedItem(
                    image_id=image_id,
                    score=score,
                    matched_cues=_matching_cues(store.images[image_id], term_set),
                )
            )
    return _sorted_items(hits)[:k]


def _visual_similarity(store, a: str, b: str) -> float | None:
    va, vb = store.visual_vector(a), store.visual_vector(b)
    if va is None or vb is None:
        return None
    if store.visual_space == "embedding":
        return embedding_similarity(va, vb)
    return histogram_similarity(va, vb)


def similar_images(seed_id: str, store, k: int) -> list[RankedItem]:
    """Items most similar to a seed: half text cosine, half visual similarity."""
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if seed_id not in store.images:
        raise NotFoundError(f"unknown image id {seed_id!r}")
    seed_vec = store.doc_vectors[seed_id]
    seed_terms = set(store.terms_map[seed_id])
    items = []
    for image_id in store.order:
        if image_id == seed_id:
            continue
        text = TfIdfModel.cosine(seed_vec, store.doc_vectors[image_id])
        visual = _visual_similarity(store, seed_id, image_id)
        score = text if visual is None else 0.5 * text + 0.5 * visual
        items.append(
            RankedItem(
                image_id=image_id,
                score=score,
                matched_cues=_matching_cues(store.images[image_id], seed_terms),
            )
        )
    return _sorted_items(items)[:k]


def rank_by_scent(
    candidates: list[str],
    profile: SessionProfile,
    store,
    config: ScentConfig = DEFAULT_SCENT,
) -> list[RankedItem]:
    """Candidates ordered by discounted scent at the profile's current iteration."""
    unknown = [c for c in candidates if c not in store.images]
    if unknown:
        raise InvalidInputError(f"unknown candidate ids: {', '.join(unknown)}")
    profile_terms = set(profile.term_weights)
    items = []
    for image_id in candidates:
        image = store.images[image_id]
        sc = score_image(profile, image, store, config)
        items.append(
            RankedItem(
                image_id=image_id,
                score=sc.discounted,
                scent=sc,
                matched_cues=_matching_cues(image, profile_terms),
            )
        )
    return _sorted_items(items)


def preference_options(
    results: list[RankedItem], store, m: int, exclude=()
) -> list[str]:
    """The m most frequent cue terms across result items, ties alphabetical.

    Terms in ``exclude`` (typically the session's query terms) are skipped so
    options always move the session somewhere new.
    """
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}")
    skip = set(exclude)
    counts: Counter[str] = Counter()
    for item in results:
        image = store.images.get(item.image_id)
        if image is None:
            continue
        for cue in image.cues:
            counts.update(t for t in cue.terms if t not in skip)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [t for t, _ in ranked[:m]]

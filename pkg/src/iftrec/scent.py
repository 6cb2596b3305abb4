"""Information scent scoring from implicit session feedback.

A session profile accumulates term weights and a visual centroid from clicks,
examinations, and preference picks. Scent for an image is a convex combination
of text cosine similarity and visual similarity, discounted geometrically per
completed preference-refinement round; consumed scent accumulates as the diet.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .domain import ImageDoc, InteractionEvent
from .errors import InvalidInputError, NotFoundError
from .features import TfIdfModel, image_terms, tokenize_and_clean


@dataclass(frozen=True)
class ScentConfig:
    """Tunable scent parameters; surfaced as scent.* config keys."""

    text_weight: float = 0.5
    visual_weight: float = 0.5
    gamma: float = 0.85
    kappa: float = 0.05
    examine_weight: float = 0.5
    click_weight: float = 1.0

    def __post_init__(self):
        if self.text_weight < 0 or self.visual_weight < 0:
            raise InvalidInputError("scent weights must be non-negative")
        if self.text_weight + self.visual_weight <= 0.0:
            raise InvalidInputError("at least one scent weight must be positive")
        if not (0.0 < self.gamma <= 1.0):
            raise InvalidInputError(f"gamma must be in (0,1], got {self.gamma}")
        if self.kappa < 0:
            raise InvalidInputError(f"kappa must be >= 0, got {self.kappa}")


DEFAULT_SCENT = ScentConfig()


@dataclass(frozen=True)
class ScentScore:
    raw: float
    discounted: float
    text_component: float
    visual_component: float
    iteration_at_scoring: int


@dataclass
class SessionProfile:
    """Accumulated implicit-feedback state for one search session."""

    term_weights: dict[str, float] = field(default_factory=dict)
    visual_centroid: np.ndarray | None = None
    centroid_count: int = 0
    iteration: int = 0
    diet_total: float = 0.0
    consumed: list[tuple[str, float]] = field(default_factory=list)
    events: list[InteractionEvent] = field(default_factory=list)

    @classmethod
    def from_query(cls, query: str) -> "SessionProfile":
        """Fresh profile seeded with the cleaned query terms."""
        counts = Counter(tokenize_and_clean(query))
        return cls(term_weights={t: float(c) for t, c in counts.items()})

    def add_terms(self, terms, weight: float) -> None:
        for term in terms:
            self.term_weights[term] = self.term_weights.get(term, 0.0) + weight

    def blend_visual(self, vec: np.ndarray) -> None:
        """Running mean over visually-interacted images."""
        if self.visual_centroid is None:
            self.visual_centroid = np.array(vec, dtype=np.float64)
            self.centroid_count = 1
        else:
            n = self.centroid_count + 1
            self.visual_centroid = self.visual_centroid + (vec - self.visual_centroid) / n
            self.centroid_count = n


def histogram_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """1 - half the L1 distance; equals 1 iff two L1-normalized histograms match."""
    sim = 1.0 - 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())
    return min(1.0, max(0.0, sim))


def embedding_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity clamped to [0,1]."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(a, b)) / (na * nb)))


def raw_scent(
    profile: SessionProfile,
    image: ImageDoc,
    tfidf: TfIdfModel,
    image_visual: np.ndarray | None = None,
    visual_space: str = "histogram",
    config: ScentConfig = DEFAULT_SCENT,
) -> ScentScore:
    """Score an image against the profile without iteration discounting.

    The text component is the tf-idf cosine between profile term weights and
    the image's terms; the visual component compares the profile centroid with
    ``image_visual`` in the given space. When either visual side is undefined
    the weights renormalize to text only.
    """
    text = TfIdfModel.cosine(tfidf.vector(profile.term_weights), tfidf.doc_vector(image_terms(image)))
    text = min(1.0, max(0.0, text))

    visual = 0.0
    visual_defined = profile.visual_centroid is not None and image_visual is not None
    if visual_defined:
        if visual_space == "embedding":
            visual = embedding_similarity(profile.visual_centroid, image_visual)
        else:
            visual = histogram_similarity(profile.visual_centroid, image_visual)

    w_t, w_v = config.text_weight, config.visual_weight
    if not visual_defined:
        w_t, w_v = w_t + w_v, 0.0
    total = w_t + w_v
    raw = (w_t * text + w_v * visual) / total
    raw = min(1.0, max(0.0, raw))
    disc = discounted_scent(raw, profile.iteration, config.gamma)
    return ScentScore(
        raw=raw,
        discounted=disc,
        text_component=text,
        visual_component=visual,
        iteration_at_scoring=profile.iteration,
    )


def discounted_scent(raw: float, iteration: int, gamma: float) -> float:
    """Diminishing-returns discount: raw * gamma**iteration."""
    if not (0.0 <= raw <= 1.0):
        raise InvalidInputError(f"raw scent must be in [0,1], got {raw}")
    if not (0.0 < gamma <= 1.0):
        raise InvalidInputError(f"gamma must be in (0,1], got {gamma}")
    if iteration < 0:
        raise InvalidInputError(f"iteration must be >= 0, got {iteration}")
    return raw * gamma**iteration


def access_cost(rank: int, kappa: float = DEFAULT_SCENT.kappa) -> float:
    """Rank-depth effort proxy: kappa * log2(1 + rank). Reporting only, never ranking."""
    if rank < 1:
        raise InvalidInputError(f"rank must be >= 1, got {rank}")
    if kappa < 0:
        raise InvalidInputError(f"kappa must be >= 0, got {kappa}")
    return kappa * math.log2(1 + rank)


def diet_total(profile: SessionProfile) -> float:
    """Cumulative discounted scent of everything the session consumed."""
    return profile.diet_total


def update_profile(
    profile: SessionProfile,
    event: InteractionEvent,
    store,
    config: ScentConfig = DEFAULT_SCENT,
) -> SessionProfile:
    """Fold one interaction event into the profile.

    cue_click adds the cue's terms and blends the owning image's visual vector
    into the centroid; examine adds title terms at reduced weight;
    preference_select adds the term and completes a refinement round;
    image_select consumes the image at its current discounted scent; skip is
    logged only. Unknown ids reject the event with the profile unchanged.
    """
    if event.kind == "cue_click":
        found = store.find_cue(event.cue_id, event.image_id)
        if found is None:
            raise NotFoundError(f"unknown cue id {event.cue_id!r}")
        owner, cue = found
        profile.add_terms(cue.terms, config.click_weight)
        vec = store.visual_vector(owner.id)
        if vec is not None:
            profile.blend_visual(vec)
    elif event.kind == "examine":
        image = store.images.get(event.image_id)
        if image is None:
            raise NotFoundError(f"unknown image id {event.image_id!r}")
        profile.add_terms(tokenize_and_clean(image.title), config.examine_weight)
    elif event.kind == "preference_select":
        profile.add_terms([event.term], config.click_weight)
        profile.iteration += 1
    elif event.kind == "image_select":
        image = store.images.get(event.image_id)
        if image is None:
            raise NotFoundError(f"unknown image id {event.image_id!r}")
        score = score_image(profile, image, store, config)
        profile.consumed.append((image.id, score.discounted))
        profile.diet_total += score.discounted
    elif event.kind == "skip":
        if event.image_id is not None and event.image_id not in store.images:
            raise NotFoundError(f"unknown image id {event.image_id!r}")
    profile.events.append(event)
    return profile


def score_image(
    profile: SessionProfile, image: ImageDoc, store, config: ScentConfig = DEFAULT_SCENT
) -> ScentScore:
    """raw_scent against a store, using its visual space (histogram or embedding)."""
    return raw_scent(
        profile,
        image,
        store.tfidf,
        image_visual=store.visual_vector(image.id),
        visual_space=store.visual_space,
        config=config,
    )


def averaged_scent_ranking(
    runs: list[dict[str, float]],
) -> tuple[list[str], list[str]]:
    """Split images by mean discounted scent over the runs that surfaced them.

    The full list is ordered by descending mean (ties by id); images at or
    above the median mean are "interesting", the rest "uninteresting".
    """
    if not runs:
        raise InvalidInputError("averaging requires at least one run")
    totals: dict[str, float] = {}
    appearances: dict[str, int] = {}
    for run in runs:
        for image_id, scent in run.items():
            totals[image_id] = totals.get(image_id, 0.0) + scent
            appearances[image_id] = appearances.get(image_id, 0) + 1
    if not totals:
        return [], []
    means = {i: totals[i] / appearances[i] for i in totals}
    order = sorted(means, key=lambda i: (-means[i], i))
    cut = median(means.values())
    interesting = [i for i in order if means[i] >= cut]
    uninteresting = [i for i in order if means[i] < cut]
    return interesting, uninteresting

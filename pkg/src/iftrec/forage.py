"""Simulated foragers: policy-driven navigation over the recommender.

Each run starts a session seeded with a query and walks up to ``max_iters``
rounds. Per round the candidate pool is re-ranked by discounted scent; the
scent-greedy policy clicks the strongest cue and selects the top item when its
category matches the target, otherwise it refines via the top preference
option. The random policy clicks a uniformly random cue and selects a
uniformly random surfaced item. Runs are fully determined by their seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .domain import InteractionEvent
from .errors import InvalidInputError
from .features import TfIdfModel, tokenize_and_clean
from .recommend import RankedItem, preference_options, rank_by_scent, search
from .scent import (
    DEFAULT_SCENT,
    ScentConfig,
    SessionProfile,
    access_cost,
    averaged_scent_ranking,
    update_profile,
)

POLICY_KINDS = ("scent_greedy", "random")

# Queries used when a batch is run without explicit tasks.
DEFAULT_TASK_QUERIES = ("noodle", "spaghetti bolognese", "painting", "sketches", "landscape")


@dataclass(frozen=True)
class ForagerPolicy:
    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise InvalidInputError(f"unknown policy kind {self.kind!r}")


@dataclass
class IterationRecord:
    iteration: int
    surfaced: tuple[tuple[str, float], ...]
    clicked_cue: str | None = None
    selected: str | None = None
    preference: str | None = None


@dataclass
class Trajectory:
    steps: list[tuple[int, str, str | None, float | None]] = field(default_factory=list)
    iterations: list[IterationRecord] = field(default_factory=list)
    success: bool = False
    steps_to_target: int | None = None
    diet_total: float = 0.0
    utility_total: float = 0.0
    scent_by_image: dict[str, float] = field(default_factory=dict)


def _cue_candidates(ranked: list[RankedItem], store) -> list[tuple[str, str]]:
    """(cue id, owning image id) pairs across surfaced items, presentation order."""
    pairs = []
    for item in ranked:
        for cue in store.images[item.image_id].cues:
            pairs.append((cue.id, item.image_id))
    return pairs


def _cue_text_score(profile: SessionProfile, cue_terms, tfidf: TfIdfModel) -> float:
    return TfIdfModel.cosine(
        tfidf.vector(profile.term_weights), tfidf.doc_vector(list(cue_terms))
    )


def simulate_forager(
    policy: ForagerPolicy,
    store,
    query: str,
    target_category: str,
    max_iters: int = 10,
    k: int = 20,
    n_preferences: int = 5,
    config: ScentConfig = DEFAULT_SCENT,
) -> Trajectory:
    """Run one foraging session; deterministic for a fixed (policy, store, config)."""
    if max_iters < 0:
        raise InvalidInputError(f"max_iters must be >= 0, got {max_iters}")
    if target_category not in store.categories():
        raise InvalidInputError(f"target category {target_category!r} not present in corpus")

    rng = np.random.default_rng(policy.seed)
    profile = SessionProfile.from_query(query)
    query_terms = set(profile.term_weights)
    pool = [item.image_id for item in search(query, store, k)]
    tried_preferences: set[str] = set()
    traj = Trajectory()

    for it in range(1, max_iters + 1):
        if not pool:
            break
        ranked = rank_by_scent(pool, profile, store, config)
        record = IterationRecord(
            iteration=it, surfaced=tuple((r.image_id, r.score) for r in ranked)
        )
        for r in ranked:
            traj.scent_by_image[r.image_id] = r.score
        traj.steps.append((it, "rank", None, None))

        cues = _cue_candidates(ranked, store)
        if cues:
            if policy.kind == "scent_greedy":
                scored = [
                    (-_cue_text_score(profile, store.find_cue(c, img)[1].terms, store.tfidf), c, img)
                    for c, img in cues
                ]
                scored.sort()
                _, cue_id, owner_id = scored[0]
            else:
                cue_id, owner_id = cues[int(rng.integers(0, len(cues)))]
            update_profile(
                profile,
                InteractionEvent(kind="cue_click", cue_id=cue_id, image_id=owner_id, seq=len(profile.events)),
                store,
                config,
            )
            record.clicked_cue = cue_id
            traj.steps.append((it, "cue_click", owner_id, None))

        if policy.kind == "scent_greedy":
            chosen = ranked[0] if store.images[ranked[0].image_id].category == target_category else None
            rank_position = 1
        else:
            rank_position = int(rng.integers(0, len(ranked))) + 1
            chosen = ranked[rank_position - 1]

        if chosen is not None:
            update_profile(
                profile,
                InteractionEvent(kind="image_select", image_id=chosen.image_id, seq=len(profile.events)),
                store,
                config,
            )
            consumed = profile.consumed[-1][1]
            # utility = gained scent minus rank-depth access cost; never re-ranks
            traj.utility_total += consumed - access_cost(rank_position, config.kappa)
            record.selected = chosen.image_id
            traj.steps.append((it, "image_select", chosen.image_id, consumed))
            traj.iterations.append(record)
            if store.images[chosen.image_id].category == target_category:
                traj.success = True
                traj.steps_to_target = it
                break
            continue

        # Greedy miss: refine through the strongest untried preference option.
        options = preference_options(
            ranked, store, n_preferences, exclude=query_terms | tried_preferences
        )
        if options:
            term = options[0]
            tried_preferences.add(term)
            update_profile(
                profile,
                InteractionEvent(kind="preference_select", term=term, seq=len(profile.events)),
                store,
                config,
            )
            record.preference = term
            traj.steps.append((it, "preference_select", None, None))
            if tokenize_and_clean(term):
                for item in search(term, store, k):
                    if item.image_id not in pool:
                        pool.append(item.image_id)
        traj.iterations.append(record)

    traj.diet_total = profile.diet_total
    return traj


def sign_test_p_value(wins: int, losses: int) -> float:
    """One-sided exact sign test: P(X >= wins) for X ~ Binomial(wins+losses, 1/2)."""
    n = wins + losses
    if n == 0:
        return 1.0
    tail = sum(math.comb(n, i) for i in range(wins, n + 1))
    return tail / 2.0**n


def run_batch(
    policy: ForagerPolicy,
    store,
    tasks: list[tuple[str, str]] | None,
    runs_per_task: int,
    seed: int = 0,
    max_iters: int = 10,
    k: int = 20,
    config: ScentConfig = DEFAULT_SCENT,
) -> dict:
    """Aggregate many runs into the batch report (schema documented in README).

    Run r of the batch uses policy seed ``seed + r``; failed runs count as
    ``max_iters + 1`` steps in the median.
    """
    if runs_per_task < 1:
        raise InvalidInputError(f"runs_per_task must be >= 1, got {runs_per_task}")
    if tasks is None:
        tasks = [(q, q) for q in DEFAULT_TASK_QUERIES if q in store.categories()]
    if not tasks:
        raise InvalidInputError("no tasks to run")

    run_index = 0
    task_rows = []
    all_runs: list[dict[str, float]] = []
    for query, target in tasks:
        steps: list[int] = []
        diets: list[float] = []
        utilities: list[float] = []
        successes = 0
        for _ in range(runs_per_task):
            traj = simulate_forager(
                ForagerPolicy(kind=policy.kind, seed=seed + run_index),
                store,
                query,
                target,
                max_iters=max_iters,
                k=k,
                config=config,
            )
            run_index += 1
            successes += int(traj.success)
            steps.append(traj.steps_to_target if traj.success else max_iters + 1)
            diets.append(traj.diet_total)
            utilities.append(traj.utility_total)
            all_runs.append(dict(traj.scent_by_image))
        task_rows.append(
            {
                "query": query,
                "target": target,
                "success_rate": successes / runs_per_task,
                "median_steps": float(median(steps)),
                "mean_diet": float(np.mean(diets)),
                "mean_utility": float(np.mean(utilities)),
            }
        )
    interesting, uninteresting = averaged_scent_ranking(all_runs)
    return {
        "policy": policy.kind,
        "tasks": task_rows,
        "interesting": interesting,
        "uninteresting": uninteresting,
        "seed": seed,
        "config": {
            "runs_per_task": runs_per_task,
            "max_iters": max_iters,
            "k": k,
            "scent.text_weight": config.text_weight,
            "scent.visual_weight": config.visual_weight,
            "scent.gamma": config.gamma,
            "scent.kappa": config.kappa,
        },
    }

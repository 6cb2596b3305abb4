"""Content-based image recommendation driven by information scent."""

from .domain import (
    Cue,
    ImageDoc,
    InteractionEvent,
    InterestLabel,
    Patch,
    UserImageCueGraph,
    build_graph,
    cue_trail,
)
from .ingest import CorpusManifest, Store, load_manifest, load_store, save_store
from .recommend import RankedItem, preference_options, rank_by_scent, search, similar_images
from .scent import (
    ScentConfig,
    ScentScore,
    SessionProfile,
    access_cost,
    averaged_scent_ranking,
    diet_total,
    discounted_scent,
    raw_scent,
    update_profile,
)

__version__ = "0.1.0"

__all__ = [
    "Cue",
    "ImageDoc",
    "InteractionEvent",
    "InterestLabel",
    "Patch",
    "UserImageCueGraph",
    "build_graph",
    "cue_trail",
    "CorpusManifest",
    "Store",
    "load_manifest",
    "load_store",
    "save_store",
    "RankedItem",
    "preference_options",
    "rank_by_scent",
    "search",
    "similar_images",
    "ScentConfig",
    "ScentScore",
    "SessionProfile",
    "access_cost",
    "averaged_scent_ranking",
    "diet_total",
    "discounted_scent",
    "raw_scent",
    "update_profile",
    "__version__",
]

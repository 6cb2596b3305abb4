"""Core domain types and the user/image/cue interaction graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from .errors import InvalidInputError, NotFoundError

CUE_KINDS = ("visual", "text", "bookmark")
EVENT_KINDS = ("cue_click", "preference_select", "image_select", "skip", "examine")


class InterestLabel(IntEnum):
    UNINTERESTED = 0
    INTERESTED = 1


@dataclass(frozen=True)
class Patch:
    """Rectangular region inside an image, pixels from the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InvalidInputError(f"patch size must be positive, got {self.w}x{self.h}")
        if self.x < 0 or self.y < 0:
            raise InvalidInputError(f"patch origin must be non-negative, got ({self.x},{self.y})")

    def as_bbox(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class Cue:
    """A proximal cue attached to an image: a visual region, keywords, or a bookmark tag."""

    id: str
    kind: str
    terms: tuple[str, ...] = ()
    region: Patch | None = None

    def __post_init__(self):
        if self.kind not in CUE_KINDS:
            raise InvalidInputError(f"cue {self.id!r}: unknown kind {self.kind!r}")
        if self.kind == "visual" and self.region is None:
            raise InvalidInputError(f"cue {self.id!r}: visual cues require a region")
        if self.kind != "visual" and self.region is not None:
            raise InvalidInputError(f"cue {self.id!r}: only visual cues carry a region")
        if self.kind in ("text", "bookmark") and not self.terms:
            raise InvalidInputError(f"cue {self.id!r}: {self.kind} cues require terms")
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class ImageDoc:
    """An image record: locator, dimensions, text metadata, and attached cues."""

    id: str
    uri: str
    width: int
    height: int
    title: str = ""
    description: str = ""
    category: str | None = None
    label: int | None = None
    cues: tuple[Cue, ...] = ()

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidInputError(
                f"image {self.id!r}: dimensions must be positive, got {self.width}x{self.height}"
            )
        if self.label is not None and self.label not in (0, 1):
            raise InvalidInputError(f"image {self.id!r}: label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "cues", tuple(self.cues))
        seen = set()
        for cue in self.cues:
            if cue.id in seen:
                raise InvalidInputError(f"image {self.id!r}: duplicate cue id {cue.id!r}")
            seen.add(cue.id)
            if cue.region is not None:
                r = cue.region
                if r.x + r.w > self.width or r.y + r.h > self.height:
                    raise InvalidInputError(
                        f"image {self.id!r}: cue {cue.id!r} region exceeds image bounds"
                    )

    def cue_by_id(self, cue_id: str) -> Cue | None:
        for cue in self.cues:
            if cue.id == cue_id:
                return cue
        return None


@dataclass(frozen=True)
class InteractionEvent:
    """One observed behaviour in a session: click, examine, select, skip, or preference."""

    kind: str
    user: str | None = None
    image_id: str | None = None
    cue_id: str | None = None
    term: str | None = None
    seq: int = 0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise InvalidInputError(f"unknown event kind {self.kind!r}")
        if self.kind == "cue_click" and self.cue_id is None:
            raise InvalidInputError("cue_click events require a cue_id", field="cue_id")
        if self.kind == "preference_select" and not self.term:
            raise InvalidInputError("preference_select events require a term", field="term")
        if self.kind in ("image_select", "examine") and self.image_id is None:
            raise InvalidInputError(f"{self.kind} events require an image_id", field="image_id")


@dataclass(frozen=True)
class UserImageCueGraph:
    """Weighted undirected interaction graph over user, image, and cue nodes.

    Edges fall into three classes: user-cue weights count cue clicks, user-image
    weights count image selections, and cue-image edges record cue attachment.
    """

    users: frozenset[str]
    images: frozenset[str]
    cues: frozenset[str]
    user_cue: dict[tuple[str, str], float]
    user_image: dict[tuple[str, str], float]
    cue_image: dict[tuple[str, str], float]

    def node_count(self) -> int:
        return len(self.users) + len(self.images) + len(self.cues)

    def edge_count(self) -> int:
        return len(self.user_cue) + len(self.user_image) + len(self.cue_image)


def build_graph(images: list[ImageDoc], events: list[InteractionEvent]) -> UserImageCueGraph:
    """Build the interaction graph from a corpus and an event log.

    Every image and attached cue becomes a node with a cue-image attachment
    edge. Users are taken from events; edge weights are interaction counts.
    Events referencing unknown image or cue ids are rejected.
    """
    by_id: dict[str, ImageDoc] = {}
    for img in images:
        if img.id in by_id:
            raise InvalidInputError(f"duplicate image id {img.id!r} in corpus")
        by_id[img.id] = img

    cue_ids: set[str] = set()
    cue_image: dict[tuple[str, str], float] = {}
    for img in images:
        for cue in img.cues:
            cue_ids.add(cue.id)
            cue_image[(cue.id, img.id)] = 1.0

    users: set[str] = set()
    user_cue: dict[tuple[str, str], float] = {}
    user_image: dict[tuple[str, str], float] = {}
    for ev in events:
        if ev.user is None:
            raise InvalidInputError(f"event #{ev.seq} ({ev.kind}) has no user attribution")
        if ev.image_id is not None and ev.image_id not in by_id:
            raise InvalidInputError(f"event references unknown image id {ev.image_id!r}")
        if ev.cue_id is not None:
            if ev.image_id is not None:
                if by_id[ev.image_id].cue_by_id(ev.cue_id) is None:
                    raise InvalidInputError(
                        f"event references unknown cue id {ev.cue_id!r} on image {ev.image_id!r}"
                    )
            elif ev.cue_id not in cue_ids:
                raise InvalidInputError(f"event references unknown cue id {ev.cue_id!r}")
        users.add(ev.user)
        if ev.kind == "cue_click":
            key = (ev.user, ev.cue_id)
            user_cue[key] = user_cue.get(key, 0.0) + 1.0
        elif ev.kind == "image_select":
            key = (ev.user, ev.image_id)
            user_image[key] = user_image.get(key, 0.0) + 1.0

    return UserImageCueGraph(
        users=frozenset(users),
        images=frozenset(by_id),
        cues=frozenset(cue_ids),
        user_cue=user_cue,
        user_image=user_image,
        cue_image=cue_image,
    )


def cue_trail(graph: UserImageCueGraph, user: str) -> list[tuple[str, str]]:
    """Cue-image pairs reachable from a user via one user-cue hop then cue-image hops.

    Ordered by descending user-cue weight, then cue id and image id ascending.
    """
    if user not in graph.users:
        raise NotFoundError(f"unknown user {user!r}")
    pairs: list[tuple[float, str, str]] = []
    for (u, cue_id), weight in graph.user_cue.items():
        if u != user:
            continue
        for (c, image_id) in graph.cue_image:
            if c == cue_id:
                pairs.append((weight, cue_id, image_id))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    return [(cue_id, image_id) for _, cue_id, image_id in pairs]

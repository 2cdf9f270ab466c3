"""Bounding lists and the neighbourhood colour statistics S, Q, N*, D, E.

Colour sets are Python ints used as bitsets: colour ``c`` is bit ``1 << c``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvariantViolation

#: Readings of the disjoint-pair condition for ``w`` in N*(v): the other
#: lists are taken over ``N(v) - {w}`` (default) or literally over ``N(w) - {w}``.
PAIR_SCOPES = ("neighborhood", "literal")


def mask_of(colors: Iterable[int]) -> int:
    mask = 0
    for c in colors:
        mask |= 1 << c
    return mask


def colors_of(mask: int) -> list[int]:
    """Colours in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def only_color(mask: int) -> int:
    return mask.bit_length() - 1


def is_singleton(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def random_color(mask: int, rng) -> int:
    """Uniform colour from a non-empty set."""
    colors = colors_of(mask)
    return colors[rng.randrange(len(colors))]


def random_color_outside(mask: int, k: int, rng, tries: int = 32) -> int:
    """Uniform colour of ``{0..k-1}`` not in ``mask``.

    Rejection sampling first; if every try lands in ``mask`` the complement is
    enumerated. Either path yields the uniform law on the complement.
    """
    for _ in range(tries):
        c = rng.randrange(k)
        if not mask >> c & 1:
            return c
    rest = ((1 << k) - 1) & ~mask
    if not rest:
        raise ValueError("no colour outside the given set")
    return random_color(rest, rng)


def lowest_colors_outside(mask: int, count: int) -> int:
    """The ``count`` lowest-indexed colours not in ``mask``, as a mask."""
    out = 0
    c = 0
    while count > 0:
        if not mask >> c & 1:
            out |= 1 << c
            count -= 1
        c += 1
    return out


class BoundingList:
    """Per-vertex colour sets ``L(v)`` over the palette ``{0..k-1}``."""

    __slots__ = ("k", "masks")

    def __init__(self, k: int, masks: Sequence[int]):
        self.k = int(k)
        self.masks = list(masks)

    @classmethod
    def full(cls, n: int, k: int) -> "BoundingList":
        """The CFTP start state: every vertex may take every colour."""
        return cls(k, [(1 << k) - 1] * n)

    @classmethod
    def from_lists(cls, k: int, lists: Iterable[Iterable[int]]) -> "BoundingList":
        bl = cls(k, [mask_of(colors) for colors in lists])
        bl.validate()
        return bl

    def validate(self) -> None:
        top = (1 << self.k) - 1
        for v, mask in enumerate(self.masks):
            if mask == 0:
                raise ValueError(f"empty bounding set at vertex {v}")
            if mask & ~top:
                raise ValueError(f"bounding set at vertex {v} has colours >= k={self.k}")

    def __len__(self):
        return len(self.masks)

    def colors(self, v: int) -> list[int]:
        return colors_of(self.masks[v])

    def size(self, v: int) -> int:
        return self.masks[v].bit_count()

    def sizes(self) -> list[int]:
        return [m.bit_count() for m in self.masks]

    def copy(self) -> "BoundingList":
        return BoundingList(self.k, self.masks)

    def __eq__(self, other):
        return isinstance(other, BoundingList) and self.k == other.k and self.masks == other.masks

    def __repr__(self):
        return f"BoundingList(k={self.k}, lists={[colors_of(m) for m in self.masks]})"

    def to_dict(self) -> dict:
        return {"k": self.k, "lists": [colors_of(m) for m in self.masks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "BoundingList":
        return cls.from_lists(data["k"], data["lists"])


@dataclass(slots=True)
class NeighborhoodStats:
    """Colour sets seen from ``v`` through its neighbours' bounding sets.

    ``S`` is the union of the neighbour lists, ``Q`` the union of singleton
    lists, ``nstar`` the neighbours whose two-colour list meets no other
    neighbour list, ``D`` the union of those pairs and ``E = S - (Q | D)``.
    Sets are bitmasks; the capitalised ``n_*`` properties are cardinalities.
    """

    S: int
    Q: int
    D: int
    E: int
    nstar: tuple[int, ...]

    @property
    def n_S(self) -> int:
        return self.S.bit_count()

    @property
    def n_Q(self) -> int:
        return self.Q.bit_count()

    @property
    def n_D(self) -> int:
        return self.D.bit_count()

    @property
    def n_E(self) -> int:
        return self.E.bit_count()

    def counts(self) -> tuple[int, int, int, int]:
        return self.n_S, self.n_Q, self.n_D, self.n_E


def compute_stats(graph, L: BoundingList, v: int, pair_scope: str = "neighborhood") -> NeighborhoodStats:
    masks = L.masks
    nbrs = graph.adjacency[v]
    ms = [masks[w] for w in nbrs]
    S = Q = multi = 0
    for m in ms:
        multi |= S & m
        S |= m
        if not m & (m - 1):
            Q |= m
    D = 0
    if pair_scope == "neighborhood":
        # a pair is disjoint from every other list around v iff none of its
        # colours was seen twice
        nstar = [w for w, m in zip(nbrs, ms) if not m & multi and m.bit_count() == 2]
        for w in nstar:
            D |= masks[w]
        if Q & D or 2 * len(nstar) != D.bit_count():
            raise InvariantViolation(f"disjoint-pair bookkeeping broken at vertex {v}")
    elif pair_scope == "literal":
        adj = graph.adjacency
        nstar = [
            w for w, m in zip(nbrs, ms)
            if m.bit_count() == 2 and all(not masks[u] & m for u in adj[w])
        ]
        for w in nstar:
            D |= masks[w]
    else:
        raise ValueError(f"pair_scope must be one of {PAIR_SCOPES}")
    return NeighborhoodStats(S, Q, D, S & ~(Q | D), tuple(nstar))


def is_compatible(chi: Sequence[int], L: BoundingList) -> bool:
    """True iff ``chi(v)`` lies in ``L(v)`` for every vertex."""
    masks = L.masks
    return all(masks[v] >> c & 1 for v, c in enumerate(chi))


def all_singletons(L: BoundingList) -> bool:
    return all(m and m & (m - 1) == 0 for m in L.masks)

"""The compress, seeding and disjoint updates.

Each update has a ``gen`` half, which draws fresh randomness, rewrites the
bounding set at one vertex in place and returns a frozen :class:`UpdateRecord`,
and a ``decode`` half, which replays that record on any coloring compatible
with the pre-update bounding list. For a fixed coloring, decoding a freshly
generated record re-colours ``v`` uniformly among the colours absent from its
neighbourhood, i.e. it performs one exact Glauber step.
"""

from __future__ import annotations

import json
import random
from typing import Sequence

from .bounding import (
    BoundingList,
    colors_of,
    compute_stats,
    mask_of,
    random_color,
    random_color_outside,
)
from .errors import InvariantViolation, PromiseViolation

COMPRESS, SEEDING, DISJOINT = 1, 2, 3
KIND_NAMES = {COMPRESS: "compress", SEEDING: "seeding", DISJOINT: "disjoint"}

PAIR = "PAIR"
SINGLETON = "SINGLETON"
C2_FROM_D = "C2_FROM_D"
C2_FROM_E = "C2_FROM_E"

# slack for floating-point probability range checks
_EPS = 1e-9


class UpdateRecord:
    """One frozen update.

    Only the scalars decode needs are kept, not the full before/after lists:
    the vertex, ``tau``, the type ``gamma``, the colour sequence ``M``, the
    gen-time branch and neighbourhood counts, and the new bounding set at
    ``v`` (as a bitmask in ``new_list``).

    For compress records the permutation of ``A`` is stored as a seed and only
    materialised when ``M`` is first read.
    """

    __slots__ = (
        "v", "tau", "gamma", "k", "delta", "c1", "branch", "new_list",
        "S", "Q", "D", "E", "q", "p_delta", "_M", "_A", "_perm_seed",
    )

    def __init__(self, v, tau, gamma, k, delta, c1, new_list, *, M=None, branch=None,
                 S=None, Q=None, D=None, E=None, q=None, p_delta=None, A=None, perm_seed=None):
        self.v = v
        self.tau = tau
        self.gamma = gamma
        self.k = k
        self.delta = delta
        self.c1 = c1
        self.new_list = new_list
        self.branch = branch
        self.S, self.Q, self.D, self.E = S, Q, D, E
        self.q = q
        self.p_delta = p_delta
        self._M = M
        self._A = A
        self._perm_seed = perm_seed

    @property
    def M(self) -> tuple[int, ...]:
        if self._M is None:
            perm = colors_of(self._A)
            random.Random(self._perm_seed).shuffle(perm)
            self._M = tuple(perm) + (self.c1,)
        return self._M

    @property
    def kind(self) -> str:
        return KIND_NAMES[self.gamma]

    def stats(self) -> dict:
        out = {"k": self.k, "delta": self.delta}
        for name in ("S", "Q", "D", "E", "q", "p_delta"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "tau": self.tau,
            "gamma": self.gamma,
            "M": list(self.M),
            "branch": self.branch,
            "stats": self.stats(),
            "new_list": colors_of(self.new_list),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "UpdateRecord":
        st = dict(data["stats"])
        M = tuple(data["M"])
        gamma = data["gamma"]
        c1 = M[-1] if gamma == COMPRESS else M[0]
        rec = cls(
            data["v"], data["tau"], gamma, st.pop("k"), st.pop("delta"), c1,
            mask_of(data["new_list"]), M=M, branch=data.get("branch"), **st,
        )
        if gamma == COMPRESS:
            rec._A = mask_of(M[:-1])
        return rec

    def __repr__(self):
        return (f"UpdateRecord({self.kind}, v={self.v}, tau={self.tau:.4f}, "
                f"branch={self.branch}, new_list={colors_of(self.new_list)})")

    def check(self) -> None:
        """Raise InvariantViolation unless the per-type shape invariants hold."""
        M = self.M
        if not 0.0 <= self.tau <= 1.0:
            raise InvariantViolation(f"tau={self.tau} outside [0,1]")
        if self.gamma == COMPRESS:
            body = M[:-1]
            if len(M) != self.delta + 1 or len(set(body)) != len(body) or M[-1] in body:
                raise InvariantViolation(f"malformed compress colour sequence {M}")
        elif self.gamma == SEEDING:
            if self.branch == SINGLETON:
                if len(M) != 1:
                    raise InvariantViolation(f"isolated seeding record with M={M}")
            elif len(M) != 3:
                raise InvariantViolation(f"seeding record with M={M}")
        elif self.gamma == DISJOINT:
            if self.branch == SINGLETON and len(M) != 1:
                raise InvariantViolation(f"singleton disjoint record with M={M}")
            if self.branch != SINGLETON and len(M) != 2:
                raise InvariantViolation(f"two-colour disjoint record with M={M}")
        else:
            raise InvariantViolation(f"unknown update type {self.gamma}")
        if mask_of(M) != self.new_list:
            raise InvariantViolation(f"M={M} disagrees with new list {colors_of(self.new_list)}")


# -- compress ----------------------------------------------------------------


def compress_gen(graph, L: BoundingList, v: int, A, rng) -> UpdateRecord:
    """Set ``L(v) = A | {c1}`` with ``c1`` uniform outside ``A``.

    ``A`` is a colour iterable or a bitmask and must hold exactly
    ``graph.max_degree`` colours.
    """
    delta = graph.max_degree
    k = L.k
    a_mask = A if isinstance(A, int) else mask_of(A)
    if a_mask.bit_count() != delta:
        raise ValueError(f"|A| must equal max degree {delta}, got {a_mask.bit_count()}")
    if a_mask >> k:
        raise ValueError(f"A contains colours >= k={k}")
    if k < delta + 1:
        raise ValueError(f"compress needs k >= max degree + 1 (k={k}, delta={delta})")
    tau = rng.random()
    c1 = random_color_outside(a_mask, k, rng)
    new = a_mask | 1 << c1
    L.masks[v] = new
    return UpdateRecord(v, tau, COMPRESS, k, delta, c1, new, A=a_mask, perm_seed=rng.getrandbits(64))


def _compress_color(rec, nbr_colors):
    x = len(nbr_colors)
    p = (rec.k - rec.delta) / (rec.k - x)
    if not 0.0 <= p <= 1.0 + _EPS:
        raise InvariantViolation(f"compress p_chi={p} outside [0,1]")
    if rec.c1 not in nbr_colors and rec.tau <= p:
        return rec.c1
    for c in rec.M[:-1]:
        if c not in nbr_colors:
            return c
    raise InvariantViolation(f"compress fallback empty at vertex {rec.v}")


# -- seeding -----------------------------------------------------------------


def seeding_promise(n_s: int, k: int, delta: int) -> bool:
    """``|S|^2 / (delta + |S|) <= k - delta``, in exact integer arithmetic."""
    return n_s * n_s <= (k - delta) * (delta + n_s)


def seeding_gen(graph, L: BoundingList, v: int, rng) -> UpdateRecord:
    """Shrink ``L(v)`` to at most three colours: one outside S, two drawn from S."""
    delta = graph.max_degree
    k = L.k
    masks = L.masks
    S = 0
    for w in graph.adjacency[v]:
        S |= masks[w]
    n_s = S.bit_count()
    if not seeding_promise(n_s, k, delta):
        raise PromiseViolation(
            "seeding", "|S|^2/(delta+|S|) > k-delta", S=n_s, k=k, delta=delta
        )
    if n_s >= k:
        raise InvariantViolation(f"seeding with S covering all {k} colours")
    tau = rng.random()
    c1 = random_color_outside(S, k, rng)
    if n_s == 0:
        new = 1 << c1
        masks[v] = new
        return UpdateRecord(v, tau, SEEDING, k, delta, c1, new, M=(c1,), branch=SINGLETON, S=0)
    s_colors = colors_of(S)
    c2 = s_colors[rng.randrange(n_s)]
    c3 = s_colors[rng.randrange(n_s)]
    new = 1 << c1 | 1 << c2 | 1 << c3
    masks[v] = new
    return UpdateRecord(v, tau, SEEDING, k, delta, c1, new, M=(c1, c2, c3), S=n_s)


def _seeding_color(rec, nbr_colors):
    if rec.branch == SINGLETON:
        return rec.c1
    x = len(nbr_colors)
    n_s = rec.S
    p = n_s * n_s / ((rec.k - x) * (x + n_s))
    if not 0.0 <= p <= 1.0 + _EPS:
        raise InvariantViolation(f"seeding p_chi={p} outside [0,1]")
    c1, c2, c3 = rec.M
    if (c2 in nbr_colors and c3 in nbr_colors) or rec.tau > p:
        return c1
    if c2 not in nbr_colors:
        return c2
    return c3


# -- disjoint ----------------------------------------------------------------


def disjoint_promise(n_s: int, n_q: int, n_d: int, k: int, delta: int) -> bool:
    """``S - Q < (k - delta)(k - Q)/(k - Q - D/2)``, cleared of denominators."""
    return (n_s - n_q) * (2 * k - 2 * n_q - n_d) < (k - delta) * (2 * k - 2 * n_q)


def disjoint_probabilities(n_q, n_d, n_e, k, delta):
    """Return ``(q, p_delta)`` for the non-pair branch of the disjoint update."""
    rest = k - n_q - n_d
    q = 1.0 - (k - n_q - n_d / 2) * n_e / (rest * (k - delta))
    p_delta = (delta - n_q - n_d / 2) * n_d / ((k - delta) * rest * q)
    return q, p_delta


def singleton_probability(n_s, n_q, n_d, k, delta) -> float:
    """Closed-form chance that the disjoint update leaves a singleton at ``v``."""
    return 1 - (n_s - n_q) / (k - delta) + (n_d / 2) / (k - n_q - n_d / 2)


def disjoint_gen(graph, L: BoundingList, v: int, rng, pair_scope: str = "neighborhood") -> UpdateRecord:
    """Shrink ``L(v)`` to one or two colours, pairing the disjoint-pair colours."""
    delta = graph.max_degree
    k = L.k
    st = compute_stats(graph, L, v, pair_scope)
    n_s, n_q, n_d, n_e = st.counts()
    if not disjoint_promise(n_s, n_q, n_d, k, delta):
        raise PromiseViolation(
            "disjoint", "S-Q >= (k-delta)(k-Q)/(k-Q-D/2)",
            S=n_s, Q=n_q, D=n_d, E=n_e, k=k, delta=delta,
        )
    masks = L.masks
    tau = rng.random()
    rest = k - n_q - n_d
    if n_d and (rest == 0 or rng.random() > rest / (k - n_q - n_d / 2)):
        w = st.nstar[rng.randrange(len(st.nstar))]
        pair = masks[w]
        M = tuple(colors_of(pair))
        masks[v] = pair
        return UpdateRecord(v, tau, DISJOINT, k, delta, M[0], pair, M=M, branch=PAIR,
                            S=n_s, Q=n_q, D=n_d, E=n_e)

    q, p_delta = disjoint_probabilities(n_q, n_d, n_e, k, delta)
    if not (0.0 < q <= 1.0 + _EPS and -_EPS <= p_delta <= 1.0 + _EPS):
        raise InvariantViolation(f"disjoint gen probabilities q={q}, p_delta={p_delta}")
    c1 = random_color_outside(st.S, k, rng)
    if n_e == 0 or rng.random() <= q:
        if n_d == 0 or rng.random() > p_delta:
            branch, M = SINGLETON, (c1,)
        else:
            # uniform over D: uniform pair, then uniform colour within it
            pair = colors_of(masks[st.nstar[rng.randrange(len(st.nstar))]])
            branch, M = C2_FROM_D, (c1, pair[rng.randrange(2)])
    else:
        branch, M = C2_FROM_E, (c1, random_color(st.E, rng))
    new = mask_of(M)
    masks[v] = new
    return UpdateRecord(v, tau, DISJOINT, k, delta, c1, new, M=M, branch=branch,
                        S=n_s, Q=n_q, D=n_d, E=n_e, q=q, p_delta=p_delta)


def _disjoint_color(rec, nbr_colors):
    M = rec.M
    if rec.branch == SINGLETON or rec.branch == PAIR:
        free = [c for c in M if c not in nbr_colors]
        if len(free) != 1:
            raise InvariantViolation(
                f"disjoint {rec.branch} at vertex {rec.v}: {M} leaves {len(free)} free colours"
            )
        return free[0]
    x = len(nbr_colors)
    k = rec.k
    p_prime = (k - rec.delta) / (k - x)
    if not 0.0 <= p_prime <= 1.0 + _EPS:
        raise InvariantViolation(f"disjoint p'_chi={p_prime} outside [0,1]")
    if rec.branch == C2_FROM_D:
        if 2 * x < 2 * rec.Q + rec.D:
            raise InvariantViolation(f"|chi(N(v))|={x} below Q + D/2 at vertex {rec.v}")
        p_chi = (x - rec.Q - rec.D / 2) * rec.D / ((k - x) * (k - rec.Q - rec.D) * rec.q)
        if not -_EPS <= p_chi <= rec.p_delta + _EPS:
            raise InvariantViolation(f"disjoint p_chi={p_chi} outside [0, p_delta={rec.p_delta}]")
        r = p_chi / rec.p_delta if rec.p_delta > 0 else 0.0
    else:
        r = p_prime
    c1, c2 = M
    if c2 in nbr_colors or rec.tau > r:
        return c1
    return c2


DECODERS = {COMPRESS: _compress_color, SEEDING: _seeding_color, DISJOINT: _disjoint_color}


def decode_color(rec: UpdateRecord, graph, chi: Sequence[int]) -> int:
    """The colour ``rec`` assigns to ``rec.v`` when applied to ``chi``."""
    nbr_colors = {chi[w] for w in graph.adjacency[rec.v]}
    return DECODERS[rec.gamma](rec, nbr_colors)


def decode(rec: UpdateRecord, graph, chi: Sequence[int]) -> list[int]:
    """Apply ``rec`` to ``chi`` and return the new coloring (``chi`` untouched)."""
    out = list(chi)
    out[rec.v] = decode_color(rec, graph, chi)
    return out


def compress_decode(rec, graph, chi):
    if rec.gamma != COMPRESS:
        raise ValueError("not a compress record")
    return decode(rec, graph, chi)


def seeding_decode(rec, graph, chi):
    if rec.gamma != SEEDING:
        raise ValueError("not a seeding record")
    return decode(rec, graph, chi)


def disjoint_decode(rec, graph, chi):
    if rec.gamma != DISJOINT:
        raise ValueError("not a disjoint record")
    return decode(rec, graph, chi)


def gen_update(kind: str, graph, L: BoundingList, v: int, rng, A=None, pair_scope="neighborhood"):
    """Name-dispatched gen, for harnesses that iterate over update kinds."""
    if kind == "compress":
        if A is None:
            raise ValueError("compress needs an A set")
        return compress_gen(graph, L, v, A, rng)
    if kind == "seeding":
        return seeding_gen(graph, L, v, rng)
    if kind == "disjoint":
        return disjoint_gen(graph, L, v, rng, pair_scope)
    raise ValueError(f"unknown update kind {kind!r}")

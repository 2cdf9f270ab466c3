"""Seeding sets via Moser-Tardos resampling.

A seeding set ``S`` with parameter ``eta`` satisfies, for every vertex ``v``::

    |N(v) - S| <= (1 - eta) * Delta   and   |N(v) & S| <= Delta / 3

Each vertex joins ``S`` independently with probability ``(eta + 1/3) / 2``;
while some vertex violates a bound, the memberships of its neighbours are
resampled.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

from .errors import InvariantViolation, SeedingFailure
from .rng import as_rng

#: Below this max degree the seeding set is skipped altogether.
MIN_SEEDING_DEGREE = 50
MAX_ATTEMPTS = 8


@dataclass(frozen=True)
class SeedingSet:
    members: tuple[int, ...]
    eta: float

    def to_dict(self) -> dict:
        return {"eta": self.eta, "members": list(self.members)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SeedingSet":
        return cls(tuple(sorted(int(v) for v in data["members"])), float(data["eta"]))

    @classmethod
    def empty(cls) -> "SeedingSet":
        return cls((), 0.0)

    def __len__(self):
        return len(self.members)


def default_eta(delta: int) -> float:
    """``1/3 - 2 sqrt(ln(delta)/delta)``, clamped to ``[0, 1/3)``."""
    if delta < 2:
        return 0.0
    return max(0.0, 1 / 3 - 2 * math.sqrt(math.log(delta) / delta))


def default_resample_cap(n: int) -> int:
    return max(64, 4 * n)


def _violates(in_count, out_count, delta, eta):
    return out_count > (1 - eta) * delta or 3 * in_count > delta


def verify_seeding_set(graph, members, eta: float) -> bool:
    """Full scan of both neighbourhood bounds at every vertex."""
    inside = set(members)
    delta = graph.max_degree
    for nbrs in graph.adjacency:
        in_count = sum(1 for w in nbrs if w in inside)
        if _violates(in_count, len(nbrs) - in_count, delta, eta):
            return False
    return True


def find_seeding_set(graph, eta: float, rng=None, resample_cap: int | None = None,
                     debug: bool = False) -> SeedingSet:
    """One Moser-Tardos attempt; raises :class:`SeedingFailure` past the cap.

    With ``debug`` the incrementally maintained neighbour counts are compared
    against a recount after every resampling.
    """
    if not 0.0 <= eta < 1 / 3:
        raise ValueError(f"eta must lie in [0, 1/3), got {eta}")
    rng = as_rng(rng)
    n = graph.n
    adj = graph.adjacency
    delta = graph.max_degree
    cap = default_resample_cap(n) if resample_cap is None else resample_cap
    p = (eta + 1 / 3) / 2

    member = [rng.random() < p for _ in range(n)]
    in_count = [sum(member[w] for w in nbrs) for nbrs in adj]
    degree = [len(nbrs) for nbrs in adj]

    def bad(u):
        return _violates(in_count[u], degree[u] - in_count[u], delta, eta)

    heap = [v for v in range(n) if bad(v)]
    heapq.heapify(heap)
    queued = set(heap)
    resamples = 0
    while heap:
        v = heapq.heappop(heap)
        queued.discard(v)
        if not bad(v):
            continue
        if resamples >= cap:
            raise SeedingFailure(resamples, sum(1 for u in range(n) if bad(u)))
        resamples += 1
        touched = set()
        for w in adj[v]:
            new = rng.random() < p
            if new != member[w]:
                member[w] = new
                step = 1 if new else -1
                for u in adj[w]:
                    in_count[u] += step
                    touched.add(u)
        for u in touched:
            if u not in queued and bad(u):
                heapq.heappush(heap, u)
                queued.add(u)
        if debug:
            fresh = [sum(member[w] for w in nbrs) for nbrs in adj]
            if fresh != in_count:
                raise InvariantViolation("incremental neighbour counts drifted from recount")

    members = tuple(v for v in range(n) if member[v])
    return SeedingSet(members, eta)


def build_seeding_set(graph, rng=None, eta: float | None = None,
                      attempts: int = MAX_ATTEMPTS, resample_cap: int | None = None) -> SeedingSet:
    """Seeding set for the sampler, falling back to the empty set.

    The empty set (with ``eta = 0``) is returned when the max degree is below
    :data:`MIN_SEEDING_DEGREE` or every attempt fails.
    """
    rng = as_rng(rng)
    delta = graph.max_degree
    if eta is None:
        if delta < MIN_SEEDING_DEGREE:
            return SeedingSet.empty()
        eta = default_eta(delta)
    for _ in range(attempts):
        try:
            return find_seeding_set(graph, eta, rng, resample_cap)
        except SeedingFailure:
            continue
    return SeedingSet.empty()

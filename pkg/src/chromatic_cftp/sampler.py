"""SamplerUnit blocks and the coupling-from-the-past driver.

A block starts from the full bounding list and runs four phases:

1. seed the vertices of the seeding set (compress their neighbourhoods, then
   a seeding update), leaving their lists at size <= 3;
2. compress the unseeded neighbours of each seeded vertex and apply a
   disjoint update to it, leaving seeded lists at size <= 2;
3. walk the remaining vertices in ascending order, compressing unmarked
   neighbours with a carefully chosen ``A`` before a disjoint update, leaving
   every list at size <= 2;
4. apply ``T_D`` disjoint updates at uniformly random vertices.

The block's map on colorings is constant exactly when its final bounding
list consists of singletons.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .bounding import (
    BoundingList,
    all_singletons,
    colors_of,
    lowest_colors_outside,
    only_color,
)
from .errors import InvariantViolation, PromiseViolation
from .rng import as_rng, make_rng
from .seedset import SeedingSet, build_seeding_set
from .updates import DECODERS, compress_gen, disjoint_gen, seeding_gen

THREADS_ENV = "CHROMATIC_CFTP_THREADS"


@dataclass
class SamplerBlock:
    """Records of one SamplerUnit run, earliest first, plus the final list."""

    graph: object
    records: list
    final_list: BoundingList
    collapsed: list[int] | None
    phase_ends: tuple[int, int, int, int] = (0, 0, 0, 0)
    trace: list[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.records)


@dataclass
class SampleResult:
    coloring: list[int]
    blocks: int
    updates: int
    traces: list[list[dict]] = field(default_factory=list)


def drift_steps(n: int, k: int, delta: int) -> int:
    """``ceil(2 (k - delta) n ln n / (k - 5 delta / 2))``; zero for a single vertex."""
    if 2 * k <= 5 * delta:
        raise PromiseViolation("drift", "need k > 5*delta/2", k=k, delta=delta)
    if n <= 1:
        return 0
    return math.ceil(2 * (k - delta) * n * math.log(n) / (k - 2.5 * delta))


def complete_A(required: int, delta: int, k: int) -> int:
    """Smallest-index completion of ``required`` to exactly ``delta`` colours."""
    have = required.bit_count()
    if have > delta:
        raise PromiseViolation(
            "compress", "colours that A must contain exceed delta", required=have, delta=delta, k=k
        )
    return required | lowest_colors_outside(required, delta - have)


def phase3_choose_A(graph, L: BoundingList, v: int, marked) -> int:
    """Greedy ``A`` for Phase 3 from the lists of ``v``'s marked neighbours.

    Takes Q | E of the marked lists first (lowest colours if there are more
    than ``delta``), then whole disjoint pairs while two slots remain, one
    colour of a further pair if a single slot remains, and finally the lowest
    unused colours.
    """
    delta = graph.max_degree
    masks = L.masks
    marked_nbrs = [w for w in graph.adjacency[v] if marked[w]]
    S = Q = multi = 0
    for w in marked_nbrs:
        m = masks[w]
        if m.bit_count() > 2:
            raise InvariantViolation(f"marked vertex {w} has a list of size {m.bit_count()}")
        multi |= S & m
        S |= m
    pairs = [masks[w] for w in marked_nbrs if masks[w].bit_count() == 2 and not masks[w] & multi]
    D = 0
    for m in pairs:
        D |= m
    qe = colors_of(S & ~D)
    if len(qe) >= delta:
        A = 0
        for c in qe[:delta]:
            A |= 1 << c
        return A
    A = S & ~D
    slots = delta - len(qe)
    i = 0
    while slots >= 2 and i < len(pairs):
        A |= pairs[i]
        slots -= 2
        i += 1
    if slots == 1 and i < len(pairs):
        A |= pairs[i] & -pairs[i]
        slots = 0
    return A | lowest_colors_outside(A, slots)


def _size_histogram(L, vertices):
    return dict(sorted(Counter(L.masks[v].bit_count() for v in vertices).items()))


def _check_max_size(L, vertices, bound, phase):
    for v in vertices:
        size = L.masks[v].bit_count()
        if size > bound:
            raise InvariantViolation(f"after phase {phase}: |L({v})| = {size} > {bound}")


def run_sampler_unit(graph, k: int, seeding: SeedingSet | None = None, rng=None, *,
                     trace: bool = False, pair_scope: str = "neighborhood") -> SamplerBlock:
    """Generate one block of updates from the full bounding list."""
    rng = as_rng(rng)
    n = graph.n
    adj = graph.adjacency
    delta = graph.max_degree
    if k < delta + 2:
        raise ValueError(f"need k >= max degree + 2 (k={k}, delta={delta})")
    t_drift = drift_steps(n, k, delta)
    seeded = seeding.members if seeding is not None else ()
    L = BoundingList.full(n, k)
    records = []
    log = []
    ends = []

    def milestone(phase):
        ends.append(len(records))
        if trace:
            log.append({
                "phase": phase,
                "updates": len(records),
                "seeded_sizes": _size_histogram(L, seeded),
                "all_sizes": _size_histogram(L, range(n)),
                "lists": list(L.masks),
            })

    # phase 1
    done = set()
    for vi in seeded:
        required = 0
        for w in adj[vi]:
            if w in done:
                required |= L.masks[w]
        A = complete_A(required, delta, k)
        for u in adj[vi]:
            if u not in done:
                records.append(compress_gen(graph, L, u, A, rng))
        records.append(seeding_gen(graph, L, vi, rng))
        done.add(vi)
    _check_max_size(L, seeded, 3, 1)
    milestone(1)

    # phase 2
    in_seed = set(seeded)
    for vi in seeded:
        required = 0
        for w in adj[vi]:
            if w in in_seed:
                required |= L.masks[w]
        A = complete_A(required, delta, k)
        for u in adj[vi]:
            if u not in in_seed:
                records.append(compress_gen(graph, L, u, A, rng))
        records.append(disjoint_gen(graph, L, vi, rng, pair_scope))
    _check_max_size(L, seeded, 2, 2)
    milestone(2)

    # phase 3
    marked = [False] * n
    for v in seeded:
        marked[v] = True
    for v in range(n):
        if marked[v]:
            continue
        A = phase3_choose_A(graph, L, v, marked)
        for u in adj[v]:
            if not marked[u]:
                records.append(compress_gen(graph, L, u, A, rng))
        records.append(disjoint_gen(graph, L, v, rng, pair_scope))
        marked[v] = True
    _check_max_size(L, range(n), 2, 3)
    milestone(3)

    # phase 4
    for _ in range(t_drift):
        records.append(disjoint_gen(graph, L, rng.randrange(n), rng, pair_scope))
    milestone(4)

    collapsed = [only_color(m) for m in L.masks] if all_singletons(L) else None
    return SamplerBlock(graph, records, L, collapsed, tuple(ends), log)


def run_drift(graph, L: BoundingList, rng=None, steps: int | None = None,
              pair_scope: str = "neighborhood") -> list:
    """Phase 4 alone, from ``L`` (mutated in place); returns the records."""
    rng = as_rng(rng)
    n = graph.n
    if steps is None:
        steps = drift_steps(n, L.k, graph.max_degree)
    return [disjoint_gen(graph, L, rng.randrange(n), rng, pair_scope) for _ in range(steps)]


def phi(block: SamplerBlock) -> bool:
    return all_singletons(block.final_list)


def apply_records(records, graph, chi) -> list[int]:
    """Fold decode over ``records`` in time order, returning a new coloring."""
    out = list(chi)
    adj = graph.adjacency
    for rec in records:
        nbr_colors = {out[w] for w in adj[rec.v]}
        out[rec.v] = DECODERS[rec.gamma](rec, nbr_colors)
    return out


def apply_block(block: SamplerBlock, chi) -> list[int]:
    return apply_records(block.records, block.graph, chi)


def run_perfect_sampler(graph, k: int, rng=None, seeding: SeedingSet | None = None, *,
                        max_blocks: int | None = None, pair_scope: str = "neighborhood",
                        trace: bool = False) -> SampleResult:
    """Coupling from the past over SamplerUnit blocks.

    Blocks ``B_1, B_2, ...`` are generated further and further into the past.
    At the first ``B_i`` that collapses, its constant value is pushed forward
    through ``B_{i-1}``, ..., ``B_1`` (the most recent block last).
    """
    rng = as_rng(rng)
    if seeding is None:
        seeding = build_seeding_set(graph, rng)
    newer = []
    traces = []
    updates = 0
    while max_blocks is None or len(newer) < max_blocks:
        block = run_sampler_unit(graph, k, seeding, rng, trace=trace, pair_scope=pair_scope)
        updates += len(block.records)
        if trace:
            traces.append(block.trace)
        if block.collapsed is not None:
            chi = block.collapsed
            for later in reversed(newer):
                chi = apply_block(later, chi)
            return SampleResult(chi, len(newer) + 1, updates, traces)
        newer.append(block)
    raise RuntimeError(f"no block collapsed within {max_blocks} blocks")


def perfect_sample(graph, k: int, rng=None, seeding: SeedingSet | None = None) -> list[int]:
    """One exactly uniform proper ``k``-coloring of ``graph``."""
    return run_perfect_sampler(graph, k, rng, seeding).coloring


def is_proper(graph, chi) -> bool:
    return all(chi[u] != chi[v] for u, v in graph.edges())


def _sample_range(args):
    graph, k, seed, seeding, start, stop = args
    return [tuple(perfect_sample(graph, k, make_rng(seed, "sample", i), seeding))
            for i in range(start, stop)]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sample_many(graph, k: int, count: int, seed: int, seeding: SeedingSet | None = None,
                workers: int | None = None) -> list[tuple[int, ...]]:
    """``count`` independent samples; sample ``i`` uses stream ``(seed, "sample", i)``.

    Results do not depend on ``workers``.
    """
    if seeding is None:
        seeding = build_seeding_set(graph, make_rng(seed, "seeding"))
    workers = worker_count() if workers is None else workers
    if workers <= 1 or count < 2 * workers:
        return _sample_range((graph, k, seed, seeding, 0, count))
    bounds = [count * i // workers for i in range(workers + 1)]
    jobs = [(graph, k, seed, seeding, bounds[i], bounds[i + 1]) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [s for chunk in pool.map(_sample_range, jobs) for s in chunk]

"""Ground truth for the sampler: enumeration, exact Glauber laws, goodness of fit."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .bounding import BoundingList
from .rng import as_rng
from .updates import decode_color, gen_update

ENUMERATION_LIMIT = 10**7


def enumerate_colorings(graph, k: int, limit: int = ENUMERATION_LIMIT) -> list[tuple[int, ...]]:
    """All proper ``k``-colorings in lexicographic order, by backtracking.

    Refuses when ``k**n`` exceeds ``limit``.
    """
    n = graph.n
    if k**n > limit:
        raise ValueError(f"k^n = {k}^{n} ~ 10^{n * math.log10(k):.1f} exceeds enumeration limit {limit}")
    # only earlier neighbours constrain the choice at v
    earlier = [[w for w in graph.adjacency[v] if w < v] for v in range(n)]
    out = []
    chi = [0] * n

    def extend(v):
        if v == n:
            out.append(tuple(chi))
            return
        used = {chi[w] for w in earlier[v]}
        for c in range(k):
            if c not in used:
                chi[v] = c
                extend(v + 1)

    extend(0)
    return out


def exact_glauber_dist(graph, chi: Sequence[int], v: int, k: int) -> dict[int, Fraction]:
    """Law of the new colour at ``v``: uniform over colours absent from its neighbourhood."""
    blocked = {chi[w] for w in graph.adjacency[v]}
    free = [c for c in range(k) if c not in blocked]
    if not free:
        raise ValueError(f"every colour is blocked at vertex {v} (k={k})")
    p = Fraction(1, len(free))
    return {c: p for c in free}


def wilson_hilferty_sf(statistic: float, df: int) -> float:
    """Upper tail of the chi-squared distribution via the Wilson-Hilferty cube-root normal."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if statistic <= 0:
        return 1.0
    h = 2.0 / (9.0 * df)
    z = ((statistic / df) ** (1.0 / 3.0) - (1.0 - h)) / math.sqrt(h)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def chi_squared_uniformity(counts: Sequence[int], expected_total: int | None = None) -> tuple[float, float]:
    """Pearson statistic of ``counts`` against the uniform law, with approximate p-value.

    ``counts`` must list every cell, including empty ones. Refuses when the
    expected count per cell is below 5.
    """
    m = len(counts)
    if m < 2:
        raise ValueError("need at least two cells")
    total = sum(counts) if expected_total is None else expected_total
    expected = total / m
    if expected < 5:
        raise ValueError(
            f"expected count per cell is {expected:.2f} < 5; draw at least {5 * m} samples"
        )
    statistic = sum((c - expected) ** 2 for c in counts) / expected
    return statistic, wilson_hilferty_sf(statistic, m - 1)


def empirical_tv(counts: Mapping, exact_dist: Mapping) -> float:
    """Total-variation distance between normalised ``counts`` and ``exact_dist``."""
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no observations")
    keys = set(counts) | set(exact_dist)
    return 0.5 * sum(abs(counts.get(x, 0) / total - float(exact_dist.get(x, 0))) for x in keys)


def uniformity_report(samples: Sequence[tuple[int, ...]], graph, k: int) -> dict:
    """Chi-squared and TV of ``samples`` against the uniform law on proper colorings."""
    support = enumerate_colorings(graph, k)
    tally = Counter(samples)
    stray = set(tally) - set(support)
    if stray:
        raise ValueError(f"{len(stray)} sampled colorings are not proper, e.g. {next(iter(stray))}")
    counts = [tally.get(x, 0) for x in support]
    statistic, p_value = chi_squared_uniformity(counts)
    uniform = Fraction(1, len(support))
    tv = empirical_tv(tally, {x: uniform for x in support})
    return {
        "statistic": statistic,
        "p_value": p_value,
        "tv": tv,
        "n_cells": len(support),
        "n_samples": len(samples),
    }


@dataclass
class MarginalResult:
    counts: dict[int, int]
    expected: dict[int, Fraction]
    trials: int
    worst_z: float
    passed: bool

    def frequencies(self) -> dict[int, float]:
        return {c: n / self.trials for c, n in sorted(self.counts.items())}


def binomial_check(counts: Mapping[int, int], expected: Mapping[int, Fraction], trials: int,
                   sigmas: float = 3.0) -> tuple[float, bool]:
    """Per-cell binomial z-scores; a zero-probability cell must stay empty."""
    worst = 0.0
    passed = True
    for c in set(counts) | set(expected):
        p = float(expected.get(c, 0))
        observed = counts.get(c, 0)
        if p == 0.0:
            if observed:
                return math.inf, False
            continue
        sd = math.sqrt(trials * p * (1 - p))
        z = abs(observed - trials * p) / sd if sd > 0 else (0.0 if observed == trials else math.inf)
        worst = max(worst, z)
        if z > sigmas:
            passed = False
    return worst, passed


def marginal_test(kind: str, graph, L: BoundingList, v: int, chi: Sequence[int], trials: int,
                  rng=None, *, A=None, decode: Callable | None = None, sigmas: float = 3.0,
                  pair_scope: str = "neighborhood") -> MarginalResult:
    """Run ``trials`` gen-then-decode rounds at ``v`` and test the new colour's law.

    ``L`` is restored after every gen. ``decode`` replaces :func:`decode_color`,
    which lets a test plant a faulty decoder and confirm the check catches it.
    """
    rng = as_rng(rng)
    decode = decode or decode_color
    base = L.masks[v]
    tally: Counter[int] = Counter()
    for _ in range(trials):
        rec = gen_update(kind, graph, L, v, rng, A=A, pair_scope=pair_scope)
        L.masks[v] = base
        tally[decode(rec, graph, chi)] += 1
    expected = exact_glauber_dist(graph, chi, v, L.k)
    worst, passed = binomial_check(tally, expected, trials, sigmas)
    return MarginalResult(dict(tally), expected, trials, worst, passed)

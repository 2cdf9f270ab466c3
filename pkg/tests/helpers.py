"""Reference implementations and fixed update configurations shared by the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from chromatic_cftp.bounding import BoundingList
from chromatic_cftp.graph import Graph


def naive_stats(graph, lists, v):
    """S, Q, N*, D, E straight from their set definitions."""
    nbrs = graph.adjacency[v]
    S, Q = set(), set()
    for w in nbrs:
        S |= lists[w]
        if len(lists[w]) == 1:
            Q |= lists[w]
    nstar = [
        w for w in nbrs
        if len(lists[w]) == 2 and all(not (lists[w] & lists[u]) for u in nbrs if u != w)
    ]
    D = set()
    for w in nstar:
        D |= lists[w]
    return S, Q, nstar, D, S - Q - D


def compatible_colorings(graph, lists):
    """Every proper coloring with ``chi(v)`` in ``lists[v]``, by backtracking."""
    n = graph.n
    out = []
    chi = [0] * n

    def extend(v):
        if v == n:
            out.append(tuple(chi))
            return
        for c in sorted(lists[v]):
            if all(chi[w] != c for w in graph.adjacency[v] if w < v):
                chi[v] = c
                extend(v + 1)

    extend(0)
    return out


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_proper(graph, k, rng):
    """Greedy random proper coloring; needs ``k > max degree``."""
    chi = [0] * graph.n
    for v in range(graph.n):
        used = {chi[w] for w in graph.adjacency[v] if w < v}
        chi[v] = rng.choice([c for c in range(k) if c not in used])
    return chi


def random_lists_around(chi, k, rng, max_extra):
    """Lists containing ``chi`` plus up to ``max_extra`` further colours each."""
    lists = []
    for c in chi:
        extra = rng.sample(range(k), rng.randint(0, min(max_extra, k)))
        lists.append({c, *extra})
    return lists


@dataclass
class UpdateConfig:
    name: str
    kind: str
    n: int
    edges: list
    k: int
    lists: list  # None entries mean the full palette
    chi: list
    v: int = 0
    A: tuple | None = None

    def build(self):
        graph = Graph.from_edges(self.n, self.edges)
        full = set(range(self.k))
        L = BoundingList.from_lists(self.k, [full if s is None else s for s in self.lists])
        return graph, L, self.v, list(self.chi), self.A


def star(d):
    return [(0, i) for i in range(1, d + 1)]


K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

MARGINAL_CONFIGS = [
    # compress; the lists play no role beyond compatibility
    UpdateConfig("compress-isolated", "compress", 1, [], 5, [None], [2], A=()),
    UpdateConfig("compress-star3-distinct", "compress", 4, star(3), 7, [None] * 4, [6, 0, 1, 2], A=(0, 1, 2)),
    UpdateConfig("compress-star3-repeat", "compress", 4, star(3), 7, [None] * 4, [0, 3, 3, 5], A=(0, 1, 2)),
    UpdateConfig("compress-star3-k5", "compress", 4, star(3), 5, [None] * 4, [2, 0, 1, 4], A=(1, 2, 3)),
    UpdateConfig("compress-star4-mono", "compress", 5, star(4), 6, [None] * 5, [1, 0, 0, 0, 0], A=(0, 1, 2, 3)),
    UpdateConfig("compress-path-tight", "compress", 3, star(2), 4, [None] * 3, [0, 1, 2], A=(0, 3)),
    UpdateConfig("compress-K4", "compress", 4, K4, 6, [None] * 4, [5, 0, 3, 4], A=(0, 1, 2)),
    # seeding
    UpdateConfig("seeding-star3", "seeding", 4, star(3), 10,
                 [None, {0, 1, 2}, {1, 2, 3}, {4}], [9, 0, 3, 4]),
    UpdateConfig("seeding-star3-repeat", "seeding", 4, star(3), 10,
                 [None, {0, 1, 2}, {1, 2, 3}, {4}], [9, 1, 1, 4]),
    UpdateConfig("seeding-isolated", "seeding", 3, [(1, 2)], 4, [None] * 3, [3, 0, 1]),
    UpdateConfig("seeding-star4-overlap", "seeding", 5, star(4), 12,
                 [None, {0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {6, 7, 0}], [11, 0, 3, 5, 7]),
    UpdateConfig("seeding-path", "seeding", 3, star(2), 6, [None, {0, 1}, {0, 1}], [5, 0, 1]),
    # disjoint
    UpdateConfig("disjoint-QDE", "disjoint", 5, star(4), 10,
                 [None, {0}, {1, 2}, {3, 4}, {5, 0}], [9, 0, 1, 3, 5]),
    UpdateConfig("disjoint-QDE-min-x", "disjoint", 5, star(4), 10,
                 [None, {0}, {1, 2}, {3, 4}, {5, 0}], [9, 0, 2, 4, 0]),
    UpdateConfig("disjoint-D0", "disjoint", 4, star(3), 10,
                 [None, {0}, {1, 2}, {2, 3}], [9, 0, 1, 3]),
    UpdateConfig("disjoint-E0", "disjoint", 4, star(3), 8,
                 [None, {0}, {1, 2}, {3, 4}], [7, 0, 2, 3]),
    UpdateConfig("disjoint-D0-E0", "disjoint", 4, star(3), 7,
                 [None, {0}, {1}, {1}], [6, 0, 1, 1]),
    UpdateConfig("disjoint-Q0", "disjoint", 4, star(3), 9,
                 [None, {0, 1}, {2, 3}, {3, 4}], [8, 1, 2, 4]),
    UpdateConfig("disjoint-Q0-E0", "disjoint", 3, star(2), 6,
                 [None, {0, 1}, {2, 3}], [5, 0, 3]),
    UpdateConfig("disjoint-isolated", "disjoint", 3, [(1, 2)], 4, [None] * 3, [0, 1, 2]),
    UpdateConfig("disjoint-E0-wide", "disjoint", 5, star(4), 12,
                 [None, {0}, {1, 2}, {3, 4}, {5, 6}], [11, 0, 2, 3, 6]),
    UpdateConfig("disjoint-K4", "disjoint", 4, K4, 10,
                 [None, {1}, {2, 3}, {4, 5}], [0, 1, 3, 4]),
]

# configurations where D > 0 or the singleton branch is otherwise non-trivial
SINGLETON_CONFIGS = [
    c for c in MARGINAL_CONFIGS
    if c.kind == "disjoint" and c.name in {
        "disjoint-QDE", "disjoint-D0", "disjoint-E0", "disjoint-Q0",
        "disjoint-Q0-E0", "disjoint-E0-wide", "disjoint-K4",
    }
]


def corrupt_compress_decode(rec, graph, chi):
    """Compress decode with the tau comparison flipped; used to test the harness's power."""
    nbr = {chi[w] for w in graph.adjacency[rec.v]}
    p = (rec.k - rec.delta) / (rec.k - len(nbr))
    if rec.c1 not in nbr and rec.tau > p:
        return rec.c1
    for c in rec.M[:-1]:
        if c not in nbr:
            return c
    return rec.c1


def seeded_rng(*key):
    return random.Random(":".join(map(str, key)))


def all_graphs(n):
    """Every labelled simple graph on ``n`` vertices."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for bits in range(1 << len(pairs)):
        yield Graph.from_edges(n, [e for i, e in enumerate(pairs) if bits >> i & 1])


def containment_sweep(graph, k, lists, rng, gens_per_vertex=3, kinds=("compress", "seeding", "disjoint")):
    """Gen at every vertex and decode every compatible proper coloring.

    Returns ``(checks, violations)``; a violation is a decoded colour outside
    the new list or clashing with a neighbour. Promise violations are skipped.
    """
    from chromatic_cftp.bounding import colors_of
    from chromatic_cftp.errors import PromiseViolation
    from chromatic_cftp.updates import decode_color, gen_update

    L = BoundingList.from_lists(k, lists)
    colorings = compatible_colorings(graph, lists)
    delta = graph.max_degree
    checks = violations = 0
    for v in range(graph.n):
        for kind in kinds:
            for _ in range(gens_per_vertex):
                A = rng.sample(range(k), delta) if kind == "compress" else None
                base = L.masks[v]
                try:
                    rec = gen_update(kind, graph, L, v, rng, A=A)
                except PromiseViolation:
                    continue
                finally:
                    new = L.masks[v]
                    L.masks[v] = base
                rec.check()
                for chi in colorings:
                    c = decode_color(rec, graph, chi)
                    checks += 1
                    if not new >> c & 1 or any(chi[w] == c for w in graph.adjacency[v]):
                        violations += 1
                        print(f"violation: {kind} at {v}, chi={chi}, got {c}, L'={colors_of(new)}")
    return checks, violations

"""Undirected simple graphs on vertices ``0..n-1``: parsing, emitting, generators."""

from __future__ import annotations

import json
from bisect import bisect_left
from collections import defaultdict
from typing import Iterable, Iterator

from .errors import GraphParseError
from .rng import as_rng


class Graph:
    """Immutable undirected simple graph with sorted adjacency lists.

    Vertices are the integers ``0..n-1``. ``max_degree`` is cached at
    construction.
    """

    __slots__ = ("n", "adjacency", "max_degree")

    def __init__(self, n: int, adjacency: Iterable[Iterable[int]]):
        self.n = int(n)
        self.adjacency = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        if len(self.adjacency) != self.n:
            raise ValueError(f"expected {self.n} adjacency lists, got {len(self.adjacency)}")
        self.max_degree = max((len(a) for a in self.adjacency), default=0)
        self.check()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from an edge iterable, dropping duplicate edges."""
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, nbrs)

    def check(self) -> None:
        """Full scan: symmetric, loop-free, duplicate-free adjacency."""
        adj = self.adjacency
        for v, nbrs in enumerate(adj):
            for i, w in enumerate(nbrs):
                if not 0 <= w < self.n:
                    raise ValueError(f"vertex {v} has out-of-range neighbour {w}")
                if w == v:
                    raise ValueError(f"self-loop at vertex {v}")
                if i and nbrs[i - 1] == w:
                    raise ValueError(f"duplicate edge ({v}, {w})")
                if not self.has_edge(w, v):
                    raise ValueError(f"asymmetric adjacency: {v}->{w} without {w}->{v}")

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def __eq__(self, other):
        return isinstance(other, Graph) and self.adjacency == other.adjacency

    def __hash__(self):
        return hash(self.adjacency)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, max_degree={self.max_degree})"

    # -- serialisation ---------------------------------------------------

    def to_edge_list(self) -> str:
        lines = [f"p {self.n} {self.m}"]
        lines.extend(f"e {u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [[u, v] for u, v in self.edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        return cls.from_edges(data["n"], (tuple(e) for e in data["edges"]))


def parse_graph(text: str) -> Graph:
    """Parse the ``p n m`` / ``e u v`` edge-list format.

    Lines starting with ``c`` are comments and blank lines are ignored.
    Repeated edges are deduplicated; every error names its line number.
    """
    header = None
    edges = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "p" or len(parts) != 3:
                raise GraphParseError(line_no, f"expected 'p <n> <m>', got {line!r}")
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise GraphParseError(line_no, f"non-integer header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise GraphParseError(line_no, "negative counts in header")
            continue
        if parts[0] != "e" or len(parts) != 3:
            raise GraphParseError(line_no, f"expected 'e <u> <v>', got {line!r}")
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise GraphParseError(line_no, f"non-integer endpoint in {line!r}") from None
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(line_no, f"vertex out of range 0..{n - 1} in {line!r}")
        if u == v:
            raise GraphParseError(line_no, f"self-loop at vertex {u}")
        edges.append((u, v))
    if header is None:
        raise GraphParseError(0, "missing 'p <n> <m>' header")
    if len(edges) != header[1]:
        raise GraphParseError(0, f"header promises {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def load_graph(text: str) -> Graph:
    """Parse either the JSON form or the edge-list form, sniffing the first character."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphParseError(exc.lineno, exc.msg) from None
        try:
            return Graph.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphParseError(0, f"bad JSON graph: {exc}") from None
    return parse_graph(text)


# -- generators ------------------------------------------------------------


def empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def clique(n: int) -> Graph:
    if n < 1:
        raise ValueError("clique needs n >= 1")
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def grid(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise ValueError("grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def random_regular(n: int, d: int, rng=None, max_attempts: int = 1000) -> Graph:
    """Uniform-ish random d-regular graph via stub pairing.

    Stubs are shuffled and paired; pairs that would form a loop or a repeated
    edge are rejected and their stubs re-paired in the next round. A round in
    which no suitable pair remains restarts the whole construction.
    """
    if d < 0 or n < 0:
        raise ValueError("n and d must be non-negative")
    if (n * d) % 2:
        raise ValueError(f"n*d must be even (n={n}, d={d})")
    if d >= n and not (n == 0 or d == 0):
        raise ValueError(f"need d < n (n={n}, d={d})")
    rng = as_rng(rng)
    for _ in range(max_attempts):
        edges = _pair_stubs(n, d, rng)
        if edges is not None:
            return Graph.from_edges(n, edges)
    raise RuntimeError(f"random_regular({n}, {d}) failed after {max_attempts} attempts")


def _pair_stubs(n, d, rng):
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        leftover: dict[int, int] = defaultdict(int)
        rng.shuffle(stubs)
        it = iter(stubs)
        for a, b in zip(it, it):
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover[a] += 1
                leftover[b] += 1
        if leftover and not _has_suitable_pair(edges, leftover):
            return None
        stubs = [v for v, count in leftover.items() for _ in range(count)]
    return edges


def _has_suitable_pair(edges, leftover):
    verts = sorted(leftover)
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            if (a, b) not in edges:
                return True
    return False


GENERATORS = {
    "empty": empty,
    "path": path,
    "cycle": cycle,
    "clique": clique,
    "grid": grid,
    "random_regular": random_regular,
}


def generate(kind: str, rng=None, **params) -> Graph:
    """Dispatch to a named generator; ``random_regular`` also takes ``rng``."""
    if kind not in GENERATORS:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {sorted(GENERATORS)}")
    try:
        if kind == "random_regular":
            return random_regular(params["n"], params["d"], rng)
        if kind == "grid":
            return grid(params["rows"], params["cols"])
        return GENERATORS[kind](params["n"])
    except KeyError as exc:
        raise ValueError(f"{kind} requires parameter {exc.args[0]!r}") from None

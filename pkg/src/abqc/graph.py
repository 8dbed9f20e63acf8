"""Graphs defining graph states, plus the plain-text edge-list file format.

File format::

    # comment lines start with '#'
    3          <- vertex count
    0 1        <- one edge per line
    1 2
"""

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"vertex count must be a positive integer, got {self.n!r}")
        canon = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(canon))

    @classmethod
    def from_edges(cls, n, edges):
        edges = [tuple(e) for e in edges]
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(edges))

    def neighbors(self, i):
        self._check_vertex(i)
        return sorted({v for u, v in self.edges if u == i} | {u for u, v in self.edges if v == i})

    def sorted_edges(self):
        return sorted(self.edges)

    def is_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def _check_vertex(self, i):
        if not 0 <= i < self.n:
            raise GraphError(f"vertex {i} outside 0..{self.n - 1}")

    def to_text(self):
        lines = [str(self.n)] + [f"{u} {v}" for u, v in self.sorted_edges()]
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}


# named families -------------------------------------------------------------


def empty(n):
    return Graph(n)


def path(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle(n):
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def complete(n):
    return Graph(n, frozenset(combinations(range(n), 2)))


def star(n):
    return Graph(n, frozenset((0, i) for i in range(1, n)))


NAMED = {"empty": empty, "path": path, "cycle": cycle, "complete": complete, "star": star}


def named(name, n):
    try:
        return NAMED[name](n)
    except KeyError:
        raise GraphError(f"unknown graph family {name!r}; choose from {sorted(NAMED)}") from None


def all_connected_graphs(n):
    """Every connected labelled graph on ``n`` vertices."""
    pairs = list(combinations(range(n), 2))
    out = []
    for mask in range(1 << len(pairs)):
        g = Graph(n, frozenset(p for b, p in enumerate(pairs) if mask >> b & 1))
        if g.is_connected():
            out.append(g)
    return out


# file format ----------------------------------------------------------------


def parse_graph(text):
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphError("graph file is empty")
    lineno, head = rows[0]
    if len(head) != 1:
        raise GraphError(f"line {lineno}: expected the vertex count alone")
    try:
        n = int(head[0])
        edges = []
        for lineno, parts in rows[1:]:
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'u v'")
            edges.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        raise GraphError(f"line {lineno}: {exc}") from None
    return Graph.from_edges(n, edges)


def load_graph(path):
    return parse_graph(Path(path).read_text())


def save_graph(g, path):
    Path(path).write_text(g.to_text())

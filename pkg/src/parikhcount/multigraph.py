"""Edge-weighted directed multigraphs and Euler-circuit counting.

A weight-w edge stands for w parallel copies.  Counting follows the
matrix-tree theorem (determinant of a reduced Laplacian) and the BEST
theorem; ``brute_euler_count`` is an exhaustive oracle for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import config
from .errors import ConsistencyError, InputError, SizeGuardError, StructuralError
from .linalg import bareiss_det


class Edge(NamedTuple):
    id: object
    source: object
    target: object
    weight: int


@dataclass(frozen=True)
class WeightedMultigraph:
    nodes: tuple
    edges: tuple
    _out: dict = field(init=False, repr=False, compare=False, hash=False)
    _in: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        nodes = tuple(dict.fromkeys(self.nodes))
        node_set = set(nodes)
        edges = []
        ids = set()
        for raw in self.edges:
            e = Edge(*raw)
            if isinstance(e.weight, bool) or not isinstance(e.weight, int) or e.weight < 0:
                raise InputError(f"edge {e.id!r} has invalid weight {e.weight!r}")
            if e.source not in node_set or e.target not in node_set:
                raise InputError(f"edge {e.id!r} has an endpoint outside the node list")
            if e.id in ids:
                raise InputError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)
            if e.weight:
                edges.append(e)
        out = {v: 0 for v in nodes}
        inn = {v: 0 for v in nodes}
        for e in edges:
            out[e.source] += e.weight
            inn[e.target] += e.weight
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inn)

    @classmethod
    def from_edges(cls, nodes, triples):
        """Build from ``(source, target, weight)`` triples; ids are positions."""
        return cls(tuple(nodes), tuple(Edge(i, s, t, w) for i, (s, t, w) in enumerate(triples)))

    def out_degree(self, v):
        return self._out[v]

    def in_degree(self, v):
        return self._in[v]

    def support(self):
        """Nodes with at least one incident edge, in node order."""
        return tuple(v for v in self.nodes if self._out[v] or self._in[v])

    def expanded_edge_count(self):
        return sum(e.weight for e in self.edges)

    def laplacian(self, nodes=None):
        """Out-degree Laplacian ``D - A`` over ``nodes`` (default: support), loops dropped."""
        nodes = self.support() if nodes is None else tuple(nodes)
        index = {v: i for i, v in enumerate(nodes)}
        n = len(nodes)
        lap = [[0] * n for _ in range(n)]
        for e in self.edges:
            if e.source == e.target:
                continue
            i, j = index[e.source], index[e.target]
            lap[i][i] += e.weight
            lap[i][j] -= e.weight
        return lap

    def adjacency(self):
        index = {v: i for i, v in enumerate(self.nodes)}
        n = len(self.nodes)
        adj = [[0] * n for _ in range(n)]
        for e in self.edges:
            adj[index[e.source]][index[e.target]] += e.weight
        return adj

    def out_edges(self, v):
        return tuple(e for e in self.edges if e.source == v)

    def max_out_multiplicity(self):
        return max((self._out[v] for v in self.nodes), default=0)


def _reach(start, adjacency):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adjacency.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_eulerian_connected(g: WeightedMultigraph) -> bool:
    if any(g.in_degree(v) != g.out_degree(v) for v in g.nodes):
        return False
    support = g.support()
    if not support:
        return True
    fwd, bwd = {}, {}
    for e in g.edges:
        fwd.setdefault(e.source, set()).add(e.target)
        bwd.setdefault(e.target, set()).add(e.source)
    root = support[0]
    need = set(support)
    return _reach(root, fwd) >= need and _reach(root, bwd) >= need


def spanning_tree_count(g: WeightedMultigraph, root) -> int:
    """Directed spanning trees of the support oriented toward ``root``.

    Parallel edges count with their weight; loops are ignored.  The count
    is the determinant of the Laplacian with the root row and column
    removed.
    """
    if root not in g.nodes:
        raise InputError(f"unknown node {root!r}")
    support = g.support()
    if not support:
        return 1
    if root not in support:
        return 0
    lap = g.laplacian(support)
    r = support.index(root)
    minor = [row[:r] + row[r + 1:] for i, row in enumerate(lap) if i != r]
    return bareiss_det(minor)


def _multinomial(parts):
    """(sum parts)! / prod(part!) as a product of binomial coefficients."""
    total = 0
    result = 1
    for k in parts:
        total += k
        result *= math.comb(total, k)
    return result


def euler_count(g: WeightedMultigraph, exact=True):
    """Number of Euler circuits up to rotation, weighted edges as indistinct copies.

    Evaluates ``t(G) * prod_v (d(v)-1)! / prod_e w(e)!``.  Per node the
    out-edge weights partition the degree, so the factorial ratio is
    ``prod_v multinomial(d(v); w(out-edges of v)) / d(v)``; this keeps
    intermediate numbers small when factorials cancel.

    With ``exact=True`` a non-integral value raises ``ConsistencyError``;
    with ``exact=False`` the value is returned as a Fraction.  The value is
    integral whenever some edge has weight 1.
    """
    if not is_eulerian_connected(g):
        raise StructuralError("graph is not a connected Eulerian multigraph")
    support = g.support()
    if not support:
        return 1 if exact else Fraction(1)
    trees = spanning_tree_count(g, support[0])
    numerator = trees
    denominator = 1
    for v in support:
        numerator *= _multinomial(e.weight for e in g.edges if e.source == v)
        denominator *= g.out_degree(v)
    q, r = divmod(numerator, denominator)
    if not exact:
        return Fraction(numerator, denominator)
    if r:
        raise ConsistencyError(
            f"Euler count is not integral ({numerator}/{denominator}); "
            "no weight-1 edge anchors the rotation classes"
        )
    return q


def brute_euler_count(g: WeightedMultigraph, exact=True, cap=None):
    """Exhaustive oracle for ``euler_count``.

    Expands every weight into distinct copies and counts closed trails
    through all copies, one representative per rotation class: the
    rotation beginning with the smallest copy (the lexicographically least
    rotation).  The count is then divided by ``prod_e w(e)!``.  Trails are
    counted by memoised search over (current node, set of unused copies).
    """
    cap = config.BRUTE_EULER_EDGE_CAP if cap is None else cap
    copies = []
    for e in g.edges:
        copies.extend((e.source, e.target) for _ in range(e.weight))
    m = len(copies)
    if m > cap:
        raise SizeGuardError(f"{m} expanded edges exceed the brute-force cap {cap}")
    if any(g.in_degree(v) != g.out_degree(v) for v in g.nodes):
        return 0 if exact else Fraction(0)
    if m == 0:
        return 1 if exact else Fraction(1)
    by_source = {}
    for idx, (s, _) in enumerate(copies):
        by_source.setdefault(s, []).append(idx)
    home = copies[0][0]
    memo = {}

    def trails(node, unused):
        if not unused:
            return 1 if node == home else 0
        key = (node, unused)
        if key in memo:
            return memo[key]
        total = 0
        for idx in by_source.get(node, ()):
            bit = 1 << idx
            if unused & bit:
                total += trails(copies[idx][1], unused & ~bit)
        memo[key] = total
        return total

    full = (1 << m) - 1
    classes = trails(copies[0][1], full & ~1)
    perms = 1
    for e in g.edges:
        perms *= math.factorial(e.weight)
    if not exact:
        return Fraction(classes, perms)
    q, r = divmod(classes, perms)
    if r:
        raise ConsistencyError(f"Euler count is not integral ({classes}/{perms})")
    return q


def count_paths(g: WeightedMultigraph, u, v, n: int) -> int:
    """Number of length-n paths from u to v in the expanded multigraph."""
    if u not in g._out or v not in g._out:
        raise InputError(f"unknown node {u!r} or {v!r}")
    if n < 0:
        raise InputError("path length must be non-negative")
    out = {}
    for e in g.edges:
        out.setdefault(e.source, []).append((e.target, e.weight))
    layer = {u: 1}
    for _ in range(n):
        nxt = {}
        for node, ways in layer.items():
            for target, w in out.get(node, ()):
                nxt[target] = nxt.get(target, 0) + ways * w
        layer = nxt
        if not layer:
            return 0
    return layer.get(v, 0)

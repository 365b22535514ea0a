"""Gadget generators: #3SAT to DFA counting, the matrix-powering pipeline,
and subset-sum grammars.

Graph node names are strings so every gadget can be written to a model
file.  Path counts in the docstrings are ``count_paths`` (expanded
multigraph, fixed length).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .automata import Cfg, Dfa, ParikhVector
from .counting import count_dfa
from .errors import InputError
from .multigraph import WeightedMultigraph

# ------------------------------------------------------------------ 3-CNF


@dataclass(frozen=True)
class CnfFormula:
    """3-CNF over variables 1..num_vars; a literal is +v or -v (DIMACS style)."""

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        if isinstance(self.num_vars, bool) or not isinstance(self.num_vars, int) or self.num_vars < 0:
            raise InputError("variable count must be a non-negative int")
        clauses = []
        for idx, clause in enumerate(self.clauses, 1):
            clause = tuple(clause)
            if len(clause) != 3:
                raise InputError(f"clause {idx} has {len(clause)} literals, expected 3")
            for lit in clause:
                if isinstance(lit, bool) or not isinstance(lit, int) or lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(f"clause {idx}: bad literal {lit!r}")
            if len({abs(lit) for lit in clause}) != 3:
                raise InputError(f"clause {idx} mentions a variable twice")
            clauses.append(clause)
        object.__setattr__(self, "clauses", tuple(clauses))

    def literals(self, idx):
        """Clause ``idx`` (1-based) as (variable, polarity) pairs."""
        return tuple((abs(lit), lit > 0) for lit in self.clauses[idx - 1])

    def satisfied_by(self, assignment) -> bool:
        """``assignment[v-1]`` is the value of variable v."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    @classmethod
    def from_dimacs(cls, text: str):
        num_vars = None
        ints = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith(("c", "#", "%")):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise InputError("expected 'p cnf VARS CLAUSES'", line=lineno)
                try:
                    num_vars = int(parts[2])
                except ValueError:
                    raise InputError("variable count is not an integer", line=lineno) from None
                continue
            try:
                ints.extend(int(tok) for tok in line.split())
            except ValueError:
                raise InputError(f"bad clause line {line!r}", line=lineno) from None
        if num_vars is None:
            raise InputError("missing 'p cnf' header")
        clauses, cur = [], []
        for x in ints:
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
        if cur:
            raise InputError("last clause is not terminated by 0")
        return cls(num_vars, tuple(clauses))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def model_count(psi: CnfFormula) -> int:
    """Brute-force number of satisfying assignments."""
    return sum(psi.satisfied_by(a) for a in itertools.product((False, True), repeat=psi.num_vars))


def _chain(trans, states, start, end, word, prefix):
    """Add a run spelling ``word`` from start to end through fresh states."""
    cur = start
    for pos, letter in enumerate(word):
        nxt = end if pos == len(word) - 1 else f"{prefix}.{pos + 1}"
        if nxt != end:
            states.append(nxt)
        trans.append((cur, letter, nxt))
        cur = nxt


def gen_3sat(psi: CnfFormula):
    """DFA and Parikh vector whose count N equals the number of models of ``psi``.

    Letters: ``x{i}`` / ``nx{i}`` for the two values of X_i, ``c{j}`` for
    clause j and ``d{j}_{g}`` as dummies.  Phase one picks a value per
    variable and emits c_j for each clause the value satisfies; phase two
    lets each clause top its c_j count up to 3 by 0, 1 or 2 extra copies.
    """
    n, k = psi.num_vars, len(psi.clauses)
    alphabet = [f"{s}{i}" for i in range(1, n + 1) for s in ("x", "nx")]
    alphabet += [f"c{j}" for j in range(1, k + 1)]
    alphabet += [f"d{j}_{g}" for j in range(1, k + 1) for g in range(3)]
    states = [f"s{i}" for i in range(n + 1)] + [f"t{j}" for j in range(1, k + 1)]
    trans = []
    for i in range(1, n + 1):
        pos = [j for j in range(1, k + 1) if i in psi.clauses[j - 1]]
        neg = [j for j in range(1, k + 1) if -i in psi.clauses[j - 1]]
        src, dst = f"s{i - 1}", f"s{i}"
        _chain(trans, states, src, dst, [f"x{i}"] + [f"c{j}" for j in pos] + [f"nx{i}"], f"s{i}T")
        _chain(trans, states, src, dst, [f"nx{i}"] + [f"c{j}" for j in neg] + [f"x{i}"], f"s{i}F")
    for j in range(1, k + 1):
        src = f"s{n}" if j == 1 else f"t{j - 1}"
        dst = f"t{j}"
        d = [f"d{j}_{g}" for g in range(3)]
        c = f"c{j}"
        _chain(trans, states, src, dst, [d[0], d[1], d[2]], f"t{j}A")
        _chain(trans, states, src, dst, [d[1], c, d[0], d[2]], f"t{j}B")
        _chain(trans, states, src, dst, [d[2], c, c, d[0], d[1]], f"t{j}C")
    final = f"t{k}" if k else f"s{n}"
    dfa = Dfa(tuple(alphabet), tuple(states), "s0", frozenset([final]), tuple(trans))
    p = {f"x{i}": 1 for i in range(1, n + 1)}
    p.update({f"nx{i}": 1 for i in range(1, n + 1)})
    p.update({f"c{j}": 3 for j in range(1, k + 1)})
    p.update({f"d{j}_{g}": 1 for j in range(1, k + 1) for g in range(3)})
    return dfa, ParikhVector(p)


# ------------------------------------------------------- matrix powering


@dataclass(frozen=True)
class MatPowInstance:
    """Decide f(M^n) >= 0 where f(A) = sum_ij f[i][j] * A[i][j]."""

    matrix: tuple
    fn: tuple
    n: int

    def __post_init__(self):
        m = _square(self.matrix, "matrix")
        f = _square(self.fn, "coefficient matrix")
        if len(m) != len(f):
            raise InputError("matrix and coefficient matrix differ in size")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InputError("exponent n must be a positive int")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "fn", f)

    @property
    def size(self):
        return len(self.matrix)

    def value(self) -> int:
        """f(M^n) by repeated squaring."""
        power = matrix_power(self.matrix, self.n)
        return sum(b * x for rb, rx in zip(self.fn, power) for b, x in zip(rb, rx))


def _square(rows, what):
    rows = tuple(tuple(r) for r in rows)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InputError(f"{what} must be square and non-empty")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                raise InputError(f"{what} entries must be integers")
    return rows


def _matmul(a, b):
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in zip(*b)) for row in a)


def matrix_power(m, n: int):
    size = len(m)
    result = tuple(tuple(int(i == j) for j in range(size)) for i in range(size))
    base = tuple(tuple(r) for r in m)
    while n:
        if n & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        n >>= 1
    return result


def _vp(k):
    return f"v{k}+"


def _vm(k):
    return f"v{k}-"


def _gadget_edges(matrix):
    triples = []
    m = len(matrix)
    for k in range(1, m + 1):
        for l in range(1, m + 1):
            x = matrix[k - 1][l - 1]
            if x > 0:
                triples += [(_vp(k), _vp(l), x), (_vm(k), _vm(l), x)]
            elif x < 0:
                triples += [(_vp(k), _vm(l), -x), (_vm(k), _vp(l), -x)]
    return triples


def matpow_entry_gadget(matrix, i: int, j: int):
    """(G, v0, v+, v-) with (M^n)_ij = N(G, v0, v+, n) - N(G, v0, v-, n); i, j are 1-based.

    G has nodes v_k^+ and v_k^-; a positive entry M_kl links same-sign
    copies, a negative one links opposite signs, both with weight |M_kl|.
    """
    matrix = _square(matrix, "matrix")
    m = len(matrix)
    if not (1 <= i <= m and 1 <= j <= m):
        raise InputError(f"entry ({i}, {j}) is outside a {m}x{m} matrix")
    nodes = [name for k in range(1, m + 1) for name in (_vp(k), _vm(k))]
    return WeightedMultigraph.from_edges(nodes, _gadget_edges(matrix)), _vp(i), _vp(j), _vm(j)


def posmat_to_multigraph(inst: MatPowInstance):
    """(G, v0, v+, v-) with f(M^n) = N(G, v0, v+, n+2) - N(G, v0, v-, n+2) for all n."""
    m = inst.size
    nodes = ["v0", "v+", "v-"]
    triples = []
    base = _gadget_edges(inst.matrix)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            pre = f"g{i}_{j}/"
            nodes += [pre + name for k in range(1, m + 1) for name in (_vp(k), _vm(k))]
            triples += [(pre + s, pre + t, w) for s, t, w in base]
            triples.append(("v0", pre + _vp(i), 1))
            b = inst.fn[i - 1][j - 1]
            if b > 0:
                triples += [(pre + _vp(j), "v+", b), (pre + _vm(j), "v-", b)]
            elif b < 0:
                triples += [(pre + _vp(j), "v-", -b), (pre + _vm(j), "v+", -b)]
    return WeightedMultigraph.from_edges(nodes, triples), "v0", "v+", "v-"


def weight_budget(*graphs) -> int:
    """Smallest valid unweighting length: bit length of the largest weight (at least 1)."""
    return max([1] + [e.weight.bit_length() for g in graphs for e in g.edges])


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = 0

    def __call__(self, hint):
        while True:
            self.counter += 1
            name = f"{hint}~{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def unweight(g: WeightedMultigraph, k: int) -> WeightedMultigraph:
    """Replace each weight-w edge by w parallel paths of length k, so that
    N(G, u, v, n) = N(G', u, v, n*k) for original nodes u, v.

    Recursive halving: with budget b, weight 1 becomes a fresh path of
    length b; weight w >= 2 becomes two parallel edges into a fresh node
    followed by weight w//2 with budget b-1, plus (w odd) a fresh path of
    length b.
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InputError("path length k must be a positive int")
    need = weight_budget(g)
    if k < need:
        raise InputError(f"k = {k} is below the bit length {need} of the largest weight")
    fresh = _Fresh(g.nodes)
    nodes = list(g.nodes)
    triples = []

    def path(s, t, length, hint):
        cur = s
        for step in range(length):
            if step == length - 1:
                nxt = t
            else:
                nxt = fresh(hint)
                nodes.append(nxt)
            triples.append((cur, nxt, 1))
            cur = nxt

    def expand(s, t, w, budget, hint):
        if w == 1:
            path(s, t, budget, hint)
            return
        mid = fresh(hint)
        nodes.append(mid)
        triples.extend([(s, mid, 1), (s, mid, 1)])
        expand(mid, t, w // 2, budget - 1, hint)
        if w % 2:
            path(s, t, budget, hint)

    for e in g.edges:
        expand(e.source, e.target, e.weight, k, f"e{e.id}")
    return WeightedMultigraph.from_edges(nodes, triples)


def add_one_path(g: WeightedMultigraph, v0, v1):
    """(G0, G1) with N(G0, v0, v1, n+2) = N(G, v0, v1, n) and N(G1, v0, v1, n+2) = N(G, v0, v1, n) + 1.

    Edge endpoints at v0 and v1 move to fresh copies v0*, v1*, joined by
    v0 -> v0* and v1* -> v1.  G1 also gets a fresh looping node on a
    v0 -> v -> v1 detour.
    """
    if v0 not in g.nodes or v1 not in g.nodes:
        raise InputError(f"unknown node {v0!r} or {v1!r}")
    if v0 == v1:
        raise InputError("add_one_path needs distinct endpoints")
    fresh = _Fresh(g.nodes)
    s0, s1 = fresh(f"{v0}*"), fresh(f"{v1}*")
    move = {v0: s0, v1: s1}
    triples = [(move.get(e.source, e.source), move.get(e.target, e.target), e.weight) for e in g.edges]
    base_nodes = list(g.nodes) + [s0, s1]
    base = triples + [(v0, s0, 1), (s1, v1, 1)]
    g0 = WeightedMultigraph.from_edges(base_nodes, base)
    loop = fresh("loop")
    g1 = WeightedMultigraph.from_edges(base_nodes + [loop], base + [(v0, loop, 1), (loop, v1, 1), (loop, loop, 1)])
    return g0, g1


def graph_to_dfa(g: WeightedMultigraph, v0, v1, d: int) -> Dfa:
    """DFA over {a, b} with N(G, v0, v1, n) = N(A, {a: n, b: n(d-1)}).

    The j-th out-edge (1-based) of a node becomes the run b^(j-1) a b^(d-j).
    Runs of one node share their leading b's, which keeps the automaton
    deterministic.
    """
    if any(e.weight != 1 for e in g.edges):
        raise InputError("graph_to_dfa needs an unweighted graph (all weights 1)")
    if v0 not in g.nodes or v1 not in g.nodes:
        raise InputError(f"unknown node {v0!r} or {v1!r}")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InputError("d must be a positive int")
    if g.max_out_multiplicity() > d:
        raise InputError(f"d = {d} is below the maximal out-degree {g.max_out_multiplicity()}")
    fresh = _Fresh(g.nodes)
    states = list(g.nodes)
    trans = []
    for v in g.nodes:
        spine = v
        for j, e in enumerate(g.out_edges(v), 1):
            if j > 1:
                nxt = fresh(f"{v}.b")
                states.append(nxt)
                trans.append((spine, "b", nxt))
                spine = nxt
            cur, letter = spine, "a"
            for _ in range(d - j):
                nxt = fresh(f"{v}.r")
                states.append(nxt)
                trans.append((cur, letter, nxt))
                cur, letter = nxt, "b"
            trans.append((cur, letter, e.target))
    return Dfa(("a", "b"), tuple(states), v0, frozenset([v1]), tuple(trans))


def graph_vector(length: int, d: int) -> ParikhVector:
    return ParikhVector({"a": length, "b": length * (d - 1)})


@dataclass(frozen=True)
class PosMatPowPipeline:
    """Every stage of the reduction from f(M^n) >= 0 to a PIC instance."""

    instance: MatPowInstance
    graph: WeightedMultigraph
    v0: str
    v_plus: str
    v_minus: str
    k: int
    unweighted: WeightedMultigraph
    g_plus: WeightedMultigraph
    g_minus: WeightedMultigraph
    d: int
    length: int
    a: Dfa
    b: Dfa
    p: ParikhVector


def build_posmatpow(inst: MatPowInstance) -> PosMatPowPipeline:
    """N(a, p) - N(b, p) = f(M^n) + 1 for the returned automata."""
    g, v0, vp, vm = posmat_to_multigraph(inst)
    k = weight_budget(g)
    g1 = unweight(g, k)
    g_plus = add_one_path(g1, v0, vp)[1]
    g_minus = add_one_path(g1, v0, vm)[0]
    d = max(1, g_plus.max_out_multiplicity(), g_minus.max_out_multiplicity())
    length = (inst.n + 2) * k + 2
    return PosMatPowPipeline(
        inst, g, v0, vp, vm, k, g1, g_plus, g_minus, d, length,
        graph_to_dfa(g_plus, v0, vp, d), graph_to_dfa(g_minus, v0, vm, d), graph_vector(length, d),
    )


def posmatpow_difference(inst: MatPowInstance, method="dp") -> int:
    pipe = build_posmatpow(inst)
    return count_dfa(pipe.a, pipe.p, method) - count_dfa(pipe.b, pipe.p, method)


def posmatpow_decide(inst: MatPowInstance, method="dp") -> bool:
    """f(M^n) >= 0, decided as N(a, p) > N(b, p) on the generated DFA."""
    pipe = build_posmatpow(inst)
    return count_dfa(pipe.a, pipe.p, method) > count_dfa(pipe.b, pipe.p, method)


# -------------------------------------------------------------- subset sum


def gen_subsetsum_cfg(values) -> Cfg:
    """Grammar over {a} generating a^s exactly for the subset sums s of ``values``.

    ``D{i}_{k}`` derives a^(2^k) by doubling, ``V{i}`` concatenates the
    powers in the binary expansion of value i, and ``A{i} -> V{i} | eps``.
    """
    values = list(values)
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputError(f"values must be positive ints, got {v!r}")
    nts = ["S"]
    prods = []
    for i, v in enumerate(values, 1):
        nts += [f"A{i}", f"V{i}"]
        bits = v.bit_length()
        for k in range(bits):
            nts.append(f"D{i}_{k}")
            prods.append((f"D{i}_{k}", ("a",) if k == 0 else (f"D{i}_{k - 1}",) * 2))
        prods.append((f"V{i}", tuple(f"D{i}_{k}" for k in range(bits) if v >> k & 1)))
        prods += [(f"A{i}", (f"V{i}",)), (f"A{i}", ())]
    prods.insert(0, ("S", tuple(f"A{i}" for i in range(1, len(values) + 1))))
    return Cfg(tuple(nts), ("a",), "S", tuple(prods))


def subset_sums(values):
    sums = {0}
    for v in values:
        sums |= {s + v for s in sums}
    return sums

"""Cost Markov chains: exact distribution of the total cost at the target.

Two routes compute P(K |= phi):

* ``cost_dp`` propagates probability mass over (state, accumulated cost);
* ``parikh_best`` sums, over every edge-count vector p with cost in the
  satisfying set, the number of q0 -> t paths with edge multiset p
  (counted on the chain viewed as a DFA over its own edges, via the Euler
  circuit engine) times the path probability.

Both start from the zero-cost-contracted chain, in which every zero-cost
edge leads to the target, so a path of cost i uses at most i+1 edges.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from . import config
from .automata import Dfa, ParikhVector, augment_well_formed
from .counting import _best_sum, count_dfa
from .errors import ConsistencyError, InputError, SizeGuardError, StructuralError, UnboundedError
from .linalg import solve_exact

Probability = Fraction
COST_METHODS = ("cost_dp", "parikh_best")


# ---------------------------------------------------------------- formulas


class CostFormula:
    """Boolean combination of atoms ``x <= b``."""

    def holds(self, n: int) -> bool:
        raise NotImplementedError

    def max_constant(self) -> int:
        raise NotImplementedError

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


@dataclass(frozen=True)
class Atom(CostFormula):
    bound: int

    def __post_init__(self):
        if isinstance(self.bound, bool) or not isinstance(self.bound, int) or self.bound < 0:
            raise InputError(f"atom bound must be a non-negative int, got {self.bound!r}")

    def holds(self, n):
        return n <= self.bound

    def max_constant(self):
        return self.bound

    def __str__(self):
        return f"x <= {self.bound}"


@dataclass(frozen=True)
class Not(CostFormula):
    arg: CostFormula

    def holds(self, n):
        return not self.arg.holds(n)

    def max_constant(self):
        return self.arg.max_constant()

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And(CostFormula):
    left: CostFormula
    right: CostFormula

    def holds(self, n):
        return self.left.holds(n) and self.right.holds(n)

    def max_constant(self):
        return max(self.left.max_constant(), self.right.max_constant())

    def __str__(self):
        return f"({self.left}) & ({self.right})"


@dataclass(frozen=True)
class Or(CostFormula):
    left: CostFormula
    right: CostFormula

    def holds(self, n):
        return self.left.holds(n) or self.right.holds(n)

    def max_constant(self):
        return max(self.left.max_constant(), self.right.max_constant())

    def __str__(self):
        return f"({self.left}) | ({self.right})"


def formula_sat(n: int, phi: CostFormula) -> bool:
    return phi.holds(n)


def formula_cofinite(phi: CostFormula) -> bool:
    """True iff infinitely many n satisfy phi; truth is constant above the largest bound."""
    return phi.holds(phi.max_constant() + 1)


def satisfying_costs(phi: CostFormula):
    """The finite satisfying set of a non-cofinite formula, ascending."""
    if formula_cofinite(phi):
        raise InputError("formula has an infinite satisfying set")
    return [i for i in range(phi.max_constant() + 1) if phi.holds(i)]


# ------------------------------------------------------------------ chains


class ChainEdge(NamedTuple):
    source: object
    cost: int
    target: object
    probability: Fraction

    @property
    def key(self):
        return (self.source, self.cost, self.target)


@dataclass(frozen=True)
class CostChain:
    states: tuple
    initial: object
    target: object
    edges: tuple

    def __post_init__(self):
        states = tuple(dict.fromkeys(self.states))
        known = set(states)
        if self.initial not in known:
            raise InputError(f"initial state {self.initial!r} is not declared")
        if self.target not in known:
            raise InputError(f"target state {self.target!r} is not declared")
        edges = []
        for raw in self.edges:
            src, cost, dst, prob = raw
            if src not in known or dst not in known:
                raise InputError(f"edge {tuple(raw)!r} uses an undeclared state")
            if isinstance(cost, bool) or not isinstance(cost, int) or cost < 0:
                raise InputError(f"edge {tuple(raw)!r}: cost must be a non-negative int")
            if isinstance(prob, float) or not isinstance(prob, (int, Fraction)):
                raise InputError(f"edge {tuple(raw)!r}: probability must be an exact rational")
            prob = Fraction(prob)
            if not 0 < prob <= 1:
                raise InputError(f"edge {tuple(raw)!r}: probability must lie in (0, 1]")
            edges.append(ChainEdge(src, cost, dst, prob))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "edges", tuple(edges))

    def out_edges(self, q):
        return tuple(e for e in self.edges if e.source == q)

    def reachable(self):
        succ = {}
        for e in self.edges:
            succ.setdefault(e.source, []).append(e.target)
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            q = stack.pop()
            for d in succ.get(q, ()):
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        return tuple(q for q in self.states if q in seen)

    def max_cost(self):
        return max((e.cost for e in self.edges), default=0)


def validate(chain: CostChain):
    """List of human-readable invariant violations; empty when the chain is valid."""
    problems = []
    keys = {}
    for e in chain.edges:
        if e.key in keys:
            problems.append(f"duplicate edge {e.source} -> {e.target} with cost {e.cost}")
        keys[e.key] = e
    t = chain.target
    t_edges = chain.out_edges(t)
    if len(t_edges) != 1 or t_edges[0].key != (t, 0, t) or t_edges[0].probability != 1:
        problems.append(f"target {t} must have exactly the self-edge ({t}, 0, {t}) with probability 1")
    for q in chain.states:
        if q == t:
            continue
        total = sum((e.probability for e in chain.out_edges(q)), Fraction(0))
        if total != 1:
            problems.append(f"outgoing probabilities of state {q} sum to {total}, not 1")
    pred = {}
    for e in chain.edges:
        pred.setdefault(e.target, []).append(e.source)
    reaches_t = {t}
    stack = [t]
    while stack:
        q = stack.pop()
        for s in pred.get(q, ()):
            if s not in reaches_t:
                reaches_t.add(s)
                stack.append(s)
    for q in chain.reachable():
        if q not in reaches_t:
            problems.append(f"state {q} is reachable from {chain.initial} but cannot reach the target {t}")
    return problems


def check_valid(chain: CostChain):
    problems = validate(chain)
    if problems:
        raise StructuralError("invalid cost chain: " + "; ".join(problems))


def _merge(edges):
    merged = {}
    for src, cost, dst, prob in edges:
        key = (src, cost, dst)
        merged[key] = merged.get(key, Fraction(0)) + prob
    return tuple(ChainEdge(s, c, d, p) for (s, c, d), p in merged.items())


def contract_zero_cost(chain: CostChain) -> CostChain:
    """Equivalent chain (same cost distribution) whose zero-cost edges all lead to the target.

    For every reachable state q and every "exit" edge e (positive cost or
    into t), the probability that e is the first exit edge taken from q
    solves ``x_q = [src(e) = q] P(e) + sum over zero-cost q -> q' of P * x_q'``.
    Unreachable states are dropped.
    """
    check_valid(chain)
    t = chain.target
    live = [q for q in chain.reachable() if q != t]
    if not live:
        return CostChain((t,), chain.initial, t, ((t, 0, t, Fraction(1)),))
    index = {q: i for i, q in enumerate(live)}
    exits = [e for e in chain.edges if e.source in index and (e.cost > 0 or e.target == t)]
    n = len(live)
    a = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    b = [[Fraction(0)] * len(exits) for _ in range(n)]
    for e in chain.edges:
        if e.source in index and e.cost == 0 and e.target != t:
            a[index[e.source]][index[e.target]] -= e.probability
    for col, e in enumerate(exits):
        b[index[e.source]][col] = e.probability
    try:
        x = solve_exact(a, b) if exits else [[] for _ in range(n)]
    except ZeroDivisionError:
        raise ConsistencyError("zero-cost contraction system is singular") from None
    new_edges = []
    for q in live:
        for col, e in enumerate(exits):
            p = x[index[q]][col]
            if p:
                new_edges.append((q, e.cost, e.target, p))
    new_edges.append((t, 0, t, Fraction(1)))
    states = tuple(q for q in chain.states if q in index or q == t)
    out = CostChain(states, chain.initial, t, _merge(new_edges))
    check_valid(out)
    return out


def is_contracted(chain: CostChain) -> bool:
    return all(e.cost > 0 or e.target == chain.target for e in chain.edges)


# ------------------------------------------------------------- cost DP route


def cost_distribution(chain: CostChain, max_cost: int):
    """[P(K = 0), ..., P(K = max_cost)] by mass propagation on the contracted chain."""
    contracted = chain if is_contracted(chain) else contract_zero_cost(chain)
    cap = config.cost_dp_cap()
    if (max_cost + 1) * len(contracted.states) > cap:
        raise SizeGuardError(f"cost DP table ({max_cost + 1} x {len(contracted.states)}) exceeds cap {cap}")
    t = contracted.target
    arrive = [Fraction(0)] * (max_cost + 1)
    if contracted.initial == t:
        arrive[0] = Fraction(1)
        return arrive
    out = {q: contracted.out_edges(q) for q in contracted.states}
    mass = [dict() for _ in range(max_cost + 1)]
    mass[0][contracted.initial] = Fraction(1)
    for s in range(max_cost + 1):
        for q in contracted.states:
            m = mass[s].get(q)
            if not m:
                continue
            for e in out[q]:
                s2 = s + e.cost
                if s2 > max_cost:
                    continue
                if e.target == t:
                    arrive[s2] += m * e.probability
                else:
                    mass[s2][e.target] = mass[s2].get(e.target, Fraction(0)) + m * e.probability
    return arrive


# ---------------------------------------------------------- Parikh route


def edge_dfa(contracted: CostChain) -> Dfa:
    """The chain as a DFA over its own edges; the target has no outgoing transitions."""
    t = contracted.target
    trans = tuple((e.source, e.key, e.target) for e in contracted.edges if e.source != t)
    return Dfa(tuple(e.key for e in contracted.edges if e.source != t), contracted.states,
               contracted.initial, frozenset([t]), trans)


def _path_dp(contracted: CostChain, p: ParikhVector) -> int:
    """Independent oracle: q0 -> t paths (first arrival) using each edge exactly p(e) times."""
    t = contracted.target
    edges = [e for e in contracted.edges if e.source != t]
    if any(k not in {e.key for e in edges} for k in p):
        return 0
    if contracted.initial == t:
        return int(p.norm() == 0)
    keys = [e.key for e in edges]

    @lru_cache(maxsize=None)
    def paths(q, rem):
        total = 0
        for i, e in enumerate(edges):
            if e.source != q or not rem[i]:
                continue
            nxt = rem[:i] + (rem[i] - 1,) + rem[i + 1:]
            if e.target == t:
                total += not any(nxt)
            else:
                total += paths(e.target, nxt)
        return total

    return paths(contracted.initial, tuple(p[k] for k in keys))


def count_chain_paths(contracted: CostChain, p, verify=True) -> int:
    """N(C, p): paths from q0 up to the first arrival at t with edge multiset p."""
    if not is_contracted(contracted):
        raise InputError("count_chain_paths expects a zero-cost-contracted chain")
    p = ParikhVector(p)
    dfa = edge_dfa(contracted)
    known = set(dfa.alphabet)
    if any(k not in known for k in p):
        n_best = 0
    elif contracted.initial == contracted.target:
        n_best = int(p.norm() == 0)
    else:
        n_best = count_dfa(dfa, p, "best")
    if verify:
        n_dp = _path_dp(contracted, p)
        if n_dp != n_best:
            raise ConsistencyError(f"path counts disagree: BEST {n_best}, DP {n_dp}")
    return n_best


def _edge_vectors(contracted: CostChain, c: int, shard=None):
    """Edge-count vectors (over non-target edges) with total cost <= c, exactly one
    edge into the target, and in/out balance (closing the path with t -> q0)."""
    t = contracted.target
    q0 = contracted.initial
    edges = [e for e in contracted.edges if e.source != t]
    n = len(edges)
    sidx = {q: i for i, q in enumerate(contracted.states)}
    bal = [0] * len(contracted.states)
    # the virtual return edge t -> q0
    bal[sidx[t]] -= 1
    bal[sidx[q0]] += 1
    counts = [0] * n
    later = [[[] for _ in contracted.states] for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        later[i] = [list(x) for x in later[i + 1]]
        e = edges[i]
        if e.source != e.target:
            later[i][sidx[e.source]].append(i)
            later[i][sidx[e.target]].append(i)
    state = {"into_t": 0, "cost": 0, "shard": 0}

    def max_count(i):
        e = edges[i]
        if e.target == t:
            return 1 - state["into_t"]
        return (c - state["cost"]) // e.cost

    def feasible(pos):
        for v, b in enumerate(bal):
            if b:
                cap = sum(max_count(i) for i in later[pos][v])
                if abs(b) > cap:
                    return False
        return True

    def rec(pos):
        if pos == n:
            if state["into_t"] == 1:
                yield tuple(counts)
            return
        e = edges[pos]
        si, di = sidx[e.source], sidx[e.target]
        for k in range(max_count(pos) + 1):
            counts[pos] = k
            state["cost"] += k * e.cost
            state["into_t"] += k if e.target == t else 0
            bal[si] -= k
            bal[di] += k
            ok = True
            if shard is not None and pos == 0:
                ok = k % shard[1] == shard[0]
            if ok and feasible(pos + 1):
                yield from rec(pos + 1)
            bal[si] += k
            bal[di] -= k
            state["cost"] -= k * e.cost
            state["into_t"] -= k if e.target == t else 0
        counts[pos] = 0

    for vec in rec(0):
        yield {edges[i].key: k for i, k in enumerate(vec) if k}


def _parikh_numerator(contracted: CostChain, sat: frozenset, c: int, shard=None) -> int:
    """sum over p with K(p) in sat of N(C, p) * prod m_e^p(e) * d_e^(c+1-p(e))."""
    dfa = edge_dfa(contracted)
    wf, _ = augment_well_formed(dfa, {})
    b = wf.alphabet[-1]
    by_key = {e.key: e for e in contracted.edges}
    total = 0
    for vec in _edge_vectors(contracted, c, shard):
        cost = sum(by_key[k].cost * n for k, n in vec.items())
        if cost not in sat:
            continue
        n_paths = _best_sum(wf, ParikhVector(vec).with_letter(b, 1))
        if not n_paths:
            continue
        term = n_paths
        for e in contracted.edges:
            k = vec.get(e.key, 0)
            term *= e.probability.numerator ** k * e.probability.denominator ** (c + 1 - k)
        total += term
    return total


def _parikh_shard(args):
    contracted, sat, c, k, n = args
    return _parikh_numerator(contracted, sat, c, (k, n))


def parikh_fraction(chain: CostChain, phi: CostFormula, workers=1):
    """(S, D) with P(K |= phi) = S / D and D = prod_e d_e^(c+1); phi must have a finite satisfying set."""
    c = phi.max_constant()
    cap = config.best_c_cap()
    if c > cap:
        raise SizeGuardError(f"largest formula constant {c} exceeds the parikh_best cap {cap}")
    sat = frozenset(satisfying_costs(phi))
    contracted = contract_zero_cost(chain)
    denominator = 1
    for e in contracted.edges:
        denominator *= e.probability.denominator ** (c + 1)
    if contracted.initial == contracted.target:
        return (denominator if 0 in sat else 0), denominator
    if workers <= 1:
        numerator = _parikh_numerator(contracted, sat, c)
    else:
        jobs = [(contracted, sat, c, k, workers) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            numerator = sum(pool.map(_parikh_shard, jobs))
    return numerator, denominator


def cost_prob(chain: CostChain, phi: CostFormula, method="cost_dp", workers=1) -> Fraction:
    """Exact P(K |= phi).  Cofinite formulas go through 1 - P(K |= !phi)."""
    check_valid(chain)
    if method not in COST_METHODS:
        raise InputError(f"unknown method {method!r}; choose from {COST_METHODS}")
    if formula_cofinite(phi):
        return 1 - cost_prob(chain, Not(phi), method, workers)
    if method == "parikh_best":
        num, den = parikh_fraction(chain, phi, workers)
        return Fraction(num, den)
    dist = cost_distribution(chain, phi.max_constant())
    return sum((dist[i] for i in satisfying_costs(phi)), Fraction(0))


def _as_probability(tau):
    if isinstance(tau, float):
        raise InputError("thresholds must be exact rationals, not floats")
    tau = Fraction(tau)
    if not 0 <= tau <= 1:
        raise InputError(f"threshold {tau} is outside [0, 1]")
    return tau


def cost_decide(chain: CostChain, phi: CostFormula, tau, method="cost_dp", workers=1) -> bool:
    """Does P(K |= phi) >= tau hold?  Compared exactly, on integers for parikh_best."""
    tau = _as_probability(tau)
    check_valid(chain)
    if method != "parikh_best":
        return cost_prob(chain, phi, method, workers) >= tau
    m, d = tau.numerator, tau.denominator
    if formula_cofinite(phi):
        num, den = parikh_fraction(chain, Not(phi), workers)
        # P(!phi) <= 1 - tau
        return d * num <= (d - m) * den
    num, den = parikh_fraction(chain, phi, workers)
    return d * num >= m * den


def bitcost(chain: CostChain, phi: CostFormula, j: int, method="cost_dp", workers=1) -> int:
    """floor(2^j * P(K |= phi)) mod 2; bit 1 is the 1/2 place, bit 0 the integer part."""
    if j < 0:
        raise InputError("bit index must be non-negative")
    check_valid(chain)
    if method != "parikh_best":
        p = cost_prob(chain, phi, method, workers)
        return (p.numerator * 2**j // p.denominator) & 1
    if formula_cofinite(phi):
        num, den = parikh_fraction(chain, Not(phi), workers)
        return ((2**j * (den - num)) // den) & 1
    num, den = parikh_fraction(chain, phi, workers)
    return ((2**j * num) // den) & 1


def support_bounded(chain: CostChain) -> bool:
    """True iff K takes finitely many values: no cycle among live states after contraction."""
    contracted = contract_zero_cost(chain)
    t = contracted.target
    succ = {}
    for e in contracted.edges:
        if e.source != t and e.target != t:
            succ.setdefault(e.source, []).append(e.target)
    colour = {}

    def cyclic(q):
        colour[q] = 1
        for d in succ.get(q, ()):
            if colour.get(d) == 1 or (d not in colour and cyclic(d)):
                return True
        colour[q] = 2
        return False

    return not any(q not in colour and cyclic(q) for q in contracted.states)


def quantile(chain: CostChain, tau, method="cost_dp") -> int:
    """Smallest b with P(K <= b) >= tau."""
    tau = _as_probability(tau)
    if tau <= 0:
        raise InputError("quantile level must be positive")
    check_valid(chain)
    if tau == 1 and not support_bounded(chain):
        raise UnboundedError("P(K <= b) < 1 for every b: the cost support is unbounded")

    def cdf(b):
        return cost_prob(chain, Atom(b), method)

    hi = max(chain.max_cost(), 1)
    while cdf(hi) < tau:
        hi *= 2
    lo = -1  # invariant: cdf(lo) < tau <= cdf(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cdf(mid) >= tau:
            hi = mid
        else:
            lo = mid
    return hi


def expected_cost(chain: CostChain) -> Fraction:
    """E[K] from the linear system E_q = sum_e P(e) (k(e) + E_target(e)), E_t = 0."""
    check_valid(chain)
    t = chain.target
    live = [q for q in chain.reachable() if q != t]
    if not live:
        return Fraction(0)
    index = {q: i for i, q in enumerate(live)}
    n = len(live)
    a = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    r = [[Fraction(0)] for _ in range(n)]
    for e in chain.edges:
        if e.source not in index:
            continue
        i = index[e.source]
        r[i][0] += e.probability * e.cost
        if e.target != t:
            a[i][index[e.target]] -= e.probability
    try:
        x = solve_exact(a, r)
    except ZeroDivisionError:
        raise ConsistencyError("expectation system is singular") from None
    return x[index[chain.initial]][0]


def truncated_mean(chain: CostChain, upto: int) -> Fraction:
    dist = cost_distribution(chain, upto)
    return sum((i * p for i, p in enumerate(dist)), Fraction(0))


def probability_integer_form(chain: CostChain, phi: CostFormula, j: int) -> int:
    """The integer floor(2^j * S / D) whose parity is bit j (finite satisfying set only)."""
    num, den = parikh_fraction(chain, phi)
    return (2**j * num) // den


__all__ = [
    "Atom", "And", "ChainEdge", "CostChain", "CostFormula", "Not", "Or", "Probability",
    "bitcost", "check_valid", "contract_zero_cost", "cost_decide", "cost_distribution",
    "cost_prob", "count_chain_paths", "edge_dfa", "expected_cost", "formula_cofinite",
    "formula_sat", "quantile", "satisfying_costs", "support_bounded", "truncated_mean", "validate",
]

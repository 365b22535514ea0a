"""Seeded random model generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from parikhcount.automata import Dfa, Nfa, ParikhVector
from parikhcount.costchain import And, Atom, CostChain, Not, Or
from parikhcount.multigraph import WeightedMultigraph
from parikhcount.reductions import CnfFormula

LETTERS = "abc"


def random_dfa(rng: random.Random, max_states=5, max_letters=3, density=0.7) -> Dfa:
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    alphabet = LETTERS[: rng.randint(1, max_letters)]
    trans = [(q, a, rng.choice(states)) for q in states for a in alphabet if rng.random() < density]
    finals = [q for q in states if rng.random() < 0.5]
    return Dfa(tuple(alphabet), tuple(states), "q0", frozenset(finals), tuple(trans))


def random_nfa(rng: random.Random, max_states=4, max_letters=2, density=0.35, alphabet=None) -> Nfa:
    n = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(n)]
    alphabet = alphabet or LETTERS[: rng.randint(1, max_letters)]
    trans = [(q, a, d) for q in states for a in alphabet for d in states if rng.random() < density]
    finals = [q for q in states if rng.random() < 0.4]
    return Nfa(tuple(alphabet), tuple(states), "q0", frozenset(finals), tuple(trans))


def random_vector(rng: random.Random, alphabet, max_norm=6) -> ParikhVector:
    total = rng.randint(0, max_norm)
    counts = dict.fromkeys(alphabet, 0)
    for _ in range(total):
        counts[rng.choice(list(alphabet))] += 1
    return ParikhVector(counts)


def random_eulerian(rng: random.Random, max_nodes=4, max_expanded=12) -> WeightedMultigraph:
    """Union of weighted closed walks, each starting on the support built so far."""
    nodes = [f"v{i}" for i in range(rng.randint(1, max_nodes))]
    weights = {}
    support = [rng.choice(nodes)]
    for _ in range(rng.randint(1, 3)):
        length = rng.randint(1, 4)
        walk = [rng.choice(support)] + [rng.choice(nodes) for _ in range(length - 1)]
        w = rng.randint(1, 3)
        for s, t in zip(walk, walk[1:] + walk[:1]):
            weights[(s, t)] = weights.get((s, t), 0) + w
        support = sorted(set(support) | set(walk))
        if sum(weights.values()) > max_expanded:
            break
    while sum(weights.values()) > max_expanded:
        return random_eulerian(rng, max_nodes, max_expanded)
    return WeightedMultigraph.from_edges(nodes, [(s, t, w) for (s, t), w in sorted(weights.items())])


def _split(rng, parts, denominators=(2, 3, 4, 5, 6, 10)):
    """Random probability vector with ``parts`` positive entries."""
    d = rng.choice(denominators)
    while d < parts:
        d *= 2
    cuts = sorted(rng.sample(range(1, d), parts - 1))
    bounds = [0] + cuts + [d]
    return [Fraction(b - a, d) for a, b in zip(bounds, bounds[1:])]


def random_chain(rng: random.Random, max_states=4, max_cost=5, zero_cost=True) -> CostChain:
    """Valid chain; every non-target state has an edge into the target."""
    n = rng.randint(1, max_states)
    live = [f"s{i}" for i in range(n)]
    t = "t"
    edges = []
    for q in live:
        low = 0 if zero_cost else 1
        keys = {(rng.randint(low, max_cost), t)}
        for _ in range(rng.randint(0, 2)):
            keys.add((rng.randint(low, max_cost), rng.choice(live + [t])))
        keys = sorted(keys)
        for (cost, dst), p in zip(keys, _split(rng, len(keys))):
            edges.append((q, cost, dst, p))
    edges.append((t, 0, t, Fraction(1)))
    return CostChain(tuple(live + [t]), "s0", t, tuple(edges))


def random_formula(rng: random.Random, max_bound=30, depth=2):
    if depth == 0 or rng.random() < 0.4:
        return Atom(rng.randint(0, max_bound))
    kind = rng.choice("!&|")
    if kind == "!":
        return Not(random_formula(rng, max_bound, depth - 1))
    left, right = random_formula(rng, max_bound, depth - 1), random_formula(rng, max_bound, depth - 1)
    return And(left, right) if kind == "&" else Or(left, right)


def random_cnf(rng: random.Random, max_vars=4, max_clauses=4) -> CnfFormula:
    n = rng.randint(3, max_vars)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n, tuple(clauses))

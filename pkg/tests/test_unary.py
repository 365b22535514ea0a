import random

import pytest

from parikhcount.automata import Cfg, Dfa, Nfa
from parikhcount.errors import InputError, SizeGuardError
from parikhcount.reductions import gen_subsetsum_cfg, subset_sums
from parikhcount.unary import (
    bounded_reach, lasso_decompose, unary_cfg_member, unary_dfa_member, unary_nfa_member, unary_pic,
)
from randmodels import random_nfa


def cycle_dfa(tail, period, finals):
    states = [str(i) for i in range(tail + period)]
    trans = [(states[i], "a", states[i + 1]) for i in range(tail + period - 1)]
    trans.append((states[-1], "a", states[tail]))
    return Dfa("a", tuple(states), "0", frozenset(str(f) for f in finals), tuple(trans))


def random_unary_dfa(rng):
    n = rng.randint(1, 6)
    states = [f"q{i}" for i in range(n)]
    trans = [(q, "a", rng.choice(states)) for q in states if rng.random() < 0.9]
    finals = [q for q in states if rng.random() < 0.5]
    return Dfa("a", tuple(states), "q0", frozenset(finals), tuple(trans))


def simulate(dfa, n):
    q = dfa.initial
    for _ in range(n):
        q = dfa.step(q, "a")
        if q is None:
            return False
    return q in dfa.finals


def boolean_power_oracle(nfa, p1, p2, c):
    states = list(nfa.states)
    idx = {q: i for i, q in enumerate(states)}
    adj = [[False] * len(states) for _ in states]
    for s, _, d in nfa.transitions:
        adj[idx[s]][idx[d]] = True
    cur = [[i == j for j in range(len(states))] for i in range(len(states))]
    for _ in range(c):
        cur = [[any(cur[i][k] and adj[k][j] for k in range(len(states))) for j in range(len(states))] for i in range(len(states))]
    return cur[idx[p1]][idx[p2]]


def test_lasso_shapes():
    s = lasso_decompose(cycle_dfa(0, 3, [0]))
    assert (s.tail, s.period) == (0, 3)
    s = lasso_decompose(cycle_dfa(2, 3, []))
    assert (s.tail, s.period) == (2, 3)
    loop = Dfa("a", ("q",), "q", ("q",), (("q", "a", "q"),))
    s = lasso_decompose(loop)
    assert (s.tail, s.period, s.accepting) == (0, 1, frozenset({0}))


def test_lasso_huge_n():
    d = cycle_dfa(0, 3, [0])
    assert unary_dfa_member(d, 10**18) is False
    assert unary_dfa_member(d, 10**18 + 2) is True
    assert unary_dfa_member(d, 0) is True


def test_incomplete_dfa_has_dead_tail():
    d = Dfa("a", ("p", "q"), "p", ("q",), (("p", "a", "q"),))
    s = lasso_decompose(d)
    assert s.run[-1] is None
    assert [unary_dfa_member(d, n) for n in range(5)] == [False, True, False, False, False]


def test_lasso_matches_simulation():
    rng = random.Random(101)
    for _ in range(100):
        d = random_unary_dfa(rng)
        s = lasso_decompose(d)
        for n in range(3 * (s.tail + s.period) + 1):
            assert unary_dfa_member(d, n) == simulate(d, n)


def test_bounded_reach():
    two = Nfa("a", ("x", "y"), "x", ("x",), (("x", "a", "y"), ("y", "a", "x")))
    assert bounded_reach(two, "x", "x", 0) and not bounded_reach(two, "x", "y", 0)
    assert all(bounded_reach(two, "x", "x", c) == (c % 2 == 0) for c in range(7))
    with pytest.raises(SizeGuardError):
        bounded_reach(two, "x", "x", 7)
    rng = random.Random(103)
    for _ in range(100):
        nfa = random_nfa(rng, max_states=4, alphabet="a")
        p1, p2 = rng.choice(nfa.states), rng.choice(nfa.states)
        c = rng.randint(0, len(nfa.states) ** 2)
        assert bounded_reach(nfa, p1, p2, c) == boolean_power_oracle(nfa, p1, p2, c)


def test_nfa_membership_examples():
    universal = Nfa("a", ("q",), "q", ("q",), (("q", "a", "q"),))
    assert unary_nfa_member(universal, 10**9)
    even = Nfa("a", ("x", "y"), "x", ("x",), (("x", "a", "y"), ("y", "a", "x")))
    for n in (7, 10**12 + 1):
        assert not unary_nfa_member(even, n) and not unary_nfa_member(even, n, "matpow")
    assert unary_nfa_member(even, 10**12)
    with pytest.raises(InputError):
        unary_nfa_member(even, 3, "nope")


def test_sawa_matches_matpow():
    rng = random.Random(107)
    for _ in range(60):
        nfa = random_nfa(rng, max_states=6, alphabet="a", density=0.3)
        m = len(nfa.states)
        for n in list(range(m * m + 6)) + [rng.randint(0, 10**12) for _ in range(5)]:
            assert unary_nfa_member(nfa, n) == unary_nfa_member(nfa, n, "matpow")


def test_cfg_membership():
    g = Cfg(("S",), ("a",), "S", (("S", ("a", "S")), ("S", ("a",))))
    assert unary_cfg_member(g, 5) and not unary_cfg_member(g, 0)
    ss = gen_subsetsum_cfg([3, 5])
    assert unary_cfg_member(ss, 8) and not unary_cfg_member(ss, 7)
    # doubling grammar for a^8
    dbl = Cfg(("S", "A", "B", "C"), ("a",), "S",
              (("S", ("A", "A")), ("A", ("B", "B")), ("B", ("C", "C")), ("C", ("a",))))
    assert unary_cfg_member(dbl, 8) and not unary_cfg_member(dbl, 6)
    with pytest.raises(SizeGuardError):
        unary_cfg_member(g, 10**4 + 1)


def test_cfg_member_matches_subset_sums():
    rng = random.Random(109)
    for _ in range(20):
        values = [rng.randint(1, 12) for _ in range(rng.randint(1, 4))]
        sums = subset_sums(values)
        g = gen_subsetsum_cfg(values)
        assert all(unary_cfg_member(g, n) == (n in sums) for n in range(sum(values) + 3))


def test_unary_pic():
    universal = Dfa("a", ("q",), "q", ("q",), (("q", "a", "q"),))
    empty = Dfa("a", ("q",), "q", (), ())
    assert all(unary_pic(universal, empty, n) for n in (0, 5, 10**15))
    assert not unary_pic(universal, universal, 3)
    rng = random.Random(113)
    for _ in range(40):
        a, b = random_unary_dfa(rng), random_unary_dfa(rng)
        for n in range(0, 201, 7):
            assert unary_pic(a, b, n) == (simulate(a, n) and not simulate(b, n))


def test_non_unary_rejected():
    d = Dfa("ab", ("q",), "q", ("q",), ())
    with pytest.raises(InputError):
        lasso_decompose(d)
    with pytest.raises(InputError):
        unary_dfa_member(cycle_dfa(0, 1, [0]), -1)

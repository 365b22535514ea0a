"""Hypothesis properties that cut across modules."""

import itertools
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from parikhcount.automata import Dfa, ParikhVector
from parikhcount.costchain import And, Atom, CostChain, Not, Or, cost_prob, formula_cofinite
from parikhcount.counting import count_dfa, multinomial_bound, pic
from parikhcount.formats import format_parikh, parse_formula, parse_parikh
from parikhcount.linalg import bareiss_det
from parikhcount.unary import lasso_decompose, unary_dfa_member

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def dfas(draw, letters="ab", max_states=4):
    n = draw(st.integers(1, max_states))
    states = tuple(f"q{i}" for i in range(n))
    trans = []
    for q in states:
        for a in letters:
            dst = draw(st.one_of(st.none(), st.sampled_from(states)))
            if dst is not None:
                trans.append((q, a, dst))
    finals = draw(st.sets(st.sampled_from(states)))
    return Dfa(tuple(letters), states, "q0", frozenset(finals), tuple(trans))


@st.composite
def formulas(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return Atom(draw(st.integers(0, 40)))
    kind = draw(st.sampled_from("!&|"))
    if kind == "!":
        return Not(draw(formulas(depth=depth - 1)))
    left, right = draw(formulas(depth=depth - 1)), draw(formulas(depth=depth - 1))
    return And(left, right) if kind == "&" else Or(left, right)


@st.composite
def chains(draw):
    """Two live states, each with an exit to t; costs in 0..6."""
    live = ("s0", "s1")
    edges = []
    for q in live:
        d = draw(st.integers(2, 8))
        to_t = draw(st.integers(1, d))
        loop = d - to_t
        edges.append((q, draw(st.integers(0, 6)), "t", Fraction(to_t, d)))
        if loop:
            edges.append((q, draw(st.integers(1, 6)), draw(st.sampled_from(live)), Fraction(loop, d)))
    edges.append(("t", 0, "t", Fraction(1)))
    return CostChain(live + ("t",), "s0", "t", tuple(edges))


def words_of_length(dfa, n):
    return sum(dfa.accepts(w) for w in itertools.product(dfa.alphabet, repeat=n))


@SETTINGS
@given(dfas(), st.integers(0, 5))
def test_counts_over_all_vectors_sum_to_language_slice(dfa, n):
    total = 0
    for k in range(n + 1):
        p = {"a": k, "b": n - k}
        best = count_dfa(dfa, p, "best")
        assert best == count_dfa(dfa, p, "dp")
        assert best <= multinomial_bound(p)
        total += best
    assert total == words_of_length(dfa, n)


@SETTINGS
@given(dfas(), dfas(), st.integers(0, 3), st.integers(0, 3))
def test_pic_is_asymmetric(a, b, i, j):
    p = {"a": i, "b": j}
    assert not (pic(a, b, p) and pic(b, a, p))


@SETTINGS
@given(chains(), formulas())
def test_complement_law(chain, phi):
    assert cost_prob(chain, phi) + cost_prob(chain, Not(phi)) == 1
    assert 0 <= cost_prob(chain, phi) <= 1


@SETTINGS
@given(chains(), formulas(depth=2))
def test_routes_agree(chain, phi):
    bound = phi.max_constant()
    if bound <= 20:
        assert cost_prob(chain, phi, "parikh_best") == cost_prob(chain, phi)


@SETTINGS
@given(formulas())
def test_formula_text_round_trip(phi):
    assert parse_formula(str(phi)) == phi
    if formula_cofinite(phi):
        assert phi.holds(phi.max_constant() + 1)


@SETTINGS
@given(st.dictionaries(st.sampled_from(["a", "b", "c", "x1", "d2_3"]), st.integers(0, 2**80)))
def test_parikh_text_round_trip(counts):
    p = ParikhVector(counts)
    assert parse_parikh(format_parikh(p)) == p


square = st.integers(1, 4).flatmap(
    lambda n: st.tuples(*[st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)] * 2)
)


@SETTINGS
@given(square)
def test_determinant_is_multiplicative(pair):
    a, b = pair
    n = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert bareiss_det(ab) == bareiss_det(a) * bareiss_det(b)


@SETTINGS
@given(dfas(letters="a", max_states=6), st.integers(0, 10**30))
def test_unary_membership_is_eventually_periodic(dfa, n):
    shape = lasso_decompose(dfa)
    m = shape.tail + n
    assert unary_dfa_member(dfa, m) == unary_dfa_member(dfa, m + shape.period)
    small = n % 40
    q = dfa.initial
    for _ in range(small):
        q = dfa.step(q, "a") if q is not None else None
    assert unary_dfa_member(dfa, small) == (q in dfa.finals)

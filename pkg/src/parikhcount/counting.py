"""Counting words with a given Parikh image.

The DFA route used for binary-size vectors goes through Euler circuits:
after the well-formed augmentation, every accepted word corresponds to
exactly one Euler circuit (up to rotation) of the multigraph obtained by
weighting each transition with how often the word uses it.  Summing the
BEST formula over all such weightings ("flows") gives the count.  The
``dp`` and ``enumerate`` methods count the same number directly and serve
as oracles.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import config
from .automata import Cfg, Dfa, Nfa, ParikhVector, augment_well_formed, determinize, words_with_image
from .errors import InputError, SizeGuardError
from .multigraph import Edge, WeightedMultigraph, euler_count

DFA_METHODS = ("best", "dp", "enumerate")
NFA_METHODS = ("determinize_dp", "enumerate")
CFG_METHODS = ("enumerate",)


@dataclass(frozen=True)
class FlowAssignment:
    """Multiplicity of every DFA transition, aligned with ``transitions``."""

    transitions: tuple
    values: tuple

    @property
    def weights(self):
        return dict(zip(self.transitions, self.values))

    def graph(self, states) -> WeightedMultigraph:
        edges = tuple(
            Edge(i, s, d, w) for i, ((s, _, d), w) in enumerate(zip(self.transitions, self.values)) if w
        )
        return WeightedMultigraph(tuple(states), edges)


def _check_vector(acceptor, p):
    p = ParikhVector(p)
    letters = set(acceptor.alphabet)
    for letter in p:
        if letter not in letters:
            raise InputError(f"Parikh vector letter {letter!r} is outside the alphabet")
    return p


def _flows(dfa: Dfa, p: ParikhVector, shard=None):
    """Depth-first search over per-letter weak compositions.

    A partial assignment is abandoned as soon as some state's
    in/out imbalance exceeds the weight that can still be placed on
    non-loop transitions touching it.  ``shard=(k, n)`` keeps only the
    first letter's compositions whose running index is k mod n.
    """
    trans = dfa.transitions
    letter_pos = {a: i for i, a in enumerate(dfa.alphabet)}
    order = sorted(range(len(trans)), key=lambda i: (letter_pos[trans[i][1]], i))
    for a in dfa.alphabet:
        if p[a] and not any(t[1] == a for t in trans):
            return
    states = dfa.states
    sidx = {q: i for i, q in enumerate(states)}
    nstates = len(states)
    seq = [trans[i] for i in order]
    letters = [letter_pos[t[1]] for t in seq]
    nseq = len(seq)
    last_of_letter = [i == nseq - 1 or letters[i + 1] != letters[i] for i in range(nseq)]
    # touch[i][v]: letters with a non-loop transition at position >= i touching v
    touch = [None] * (nseq + 1)
    touch[nseq] = [()] * nstates
    acc = [set() for _ in range(nstates)]
    for i in range(nseq - 1, -1, -1):
        s, _, d = seq[i]
        if s != d:
            acc[sidx[s]].add(letters[i])
            acc[sidx[d]].add(letters[i])
        touch[i] = [tuple(x) for x in acc]
    first_letter_end = None
    if shard is not None and nseq:
        first_letter_end = next(i for i in range(nseq) if last_of_letter[i])

    rem = [p[a] for a in dfa.alphabet]
    bal = [0] * nstates
    weights = [0] * nseq
    shard_counter = [0]

    def feasible(pos):
        t = touch[pos]
        for v in range(nstates):
            b = bal[v]
            if b:
                cap = 0
                for letter in t[v]:
                    cap += rem[letter]
                if abs(b) > cap:
                    return False
        return True

    def rec(pos):
        if pos == nseq:
            yield tuple(weights)
            return
        s, _, d = seq[pos]
        letter = letters[pos]
        r = rem[letter]
        choices = (r,) if last_of_letter[pos] else range(r + 1)
        si, di = sidx[s], sidx[d]
        for w in choices:
            weights[pos] = w
            rem[letter] = r - w
            bal[si] -= w
            bal[di] += w
            ok = True
            if pos == first_letter_end:
                k, n = shard
                ok = shard_counter[0] % n == k
                shard_counter[0] += 1
            if ok and feasible(pos + 1):
                yield from rec(pos + 1)
            bal[si] += w
            bal[di] -= w
        rem[letter] = r
        weights[pos] = 0

    inverse = [0] * nseq
    for seq_pos, orig in enumerate(order):
        inverse[orig] = seq_pos
    initial = dfa.initial
    for sw in rec(0):
        values = tuple(sw[inverse[i]] for i in range(nseq))
        if _support_connected(states, trans, values, initial):
            yield FlowAssignment(trans, values)


def _support_connected(states, trans, values, initial):
    """Support is strongly connected and contains the initial state (balance already holds)."""
    fwd, bwd = {}, {}
    support = set()
    for (s, _, d), w in zip(trans, values):
        if w:
            fwd.setdefault(s, set()).add(d)
            bwd.setdefault(d, set()).add(s)
            support.add(s)
            support.add(d)
    if not support:
        return True
    if initial not in support:
        return False
    for adj in (fwd, bwd):
        seen = {initial}
        stack = [initial]
        while stack:
            v = stack.pop()
            for w in adj.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != support:
            return False
    return True


def enumerate_flows(wf_dfa: Dfa, p):
    """All transition weightings consistent with ``p`` whose multigraph is connected Eulerian.

    ``wf_dfa`` must be well-formed (initial state is the unique final).
    """
    if not isinstance(wf_dfa, Dfa) or not wf_dfa.is_well_formed():
        raise InputError("enumerate_flows needs a well-formed DFA (initial state is the only final)")
    p = _check_vector(wf_dfa, p)
    yield from _flows(wf_dfa, p)


def _best_sum(wf, p, shard=None):
    total = 0
    for flow in _flows(wf, p, shard):
        total += euler_count(flow.graph(wf.states))
    return total


def _best_shard(args):
    wf, p, k, n = args
    return _best_sum(wf, p, (k, n))


def count_best(dfa: Dfa, p, workers=1) -> int:
    p = _check_vector(dfa, p)
    wf, wp = augment_well_formed(dfa, p)
    if workers <= 1:
        return _best_sum(wf, wp)
    jobs = [(wf, wp, k, workers) for k in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_best_shard, jobs))


def _dp_guard(p, alphabet):
    size = 1
    for a in alphabet:
        size *= p[a] + 1
    cap = config.dp_cap()
    if size > cap:
        raise SizeGuardError(f"DP lattice has {size} sub-vectors, cap is {cap}")


def count_dp(dfa: Dfa, p) -> int:
    """Layered DP over (state, Parikh image of the prefix read so far)."""
    p = _check_vector(dfa, p)
    alphabet = dfa.alphabet
    _dp_guard(p, alphabet)
    target = tuple(p[a] for a in alphabet)
    moves = {}
    for s, a, d in dfa.transitions:
        moves.setdefault(s, []).append((alphabet.index(a), d))
    layer = {(dfa.initial, (0,) * len(alphabet)): 1}
    for _ in range(p.norm()):
        nxt = {}
        for (q, vec), ways in layer.items():
            for i, d in moves.get(q, ()):
                if vec[i] < target[i]:
                    key = (d, vec[:i] + (vec[i] + 1,) + vec[i + 1:])
                    nxt[key] = nxt.get(key, 0) + ways
        layer = nxt
        if not layer:
            return 0
    return sum(ways for (q, vec), ways in layer.items() if q in dfa.finals and vec == target)


def _enum_guard(p):
    cap = config.enum_cap()
    if p.norm() > cap:
        raise SizeGuardError(f"enumeration of words of length {p.norm()} exceeds cap {cap}")


def count_enumerate(acceptor, p) -> int:
    p = _check_vector(acceptor, p)
    _enum_guard(p)
    return sum(1 for w in words_with_image(p) if acceptor.accepts(w))


def count_dfa(dfa: Dfa, p, method="best", workers=1) -> int:
    if method == "best":
        return count_best(dfa, p, workers=workers)
    if method == "dp":
        return count_dp(dfa, p)
    if method == "enumerate":
        return count_enumerate(dfa, p)
    raise InputError(f"unknown DFA counting method {method!r}; choose from {DFA_METHODS}")


def count_nfa(nfa: Nfa, p, method="determinize_dp") -> int:
    """Counts accepted words, not accepting runs."""
    if method == "determinize_dp":
        _check_vector(nfa, p)
        return count_dp(determinize(nfa), p)
    if method == "enumerate":
        return count_enumerate(nfa, p)
    raise InputError(f"unknown NFA counting method {method!r}; choose from {NFA_METHODS}")


def count_cfg(cfg: Cfg, p, method="enumerate") -> int:
    if method != "enumerate":
        raise InputError(f"unknown CFG counting method {method!r}; choose from {CFG_METHODS}")
    return count_enumerate(cfg, p)


def count(acceptor, p, method=None, workers=1) -> int:
    """N(acceptor, p) with a per-type default method."""
    if isinstance(acceptor, Dfa):
        return count_dfa(acceptor, p, method or "best", workers=workers)
    if isinstance(acceptor, Nfa):
        return count_nfa(acceptor, p, method or "determinize_dp")
    if isinstance(acceptor, Cfg):
        return count_cfg(acceptor, p, method or "enumerate")
    raise InputError(f"not an acceptor: {type(acceptor).__name__}")


def pic(a, b, p, method_a=None, method_b=None, workers=1) -> bool:
    """Is N(a, p) > N(b, p)?"""
    if set(a.alphabet) != set(b.alphabet):
        raise InputError("acceptors have different alphabets")
    return count(a, p, method_a, workers) > count(b, p, method_b, workers)


def bitp(acceptor, p, i, method=None, workers=1) -> int:
    """Bit i of N(acceptor, p); bit 0 is the least significant."""
    if i < 0:
        raise InputError("bit index must be non-negative")
    return (count(acceptor, p, method, workers) >> i) & 1


def multinomial_bound(p) -> int:
    p = ParikhVector(p)
    out = math.factorial(p.norm())
    for n in p.values():
        out //= math.factorial(n)
    return out

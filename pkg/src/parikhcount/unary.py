"""Membership of a^n for one-letter automata and grammars, with n in binary.

A unary DFA run is a lasso (a tail into a cycle), so membership is
modular arithmetic.  Unary NFA use Sawa's characterisation for
n >= m^2 and bounded reachability below it; boolean matrix powering is
the oracle.  Grammars use a length-set DP and are guarded to small n.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import config
from .automata import Cfg, Dfa, Nfa
from .errors import InputError, SizeGuardError

NFA_UNARY_METHODS = ("sawa", "matpow")


def _letter(acceptor):
    if len(acceptor.alphabet) != 1:
        raise InputError(f"expected a one-letter alphabet, got {len(acceptor.alphabet)} letters")
    return acceptor.alphabet[0]


def _check_n(n):
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InputError(f"word length must be a non-negative int, got {n!r}")


@dataclass(frozen=True)
class LassoShape:
    """Run shape of a unary DFA: positions 0..tail-1 form the tail and
    tail..tail+period-1 the cycle.  ``run[i]`` is the state at position i,
    ``None`` for the implicit dead state of an incomplete automaton."""

    tail: int
    period: int
    accepting: frozenset
    run: tuple

    def accepts_length(self, n: int) -> bool:
        _check_n(n)
        if n <= self.tail:
            return n in self.accepting
        return (n - self.tail) % self.period + self.tail in self.accepting


def lasso_decompose(dfa: Dfa) -> LassoShape:
    letter = _letter(dfa)
    seen = {}
    run = []
    q = dfa.initial
    while q is not None and q not in seen:
        seen[q] = len(run)
        run.append(q)
        q = dfa.step(q, letter)
    if q is None:
        # missing transition: the dead state loops forever
        tail, period = len(run), 1
        run.append(None)
    else:
        tail, period = seen[q], len(run) - seen[q]
    accepting = frozenset(i for i, s in enumerate(run) if s is not None and s in dfa.finals)
    return LassoShape(tail, period, accepting, tuple(run))


def unary_dfa_member(dfa: Dfa, n: int) -> bool:
    return lasso_decompose(dfa).accepts_length(n)


def _step_set(nfa, letter, current):
    return frozenset(d for q in current for d in nfa.successors(q, letter))


def bounded_reach(nfa: Nfa, p1, p2, c: int) -> bool:
    """Is there a run of length exactly c from p1 to p2?  Layer-by-layer reachability."""
    letter = _letter(nfa)
    _check_n(c)
    m = len(nfa.states)
    if c > m * m + m:
        raise SizeGuardError(f"run length {c} exceeds the bound m^2 + m = {m * m + m}")
    if p1 not in nfa.states or p2 not in nfa.states:
        raise InputError(f"unknown state {p1!r} or {p2!r}")
    return p2 in _layer(nfa, letter, p1, c)


def _layer(nfa, letter, start, c):
    current = frozenset([start])
    for _ in range(c):
        if not current:
            break
        current = _step_set(nfa, letter, current)
    return current


def _bool_matmul(a, b):
    n = len(a)
    cols = [sum(1 << i for i in range(n) if b[i] >> j & 1) for j in range(n)]
    return [sum(1 << j for j in range(n) if a[i] & cols[j]) for i in range(n)]


def _matpow_member(nfa, letter, n):
    states = nfa.states
    index = {q: i for i, q in enumerate(states)}
    size = len(states)
    adj = [0] * size
    for s, a, d in nfa.transitions:
        if a == letter:
            adj[index[s]] |= 1 << index[d]
    result = [1 << i for i in range(size)]
    while n:
        if n & 1:
            result = _bool_matmul(result, adj)
        adj = _bool_matmul(adj, adj)
        n >>= 1
    row = result[index[nfa.initial]]
    return any(row >> index[q] & 1 for q in nfa.finals)


def _sawa_member(nfa, letter, n):
    m = len(nfa.states)
    finals = nfa.ordered_finals()
    if m <= 1:
        q = nfa.initial
        if q not in nfa.finals:
            return False
        return n == 0 or q in nfa.successors(q, letter)
    if n < m * m:
        return not _layer(nfa, letter, nfa.initial, n).isdisjoint(nfa.finals)
    cache = {}

    def reach(p, c):
        key = (p, c)
        if key not in cache:
            cache[key] = _layer(nfa, letter, p, c)
        return cache[key]

    for q in reach(nfa.initial, m - 1):
        for b in range(1, m + 1):
            if q not in reach(q, b):
                continue
            for a in range(m * m - b - 1, m * m - 1):
                if (n - a) % b:
                    continue
                if not reach(q, a - (m - 1)).isdisjoint(finals):
                    return True
    return False


def unary_nfa_member(nfa: Nfa, n: int, method="sawa") -> bool:
    letter = _letter(nfa)
    _check_n(n)
    if method == "sawa":
        return _sawa_member(nfa, letter, n)
    if method == "matpow":
        return _matpow_member(nfa, letter, n)
    raise InputError(f"unknown method {method!r}; choose from {NFA_UNARY_METHODS}")


def cfg_lengths(cfg: Cfg, n: int) -> int:
    """Bitset of the lengths <= n derivable from the start symbol."""
    _letter(cfg)
    _check_n(n)
    if n > config.UNARY_CFG_CAP:
        raise SizeGuardError(f"word length {n} exceeds the grammar cap {config.UNARY_CFG_CAP}")
    nf = cfg.normal_form
    fwd = {nt: 0 for nt in nf.nonterminals}
    rev = {nt: 0 for nt in nf.nonterminals}  # bit n-i set iff length i derivable
    pairs = []
    for head, body in nf.productions:
        if len(body) == 1:
            if n >= 1:
                fwd[head] |= 2
                rev[head] |= 1 << (n - 1)
        elif len(body) == 2:
            pairs.append((head, body[0], body[1]))
    for length in range(2, n + 1):
        for head, left, right in pairs:
            if fwd[head] >> length & 1:
                continue
            # exists i in 1..length-1 with left =>* a^i and right =>* a^(length-i)
            if (fwd[left] << (n - length)) & rev[right]:
                fwd[head] |= 1 << length
                rev[head] |= 1 << (n - length)
    lengths = fwd[nf.start]
    if any(h == nf.start and not b for h, b in nf.productions):
        lengths |= 1
    return lengths


def unary_cfg_member(cfg: Cfg, n: int) -> bool:
    return bool(cfg_lengths(cfg, n) >> n & 1)


def unary_member(acceptor, n: int, method=None) -> bool:
    if isinstance(acceptor, Dfa):
        return unary_dfa_member(acceptor, n)
    if isinstance(acceptor, Nfa):
        return unary_nfa_member(acceptor, n, method or "sawa")
    if isinstance(acceptor, Cfg):
        return unary_cfg_member(acceptor, n)
    raise InputError(f"not an acceptor: {type(acceptor).__name__}")


def unary_pic(a, b, n: int) -> bool:
    """N(a, n) > N(b, n), i.e. a^n in L(a) and not in L(b)."""
    return unary_member(a, n) and not unary_member(b, n)

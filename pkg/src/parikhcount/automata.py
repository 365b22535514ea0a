"""Language acceptors, words and Parikh images.

Words are any finite sequence of letters; a plain ``str`` is treated as a
sequence of one-character letters, which keeps tests short.  Letters and
states are arbitrary hashable tokens (strings in every file format).
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InputError, StructuralError

EPSILON_MARK = "ε"
FRESH_PREFIX = "##"


class ParikhVector(Mapping):
    """Immutable letter -> count map; absent letters count as zero.

    Counts are arbitrary-precision Python ints.  Zero entries are dropped
    on construction, so two vectors compare equal iff they agree on every
    letter.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts=(), **kwargs):
        merged = dict(counts)
        merged.update(kwargs)
        clean = {}
        for letter, n in merged.items():
            if isinstance(n, bool) or not isinstance(n, int):
                raise InputError(f"count for {letter!r} must be an int, got {n!r}")
            if n < 0:
                raise InputError(f"count for {letter!r} is negative: {n}")
            if n:
                clean[letter] = n
        self._counts = clean
        self._hash = None

    @classmethod
    def of_word(cls, word):
        counts = {}
        for letter in word:
            counts[letter] = counts.get(letter, 0) + 1
        return cls(counts)

    def __getitem__(self, letter):
        return self._counts.get(letter, 0)

    def __contains__(self, letter):
        return letter in self._counts

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, ParikhVector):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self == ParikhVector(other)
        return NotImplemented

    def __add__(self, other):
        out = dict(self._counts)
        for letter, n in other.items():
            out[letter] = out.get(letter, 0) + n
        return ParikhVector(out)

    def __le__(self, other):
        return all(n <= other[letter] for letter, n in self._counts.items())

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {v}" for k, v in self._counts.items())
        return f"ParikhVector({{{inner}}})"

    def norm(self):
        """Total number of letters, i.e. the length of any word with this image."""
        return sum(self._counts.values())

    def with_letter(self, letter, n):
        out = dict(self._counts)
        out[letter] = n
        return ParikhVector(out)

    def support(self):
        return tuple(self._counts)


def parikh(word) -> ParikhVector:
    return ParikhVector.of_word(word)


def _unique(seq):
    seen = set()
    out = []
    for x in seq:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Nfa:
    """Finite automaton without epsilon moves.

    ``transitions`` is kept in input order (duplicates removed), which
    fixes every downstream ordering: successor lists, flow enumeration,
    serialization.
    """

    alphabet: tuple
    states: tuple
    initial: object
    finals: frozenset
    transitions: tuple
    _succ: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _unique(self.alphabet))
        object.__setattr__(self, "states", _unique(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", _unique(tuple(t) for t in self.transitions))
        states = set(self.states)
        letters = set(self.alphabet)
        if self.initial not in states:
            raise InputError(f"initial state {self.initial!r} is not a declared state")
        bad = [q for q in self.finals if q not in states]
        if bad:
            raise InputError(f"final state {bad[0]!r} is not a declared state")
        succ = {}
        for t in self.transitions:
            if len(t) != 3:
                raise InputError(f"transition {t!r} is not a (src, letter, dst) triple")
            src, letter, dst = t
            if src not in states or dst not in states:
                raise InputError(f"transition {t!r} uses an undeclared state")
            if letter not in letters:
                raise InputError(f"transition {t!r} uses letter {letter!r} outside the alphabet")
            succ.setdefault((src, letter), []).append(dst)
        object.__setattr__(self, "_succ", {k: tuple(v) for k, v in succ.items()})

    def successors(self, state, letter):
        return self._succ.get((state, letter), ())

    def check_word(self, word):
        letters = set(self.alphabet)
        for i, letter in enumerate(word):
            if letter not in letters:
                raise InputError(f"letter {letter!r} at position {i} is outside the alphabet")

    def accepts(self, word) -> bool:
        self.check_word(word)
        current = {self.initial}
        for letter in word:
            current = {d for q in current for d in self._succ.get((q, letter), ())}
            if not current:
                return False
        return not current.isdisjoint(self.finals)

    def as_nfa(self) -> Nfa:
        return Nfa(self.alphabet, self.states, self.initial, self.finals, self.transitions)

    def ordered_finals(self):
        return tuple(q for q in self.states if q in self.finals)


@dataclass(frozen=True)
class Dfa(Nfa):
    """Deterministic automaton: at most one transition per (state, letter).

    Missing transitions go to an implicit rejecting sink.
    """

    def __post_init__(self):
        super().__post_init__()
        for (src, letter), dsts in self._succ.items():
            if len(dsts) > 1:
                raise StructuralError(
                    f"not deterministic: state {src!r} has {len(dsts)} transitions on {letter!r}"
                )

    def step(self, state, letter):
        dsts = self._succ.get((state, letter))
        return dsts[0] if dsts else None

    def accepts(self, word) -> bool:
        self.check_word(word)
        q = self.initial
        for letter in word:
            q = self.step(q, letter)
            if q is None:
                return False
        return q in self.finals

    def is_well_formed(self):
        return self.finals == frozenset([self.initial])

    def relabeled(self, prefix="s"):
        """Copy with states renamed ``s0, s1, ...`` in state order."""
        names = {q: f"{prefix}{i}" for i, q in enumerate(self.states)}
        return Dfa(
            self.alphabet,
            tuple(names[q] for q in self.states),
            names[self.initial],
            frozenset(names[q] for q in self.finals),
            tuple((names[s], a, names[d]) for s, a, d in self.transitions),
        )


@dataclass(frozen=True)
class Cfg:
    """Context-free grammar; ``productions`` are (head, body-tuple) pairs."""

    nonterminals: tuple
    terminals: tuple
    start: object
    productions: tuple

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", _unique(self.nonterminals))
        object.__setattr__(self, "terminals", _unique(self.terminals))
        object.__setattr__(
            self, "productions", _unique((h, tuple(b)) for h, b in self.productions)
        )
        nts, ts = set(self.nonterminals), set(self.terminals)
        clash = nts & ts
        if clash:
            raise InputError(f"symbol {sorted(map(str, clash))[0]!r} is both terminal and nonterminal")
        if self.start not in nts:
            raise InputError(f"start symbol {self.start!r} is not a nonterminal")
        for head, body in self.productions:
            if head not in nts:
                raise InputError(f"production head {head!r} is not a nonterminal")
            for sym in body:
                if sym not in nts and sym not in ts:
                    raise InputError(f"undeclared symbol {sym!r} in production for {head!r}")

    @property
    def alphabet(self):
        return self.terminals

    def check_word(self, word):
        ts = set(self.terminals)
        for i, letter in enumerate(word):
            if letter not in ts:
                raise InputError(f"letter {letter!r} at position {i} is outside the alphabet")

    @cached_property
    def normal_form(self) -> Cfg:
        return to_normal_form(self)

    @cached_property
    def _cyk_index(self):
        nf = self.normal_form
        nts = set(nf.nonterminals)
        by_terminal, by_pair = {}, {}
        has_eps = False
        for head, body in nf.productions:
            if not body:
                has_eps = True
            elif len(body) == 1:
                by_terminal.setdefault(body[0], set()).add(head)
            else:
                assert body[0] in nts and body[1] in nts
                by_pair.setdefault((body[0], body[1]), set()).add(head)
        return nf.start, has_eps, by_terminal, by_pair

    def accepts(self, word) -> bool:
        word = tuple(word)
        self.check_word(word)
        start, has_eps, by_terminal, by_pair = self._cyk_index
        n = len(word)
        if n == 0:
            return has_eps
        # chart[i][l] = nonterminals deriving word[i:i+l+1]
        chart = [[None] * (n - i) for i in range(n)]
        for i, letter in enumerate(word):
            chart[i][0] = frozenset(by_terminal.get(letter, ()))
        pairs = list(by_pair.items())
        for length in range(2, n + 1):
            for i in range(n - length + 1):
                cell = set()
                for split in range(1, length):
                    left = chart[i][split - 1]
                    right = chart[i + split][length - split - 1]
                    if not left or not right:
                        continue
                    for (b, c), heads in pairs:
                        if b in left and c in right:
                            cell |= heads
                chart[i][length - 1] = frozenset(cell)
        return start in chart[0][n - 1]


def accepts(acceptor, word) -> bool:
    """Membership for any acceptor type (DFA simulation, NFA subset simulation, CYK)."""
    return acceptor.accepts(word)


def determinize(nfa: Nfa) -> Dfa:
    """Subset construction restricted to reachable, non-empty subsets."""
    order = {q: i for i, q in enumerate(nfa.states)}

    def key(subset):
        return frozenset(subset)

    start = key([nfa.initial])
    seen = {start}
    states = [start]
    transitions = []
    queue = deque([start])
    while queue:
        subset = queue.popleft()
        members = sorted(subset, key=order.__getitem__)
        for letter in nfa.alphabet:
            target = key(d for q in members for d in nfa.successors(q, letter))
            if not target:
                continue
            transitions.append((subset, letter, target))
            if target not in seen:
                seen.add(target)
                states.append(target)
                queue.append(target)
    finals = frozenset(s for s in states if not s.isdisjoint(nfa.finals))
    return Dfa(nfa.alphabet, tuple(states), start, finals, tuple(transitions))


def fresh_letter(taken) -> str:
    """Smallest unused identifier of the form ``##``, ``##0``, ``##1``, ..."""
    taken = set(taken)
    if FRESH_PREFIX not in taken:
        return FRESH_PREFIX
    for i in itertools.count():
        cand = f"{FRESH_PREFIX}{i}"
        if cand not in taken:
            return cand


def augment_well_formed(dfa: Dfa, p):
    """Add a fresh letter b with edges final -> initial; initial becomes the only final.

    Returns ``(dfa', p')`` with ``p'(b) = 1``.  Applied unconditionally,
    even when ``dfa`` is already well-formed: the single b-edge anchors
    every Euler circuit, which makes circuits and words correspond.
    """
    p = ParikhVector(p)
    b = fresh_letter(list(dfa.alphabet) + list(p))
    extra = tuple((q, b, dfa.initial) for q in dfa.ordered_finals())
    augmented = Dfa(
        dfa.alphabet + (b,),
        dfa.states,
        dfa.initial,
        frozenset([dfa.initial]),
        dfa.transitions + extra,
    )
    return augmented, p.with_letter(b, 1)


class _Names:
    """Fresh-name supply that never collides with already used symbols."""

    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, stem):
        stem = str(stem)
        if stem not in self.taken:
            self.taken.add(stem)
            return stem
        for i in itertools.count(1):
            cand = f"{stem}_{i}"
            if cand not in self.taken:
                self.taken.add(cand)
                return cand


def to_normal_form(cfg: Cfg) -> Cfg:
    """Chomsky normal form with a fresh start symbol.

    Result productions have the shapes ``A -> B C``, ``A -> a`` and
    possibly ``S0 -> ()`` (the empty body) when the empty word is in the
    language; ``S0`` never occurs on a right-hand side.
    """
    fresh = _Names(list(cfg.nonterminals) + list(cfg.terminals))
    terminals = set(cfg.terminals)
    start = fresh(f"{cfg.start}0")
    nonterminals = [start] + list(cfg.nonterminals)
    prods = [(start, (cfg.start,))] + list(cfg.productions)

    # terminals inside long bodies get their own nonterminal
    term_nt = {}
    step = []
    for head, body in prods:
        if len(body) >= 2:
            new_body = []
            for sym in body:
                if sym in terminals:
                    if sym not in term_nt:
                        term_nt[sym] = fresh(f"T_{sym}")
                        nonterminals.append(term_nt[sym])
                    new_body.append(term_nt[sym])
                else:
                    new_body.append(sym)
            body = tuple(new_body)
        step.append((head, body))
    step.extend((nt, (t,)) for t, nt in term_nt.items())

    # binarize
    binary = []
    for head, body in step:
        while len(body) > 2:
            link = fresh(f"{head}_bin")
            nonterminals.append(link)
            binary.append((head, (body[0], link)))
            head, body = link, body[1:]
        binary.append((head, body))

    # remove epsilon productions
    nullable = set()
    changed = True
    while changed:
        changed = False
        for head, body in binary:
            if head not in nullable and all(s in nullable for s in body):
                nullable.add(head)
                changed = True
    no_eps = []
    for head, body in binary:
        options = [((s,), ()) if s in nullable else ((s,),) for s in body]
        for choice in itertools.product(*options):
            new_body = tuple(s for part in choice for s in part)
            if new_body or head == start:
                no_eps.append((head, new_body))
    if start not in nullable:
        no_eps = [(h, b) for h, b in no_eps if b or h != start]

    # remove unit productions A -> B
    nts = set(nonterminals)
    unit = {nt: {nt} for nt in nonterminals}
    changed = True
    while changed:
        changed = False
        for head, body in no_eps:
            if len(body) == 1 and body[0] in nts:
                for a in nonterminals:
                    if head in unit[a] and body[0] not in unit[a]:
                        unit[a].add(body[0])
                        changed = True
    non_unit = {}
    for head, body in no_eps:
        if not (len(body) == 1 and body[0] in nts):
            non_unit.setdefault(head, []).append(body)
    final = []
    for a in nonterminals:
        for b in nonterminals:
            if b in unit[a]:
                final.extend((a, body) for body in non_unit.get(b, ()))

    # drop non-generating, then unreachable nonterminals
    generating = set()
    changed = True
    while changed:
        changed = False
        for head, body in final:
            if head not in generating and all(s in terminals or s in generating for s in body):
                generating.add(head)
                changed = True
    final = [(h, b) for h, b in final if h in generating and all(s in terminals or s in generating for s in b)]
    reachable = {start}
    frontier = [start]
    while frontier:
        a = frontier.pop()
        for head, body in final:
            if head == a:
                for s in body:
                    if s in nts and s not in reachable:
                        reachable.add(s)
                        frontier.append(s)
    final = [(h, b) for h, b in final if h in reachable]
    kept = [nt for nt in nonterminals if nt in reachable]
    return Cfg(tuple(kept), cfg.terminals, start, tuple(final))


def words_with_image(p):
    """All distinct words whose Parikh image is ``p`` (multiset permutations), in lexicographic letter order."""
    letters = list(ParikhVector(p).items())
    remaining = [n for _, n in letters]
    total = sum(remaining)
    word = [None] * total

    def rec(pos):
        if pos == total:
            yield tuple(word)
            return
        for i, (letter, _) in enumerate(letters):
            if remaining[i]:
                remaining[i] -= 1
                word[pos] = letter
                yield from rec(pos + 1)
                remaining[i] += 1

    yield from rec(0)


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)

"""Plain-text model formats: parsing with line/column errors, and serialization.

Acceptor files::

    dfa                     # or nfa
    alphabet a b
    states q0 q1
    initial q0
    final q1
    q0 a q1                 # one "src letter dst" per line

Grammar files::

    cfg
    alphabet a b
    start S
    S -> a S b | eps

Cost chain files::

    costchain
    initial s
    target t
    s t 20 9/10             # src dst cost probability

Blank lines and lines starting with ``#`` are ignored everywhere.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction

from .automata import Cfg, Dfa, Nfa, ParikhVector
from .costchain import And, Atom, CostChain, CostFormula, Not, Or, check_valid
from .errors import InputError

log = logging.getLogger(__name__)

ACCEPTOR_KEYWORDS = ("alphabet", "states", "initial", "final")
EPSILON = ("eps", "ε")
_RATIONAL = re.compile(r"[0-9]+(/[0-9]+)?")
_INT = re.compile(r"-?[0-9]+")


def _lines(text):
    """(line number, stripped content) for every non-blank, non-comment line."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _kind(text):
    for lineno, line in _lines(text):
        return lineno, line.split()[0]
    raise InputError("empty model file")


def parse_model(text: str):
    """Acceptor or cost chain, dispatched on the first line."""
    _, kind = _kind(text)
    if kind == "costchain":
        return parse_costchain(text)
    return parse_acceptor(text)


def parse_acceptor(text: str):
    lineno, kind = _kind(text)
    if kind == "cfg":
        return _parse_cfg(text)
    if kind not in ("dfa", "nfa"):
        raise InputError(f"unknown model kind {kind!r} (expected dfa, nfa or cfg)", line=lineno)
    header = {}
    trans = []
    first = True
    for lineno, line in _lines(text):
        parts = line.split()
        if first:
            if len(parts) != 1:
                raise InputError("kind line takes no arguments", line=lineno, column=len(parts[0]) + 2)
            first = False
            continue
        if parts[0] in ACCEPTOR_KEYWORDS:
            if parts[0] in header:
                raise InputError(f"repeated {parts[0]!r} line", line=lineno)
            header[parts[0]] = (lineno, parts[1:])
            continue
        if len(parts) != 3:
            raise InputError(f"expected 'src letter dst', got {len(parts)} fields", line=lineno)
        trans.append(tuple(parts))
    for key in ("alphabet", "states", "initial"):
        if key not in header:
            raise InputError(f"missing {key!r} line")
    init_line, initial = header["initial"]
    if len(initial) != 1:
        raise InputError("'initial' takes exactly one state", line=init_line)
    finals = header.get("final", (None, []))[1]
    cls = Dfa if kind == "dfa" else Nfa
    return cls(tuple(header["alphabet"][1]), tuple(header["states"][1]), initial[0], frozenset(finals), tuple(trans))


def _parse_cfg(text):
    alphabet = None
    start = None
    declared = None
    rules = []
    first = True
    for lineno, line in _lines(text):
        if first:
            first = False
            continue
        parts = line.split()
        if parts[0] == "alphabet":
            alphabet = parts[1:]
        elif parts[0] == "start":
            if len(parts) != 2:
                raise InputError("'start' takes exactly one symbol", line=lineno)
            start = parts[1]
        elif parts[0] == "nonterminals":
            declared = parts[1:]
        else:
            if len(parts) < 2 or parts[1] != "->":
                col = len(parts[0]) + 2
                raise InputError("expected 'HEAD -> body | body ...'", line=lineno, column=col)
            rules.append((lineno, parts[0], line.split("->", 1)[1]))
    if alphabet is None:
        raise InputError("missing 'alphabet' line")
    if start is None:
        raise InputError("missing 'start' line")
    heads = list(dict.fromkeys([start] + (declared or []) + [h for _, h, _ in rules]))
    known = set(heads)
    terminals = set(alphabet)
    prods = []
    for lineno, head, rhs in rules:
        for alt in rhs.split("|"):
            body = alt.split()
            if len(body) == 1 and body[0] in EPSILON:
                body = []
            for sym in body:
                if sym not in terminals and sym not in known:
                    raise InputError(f"undeclared symbol {sym!r}", line=lineno)
            prods.append((head, tuple(body)))
    return Cfg(tuple(heads), tuple(alphabet), start, tuple(prods))


def _token(x):
    s = str(x)
    if not s or any(c.isspace() for c in s) or s.startswith("#") or s in ("|", "->") + EPSILON:
        raise InputError(f"{s!r} cannot be written as a model-file token")
    return s


def serialize_acceptor(acceptor) -> str:
    if isinstance(acceptor, Cfg):
        return _serialize_cfg(acceptor)
    for q in acceptor.states:
        if q in ACCEPTOR_KEYWORDS:
            raise InputError(f"state name {q!r} is a reserved word")
    kind = "dfa" if isinstance(acceptor, Dfa) else "nfa"
    lines = [
        kind,
        " ".join(["alphabet"] + [_token(a) for a in acceptor.alphabet]),
        " ".join(["states"] + [_token(q) for q in acceptor.states]),
        f"initial {_token(acceptor.initial)}",
        " ".join(["final"] + [_token(q) for q in acceptor.ordered_finals()]),
    ]
    lines += [f"{_token(s)} {_token(a)} {_token(d)}" for s, a, d in acceptor.transitions]
    return "\n".join(lines) + "\n"


def _serialize_cfg(cfg):
    lines = [
        "cfg",
        " ".join(["alphabet"] + [_token(a) for a in cfg.terminals]),
        f"start {_token(cfg.start)}",
        " ".join(["nonterminals"] + [_token(n) for n in cfg.nonterminals]),
    ]
    for nt in cfg.nonterminals:
        bodies = [b for h, b in cfg.productions if h == nt]
        if bodies:
            alts = [" ".join(_token(s) for s in b) if b else EPSILON[0] for b in bodies]
            lines.append(f"{_token(nt)} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"


def parse_probability(text: str, line=None, column=None) -> Fraction:
    """Exact rational ``m/d`` or integer; decimals are rejected, never rounded."""
    if not _RATIONAL.fullmatch(text):
        raise InputError(f"probability {text!r} must be written as m/d with integers", line=line, column=column)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise InputError(f"probability {text!r} has a zero denominator", line=line, column=column) from None


def parse_rational(text: str) -> Fraction:
    """A signed rational threshold such as ``99/100`` (no decimals)."""
    t = text.strip()
    if not re.fullmatch(r"-?[0-9]+(/[0-9]+)?", t):
        raise InputError(f"{text!r} is not an integer or m/d fraction")
    try:
        return Fraction(t)
    except ZeroDivisionError:
        raise InputError(f"{text!r} has a zero denominator") from None


def parse_costchain(text: str, validate=True) -> CostChain:
    lineno, kind = _kind(text)
    if kind != "costchain":
        raise InputError(f"expected a costchain file, found {kind!r}", line=lineno)
    initial = target = None
    declared = None
    edges = []
    first = True
    for lineno, line in _lines(text):
        if first:
            first = False
            continue
        parts = line.split()
        if parts[0] in ("initial", "target"):
            if len(parts) != 2:
                raise InputError(f"{parts[0]!r} takes exactly one state", line=lineno)
            if parts[0] == "initial":
                initial = parts[1]
            else:
                target = parts[1]
            continue
        if parts[0] == "states":
            declared = parts[1:]
            continue
        if len(parts) != 4:
            raise InputError(f"expected 'src dst cost m/d', got {len(parts)} fields", line=lineno)
        src, dst, cost, prob = parts
        if not cost.isdigit():
            col = line.index(cost, len(src) + len(dst) + 1) + 1
            raise InputError(f"cost {cost!r} is not a non-negative integer", line=lineno, column=col)
        col = line.rindex(prob) + 1
        edges.append((src, int(cost), dst, parse_probability(prob, lineno, col)))
    if initial is None:
        raise InputError("missing 'initial' line")
    if target is None:
        raise InputError("missing 'target' line")
    if declared is None:
        declared = [initial, target] + [q for e in edges for q in (e[0], e[2])]
    if not any(e[0] == target for e in edges):
        log.warning("target %s has no self-loop; inserting (%s, 0, %s, 1)", target, target, target)
        edges.append((target, 0, target, Fraction(1)))
    chain = CostChain(tuple(dict.fromkeys(declared)), initial, target, tuple(edges))
    if validate:
        check_valid(chain)
    return chain


def serialize_costchain(chain: CostChain) -> str:
    lines = [
        "costchain",
        " ".join(["states"] + [_token(q) for q in chain.states]),
        f"initial {_token(chain.initial)}",
        f"target {_token(chain.target)}",
    ]
    lines += [f"{_token(e.source)} {_token(e.target)} {e.cost} {e.probability}" for e in chain.edges]
    return "\n".join(lines) + "\n"


def parse_parikh(text: str) -> ParikhVector:
    """``"a=2 b=1"``; counts are arbitrary-precision decimals."""
    counts = {}
    col = 1
    for tok in text.split():
        col = text.index(tok, col - 1) + 1
        letter, sep, num = tok.rpartition("=")
        if not sep or not letter or not num.isdigit():
            raise InputError(f"expected letter=count, got {tok!r}", column=col)
        if letter in counts:
            raise InputError(f"letter {letter!r} given twice", column=col)
        counts[letter] = int(num)
        col += len(tok)
    return ParikhVector(counts)


def format_parikh(p) -> str:
    p = ParikhVector(p)
    return " ".join(f"{_token(a)}={n}" for a, n in p.items())


# ----------------------------------------------------------------- formulas

def _tokenize_formula(text):
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        col = pos + 1
        if ch.isspace():
            pos += 1
        elif text.startswith("<=", pos):
            tokens.append(("<=", None, col))
            pos += 2
        elif ch.isdigit():
            end = pos
            while end < len(text) and text[end].isdigit():
                end += 1
            tokens.append(("int", int(text[pos:end]), col))
            pos = end
        elif ch in "!&|()x":
            tokens.append((ch, None, col))
            pos += 1
        else:
            raise InputError(f"unexpected character {ch!r} in formula", column=col)
    tokens.append(("end", None, len(text) + 1))
    return tokens


def parse_formula(text: str) -> CostFormula:
    """Grammar: or := and ('|' and)*, and := unary ('&' unary)*,
    unary := '!' unary | '(' or ')' | 'x' '<=' INT."""
    tokens = _tokenize_formula(text)
    pos = 0

    def peek():
        return tokens[pos][0]

    def expect(kind):
        nonlocal pos
        tok = tokens[pos]
        if tok[0] != kind:
            found = "end of formula" if tok[0] == "end" else repr(tok[0])
            raise InputError(f"expected {kind!r}, found {found}", column=tok[2])
        pos += 1
        return tok

    def disj():
        node = conj()
        while peek() == "|":
            expect("|")
            node = Or(node, conj())
        return node

    def conj():
        node = unary()
        while peek() == "&":
            expect("&")
            node = And(node, unary())
        return node

    def unary():
        if peek() == "!":
            expect("!")
            return Not(unary())
        if peek() == "(":
            expect("(")
            node = disj()
            expect(")")
            return node
        expect("x")
        expect("<=")
        return Atom(expect("int")[1])

    node = disj()
    expect("end")
    return node


def serialize_formula(phi: CostFormula) -> str:
    return str(phi)


# ------------------------------------------------------------- misc inputs


def parse_matrix(text: str):
    rows = []
    for lineno, line in _lines(text):
        row = []
        for tok in line.split():
            if not _INT.fullmatch(tok):
                raise InputError(f"matrix entry {tok!r} is not an integer", line=lineno)
            row.append(int(tok))
        rows.append(tuple(row))
    if not rows:
        raise InputError("empty matrix")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise InputError(f"row {i + 1} has {len(r)} entries, expected {width}")
    return tuple(rows)


def serialize_matrix(rows) -> str:
    return "".join(" ".join(str(x) for x in r) + "\n" for r in rows)


def parse_nonneg_int(text: str, what="value") -> int:
    t = text.strip()
    if not t.isdigit():
        raise InputError(f"{what} {text!r} is not a non-negative decimal integer")
    return int(t)

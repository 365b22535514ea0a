"""Command-line interface: ``parikhcount <command> ...``.

Exit status: 0 when a result was computed (including a "false" decision),
2 for usage, parse and model errors, 3 when a size guard refuses the
input, 1 when two internal routes disagree.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import costchain as cc
from . import counting, formats, reductions, unary
from .errors import ConsistencyError, InputError, SizeGuardError, StructuralError, UnboundedError


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _acceptor(path):
    return formats.parse_acceptor(_read(path))


def _chain(path):
    return formats.parse_costchain(_read(path))


def _bool(x):
    return "true" if x else "false"


def cmd_count(args):
    a = _acceptor(args.acceptor)
    return str(counting.count(a, formats.parse_parikh(args.parikh), args.method, args.workers))


def cmd_pic(args):
    a, b = _acceptor(args.a), _acceptor(args.b)
    p = formats.parse_parikh(args.parikh)
    return _bool(counting.pic(a, b, p, args.method_a, args.method_b, args.workers))


def cmd_bitp(args):
    a = _acceptor(args.acceptor)
    return str(counting.bitp(a, formats.parse_parikh(args.parikh), args.bit, args.method, args.workers))


def cmd_cost_prob(args):
    chain = _chain(args.chain)
    return str(cc.cost_prob(chain, formats.parse_formula(args.formula), args.method, args.workers))


def cmd_cost_decide(args):
    chain = _chain(args.chain)
    tau = formats.parse_rational(args.threshold)
    phi = formats.parse_formula(args.formula)
    return _bool(cc.cost_decide(chain, phi, tau, args.method, args.workers))


def cmd_bit_cost(args):
    chain = _chain(args.chain)
    return str(cc.bitcost(chain, formats.parse_formula(args.formula), args.bit, args.method, args.workers))


def cmd_quantile(args):
    chain = _chain(args.chain)
    try:
        return str(cc.quantile(chain, formats.parse_rational(args.tau), args.method))
    except UnboundedError:
        return "inf"


def cmd_expected(args):
    return str(cc.expected_cost(_chain(args.chain)))


def cmd_contract(args):
    text = formats.serialize_costchain(cc.contract_zero_cost(_chain(args.chain)))
    if args.out:
        _write(args.out, text)
        return None
    return text.rstrip("\n")


def _emit(paths, texts):
    if paths:
        if len(paths) != len(texts):
            raise InputError(f"--emit expects {len(texts)} paths, got {len(paths)}")
        for path, text in zip(paths, texts):
            _write(path, text)
        return None
    return "\n".join(t.rstrip("\n") for t in texts)


def cmd_gen(args):
    if args.gen == "3sat":
        dfa, p = reductions.gen_3sat(reductions.CnfFormula.from_dimacs(_read(args.cnf)))
        return _emit(args.emit, [formats.serialize_acceptor(dfa), formats.format_parikh(p) + "\n"])
    if args.gen == "posmatpow":
        inst = reductions.MatPowInstance(
            formats.parse_matrix(_read(args.matrix)), formats.parse_matrix(_read(args.fn)), args.n
        )
        pipe = reductions.build_posmatpow(inst)
        return _emit(
            args.emit,
            [formats.serialize_acceptor(pipe.a), formats.serialize_acceptor(pipe.b), formats.format_parikh(pipe.p) + "\n"],
        )
    grammar = reductions.gen_subsetsum_cfg(args.values)
    return _emit(args.emit, [formats.serialize_acceptor(grammar)])


def cmd_unary_member(args):
    a = _acceptor(args.acceptor)
    n = formats.parse_nonneg_int(args.n, "length")
    return _bool(unary.unary_member(a, n, args.method))


def cmd_unary_pic(args):
    n = formats.parse_nonneg_int(args.n, "length")
    return _bool(unary.unary_pic(_acceptor(args.a), _acceptor(args.b), n))


AIRPORT = """costchain
initial s
target t
s t 20 9/10
s u 15 1/10
u u 5 1/5
u t 10 4/5
t t 0 1
"""


def cmd_selftest(args):
    from .automata import Dfa

    lines = []

    def check(name, got, want):
        if got != want:
            raise ConsistencyError(f"selftest {name}: got {got}, expected {want}")
        lines.append(f"ok {name}")

    dfa = Dfa("ab", ("q",), "q", {"q"}, (("q", "a", "q"), ("q", "b", "q")))
    p = {"a": 2, "b": 1}
    for m in counting.DFA_METHODS:
        check(f"count-{m}", counting.count_dfa(dfa, p, m), 3)
    chain = formats.parse_costchain(AIRPORT)
    for m in cc.COST_METHODS:
        check(f"airport-{m}", cc.cost_prob(chain, cc.Atom(30), m), Fraction(249, 250))
    check("airport-quantile", cc.quantile(chain, Fraction(9, 10)), 20)
    check("airport-expected", cc.expected_cost(chain), Fraction(165, 8))
    psi = reductions.CnfFormula(3, ((1, -2, 3), (-1, 2, -3)))
    a, p = reductions.gen_3sat(psi)
    check("3sat", counting.count_dfa(a, p, "best"), reductions.model_count(psi))
    inst = reductions.MatPowInstance(((2,),), ((1,),), 3)
    check("posmatpow", reductions.posmatpow_difference(inst), inst.value() + 1)
    check("subsetsum", unary.unary_cfg_member(reductions.gen_subsetsum_cfg([3, 5]), 8), True)
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(prog="parikhcount", description="Exact Parikh-image counting and cost-chain probabilities.")
    sub = parser.add_subparsers(dest="command", required=True)
    workers = argparse.ArgumentParser(add_help=False)
    workers.add_argument("--workers", type=int, default=1, help="processes for flow / vector enumeration")

    p = sub.add_parser("count", parents=[workers], help="N(A, p)")
    p.add_argument("--acceptor", required=True)
    p.add_argument("--parikh", required=True)
    p.add_argument("--method", choices=sorted(set(counting.DFA_METHODS + counting.NFA_METHODS)))
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("pic", parents=[workers], help="is N(A, p) > N(B, p)?")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--parikh", required=True)
    p.add_argument("--method-a")
    p.add_argument("--method-b")
    p.set_defaults(func=cmd_pic)

    p = sub.add_parser("bitp", parents=[workers], help="bit i of N(A, p)")
    p.add_argument("--acceptor", required=True)
    p.add_argument("--parikh", required=True)
    p.add_argument("--bit", type=int, required=True)
    p.add_argument("--method")
    p.set_defaults(func=cmd_bitp)

    def chain_cmd(name, func, help_text, formula=True):
        q = sub.add_parser(name, parents=[workers], help=help_text)
        q.add_argument("--chain", required=True)
        if formula:
            q.add_argument("--formula", required=True)
        q.add_argument("--method", choices=cc.COST_METHODS, default="cost_dp")
        q.set_defaults(func=func)
        return q

    chain_cmd("cost-prob", cmd_cost_prob, "P(K |= formula)")
    chain_cmd("cost-decide", cmd_cost_decide, "is P(K |= formula) >= threshold?").add_argument("--threshold", required=True)
    chain_cmd("bit-cost", cmd_bit_cost, "bit j of P(K |= formula)").add_argument("--bit", type=int, required=True)
    chain_cmd("quantile", cmd_quantile, "least b with P(K <= b) >= tau", formula=False).add_argument("--tau", required=True)

    p = sub.add_parser("expected", help="E[K]")
    p.add_argument("--chain", required=True)
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("contract", help="remove zero-cost edges except into the target")
    p.add_argument("--chain", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("gen", help="reduction instance generators")
    gen = p.add_subparsers(dest="gen", required=True)
    g = gen.add_parser("3sat", help="DFA + Parikh vector counting models of a DIMACS 3-CNF")
    g.add_argument("--cnf", required=True)
    g.add_argument("--emit", nargs=2, metavar=("DFA", "PARIKH"))
    g = gen.add_parser("posmatpow", help="DFA pair A, B with N(A,p) - N(B,p) = f(M^n) + 1")
    g.add_argument("--matrix", required=True)
    g.add_argument("--fn", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--emit", nargs=3, metavar=("A", "B", "PARIKH"))
    g = gen.add_parser("subsetsum", help="grammar for the subset sums of the values")
    g.add_argument("--values", type=int, nargs="+", required=True)
    g.add_argument("--emit", nargs=1, metavar="CFG")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("unary-member", help="is a^n accepted?")
    p.add_argument("--acceptor", required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--method", choices=unary.NFA_UNARY_METHODS)
    p.set_defaults(func=cmd_unary_member)

    p = sub.add_parser("unary-pic", help="a^n in L(A) and not in L(B)?")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n", required=True)
    p.set_defaults(func=cmd_unary_pic)

    p = sub.add_parser("selftest", help="run built-in consistency checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        out = args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 1
    except (InputError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if out is not None:
        print(out)
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()

import itertools
import random

import pytest

from parikhcount.automata import (
    Cfg, Dfa, Nfa, ParikhVector, accepts, all_words, augment_well_formed, determinize,
    fresh_letter, parikh, to_normal_form, words_with_image,
)
from parikhcount.errors import InputError, StructuralError
from randmodels import random_nfa


def test_parikh_vector_basics():
    p = parikh("abca")
    assert p == {"a": 2, "b": 1, "c": 1}
    assert p["z"] == 0 and "z" not in p
    assert p.norm() == 4
    assert ParikhVector({"a": 0, "b": 2}) == ParikhVector({"b": 2})
    assert hash(ParikhVector({"a": 1})) == hash(ParikhVector({"a": 1, "b": 0}))
    assert parikh("ab") + parikh("b") == parikh("abb")
    assert parikh("ab") <= parikh("abb") and not parikh("aa") <= parikh("abb")


def test_parikh_vector_rejects_negative():
    with pytest.raises(InputError):
        ParikhVector({"a": -1})


def test_dfa_determinism_enforced():
    with pytest.raises(StructuralError):
        Dfa("a", ("p", "q"), "p", (), (("p", "a", "p"), ("p", "a", "q")))


def test_unknown_letter_is_input_error():
    d = Dfa("a", ("p",), "p", ("p",), (("p", "a", "p"),))
    with pytest.raises(InputError):
        d.accepts("ab")


def test_missing_transition_rejects():
    d = Dfa("ab", ("p", "q"), "p", ("q",), (("p", "a", "q"),))
    assert d.accepts("a")
    assert not d.accepts("ab")
    assert not d.accepts("")


def test_determinize_preserves_language():
    rng = random.Random(11)
    for _ in range(40):
        nfa = random_nfa(rng)
        dfa = determinize(nfa)
        for w in all_words(nfa.alphabet, 5):
            assert dfa.accepts(w) == nfa.accepts(w)


def test_fresh_letter():
    assert fresh_letter({"a", "b"}) == "##"
    assert fresh_letter({"##"}) not in {"##"}


def test_augmentation_shape():
    d = Dfa("ab", ("p", "q"), "p", ("q",), (("p", "a", "q"), ("q", "b", "p")))
    wf, wp = augment_well_formed(d, {"a": 2, "b": 1})
    b = wf.alphabet[-1]
    assert wf.is_well_formed()
    assert (("q", b, "p")) in wf.transitions
    assert wp[b] == 1 and wp["a"] == 2


def test_words_with_image_is_the_exact_permutation_set():
    p = ParikhVector({"a": 2, "b": 1, "c": 1})
    got = list(words_with_image(p))
    want = {w for w in itertools.permutations("aabc")}
    assert len(got) == len(set(got)) == len(want) == 12
    assert {tuple(w) for w in got} == want


def anbn():
    return Cfg(("S",), ("a", "b"), "S", (("S", ("a", "S", "b")), ("S", ())))


def test_cfg_membership():
    g = anbn()
    assert accepts(g, "aabb") and accepts(g, "") and not accepts(g, "abab")


def test_normal_form_shapes_and_language():
    grammars = [
        anbn(),
        Cfg(("S", "A"), ("a", "b"), "S", (("S", ("A", "S", "A")), ("S", ("a",)), ("A", ("b",)), ("A", ()), ("S", ("S",)))),
        Cfg(("S", "X"), ("a",), "S", (("S", ("X",)), ("X", ("X", "X")), ("X", ("a",)))),
        Cfg(("S", "D"), ("a",), "S", (("S", ("D",)),)),  # empty language
    ]
    for g in grammars:
        nf = to_normal_form(g)
        for head, body in nf.productions:
            assert len(body) in (0, 1, 2)
            if len(body) == 1:
                assert body[0] in nf.terminals
            if len(body) == 2:
                assert all(s in nf.nonterminals and s != nf.start for s in body)
            if not body:
                assert head == nf.start
        for w in all_words(g.terminals, 6):
            assert accepts(g, w) == accepts(nf, w), (g, w)


def test_cfg_declaration_errors():
    with pytest.raises(InputError):
        Cfg(("S",), ("a",), "S", (("S", ("B",)),))
    with pytest.raises(InputError):
        Cfg(("S",), ("a",), "T", ())
    with pytest.raises(InputError):
        Cfg(("S", "a"), ("a",), "S", ())


def test_nfa_counts_words_not_runs():
    # two runs for "a", one word
    n = Nfa("a", ("p", "q", "r"), "p", ("q", "r"), (("p", "a", "q"), ("p", "a", "r")))
    assert n.accepts("a")
    assert determinize(n).accepts("a")

"""HOA serialization tests: exact round trips plus reader normalizations."""
import random

import pytest

from stochmon.automata import accepts_lasso, classify_states
from stochmon.hoa import HoaFormatError, parse_hoa, print_hoa
from stochmon.ltl import parse_ltl
from stochmon.safra import ltl_to_dra
from util import random_formula, stability_dra


class TestRoundTrip:
    def test_handwritten_automaton(self):
        a = stability_dra()
        assert parse_hoa(print_hoa(a)) == a

    def test_pipeline_automata(self):
        for text in ["F G p", "G F p", "p U q", "G (r -> F a)", "X X p",
                     "true", "false"]:
            a = ltl_to_dra(parse_ltl(text))
            assert parse_hoa(print_hoa(a)) == a, text

    def test_random_formulas(self):
        rng = random.Random(52)
        for _ in range(40):
            f = random_formula(rng, 7, ("p", "q"))
            a = ltl_to_dra(f, ap=("p", "q"))
            assert parse_hoa(print_hoa(a)) == a, f

    def test_output_is_stable(self):
        a = ltl_to_dra(parse_ltl("p U q"))
        assert print_hoa(a) == print_hoa(parse_hoa(print_hoa(a)))


class TestReader:
    def test_minimal_automaton(self):
        text = """\
HOA: v1
States: 2
Start: 0
AP: 1 "p"
Acceptance: 2 (Fin(0) & Inf(1))
acc-name: Rabin 1
--BODY--
State: 0
[!0] 0
[0] 1
State: 1 {1}
[t] 1
--END--
"""
        a = parse_hoa(text)
        assert a.num_states == 2
        assert a.ap == ("p",)
        assert a.delta == [[0, 1], [1, 1]]
        assert a.pairs == [(frozenset({1}), frozenset())]

    def test_unknown_headers_ignored(self):
        text = """\
HOA: v1
name: "whatever"
States: 1
Start: 0
tool: "something" "1.0"
AP: 0
Acceptance: 0 f
--BODY--
State: 0
[t] 0
--END--
"""
        a = parse_hoa(text)
        assert a.num_states == 1
        assert a.pairs == []

    def test_incomplete_automaton_gains_sink(self):
        text = """\
HOA: v1
States: 1
Start: 0
AP: 1 "p"
Acceptance: 2 (Fin(0) & Inf(1))
--BODY--
State: 0 {1}
[0] 0
--END--
"""
        a = parse_hoa(text)
        assert a.num_states == 2
        assert a.delta[0] == [1, 0]
        assert a.delta[1] == [1, 1]
        # the sink rejects everything
        assert not accepts_lasso(a, [0], [0, 1])

    def test_label_formulas(self):
        text = """\
HOA: v1
States: 2
Start: 0
AP: 2 "p" "q"
Acceptance: 2 (Fin(0) & Inf(1))
--BODY--
State: 0
[0 | 1] 1
[!0 & !1] 0
State: 1 {1}
[t] 1
--END--
"""
        a = parse_hoa(text)
        assert a.delta[0] == [0, 1, 1, 1]

    def test_transition_acceptance_is_split_into_states(self):
        # one state, p-edges marked accepting; splitting yields a state per
        # incoming signature with identical behaviour
        text = """\
HOA: v1
States: 1
Start: 0
AP: 1 "p"
Acceptance: 2 (Fin(0) & Inf(1))
--BODY--
State: 0
[!0] 0
[0] 0 {1}
--END--
"""
        a = parse_hoa(text)
        assert a.num_states == 2
        # words with infinitely many p letters are accepted
        assert accepts_lasso(a, [], [1])
        assert accepts_lasso(a, [], [1, 0])
        assert not accepts_lasso(a, [1, 1], [0])

    def test_nondeterminism_rejected(self):
        text = """\
HOA: v1
States: 2
Start: 0
AP: 1 "p"
Acceptance: 2 (Fin(0) & Inf(1))
--BODY--
State: 0
[t] 0
[0] 1
State: 1
[t] 1
--END--
"""
        with pytest.raises(HoaFormatError):
            parse_hoa(text)

    def test_multiple_start_states_rejected(self):
        text = """\
HOA: v1
States: 2
Start: 0 1
AP: 0
Acceptance: 0 f
--BODY--
State: 0
[t] 0
State: 1
[t] 1
--END--
"""
        with pytest.raises(HoaFormatError):
            parse_hoa(text)

    def test_missing_header_rejected(self):
        text = """\
HOA: v1
States: 1
AP: 0
Acceptance: 0 f
--BODY--
State: 0
[t] 0
--END--
"""
        with pytest.raises(HoaFormatError):
            parse_hoa(text)

    def test_garbage_rejected(self):
        with pytest.raises(HoaFormatError):
            parse_hoa("not hoa at all\n")

    def test_bad_acceptance_rejected(self):
        text = """\
HOA: v1
States: 1
Start: 0
AP: 0
Acceptance: 1 Inf(0)
--BODY--
State: 0
[t] 0
--END--
"""
        with pytest.raises(HoaFormatError):
            parse_hoa(text)


class TestSemanticPreservation:
    def test_classification_survives_round_trip(self):
        rng = random.Random(99)
        for _ in range(20):
            f = random_formula(rng, 6, ("p",))
            a = ltl_to_dra(f, ap=("p",))
            b = parse_hoa(print_hoa(a))
            assert classify_states(a) == classify_states(b)

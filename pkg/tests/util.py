"""Shared builders for the test suite."""
from stochmon.automata import RabinAutomaton
from stochmon.markov import parse_chain
from stochmon.ltl import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    LassoWord,
    Next,
    Not,
    Or,
    Release,
    Until,
)


def stability_dra() -> RabinAutomaton:
    """Hand-built automaton for "eventually always p" over the alphabet {p}.

    State 0 means the last letter lacked p, state 1 means it held p.  The
    single Rabin pair accepts the runs that leave state 0 for good.
    """
    return RabinAutomaton(
        ap=("p",),
        num_states=2,
        initial=0,
        delta=[[0, 1], [0, 1]],
        pairs=[(frozenset({1}), frozenset({0}))],
    )


DEMO_CHAIN_TEXT = """\
# seven states, two trapping regions; every split is a fair coin
state a
state b props p
state c
state d props p
state e props p
state f props p
state g
init a 1
trans a a 1/2
trans a b 1/2
trans b c 1/2
trans b d 1/2
trans c a 1/2
trans c f 1/2
trans d e 1
trans e e 1/2
trans e d 1/2
trans f f 1/2
trans f g 1/2
trans g f 1
"""


def demo_chain():
    """Seven-state chain whose runs end up cycling in {d,e} or {f,g}.

    Under "eventually always p" the {d,e} trap is accepting and the f,g
    region is not, because g lacks p.
    """
    return parse_chain(DEMO_CHAIN_TEXT)


def random_formula(rng, max_size, names):
    def build(budget):
        if budget <= 1:
            leaves = [Atom(rng.choice(names)), Atom(rng.choice(names)),
                      Atom(rng.choice(names)), TRUE, FALSE]
            return rng.choice(leaves)
        op = rng.choice(["not", "and", "or", "next", "until", "release",
                         "eventually", "always"])
        if op == "not":
            return Not(build(budget - 1))
        if op == "next":
            return Next(build(budget - 1))
        if op == "eventually":
            return Eventually(build(budget - 1))
        if op == "always":
            return Always(build(budget - 1))
        split = rng.randint(1, budget - 2) if budget > 2 else 1
        left = build(split)
        right = build(budget - 1 - split)
        ctor = {"and": And, "or": Or, "until": Until, "release": Release}[op]
        return ctor(left, right)

    return build(rng.randint(1, max_size))


def random_lasso(rng, names, max_prefix=6, max_cycle=6):
    def letters(count):
        return tuple(
            frozenset(n for n in names if rng.random() < 0.5)
            for _ in range(count)
        )

    return LassoWord(letters(rng.randint(0, max_prefix)),
                     letters(rng.randint(1, max_cycle)))

"""From an LTL formula to a deterministic Rabin automaton.

Walks the translation pipeline end to end: parse a formula, inspect its
normal form, build the automaton, classify its states, and confirm the
automaton agrees with the direct word-level semantics on a lasso.
"""
from stochmon import (
    LassoWord,
    accepts_lasso,
    atoms,
    classify_states,
    lasso_models_fixpoint,
    letter_index,
    ltl_to_dra,
    parse_ltl,
    print_hoa,
    to_nnf,
)

formula = parse_ltl("G (req -> F ack)")
print("formula:        ", formula)
print("negation normal:", to_nnf(formula))
print("propositions:   ", sorted(atoms(formula)))

ap = tuple(sorted(atoms(formula)))
dra = ltl_to_dra(formula, ap=ap)
print(f"\nautomaton: {dra.num_states} states, {len(dra.pairs)} Rabin pair(s),"
      f" initial {dra.initial}")
for state, cls in enumerate(classify_states(dra)):
    print(f"  state {state}: {cls.value}")

# A lasso word is a finite prefix followed by a cycle repeated forever.
# Here: one request that is acknowledged two steps later, then silence.
word = LassoWord(
    prefix=(frozenset({"req"}), frozenset(), frozenset({"ack"})),
    cycle=(frozenset(),),
)
expected = lasso_models_fixpoint(word, formula)
got = accepts_lasso(
    dra,
    [letter_index(ap, letter) for letter in word.prefix],
    [letter_index(ap, letter) for letter in word.cycle],
)
print(f"\nlasso accepted by automaton: {got}, by word semantics: {expected}")
assert got == expected

print("\nHOA v1 serialization:")
print(print_hoa(dra))

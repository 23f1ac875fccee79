"""Monitoring a single run of an unknown system.

The monitor watches one state sequence, never the transition matrix.  It
maintains the product with the property automaton, estimates a chain from
the observed frequencies, and reports a verdict plus a quantified
confidence once the history closes a cycle.
"""
from fractions import Fraction

from stochmon import (
    MonitorState,
    escape_chain,
    likelihood_fraction,
    ltl_to_dra,
    parse_ltl,
    verdict_probability,
)

LABELS = {
    "a": frozenset(), "b": frozenset({"p"}), "c": frozenset(),
    "d": frozenset({"p"}), "e": frozenset({"p"}),
    "f": frozenset({"p"}), "g": frozenset(),
}

dra = ltl_to_dra(parse_ltl("F G p"), ap=("p",))
monitor = MonitorState(dra, p_min=Fraction(1, 10), labels=LABELS,
                       keep_trace=True)

trace = "a a a a a b d e e d e e d e e d".split()
print("feeding:", " ".join(trace))
for state in trace:
    monitor.observe(state)
    conf = monitor.confidence()
    print(f"  after {state}: verdict={monitor.verdict().value:5s} "
          f"closed={monitor.closed} m={conf.m}")

conf = monitor.confidence()
print(f"\nfinal verdict: {monitor.verdict().value}")
print(f"confidence: the estimated chain is {(1 / (1 - 0.1)) ** conf.m:.4f} "
      f"times likelier than any chain violating the verdict (m={conf.m})")

ic = monitor.induced_chain()
print("\nestimated chain (observed frequencies):")
for i, row in enumerate(ic.rows):
    for j, prob in sorted(row.items()):
        print(f"  {ic.states[i]} -> {ic.states[j]}: {prob}")

# The induced chain is certain about the verdict, and the cheapest way to
# flip it is an escape edge of probability p_min out of the weakest state.
print(f"\nP(estimate satisfies property) = "
      f"{verdict_probability(ic, monitor.trace)}")
exits = monitor.exit_counts()
weakest = min(monitor.scc_stack()[-1], key=lambda r: exits[r])
rival = escape_chain(ic, weakest, Fraction(1, 10))
ratio = likelihood_fraction(ic, monitor.trace) / likelihood_fraction(rival, monitor.trace)
print(f"likelihood ratio against the best escaping rival: {ratio} "
      f"(= gamma exactly)")
print(f"P(rival satisfies property) = {verdict_probability(rival, monitor.trace)}")

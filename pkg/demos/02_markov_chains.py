"""Labeled Markov chains, products, and exact satisfaction probabilities.

Builds a small chain from its text format, takes the product with an
automaton for "eventually always p", and solves for the probability that
a random run satisfies the property.  All arithmetic stays in exact
rationals because the chain was given with rational probabilities.
"""
from stochmon import (
    ltl_to_dra,
    parse_chain,
    parse_ltl,
    product,
    sample_run,
    sat_probability,
    scc_decompose,
)

CHAIN = """\
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

chain = parse_chain(CHAIN)
print(f"chain: {chain.num_states} states, exact={chain.is_exact()}")

formula = parse_ltl("F G p")
dra = ltl_to_dra(formula, ap=tuple(chain.ap_names()))
pc = product(dra, chain)
print(f"product: {len(pc.states)} reachable states")

dec = scc_decompose(pc)
print("\nbottom components of the product:")
for comp, is_bottom, is_good in zip(dec.components, dec.bottom, dec.good):
    if is_bottom:
        names = sorted(pc.state_name(v) for v in comp)
        print(f"  {names} -> {'accepting' if is_good else 'rejecting'}")

value = sat_probability(pc)
print(f"\nP(run satisfies {formula}) = {value} = {float(value):.6f}")

# Sampling agrees in the long run: count runs that end in the good trap.
mc = pc.to_markov()
good = {v for comp, g in zip(dec.components, dec.good) if g for v in comp}
hits = sum(sample_run(mc, seed, 200)[-1] in good for seed in range(2000))
print(f"2000 sampled runs of length 200: {hits / 2000:.3f} end in the good trap")

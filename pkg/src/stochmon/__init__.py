"""Probabilistic runtime monitoring of LTL properties over unknown
finite-state Markov chains.

The package is organized as a pipeline:

- ``ltl``: formula trees, parsing, negation normal form, lasso semantics
- ``tableau``: LTL to nondeterministic Buchi automata
- ``safra``: Buchi to deterministic Rabin automata
- ``automata``: automaton types, lasso acceptance, state classification
- ``hoa``: deterministic Rabin automata in the HOA v1 exchange format
- ``markov``: labeled Markov chains, products, exact reachability
- ``monitor``: the maximum-likelihood monitor (verdict and confidence)
- ``online``: the bounded-memory online monitor
- ``experiments``: the two-region benchmark family and estimator studies
- ``fastrun``: compiled sampling engine behind the estimators
"""

from .automata import (
    BuchiAutomaton, RabinAutomaton, StateCapExceeded, StateClass,
    accepts_lasso, classify_states, letter_index, letter_names,
)
from .experiments import (
    CSV_HEADER, EstimatorReport, FAMILY_PROPERTY, FamilyParams,
    build_family, confidence_based_estimate, expected_climb_steps,
    family_automaton, family_p_min, fixed_length_estimate,
    required_visits, run_experiment,
)
from .hoa import HoaFormatError, parse_hoa, print_hoa
from .ltl import (
    Formula, Atom, Not, And, Or, Next, Until, Release, Eventually, Always,
    TrueConst, FalseConst, TRUE, FALSE,
    parse_ltl, to_nnf, expand_fg, atoms, formula_size, subformulas,
    LassoWord, lasso_models, lasso_models_fixpoint, LtlSyntaxError,
)
from .markov import (
    ChainFormatError, MarkovChain, ProductChain, format_chain, parse_chain,
    product, sample_run, sat_probability, scc_decompose, validate,
)
from .monitor import (
    Confidence, InducedChain, MonitorState, Verdict,
    escape_chain, likelihood, likelihood_fraction, verdict_probability,
)
from .online import OnlineState
from .safra import DEFAULT_STATE_CAP, determinize, ltl_to_dra
from .tableau import ltl_to_nba

__all__ = [
    "Formula", "Atom", "Not", "And", "Or", "Next", "Until", "Release",
    "Eventually", "Always", "TrueConst", "FalseConst", "TRUE", "FALSE",
    "parse_ltl", "to_nnf", "expand_fg", "atoms", "formula_size",
    "subformulas", "LassoWord", "lasso_models", "lasso_models_fixpoint",
    "LtlSyntaxError",
    "ltl_to_nba", "determinize", "ltl_to_dra", "DEFAULT_STATE_CAP",
    "BuchiAutomaton", "RabinAutomaton", "StateCapExceeded", "StateClass",
    "accepts_lasso", "classify_states", "letter_index", "letter_names",
    "HoaFormatError", "parse_hoa", "print_hoa",
    "ChainFormatError", "MarkovChain", "ProductChain", "format_chain",
    "parse_chain", "product", "sample_run", "sat_probability",
    "scc_decompose", "validate",
    "Confidence", "InducedChain", "MonitorState", "Verdict",
    "escape_chain", "likelihood", "likelihood_fraction",
    "verdict_probability",
    "OnlineState",
    "CSV_HEADER", "EstimatorReport", "FAMILY_PROPERTY", "FamilyParams",
    "build_family", "confidence_based_estimate", "expected_climb_steps",
    "family_automaton", "family_p_min", "fixed_length_estimate",
    "required_visits", "run_experiment",
]

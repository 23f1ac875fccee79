"""Benchmark chain family and acceptance-probability estimators.

The family is a chain with one long transient corridor and two bottom
components, tuned so that short prefixes are misleading: a random walk
corridor feeds a ladder of states labeled `acc` on the good side and a
slow escape ladder whose early states are also labeled `acc` on the bad
side.  A fixed-prefix estimator read off at small step budgets therefore
sees the wrong long-run behaviour, while an estimator that keeps sampling
until the monitor's confidence passes a threshold spends its budget on
few but conclusive runs.

`fixed_length_estimate` and `confidence_based_estimate` both report the
fraction of sampled runs whose monitor verdict is true, under a shared
total step budget (the quota).  `run_experiment` sweeps chain size, quota
and seed, and returns one deterministic CSV text.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence, Union

from .automata import RabinAutomaton
from .fastrun import RunDriver, product_arrays
from .ltl import parse_ltl
from .markov import MarkovChain, product
from .safra import ltl_to_dra

Probability = Union[Fraction, float]


@dataclass(frozen=True)
class FamilyParams:
    """Shape of one family member.

    `left_len`, `right_len` set the corridor extent around the start state,
    `escape_len` the bad-side ladder length and `ladder_len` the good-side
    ladder length.  `p` is the corridor's left-step probability, `q` the
    good ladder's upward probability and `s` the bad ladder's forward
    probability.  Defaults give the configuration used in the demos and
    the acceptance run.
    """

    left_len: int = 4
    right_len: int = 6
    escape_len: int = 4
    ladder_len: int = 10
    p: Probability = Fraction(1, 2)
    q: Probability = Fraction(9, 20)
    s: Probability = Fraction(2, 25)

    def validate(self) -> None:
        for name in ("left_len", "right_len", "escape_len", "ladder_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        for name in ("p", "q", "s"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie strictly between 0 and 1")


def build_family(params: FamilyParams) -> MarkovChain:
    """Construct the family member described by `params`.

    States `a-left_len .. a0 .. a{right_len}` form the corridor, started
    at `a0`, stepping left with probability p and right otherwise; the
    outer corridor steps leave into `b0` (left) or `c0` (right).  The b
    ladder climbs toward `b{ladder_len}` with probability q and falls
    toward `b0` otherwise, reflecting at both ends.  The c ladder advances
    with probability s and resets to `c0` otherwise, ending in an
    absorbing `c{escape_len}`.  `acc` labels `b0` and every `c` state
    before the absorbing one, so the b component satisfies `G F acc` and
    the c component eventually fails it.
    """
    params.validate()
    left, right = params.left_len, params.right_len
    esc, lad = params.escape_len, params.ladder_len
    p, q, s = params.p, params.q, params.s
    one = Fraction(1) if isinstance(p, Fraction) else 1.0

    names = [f"a{i}" for i in range(-left, right + 1)]
    names += [f"b{j}" for j in range(lad + 1)]
    names += [f"c{j}" for j in range(esc + 1)]
    idx = {name: i for i, name in enumerate(names)}

    rows: list[dict[int, Probability]] = [{} for _ in names]
    for i in range(-left, right + 1):
        lo = f"a{i - 1}" if i > -left else "b0"
        hi = f"a{i + 1}" if i < right else "c0"
        rows[idx[f"a{i}"]] = {idx[lo]: p, idx[hi]: one - p}
    for j in range(lad + 1):
        down = f"b{j - 1}" if j > 0 else "b0"
        up = f"b{j + 1}" if j < lad else f"b{lad}"
        rows[idx[f"b{j}"]] = {idx[up]: q, idx[down]: one - q}
    for j in range(esc):
        rows[idx[f"c{j}"]] = {idx[f"c{j + 1}"]: s, idx["c0"]: one - s}
    rows[idx[f"c{esc}"]] = {idx[f"c{esc}"]: one}

    accepting = {"b0"} | {f"c{j}" for j in range(esc)}
    labels = [frozenset({"acc"}) if name in accepting else frozenset()
              for name in names]
    return MarkovChain(names=names, labels=labels, rows=rows,
                       init={idx["a0"]: one})


def family_p_min(params: FamilyParams) -> Probability:
    """Smallest transition probability appearing in the family member."""
    params.validate()
    p, q, s = params.p, params.q, params.s
    one = Fraction(1) if isinstance(p, Fraction) else 1.0
    return min(p, one - p, q, one - q, s, one - s)


FAMILY_PROPERTY = "G F acc"


def family_automaton() -> RabinAutomaton:
    return ltl_to_dra(parse_ltl(FAMILY_PROPERTY), ("acc",))


def expected_climb_steps(params: FamilyParams) -> float:
    """Expected steps for the b ladder to first reach the top from b0.

    This is the time scale on which a run trapped in the b component sees
    the whole component; prefixes much shorter than this close on a
    partial picture.  Computed from the standard one-step recurrence for
    biased-walk hitting times.
    """
    params.validate()
    q = float(params.q)
    total = 0.0
    leg = 0.0
    for _ in range(params.ladder_len):
        leg = (1.0 + (1.0 - q) * leg) / q
        total += leg
    return total


def required_visits(threshold: float, p_min: Probability) -> int:
    """Exit count per top-SCC state at which the likelihood ratio
    reaches `threshold`, i.e. the least m with (1/(1-p_min))^m >= threshold.
    """
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    if not 0 < p_min <= 1:
        raise ValueError("p_min must lie in (0, 1]")
    if p_min == 1:
        return 1
    per_visit = -math.log1p(-float(p_min))
    return max(1, math.ceil(math.log(threshold) / per_visit - 1e-9))


@dataclass(frozen=True)
class EstimatorReport:
    """Outcome of one estimator invocation.

    `estimate` is the fraction of classified runs with verdict true (nan
    if no run was classified), `runs_used` the number of classified runs,
    `steps_used` the chain steps actually sampled.  `exhausted` is set
    when the budget or the per-run step cap cut the schedule short.
    """

    method: str
    quota: int
    estimate: float
    runs_used: int
    steps_used: int
    seed: int
    exhausted: bool = False


def _resolve_automaton(prop, ap: Sequence[str]) -> RabinAutomaton:
    if isinstance(prop, RabinAutomaton):
        return prop
    if isinstance(prop, str):
        prop = parse_ltl(prop)
    return ltl_to_dra(prop, tuple(ap))


def _chain_p_min(chain: MarkovChain) -> Probability:
    return min(w for row in chain.rows for w in row.values())


VERDICT_TRUE, VERDICT_FALSE, VERDICT_UNKNOWN, VERDICT_CAPPED = 1, 0, 2, 3


def fixed_length_estimate(chain: MarkovChain, prop, quota: int, seed: int,
                          runs: int = 100, engine=None) -> EstimatorReport:
    """Sample `runs` prefixes of length quota // runs and report the
    fraction whose monitor verdict is true.

    Unknown verdicts (prefix still open) count as not-true; the
    denominator is always `runs`.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if quota < runs:
        raise ValueError("quota must afford at least one step per run")
    dra = _resolve_automaton(prop, chain.ap_names())
    arrays = product_arrays(product(dra, chain))
    driver = RunDriver(arrays, seed, engine=engine)
    prefix_len = quota // runs
    trues = 0
    steps_used = 0
    for _ in range(runs):
        verdict, steps = driver.run(0, prefix_len, 0)
        steps_used += steps
        if verdict == VERDICT_TRUE:
            trues += 1
    return EstimatorReport(
        method="fixed_length", quota=quota, estimate=trues / runs,
        runs_used=runs, steps_used=steps_used, seed=seed,
    )


def confidence_based_estimate(chain: MarkovChain, prop, quota: int, seed: int,
                              runs: int = 100, threshold: float = 100.0,
                              p_min: Probability | None = None,
                              max_run_steps: int = 10 ** 7,
                              engine=None) -> EstimatorReport:
    """Sample runs until the monitor's likelihood ratio reaches
    `threshold`, stopping the schedule once the step quota is spent.

    Each run ends as soon as every state of the trace's top SCC has been
    left `required_visits(threshold, p_min)` times, or immediately on a
    state whose verdict no continuation can change.  A run that crosses
    the quota still completes and counts; at most `runs` runs are played.
    A run hitting `max_run_steps` aborts the whole schedule with the
    `exhausted` flag set (as does a quota too small for a single run).
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if quota < 1:
        raise ValueError("quota must be at least 1")
    if p_min is None:
        p_min = _chain_p_min(chain)
    m_req = required_visits(threshold, p_min)
    dra = _resolve_automaton(prop, chain.ap_names())
    arrays = product_arrays(product(dra, chain))
    driver = RunDriver(arrays, seed, engine=engine)
    trues = 0
    completed = 0
    steps_used = 0
    exhausted = False
    while completed < runs and steps_used < quota:
        verdict, steps = driver.run(1, max_run_steps, m_req)
        if verdict == VERDICT_CAPPED:
            exhausted = True
            break
        steps_used += steps
        completed += 1
        if verdict == VERDICT_TRUE:
            trues += 1
    estimate = trues / completed if completed else float("nan")
    return EstimatorReport(
        method="confidence_based", quota=quota, estimate=estimate,
        runs_used=completed, steps_used=steps_used, seed=seed,
        exhausted=exhausted or completed == 0,
    )


CSV_HEADER = "method,n,quota,seed,estimate,runs_used,steps_used"


def run_experiment(params: FamilyParams, ns: Sequence[int],
                   quotas: Sequence[int], seeds: Sequence[int],
                   runs: int = 100, threshold: float = 100.0,
                   engine=None) -> str:
    """Sweep ladder length, quota and seed over both estimators.

    Returns CSV text with one row per (method, n, quota, seed), rows
    ordered by n, then quota, then seed, with the fixed-length row before
    the confidence-based row.  Identical arguments give byte-identical
    output.
    """
    lines = [CSV_HEADER]
    dra = family_automaton()
    for n in ns:
        member = replace(params, ladder_len=n)
        chain = build_family(member)
        p_min = family_p_min(member)
        for quota in quotas:
            for seed in seeds:
                reports = (
                    fixed_length_estimate(chain, dra, quota, seed,
                                          runs=runs, engine=engine),
                    confidence_based_estimate(chain, dra, quota, seed,
                                              runs=runs, threshold=threshold,
                                              p_min=p_min, engine=engine),
                )
                for rep in reports:
                    lines.append(
                        f"{rep.method},{n},{rep.quota},{rep.seed},"
                        f"{rep.estimate!r},{rep.runs_used},{rep.steps_used}")
    return "\n".join(lines) + "\n"

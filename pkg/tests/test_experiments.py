"""Tests for the benchmark chain family and the two estimators.

The walk oracle, the climb-time series, and the reference estimator
below are written independently of the module under test: the reference
estimator replays the engine's RNG stream through MonitorState and the
exact product chain, so every verdict and step count is recomputed by
the slow path before being compared.
"""
import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from stochmon import fastrun
from stochmon.experiments import (
    CSV_HEADER,
    EstimatorReport,
    FamilyParams,
    build_family,
    confidence_based_estimate,
    expected_climb_steps,
    family_automaton,
    family_p_min,
    fixed_length_estimate,
    required_visits,
    run_experiment,
)
from stochmon.ltl import parse_ltl
from stochmon.markov import MarkovChain, product, sat_probability, scc_decompose, validate
from stochmon.monitor import MonitorState, Verdict
from stochmon.safra import ltl_to_dra


def exit_left_probability(left_len: int, right_len: int, p) -> Fraction:
    """Chance that a walk from 0 (step -1 w.p. p, +1 otherwise) reaches
    -(left_len + 1) before right_len + 1.

    Uses the harmonic-increment argument: successive differences of the
    hitting probability form a geometric sequence with ratio p/(1-p),
    so the answer is a ratio of two geometric sums.
    """
    p = Fraction(p)
    rho = p / (1 - p)
    lo, hi = -(left_len + 1), right_len + 1
    below = sum(rho ** k for k in range(-lo))
    full = sum(rho ** k for k in range(hi - lo))
    return 1 - Fraction(below, full)


def climb_series(params: FamilyParams) -> Fraction:
    """Closed-form twin of expected_climb_steps: sum of per-level hitting
    times (rho^(k+1) - 1) / (1 - 2q) with rho = (1-q)/q."""
    q = Fraction(params.q)
    rho = (1 - q) / q
    return sum((rho ** (k + 1) - 1) / (1 - 2 * q)
               for k in range(params.ladder_len))


def _uniforms(seed: int):
    rs = np.random.RandomState(seed % 2 ** 32)
    while True:
        yield from rs.random_sample(4096)


def _pick(items, u: float) -> int:
    acc = 0.0
    nxt = items[0][0]
    for v, w in items:
        acc += w
        nxt = v
        if u < acc:
            break
    return nxt


def reference_estimate(chain: MarkovChain, dra, mode: str, quota: int,
                       seed: int, runs: int, m_req: int = 0,
                       max_run_steps: int = 10 ** 7) -> EstimatorReport:
    """Slow twin of the estimators: same sampled trajectories (the RNG
    stream and successor rule are replayed), verdicts and stopping read
    off MonitorState instead of the array engine."""
    pc = product(dra, chain)
    rows = [[(w, float(row[w])) for w in sorted(row)] for row in pc.rows]
    init_items = [(v, float(pc.init[v])) for v in sorted(pc.init)]
    labels = {name: chain.labels[i] for i, name in enumerate(chain.names)}
    p_min = min(w for row in chain.rows for w in row.values())
    gen = _uniforms(seed)

    prefix_len = quota // runs
    trues = 0
    completed = 0
    steps_used = 0
    exhausted = False
    while completed < runs:
        if mode == "confidence" and steps_used >= quota:
            break
        st = MonitorState(dra, p_min, labels=labels)
        cur = None
        steps = 0
        verdict = None
        while True:
            u = next(gen)
            cur = _pick(init_items if cur is None else rows[cur], u)
            q_state, s_state = pc.states[cur]
            st.observe(chain.names[s_state])
            assert st.current == (q_state, chain.names[s_state])
            steps += 1
            conf = st.confidence()
            if conf.kind == "decisive":
                verdict = st.verdict()
                break
            if mode == "fixed" and steps >= prefix_len:
                verdict = st.verdict()
                break
            if mode == "confidence" and st.closed and conf.m >= m_req:
                verdict = st.verdict()
                break
            if mode == "confidence" and steps >= max_run_steps:
                verdict = "capped"
                break
        if verdict == "capped":
            exhausted = True
            break
        steps_used += steps
        completed += 1
        if verdict is Verdict.TRUE:
            trues += 1

    if mode == "fixed":
        return EstimatorReport(method="fixed_length", quota=quota,
                               estimate=trues / runs, runs_used=runs,
                               steps_used=steps_used, seed=seed)
    estimate = trues / completed if completed else float("nan")
    return EstimatorReport(method="confidence_based", quota=quota,
                           estimate=estimate, runs_used=completed,
                           steps_used=steps_used, seed=seed,
                           exhausted=exhausted or completed == 0)


def small_family() -> FamilyParams:
    return FamilyParams(escape_len=2, ladder_len=4)


def accepting_loop() -> MarkovChain:
    return MarkovChain(names=["a"], labels=[frozenset({"acc"})],
                       rows=[{0: Fraction(1)}], init={0: Fraction(1)})


class TestFamilyShape:
    def test_default_member_states(self):
        chain = build_family(FamilyParams())
        assert chain.num_states == 27
        for name in ("a-4", "a0", "a6", "b0", "b10", "c0", "c4"):
            assert name in chain.index
        assert validate(chain) == []
        assert chain.is_exact()

    def test_rows_sum_to_one(self):
        chain = build_family(FamilyParams())
        for row in chain.rows:
            assert sum(row.values()) == 1

    def test_accepting_labels(self):
        chain = build_family(FamilyParams())
        acc = {chain.names[i] for i, lab in enumerate(chain.labels) if lab}
        assert acc == {"b0", "c0", "c1", "c2", "c3"}
        assert all(lab <= {"acc"} for lab in chain.labels)

    def test_bottom_components(self):
        pc = product(family_automaton(), build_family(FamilyParams()))
        dec = scc_decompose(pc)
        bottoms = {}
        for i, comp in enumerate(dec.components):
            if dec.bottom[i]:
                names = frozenset(pc.system.names[s] for _, s in
                                  (pc.states[v] for v in comp))
                bottoms[names] = dec.good[i]
        ladder = frozenset(f"b{j}" for j in range(11))
        assert bottoms == {ladder: True, frozenset({"c4"}): False}

    def test_minimum_probability(self):
        fp = FamilyParams()
        chain = build_family(fp)
        smallest = min(w for row in chain.rows for w in row.values())
        assert family_p_min(fp) == smallest == Fraction(2, 25)

    def test_parameter_validation(self):
        for bad in (replace(FamilyParams(), p=Fraction(0)),
                    replace(FamilyParams(), q=Fraction(1)),
                    replace(FamilyParams(), s=1.0),
                    replace(FamilyParams(), ladder_len=0),
                    replace(FamilyParams(), escape_len=0),
                    replace(FamilyParams(), left_len=0),
                    replace(FamilyParams(), right_len=-1)):
            with pytest.raises(ValueError):
                build_family(bad)

    def test_float_parameters_give_float_chain(self):
        chain = build_family(FamilyParams(p=0.5, q=0.45, s=0.08))
        assert not chain.is_exact()
        value = sat_probability(product(family_automaton(), chain))
        assert isinstance(value, float)
        assert abs(value - 7 / 12) < 1e-9


class TestExactBaseline:
    def test_oracle_symmetric_unit_corridor(self):
        assert exit_left_probability(1, 1, Fraction(1, 2)) == Fraction(1, 2)
        chain = build_family(FamilyParams(left_len=1, right_len=1))
        assert sat_probability(product(family_automaton(), chain)) == Fraction(1, 2)

    def test_default_member_value(self):
        oracle = exit_left_probability(4, 6, Fraction(1, 2))
        assert oracle == Fraction(7, 12)
        pc = product(family_automaton(), build_family(FamilyParams()))
        assert sat_probability(pc) == Fraction(7, 12)

    @pytest.mark.parametrize("p", [Fraction(2, 5), Fraction(3, 5), Fraction(9, 10)])
    def test_biased_corridor_matches_oracle(self, p):
        fp = replace(FamilyParams(), p=p)
        pc = product(family_automaton(), build_family(fp))
        assert sat_probability(pc) == exit_left_probability(4, 6, p)


class TestRequiredVisits:
    def test_reference_point(self):
        assert required_visits(100, Fraction(2, 25)) == 56
        assert required_visits(100, 0.08) == 56

    def test_boundaries(self):
        assert required_visits(1, 0.08) == 1
        assert required_visits(100, 1) == 1
        assert required_visits(8, 0.5) == 3
        assert required_visits(8.0001, 0.5) == 4

    def test_monotone_in_threshold(self):
        values = [required_visits(t, 0.1) for t in (1, 2, 10, 100, 10 ** 6)]
        assert values == sorted(values)
        assert values[0] == 1

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            required_visits(0.5, 0.1)
        with pytest.raises(ValueError):
            required_visits(10, 0)
        with pytest.raises(ValueError):
            required_visits(10, 1.5)


class TestClimbTime:
    def test_matches_series(self):
        for n in (1, 4, 10, 30):
            fp = replace(FamilyParams(), ladder_len=n)
            assert expected_climb_steps(fp) == pytest.approx(
                float(climb_series(fp)), rel=1e-9)

    def test_single_level(self):
        fp = replace(FamilyParams(), ladder_len=1)
        assert expected_climb_steps(fp) == pytest.approx(1 / 0.45)

    def test_grows_with_ladder(self):
        times = [expected_climb_steps(replace(FamilyParams(), ladder_len=n))
                 for n in (5, 10, 20, 30)]
        assert times == sorted(times)
        assert times[-1] > 100 * times[0]


class TestFixedLengthEstimator:
    def test_prefix_of_one_state_classifies_nothing(self):
        chain = build_family(small_family())
        rep = fixed_length_estimate(chain, family_automaton(), 100, seed=0)
        assert rep.estimate == 0.0
        assert rep.runs_used == 100
        assert rep.steps_used == 100
        assert not rep.exhausted

    def test_decided_state_settles_in_two_steps(self):
        rep = fixed_length_estimate(accepting_loop(), "F acc", 200, seed=0)
        assert rep.estimate == 1.0
        rep = fixed_length_estimate(accepting_loop(), "F acc", 100, seed=0)
        assert rep.estimate == 0.0

    def test_deterministic_loop_closes(self):
        rep = fixed_length_estimate(accepting_loop(), family_automaton(), 400, seed=0)
        assert rep.estimate == 1.0
        assert rep.steps_used == 400

    def test_rejects_starved_quota(self):
        chain = build_family(small_family())
        with pytest.raises(ValueError):
            fixed_length_estimate(chain, family_automaton(), 99, seed=0)
        with pytest.raises(ValueError):
            fixed_length_estimate(chain, family_automaton(), 100, seed=0, runs=0)

    def test_report_and_determinism(self):
        chain = build_family(small_family())
        first = fixed_length_estimate(chain, family_automaton(), 3000, seed=7)
        second = fixed_length_estimate(chain, family_automaton(), 3000, seed=7)
        assert first == second
        assert first.method == "fixed_length"
        assert first.quota == 3000
        assert first.seed == 7
        assert first.steps_used == 3000
        assert 0.0 <= first.estimate <= 1.0


class TestConfidenceBasedEstimator:
    def test_first_closure_threshold(self):
        rep = confidence_based_estimate(accepting_loop(), family_automaton(),
                                        400, seed=0, threshold=1)
        assert rep.estimate == 1.0
        assert rep.runs_used == 100
        assert rep.steps_used == 400
        assert not rep.exhausted

    def test_quota_crossing_run_completes(self):
        rep = confidence_based_estimate(accepting_loop(), family_automaton(),
                                        150, seed=0, threshold=1)
        assert rep.runs_used == 38
        assert rep.steps_used == 152

        chain = build_family(small_family())
        rep = confidence_based_estimate(chain, family_automaton(), 10, seed=3)
        assert rep.runs_used == 1
        assert rep.steps_used > 10
        assert not rep.exhausted

    def test_step_cap_aborts_schedule(self):
        chain = build_family(small_family())
        rep = confidence_based_estimate(chain, family_automaton(), 10 ** 6,
                                        seed=0, max_run_steps=30)
        assert rep.exhausted
        assert rep.runs_used == 0
        assert rep.steps_used == 0
        assert math.isnan(rep.estimate)

    def test_default_p_min_matches_explicit(self):
        chain = build_family(small_family())
        explicit = confidence_based_estimate(chain, family_automaton(), 5000,
                                             seed=2, p_min=Fraction(2, 25))
        implicit = confidence_based_estimate(chain, family_automaton(), 5000,
                                             seed=2)
        assert explicit == implicit

    def test_rejects_bad_arguments(self):
        chain = build_family(small_family())
        with pytest.raises(ValueError):
            confidence_based_estimate(chain, family_automaton(), 100, seed=0,
                                      threshold=0.5)
        with pytest.raises(ValueError):
            confidence_based_estimate(chain, family_automaton(), 0, seed=0)
        with pytest.raises(ValueError):
            confidence_based_estimate(chain, family_automaton(), 100, seed=0,
                                      runs=0)

    def test_budget_is_the_stopper_when_runs_remain(self):
        chain = build_family(small_family())
        rep = confidence_based_estimate(chain, family_automaton(), 2000, seed=5)
        assert not rep.exhausted
        if rep.runs_used < 100:
            assert rep.steps_used >= 2000


class TestCrossValidation:
    def float_chain(self) -> MarkovChain:
        return MarkovChain(
            names=["x", "y", "z"],
            labels=[frozenset(), frozenset({"acc"}), frozenset()],
            rows=[{0: 0.25, 1: 0.5, 2: 0.25},
                  {0: 0.375, 1: 0.125, 2: 0.5},
                  {0: 0.25, 1: 0.25, 2: 0.5}],
            init={0: 1.0},
        )

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("quota", [400, 3000])
    def test_fixed_against_monitor(self, seed, quota):
        chain = build_family(small_family())
        dra = family_automaton()
        fast = fixed_length_estimate(chain, dra, quota, seed=seed)
        slow = reference_estimate(chain, dra, "fixed", quota, seed, runs=100)
        assert fast == slow

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("threshold", [1, 100])
    def test_confidence_against_monitor(self, seed, threshold):
        chain = build_family(small_family())
        dra = family_automaton()
        m_req = required_visits(threshold, family_p_min(small_family()))
        fast = confidence_based_estimate(chain, dra, 3000, seed=seed,
                                         threshold=threshold)
        slow = reference_estimate(chain, dra, "confidence", 3000, seed,
                                  runs=100, m_req=m_req)
        assert fast == slow

    @pytest.mark.parametrize("formula", ["F acc", "G acc", "acc U (X acc)"])
    def test_decided_states_against_monitor(self, formula):
        chain = self.float_chain()
        dra = ltl_to_dra(parse_ltl(formula), ("acc",))
        for seed in (0, 1):
            fast = fixed_length_estimate(chain, dra, 500, seed=seed, runs=50)
            slow = reference_estimate(chain, dra, "fixed", 500, seed, runs=50)
            assert fast == slow
            m_req = required_visits(20, 0.1)
            fast = confidence_based_estimate(chain, dra, 2000, seed=seed,
                                             runs=50, threshold=20, p_min=0.1)
            slow = reference_estimate(chain, dra, "confidence", 2000, seed,
                                      runs=50, m_req=m_req)
            assert fast == slow

    def test_compiled_engine_matches_plain(self):
        chain = build_family(small_family())
        dra = family_automaton()
        for seed in (0, 1):
            assert fixed_length_estimate(
                chain, dra, 2000, seed=seed, engine=fastrun.kernel,
            ) == fixed_length_estimate(
                chain, dra, 2000, seed=seed, engine=fastrun.kernel_py)
            assert confidence_based_estimate(
                chain, dra, 2000, seed=seed, engine=fastrun.kernel,
            ) == confidence_based_estimate(
                chain, dra, 2000, seed=seed, engine=fastrun.kernel_py)


class TestRunExperiment:
    def test_header_and_shape(self):
        csv = run_experiment(small_family(), ns=(2, 3), quotas=(200,),
                             seeds=(0, 1), runs=10)
        lines = csv.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 1 * 2 * 2
        for line in lines[1:]:
            assert len(line.split(",")) == 7
        methods = [line.split(",")[0] for line in lines[1:]]
        assert methods[:2] == ["fixed_length", "confidence_based"]
        ns = [line.split(",")[1] for line in lines[1:]]
        assert ns == ["2"] * 4 + ["3"] * 4

    def test_empty_quota_list(self):
        csv = run_experiment(small_family(), ns=(2,), quotas=(), seeds=(0,))
        assert csv == CSV_HEADER + "\n"

    def test_byte_identical_reruns(self):
        args = dict(ns=(3,), quotas=(150, 600), seeds=(0, 1), runs=10)
        assert run_experiment(small_family(), **args) == \
            run_experiment(small_family(), **args)

    def test_rows_match_direct_calls(self):
        csv = run_experiment(small_family(), ns=(3,), quotas=(400,),
                             seeds=(5,), runs=20)
        rows = [line.split(",") for line in csv.strip().split("\n")[1:]]
        member = replace(small_family(), ladder_len=3)
        chain = build_family(member)
        dra = family_automaton()
        direct = {
            "fixed_length": fixed_length_estimate(chain, dra, 400, seed=5,
                                                  runs=20),
            "confidence_based": confidence_based_estimate(
                chain, dra, 400, seed=5, runs=20,
                p_min=family_p_min(member)),
        }
        assert len(rows) == 2
        for method, n, quota, seed, estimate, runs_used, steps_used in rows:
            rep = direct[method]
            assert (int(n), int(quota), int(seed)) == (3, 400, 5)
            assert float(estimate) == rep.estimate or (
                math.isnan(float(estimate)) and math.isnan(rep.estimate))
            assert int(runs_used) == rep.runs_used
            assert int(steps_used) == rep.steps_used


class TestConvergence:
    def test_error_shrinks_with_quota(self):
        fp = small_family()
        truth = float(sat_probability(product(family_automaton(),
                                              build_family(fp))))
        quotas = (200, 6000, 200000)
        csv = run_experiment(fp, ns=(fp.ladder_len,), quotas=quotas,
                             seeds=range(20))
        errors = {"fixed_length": {}, "confidence_based": {}}
        for line in csv.strip().split("\n")[1:]:
            method, _, quota, _, estimate, _, _ = line.split(",")
            errors[method].setdefault(int(quota), []).append(
                abs(float(estimate) - truth))
        for method, by_quota in errors.items():
            mae = [sum(by_quota[q]) / len(by_quota[q]) for q in quotas]
            assert mae[0] >= mae[1] >= mae[2], (method, mae)
            assert mae[0] > mae[2], (method, mae)

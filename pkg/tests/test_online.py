"""Memory-saving monitor tests, checked step-by-step against the
full-memory monitor on shared runs."""
import random
from fractions import Fraction

import pytest

from stochmon.markov import product, sample_run, scc_decompose
from stochmon.monitor import MonitorState, Verdict
from stochmon.online import OnlineState

from util import demo_chain, stability_dra

PI2 = "a a a a a b d e e d e e d e e d".split()
PI3 = "a b c f f f f g f g f".split()


def demo_labels():
    chain = demo_chain()
    return {name: chain.labels[i] for i, name in enumerate(chain.names)}


def online_monitor(p_min=Fraction(1, 10)):
    return OnlineState(stability_dra(), p_min, labels=demo_labels())


def feed(monitor, states):
    for s in states:
        monitor.observe(s)
    return monitor


def run_pair(seed, steps):
    """Drive both monitors over one sampled run of the demo product chain.

    Returns the per-step records and the bottom component the run settled
    in (as product-state tuples), or None when it never settled.
    """
    chain = demo_chain()
    pc = product(stability_dra(), chain)
    run = sample_run(pc.to_markov(), seed, steps)
    labels = demo_labels()
    full = MonitorState(stability_dra(), Fraction(1, 10), labels=labels)
    online = OnlineState(stability_dra(), Fraction(1, 10), labels=labels)

    dec = scc_decompose(pc)
    bottom = None
    for comp, is_bottom in zip(dec.components, dec.bottom):
        if is_bottom and run[-1] in comp:
            bottom = {(pc.states[v][0], chain.names[pc.states[v][1]]) for v in comp}
    records = []
    for i in run:
        q, s = pc.states[i]
        name = chain.names[s]
        drops_before = online.drops
        full.observe(name)
        online.observe(name)
        records.append({
            "state": (q, name),
            "reset": online.drops > drops_before,
            "full_verdict": full.verdict(),
            "online_verdict": online.verdict(),
            "full_m": full.confidence().m,
            "online_m": online.confidence().m,
            "full_top": full.scc_stack()[-1],
            "online_last": online.scc_stack()[-1],
            "scc_size": online.scc_size,
            "bd": online.bd,
        })
    return records, bottom


class TestSmallSteps:
    def test_first_observation(self):
        st = online_monitor().observe("a")
        assert st.bd == 1
        assert st.scc_stack() == [frozenset({(0, "a")})]
        assert st.vi_counts() == {(0, "a"): 0}
        assert st.verdict() is Verdict.UNKNOWN
        conf = st.confidence()
        assert conf.kind == "open" and conf.infinite

    def test_revisit_keeps_scc(self):
        st = feed(online_monitor(), ["a", "a"])
        assert st.scc_stack() == [frozenset({(0, "a")})]
        assert st.vi_counts() == {(0, "a"): 1}
        assert st.bd == 1
        st.observe("a")
        assert st.vi_counts() == {(0, "a"): 2}
        assert st.scc_stack() == [frozenset({(0, "a")})]

    def test_fresh_state_drops_oldest_set(self):
        st = feed(online_monitor(), ["a", "b"])
        assert st.bd == 2
        assert st.drops == 1
        assert st.last_reset_step == 1
        assert st.scc_stack() == [frozenset({(0, "b")})]
        assert (0, "a") not in st.vi_counts()

    def test_settles_in_good_component(self):
        st = feed(online_monitor(), PI2 + ["e", "d", "e", "e", "d"])
        assert st.scc_stack()[-1] == {(1, "d"), (1, "e")}
        assert st.verdict() is Verdict.TRUE

    def test_settles_in_bad_component(self):
        st = feed(online_monitor(), PI3 + ["f", "g", "f", "f"])
        assert st.scc_stack()[-1] == {(0, "f"), (1, "f"), (1, "g")}
        assert st.verdict() is Verdict.FALSE

    def test_empty_monitor_rejects_queries(self):
        st = online_monitor()
        with pytest.raises(ValueError):
            st.verdict()
        with pytest.raises(ValueError):
            st.confidence()

    def test_bad_pmin(self):
        with pytest.raises(ValueError):
            OnlineState(stability_dra(), 0)


class TestStructuralInvariants:
    def check(self, st):
        stack = st.scc_stack()
        union = set()
        total = 0
        for comp in stack:
            assert not (union & comp)
            union |= comp
            total += len(comp)
        assert total == st.scc_size
        assert set(st.vi_counts()) == union
        if stack:
            assert st.current in stack[-1]
        assert total <= st.bd

    def test_random_walks(self):
        rng = random.Random(4242)
        names = ["u", "v", "w", "x", "y"]
        for _ in range(30):
            labels = {n: frozenset(["p"]) if rng.random() < 0.5 else frozenset()
                      for n in names}
            st = OnlineState(stability_dra(), 0.2, labels=labels)
            full = MonitorState(stability_dra(), 0.2, labels=labels)
            for _ in range(rng.randint(1, 40)):
                s = rng.choice(names)
                st.observe(s)
                full.observe(s)
                self.check(st)
                # the tracked last SCC never contains states outside the
                # true SCC of the current state
                assert st.scc_stack()[-1] <= full.scc_stack()[-1]

    def test_visit_counts_never_exceed_full_counts(self):
        rng = random.Random(77)
        names = ["u", "v", "w"]
        for _ in range(30):
            labels = {n: frozenset(["p"]) if rng.random() < 0.5 else frozenset()
                      for n in names}
            st = OnlineState(stability_dra(), 0.2, labels=labels)
            full = MonitorState(stability_dra(), 0.2, labels=labels)
            for _ in range(rng.randint(1, 40)):
                s = rng.choice(names)
                st.observe(s)
                full.observe(s)
                exits = full.exit_counts()
                for r, count in st.vi_counts().items():
                    assert count <= exits[r]


class TestAgainstFullMonitor:
    def coverage_step(self, records, bottom):
        """First step satisfying the agreement precondition: the run has
        entered the bottom component for good and has visited all of it
        since the last discard."""
        entry = len(records)
        for i in range(len(records) - 1, -1, -1):
            if records[i]["state"] not in bottom:
                break
            entry = i
        covered = set()
        for i, rec in enumerate(records):
            if rec["reset"]:
                covered = set()
            if rec["state"] in bottom:
                covered.add(rec["state"])
            if i >= entry and covered == bottom:
                return i
        return None

    def test_verdicts_agree_after_coverage(self):
        settled = 0
        for seed in range(30):
            records, bottom = run_pair(seed, 800)
            if bottom is None:
                continue
            start = self.coverage_step(records, bottom)
            if start is None:
                continue
            settled += 1
            for rec in records[start + 1:]:
                assert rec["online_verdict"] == rec["full_verdict"]
                assert rec["online_last"] == rec["full_top"]
        assert settled >= 25

    def test_online_m_is_conservative(self):
        for seed in range(15):
            records, _ = run_pair(seed, 400)
            for rec in records:
                assert rec["online_m"] <= rec["full_m"]

    def test_confidence_diverges(self):
        high = 0
        for seed in range(20):
            records, _ = run_pair(seed, 2000)
            if records[-1]["online_m"] >= 50:
                high += 1
        assert high >= 19


class TestMemoryFootprint:
    def test_tracked_size_stays_small(self):
        peak_size = 0
        peak_bd = 0
        for seed in range(10):
            records, _ = run_pair(seed, 1000)
            peak_size = max(peak_size, max(r["scc_size"] for r in records))
            peak_bd = max(peak_bd, max(r["bd"] for r in records))
        # the demo product has 8 reachable states; the tracked portion
        # must never exceed that, the exact peak is reported for the eye
        assert peak_size <= 8
        assert peak_bd <= 8
        print(f"peak tracked states {peak_size}, peak bound {peak_bd}")

"""Maximum-likelihood monitoring of a Rabin property over an unknown chain.

The monitor watches a single run of a finite-state system whose transition
probabilities are unknown except for a lower bound p_min on the ones that
are nonzero.  It pairs each observed state with the current state of a
deterministic Rabin automaton and maintains, per prefix:

  * the empirical transition counts, from which the maximum-likelihood
    explanation of the prefix (`induced_chain`) is read off directly;
  * a three-valued verdict: what the induced chain says about the
    probability of the property holding, which is always 0 or 1;
  * a confidence score gamma = (1/(1-p_min))^m, reported in log space,
    where m is the smallest number of times any state of the trace
    graph's bottom component has been left.

The verdict can flip while the run keeps discovering new states; the
confidence quantifies how expensive the current explanation is to escape.
"""
from __future__ import annotations

import math
from collections.abc import Hashable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .automata import (
    RabinAutomaton,
    StateClass,
    classify_states,
    letter_index,
    letter_names,
    rejecting_lasso_from,
)
from .markov import good_reach_values, scc_decompose


class Verdict(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "?"

    @property
    def symbol(self) -> str:
        return self.value


@dataclass(frozen=True)
class Confidence:
    """Monitor confidence in its current verdict.

    `m` is the exact sufficient statistic; `log_gamma` is m*ln(1/(1-p_min))
    (gamma itself overflows doubles quickly).  `kind` records why the value
    is what it is: "decisive" for automaton states that settle the property
    outright, "open" for traces ending in a fresh state, "bound" for the
    ordinary likelihood-ratio bound on closed traces.
    """

    m: int
    log_gamma: float
    kind: str

    @property
    def infinite(self) -> bool:
        return math.isinf(self.log_gamma)


@dataclass
class InducedChain:
    """A chain over (automaton state, system state) pairs with empirical
    transition probabilities.  Unlike a ProductChain it is not the product
    of any system chain: two product states sharing the system component
    may have been left in different directions."""

    dra: RabinAutomaton
    states: list[tuple[int, Hashable]]
    labels: list[frozenset[str]]
    rows: list[dict[int, Fraction]]
    init: dict[int, Fraction]
    index: dict[tuple[int, Hashable], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.index = {pair: i for i, pair in enumerate(self.states)}

    @property
    def num_states(self) -> int:
        return len(self.states)

    def is_exact(self) -> bool:
        return True

    def state_name(self, i: int) -> str:
        q, s = self.states[i]
        return f"{q}:{s}"


class MonitorState:
    """Incremental monitor state.

    `observe` takes raw system states; the automaton component is computed
    on the fly since the automaton is deterministic.  Labels come either
    from the `labels` mapping given at construction or inline per call.
    SCCs of the trace graph are maintained as a stack of state sets: the
    graph is built along a path, so its components are totally ordered and
    a revisit merges the stack suffix starting at the revisited component.
    """

    def __init__(
        self,
        dra: RabinAutomaton,
        p_min: Fraction | float,
        labels: Mapping[Hashable, frozenset[str]] | None = None,
        keep_trace: bool = False,
    ):
        if not 0 < p_min <= 1:
            raise ValueError(f"p_min must be in (0, 1], got {p_min}")
        self.dra = dra
        self.p_min = p_min
        self._labels = dict(labels) if labels else {}
        self._classes = classify_states(dra)
        self._keep_trace = keep_trace
        self._trace: list[tuple[int, Hashable]] = []
        self._letter_cache: dict[frozenset[str], int] = {}

        self._ids: dict[tuple[int, Hashable], int] = {}
        self._states: list[tuple[int, Hashable]] = []
        self._state_labels: list[frozenset[str]] = []
        self._occ: list[int] = []
        self._exits: list[int] = []
        self._pos: list[int] = []
        self._trans: dict[tuple[int, int], int] = {}
        self._stack: list[set[int]] = []
        self._cur: int | None = None
        self._first: int | None = None
        self._next_q: int = dra.initial
        self.length = 0

    def _letter(self, label: frozenset[str]) -> int:
        letter = self._letter_cache.get(label)
        if letter is None:
            letter = letter_index(self.dra.ap, label)
            self._letter_cache[label] = letter
        return letter

    def observe(self, state: Hashable, props=None) -> "MonitorState":
        """Extend the trace by one system state and return self.

        `props` overrides the label mapping for this observation; states
        absent from both default to the empty label.
        """
        if props is not None:
            label = frozenset(props)
        else:
            label = self._labels.get(state, frozenset())
        q = self._next_q
        key = (q, state)
        i = self._ids.get(key)
        if i is None:
            i = len(self._states)
            self._ids[key] = i
            self._states.append(key)
            self._state_labels.append(label)
            self._occ.append(0)
            self._exits.append(0)
            self._pos.append(-1)
        if self._cur is not None:
            edge = (self._cur, i)
            self._trans[edge] = self._trans.get(edge, 0) + 1
            self._exits[self._cur] += 1
        else:
            self._first = i
        self._occ[i] += 1
        self._cur = i
        if self._keep_trace:
            self._trace.append(key)

        if self._pos[i] >= 0:
            # revisit: the path from the old component to the stack top
            # closes a cycle, so those components collapse into one
            k = self._pos[i]
            if k < len(self._stack) - 1:
                merged = self._stack[k]
                for comp in self._stack[k + 1:]:
                    merged |= comp
                    for j in comp:
                        self._pos[j] = k
                del self._stack[k + 1:]
        else:
            self._stack.append({i})
            self._pos[i] = len(self._stack) - 1

        self._next_q = self.dra.delta[q][self._letter(label)]
        self.length += 1
        return self

    # ------------------------------------------------------------ queries

    @property
    def closed(self) -> bool:
        return self._cur is not None and self._occ[self._cur] >= 2

    @property
    def current(self) -> tuple[int, Hashable] | None:
        return self._states[self._cur] if self._cur is not None else None

    @property
    def trace(self) -> list[tuple[int, Hashable]]:
        if not self._keep_trace:
            raise ValueError("monitor was created with keep_trace=False")
        return list(self._trace)

    def scc_stack(self) -> list[frozenset[tuple[int, Hashable]]]:
        """Trace-graph SCCs in their total order, oldest first."""
        return [frozenset(self._states[i] for i in comp) for comp in self._stack]

    def transition_counts(self) -> dict[tuple[tuple, tuple], int]:
        return {(self._states[a], self._states[b]): c
                for (a, b), c in self._trans.items()}

    def exit_counts(self) -> dict[tuple[int, Hashable], int]:
        return {self._states[i]: e for i, e in enumerate(self._exits)}

    def _require_nonempty(self):
        if self._cur is None:
            raise ValueError("monitor has observed no states")

    def verdict(self) -> Verdict:
        """Three-valued verdict for the current prefix.

        An automaton component that accepts everything (or nothing)
        decides immediately; otherwise a closed trace is judged by whether
        the bottom component of its trace graph is good for some Rabin
        pair, and an open trace stays undecided.
        """
        self._require_nonempty()
        cls = self._classes[self._states[self._cur][0]]
        if cls is StateClass.UNIVERSAL:
            return Verdict.TRUE
        if cls is StateClass.EMPTY:
            return Verdict.FALSE
        if not self.closed:
            return Verdict.UNKNOWN
        auto = {self._states[i][0] for i in self._stack[-1]}
        good = any(auto & fset and not auto & gset for fset, gset in self.dra.pairs)
        return Verdict.TRUE if good else Verdict.FALSE

    def confidence(self) -> Confidence:
        self._require_nonempty()
        m = min(self._exits[i] for i in self._stack[-1])
        cls = self._classes[self._states[self._cur][0]]
        if cls is not StateClass.OTHER:
            return Confidence(m=m, log_gamma=math.inf, kind="decisive")
        if not self.closed:
            return Confidence(m=m, log_gamma=math.inf, kind="open")
        if self.p_min == 1:
            log_gamma = math.inf if m >= 1 else 0.0
        else:
            log_gamma = -m * math.log1p(-float(self.p_min))
        return Confidence(m=m, log_gamma=log_gamma, kind="bound")

    def induced_chain(self) -> InducedChain:
        """Maximum-likelihood chain over the observed product states."""
        if not self.closed:
            raise ValueError("trace is open; the induced chain needs a closed trace")
        rows: list[dict[int, Fraction]] = [{} for _ in self._states]
        for (a, b), count in self._trans.items():
            rows[a][b] = Fraction(count, self._exits[a])
        return InducedChain(
            dra=self.dra,
            states=list(self._states),
            labels=list(self._state_labels),
            rows=rows,
            init={self._first: Fraction(1)},
        )


# ------------------------------------------------------------- likelihoods

def likelihood(chain, trace) -> float:
    """ln of the probability that the chain generates the trace; -inf when
    any factor is missing or zero.  Trace entries are keys of chain.index."""
    if not trace:
        return 0.0
    idx = chain.index
    i = idx.get(trace[0])
    if i is None:
        return -math.inf
    p = chain.init.get(i, 0)
    if p == 0:
        return -math.inf
    total = math.log(float(p))
    for nxt in trace[1:]:
        j = idx.get(nxt)
        if j is None:
            return -math.inf
        p = chain.rows[i].get(j, 0)
        if p == 0:
            return -math.inf
        total += math.log(float(p))
        i = j
    return total


def likelihood_fraction(chain, trace) -> Fraction:
    """Exact cone probability of the trace; 0 when some factor is missing."""
    if not trace:
        return Fraction(1)
    idx = chain.index
    i = idx.get(trace[0])
    if i is None:
        return Fraction(0)
    total = Fraction(chain.init.get(i, 0))
    for nxt in trace[1:]:
        if total == 0:
            return total
        j = idx.get(nxt)
        if j is None:
            return Fraction(0)
        total *= Fraction(chain.rows[i].get(j, 0))
        i = j
    return total


# ------------------------------------------------------------ escape chain

def escape_chain(mc: InducedChain, target: tuple[int, Hashable], c) -> InducedChain:
    """Divert probability c from `target` into a fresh bad component.

    The old outgoing probabilities of `target` are rescaled by 1-c, so any
    trace leaving `target` m' times has its likelihood multiplied by
    (1-c)^m' while runs of the new chain extend to a satisfying run with
    probability 0.  `target` must lie in the unique bottom component.
    """
    if not 0 < c < 1:
        raise ValueError(f"escape probability must be in (0, 1), got {c}")
    t = mc.index.get(target)
    if t is None:
        raise ValueError(f"state {target} not in the chain")
    dec = scc_decompose(mc)
    bottoms = [comp for comp, b in zip(dec.components, dec.bottom) if b]
    if len(bottoms) != 1:
        raise ValueError("chain does not have a unique bottom component")
    if t not in bottoms[0]:
        raise ValueError(f"state {target} is not in the bottom component")

    q, _ = mc.states[t]
    label = mc.labels[t]
    h = mc.dra.delta[q][letter_index(mc.dra.ap, label)]
    lasso = rejecting_lasso_from(mc.dra, h)
    if lasso is None:
        raise ValueError("every continuation from the target is accepting; "
                         "no escape component exists")
    stem, cycle = lasso

    states = list(mc.states)
    labels = list(mc.labels)
    rows = [dict(row) for row in mc.rows]
    c = Fraction(c)
    rows[t] = {j: p * (1 - c) for j, p in rows[t].items()}

    # fresh system states spelling out the rejected word; the automaton
    # component follows the transition function, keeping the chain a
    # legal product of some system
    tag = 0
    while any(s == f"esc{tag}.0" for _, s in states):
        tag += 1
    w = h
    first_new = len(states)
    for step, letter in enumerate(stem + cycle):
        states.append((w, f"esc{tag}.{step}"))
        labels.append(letter_names(mc.dra.ap, letter))
        rows.append({})
        w = mc.dra.delta[w][letter]
    rows[t][first_new] = c
    cycle_start = first_new + len(stem)
    last = len(states) - 1
    for i in range(first_new, last):
        rows[i][i + 1] = Fraction(1)
    rows[last][cycle_start] = Fraction(1)

    return InducedChain(dra=mc.dra, states=states, labels=labels,
                        rows=rows, init=dict(mc.init))


def verdict_probability(chain, trace) -> Fraction | float:
    """Probability that a run of the chain satisfies the property given
    that it starts with the trace.  Conditioning on the prefix leaves only
    the future, so this is the good-reachability value at the last state."""
    if not trace:
        raise ValueError("trace is empty")
    if likelihood_fraction(chain, trace) == 0:
        raise ValueError("the chain cannot generate the trace")
    values = good_reach_values(chain)
    return values[chain.index[trace[-1]]]

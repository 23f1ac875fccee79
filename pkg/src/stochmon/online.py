"""Memory-saving monitor.

Keeps only a suffix of the trace graph's SCC sequence: a stack of state
sets `scc`, a visit table `vi` for the tracked states, and a bound `bd`.
When a fresh state would grow the tracked portion past `bd`, the oldest
set is discarded (its counts are forgotten) and `bd` rises by one.  The
verdict is read off the last SCC exactly as in the full monitor, so it
can lag behind while discarded states are rediscovered, but it agrees
with the full monitor once the run has settled in a bottom component and
covered it after the last discard.
"""
from __future__ import annotations

import math
from collections.abc import Hashable, Mapping
from fractions import Fraction

from .automata import RabinAutomaton, StateClass, classify_states, letter_index
from .monitor import Confidence, Verdict


class OnlineState:
    def __init__(
        self,
        dra: RabinAutomaton,
        p_min: Fraction | float,
        labels: Mapping[Hashable, frozenset[str]] | None = None,
    ):
        if not 0 < p_min <= 1:
            raise ValueError(f"p_min must be in (0, 1], got {p_min}")
        self.dra = dra
        self.p_min = p_min
        self._labels = dict(labels) if labels else {}
        self._classes = classify_states(dra)
        self._letter_cache: dict[frozenset[str], int] = {}

        self.bd = 0
        self._stack: list[set[tuple[int, Hashable]]] = []
        self._vi: dict[tuple[int, Hashable], int] = {}
        self._pos: dict[tuple[int, Hashable], int] = {}
        self._size = 0
        self._dropped = 0
        self._cur: tuple[int, Hashable] | None = None
        self._next_q: int = dra.initial
        self.length = 0
        self.drops = 0
        self.last_reset_step = -1

    def _letter(self, label: frozenset[str]) -> int:
        letter = self._letter_cache.get(label)
        if letter is None:
            letter = letter_index(self.dra.ap, label)
            self._letter_cache[label] = letter
        return letter

    def observe(self, state: Hashable, props=None) -> "OnlineState":
        if props is not None:
            label = frozenset(props)
        else:
            label = self._labels.get(state, frozenset())
        q = self._next_q
        key = (q, state)
        if self._cur is not None:
            self._vi[self._cur] += 1

        if self._vi.get(key, 0) > 0:
            # (a) tracked revisit: the walk closed a cycle through key's
            # component, collapsing everything above it
            k = self._pos[key] - self._dropped
            if k < len(self._stack) - 1:
                merged = self._stack[k]
                for comp in self._stack[k + 1:]:
                    merged |= comp
                    for r in comp:
                        self._pos[r] = k + self._dropped
                del self._stack[k + 1:]
        else:
            if self._size == self.bd:
                # (c) no room: raise the bound and forget the oldest set
                self.bd += 1
                if self._stack:
                    oldest = self._stack[0]
                    del self._stack[0]
                    for r in oldest:
                        del self._vi[r]
                        del self._pos[r]
                    self._size -= len(oldest)
                    self._dropped += 1
                    self.drops += 1
                    self.last_reset_step = self.length
            # (b) or tail of (c): track the fresh state as its own set
            self._stack.append({key})
            self._vi[key] = 0
            self._pos[key] = self._dropped + len(self._stack) - 1
            self._size += 1

        self._cur = key
        self._next_q = self.dra.delta[q][self._letter(label)]
        self.length += 1
        return self

    # ------------------------------------------------------------ queries

    @property
    def scc_size(self) -> int:
        return self._size

    @property
    def current(self) -> tuple[int, Hashable] | None:
        return self._cur

    def scc_stack(self) -> list[frozenset[tuple[int, Hashable]]]:
        return [frozenset(comp) for comp in self._stack]

    def vi_counts(self) -> dict[tuple[int, Hashable], int]:
        return dict(self._vi)

    def _require_nonempty(self):
        if self._cur is None:
            raise ValueError("monitor has observed no states")

    def verdict(self) -> Verdict:
        self._require_nonempty()
        cls = self._classes[self._cur[0]]
        if cls is StateClass.UNIVERSAL:
            return Verdict.TRUE
        if cls is StateClass.EMPTY:
            return Verdict.FALSE
        if self._vi[self._cur] == 0:
            # fresh since the last discard; mirrors the open case
            return Verdict.UNKNOWN
        auto = {r[0] for r in self._stack[-1]}
        good = any(auto & fset and not auto & gset for fset, gset in self.dra.pairs)
        return Verdict.TRUE if good else Verdict.FALSE

    def confidence(self) -> Confidence:
        self._require_nonempty()
        m = min(self._vi[r] for r in self._stack[-1])
        cls = self._classes[self._cur[0]]
        if cls is not StateClass.OTHER:
            return Confidence(m=m, log_gamma=math.inf, kind="decisive")
        if self._vi[self._cur] == 0:
            return Confidence(m=m, log_gamma=math.inf, kind="open")
        if self.p_min == 1:
            log_gamma = math.inf if m >= 1 else 0.0
        else:
            log_gamma = -m * math.log1p(-float(self.p_min))
        return Confidence(m=m, log_gamma=log_gamma, kind="bound")

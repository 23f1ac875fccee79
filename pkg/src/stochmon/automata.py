"""Omega-automaton types and analysis.

Letters are subsets of the atomic-proposition tuple ``ap``, encoded as bit
masks: bit i set means ap[i] holds.  `RabinAutomaton` is deterministic and
complete; acceptance is a list of (F, G) state-set pairs, satisfied by a run
that visits F infinitely often and G only finitely often.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

MAX_AP = 16


class StateCapExceeded(RuntimeError):
    """A construction grew past its configured state budget."""


def check_ap(ap: tuple[str, ...]) -> None:
    if len(ap) > MAX_AP:
        raise ValueError(f"alphabet too large: {len(ap)} atomic propositions (limit {MAX_AP})")
    if len(set(ap)) != len(ap):
        raise ValueError("duplicate atomic proposition names")


def letter_index(ap: tuple[str, ...], names: frozenset[str]) -> int:
    """Encode the letter {names} ∩ ap as a bit mask over ap."""
    mask = 0
    for i, name in enumerate(ap):
        if name in names:
            mask |= 1 << i
    return mask


def letter_names(ap: tuple[str, ...], letter: int) -> frozenset[str]:
    return frozenset(ap[i] for i in range(len(ap)) if letter >> i & 1)


@dataclass
class BuchiAutomaton:
    """Nondeterministic Buchi automaton over the alphabet 2^ap.

    ``delta[q][a]`` is the frozenset of successors of state q on letter a.
    A run is accepting when it visits ``accepting`` infinitely often.
    """

    ap: tuple[str, ...]
    num_states: int
    initial: frozenset[int]
    accepting: frozenset[int]
    delta: list[list[frozenset[int]]]

    @property
    def num_letters(self) -> int:
        return 1 << len(self.ap)


@dataclass
class RabinAutomaton:
    """Deterministic complete Rabin automaton over the alphabet 2^ap."""

    ap: tuple[str, ...]
    num_states: int
    initial: int
    delta: list[list[int]]
    pairs: list[tuple[frozenset[int], frozenset[int]]]

    @property
    def num_letters(self) -> int:
        return 1 << len(self.ap)

    def step(self, state: int, letter: int) -> int:
        return self.delta[state][letter]

    def run_prefix(self, letters: list[int]) -> int:
        q = self.initial
        for a in letters:
            q = self.delta[q][a]
        return q


class StateClass(Enum):
    EMPTY = "empty"          # no word is accepted from here
    UNIVERSAL = "universal"  # every word is accepted from here
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


def accepts_lasso(a: RabinAutomaton, prefix: list[int], cycle: list[int],
                  start: int | None = None) -> bool:
    """Run the automaton on prefix · cycle^ω and decide acceptance.

    The run begins at ``start`` (the initial state when omitted).  It is
    ultimately periodic: its recurring part is found by iterating
    (state, cycle position) pairs until one repeats.
    """
    if not cycle:
        raise ValueError("lasso cycle must be nonempty")
    q = a.initial if start is None else start
    for letter in prefix:
        q = a.delta[q][letter]
    seen: dict[tuple[int, int], int] = {}
    trail: list[int] = []
    pos = 0
    while (q, pos) not in seen:
        seen[(q, pos)] = len(trail)
        trail.append(q)
        q = a.delta[q][cycle[pos]]
        pos = (pos + 1) % len(cycle)
    recurring = set(trail[seen[(q, pos)]:])
    for fset, gset in a.pairs:
        if recurring & fset and not recurring & gset:
            return True
    return False


def nba_accepts_lasso(a: BuchiAutomaton, prefix: list[int], cycle: list[int]) -> bool:
    """Decide whether a Buchi automaton accepts prefix · cycle^ω.

    Explores the product of the automaton with the cycle positions; the word
    is accepted when some reachable cycle of the product passes through an
    accepting automaton state.
    """
    if not cycle:
        raise ValueError("lasso cycle must be nonempty")
    current = set(a.initial)
    for letter in prefix:
        nxt: set[int] = set()
        for q in current:
            nxt |= a.delta[q][letter]
        current = nxt
    period = len(cycle)
    nodes: list[tuple[int, int]] = []
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
    work = [(q, 0) for q in sorted(current)]
    seen = set(work)
    while work:
        node = work.pop()
        q, i = node
        succs = []
        for t in sorted(a.delta[q][cycle[i]]):
            succ = (t, (i + 1) % period)
            succs.append(succ)
            if succ not in seen:
                seen.add(succ)
                work.append(succ)
        edges[node] = succs
        nodes.append(node)
    for comp in _sccs(nodes, edges):
        if _nontrivial(comp, edges) and any(q in a.accepting for q, _ in comp):
            return True
    return False


def _sccs(states, edges):
    """Tarjan's algorithm, iterative; components in reverse topological order.

    Works on any graph with hashable nodes given as a node list plus a
    successor dict."""
    index_of: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in states:
        if root in index_of:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.remove(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _graph_of(a: RabinAutomaton) -> dict[int, list[int]]:
    edges: dict[int, list[int]] = {}
    for q in range(a.num_states):
        succs = sorted(set(a.delta[q]))
        edges[q] = succs
    return edges


def _nontrivial(comp: list[int], edges: dict[int, list[int]]) -> bool:
    if len(comp) > 1:
        return True
    q = comp[0]
    return q in edges.get(q, ())


def _reachable_from_each(a: RabinAutomaton, targets: set[int]) -> list[bool]:
    """For every state, whether some target is reachable (forward search on
    the reversed graph from the targets)."""
    rev: dict[int, list[int]] = {q: [] for q in range(a.num_states)}
    for q in range(a.num_states):
        for t in set(a.delta[q]):
            rev[t].append(q)
    hit = [False] * a.num_states
    work = [q for q in targets]
    for q in work:
        hit[q] = True
    while work:
        q = work.pop()
        for p in rev[q]:
            if not hit[p]:
                hit[p] = True
                work.append(p)
    return hit


def _rabin_core_states(a: RabinAutomaton) -> set[int]:
    """States lying on some cycle that witnesses a Rabin pair: inside a
    nontrivial SCC of the graph with G removed that intersects F."""
    out: set[int] = set()
    all_states = list(range(a.num_states))
    edges = _graph_of(a)
    for fset, gset in a.pairs:
        sub_states = [q for q in all_states if q not in gset]
        sub_edges = {q: [t for t in edges[q] if t not in gset] for q in sub_states}
        for comp in _sccs(sub_states, sub_edges):
            if _nontrivial(comp, sub_edges) and any(q in fset for q in comp):
                out.update(comp)
    return out


def _streett_witness(states: list[int], edges: dict[int, list[int]],
                     pairs: list[tuple[frozenset[int], frozenset[int]]]) -> list[int] | None:
    """Find a cycle C with, for every pair (F, G): C ∩ F = ∅ or C ∩ G ≠ ∅.

    Recursive SCC decomposition: inside an SCC, any pair whose G misses the
    SCC forbids its F states, so they are deleted and the search recurses.
    Returns the cycle as a closed walk (first state repeated implicitly), or
    None when no such cycle exists in the given subgraph.
    """
    for comp in _sccs(states, edges):
        if not _nontrivial(comp, edges):
            continue
        comp_set = set(comp)
        forbidden: set[int] = set()
        for fset, gset in pairs:
            if comp_set & fset and not comp_set & gset:
                forbidden |= comp_set & fset
        if not forbidden:
            return _covering_walk(comp, edges)
        remaining = [q for q in comp if q not in forbidden]
        sub_edges = {q: [t for t in edges[q] if t in comp_set and t not in forbidden]
                     for q in remaining}
        witness = _streett_witness(remaining, sub_edges, pairs)
        if witness is not None:
            return witness
    return None


def _covering_walk(comp: list[int], edges: dict[int, list[int]]) -> list[int]:
    """A closed walk inside the strongly connected set ``comp`` that visits
    every one of its states.  The walk is returned as a state sequence whose
    successor wraps from the last entry back to the first."""
    comp_set = set(comp)

    def shortest_path(src: int, dst: int) -> list[int]:
        if src == dst:
            return []
        prev: dict[int, int] = {src: src}
        frontier = [src]
        while frontier:
            nxt = []
            for q in frontier:
                for t in edges.get(q, ()):
                    if t in comp_set and t not in prev:
                        prev[t] = q
                        if t == dst:
                            path = [t]
                            while prev[path[-1]] != src:
                                path.append(prev[path[-1]])
                            path.reverse()
                            return path
                        nxt.append(t)
            frontier = nxt
        raise RuntimeError("component not strongly connected")

    start = comp[0]
    walk = [start]
    for target in comp[1:]:
        if target not in walk:
            walk.extend(shortest_path(walk[-1], target))
    walk.extend(shortest_path(walk[-1], start))
    if len(walk) > 1:
        walk.pop()  # last state equals the first; keep the wrap implicit
    elif start not in edges.get(start, ()):
        raise RuntimeError("trivial component has no self loop")
    return walk


def classify_states(a: RabinAutomaton) -> list[StateClass]:
    """Classify every state as EMPTY, UNIVERSAL, or OTHER.

    A state is EMPTY when no accepting cycle is reachable from it, and
    UNIVERSAL when no rejecting cycle is reachable (the automaton being
    deterministic and complete, each word has exactly one run).
    """
    accepting_core = _rabin_core_states(a)
    can_accept = _reachable_from_each(a, accepting_core)
    rejecting_core = _streett_core_states(a)
    can_reject = _reachable_from_each(a, rejecting_core)
    out = []
    for q in range(a.num_states):
        if not can_accept[q]:
            out.append(StateClass.EMPTY)
        elif not can_reject[q]:
            out.append(StateClass.UNIVERSAL)
        else:
            out.append(StateClass.OTHER)
    return out


def _streett_core_states(a: RabinAutomaton) -> set[int]:
    """All states lying on some cycle satisfying the complement (Streett)
    condition of every pair."""
    edges = _graph_of(a)

    out: set[int] = set()

    def recurse(states: list[int], sub_edges: dict[int, list[int]]) -> None:
        for comp in _sccs(states, sub_edges):
            if not _nontrivial(comp, sub_edges):
                continue
            comp_set = set(comp)
            forbidden: set[int] = set()
            for fset, gset in a.pairs:
                if comp_set & fset and not comp_set & gset:
                    forbidden |= comp_set & fset
            if not forbidden:
                out.update(comp)
                continue
            remaining = [q for q in comp if q not in forbidden]
            inner = {q: [t for t in sub_edges[q] if t in comp_set and t not in forbidden]
                     for q in remaining}
            recurse(remaining, inner)

    recurse(list(range(a.num_states)), edges)
    return out


def rejecting_lasso_from(a: RabinAutomaton, start: int) -> tuple[list[int], list[int]] | None:
    """A rejected run from ``start``: letters of a stem and of a cycle such
    that the run on stem · cycle^ω is not Rabin accepting.

    Returns (stem_letters, cycle_letters), or None when the state is
    universal.  The cycle letters are read off a Streett-feasible closed walk
    of automaton states; the stem is a shortest letter path to its first
    state.
    """
    edges = _graph_of(a)
    # restrict to the region reachable from start so the stem exists
    reach: set[int] = set()
    work = [start]
    while work:
        q = work.pop()
        if q in reach:
            continue
        reach.add(q)
        work.extend(edges[q])
    sub_states = [q for q in sorted(reach)]
    sub_edges = {q: [t for t in edges[q]] for q in sub_states}
    witness = _streett_witness(sub_states, sub_edges, a.pairs)
    if witness is None:
        return None

    def letter_between(src: int, dst: int) -> int:
        for letter in range(a.num_letters):
            if a.delta[src][letter] == dst:
                return letter
        raise RuntimeError("no edge between walk states")

    cycle_letters = []
    for i, q in enumerate(witness):
        nxt = witness[(i + 1) % len(witness)]
        cycle_letters.append(letter_between(q, nxt))

    # shortest letter path start -> witness[0]
    target = witness[0]
    prev: dict[int, tuple[int, int]] = {}
    frontier = [start]
    seen = {start}
    while frontier and target not in seen:
        nxt_frontier = []
        for q in frontier:
            for letter in range(a.num_letters):
                t = a.delta[q][letter]
                if t not in seen:
                    seen.add(t)
                    prev[t] = (q, letter)
                    nxt_frontier.append(t)
        frontier = nxt_frontier
    stem_letters: list[int] = []
    q = target
    while q != start:
        p, letter = prev[q]
        stem_letters.append(letter)
        q = p
    stem_letters.reverse()
    return stem_letters, cycle_letters

"""Labeled Markov chains.

Chains keep sparse transition rows over dense state indices, with a name
table for the outside world.  Probabilities are either exact rationals
(`fractions.Fraction`, the default for parsed files) or floats; the two
modes must not be mixed within a chain.  Analytic questions (reachability,
satisfaction probability) are answered exactly in rational mode by Gaussian
elimination and numerically, with one refinement pass, in float mode.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .automata import RabinAutomaton, letter_index

FLOAT_TOL = 1e-9


class ChainFormatError(ValueError):
    """The chain file does not parse."""


@dataclass
class MarkovChain:
    names: list[str]
    labels: list[frozenset[str]]
    rows: list[dict[int, Fraction | float]]
    init: dict[int, Fraction | float]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.index = {name: i for i, name in enumerate(self.names)}

    @property
    def num_states(self) -> int:
        return len(self.names)

    def is_exact(self) -> bool:
        probs = [p for row in self.rows for p in row.values()]
        probs.extend(self.init.values())
        return all(isinstance(p, Fraction) for p in probs)

    def ap_names(self) -> tuple[str, ...]:
        out: set[str] = set()
        for label in self.labels:
            out |= label
        return tuple(sorted(out))


@dataclass
class ProductChain:
    """A chain over pairs (automaton state, system state).

    The successor of (q, s) pairs the automaton state reached by reading
    the label of s with a successor of s, so all successors of a product
    state share their automaton component.
    """

    dra: RabinAutomaton
    system: MarkovChain
    states: list[tuple[int, int]]
    rows: list[dict[int, Fraction | float]]
    init: dict[int, Fraction | float]
    index: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.index = {pair: i for i, pair in enumerate(self.states)}

    @property
    def num_states(self) -> int:
        return len(self.states)

    def is_exact(self) -> bool:
        return self.system.is_exact()

    def state_name(self, i: int) -> str:
        q, s = self.states[i]
        return f"{q}:{self.system.names[s]}"

    def to_markov(self) -> MarkovChain:
        return MarkovChain(
            names=[self.state_name(i) for i in range(self.num_states)],
            labels=[self.system.labels[s] for _, s in self.states],
            rows=[dict(row) for row in self.rows],
            init=dict(self.init),
        )


@dataclass
class SccDecomposition:
    components: list[list[int]]
    bottom: list[bool]
    good: list[bool] | None = None


def validate(chain: MarkovChain, p_min: Fraction | float | None = None) -> list[str]:
    """Stochasticity diagnostics; an empty list means the chain is valid."""
    out = []
    exact = chain.is_exact()
    probs = [p for row in chain.rows for p in row.values()]
    probs.extend(chain.init.values())
    if not exact and any(isinstance(p, Fraction) for p in probs):
        out.append("mixed rational and float probabilities")

    def close(total, target=1):
        if exact:
            return total == target
        return abs(total - target) <= FLOAT_TOL

    for i, row in enumerate(chain.rows):
        name = chain.names[i]
        for j, p in row.items():
            if p <= 0:
                out.append(f"transition {name} -> {chain.names[j]} has probability {p} <= 0")
            elif p_min is not None and p < p_min:
                out.append(f"transition {name} -> {chain.names[j]} is below p_min: {p}")
        total = sum(row.values())
        if not close(total):
            out.append(f"row {name} sums to {total}, not 1")
    for i, p in chain.init.items():
        if p < 0:
            out.append(f"initial probability of {chain.names[i]} is negative")
    total = sum(chain.init.values())
    if not close(total):
        out.append(f"initial distribution sums to {total}, not 1")
    return out


# ------------------------------------------------------------- file format

def _parse_prob(token: str) -> Fraction:
    try:
        if "/" in token:
            num, _, den = token.partition("/")
            return Fraction(int(num), int(den))
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ChainFormatError(f"bad probability {token!r}") from exc


def parse_chain(text: str) -> MarkovChain:
    """Parse the line-oriented chain format.

    `state <id> [props <ap> ...]` declares a state, `init <id> <prob>` and
    `trans <src> <dst> <prob>` fill the distributions.  States must be
    declared before use; '#' starts a comment.
    """
    names: list[str] = []
    labels: list[frozenset[str]] = []
    index: dict[str, int] = {}
    rows: list[dict[int, Fraction]] = []
    init: dict[int, Fraction] = {}

    def resolve(token: str, lineno: int) -> int:
        if token not in index:
            raise ChainFormatError(f"line {lineno}: state {token!r} not declared")
        return index[token]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "state":
            if len(tokens) < 2:
                raise ChainFormatError(f"line {lineno}: state needs an identifier")
            name = tokens[1]
            if name in index:
                raise ChainFormatError(f"line {lineno}: state {name!r} declared twice")
            props: tuple[str, ...] = ()
            if len(tokens) > 2:
                if tokens[2] != "props":
                    raise ChainFormatError(
                        f"line {lineno}: expected 'props', got {tokens[2]!r}")
                props = tuple(tokens[3:])
            index[name] = len(names)
            names.append(name)
            labels.append(frozenset(props))
            rows.append({})
        elif kind == "init":
            if len(tokens) != 3:
                raise ChainFormatError(f"line {lineno}: init takes state and probability")
            i = resolve(tokens[1], lineno)
            if i in init:
                raise ChainFormatError(f"line {lineno}: repeated init entry for {tokens[1]!r}")
            init[i] = _parse_prob(tokens[2])
        elif kind == "trans":
            if len(tokens) != 4:
                raise ChainFormatError(
                    f"line {lineno}: trans takes source, destination and probability")
            src = resolve(tokens[1], lineno)
            dst = resolve(tokens[2], lineno)
            if dst in rows[src]:
                raise ChainFormatError(
                    f"line {lineno}: repeated transition {tokens[1]} -> {tokens[2]}")
            rows[src][dst] = _parse_prob(tokens[3])
        else:
            raise ChainFormatError(f"line {lineno}: unknown directive {kind!r}")

    return MarkovChain(names=names, labels=labels, rows=rows, init=init)


def _format_prob(p: Fraction | float) -> str:
    if isinstance(p, Fraction):
        return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
    return repr(p)


def format_chain(chain: MarkovChain) -> str:
    lines = []
    for i, name in enumerate(chain.names):
        props = " props " + " ".join(sorted(chain.labels[i])) if chain.labels[i] else ""
        lines.append(f"state {name}{props}")
    for i in sorted(chain.init):
        lines.append(f"init {chain.names[i]} {_format_prob(chain.init[i])}")
    for i, row in enumerate(chain.rows):
        for j in sorted(row):
            lines.append(f"trans {chain.names[i]} {chain.names[j]} {_format_prob(row[j])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- product

def product(dra: RabinAutomaton, chain: MarkovChain) -> ProductChain:
    """Product chain, restricted to the states reachable from its initial
    distribution.  The automaton advances on the label of the state being
    left: (q, s) -> (step(q, label(s)), s')."""
    letters = [letter_index(dra.ap, label) for label in chain.labels]
    states: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}

    def intern(pair: tuple[int, int]) -> int:
        if pair not in index:
            index[pair] = len(states)
            states.append(pair)
        return index[pair]

    init = {}
    for s in sorted(chain.init):
        init[intern((dra.initial, s))] = chain.init[s]
    rows: list[dict[int, Fraction | float]] = []
    pos = 0
    while pos < len(states):
        q, s = states[pos]
        succ_q = dra.delta[q][letters[s]]
        row = {}
        for t in sorted(chain.rows[s]):
            row[intern((succ_q, t))] = chain.rows[s][t]
        rows.append(row)
        pos += 1
    return ProductChain(dra=dra, system=chain, states=states, rows=rows, init=init)


# ------------------------------------------------------------------- SCCs

def _tarjan(rows: list[dict]) -> list[list[int]]:
    """Iterative Tarjan; emits components with successors first."""
    n = len(rows)
    index_of = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index_of[root] != -1:
            continue
        work = [(root, iter(sorted(rows[root])))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index_of[w] == -1:
                    index_of[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(rows[w]))))
                    advanced = True
                    break
                if on_stack[w]:
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
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def scc_decompose(chain: MarkovChain | ProductChain) -> SccDecomposition:
    """Strongly connected components in topological order (edges only go
    from earlier to later components), with bottom flags.  Chains over
    (automaton state, system state) pairs, recognized by their dra
    attribute, also get per-component good flags from the Rabin pairs."""
    comps = _tarjan(chain.rows)
    comps.reverse()
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    bottom = []
    for ci, comp in enumerate(comps):
        inside = set(comp)
        bottom.append(all(t in inside for v in comp for t in chain.rows[v]))
    good = None
    dra = getattr(chain, "dra", None)
    if dra is not None:
        good = []
        for comp in comps:
            auto = {chain.states[v][0] for v in comp}
            good.append(any(auto & fset and not auto & gset
                            for fset, gset in dra.pairs))
    return SccDecomposition(components=comps, bottom=bottom, good=good)


# ----------------------------------------------------------------- solves

def good_reach_values(pc: ProductChain) -> list[Fraction] | list[float]:
    """Per-state probability of reaching a good bottom component.

    Values are 1 on good bottom components, 0 on bad ones, and solve
    x = P x on the transient part.
    """
    dec = scc_decompose(pc)
    fixed: dict[int, Fraction | float] = {}
    exact = pc.is_exact()
    one: Fraction | float = Fraction(1) if exact else 1.0
    zero: Fraction | float = Fraction(0) if exact else 0.0
    for comp, is_bottom, is_good in zip(dec.components, dec.bottom, dec.good):
        if is_bottom:
            for v in comp:
                fixed[v] = one if is_good else zero
    transient = [v for v in range(pc.num_states) if v not in fixed]
    if not transient:
        values = [fixed[v] for v in range(pc.num_states)]
        return values
    pos = {v: k for k, v in enumerate(transient)}
    t = len(transient)
    if exact:
        matrix = [[Fraction(0)] * t for _ in range(t)]
        rhs = [Fraction(0)] * t
        for v in transient:
            k = pos[v]
            matrix[k][k] = Fraction(1)
            for w, p in pc.rows[v].items():
                if w in pos:
                    matrix[k][pos[w]] -= p
                else:
                    rhs[k] += p * fixed[w]
        solution = _solve_exact(matrix, rhs)
    else:
        import numpy as np

        matrix = np.eye(t)
        rhs = np.zeros(t)
        for v in transient:
            k = pos[v]
            for w, p in pc.rows[v].items():
                if w in pos:
                    matrix[k][pos[w]] -= p
                else:
                    rhs[k] += p * fixed[w]
        try:
            solution = np.linalg.solve(matrix, rhs)
            residual = rhs - matrix @ solution
            solution = solution + np.linalg.solve(matrix, residual)
        except np.linalg.LinAlgError as exc:
            raise ValueError("transient system is singular; chain invalid?") from exc
        solution = [float(x) for x in solution]
    values = [None] * pc.num_states
    for v, val in fixed.items():
        values[v] = val
    for v in transient:
        values[v] = solution[pos[v]]
    return values


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with partial pivoting over the rationals."""
    n = len(matrix)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise ValueError("transient system is singular; chain invalid?")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def sat_probability(pc: ProductChain) -> Fraction | float:
    """Probability that a run of the product chain is accepted: the mass of
    the runs reaching a good bottom component."""
    values = good_reach_values(pc)
    total = sum((pc.init[i] * values[i] for i in pc.init),
                Fraction(0) if pc.is_exact() else 0.0)
    return total


# --------------------------------------------------------------- sampling

def sample_run(chain: MarkovChain, seed: int, max_steps: int) -> list[int]:
    """One trajectory of exactly max_steps states, drawn with a PRNG seeded
    by seed.  Raises on chains with dead-end states."""
    rng = random.Random(seed)

    def draw(dist: dict[int, Fraction | float], what: str) -> int:
        u = rng.random()
        acc = 0.0
        last = None
        for j in sorted(dist):
            acc += float(dist[j])
            last = j
            if u < acc:
                return j
        if last is None:
            raise ValueError(f"cannot sample from empty {what}")
        return last

    if max_steps <= 0:
        return []
    run = [draw(chain.init, "initial distribution")]
    while len(run) < max_steps:
        run.append(draw(chain.rows[run[-1]], f"row of {chain.names[run[-1]]}"))
    return run

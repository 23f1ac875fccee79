"""Translation from LTL to nondeterministic Buchi automata.

Tableau-style construction.  Automaton states are obligation sets: formulas
in negation normal form that must all hold from the current position.  A
state is expanded into "moves", each move being one consistent way to
discharge every obligation: constraints on the current letter together with
obligations deferred to the next position.  Deferring an Until or an
Eventually counts as a promise; a run is accepting when no promise is
deferred forever.  Promises are tracked one at a time by a counter, which
turns the generalized acceptance into ordinary state-based Buchi acceptance.
"""
from __future__ import annotations

from .automata import BuchiAutomaton, StateCapExceeded, check_ap
from .ltl import (
    Always,
    And,
    Atom,
    Eventually,
    FalseConst,
    Formula,
    Next,
    Not,
    Or,
    Release,
    TrueConst,
    Until,
    atoms,
    subformulas,
    to_nnf,
)

DEFAULT_STATE_CAP = 100_000

Move = tuple[int, int, frozenset, int]  # pos mask, neg mask, next obligations, promise mask


def _expand(state: frozenset, ap_index: dict[str, int], promise_bit: dict[Formula, int]) -> list[Move]:
    """All consistent moves of an obligation set.

    Work items carry the not yet processed obligations plus the partial move.
    Branching obligations (Or, Until, Release, Eventually) fork the item.
    Items with contradictory letter constraints are dropped.
    """
    found: dict[Move, None] = {}
    pending = sorted(state, key=str)
    pending.reverse()
    stack: list[tuple[list, int, int, list, int]] = [(pending, 0, 0, [], 0)]
    while stack:
        todo, pos, neg, nxt, prom = stack.pop()
        dead = False
        while todo:
            f = todo.pop()
            if isinstance(f, TrueConst):
                continue
            if isinstance(f, FalseConst):
                dead = True
                break
            if isinstance(f, Atom):
                bit = 1 << ap_index[f.name]
                if neg & bit:
                    dead = True
                    break
                pos |= bit
            elif isinstance(f, Not):
                bit = 1 << ap_index[f.operand.name]
                if pos & bit:
                    dead = True
                    break
                neg |= bit
            elif isinstance(f, And):
                todo.append(f.right)
                todo.append(f.left)
            elif isinstance(f, Or):
                stack.append((todo + [f.right], pos, neg, list(nxt), prom))
                todo.append(f.left)
            elif isinstance(f, Next):
                nxt.append(f.operand)
            elif isinstance(f, Until):
                deferred = (todo + [f.left], pos, neg, nxt + [f], prom | promise_bit[f])
                stack.append(deferred)
                todo.append(f.right)
            elif isinstance(f, Release):
                fulfilled = (todo + [f.left, f.right], pos, neg, list(nxt), prom)
                stack.append(fulfilled)
                todo.append(f.right)
                nxt.append(f)
            elif isinstance(f, Eventually):
                stack.append((list(todo), pos, neg, nxt + [f], prom | promise_bit[f]))
                todo.append(f.operand)
            elif isinstance(f, Always):
                todo.append(f.operand)
                nxt.append(f)
            else:
                raise TypeError(f"unexpected formula node {type(f).__name__}")
        if not dead:
            found[(pos, neg, frozenset(nxt), prom)] = None
    return list(found)


def ltl_to_nba(formula: Formula, ap: tuple[str, ...] | None = None,
               max_states: int = DEFAULT_STATE_CAP) -> BuchiAutomaton:
    """Translate a formula into a nondeterministic Buchi automaton.

    ``ap`` fixes the alphabet; it defaults to the atoms of the formula in
    sorted order and must cover them when given explicitly.
    """
    f = to_nnf(formula)
    names = atoms(f)
    if ap is None:
        ap = tuple(sorted(names))
    else:
        ap = tuple(ap)
        missing = names - set(ap)
        if missing:
            raise ValueError(f"alphabet is missing atoms: {sorted(missing)}")
    check_ap(ap)
    ap_index = {name: i for i, name in enumerate(ap)}

    promised = sorted(
        (g for g in subformulas(f) if isinstance(g, (Until, Eventually))),
        key=str,
    )
    promise_bit = {g: 1 << i for i, g in enumerate(promised)}
    k = len(promised)

    initial_ob = frozenset({f})
    ob_index: dict[frozenset, int] = {initial_ob: 0}
    ob_moves: list[list[Move]] = []
    queue = [initial_ob]
    while queue:
        ob = queue.pop(0)
        moves = _expand(ob, ap_index, promise_bit)
        ob_moves.append(moves)
        for _, _, nxt, _ in moves:
            if nxt not in ob_index:
                ob_index[nxt] = len(ob_index)
                queue.append(nxt)
                if len(ob_index) * (k + 1) > max_states:
                    raise StateCapExceeded(
                        f"Buchi construction exceeded {max_states} states")

    # state id = obligation index * (k + 1) + counter, counter in 0..k;
    # counter == k marks a completed round through all promises
    width = k + 1
    num_states = len(ob_index) * width
    num_letters = 1 << len(ap)
    delta: list[list[frozenset[int]]] = []
    for si in range(len(ob_index)):
        moves = ob_moves[si]
        for j in range(width):
            row = []
            start = 0 if j == k else j
            for letter in range(num_letters):
                succ = set()
                for pos, neg, nxt, prom in moves:
                    if letter & pos != pos or letter & neg:
                        continue
                    i = start
                    while i < k and not prom >> i & 1:
                        i += 1
                    succ.add(ob_index[nxt] * width + i)
                row.append(frozenset(succ))
            delta.append(row)
    accepting = frozenset(si * width + k for si in range(len(ob_index)))
    return BuchiAutomaton(
        ap=ap,
        num_states=num_states,
        initial=frozenset({0}),
        accepting=accepting,
        delta=delta,
    )

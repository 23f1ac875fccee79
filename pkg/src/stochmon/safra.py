"""Determinization of Buchi automata into Rabin automata.

Safra's construction.  A deterministic state is a tree of nodes, each node
carrying a name, a set of Buchi states, and a mark.  Child labels are
disjoint subsets of their parent's label; the root tracks the full subset
construction while deeper nodes track runs that keep hitting the Buchi
accepting set.  One letter advances a tree in six steps:

 1. remove all marks
 2. every node whose label meets the accepting set sprouts a youngest
    child holding that intersection, named with the smallest unused name
 3. every label is replaced by its image under the transition relation
 4. a state appearing in an older sibling is removed from younger
    siblings and their subtrees
 5. nodes with empty labels are removed along with their subtrees
 6. a node whose children jointly cover its label loses its descendants
    and is marked

A tree with an empty root becomes the rejecting sink.  The Rabin pair for
name i accepts runs in which i is eventually never absent from the tree yet
marked infinitely often.  Names live in {1, ..., 2n} for an n-state input;
pairs whose marked set turns out empty are dropped.
"""
from __future__ import annotations

import heapq

from .automata import BuchiAutomaton, RabinAutomaton, StateCapExceeded

DEFAULT_STATE_CAP = 100_000


class _Node:
    __slots__ = ("name", "label", "marked", "children")

    def __init__(self, name: int, label: set[int], marked: bool, children: list):
        self.name = name
        self.label = label
        self.marked = marked
        self.children = children


def _encode(node: _Node) -> tuple:
    return (node.name, frozenset(node.label), node.marked,
            tuple(_encode(c) for c in node.children))


def _decode(enc: tuple) -> _Node:
    name, label, marked, children = enc
    return _Node(name, set(label), marked, [_decode(c) for c in children])


def _preorder(node: _Node) -> list[_Node]:
    out = [node]
    for c in node.children:
        out.extend(_preorder(c))
    return out


def _step(tree: tuple | None, letter: int, nba: BuchiAutomaton) -> tuple | None:
    if tree is None:
        return None
    root = _decode(tree)
    nodes = _preorder(root)

    for v in nodes:
        v.marked = False

    used = {v.name for v in nodes}
    free = [name for name in range(1, 2 * nba.num_states + 1) if name not in used]
    heapq.heapify(free)
    for v in nodes:
        seed = v.label & nba.accepting
        if seed:
            v.children.append(_Node(heapq.heappop(free), set(seed), False, []))

    for v in _preorder(root):
        image: set[int] = set()
        for q in v.label:
            image |= nba.delta[q][letter]
        v.label = image

    def strip(v: _Node, states: set[int]) -> None:
        v.label -= states
        for c in v.children:
            strip(c, states)

    def horizontal(v: _Node) -> None:
        seen: set[int] = set()
        for c in v.children:
            strip(c, seen)
            seen |= c.label
            horizontal(c)

    horizontal(root)

    def drop_empty(v: _Node) -> None:
        v.children = [c for c in v.children if c.label]
        for c in v.children:
            drop_empty(c)

    drop_empty(root)
    if not root.label:
        return None

    def vertical(v: _Node) -> None:
        if v.children:
            covered: set[int] = set()
            for c in v.children:
                covered |= c.label
            if covered == v.label:
                v.children = []
                v.marked = True
                return
        for c in v.children:
            vertical(c)

    vertical(root)
    return _encode(root)


def determinize(nba: BuchiAutomaton, max_states: int = DEFAULT_STATE_CAP) -> RabinAutomaton:
    """Determinize a Buchi automaton into an equivalent Rabin automaton.

    The result is complete; rejected dead ends collapse into a sink state.
    """
    if nba.initial:
        init: tuple | None = (1, frozenset(nba.initial), False, ())
    else:
        init = None
    index: dict[tuple | None, int] = {init: 0}
    order: list[tuple | None] = [init]
    delta: list[list[int]] = []
    pos = 0
    while pos < len(order):
        tree = order[pos]
        row = []
        for letter in range(nba.num_letters):
            nxt = _step(tree, letter, nba)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                if len(order) > max_states:
                    raise StateCapExceeded(
                        f"determinization exceeded {max_states} states")
            row.append(index[nxt])
        delta.append(row)
        pos += 1

    def names_in(enc: tuple | None) -> set[int]:
        if enc is None:
            return set()
        name, _, _, children = enc
        out = {name}
        for c in children:
            out |= names_in(c)
        return out

    def marked_in(enc: tuple | None) -> set[int]:
        if enc is None:
            return set()
        name, _, marked, children = enc
        out = {name} if marked else set()
        for c in children:
            out |= marked_in(c)
        return out

    pairs = []
    for name in range(1, 2 * nba.num_states + 1):
        fset = frozenset(i for i, enc in enumerate(order) if name in marked_in(enc))
        if not fset:
            continue
        gset = frozenset(i for i, enc in enumerate(order) if name not in names_in(enc))
        pairs.append((fset, gset))

    return RabinAutomaton(
        ap=nba.ap,
        num_states=len(order),
        initial=0,
        delta=delta,
        pairs=pairs,
    )


def ltl_to_dra(formula, ap: tuple[str, ...] | None = None,
               max_states: int = DEFAULT_STATE_CAP) -> RabinAutomaton:
    """Full pipeline: formula to deterministic Rabin automaton."""
    from .tableau import ltl_to_nba

    nba = ltl_to_nba(formula, ap=ap, max_states=max_states)
    return determinize(nba, max_states=max_states)

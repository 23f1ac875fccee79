"""Linear temporal logic: syntax tree, parser, negation normal form, and
satisfaction of ultimately periodic words.

Formulas are immutable trees built from atomic propositions, boolean
connectives, and the temporal operators X (next), U (until), R (release),
F (eventually), and G (always).  Words are lassos: a finite prefix followed
by a finite cycle repeated forever.  `lasso_models` decides satisfaction
exactly; `lasso_models_unrolled` is an independent second implementation
used to cross-check it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


class Formula:
    """Base class for LTL syntax tree nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return _to_str(self)


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


TRUE = TrueConst()
FALSE = FalseConst()


def _to_str(f: Formula) -> str:
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return f"!{_wrap(f.operand)}"
    if isinstance(f, Next):
        return f"X {_wrap(f.operand)}"
    if isinstance(f, Eventually):
        return f"F {_wrap(f.operand)}"
    if isinstance(f, Always):
        return f"G {_wrap(f.operand)}"
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Until):
        return f"{_wrap(f.left)} U {_wrap(f.right)}"
    if isinstance(f, Release):
        return f"{_wrap(f.left)} R {_wrap(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula) -> str:
    if isinstance(f, (TrueConst, FalseConst, Atom, Not, Next, Eventually, Always)):
        return _to_str(f)
    return f"({_to_str(f)})"


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every distinct subformula of ``f`` in bottom-up order."""
    seen: set[Formula] = set()

    def walk(g: Formula) -> Iterator[Formula]:
        if g in seen:
            return
        if isinstance(g, (Not, Next, Eventually, Always)):
            yield from walk(g.operand)
        elif isinstance(g, (And, Or, Until, Release)):
            yield from walk(g.left)
            yield from walk(g.right)
        seen.add(g)
        yield g

    yield from walk(f)


def atoms(f: Formula) -> frozenset[str]:
    """The set of atomic proposition names occurring in ``f``."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def formula_size(f: Formula) -> int:
    """Number of nodes in the syntax tree (shared subtrees counted once per use)."""
    if isinstance(f, (TrueConst, FalseConst, Atom)):
        return 1
    if isinstance(f, (Not, Next, Eventually, Always)):
        return 1 + formula_size(f.operand)
    return 1 + formula_size(f.left) + formula_size(f.right)


# ---------------------------------------------------------------------------
# Parser


class LtlSyntaxError(ValueError):
    """Raised on malformed concrete syntax; carries line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_KEYWORDS = {"U", "R", "X", "F", "G", "AND", "OR", "NOT", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in "()&|!":
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if text.startswith("->", i):
            tokens.append(("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            tokens.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        raise LtlSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def advance(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> LtlSyntaxError:
        _, _, line, col = self.tokens[self.pos]
        return LtlSyntaxError(message, line, col)

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.peek() == "->":
            self.advance()
            right = self.parse_formula()
            return Or(Not(left), right)
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.peek() in ("|", "OR"):
            self.advance()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_until()
        while self.peek() in ("&", "AND"):
            self.advance()
            f = And(f, self.parse_until())
        return f

    def parse_until(self) -> Formula:
        # U and R associate to the right: p U q U r reads p U (q U r).
        operands = [self.parse_unary()]
        ops = []
        while self.peek() in ("U", "R"):
            ops.append(self.advance()[0])
            operands.append(self.parse_unary())
        f = operands[-1]
        for op, lhs in zip(reversed(ops), reversed(operands[:-1])):
            f = Until(lhs, f) if op == "U" else Release(lhs, f)
        return f

    def parse_unary(self) -> Formula:
        kind = self.peek()
        if kind in ("!", "NOT"):
            self.advance()
            return Not(self.parse_unary())
        if kind == "X":
            self.advance()
            return Next(self.parse_unary())
        if kind == "F":
            self.advance()
            return Eventually(self.parse_unary())
        if kind == "G":
            self.advance()
            return Always(self.parse_unary())
        if kind == "(":
            self.advance()
            f = self.parse_formula()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.advance()
            return f
        if kind == "true":
            self.advance()
            return TRUE
        if kind == "false":
            self.advance()
            return FALSE
        if kind == "ident":
            _, word, _, _ = self.advance()
            return Atom(word)
        raise self.error(f"expected a formula, found {self.tokens[self.pos][1]!r}"
                         if kind != "end" else "unexpected end of input")


def parse_ltl(text: str, expand_derived: bool = False) -> Formula:
    """Parse concrete syntax into a formula tree.

    Accepts symbolic (``&``, ``|``, ``!``, ``->``) and word (``AND``, ``OR``,
    ``NOT``) connectives; ``U``, ``R``, ``X``, ``F``, ``G``, ``true`` and
    ``false`` are reserved words and cannot be used as atom names.
    Implication ``a -> b`` is expanded to ``!a | b`` while parsing.  With
    ``expand_derived`` the operators F and G are rewritten into U and R.
    """
    parser = _Parser(_tokenize(text))
    f = parser.parse_formula()
    if parser.peek() != "end":
        raise parser.error(f"trailing input starting at {parser.tokens[parser.pos][1]!r}")
    return expand_fg(f) if expand_derived else f


def expand_fg(f: Formula) -> Formula:
    """Rewrite F g as (true U g) and G g as (false R g), recursively."""
    if isinstance(f, (TrueConst, FalseConst, Atom)):
        return f
    if isinstance(f, Not):
        return Not(expand_fg(f.operand))
    if isinstance(f, Next):
        return Next(expand_fg(f.operand))
    if isinstance(f, Eventually):
        return Until(TRUE, expand_fg(f.operand))
    if isinstance(f, Always):
        return Release(FALSE, expand_fg(f.operand))
    if isinstance(f, And):
        return And(expand_fg(f.left), expand_fg(f.right))
    if isinstance(f, Or):
        return Or(expand_fg(f.left), expand_fg(f.right))
    if isinstance(f, Until):
        return Until(expand_fg(f.left), expand_fg(f.right))
    if isinstance(f, Release):
        return Release(expand_fg(f.left), expand_fg(f.right))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Negation normal form


def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms, dualizing operators on the way.

    The result contains Not only directly above atoms and is language
    equivalent to the input.  F and G are kept (their duals are G and F).
    """
    if isinstance(f, (TrueConst, FalseConst, Atom)):
        return f
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.operand))
    if isinstance(f, Until):
        return Until(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Release):
        return Release(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Eventually):
        return Eventually(to_nnf(f.operand))
    if isinstance(f, Always):
        return Always(to_nnf(f.operand))
    if isinstance(f, Not):
        g = f.operand
        if isinstance(g, TrueConst):
            return FALSE
        if isinstance(g, FalseConst):
            return TRUE
        if isinstance(g, Atom):
            return f
        if isinstance(g, Not):
            return to_nnf(g.operand)
        if isinstance(g, And):
            return Or(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Or):
            return And(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Next):
            return Next(to_nnf(Not(g.operand)))
        if isinstance(g, Until):
            return Release(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Release):
            return Until(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Eventually):
            return Always(to_nnf(Not(g.operand)))
        if isinstance(g, Always):
            return Eventually(to_nnf(Not(g.operand)))
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, Not) and not isinstance(g.operand, Atom):
            return False
    return True


# ---------------------------------------------------------------------------
# Lasso words and satisfaction


@dataclass(frozen=True)
class LassoWord:
    """An ultimately periodic word: ``prefix`` then ``cycle`` forever.

    Each position is the set of atomic propositions holding there.
    """

    prefix: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]

    def __post_init__(self):
        if len(self.cycle) == 0:
            raise ValueError("lasso cycle must be nonempty")

    def letter(self, i: int) -> frozenset[str]:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def canonical_length(self) -> int:
        return len(self.prefix) + len(self.cycle)


def lasso_models(word: LassoWord, f: Formula) -> bool:
    """Decide whether the infinite word satisfies the formula.

    Satisfaction values of every subformula are computed at the canonical
    positions 0..|prefix|+|cycle|-1.  Fixpoint operators are resolved on the
    cycle by unrolling it twice: a least-fixpoint witness within the cycle
    never needs more than one full period of lookahead, so the first copy's
    values are exact.  Greatest fixpoints follow by duality.
    """
    np_ = len(word.prefix)
    m = len(word.cycle)
    total = np_ + m
    letters = [word.letter(i) for i in range(total)]
    values: dict[Formula, list[bool]] = {}

    def cycle_until(phi: list[bool], psi: list[bool]) -> list[bool]:
        # Backward pass over two unrolled periods; boundary pessimistic.
        dp = [False] * (2 * m)
        acc = False
        for t in range(2 * m - 1, -1, -1):
            i = np_ + (t % m)
            acc = psi[i] or (phi[i] and acc)
            dp[t] = acc
        return dp[:m]

    def cycle_release(phi: list[bool], psi: list[bool]) -> list[bool]:
        # Dual of cycle_until; boundary optimistic.
        dp = [True] * (2 * m)
        acc = True
        for t in range(2 * m - 1, -1, -1):
            i = np_ + (t % m)
            acc = psi[i] and (phi[i] or acc)
            dp[t] = acc
        return dp[:m]

    def fill_fixpoint(phi: list[bool], psi: list[bool], release: bool) -> list[bool]:
        cyc = cycle_release(phi, psi) if release else cycle_until(phi, psi)
        out = [False] * total
        for j in range(m):
            out[np_ + j] = cyc[j]
        nxt = out[np_] if m > 0 else False
        for i in range(np_ - 1, -1, -1):
            if release:
                out[i] = psi[i] and (phi[i] or nxt)
            else:
                out[i] = psi[i] or (phi[i] and nxt)
            nxt = out[i]
        return out

    true_row = [True] * total
    false_row = [False] * total

    for g in subformulas(f):
        if isinstance(g, TrueConst):
            values[g] = true_row
        elif isinstance(g, FalseConst):
            values[g] = false_row
        elif isinstance(g, Atom):
            values[g] = [g.name in letters[i] for i in range(total)]
        elif isinstance(g, Not):
            values[g] = [not v for v in values[g.operand]]
        elif isinstance(g, And):
            lv, rv = values[g.left], values[g.right]
            values[g] = [a and b for a, b in zip(lv, rv)]
        elif isinstance(g, Or):
            lv, rv = values[g.left], values[g.right]
            values[g] = [a or b for a, b in zip(lv, rv)]
        elif isinstance(g, Next):
            ov = values[g.operand]
            row = [ov[i + 1] for i in range(total - 1)]
            row.append(ov[np_])
            values[g] = row
        elif isinstance(g, Until):
            values[g] = fill_fixpoint(values[g.left], values[g.right], release=False)
        elif isinstance(g, Release):
            values[g] = fill_fixpoint(values[g.left], values[g.right], release=True)
        elif isinstance(g, Eventually):
            values[g] = fill_fixpoint(true_row, values[g.operand], release=False)
        elif isinstance(g, Always):
            values[g] = fill_fixpoint(false_row, values[g.operand], release=True)
        else:
            raise TypeError(f"not a formula: {g!r}")

    return values[f][0]


def lasso_models_fixpoint(word: LassoWord, f: Formula) -> bool:
    """Second, independent satisfaction oracle.

    Works on the lasso graph of canonical positions (the last position loops
    back into the cycle) and resolves each U/F subformula by iterating its
    expansion law from all-false until a fixpoint, each R/G subformula dually
    from all-true.  Every sweep extends the effective lookahead by one
    traversal of the word, so iteration to stability replaces the explicit
    double unrolling of `lasso_models`.
    """
    np_ = len(word.prefix)
    total = np_ + len(word.cycle)
    letters = [word.letter(i) for i in range(total)]
    succ = [i + 1 for i in range(total)]
    succ[total - 1] = np_
    values: dict[Formula, list[bool]] = {}

    def iterate(phi: list[bool], psi: list[bool], release: bool) -> list[bool]:
        row = [release] * total
        changed = True
        while changed:
            changed = False
            for i in range(total - 1, -1, -1):
                nxt = row[succ[i]]
                v = (psi[i] and (phi[i] or nxt)) if release else (psi[i] or (phi[i] and nxt))
                if v != row[i]:
                    row[i] = v
                    changed = True
        return row

    true_row = [True] * total
    false_row = [False] * total
    for g in subformulas(f):
        if isinstance(g, TrueConst):
            values[g] = true_row
        elif isinstance(g, FalseConst):
            values[g] = false_row
        elif isinstance(g, Atom):
            values[g] = [g.name in let for let in letters]
        elif isinstance(g, Not):
            values[g] = [not v for v in values[g.operand]]
        elif isinstance(g, And):
            values[g] = [a and b for a, b in zip(values[g.left], values[g.right])]
        elif isinstance(g, Or):
            values[g] = [a or b for a, b in zip(values[g.left], values[g.right])]
        elif isinstance(g, Next):
            ov = values[g.operand]
            values[g] = [ov[succ[i]] for i in range(total)]
        elif isinstance(g, Until):
            values[g] = iterate(values[g.left], values[g.right], release=False)
        elif isinstance(g, Eventually):
            values[g] = iterate(true_row, values[g.operand], release=False)
        elif isinstance(g, Release):
            values[g] = iterate(values[g.left], values[g.right], release=True)
        elif isinstance(g, Always):
            values[g] = iterate(false_row, values[g.operand], release=True)
        else:
            raise TypeError(f"not a formula: {g!r}")
    return values[f][0]

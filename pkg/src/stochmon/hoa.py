"""Reading and writing deterministic Rabin automata in HOA v1 format.

Only the slice of the format needed for exchanging Rabin automata is
supported.  The writer emits state-based acceptance with one edge line per
letter, the acceptance condition as a disjunction of Fin/Inf clauses, and a
Rabin acc-name header.  The reader is more liberal: arbitrary boolean edge
labels, acceptance sets on edges (normalized away by splitting states on the
acceptance signature of their incoming edge), and missing edges (completed
with a rejecting sink).  Nondeterministic input is rejected; headers other
than the supported ones are ignored.
"""
from __future__ import annotations

from .automata import RabinAutomaton


class HoaFormatError(ValueError):
    """The input does not parse as supported HOA."""


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise HoaFormatError(f"bad {what}: {text!r}") from exc


# ---------------------------------------------------------------- writing

def _letter_label(letter: int, num_ap: int) -> str:
    if num_ap == 0:
        return "t"
    lits = []
    for i in range(num_ap):
        lits.append(str(i) if letter >> i & 1 else f"!{i}")
    return " & ".join(lits)


def print_hoa(a: RabinAutomaton) -> str:
    """Serialize an automaton; the output parses back to an equal value."""
    lines = ["HOA: v1", f"States: {a.num_states}", f"Start: {a.initial}"]
    ap_names = " ".join(f'"{name}"' for name in a.ap)
    lines.append(f"AP: {len(a.ap)}" + (f" {ap_names}" if a.ap else ""))
    if a.pairs:
        clauses = " | ".join(
            f"(Fin({2 * i}) & Inf({2 * i + 1}))" for i in range(len(a.pairs)))
        lines.append(f"Acceptance: {2 * len(a.pairs)} {clauses}")
        lines.append(f"acc-name: Rabin {len(a.pairs)}")
    else:
        lines.append("Acceptance: 0 f")
    lines.append("--BODY--")
    for q in range(a.num_states):
        sets = []
        for i, (fset, gset) in enumerate(a.pairs):
            if q in gset:
                sets.append(2 * i)
            if q in fset:
                sets.append(2 * i + 1)
        suffix = f" {{{' '.join(map(str, sets))}}}" if sets else ""
        lines.append(f"State: {q}{suffix}")
        for letter in range(a.num_letters):
            lines.append(f"[{_letter_label(letter, len(a.ap))}] {a.delta[q][letter]}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing

def _tokenize_label(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "!&|()":
            tokens.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif c in "tf":
            tokens.append(c)
            i += 1
        else:
            raise HoaFormatError(f"bad character {c!r} in edge label {text!r}")
    return tokens


class _LabelParser:
    def __init__(self, text: str, num_ap: int):
        self.tokens = _tokenize_label(text)
        self.pos = 0
        self.num_ap = num_ap

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise HoaFormatError("unexpected end of edge label")
        self.pos += 1
        return tok

    def parse(self):
        expr = self.parse_or()
        if self.peek() is not None:
            raise HoaFormatError(f"trailing tokens in edge label: {self.tokens[self.pos:]}")
        return expr

    def parse_or(self):
        value = self.parse_and()
        while self.peek() == "|":
            self.take()
            rhs = self.parse_and()
            value = [a or b for a, b in zip(value, rhs)]
        return value

    def parse_and(self):
        value = self.parse_atom()
        while self.peek() == "&":
            self.take()
            rhs = self.parse_atom()
            value = [a and b for a, b in zip(value, rhs)]
        return value

    def parse_atom(self):
        tok = self.take()
        if tok == "!":
            return [not v for v in self.parse_atom()]
        if tok == "(":
            value = self.parse_or()
            if self.take() != ")":
                raise HoaFormatError("missing ) in edge label")
            return value
        letters = 1 << self.num_ap
        if tok == "t":
            return [True] * letters
        if tok == "f":
            return [False] * letters
        if tok.isdigit():
            bit = int(tok)
            if bit >= self.num_ap:
                raise HoaFormatError(f"proposition index {bit} out of range")
            return [bool(m >> bit & 1) for m in range(letters)]
        raise HoaFormatError(f"unexpected token {tok!r} in edge label")


def _parse_acceptance(count: int, text: str) -> list[tuple[int, int]]:
    """Rabin clauses as (fin set, inf set) index pairs."""
    text = text.strip()
    if count == 0:
        if text not in ("f", ""):
            raise HoaFormatError(f"unsupported empty acceptance condition {text!r}")
        return []
    clauses = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        while chunk.startswith("(") and chunk.endswith(")"):
            chunk = chunk[1:-1].strip()
        parts = [p.strip() for p in chunk.split("&")]
        if len(parts) != 2:
            raise HoaFormatError(f"acceptance clause {chunk!r} is not a Fin/Inf pair")
        fin = inf = None
        for part in parts:
            if part.startswith("Fin(") and part.endswith(")"):
                fin = _int(part[4:-1], "Fin argument")
            elif part.startswith("Inf(") and part.endswith(")"):
                inf = _int(part[4:-1], "Inf argument")
            else:
                raise HoaFormatError(f"unsupported acceptance term {part!r}")
        if fin is None or inf is None:
            raise HoaFormatError(f"acceptance clause {chunk!r} needs one Fin and one Inf")
        if fin >= count or inf >= count:
            raise HoaFormatError("acceptance set index out of range")
        clauses.append((fin, inf))
    return clauses


def _parse_set_list(text: str) -> frozenset[int]:
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.split())
    except ValueError as exc:
        raise HoaFormatError(f"bad acceptance set list {text!r}") from exc


def parse_hoa(text: str) -> RabinAutomaton:
    """Parse an automaton, normalizing it to the deterministic, complete,
    state-based form used everywhere else in this package."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("HOA:"):
        raise HoaFormatError("missing HOA: header")
    version = lines[0][4:].strip()
    if version != "v1":
        raise HoaFormatError(f"unsupported HOA version {version!r}")

    num_states = None
    start = None
    ap: tuple[str, ...] | None = None
    acc_count = None
    acc_clauses = None
    body_at = None
    for idx, line in enumerate(lines[1:], start=1):
        if line == "--BODY--":
            body_at = idx
            break
        key, _, rest = line.partition(":")
        rest = rest.strip()
        if key == "States":
            num_states = _int(rest, "state count")
        elif key == "Start":
            if start is not None or " " in rest:
                raise HoaFormatError("automaton must have a single start state")
            start = _int(rest, "start state")
        elif key == "AP":
            parts = rest.split(None, 1)
            count = _int(parts[0], "AP count")
            names = []
            remainder = parts[1] if len(parts) > 1 else ""
            while remainder:
                remainder = remainder.lstrip()
                if not remainder:
                    break
                if remainder[0] != '"':
                    raise HoaFormatError("AP names must be quoted")
                try:
                    end = remainder.index('"', 1)
                except ValueError as exc:
                    raise HoaFormatError("unterminated AP name") from exc
                names.append(remainder[1:end])
                remainder = remainder[end + 1:]
            if len(names) != count:
                raise HoaFormatError(f"AP: declares {count} names, found {len(names)}")
            ap = tuple(names)
        elif key == "Acceptance":
            parts = rest.split(None, 1)
            acc_count = _int(parts[0], "acceptance set count")
            acc_clauses = _parse_acceptance(acc_count, parts[1] if len(parts) > 1 else "")
        else:
            pass  # acc-name, tool, name, properties, anything else

    if body_at is None:
        raise HoaFormatError("missing --BODY--")
    for field, name in ((num_states, "States"), (start, "Start"),
                        (ap, "AP"), (acc_clauses, "Acceptance")):
        if field is None:
            raise HoaFormatError(f"missing {name}: header")
    num_letters = 1 << len(ap)

    # raw edges: per state, list of (letter mask, destination, edge sets)
    state_sets: dict[int, frozenset[int]] = {}
    edges: dict[int, list[tuple[int, int, frozenset[int]]]] = {}
    current = None
    for line in lines[body_at + 1:]:
        if line == "--END--":
            break
        if line.startswith("State:"):
            rest = line[len("State:"):].strip()
            if rest.startswith("["):
                raise HoaFormatError("state labels are not supported")
            sets = frozenset()
            if "{" in rest:
                rest, _, tail = rest.partition("{")
                if not tail.endswith("}"):
                    raise HoaFormatError(f"unterminated set list in {line!r}")
                sets = _parse_set_list(tail[:-1])
            rest = rest.strip()
            if '"' in rest:
                rest = rest[:rest.index('"')].strip()
            current = _int(rest, "state id")
            if current in edges:
                raise HoaFormatError(f"state {current} declared twice")
            if not 0 <= current < num_states:
                raise HoaFormatError(f"state id {current} out of range")
            state_sets[current] = sets
            edges[current] = []
        elif line.startswith("["):
            if current is None:
                raise HoaFormatError("edge line before any State:")
            if "]" not in line:
                raise HoaFormatError(f"unterminated edge label in {line!r}")
            end = line.index("]")
            label = line[1:end]
            rest = line[end + 1:].strip()
            sets = frozenset()
            if "{" in rest:
                rest, _, tail = rest.partition("{")
                if not tail.endswith("}"):
                    raise HoaFormatError(f"unterminated set list in {line!r}")
                sets = _parse_set_list(tail[:-1])
                rest = rest.strip()
            if " " in rest:
                raise HoaFormatError("multiple destinations are not supported")
            dst = _int(rest, "edge destination")
            if not 0 <= dst < num_states:
                raise HoaFormatError(f"destination {dst} out of range")
            truth = _LabelParser(label, len(ap)).parse()
            for letter in range(num_letters):
                if truth[letter]:
                    edges[current].append((letter, dst, sets))
        else:
            raise HoaFormatError(f"unexpected body line {line!r}")

    if not 0 <= start < num_states:
        raise HoaFormatError(f"start state {start} out of range")

    # determinism check and per-letter successor tables
    table: list[list[tuple[int, frozenset[int]] | None]] = [
        [None] * num_letters for _ in range(num_states)]
    for q, qedges in edges.items():
        for letter, dst, sets in qedges:
            if table[q][letter] is not None:
                raise HoaFormatError(
                    f"state {q} is nondeterministic on letter {letter}")
            table[q][letter] = (dst, sets)

    transition_based = any(
        sets for qedges in edges.values() for _, _, sets in qedges)

    if transition_based:
        # split states on the acceptance signature of the incoming edge;
        # edge sets and declared state sets combine
        index: dict[tuple[int, frozenset[int]], int] = {}
        order: list[tuple[int, frozenset[int]]] = []

        def intern(key):
            if key not in index:
                index[key] = len(order)
                order.append(key)
            return index[key]

        intern((start, frozenset()))
        raw_delta: list[list[tuple[int, frozenset[int]] | None]] = []
        pos = 0
        while pos < len(order):
            q, _ = order[pos]
            row: list[tuple[int, frozenset[int]] | None] = []
            for letter in range(num_letters):
                hit = table[q][letter] if q in edges else None
                if hit is None:
                    row.append(None)
                else:
                    dst, sets = hit
                    row.append((intern((dst, sets)), sets))
            raw_delta.append(row)
            pos += 1
        membership = [state_sets.get(q, frozenset()) | sets for q, sets in order]
        resolved = [[entry[0] if entry else None for entry in row] for row in raw_delta]
        total = len(order)
    else:
        membership = [state_sets.get(q, frozenset()) for q in range(num_states)]
        resolved = [[table[q][letter][0] if table[q][letter] else None
                     for letter in range(num_letters)]
                    for q in range(num_states)]
        total = num_states

    if any(entry is None for row in resolved for entry in row) or not resolved:
        sink = total
        total += 1
        membership.append(frozenset())
        resolved = [[sink if entry is None else entry for entry in row]
                    for row in resolved]
        resolved.append([sink] * num_letters)

    pairs = []
    for fin, inf in acc_clauses:
        fset = frozenset(q for q in range(total) if inf in membership[q])
        gset = frozenset(q for q in range(total) if fin in membership[q])
        pairs.append((fset, gset))

    return RabinAutomaton(
        ap=ap,
        num_states=total,
        initial=0 if transition_based else start,
        delta=resolved,
        pairs=pairs,
    )

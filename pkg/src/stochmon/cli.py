"""Command line interface.

One subcommand per pipeline stage: translate a formula to an automaton,
classify automaton states, build a product chain, simulate runs, monitor
a state stream (full or bounded memory), solve for the exact satisfaction
probability, sweep the estimator experiment, and self-check the
translation pipeline against the direct lasso semantics.

stdout carries data only; diagnostics go to stderr.  Exit codes: 0 on
success, 1 on usage errors, 2 on malformed input, 3 when a state cap is
exceeded.
"""
from __future__ import annotations

import argparse
import math
import random
import sys
from fractions import Fraction

from .automata import StateCapExceeded, accepts_lasso, classify_states, letter_index
from .experiments import FamilyParams, run_experiment
from .hoa import parse_hoa, print_hoa
from .ltl import LassoWord, atoms, lasso_models_fixpoint, parse_ltl
from .markov import format_chain, parse_chain, product, sample_run, sat_probability
from .monitor import MonitorState
from .online import OnlineState
from .safra import DEFAULT_STATE_CAP, ltl_to_dra


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc


def _ap_tuple(text: str | None) -> tuple[str, ...] | None:
    if text is None:
        return None
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    return names or None


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _automaton(args, chain=None):
    """Automaton from --dra (HOA file) or --formula, sized to the chain's
    propositions when a chain provides the labeling."""
    if getattr(args, "dra", None):
        return parse_hoa(_read_text(args.dra))
    formula = parse_ltl(args.formula)
    ap = _ap_tuple(getattr(args, "ap", None))
    if ap is None and chain is not None:
        ap = tuple(sorted(set(chain.ap_names()) | atoms(formula)))
    cap = getattr(args, "max_states", DEFAULT_STATE_CAP)
    return ltl_to_dra(formula, ap=ap, max_states=cap)


def _cmd_translate(args) -> int:
    formula = parse_ltl(args.formula)
    dra = ltl_to_dra(formula, ap=_ap_tuple(args.ap), max_states=args.max_states)
    sys.stdout.write(print_hoa(dra))
    return 0


def _cmd_classify(args) -> int:
    dra = parse_hoa(_read_text(args.automaton))
    for state, cls in enumerate(classify_states(dra)):
        sys.stdout.write(f"{state}\t{cls.value}\n")
    return 0


def _cmd_product(args) -> int:
    chain = parse_chain(_read_text(args.chain))
    dra = _automaton(args, chain)
    sys.stdout.write(format_chain(product(dra, chain).to_markov()))
    return 0


def _cmd_simulate(args) -> int:
    chain = parse_chain(_read_text(args.chain))
    for state in sample_run(chain, args.seed, args.steps):
        sys.stdout.write(chain.names[state] + "\n")
    return 0


def _cmd_solve(args) -> int:
    chain = parse_chain(_read_text(args.chain))
    dra = _automaton(args, chain)
    value = sat_probability(product(dra, chain))
    if isinstance(value, Fraction):
        sys.stdout.write(f"{value} {float(value)!r}\n")
    else:
        sys.stdout.write(f"{value!r}\n")
    return 0


def _cmd_monitor(args, online: bool) -> int:
    chain = parse_chain(_read_text(args.chain))
    dra = _automaton(args, chain)
    p_min = Fraction(args.pmin)
    labels = {name: chain.labels[i] for i, name in enumerate(chain.names)}
    if online:
        state = OnlineState(dra, p_min, labels=labels)
    else:
        state = MonitorState(dra, p_min, labels=labels)
    step = 0
    for line in sys.stdin:
        name = line.strip()
        if not name:
            continue
        if name not in chain.index:
            raise ValueError(f"state {name!r} is not in the chain")
        state.observe(name)
        step += 1
        conf = state.confidence()
        gamma = "inf" if math.isinf(conf.log_gamma) else repr(conf.log_gamma)
        row = f"{step}\t{state.verdict().value}\t{conf.m}\t{gamma}"
        if online:
            row += f"\t{state.scc_size}"
        sys.stdout.write(row + "\n")
    return 0


def _cmd_experiment(args) -> int:
    ns = _int_list(args.n)
    params = FamilyParams(
        left_len=args.l, right_len=args.r_len, escape_len=args.m,
        ladder_len=ns[0] if ns else 1,
        p=Fraction(args.p), q=Fraction(args.q), s=Fraction(args.s),
    )
    csv = run_experiment(params, ns=ns, quotas=_int_list(args.quotas),
                         seeds=_int_list(args.seeds), runs=args.runs,
                         threshold=args.threshold)
    if args.out == "-":
        sys.stdout.write(csv)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(csv)
        sys.stderr.write(f"wrote {args.out}\n")
    return 0


def _cmd_oracle_check(args) -> int:
    formula = parse_ltl(args.formula)
    ap = tuple(sorted(atoms(formula)))
    dra = ltl_to_dra(formula, ap=ap, max_states=args.max_states)
    rng = random.Random(args.seed)

    def letters(count):
        return tuple(frozenset(n for n in ap if rng.random() < 0.5)
                     for _ in range(count))

    disagreements = []
    for _ in range(args.samples):
        word = LassoWord(letters(rng.randint(0, args.max_prefix)),
                         letters(rng.randint(1, args.max_cycle)))
        expected = lasso_models_fixpoint(word, formula)
        got = accepts_lasso(dra,
                            [letter_index(dra.ap, s) for s in word.prefix],
                            [letter_index(dra.ap, s) for s in word.cycle])
        if got != expected:
            disagreements.append(word)
    sys.stdout.write(
        f"checked {args.samples} lassos: {len(disagreements)} disagreements\n")
    for word in disagreements:
        sys.stdout.write(f"disagree\t{word.prefix!r}\t{word.cycle!r}\n")
    return 0


def _add_automaton_source(sub, with_ap: bool = False):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", help="LTL property")
    group.add_argument("--dra", metavar="FILE",
                       help="HOA automaton file ('-' for stdin)")
    if with_ap:
        sub.add_argument("--ap", help="comma-separated proposition names")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stochmon", description=__doc__.split("\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("translate", help="formula to HOA automaton")
    sub.add_argument("formula")
    sub.add_argument("--ap", help="comma-separated proposition names")
    sub.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP)
    sub.set_defaults(func=_cmd_translate)

    sub = commands.add_parser("classify", help="per-state class table")
    sub.add_argument("automaton", help="HOA file ('-' for stdin)")
    sub.set_defaults(func=_cmd_classify)

    sub = commands.add_parser("product", help="automaton times chain")
    sub.add_argument("chain", help="chain file ('-' for stdin)")
    _add_automaton_source(sub)
    sub.set_defaults(func=_cmd_product)

    sub = commands.add_parser("simulate", help="sample a seeded run")
    sub.add_argument("chain", help="chain file ('-' for stdin)")
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.set_defaults(func=_cmd_simulate)

    for name, online in (("monitor", False), ("online-monitor", True)):
        sub = commands.add_parser(
            name, help="verdict/confidence TSV from a state stream")
        sub.add_argument("chain", help="chain file giving the labeling")
        _add_automaton_source(sub)
        sub.add_argument("--pmin", required=True,
                         help="transition probability lower bound")
        sub.set_defaults(func=lambda a, online=online: _cmd_monitor(a, online))

    sub = commands.add_parser("solve", help="exact satisfaction probability")
    sub.add_argument("chain", help="chain file ('-' for stdin)")
    _add_automaton_source(sub)
    sub.set_defaults(func=_cmd_solve)

    sub = commands.add_parser("experiment", help="estimator sweep to CSV")
    sub.add_argument("--l", type=int, default=4)
    sub.add_argument("--r-len", type=int, default=6)
    sub.add_argument("--m", type=int, default=4)
    sub.add_argument("--n", default="10,20,30", help="comma-separated sizes")
    sub.add_argument("--p", default="0.5")
    sub.add_argument("--q", default="0.45")
    sub.add_argument("--s", default="0.08")
    sub.add_argument("--runs", type=int, default=100)
    sub.add_argument("--quotas", required=True, help="comma-separated budgets")
    sub.add_argument("--threshold", type=float, default=100.0)
    sub.add_argument("--seeds", required=True, help="comma-separated seeds")
    sub.add_argument("--out", default="-", metavar="FILE")
    sub.set_defaults(func=_cmd_experiment)

    sub = commands.add_parser("oracle-check",
                              help="pipeline vs lasso semantics report")
    sub.add_argument("formula")
    sub.add_argument("--samples", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-prefix", type=int, default=8)
    sub.add_argument("--max-cycle", type=int, default=8)
    sub.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP)
    sub.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except StateCapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

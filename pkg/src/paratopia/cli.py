"""Command-line interface.

Exit status: 0 for a positive answer, 1 for a negative one, 2 for usage or
parse errors, 3 when the search budget ran out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalogue as cat
from .filters import StandardCase12, StandardCase123, filters_12, filters_123
from .latin import LatinSquare, PartialLatinSquare
from .orbits import cell_orbits_12, orbit_census_123, predicted_census_12
from .paratopism import (
    Paratopism,
    conjugacy_invariant,
    find_conjugator,
    is_autoparatopism,
)
from .perms import CycleStructure, canonical_permutation
from .search import BACKENDS, BudgetExhausted, complete_backtrack, decide_membership, default_budget

YES, NO, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _paratopism(text: str, n: int | None = None) -> Paratopism:
    try:
        return Paratopism.parse(text, n)
    except ValueError as exc:
        raise UsageError(f"bad paratopism {text!r}: {exc}") from None


def _cycle_structure(text: str, n: int | None = None) -> CycleStructure:
    try:
        cs = CycleStructure.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if n is not None and cs.degree != n:
        raise UsageError(f"{text} has degree {cs.degree}, not {n}")
    return cs


def _load_square(path: str) -> LatinSquare:
    try:
        return LatinSquare.load(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read square {path}: {exc}") from None


def _load_partial(path: str) -> PartialLatinSquare:
    """Square text format where 0 or '.' marks an empty cell."""
    try:
        lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
        n = int(lines[0][0])
        part = PartialLatinSquare(n)
        for i, row in enumerate(lines[1:n + 1], 1):
            for j, x in enumerate(row, 1):
                if x not in ("0", "."):
                    part.place(i, j, int(x))
        return part
    except (OSError, ValueError, IndexError) as exc:
        raise UsageError(f"cannot read partial square {path}: {exc}") from None


def _budget(args):
    if args.budget is not None:
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
        return args.budget
    return "default"


# --- subcommands ----------------------------------------------------------------------


def cmd_verify(args) -> int:
    sq = _load_square(args.square)
    sigma = _paratopism(args.paratopism, sq.order)
    if sigma.n != sq.order:
        raise UsageError(f"paratopism has degree {sigma.n}, square has order {sq.order}")
    ok = is_autoparatopism(sigma, sq)
    _out(args, {"autoparatopism": ok}, "autoparatopism" if ok else "not an autoparatopism")
    return YES if ok else NO


def cmd_orbits(args) -> int:
    text = args.beta or args.gamma
    if text is None:
        raise UsageError("give --beta (or --gamma) as a cycle structure")
    cs = _cycle_structure(text, args.n)
    perm = canonical_permutation(cs)
    if args.delta == "12":
        dec = cell_orbits_12(perm)
        census = dec.block_census()
        predicted = predicted_census_12(perm)
        agree = all(sorted(census[k]) == sorted(v) for k, v in predicted.items())
        lines = [f"beta = {cs}: {len(dec.orbits)} cell orbits"]
        lengths = [len(c) for c in perm.cycles()]
        for (s, t), orbs in sorted(census.items()):
            desc = ", ".join(f"{ln}{'*' if short else ''}" for ln, short in sorted(orbs))
            lines.append(f"  block ({lengths[s]},{lengths[t]}) cycles {s + 1},{t + 1}: {desc}")
        lines.append("  (* marks short orbits)")
        payload = {
            "beta": str(cs),
            "orbits": len(dec.orbits),
            "blocks": {f"{s + 1},{t + 1}": sorted(v) for (s, t), v in census.items()},
            "matches_formula": agree,
        }
        _out(args, payload, "\n".join(lines))
        return YES if agree else NO
    census = orbit_census_123(perm)
    lines = [f"gamma = {cs}"]
    for k, c in enumerate(census.cycles, 1):
        short = f"one short orbit of length {c.length}" if c.short_available else "no short orbit"
        lines.append(f"  cycle {k} (length {c.length}): generic length {c.generic_length}, {short}")
    lines.append(f"  orbits of sigma^3 on cells: {census.sigma_cubed_orbits}")
    lines.append(f"  short orbits needed mod 3: {census.forced_short_residue()}")
    payload = {
        "gamma": str(cs),
        "cycles": [[c.length, c.generic_length, c.short_available] for c in census.cycles],
        "sigma_cubed_orbits": census.sigma_cubed_orbits,
        "short_residue": census.forced_short_residue(),
    }
    _out(args, payload, "\n".join(lines))
    return YES


def cmd_classify(args) -> int:
    n = args.n
    if args.delta == "12":
        if args.beta is None:
            raise UsageError("--delta 12 needs --beta")
        beta = str(_cycle_structure(args.beta, n))
        case = cat.Case(n, "12", beta, str(_cycle_structure(args.gamma, n)))
    else:
        case = cat.Case(n, "123", None, str(_cycle_structure(args.gamma, n)))
    out = Path(args.out) if args.out else None
    entry = cat.classify_case(case, budget=_budget(args), witness_dir=out, backend=args.backend)
    if args.delta == "12":
        report = filters_12(StandardCase12.parse(case.beta, case.gamma))
    else:
        report = filters_123(StandardCase123.parse(case.gamma))
    payload = json.loads(entry.to_json())
    payload["filter"] = json.loads(report.to_json())
    label = f"{case.beta} | {case.gamma}" if case.beta else case.gamma
    if entry.member is None:
        text = f"n={n} delta={args.delta} {label}: undecided (budget exhausted after {entry.nodes} nodes)"
    else:
        verdict = "member" if entry.member else "not a member"
        text = f"n={n} delta={args.delta} {label}: {verdict} by {entry.method}"
        if entry.rule:
            text += f" (rule {entry.rule})"
        if not entry.member and report.excluded:
            text += f"\n  {report.verdict.certificate}"
        if entry.witness:
            text += f"\n  witness: {entry.witness}"
    _out(args, payload, text)
    return BUDGET if entry.member is None else (YES if entry.member else NO)


def cmd_search(args) -> int:
    sigma = _paratopism(args.paratopism, args.n)
    seed = _load_partial(args.seed) if args.seed else None
    if seed is not None and seed.n != sigma.n:
        raise UsageError("seed order differs from the paratopism degree")
    budget = args.budget if args.budget is not None else default_budget(sigma.n)
    try:
        if seed is None:
            v = decide_membership(sigma, budget, use_filters=not args.no_filters, backend=args.backend)
        else:
            v = complete_backtrack(sigma, seed, budget)
    except BudgetExhausted as exc:
        _out(args, {"member": None, "nodes": exc.nodes}, f"budget exhausted after {exc.nodes} nodes")
        return BUDGET
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if v.member is None:
        _out(args, v.to_dict(), f"budget exhausted after {v.nodes_explored} nodes")
        return BUDGET
    if v.member:
        text = v.witness.to_text().rstrip()
    else:
        text = "no square is fixed by this paratopism" + (" extending the seed" if seed else "")
        if v.rule:
            text += f" (rule {v.rule})"
    _out(args, v.to_dict(), text)
    return YES if v.member else NO


def cmd_catalogue(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    if args.resume and not args.out:
        raise UsageError("--resume needs --out")
    entries = cat.classify(args.n, args.delta, out_dir=args.out, jobs=args.jobs, resume=args.resume,
                           budget=_budget(args), backend=args.backend)
    undecided = [e for e in entries if e.undecided]
    if args.json:
        sys.stdout.write(cat.emit(entries, "json"))
    else:
        sys.stdout.write(cat.emit(entries, "text", n=args.n, delta=args.delta))
    return BUDGET if undecided else YES


def cmd_diff(args) -> int:
    try:
        entries = cat.entries_from_text(Path(args.computed).read_text())
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read {args.computed}: {exc}") from None
    tables = cat.PaperTables.load()
    shape = "123" if args.table == 3 else "12"
    orders = set(tables.orders(args.table))
    entries = [e for e in entries if e.delta == shape and e.n in orders]
    if not entries:
        raise UsageError(f"{args.computed} holds no entries for table {args.table}")
    report = cat.diff_against_paper(entries, tables, shape)
    _out(args, report.to_dict(), report.render())
    return YES if report.empty else NO


def cmd_conjugacy(args) -> int:
    p1, p2 = _paratopism(args.p1, args.n), _paratopism(args.p2, args.n)
    if p1.n != p2.n:
        raise UsageError("paratopisms have different degrees")
    i1, i2 = conjugacy_invariant(p1), conjugacy_invariant(p2)
    same = i1 == i2
    payload = {"conjugate": same, "invariant1": str(i1), "invariant2": str(i2)}
    text = f"{i1}\n{i2}\n" + ("conjugate" if same else "not conjugate")
    if same:
        tau = find_conjugator(p1, p2)
        if tau is not None:
            payload["conjugator"] = str(tau)
            text += f"\nconjugator: {tau}"
    _out(args, payload, text)
    return YES if same else NO


# --- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paratopia", description="Autoparatopisms of Latin squares.")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check that a paratopism fixes a square")
    p.add_argument("--square", required=True)
    p.add_argument("--paratopism", required=True, help='e.g. "a=(1 2); b=(1 2); c=(1 2); d=12"')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbits", help="orbit census for a canonical permutation")
    p.add_argument("--beta")
    p.add_argument("--gamma")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", choices=("12", "123"), required=True)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("classify", help="decide one standard-form case")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", choices=("12", "123"), required=True)
    p.add_argument("--beta")
    p.add_argument("--gamma", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--out", default="witnesses", help="directory for the witness file")
    p.add_argument("--backend", choices=BACKENDS, default="backtrack",
                   help="exhaustive stage: backtracking, or a SAT solver (needs python-sat)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("search", help="search for a square fixed by a paratopism")
    p.add_argument("--paratopism", required=True)
    p.add_argument("--seed", help="partial square to extend (0 marks an empty cell)")
    p.add_argument("--budget", type=int)
    p.add_argument("--no-filters", action="store_true", help="skip the necessary conditions")
    p.add_argument("--n", type=int, help="degree, when cycle notation leaves it open")
    p.add_argument("--backend", choices=BACKENDS, default="backtrack",
                   help="exhaustive stage: backtracking, or a SAT solver (needs python-sat)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("catalogue", help="decide every case of one order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", choices=("12", "123"), required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--budget", type=int)
    p.add_argument("--backend", choices=BACKENDS, default="backtrack",
                   help="exhaustive stage: backtracking, or a SAT solver (needs python-sat)")
    p.set_defaults(func=cmd_catalogue)

    p = sub.add_parser("diff", help="compare a catalogue with a published table")
    p.add_argument("--computed", required=True, help="JSON-lines catalogue file")
    p.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("conjugacy", help="compare conjugacy invariants")
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--n", type=int, help="degree, when cycle notation leaves it open")
    p.set_defaults(func=cmd_conjugacy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else YES
    if getattr(args, "n", None) is not None and args.n < 1:
        print("error: --n must be positive", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except (UsageError, ImportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

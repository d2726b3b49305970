"""``smlab`` command line."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import experiments as ex
from .adding import build_zmachine
from .bcd import BCDError, WeightProfile, chord_dispersion, dispersion, parse_bcd, random_bcd
from .composition import compose, dump_presentation, emit_presentation, parse_presentation, pump_machine
from .machine import DEFAULT_BUDGET, SMachineError
from .machine_io import dump_machine, load_machine, parse_machine

EXIT_USAGE = 1
EXIT_INVARIANT = 3


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_adding_run(args) -> int:
    if not 1 <= args.n <= 20:
        raise ValueError("--n must lie in 1..20")
    alphabet = [x for x in args.alphabet.split(",") if x]
    run = ex.adding_run(args.n, alphabet, args.budget)
    print(f"n: {run.n}")
    print(f"length: {run.length}")
    print(f"formula: {run.formula}")
    print(f"width: {run.width}")
    print(f"area: {run.area}")
    print(f"bounds [2^n, 6*2^n]: {'ok' if run.within_bounds else 'VIOLATED'}")
    if args.csv:
        _write(args.csv, "n,length,formula,width,area\n" + f"{run.n},{run.length},{run.formula},{run.width},{run.area}\n")
    if run.length != run.formula or not run.within_bounds:
        raise ex.InvariantViolation("full-count length disagrees with the closed formula")
    return 0


def cmd_compose_run(args) -> int:
    if not 0 <= args.n_max <= 16:
        raise ValueError("--n-max must lie in 0..16")
    records = ex.compose_records(args.n_max, args.budget)
    _write(args.csv, ex.records_to_csv(records))
    return 0


def cmd_bcd(args) -> int:
    if args.random:
        d = random_bcd(args.seed, args.random[0], args.random[1])
        K = args.k or 1
    else:
        if not args.file:
            raise ValueError("give --file or --random")
        with open(args.file, encoding="utf-8") as fh:
            d, file_k = parse_bcd(fh.read())
        K = args.k or file_k or 1
    p = WeightProfile.linear(K)
    r = len(d.chords("T"))
    d_alpha = dispersion(d, p)
    d_one = dispersion(d)
    print(f"boundary: {' '.join(d.boundary)}")
    print(f"T-chords: {r}")
    print(f"Q-chords: {len(d.chords('Q'))}")
    print(f"K: {K}")
    print(f"D_alpha: {ex.fmt(d_alpha)}")
    print(f"D_1: {ex.fmt(d_one)}")
    for c, v in sorted(chord_dispersion(d, p).items(), key=lambda kv: int(kv[0][1:])):
        print(f"  {c}: {ex.fmt(v)}")
    ok = d_one <= r * r - r and d_alpha <= d_one
    print(f"entropy bound D_1 <= r^2-r = {r * r - r}: {'ok' if ok else 'VIOLATED'}")
    if not ok:
        raise ex.InvariantViolation("dispersion bound violated")
    return 0


def cmd_dehn_lower(args) -> int:
    if not 1 <= args.n <= 14:
        raise ValueError("--n must lie in 1..14")
    print("n,l_n,copies,perimeter,area,ratio")
    previous = None
    for n in range(1, args.n + 1):
        row = ex.glued_row(n, args.budget)
        if previous is not None and row.area <= previous:
            raise ex.InvariantViolation(f"glued area does not grow at n={n}")
        previous = row.area
        print(f"{n},{row.l_n},{row.glued.copies},{row.perimeter},{row.area},{ex.fmt(row.ratio)}")
    return 0


def cmd_presentation(args) -> int:
    machines = {
        "z": lambda: build_zmachine(["a"]),
        "pump": pump_machine,
        "pump-compose": lambda: compose(pump_machine()),
    }
    p = emit_presentation(machines[args.machine]())
    text = dump_presentation(p)
    if parse_presentation(text) != p:
        raise ex.InvariantViolation("presentation does not parse back")
    _write(args.out, text)
    return 0


def cmd_machine_check(args) -> int:
    m = load_machine(args.file)
    canonical = dump_machine(m)
    if parse_machine(canonical) != m:
        raise ex.InvariantViolation("canonical form does not parse back")
    with open(args.file, encoding="utf-8") as fh:
        original = fh.read()
    print(f"name: {m.name}")
    print(f"parts: {m.N}")
    print(f"positive rules: {len(m.rules)}")
    print(f"max relation length: {m.relation_length()}")
    print(f"canonical: {'yes' if original == canonical else 'no'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smlab", description="S-machine laboratory")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximal number of rule applications")
    sub = parser.add_subparsers(dest="command", required=True)

    adding = sub.add_parser("adding", help="adding machine runs").add_subparsers(dest="action", required=True)
    run = adding.add_parser("run")
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--alphabet", default="a", help="comma-separated base letters")
    run.add_argument("--csv")
    run.set_defaults(func=cmd_adding_run)

    comp = sub.add_parser("compose", help="composed pump family").add_subparsers(dest="action", required=True)
    crun = comp.add_parser("run")
    crun.add_argument("--n-max", type=int, required=True)
    crun.add_argument("--csv")
    crun.set_defaults(func=cmd_compose_run)

    b = sub.add_parser("bcd", help="dispersion of a chord diagram")
    b.add_argument("--file")
    b.add_argument("--k", type=int)
    b.add_argument("--random", type=int, nargs=2, metavar=("T", "Q"))
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bcd)

    dl = sub.add_parser("dehn-lower", help="glued lower-bound family")
    dl.add_argument("--n", type=int, required=True)
    dl.set_defaults(func=cmd_dehn_lower)

    pr = sub.add_parser("presentation", help="emit a group presentation")
    pr.add_argument("--machine", choices=["z", "pump", "pump-compose"], required=True)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_presentation)

    mc = sub.add_parser("machine", help="machine files").add_subparsers(dest="action", required=True)
    chk = mc.add_parser("check")
    chk.add_argument("--file", required=True)
    chk.set_defaults(func=cmd_machine_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ex.InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SMachineError, BCDError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

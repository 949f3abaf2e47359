"""Command-line entry point: `anyonkit <subcommand> [flags]`.

Exit status is 0 when everything passes, 1 when a verification fails and 2 for
usage or input errors. Any flag can also come from a `--config` file of
`name=value` lines; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from collections import Counter
from pathlib import Path

import numpy as np

RANDOMIZED = ("threshold", "vm-run")


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _p_values(text: str) -> list[float]:
    """`0.05`, `0.01,0.05` or an inclusive range `start:stop:step`."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}") from None


def _seed(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer or 'auto'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="anyonkit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of name=value lines supplying default flags")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    subs = {}

    p = sub.add_parser("code-params", parents=[common], help="parameters of the k x k torus code")
    p.add_argument("--k", type=_int_list, required=True, help="lattice size, or a comma list")
    p.add_argument("--distance", action="store_true",
                   help="exhaustive minimum-weight search (k <= 4)")
    p.add_argument("--logicals", action="store_true", help="print logical operators")
    subs["code-params"] = p

    p = sub.add_parser("threshold", parents=[common], help="Monte Carlo failure rates of the matching decoder")
    p.add_argument("--k", type=_int_list, required=True)
    p.add_argument("--p", type=_p_values, required=True, help="0.05, 0.01,0.05 or start:stop:step")
    p.add_argument("--trials", type=_positive, default=10000)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--model", choices=("xz", "depolarizing"), default="xz")
    p.add_argument("--method", choices=("mwpm", "networkx", "greedy"), default="mwpm")
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--threads", type=_positive, default=1)
    subs["threshold"] = p

    p = sub.add_parser("verify-hopf", parents=[common], help="check the quantum double axioms")
    p.add_argument("--group", required=True, help="built-in name or group file")
    p.add_argument("--seed", type=_seed, help="needed when the check is sampled (|G| > 8)")
    p.add_argument("--exhaustive", action="store_true", help="never sample, whatever |G|")
    p.add_argument("--threads", type=_positive, default=1)
    subs["verify-hopf"] = p

    p = sub.add_parser("double-irreps", parents=[common], help="irrep labels (class, centralizer irrep) of D(G)")
    p.add_argument("--group", required=True)
    subs["double-irreps"] = p

    p = sub.add_parser("statevector-check", parents=[common], help="exact lattice checks of ribbon operators")
    p.add_argument("--group", required=True)
    p.add_argument("--lattice", default="tetrahedron", help="tetrahedron or torus:MxN")
    p.add_argument("--suite", choices=("all", "ground", "ribbon", "identities"), default="all")
    p.add_argument("--seed", type=_seed, default=0, help="probe vectors for large spaces")
    subs["statevector-check"] = p

    p = sub.add_parser("vm-run", parents=[common], help="run a braid program on vortex pairs")
    p.add_argument("--group", default="S5")
    p.add_argument("--program", required=True)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--shots", type=_positive, default=1)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--exact", action="store_true", help="also print the exact outcome distribution")
    subs["vm-run"] = p
    return parser, subs


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected name=value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]):
    actions = {a.dest: a for a in sub._actions if a.dest != "help"}
    defaults = {}
    for key, value in config.items():
        if key not in actions:
            raise UsageError(f"config key {key!r} is not a flag of {sub.prog}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects true or false")
            defaults[key] = value.lower() in ("true", "1", "yes")
        else:
            defaults[key] = value
            action.required = False
    sub.set_defaults(**defaults)


def _locate(argv: list[str], names) -> tuple[str | None, str | None]:
    """The subcommand and the --config value, found without validating flags."""
    command = config = None
    for n, tok in enumerate(argv):
        if tok.startswith("--config="):
            config = tok.split("=", 1)[1]
        elif tok == "--config" and n + 1 < len(argv):
            config = argv[n + 1]
        elif command is None and tok in names:
            command = tok
    return command, config


def parse(argv: list[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    command, config = _locate(argv, subs)
    if command is None:
        if argv:
            parser.parse_args(argv)  # reports unknown subcommands and flags
        parser.print_usage(sys.stderr)
        parser.exit(2, "anyonkit: error: a subcommand is required\n")
    if config:
        try:
            _apply_config(subs[command], read_config(config))
        except UsageError as exc:
            subs[command].error(str(exc))
    args = parser.parse_args(argv)
    if args.command in RANDOMIZED and args.seed is None:
        subs[args.command].error("--seed is required (an integer, or 'auto')")
    if getattr(args, "seed", None) == "auto":
        args.seed = secrets.randbits(32)
        print(f"seed={args.seed}", file=sys.stderr)
    return args


# --- subcommands -----------------------------------------------------------------

def cmd_code_params(args) -> int:
    from .toric import TorusCode, code_parameters, minimum_distance

    for k in args.k:
        code = TorusCode(k)
        n, m, dim = code_parameters(code)
        line = f"k={k} n={n} m={m} logical_dim={dim}"
        if args.distance:
            if k > 4:
                raise UsageError("exhaustive distance search is limited to k <= 4")
            res = minimum_distance(code, mode="full" if k <= 3 else "split")
            line += f" distance={res.distance}"
        print(line)
        if args.logicals:
            for name, op in code.logicals().items():
                print(f"  {name} {op.to_string()}")
    return 0


def cmd_threshold(args) -> int:
    from .decoder import fit_log_slope, run_monte_carlo, write_csv

    records = run_monte_carlo(args.k, args.p, args.trials, args.seed, model=args.model,
                              method=args.method, workers=args.threads)
    write_csv(records, args.out or sys.stdout)
    for p in args.p:
        rows = [r for r in records if r.p == p]
        rates = " ".join(f"k={r.k}:{r.sector_rate():.5f}" for r in rows)
        print(f"p={p} per-sector {rates}", file=sys.stderr)
        if len(rows) > 1 and all(r.sector_rate() > 0 for r in rows):
            print(f"p={p} log-failure slope {fit_log_slope(rows):.4f}", file=sys.stderr)
    return 0


def cmd_verify_hopf(args) -> int:
    from .double import EXHAUSTIVE_ORDER_LIMIT, build_tensors, special_elements, verify_axioms
    from .groups import resolve_group

    G = resolve_group(args.group)
    exhaustive = args.exhaustive or G.order <= EXHAUSTIVE_ORDER_LIMIT
    if not exhaustive and args.seed is None:
        raise UsageError(f"|G| = {G.order} is checked by sampling; pass --seed")
    T = build_tensors(G)
    reports = verify_axioms(T, seed=args.seed, exhaustive=exhaustive, workers=args.threads)
    mode = "exhaustive" if exhaustive else f"sampled seed={args.seed}"
    print(f"# {G.name} |G|={G.order} dim D(G)={T.size} {mode}")
    print(f"{'axiom':<22} {'status':<6} {'residual':>10}  counterexample")
    ok = True
    for r in reports:
        ok &= r.passed
        where = "-" if r.counterexample is None else " ".join(f"({h},{g})" for h, g in r.counterexample)
        print(f"{r.axiom:<22} {'pass' if r.passed else 'FAIL':<6} {r.residual:>10.3g}  {where}")
    _, _, special = special_elements(T)
    for name, residual in special.checks.items():
        passed = residual < 1e-12
        ok &= passed
        print(f"{name:<22} {'pass' if passed else 'FAIL':<6} {residual:>10.3g}  -")
    return 0 if ok else 1


def cmd_double_irreps(args) -> int:
    from .double import double_irreps
    from .groups import resolve_group

    G = resolve_group(args.group)
    labels = double_irreps(G)
    print(f"{'class':<16} {'|E|':>4} {'chi':>4} {'dim':>4}")
    for lab in labels:
        rep = G.format(lab.magnetic_class.representative) or "()"
        print(f"{rep:<16} {lab.centralizer_order:>4} {lab.electric_row:>4} {lab.dim:>4}")
    total = sum(lab.dim ** 2 for lab in labels)
    print(f"# {len(labels)} irreps, sum of dim^2 = {total} (|G|^2 = {G.order ** 2})")
    return 0 if total == G.order ** 2 else 1


def cmd_statevector_check(args) -> int:
    from .groups import resolve_group
    from .lattice import parse_lattice
    from .lattice.checks import run_suite

    G = resolve_group(args.group)
    lattice = parse_lattice(args.lattice)
    results = run_suite(G, lattice, args.suite, seed=args.seed)
    print(f"# {G.name} on {lattice.name}, suite {args.suite}")
    print(f"{'check':<30} {'status':<6} {'residual':>10}  detail")
    for r in results:
        print(f"{r.name:<30} {r.status:<6} {r.residual:>10.3g}  {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def cmd_vm_run(args) -> int:
    from .groups import resolve_group
    from .vm import branch_distribution, outcome_key, parse_program, sample_shots

    G = resolve_group(args.group)
    try:
        text = Path(args.program).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read program {args.program}: {exc.strerror}") from None
    program = parse_program(text, G)
    logs = sample_shots(program, G, args.seed, args.shots, workers=args.threads)
    print(f"# group {G.name} seed {args.seed} shots {args.shots}")
    print("# log of shot 0")
    for entry in logs[0]:
        print(entry)
    counts = Counter(outcome_key(log) for log in logs)
    print("# histogram")
    for key, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        print(f"{c:>8} {c / args.shots:.4f}  {'; '.join(key) or '(no measurements)'}")
    if args.exact:
        print("# exact distribution")
        for key, p in sorted(branch_distribution(program, G).items(), key=lambda kv: (-kv[1], kv[0])):
            print(f"{p:.6f}  {'; '.join(key) or '(no measurements)'}")
    return 0


COMMANDS = {
    "code-params": cmd_code_params,
    "threshold": cmd_threshold,
    "verify-hopf": cmd_verify_hopf,
    "double-irreps": cmd_double_irreps,
    "statevector-check": cmd_statevector_check,
    "vm-run": cmd_vm_run,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parse(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"anyonkit {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

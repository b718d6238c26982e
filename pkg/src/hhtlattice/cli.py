"""Command line front end.

    hhtlattice verify    --n 3 --g 2 [--mu 1,1,1,1,1,1] [--limit N]
    hhtlattice enumerate --n 3 --g 2 [--mode ordered|multiset]
    hhtlattice genus     --n 3 --g 2 --mu 3,3,1,1,1,1
    hhtlattice dim       --n 3 --g 2
    hhtlattice lattice   --g 2
    hhtlattice cocycle   --charts 4 --kind affine --g 3

Every command takes ``--format json|csv|text`` and ``--output PATH``.
Exit status: 0 when every check matched, 1 on a verification mismatch,
2 on bad arguments.  Worker processes default to the CPU count and can be
set with the ``HHTLATTICE_WORKERS`` environment variable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from ._numbers import fmt
from .cocycle import verify_cocycle
from .cover import build_quotient_model, verify_canonical_pullback
from .theorems import (
    default_workers,
    enumerate_cover_types,
    genus_closed_form,
    genus_lambda,
    is_admissible,
    moduli_dimension,
    verify_sweep,
    verify_type,
)

DEFAULT_LIMIT = 100_000


def _mu_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--mu expects comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="hhtlattice",
        description="Exact Picard-lattice checks for hyperelliptic tangential covers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the lambda checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mu", type=_mu_list, help="single type; omit to sweep all admissible types")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT,
                   help="sweep at most this many types, in lexicographic order (default %(default)s)")

    p = sub.add_parser("enumerate", parents=[common], help="list admissible cover types")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mode", choices=("ordered", "multiset"), default="ordered")
    p.add_argument("--limit", type=int, help="emit at most this many types (count stays exact)")

    p = sub.add_parser("genus", parents=[common], help="arithmetic genus of lambda(n, mu)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mu", type=_mu_list, required=True)

    p = sub.add_parser("dim", parents=[common], help="dimension of the tangential cover space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)

    p = sub.add_parser("lattice", parents=[common], help="dump the lattice tower and quotient model")
    p.add_argument("--g", type=int, required=True)

    p = sub.add_parser("cocycle", parents=[common], help="check the transition-matrix cocycle")
    p.add_argument("--charts", type=int, default=3)
    p.add_argument("--kind", choices=("rank2", "affine"), default="rank2")
    p.add_argument("--g", type=int, help="fiber dimension for --kind affine")
    return parser


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _enumeration_json(payload: dict) -> str:
    # one type per line; the rest of the document as usual
    head = {k: v for k, v in payload.items() if k != "types"}
    body = ",\n".join("    " + json.dumps(t, separators=(",", ":")) for t in payload["types"])
    text = json.dumps(head, indent=2)[:-2]
    types = f'"types": [\n{body}\n  ]' if body else '"types": []'
    return f"{text},\n  {types}\n}}\n"


def cmd_verify(args) -> tuple[str, int]:
    g, n = args.g, args.n
    model = build_quotient_model(g)
    canonical = verify_canonical_pullback(model)
    if args.mu is not None:
        if len(args.mu) != 2 * g + 2:
            raise ValueError(f"--mu must have {2 * g + 2} entries for g={g}")
        r = verify_type(model, n, args.mu)
        ok = r.match and canonical.match
        payload = {
            "command": "verify",
            "n": n,
            "g": g,
            "swept": False,
            "checked": 1,
            "canonical": canonical.to_json(),
            "results": [r.to_json()],
            "failures": [] if r.match else [r.to_json()],
            "all_match": ok,
        }
    else:
        types = enumerate_cover_types(n, g, workers=default_workers()).types
        total = len(types)
        types = types[: max(args.limit, 0)]
        checked, failures = verify_sweep(n, g, types, workers=default_workers())
        ok = not failures and canonical.match
        payload = {
            "command": "verify",
            "n": n,
            "g": g,
            "swept": True,
            "admissible": total,
            "checked": checked,
            "truncated": checked < total,
            "canonical": canonical.to_json(),
            "failures": failures,
            "all_match": ok,
        }

    if args.format == "json":
        out = _json(payload)
    elif args.format == "csv":
        rows = [["n", "g", "checked", "failures", "all_match"],
                [n, g, payload["checked"], len(payload["failures"]), str(ok).lower()]]
        out = _csv(rows)
    else:
        lines = [f"verify n={n} g={g}: {payload['checked']} type(s) checked"]
        for r in payload.get("results", []):
            lines.append(f"  mu = {tuple(r['mu'])}")
            lines.append(f"  lambda.K  = {r['lambda_dot_K']['computed']}  chain {r['lambda_dot_K']['chain']}")
            lines.append(f"  lambda^2  = {r['lambda_self']['computed']}  closed form {r['lambda_self']['closed_form']}")
            lines.append(f"  pullback  match = {r['pullback']['match']}")
            lines.append(f"  genus     = {r['genus']}")
        lines.append(f"  canonical identity match = {canonical.match}")
        lines.append(f"  failures = {len(payload['failures'])}")
        lines.append("OK" if ok else "MISMATCH")
        out = "\n".join(lines) + "\n"
    return out, 0 if ok else 1


def cmd_enumerate(args) -> tuple[str, int]:
    result = enumerate_cover_types(args.n, args.g, args.mode, workers=default_workers())
    shown = result.types if args.limit is None else result.types[: max(args.limit, 0)]
    if args.format == "json":
        payload = result.to_json()
        if len(shown) < result.count:
            payload["types"] = [list(t) for t in shown]
            payload["truncated"] = True
        return _enumeration_json(payload), 0
    if args.format == "csv":
        rows = list(result.csv_rows())
        return _csv(rows[: len(shown) + 1]), 0
    lines = [f"n={result.n} g={result.g} bound={result.bound} mode={result.mode} count={result.count}"]
    if result.warning:
        lines.append(f"warning: {result.warning}")
    lines += [" ".join(str(m) for m in t) for t in shown]
    return "\n".join(lines) + "\n", 0


def cmd_genus(args) -> tuple[str, int]:
    n, g, mu = args.n, args.g, args.mu
    admissible = is_admissible(n, g, mu)
    genus = genus_lambda(build_quotient_model(g), n, mu)
    payload = {
        "n": n,
        "g": g,
        "mu": mu,
        "genus": genus,
        "closed_form": fmt(genus_closed_form(n, g, mu)),
        "admissible": admissible,
    }
    if args.format == "json":
        return _json(payload), 0
    if args.format == "csv":
        return _csv([["n", "g", "mu", "genus", "admissible"],
                     [n, g, " ".join(map(str, mu)), genus, str(admissible).lower()]]), 0
    return f"genus = {genus}{'' if admissible else ' (not admissible)'}\n", 0


def cmd_dim(args) -> tuple[str, int]:
    d = moduli_dimension(args.n, args.g)
    if args.format == "json":
        return _json({"n": args.n, "g": args.g, "moduli_dimension": d}), 0
    if args.format == "csv":
        return _csv([["n", "g", "moduli_dimension"], [args.n, args.g, d]]), 0
    return f"{d}\n", 0


def cmd_lattice(args) -> tuple[str, int]:
    model = build_quotient_model(args.g)
    if args.format == "json":
        return _json(model.to_json()), 0
    if args.format == "csv":
        rows = [["generator"] + list(model.top.basis)]
        rows += [[name] + [fmt(c) for c in d.coeffs] for name, d in model.generators]
        return _csv(rows), 0
    lines = [f"{model.top.name}: rank {model.top.dim}, basis {' '.join(model.top.basis)}",
             f"K = {model.top.canonical}"]
    lines += [f"phi^* {name} = {d}" for name, d in model.generators]
    return "\n".join(lines) + "\n", 0


def cmd_cocycle(args) -> tuple[str, int]:
    report = verify_cocycle(args.charts, args.kind, args.g if args.kind == "affine" else None)
    code = 0 if report.ok else 1
    if args.format == "json":
        return _json(report.to_json()), code
    if args.format == "csv":
        return _csv([["kind", "m", "identities_checked", "failures"],
                     [report.kind, report.m, report.identities_checked, len(report.failures)]]), code
    lines = [f"{report.kind} over {report.m} charts: {report.identities_checked} identities, "
             f"{len(report.failures)} failures"]
    lines += report.failures
    return "\n".join(lines) + "\n", code


COMMANDS = {
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
    "genus": cmd_genus,
    "dim": cmd_dim,
    "lattice": cmd_lattice,
    "cocycle": cmd_cocycle,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cocycle" and args.kind == "affine" and args.g is None:
        parser.error("--kind affine requires --g")
    try:
        out, code = COMMANDS[args.command](args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


def main() -> None:
    sys.exit(run())

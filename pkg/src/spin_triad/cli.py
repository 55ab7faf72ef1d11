"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 unknown name.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _parallel, catalog
from .errors import InvalidPovmError, InvalidStateError
from .estimation import FidelityReport, Povm, average_fidelity_mc, estimation_fidelity, optimal_estimators
from .suites import run_suite
from .tensor import check_state

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3

TABLE_ROWS = (
    ("Local", "local-xyz"),
    ("1+2 adaptive", "m-1to2"),
    ("2+1 adaptive (biseparable)", "m-2to1"),
    ("Genuine collective", "collective-octahedron"),
)

STATE_LABELS = {
    "0": catalog.KET0,
    "1": catalog.KET1,
    "+": catalog.PLUS,
    "-": catalog.MINUS,
    "+i": catalog.Y_PLUS,
    "-i": catalog.Y_MINUS,
}

PROTOCOLS = {"2to1": catalog.protocol_2to1, "1to2": catalog.protocol_1to2}


@dataclass(frozen=True)
class Config:
    tolerance_exact: float = 1e-9
    mc_samples: int = 10**6
    seed: int = 0
    output_format: str = "md"
    workers: int = 1

    def __post_init__(self):
        if not self.tolerance_exact > 0:
            raise ValueError("tolerance must be positive")
        if self.mc_samples < 100:
            raise ValueError("need at least 100 samples")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.output_format not in ("json", "csv", "md"):
            raise ValueError(f"unknown format {self.output_format!r}")


class UsageError(Exception):
    """Bad input; maps to exit code 2."""


def parse_state(text: str) -> np.ndarray:
    """A label (``0 1 + - +i -i``, optionally written as a ket ``|0>``), a
    comma-separated pair of complex amplitudes, or a JSON operator file."""
    t = text.strip()
    if t.startswith("|") and t[-1] in ">⟩":
        t = t[1:-1]
    if t in STATE_LABELS:
        return STATE_LABELS[t]
    path = Path(t)
    try:
        if path.is_file():
            from .tensor import from_dict

            return check_state(from_dict(json.loads(path.read_text())), 1)
        amps = np.array([complex(s.replace(" ", "")) for s in t.split(",")])
        return check_state(amps, 1)
    except (ValueError, InvalidStateError) as exc:
        raise UsageError(f"cannot read state {text!r}: {exc}") from exc


def load_povm(source: str) -> tuple[str, Povm, float | None, str | None]:
    """Catalog name or path to a POVM JSON file."""
    if source in catalog.CATALOG:
        return source, catalog.get_povm(source), catalog.ANALYTIC.get(source), catalog.ANALYTIC_EXPR.get(source)
    path = Path(source)
    if not path.is_file():
        raise KeyError(f"unknown POVM {source!r}; choose from {sorted(catalog.CATALOG)} or give a file")
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {source}: {exc}") from exc
    return path.name, Povm.from_dict(data), None, None


def fidelity_report(name: str, p: Povm, analytic: float | None, cfg: Config, mc: bool) -> FidelityReport:
    rep = FidelityReport(strategy=name, analytic=analytic, computed=estimation_fidelity(p))
    if mc:
        rep.mc_mean, rep.mc_stderr = average_fidelity_mc(p, optimal_estimators(p), cfg.mc_samples, cfg.seed, cfg.workers)
        rep.samples, rep.seed = cfg.mc_samples, cfg.seed
    return rep


# -- subcommands ------------------------------------------------------------------


def cmd_fidelity(args, cfg: Config, out) -> int:
    source = args.povm_file or args.name
    if source is None:
        raise UsageError("give a catalog name or --povm-file")
    name, p, analytic, expr = load_povm(source)
    rep = fidelity_report(name, p, analytic, cfg, args.mc)
    if cfg.output_format == "json":
        print(rep.to_json(), file=out)
        return EXIT_OK
    line = f"{name}: computed {rep.computed:.9f}"
    if analytic is not None:
        line += f" analytic {expr} = {analytic:.9f} (|diff| {rep.abs_error:.1e})"
    print(line, file=out)
    if args.mc:
        print(f"  monte carlo {rep.mc_mean:.6f} ± {rep.mc_stderr:.6f} ({rep.samples} samples, seed {rep.seed})", file=out)
    return EXIT_OK


def cmd_verify(args, cfg: Config, out) -> int:
    checks = run_suite(args.suite, tol=cfg.tolerance_exact, grid=args.grid, seed=cfg.seed, workers=cfg.workers)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}" + (f"  ({c.detail})" if c.detail else ""), file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_simulate(args, cfg: Config, out) -> int:
    try:
        proto = PROTOCOLS[args.protocol]()
    except KeyError:
        raise KeyError(f"unknown protocol {args.protocol!r}; choose from {sorted(PROTOCOLS)}") from None
    shots = args.shots if args.shots is not None else cfg.mc_samples
    if shots < 1:
        raise UsageError("shots must be at least 1")
    flat = proto.flat()
    labels = dict(zip(proto.outcomes(), flat.labels))
    result = {"protocol": args.protocol, "shots": shots, "seed": cfg.seed}
    if args.state is not None:
        psi = parse_state(args.state)
        hist = catalog.simulate_protocol(proto, psi, shots, cfg.seed, cfg.workers)
        born = catalog.born_distribution(proto, psi)
        result["state"] = [[z.real, z.imag] for z in psi]
    else:
        hist, mean, stderr = catalog.simulate_protocol_haar(proto, shots, cfg.seed, cfg.workers)
        born = None
        analytic = catalog.ANALYTIC[f"m-{args.protocol}"]
        result.update(mc_mean=mean, mc_stderr=stderr, analytic=analytic)
    result["histogram"] = {
        f"{j}.{k}": {"count": n, **({"born": float(born[(j, k)])} if born else {})} for (j, k), n in hist.items()
    }

    if cfg.output_format == "json":
        print(json.dumps(result), file=out)
        return EXIT_OK
    first_labels = proto.first.labels
    for (j, k), n in hist.items():
        branch = proto.branches[j].labels[k]
        extra = f"  born {born[(j, k)] * shots:.1f}" if born else ""
        print(f"{labels[(j, k)]:>6}  {first_labels[j]:>8} -> {branch:<6} {n:>9}{extra}", file=out)
    if born is None:
        z = (result["mc_mean"] - result["analytic"]) / result["mc_stderr"]
        print(
            f"fidelity {result['mc_mean']:.6f} ± {result['mc_stderr']:.6f}"
            f" (analytic {result['analytic']:.6f}, {z:+.2f} sigma)",
            file=out,
        )
    return EXIT_OK


def report_rows(cfg: Config, mc: bool = True) -> list[dict]:
    rows = []
    for label, name in TABLE_ROWS:
        rep = fidelity_report(name, catalog.get_povm(name), catalog.ANALYTIC[name], cfg, mc)
        d = rep.to_dict()
        d["strategy"] = label
        d["expression"] = catalog.ANALYTIC_EXPR[name]
        rows.append(d)
    return rows


def cmd_report(args, cfg: Config, out) -> int:
    rows = report_rows(cfg, mc=not args.no_mc)
    fmt = cfg.output_format
    if fmt == "json":
        keep = ("strategy", "analytic", "computed", "mc_mean", "mc_stderr", "samples", "seed", "abs_error")
        print(json.dumps([{k: r[k] for k in keep} for r in rows], indent=2), file=out)
    elif fmt == "csv":
        buf = io.StringIO()
        cols = ["strategy", "expression", "analytic", "computed", "abs_error", "mc_mean", "mc_stderr", "samples", "seed"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        print("| Strategy | Analytic | Value | Computed | Monte Carlo |", file=out)
        print("|---|---|---|---|---|", file=out)
        for r in rows:
            mc = f"{r['mc_mean']:.5f} ± {r['mc_stderr']:.1e}" if r["mc_mean"] is not None else "-"
            print(f"| {r['strategy']} | {r['expression']} | {r['analytic']:.5f} | {r['computed']:.6f} | {mc} |", file=out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples (default 10^6)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-9, help="tolerance for exact comparisons")
    common.add_argument("--format", choices=("md", "csv", "json"), default="md")
    common.add_argument("--workers", type=int, default=1, help=f"threads; {_parallel.WORKERS_ENV} overrides")

    parser = argparse.ArgumentParser(prog="spin-triad", description="Estimation fidelity of three parallel qubits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", parents=[common], help="estimation fidelity of a POVM")
    p.add_argument("name", nargs="?", help="catalog name or POVM JSON file")
    p.add_argument("--povm-file", help="POVM JSON file")
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo estimate")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help="table1, appendixA, appendixB, appendixC, designs, invariants or all")
    p.add_argument("--grid", type=int, default=1000, help="bound-scan resolution per axis")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="sample an adaptive protocol")
    p.add_argument("protocol", help="2to1 or 1to2")
    p.add_argument("--shots", type=int, help="defaults to --samples")
    p.add_argument("--state", help="fixed input qubit; Haar-random per shot when omitted")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", parents=[common], help="reproduce the four-strategy fidelity table")
    p.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo column")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = Config(
            tolerance_exact=args.tolerance,
            mc_samples=args.samples,
            seed=args.seed,
            output_format=args.format,
            workers=_parallel.resolve_workers(args.workers),
        )
        return args.func(args, cfg, out)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (UsageError, InvalidPovmError, InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

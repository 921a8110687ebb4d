"""Command-line front end: system generation, reduction runs, certification,
and basin sweeps with JSON/CSV reports.

Exit codes: 0 success (reduce: converged), 2 reduce finished without
convergence, 1 any error.  The environment variable IRKA_LAB_SEED is the
fallback when --seed is not given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys as _sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import generators
from .errors import IrkaLabError
from .error_zeros import error_zeros
from .fileio import dump_json, load_system, parse_system, save_system, system_to_dict
from .fixpoint import certify
from .h2 import h2_error
from .irka import INIT_LOGSPACE, INIT_RANDOM, IrkaConfig, initial_shifts, run_irka
from .systems import StateSpaceSystem, classify

REPORT_VERSION = 1
SWEEP_VERSION = 1
#: Relative shift-set distance below which two converged runs share a cluster.
CLUSTER_RTOL = 1e-6

_INIT_FLAGS = {"logspace": INIT_LOGSPACE, "random": INIT_RANDOM}


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get("IRKA_LAB_SEED", "0"))


def _parse_float_list(text: str, field: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValueError(f'field "{field}": expected comma-separated numbers') from exc


class _Timer:
    def __init__(self):
        self.phases: dict[str, float] = {}

    def run(self, name: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        self.phases[name] = 1e3 * (time.perf_counter() - t0)
        return result


def build_run_report(
    system: StateSpaceSystem,
    cfg: IrkaConfig,
    seed: int,
    *,
    input_digest: str = "",
    certify_mode: str = "auto",
    with_timings: bool = True,
):
    """Run the full pipeline on one system and assemble the report dict.

    Returns (report, trace); certification and error-zero analysis run only
    for converged runs on state-space-symmetric systems with
    certify_mode="auto".
    """
    timer = _Timer()
    shifts0 = timer.run("initial_shifts", initial_shifts, system, cfg.r, cfg.init, seed)
    trace = timer.run("irka", run_irka, system, cfg, shifts0)
    h2rep = timer.run("h2_error", h2_error, system, trace.final_model)
    cert = None
    zero_report = None
    if certify_mode == "auto" and trace.converged and classify(system).is_sss:
        cert = timer.run("certify", certify, system, trace.final_model, trace)
        zero_report = timer.run("error_zeros", error_zeros, system, trace.final_model)
    report = {
        "report_version": REPORT_VERSION,
        "input_digest": input_digest,
        "config": {**cfg.to_dict(), "seed": seed},
        "trace": trace.to_dict(),
        "h2": h2rep.to_dict(),
        "certificate": cert.to_dict() if cert is not None else None,
        "error_zeros": zero_report.to_dict() if zero_report is not None else None,
    }
    if with_timings:
        report["timings_ms"] = timer.phases
    return report, trace


def basin_sweep(
    system: StateSpaceSystem,
    r: int,
    count: int,
    seed: int,
    *,
    tol: float = 1e-10,
    max_sweeps: int = 200,
    jobs: int = 1,
) -> dict:
    """Run `count` seeded random initializations and cluster the fixed points.

    Runs execute concurrently up to `jobs` workers; records are ordered by
    run index regardless of completion order.  Certificates are computed once
    per cluster, on the lowest-index representative.
    """
    if not classify(system).is_sss:
        raise ValueError("basin sweeps require a state-space-symmetric system")
    cfg = IrkaConfig(r=r, tol=tol, max_sweeps=max_sweeps, init=INIT_RANDOM)

    def one(i: int) -> dict:
        shifts0 = initial_shifts(system, r, INIT_RANDOM, seed + i)
        trace = run_irka(system, cfg, shifts0)
        rep = h2_error(system, trace.final_model)
        return {
            "run_index": i,
            "seed": seed + i,
            "converged": trace.converged,
            "sweeps": trace.n_sweeps,
            "final_shifts": np.sort(trace.final_shifts.real),
            "cost_J": rep.cost_j,
            "_trace": trace,
        }

    if count > 0:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            runs = list(pool.map(one, range(count)))
    else:
        runs = []

    clusters: list[dict] = []
    members: list[list[dict]] = []
    for rec in runs:
        if not rec["converged"]:
            continue
        s = rec["final_shifts"]
        placed = False
        for cl, mem in zip(clusters, members):
            ref = cl["shifts"]
            if ref.size == s.size and np.max(np.abs(ref - s)) <= CLUSTER_RTOL * (
                1.0 + np.max(np.abs(ref))
            ):
                mem.append(rec)
                placed = True
                break
        if not placed:
            clusters.append({"shifts": s})
            members.append([rec])

    cluster_rows = []
    for k, (cl, mem) in enumerate(zip(clusters, members)):
        rep = mem[0]
        cert = certify(system, rep["_trace"].final_model, rep["_trace"])
        cluster_rows.append(
            {
                "cluster": k,
                "size": len(mem),
                "basin_share": len(mem) / count if count else 0.0,
                "shifts": cl["shifts"],
                "spectral_radius": cert.spectral_radius,
                "verdict": cert.verdict,
                "cost_J": rep["cost_J"],
                "certificate": cert.to_dict(),
            }
        )

    for rec in runs:
        rec.pop("_trace")
    return {
        "sweep_version": SWEEP_VERSION,
        "count": count,
        "seed": seed,
        "config": cfg.to_dict(),
        "runs": runs,
        "clusters": cluster_rows,
        "unconverged": sum(1 for rec in runs if not rec["converged"]),
    }


def sweep_csv(sweep: dict) -> str:
    lines = ["cluster,size,basin_share,spectral_radius,verdict,cost_J"]
    for row in sweep["clusters"]:
        cost = "" if row["cost_J"] is None else repr(float(row["cost_J"]))
        lines.append(
            f'{row["cluster"]},{row["size"]},{row["basin_share"]!r},'
            f'{row["spectral_radius"]!r},{row["verdict"]},{cost}'
        )
    return "\n".join(lines) + "\n"


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        _sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_gen(args: argparse.Namespace) -> int:
    kind = args.kind
    poles = residues = None
    if kind == generators.KIND_DIAGONAL:
        if args.poles is None or args.residues is None:
            raise ValueError("diagonal systems require --poles and --residues")
        poles = _parse_float_list(args.poles, "poles")
        residues = _parse_float_list(args.residues, "residues")
    elif args.n is None:
        raise ValueError(f"{kind} systems require --n")
    system = generators.generate(
        kind, n=args.n or 0, seed=_resolve_seed(args.seed), poles=poles, residues=residues
    )
    _write_or_print(dump_json(system_to_dict(system)), args.out)
    return 0


def _cmd_reduce(args: argparse.Namespace) -> int:
    path = Path(args.system)
    system = load_system(path)
    if not args.r < system.n:
        raise ValueError("r must be < n")
    cfg = IrkaConfig(
        r=args.r,
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        init=_INIT_FLAGS[args.init],
    )
    report, trace = build_run_report(
        system,
        cfg,
        _resolve_seed(args.seed),
        input_digest=_digest(path),
        certify_mode=args.certify,
        with_timings=not args.no_timings,
    )
    _write_or_print(dump_json(report), args.out)
    return 0 if trace.converged else 2


def _cmd_sweep(args: argparse.Namespace) -> int:
    path = Path(args.system)
    system = load_system(path)
    if not args.r < system.n:
        raise ValueError("r must be < n")
    sweep = basin_sweep(
        system,
        args.r,
        args.count,
        _resolve_seed(args.seed),
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        jobs=args.jobs,
    )
    sweep["input_digest"] = _digest(path)
    _write_or_print(dump_json(sweep), args.out)
    csv_path = args.csv
    if csv_path is None and args.out is not None:
        csv_path = str(Path(args.out).with_suffix(".csv"))
    if csv_path is not None:
        Path(csv_path).write_text(sweep_csv(sweep), encoding="utf-8")
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    path = Path(args.system)
    system = load_system(path)
    with Path(args.report).open("r", encoding="utf-8") as fh:
        report = json.load(fh)
    digest = _digest(path)
    recorded = report.get("input_digest", "")
    if recorded and recorded != digest:
        print(
            f"warning: system digest {digest[:12]} does not match report digest {recorded[:12]}",
            file=_sys.stderr,
        )
    trace = report.get("trace")
    if not isinstance(trace, dict) or "final_model" not in trace:
        raise ValueError('field "trace.final_model": missing from report')
    red = parse_system(trace["final_model"], source="trace.final_model")
    cert = certify(system, red)
    zeros = error_zeros(system, red)
    out = {
        "report_version": REPORT_VERSION,
        "input_digest": digest,
        "certificate": cert.to_dict(),
        "error_zeros": zeros.to_dict(),
    }
    _write_or_print(dump_json(out), args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irka-lab",
        description="H2 model reduction by rational Krylov iteration, with "
        "fixed-point certification for state-space-symmetric systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a system file")
    gen.add_argument("kind", choices=generators.GENERATOR_KINDS)
    gen.add_argument("--n", type=int, default=None, help="system order")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--poles", type=str, default=None, help="comma-separated poles (diagonal)")
    gen.add_argument("--residues", type=str, default=None, help="comma-separated residues (diagonal)")
    gen.add_argument("--out", type=str, default=None)
    gen.set_defaults(fn=_cmd_gen)

    red = sub.add_parser("reduce", help="run the reduction iteration and write a report")
    red.add_argument("system", type=str)
    red.add_argument("--r", type=int, required=True, help="reduction order")
    red.add_argument("--tol", type=float, default=1e-10)
    red.add_argument("--max-sweeps", type=int, default=200)
    red.add_argument("--init", choices=sorted(_INIT_FLAGS), default="logspace")
    red.add_argument("--seed", type=int, default=None)
    red.add_argument("--certify", choices=("auto", "off"), default="auto")
    red.add_argument("--no-timings", action="store_true", help="omit timings (golden-file runs)")
    red.add_argument("--out", type=str, default=None)
    red.set_defaults(fn=_cmd_reduce)

    sw = sub.add_parser("sweep", help="basin sweep over random initializations")
    sw.add_argument("system", type=str)
    sw.add_argument("--r", type=int, required=True)
    sw.add_argument("--count", type=int, required=True)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--tol", type=float, default=1e-10)
    sw.add_argument("--max-sweeps", type=int, default=200)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out", type=str, default=None)
    sw.add_argument("--csv", type=str, default=None)
    sw.set_defaults(fn=_cmd_sweep)

    cert = sub.add_parser("certify", help="re-certify the reduced model of an existing report")
    cert.add_argument("system", type=str)
    cert.add_argument("report", type=str)
    cert.add_argument("--out", type=str, default=None)
    cert.set_defaults(fn=_cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (IrkaLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

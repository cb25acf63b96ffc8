"""Command-line entry point.

Exit codes: 0 success, 1 input or runtime error (a JSON error object is
printed), 2 inconclusive divergence diagnostics.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import group_rep as gr
from .acceptance import format_line, verify_all
from .directed_system import verify_fig2
from .measure_space import MeasureError, ess_sup, function_from_json, space_from_json
from .multiplication_rep import (
    DEFAULT_MODES,
    Inconclusive,
    Member,
    TruncationSchedule,
    build_truncation,
    classify_exact,
    classify_numeric,
    diagnose_divergence,
    trace_power_partial,
    verdict_to_dict,
)
from .schatten import INF, SchattenReport, encode_exponent, parse_exponent

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    space: Optional[Path] = None
    function: Optional[Path] = None
    group: Optional[Path] = None
    p: float = 1.0
    p_grid: tuple[float, ...] = (1.0, 1.5, 2.0, 3.0, INF)
    modes: Optional[tuple[int, ...]] = None
    slope_tol: Optional[float] = None
    seed: int = 0
    fmt: str = "json"
    out: Optional[Path] = None
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.modes is not None:
            if any(m < 0 for m in self.modes):
                raise CliError("--modes must be non-negative integers")
            if list(self.modes) != sorted(set(self.modes)):
                raise CliError("--modes must be strictly increasing")

    @property
    def mode_family(self) -> tuple[int, ...]:
        return self.modes or DEFAULT_MODES


def _load_json(path: Optional[Path], flag: str):
    if path is None:
        raise CliError(f"{flag} is required")
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"{flag}: no such file {path}") from None
    except json.JSONDecodeError as e:
        raise CliError(f"{flag}: invalid JSON ({e})") from None


def _load_inputs(cfg: RunConfig):
    space = space_from_json(_load_json(cfg.space, "--space"))
    f = function_from_json(_load_json(cfg.function, "--function"), space)
    return space, f


def _family(cfg: RunConfig) -> list[TruncationSchedule]:
    return [TruncationSchedule(m) for m in cfg.mode_family]


def cmd_classify(cfg: RunConfig) -> tuple[int, dict]:
    space, f = _load_inputs(cfg)
    exact = classify_exact(space, f, cfg.p)
    report = {"command": "classify", "p": encode_exponent(cfg.p), "exact": verdict_to_dict(exact)}
    try:
        numeric = classify_numeric(space, f, cfg.p, _family(cfg), cfg.slope_tol)
    except Inconclusive as e:
        report["numeric"] = {"verdict": "Inconclusive", "message": str(e), "diagnostics": e.diagnostics}
        report["agree"] = None
        return EXIT_INCONCLUSIVE, report
    report["numeric"] = verdict_to_dict(numeric)
    report["partials"] = numeric.diagnostics.get("partials")
    report["slope"] = numeric.diagnostics.get("slope", 0.0)
    report["agree"] = type(numeric) is type(exact)
    return (EXIT_OK if report["agree"] else EXIT_ERROR), report


def cmd_norm(cfg: RunConfig) -> tuple[int, dict]:
    space, f = _load_inputs(cfg)
    op = build_truncation(space, f, TruncationSchedule(max(cfg.mode_family)))
    rep = SchattenReport.of(op.matrix, cfg.p)
    return EXIT_OK, {
        "command": "norm",
        "dimension": op.matrix.shape[0],
        "labels": [str(l) for l in op.labels],
        "report": rep.to_dict(),
    }


def sweep_rows(space, f, grid: Sequence[float]) -> list[dict]:
    rows = []
    for p in grid:
        if p == INF:
            rows.append({"p": "inf", "norm": ess_sup(space, f), "verdict": "Member"})
            continue
        v = classify_exact(space, f, p)
        rows.append({"p": p, "norm": v.norm if isinstance(v, Member) else None, "verdict": type(v).__name__})
    return rows


def cmd_sweep(cfg: RunConfig) -> tuple[int, dict]:
    space, f = _load_inputs(cfg)
    rows = sweep_rows(space, f, cfg.p_grid)
    finite = [r["norm"] for r in rows if r["norm"] is not None]
    monotone = all(b <= a + 1e-10 * max(a, 1.0) for a, b in zip(finite, finite[1:]))
    return (EXIT_OK if monotone else EXIT_ERROR), {"command": "sweep", "rows": rows, "monotone_non_increasing": monotone}


def cmd_diverge(cfg: RunConfig) -> tuple[int, dict]:
    space, f = _load_inputs(cfg)
    partials = [(m, trace_power_partial(space, f, cfg.p, TruncationSchedule(m))) for m in cfg.mode_family]
    report = {"command": "diverge", "p": encode_exponent(cfg.p), "partials": [[m, v] for m, v in partials]}
    try:
        res = diagnose_divergence(partials, cfg.slope_tol)
    except Inconclusive as e:
        report["diagnosis"] = {"result": "Inconclusive", "message": str(e)}
        return EXIT_INCONCLUSIVE, report
    if hasattr(res, "linear_rate"):
        report["diagnosis"] = {"result": "Diverges", "linear_rate": res.linear_rate}
    else:
        report["diagnosis"] = {"result": "Converged", "limit": res.limit, "tail": res.tail}
    return EXIT_OK, report


def _group_from(obj) -> gr.FiniteGroup:
    builtin = obj.get("builtin") if isinstance(obj, dict) else None
    if builtin:
        if builtin.startswith("Z") and builtin[1:].lstrip("/").isdigit():
            return gr.cyclic(int(builtin[1:].lstrip("/")))
        if builtin.startswith("D") and builtin[1:].isdigit():
            return gr.dihedral(int(builtin[1:]))
        if builtin.startswith("S") and builtin[1:].isdigit():
            return gr.symmetric(int(builtin[1:]))
        raise CliError(f"$.builtin: unknown group {builtin!r}")
    return gr.FiniteGroup.from_json(obj)


def cmd_group(cfg: RunConfig) -> tuple[int, dict]:
    """Group file: ``{"cayley": [[...]]}`` or ``{"builtin": "Z4"}`` plus optional
    ``"representation"`` (builtin name or matrices) and ``"function"`` (values)."""
    obj = _load_json(cfg.group, "--group")
    g = _group_from(obj)
    rep = gr.rep_from_json(obj.get("representation", "regular"), g)
    ideal = gr.pullback_ideal(rep, cfg.p)
    report = {
        "command": "group",
        "group": g.name,
        "order": g.order,
        "rep_dim": rep.dim,
        "p": encode_exponent(cfg.p),
        "kernel_dim": ideal.kernel_dim,
        "quotient_dim": ideal.quotient_dim,
        "kernel_basis": [[[z.real, z.imag] for z in v] for v in ideal.kernel_basis],
        "note": ideal.note,
    }
    values = obj.get("function")
    if cfg.function is not None:
        values = _load_json(cfg.function, "--function").get("values")
    if values is not None:
        f = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in values])
        report["schatten"] = SchattenReport.of(gr.induce(rep, f), cfg.p).to_dict()
    return EXIT_OK, report


def cmd_fig2(cfg: RunConfig) -> tuple[int, dict]:
    space = space_from_json(_load_json(cfg.space, "--space"))
    m = cfg.modes[-1] if cfg.modes else 1
    report = verify_fig2(space, schedule=TruncationSchedule(m), grid=cfg.p_grid, seed=cfg.seed)
    report["command"] = "fig2"
    return (EXIT_OK if report["passed"] else EXIT_ERROR), report


def cmd_verify_all(cfg: RunConfig) -> tuple[int, dict]:
    report = verify_all(cfg.seed)
    report["command"] = "verify-all"
    return (EXIT_OK if report["passed"] else EXIT_ERROR), report


COMMANDS = {
    "classify": cmd_classify,
    "norm": cmd_norm,
    "sweep": cmd_sweep,
    "diverge": cmd_diverge,
    "group": cmd_group,
    "fig2": cmd_fig2,
    "verify-all": cmd_verify_all,
}


def _p_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(parse_exponent(t) for t in text.split(",") if t.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _p_value(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1 like every other input error; 2 means inconclusive
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schattenlab", description="Schatten-class ideal laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--space", type=Path)
        sp.add_argument("--function", type=Path)
        sp.add_argument("--group", type=Path)
        sp.add_argument("--p", type=_p_value, default=1.0)
        sp.add_argument("--p-grid", type=_p_list, default=(1.0, 1.5, 2.0, 3.0, INF))
        sp.add_argument("--modes", type=_int_list)
        sp.add_argument("--slope-tol", type=float)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", type=Path)
    return parser


def _emit(report: dict, cfg: RunConfig) -> str:
    if cfg.fmt == "csv" and "rows" in report:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["p", "norm", "verdict"], lineterminator="\n")
        w.writeheader()
        w.writerows(report["rows"])
        return buf.getvalue()
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    overrides, cfg = {}, None
    try:
        args = build_parser().parse_args(argv)
        if args.slope_tol is not None:
            overrides["slope_tol"] = args.slope_tol
        cfg = RunConfig(
            command=args.command,
            space=args.space,
            function=args.function,
            group=args.group,
            p=args.p,
            p_grid=args.p_grid,
            modes=args.modes,
            slope_tol=args.slope_tol,
            seed=args.seed,
            fmt=args.format,
            out=args.out,
            overrides=overrides,
        )
        code, report = COMMANDS[cfg.command](cfg)
    except (CliError, MeasureError, gr.GroupError, ValueError) as e:
        code, report = EXIT_ERROR, {"error": type(e).__name__, "message": str(e)}
        cfg = None
    if cfg is not None and overrides:
        report["overrides"] = overrides
    if cfg is not None and cfg.command == "verify-all" and cfg.fmt == "json" and cfg.out is None:
        for r in report["criteria"]:
            print(format_line(r), file=sys.stderr)
    text = _emit(report, cfg) if cfg is not None else json.dumps(report, sort_keys=True) + "\n"
    if cfg is not None and cfg.out is not None:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

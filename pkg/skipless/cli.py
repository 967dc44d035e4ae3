# skipless/cli.py
"""
Command-line entry point: build | verify | simulate | sweep.

Exit codes: 0 pass, 1 domain failure (verification, repair, unsupported
order, ...), 2 usage error. Logs go to stderr; descriptors and reports go
to --out (written atomically) or stdout.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .data_loader import dump_json, load_descriptor
from .errors import ParameterOutOfRange, SkiplessError
from .finite_field import MAX_W, MIN_W, FieldSpec
from .fr_codes import FRCode, demo_store, repair_node, to_array_code
from .repair_sim import compare_baseline, measure, metric_rows, sqs_order_sweep, sweep, ReadTrace, CSV_COLUMNS
from .steiner import (
    Design,
    build_sqs,
    check_difference_condition,
    check_repeated_adjacent_pairs,
    load_table,
    point_label,
    verify_sqs,
)
from .utils import append_diag, atomic_write_text, configure_logging, default_jobs, sqs_bound
from .zigzag import (
    DEFAULT_MAX_ATTEMPTS,
    MAX_K,
    MAX_M,
    MIN_K,
    MIN_M,
    ZigzagCode,
    assign_coefficients,
    build_code,
    encode,
    execute_repair,
    plan_repair,
    random_info,
    seed_coefficients,
    verify_mds,
)

logger = logging.getLogger(__name__)

# Config
ZIGZAG_CONSTRUCTIONS = ("a", "b", "c", "baseline")
DESIGN_CONSTRUCTIONS = ("sqs", "fr")
CHECKS = ("mds", "sqs", "zero-skip", "adjacent-pairs", "differences")
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class CommandConfig:
    command: str
    descriptor: Optional[str] = None
    construction: Optional[str] = None
    m: Optional[int] = None
    k: Optional[int] = None
    v: Optional[int] = None
    seed: int = 0
    field_w: int = 16
    fail_node: Optional[int] = None
    check: Optional[str] = None
    compare: bool = False
    all_orders: bool = False
    jobs: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    k_outer: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "json"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CommandConfig":
        return cls(
            command=args.command,
            descriptor=getattr(args, "descriptor", None),
            construction=args.construction.lower() if args.construction else None,
            m=args.m,
            k=args.k,
            v=args.v,
            seed=args.seed,
            field_w=args.field_w,
            fail_node=getattr(args, "fail_node", None),
            check=getattr(args, "check", None),
            compare=getattr(args, "compare", False),
            all_orders=getattr(args, "all_orders", False),
            jobs=args.jobs if args.jobs is not None else default_jobs(),
            max_attempts=args.max_attempts,
            k_outer=args.k_outer,
            out=args.out,
            fmt=getattr(args, "format", "json"),
        )

    @property
    def is_zigzag(self) -> bool:
        return self.construction in ZIGZAG_CONSTRUCTIONS

    def validate(self) -> "CommandConfig":
        """Reject out-of-range parameters before any work starts."""
        if self.construction is not None and self.construction not in ZIGZAG_CONSTRUCTIONS + DESIGN_CONSTRUCTIONS:
            raise ParameterOutOfRange(f"unknown construction {self.construction!r}")
        if not MIN_W <= self.field_w <= MAX_W:
            raise ParameterOutOfRange(f"--field-w must be in [{MIN_W}, {MAX_W}]")
        if self.jobs < 1:
            raise ParameterOutOfRange("--jobs must be at least 1")
        if self.max_attempts < 1:
            raise ParameterOutOfRange("--max-attempts must be at least 1")
        if self.fmt not in FORMATS:
            raise ParameterOutOfRange(f"--format must be one of {', '.join(FORMATS)}")
        if self.k_outer is not None and self.k_outer < 1:
            raise ParameterOutOfRange("--k-outer must be at least 1")
        if self.fail_node is not None and self.fail_node < 0:
            raise ParameterOutOfRange("--fail-node must be non-negative")
        if self.descriptor is not None and not Path(self.descriptor).is_file():
            raise ParameterOutOfRange(f"descriptor not found: {self.descriptor}")

        if self.m is not None and not MIN_M <= self.m <= MAX_M:
            raise ParameterOutOfRange(f"--m must be in [{MIN_M}, {MAX_M}]")
        if self.k is not None and not MIN_K <= self.k <= MAX_K:
            raise ParameterOutOfRange(f"--k must be in [{MIN_K}, {MAX_K}]")
        if self.v is not None and self.v < 4:
            raise ParameterOutOfRange("--v must be at least 4")

        needs_target = self.command == "build" or not (
            self.descriptor or (self.command == "sweep" and (self.compare or self.all_orders)))
        if needs_target:
            if self.construction is None:
                raise ParameterOutOfRange("give a descriptor or --construction")
            self._validate_construction()
        elif self.descriptor is None and self.construction is not None:
            self._validate_construction()

        if self.command == "simulate" and self.fail_node is None:
            raise ParameterOutOfRange("simulate needs --fail-node")
        if self.command == "sweep" and self.compare and self.m is None:
            raise ParameterOutOfRange("--compare needs --m")
        if self.command == "sweep" and self.all_orders and self.v is None:
            raise ParameterOutOfRange("--all-orders needs --v as the upper order")
        return self

    def _validate_construction(self):
        if self.is_zigzag:
            if self.m is None:
                raise ParameterOutOfRange(f"construction {self.construction} needs --m")
            if self.construction == "c" and self.k is None:
                raise ParameterOutOfRange("construction c needs --k")
        elif self.v is None:
            raise ParameterOutOfRange(f"construction {self.construction} needs --v")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skipless", description="Zero-skip-cost repair codes: build, verify, simulate, sweep.")
    parser.add_argument("--log-level", default=None, help="overrides SKIPLESS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--construction", help="a | b | c | baseline | sqs | fr")
        p.add_argument("--m", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--v", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--field-w", type=int, default=16)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--max-attempts", type=int, default=DEFAULT_MAX_ATTEMPTS)
        p.add_argument("--k-outer", type=int, default=None)
        p.add_argument("--out", default=None)

    build = sub.add_parser("build", help="write a code or design descriptor")
    common(build)

    verify = sub.add_parser("verify", help="check a descriptor")
    verify.add_argument("descriptor", nargs="?")
    common(verify)
    verify.add_argument("--check", choices=CHECKS, default=None)

    simulate = sub.add_parser("simulate", help="fail one node, repair it, report metrics")
    simulate.add_argument("descriptor", nargs="?")
    common(simulate)
    simulate.add_argument("--fail-node", type=int, required=True)
    simulate.add_argument("--format", choices=FORMATS, default="json")

    sweep_p = sub.add_parser("sweep", help="repair every node and report")
    sweep_p.add_argument("descriptor", nargs="?")
    common(sweep_p)
    sweep_p.add_argument("--compare", action="store_true")
    sweep_p.add_argument("--all-orders", action="store_true")
    sweep_p.add_argument("--format", choices=FORMATS, default="json")
    return parser


# ---------------------------------------------------------------------------
# targets

def _field(cfg: CommandConfig) -> FieldSpec:
    return FieldSpec.default(cfg.field_w)


def _fresh_zigzag(cfg: CommandConfig) -> ZigzagCode:
    return build_code(cfg.construction, cfg.m, cfg.k, _field(cfg))


def _target(cfg: CommandConfig, mds: bool = False):
    if cfg.descriptor:
        return load_descriptor(cfg.descriptor)
    if cfg.is_zigzag:
        code = _fresh_zigzag(cfg)
        if mds:
            return assign_coefficients(code, cfg.seed, cfg.max_attempts, cfg.jobs)
        return seed_coefficients(code, cfg.seed)
    design = build_sqs(cfg.v, sqs_bound())
    return to_array_code(design) if cfg.construction == "fr" else design


def _emit(text: str, out: Optional[str]):
    if out:
        atomic_write_text(out, text)
        print(f"[DONE] wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _design_of(target) -> Design:
    if isinstance(target, FRCode):
        return target.design
    if isinstance(target, Design):
        return target
    raise ParameterOutOfRange(f"this check needs a design, got a {type(target).__name__}")


def _records_of(df) -> List[dict]:
    return df.astype(object).where(df.notna(), None).to_dict("records")


# ---------------------------------------------------------------------------
# commands

def cmd_build(cfg: CommandConfig) -> int:
    target = _target(cfg, mds=True)
    _emit(dump_json(target.to_dict()), cfg.out)
    return 0


def _verdict(ok: bool, detail: str) -> int:
    print(f"{'PASS' if ok else 'FAIL'} {detail}")
    return 0 if ok else 1


def cmd_verify(cfg: CommandConfig) -> int:
    target = _target(cfg, mds=cfg.check in (None, "mds"))
    check = cfg.check or ("mds" if isinstance(target, ZigzagCode) else "sqs")

    if check == "mds":
        if not isinstance(target, ZigzagCode):
            raise ParameterOutOfRange("--check mds needs a zigzag code")
        verdict = verify_mds(target, jobs=cfg.jobs)
        detail = (f"MDS over all {verdict.subsets_checked} column subsets" if verdict
                  else f"rank deficient on columns {list(verdict.witness)} {verdict.note}".rstrip())
        return _verdict(verdict.ok, detail)

    if check == "sqs":
        verdict = verify_sqs(_design_of(target))
        return _verdict(verdict.ok, verdict.describe())

    if check == "adjacent-pairs":
        verdict = check_repeated_adjacent_pairs(_design_of(target))
        detail = ("every pair adjacent in at least two blocks" if verdict
                  else f"pair {{{', '.join(point_label(p) for p in verdict.witness)}}} adjacent in "
                       f"{verdict.occurrences} block(s)")
        return _verdict(verdict.ok, detail)

    if check == "differences":
        design = _design_of(target)
        if design.construction != "table" or not design.table:
            raise ParameterOutOfRange("--check differences needs a design developed from a base-block table")
        report = check_difference_condition(load_table(design.table))
        return _verdict(report.ok, report.reason or f"difference condition holds for {design.table}")

    report = sweep(target, jobs=cfg.jobs, seed=cfg.seed, k_outer=cfg.k_outer,
                   field_spec=_field(cfg) if not isinstance(target, ZigzagCode) else None)
    summary = report.summary
    if summary["zero_skip"]:
        return _verdict(True, f"{summary['repaired']} repairs, all skip 0")
    bad = next((r for r in report.records if r["skip_total"]), None)
    if bad is not None:
        detail = f"s={bad['failed']} skip {bad['skip_total']}"
    else:
        detail = f"{summary['failed_cases']} repair(s) failed"
    return _verdict(False, detail)


def cmd_simulate(cfg: CommandConfig) -> int:
    target = _target(cfg)
    if isinstance(target, Design):
        target = to_array_code(target)

    if isinstance(target, ZigzagCode):
        if cfg.fail_node >= target.n_nodes:
            raise ParameterOutOfRange(f"--fail-node {cfg.fail_node} out of range for N={target.n_nodes}")
        cw = encode(target, random_info(target, cfg.seed))
        plan = plan_repair(target, cfg.fail_node)
        recovered = execute_repair(cw, plan, target)
        ok = bool(np.array_equal(recovered, cw.column(cfg.fail_node)))
        metrics = measure(ReadTrace.from_zigzag_plan(plan, target.column_names))
        label, m, k = target.construction.value, target.m, target.k
    else:
        if cfg.fail_node >= target.N:
            raise ParameterOutOfRange(f"--fail-node {cfg.fail_node} out of range for N={target.N}")
        store, _ = demo_store(target, _field(cfg), cfg.seed, cfg.k_outer)
        packets, metrics = repair_node(target, store, cfg.fail_node)
        ok = packets == target.node_contents(store, cfg.fail_node)
        label, m, k = f"sqs{target.n}:{target.design.construction}", None, None

    rows = metric_rows(label, m, k, cfg.fail_node, metrics)
    if cfg.fmt == "csv":
        text = pd.DataFrame(rows, columns=CSV_COLUMNS).to_csv(index=False)
    else:
        text = dump_json({
            "summary": {
                "construction": label,
                "failed": cfg.fail_node,
                "recovered": ok,
                "locality": metrics.locality,
                "bandwidth_total": metrics.bandwidth,
                "skip_total": metrics.skip_cost,
                "max_helper_fraction": metrics.max_helper_fraction,
            },
            "rows": rows,
        })
    _emit(text, cfg.out)
    if not ok:
        print(f"[ERROR] node {cfg.fail_node} was not recovered exactly", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(cfg: CommandConfig) -> int:
    has_target = bool(cfg.descriptor or (cfg.construction and not cfg.all_orders))
    report = None
    if cfg.all_orders:
        report = sqs_order_sweep(cfg.v, jobs=cfg.jobs, seed=cfg.seed, bound=max(cfg.v, sqs_bound()))
    elif has_target:
        target = _target(cfg)
        report = sweep(target, jobs=cfg.jobs, seed=cfg.seed, k_outer=cfg.k_outer,
                       field_spec=_field(cfg) if not isinstance(target, ZigzagCode) else None)

    if cfg.compare:
        table = compare_baseline(cfg.m)
        if cfg.fmt == "csv":
            if report is not None:
                raise ParameterOutOfRange("--compare with a sweep target needs --format json")
            text = table.to_csv(index=False)
        else:
            payload = {"comparison": _records_of(table)}
            if report is not None:
                payload.update({"summary": report.summary, "rows": report.records})
            text = dump_json(payload)
    else:
        text = report.to_csv() if cfg.fmt == "csv" else report.to_json()
    _emit(text, cfg.out)

    if report is not None and (report.summary["failed_cases"] or not report.summary["planner_agrees"]):
        print(f"[ERROR] {report.summary['failed_cases']} repair(s) failed in {report.label}", file=sys.stderr)
        return 1
    return 0


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)

    try:
        cfg = CommandConfig.from_args(args).validate()
        status = COMMANDS[cfg.command](cfg)
    except ParameterOutOfRange as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        append_diag(f"{args.command} usage error: {exc}")
        return 2
    except SkiplessError as exc:
        print(f"[ERROR] {exc}", file=sys.stderr)
        append_diag(f"{args.command} failed: {type(exc).__name__}: {exc}")
        return 1
    append_diag(f"{args.command} exit {status}")
    return status


if __name__ == "__main__":
    sys.exit(main())

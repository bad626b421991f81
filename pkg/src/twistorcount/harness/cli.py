"""Command line interface.

Exit status: 0 when every checked flag holds, 1 when a theorem flag or a
validation fails, 2 on bad input, 3 when a solver refuses the budget.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..curvecount import ZetaTriple, count_curves, period_forms, refine_until_clean, squarefree_oracle_q1
from ..decompopt import (
    GEOMETRIC,
    LITERAL,
    Decomposition,
    SolverBudget,
    f1_solve,
    f2_solve,
    induced_decomposition,
    validate_decomposition,
)
from ..errors import BudgetExceededError, TheoremViolation
from ..exactfield import GaussRational, parse_rational
from ..rootsys import build_root_system, check_legal
from . import reports
from .cache import ResultCache, config_key
from .oracle import float_oracle
from .sampling import DEFAULT_SAMPLING, iter_samples, random_plane, sample_plan, sample_rng, sample_zeta

log = logging.getLogger("twistorcount")

EXIT_OK, EXIT_FLAG, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    """Bad command line or input file; maps to exit status 2."""


@dataclass
class RunConfig:
    """Everything that determines a report; its hash is the cache key."""

    command: str
    systems: list[str] = field(default_factory=list)
    rank_class: str = "all"
    samples: int = 0
    seed: int = 0
    numerator_bound: int = DEFAULT_SAMPLING.numerator_bound
    denominators: list[int] = field(default_factory=lambda: list(DEFAULT_SAMPLING.denominators))
    mode: str = GEOMETRIC
    max_nodes: int = SolverBudget().max_nodes
    allow_large: bool = False
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _system_names(args) -> list[str]:
    names = []
    if getattr(args, "systems", None):
        names = [s.strip().upper() for s in args.systems.split(",") if s.strip()]
    elif args.family and args.rank is not None:
        names = [f"{args.family.upper()}{args.rank}"]
    for name in names:
        if len(name) < 2 or not name[1:].isdigit():
            raise InputError(f"bad system name {name!r}")
        check_legal(name[0], int(name[1:]))
    return names


def _system(name: str):
    return build_root_system(name[0], int(name[1:]))


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _evaluate(task: tuple) -> dict:
    name, rank_class, index, seed, oracles = task
    system = _system(name)
    zeta = sample_zeta(system, rank_class, sample_rng(seed, system, rank_class, index))
    report = count_curves(zeta, strict=False)
    row = reports.sample_row(system, index, report, zeta)
    if oracles:
        approx = float_oracle(zeta)
        row["oracle"] = {
            "squarefree_q1": squarefree_oracle_q1(report, period_forms(zeta)),
            "float_q1": approx.q1,
            "float_q2": approx.q2,
            "near_degenerate": approx.near_degenerate,
        }
    return row


def _sampled_rows(config: RunConfig, workers: int, oracles: bool) -> list[dict]:
    tasks = []
    for name in config.systems:
        system = _system(name)
        for index, rc in sample_plan(system, config.rank_class, config.samples):
            tasks.append((name, rc, index, config.seed, oracles))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, tasks, chunksize=8))
    return [_evaluate(t) for t in tasks]


def _oracle_summary(rows: list[dict]) -> dict:
    total = len(rows)
    sq_agree = sum(r["oracle"]["squarefree_q1"] == r["q1"] for r in rows)
    float_agree = sum((r["oracle"]["float_q1"], r["oracle"]["float_q2"]) == (r["q1"], r["q2"]) for r in rows)
    flagged = sum(r["oracle"]["near_degenerate"] for r in rows)
    unflagged_disagree = sum(
        (r["oracle"]["float_q1"], r["oracle"]["float_q2"]) != (r["q1"], r["q2"])
        and not r["oracle"]["near_degenerate"]
        for r in rows
    )
    ok = sq_agree == total and unflagged_disagree == 0 and float_agree * 100 >= 99 * total
    return {
        "samples": total,
        "squarefree_agree": sq_agree,
        "float_agree": float_agree,
        "near_degenerate": flagged,
        "unflagged_disagreements": unflagged_disagree,
        "ok": ok,
    }


# --------------------------------------------------------------------------
# commands; each returns (report dict, csv rows or None, exit status)
# --------------------------------------------------------------------------

def cmd_roots(args, config: RunConfig):
    system = _system(config.systems[0])
    out = system.to_json()
    out["cardinality"] = len(system.roots)
    out["positive"] = len(system.positive_roots)
    return out, None, EXIT_OK


def cmd_count(args, config: RunConfig, oracles: bool = False):
    if args.zeta:
        obj = config.inputs["zeta"]
        try:
            zeta = ZetaTriple.from_json(obj)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed zeta file: {exc}") from None
        report = count_curves(zeta, strict=False)
        rows = [reports.sample_row(zeta.system, 0, report, zeta)]
        rows[0]["points"] = report.to_json()["points"]
    else:
        if not config.systems:
            raise InputError("give --zeta, or --family and --rank")
        rows = _sampled_rows(config, args.workers, oracles)
    out = {"config": config.to_json(), "samples": rows, "tallies": reports.tally(rows)}
    status = EXIT_OK if all(r["bounds_ok"] for r in rows) else EXIT_FLAG
    if oracles and not args.zeta:
        out["oracle"] = _oracle_summary(rows)
        if not out["oracle"]["ok"]:
            status = EXIT_FLAG
    if args.figure:
        from .plotting import count_histograms

        count_histograms(rows, args.figure, ", ".join(config.systems))
    return out, rows, status


def cmd_verify(args, config: RunConfig):
    if args.theorem != "theorem12":
        raise InputError(f"unknown verification target {args.theorem!r}")
    return cmd_count(args, config, oracles=not args.zeta)


def cmd_semicont(args, config: RunConfig):
    radius = config.params["radius"]
    entries = []
    status = EXIT_OK
    for name in config.systems:
        system = _system(name)
        for index, rc, zeta in iter_samples(system, config.rank_class, config.samples, config.seed):
            probe, halvings = refine_until_clean(
                zeta, parse_rational(radius), config.params["trials"], f"{config.seed}:{name}:{index}"
            )
            clean = probe.violation_count == 0
            status = status if clean else EXIT_FLAG
            entries.append(
                {"family": system.family, "rank": system.rank, "seed_index": index, "rank_zeta": rc,
                 "base": zeta.to_json()["zeta"], "halvings": halvings, "clean": clean, "probe": probe.to_json()}
            )
    return {"config": config.to_json(), "probes": entries}, None, status


def _budget(config: RunConfig) -> SolverBudget:
    return SolverBudget(allow_large=config.allow_large, max_nodes=config.max_nodes)


def cmd_solve(args, config: RunConfig):
    system = _system(config.systems[0])
    if config.command == "f1":
        result = f1_solve(system, _budget(config))
    else:
        result = f2_solve(system, config.mode, _budget(config))
    out = {"config": config.to_json(), "system": system.name, "result": result.to_json()}
    if config.command == "f2":
        out["type2_rules"] = dict(reports.TYPE2_RULES, mode=config.mode)
    status = EXIT_OK if all(result.bounds.values()) else EXIT_FLAG
    if status and config.mode == LITERAL and config.command == "f2":
        # a literal-mode undercut is a finding about the definition, not an alarm
        out["finding"] = "literal-mode value is below 2n - 1"
        status = EXIT_OK
    return out, None, status


def _parse_plane(obj: dict):
    try:
        system = build_root_system(str(obj["family"]).upper(), int(obj["rank"]))
        b1, b2 = ([GaussRational.from_json(x) for x in vec] for vec in obj["basis"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed plane file: {exc}") from None
    return system, b1, b2


def cmd_decomp(args, config: RunConfig):
    if args.plane:
        system, b1, b2 = _parse_plane(config.inputs["plane"])
        planes = [(0, system, b1, b2)]
    else:
        if not config.systems:
            raise InputError("give --plane, or --family and --rank")
        planes = []
        for name in config.systems:
            system = _system(name)
            for i in range(config.samples):
                rng = sample_rng(config.seed, system, 0, i)
                planes.append((i, system, *random_plane(system, rng)))
    entries, status = [], EXIT_OK
    for index, system, b1, b2 in planes:
        try:
            d = induced_decomposition(system, b1, b2)
            entry = {"seed_index": index, "ok": True, "decomposition": d.to_json()}
        except TheoremViolation as exc:
            status = EXIT_FLAG
            entry = {"seed_index": index, "ok": False, "error": str(exc)}
            if isinstance(exc.report, Decomposition):
                entry["decomposition"] = exc.report.to_json()
        entries.append(entry)
    return {"config": config.to_json(), "planes": entries}, None, status


def cmd_validate(args, config: RunConfig):
    obj = config.inputs["witness"]
    if "result" in obj:
        obj = obj["result"]
    if "witness" in obj:
        obj = obj["witness"]
    try:
        d = Decomposition.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed witness file: {exc}") from None
    mode = config.mode if args.mode else d.mode
    problems = validate_decomposition(d, mode)
    out = {"config": config.to_json(), "ok": not problems, "violations": problems, "rank_sum": d.rank_sum}
    return out, None, EXIT_OK if not problems else EXIT_FLAG


COMMANDS = {
    "roots": cmd_roots,
    "count": cmd_count,
    "verify": cmd_verify,
    "semicont": cmd_semicont,
    "f1": cmd_solve,
    "f2": cmd_solve,
    "decomp": cmd_decomp,
    "validate": cmd_validate,
}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["A", "D", "E", "a", "d", "e"])
    common.add_argument("--rank", type=int)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--cache", help="cache directory (default: $TWISTORCOUNT_CACHE)")
    common.add_argument("-v", "--verbose", action="store_true")

    sampled = argparse.ArgumentParser(add_help=False)
    sampled.add_argument("--systems", help="comma-separated list such as A2,A3,D4")
    sampled.add_argument("--rank-class", default="all", choices=["1", "2", "3", "all"])
    sampled.add_argument("--samples", type=int, default=10)
    sampled.add_argument("--seed", type=int, default=0)
    sampled.add_argument("--workers", type=int, default=1)

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--allow-large", action="store_true", help="permit ranks 5 and 6")
    solver.add_argument("--max-nodes", type=int, default=SolverBudget().max_nodes)

    parser = argparse.ArgumentParser(prog="twistorcount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    roots = sub.add_parser("roots", parents=[common], help="build a root system")
    roots.add_argument("action", choices=["build"])

    for name, help_text in (("count", "count curves"), ("verify", "check the counting theorem")):
        p = sub.add_parser(name, parents=[common, sampled], help=help_text)
        if name == "verify":
            p.add_argument("theorem", choices=["theorem12"])
        p.add_argument("--zeta", help="JSON file with one zeta")
        p.add_argument("--figure", help="also write Q1/Q2 histograms to this image file")

    semi = sub.add_parser("semicont", parents=[common, sampled], help="probe semi-continuity of Q1")
    semi.add_argument("--radius", default="1/1000")
    semi.add_argument("--trials", type=int, default=100)

    sub.add_parser("f1", parents=[common, solver], help="solve f1")
    f2 = sub.add_parser("f2", parents=[common, solver], help="solve f2")
    f2.add_argument("--mode", choices=[LITERAL, GEOMETRIC], default=GEOMETRIC)

    decomp = sub.add_parser("decomp", parents=[common, sampled], help="decomposition induced by a plane")
    decomp.add_argument("--plane", help="JSON file with family, rank and a two-vector basis")

    val = sub.add_parser("validate", parents=[common], help="validate a decomposition witness")
    val.add_argument("--witness", required=True)
    val.add_argument("--mode", choices=[LITERAL, GEOMETRIC])
    return parser


def make_config(args) -> RunConfig:
    config = RunConfig(command=args.command, systems=_system_names(args))
    for attr in ("rank_class", "samples", "seed", "mode", "max_nodes", "allow_large"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(config, attr, value)
    for attr in ("zeta", "plane", "witness"):
        path = getattr(args, attr, None)
        if path:
            config.inputs[attr] = _read_json(path)
    if args.command == "semicont":
        parse_rational(args.radius)
        config.params = {"radius": args.radius, "trials": args.trials}
    if args.command == "verify":
        config.params = {"theorem": args.theorem}
    if args.command in ("roots", "f1", "f2") and len(config.systems) != 1:
        raise InputError("give --family and --rank")
    if args.command in ("count", "verify", "semicont", "decomp") and config.samples < 0:
        raise InputError("--samples must be nonnegative")
    if args.format == "csv" and args.command not in ("count", "verify"):
        raise InputError("CSV output is available for count and verify only")
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    started = time.perf_counter()
    try:
        config = make_config(args)
        cache = ResultCache.from_env(args.cache)
        key = config_key({**config.to_json(), "format": args.format})
        cached = cache.get(key) if cache and not getattr(args, "figure", None) else None
        if cached is not None:
            payload = json.loads(cached)
            text, status = payload["text"], payload["status"]
            log.info("cache hit %s", key[:12])
        else:
            out, rows, status = COMMANDS[args.command](args, config)
            text = reports.render_csv(rows) if args.format == "csv" else reports.render_json(out)
            if cache:
                cache.put(key, json.dumps({"status": status, "text": text}, sort_keys=True).encode())
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - started)
    return status


if __name__ == "__main__":
    sys.exit(main())

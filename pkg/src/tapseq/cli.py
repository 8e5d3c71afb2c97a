"""Command-line front end.

Subcommands: ``run`` (one circuit, one mode), ``validate`` (replay a witness
against a circuit) and ``batch`` (one mode over a directory of circuits).
Exit codes follow the model-checking harness convention: 10 when a bug was
found (witness emitted), 0 when no bug was found, 1 on usage errors, 2 on
model or witness errors.

Statistics are printed as ``key=value`` lines on stderr (including elapsed
seconds); ``--stats FILE`` writes the same lines without timing, so repeated
runs with identical settings produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
import time
from pathlib import Path

from .aiger import AigerError, UnsupportedModelError, parse_aiger
from .baselines import BmcConfig, RandConfig, run_bmc, run_rand
from .cnf import to_dimacs
from .engine import BUG, EngineConfig, explicit_oracle, run_tapseq
from .sat import format_proof
from .witness import format_witness, validate_witness

EXIT_BUG = 10
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MODEL = 2

MODES = ("tapseq", "rand", "bmc", "oracle")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES, default="tapseq")
    p.add_argument("--order", choices=("bfs", "dfs"), default="bfs",
                   help="state exploration order (default bfs)")
    p.add_argument("--randomize", action="store_true",
                   help="random phase for every 10th solver decision")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=40_000,
                   help="visited-state budget (default 40000)")
    p.add_argument("--max-tries", type=int, default=10_000,
                   help="random walk restarts (default 10000)")
    p.add_argument("--max-length", type=int, default=100,
                   help="random walk length (default 100)")
    p.add_argument("--max-depth", type=int, default=100,
                   help="BMC unrolling bound (default 100)")
    p.add_argument("--time-limit", type=float, default=180.0, metavar="SECONDS")
    p.add_argument("--property-index", type=int, default=0,
                   help="which bad/output literal to check (default 0)")
    p.add_argument("--no-trim", action="store_true",
                   help="encode full proofs instead of the empty-clause cone")


def _build_parser() -> _Parser:
    parser = _Parser(prog="tapseq", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="hunt for a property violation in one circuit")
    run.add_argument("circuit", type=Path)
    _add_run_options(run)
    run.add_argument("--witness", type=Path, metavar="FILE",
                     help="write the witness here instead of stdout")
    run.add_argument("--stats", type=Path, metavar="FILE",
                     help="write deterministic key=value statistics")
    run.add_argument("--dump-cnf", type=Path, metavar="FILE",
                     help="append each step formula in DIMACS")
    run.add_argument("--dump-points", type=Path, metavar="FILE",
                     help="append each boundary point found")
    run.add_argument("--dump-proofs", type=Path, metavar="FILE",
                     help="append each resolution proof encoded")

    val = sub.add_parser("validate", help="replay a witness by simulation")
    val.add_argument("circuit", type=Path)
    val.add_argument("witness", type=Path)

    batch = sub.add_parser("batch", help="run one mode over a directory of circuits")
    batch.add_argument("directory", type=Path)
    _add_run_options(batch)
    batch.add_argument("--csv", type=Path, metavar="FILE",
                       help="write per-circuit result rows")
    return parser


def _load_model(path: Path, property_index: int):
    data = path.read_bytes()
    return parse_aiger(data, property_index=property_index)


def _run_mode(m, args, dumps=None):
    """Dispatch one mode; returns (verdict-ish kind, counterexample, stat items)."""
    dumps = dumps or {}
    if args.mode == "tapseq":
        cfg = EngineConfig(max_states=args.max_states, time_limit_s=args.time_limit,
                           order=args.order, randomize=args.randomize, seed=args.seed,
                           trim_proofs=not args.no_trim)
        verdict = run_tapseq(m, cfg, **dumps)
        return verdict.kind, verdict.reason, verdict.counterexample, verdict.stats
    if args.mode == "rand":
        cfg = RandConfig(max_tries=args.max_tries, max_length=args.max_length,
                         seed=args.seed, time_limit_s=args.time_limit)
        verdict = run_rand(m, cfg)
        return verdict.kind, verdict.reason, verdict.counterexample, verdict.stats
    if args.mode == "bmc":
        cfg = BmcConfig(max_depth=args.max_depth, time_limit_s=args.time_limit)
        verdict = run_bmc(m, cfg)
        return verdict.kind, verdict.reason, verdict.counterexample, verdict.stats
    result = explicit_oracle(m, max_states=args.max_states)
    kind = BUG if result.status == "reachable" else result.status
    stats = {"depth": result.depth if result.depth is not None else "-",
             "states": result.states_explored}
    return kind, None, result.counterexample, stats


def _stat_items(kind, reason, stats, cex) -> list[tuple[str, str]]:
    items = [("verdict", kind)]
    if reason:
        items.append(("reason", reason))
    if dataclasses.is_dataclass(stats):
        pairs = dataclasses.asdict(stats).items()
    else:
        pairs = stats.items()
    items.extend((k, str(v)) for k, v in pairs)
    if cex is not None:
        items.append(("cex_length", str(len(cex.states))))
    return items


def _emit_stats(items, seconds, stats_path) -> None:
    for key, value in items:
        sys.stderr.write(f"{key}={value}\n")
    sys.stderr.write(f"seconds={seconds:.2f}\n")
    if stats_path is not None:
        stats_path.write_text("".join(f"{k}={v}\n" for k, v in items))


def _open_dumps(args):
    """Observation hooks for the engine, appending to the dump files."""
    dumps = {}
    if args.dump_cnf is not None:
        handle = open(args.dump_cnf, "a")

        def dump_cnf(index, f, _h=handle):
            _h.write(to_dimacs(f, comments=(f"formula {index}",)))
        dumps["dump_cnf"] = dump_cnf
    if args.dump_points is not None:
        handle = open(args.dump_points, "a")

        def dump_points(index, bp, _step, _h=handle):
            lits = " ".join(str(v if bp.point.value(v) else -v)
                            for v in range(1, len(bp.point.values) + 1))
            _h.write(f"formula={index} pivot={bp.pivot} {lits} 0\n")
        dumps["dump_points"] = dump_points
    if args.dump_proofs is not None:
        handle = open(args.dump_proofs, "a")

        def dump_proof(index, proof, _h=handle):
            _h.write(f"c proof {index}\n")
            _h.write(format_proof(proof))
        dumps["dump_proofs"] = dump_proof
    return dumps


def _cmd_run(args) -> int:
    try:
        m = _load_model(args.circuit, args.property_index)
    except (AigerError, UnsupportedModelError, ValueError, OSError) as e:
        sys.stderr.write(f"model error: {e}\n")
        return EXIT_MODEL
    dumps = _open_dumps(args)
    engine_dumps = {k: v for k, v in dumps.items() if k != "dump_proofs"}
    if "dump_proofs" in dumps:
        engine_dumps["dump_proof"] = dumps["dump_proofs"]
    start = time.monotonic()
    kind, reason, cex, stats = _run_mode(m, args, engine_dumps if args.mode == "tapseq" else {})
    seconds = time.monotonic() - start
    _emit_stats(_stat_items(kind, reason, stats, cex), seconds, args.stats)
    if kind == BUG:
        text = format_witness(cex, m)
        if args.witness is not None:
            args.witness.write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_BUG
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        ok, diagnostic = validate_witness(str(args.circuit), str(args.witness))
    except (AigerError, UnsupportedModelError, OSError) as e:
        sys.stderr.write(f"model error: {e}\n")
        return EXIT_MODEL
    if ok:
        print("witness is valid")
        return EXIT_OK
    print(f"witness is INVALID: {diagnostic}")
    return EXIT_MODEL


def _cmd_batch(args) -> int:
    circuits = sorted(p for p in args.directory.iterdir()
                      if p.suffix in (".aag", ".aig"))
    if not circuits:
        sys.stderr.write(f"no .aag/.aig files in {args.directory}\n")
        return EXIT_USAGE
    rows = []
    any_bug = False
    for path in circuits:
        try:
            m = _load_model(path, args.property_index)
        except (AigerError, UnsupportedModelError, ValueError, OSError) as e:
            rows.append((path.name, args.mode, f"error: {e}", "-", "-", "0.00"))
            continue
        start = time.monotonic()
        kind, _reason, cex, stats = _run_mode(m, args)
        seconds = time.monotonic() - start
        any_bug = any_bug or kind == BUG
        states = getattr(stats, "states", None)
        if states is None and isinstance(stats, dict):
            states = stats.get("states", "-")
        cex_length = len(cex.states) if cex is not None else "-"
        rows.append((path.name, args.mode, kind, str(states), str(cex_length),
                     f"{seconds:.2f}"))
    header = ("name", "mode", "verdict", "states", "cex_length", "seconds")
    widths = [max(len(str(row[i])) for row in rows + [header]) for i in range(len(header))]
    for row in [header] + rows:
        print("  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip())
    if args.csv is not None:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    return EXIT_BUG if any_bug else EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_batch(args)


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line entry point.

Exit codes: 0 when the run succeeds, 1 when the verdict differs from ``--expect``
(or is ``fail`` without it) or the fuzz check fails, 2 for configuration and input errors.
"""

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

from pydantic import ValidationError

from hvtorus import __version__
from hvtorus.config import (
    Command,
    ExperimentName,
    OutputFormat,
    RunConfig,
    load_config,
)
from hvtorus.constructions import build
from hvtorus.errors import HvtorusError
from hvtorus.experiments import (
    FAIL,
    PASS,
    decomposition_check,
    ghw_scan,
    growth_experiment,
    heisenberg_irreducibility_probe,
    stabilization_experiment,
    support_properties_check,
    uniform_bound_check,
    witness_family_rank,
)
from hvtorus.gradmod import Truncation, dimension_table
from hvtorus.hvr2 import (
    BracketFn,
    LieElement,
    bracket,
    format_element,
    jacobi_defect,
    parse_element,
    symbol_pool,
)
from hvtorus.runtime import configure_logging

logger = logging.getLogger(__name__)

CSV_HEADER = ("setting", "offset_b1", "offset_b2", "dim")
Row = Tuple[int, int, int, int]


# ==================== Commands ====================


def cmd_bracket(left: str, right: str) -> str:
    """Bracket of two parsed elements, rendered in canonical term order."""
    return format_element(bracket(parse_element(left), parse_element(right)))


class FuzzResult(NamedTuple):
    passed: bool
    trials: int
    witness: Optional[Dict[str, str]] = None

    def to_json(self) -> Dict[str, Any]:
        return {"passed": self.passed, "trials": self.trials, "witness": self.witness}


def cmd_jacobi_fuzz(
    window: int, trials: int, seed: int = 0, bracket_fn: BracketFn = bracket
) -> FuzzResult:
    """
    Check antisymmetry and the Jacobi identity on random basis-symbol triples.

    Triples are drawn uniformly from the symbols with coordinates in
    ``[-window, window]^2``; the same seed draws the same triples.

    Raises:
        ValueError: If ``trials < 1``
    """
    if trials < 1:
        raise ValueError(f"jacobi-fuzz needs trials >= 1, got {trials}")
    pool = symbol_pool(window)
    rng = random.Random(seed)
    for done in range(1, trials + 1):
        x, y, z = (LieElement.of(rng.choice(pool)) for _ in range(3))
        swapped = bracket_fn(x, y) + bracket_fn(y, x)
        if swapped:
            witness = {"check": "antisymmetry", "x": str(x), "y": str(y), "defect": str(swapped)}
            return FuzzResult(False, done, witness)
        defect = jacobi_defect(x, y, z, bracket_fn)
        if defect:
            witness = {"check": "jacobi", "x": str(x), "y": str(y), "z": str(z), "defect": str(defect)}
            return FuzzResult(False, done, witness)
    logger.info("jacobi fuzz: %d trials passed (window %d, seed %d)", trials, window, seed)
    return FuzzResult(True, trials)


class Artifact(NamedTuple):
    payload: Dict[str, Any]
    rows: Optional[List[Row]]
    verdict: Optional[str] = None


def cmd_dims(config: RunConfig) -> Artifact:
    """Dimension table of the configured construction."""
    descriptor = config.construction
    assert descriptor is not None
    module = build(descriptor)
    table = dimension_table(module)
    setting = descriptor.truncation.window
    payload = {
        "config_digest": config.digest(),
        "construction": descriptor.construction.value,
        "module": module.name,
        "table": table.to_json(),
    }
    return Artifact(payload, [(setting,) + row for row in table.rows()])


def _probe_level(config: RunConfig) -> Fraction:
    d = config.construction
    assert d is not None
    if d.a is not None:
        return d.a
    if d.c is not None:
        return d.c[0]
    return Fraction(0)


def cmd_experiment(config: RunConfig) -> Artifact:
    """
    Run the configured experiment.

    Raises:
        CaseMismatchError: When the parameters fall outside the experiment's case
    """
    exp = config.experiment
    digest = config.digest()
    payload: Dict[str, Any] = {"config_digest": digest, "experiment": exp.value if exp else None}
    rows: Optional[List[Row]] = None

    if exp is ExperimentName.STABILIZATION:
        assert config.rho is not None and config.sweep is not None
        report = stabilization_experiment(config.rho, config.basis, config.levels, config.sweep)
        payload["report"], verdict, rows = report.to_json(), report.verdict, report.rows()
    elif exp is ExperimentName.GROWTH:
        assert config.c is not None and config.sweep is not None
        report = growth_experiment(config.c, config.epsilon, config.basis, config.sweep)
        payload["report"], verdict, rows = report.to_json(), report.verdict, report.rows()
    elif exp is ExperimentName.WITNESS_RANK:
        assert config.n is not None
        c = config.c or (Fraction(0), Fraction(1), Fraction(0), Fraction(0))
        r = witness_family_rank(config.window, config.n, c, config.epsilon, config.basis)
        payload["report"] = {"window": config.window, "n": config.n, "rank": r}
        verdict = PASS if r == config.n else FAIL
    elif exp is ExperimentName.DECOMPOSITION:
        assert config.rho is not None
        trunc = Truncation(depth=config.depth, window=config.window)
        decomposition = decomposition_check(config.rho, config.basis, trunc)
        payload["report"], verdict = decomposition.to_json(), decomposition.verdict
        rows = decomposition.rows()
    else:
        assert config.construction is not None
        module = build(config.construction)
        if exp is ExperimentName.HEISENBERG_PROBE:
            ok = heisenberg_irreducibility_probe(module, _probe_level(config))
            payload["report"], verdict = {"irreducible": ok}, PASS if ok else FAIL
        elif exp is ExperimentName.SUPPORT:
            support_report = support_properties_check(module, config.basis)
            payload["report"], verdict = support_report.to_json(), support_report.verdict
        elif exp is ExperimentName.GHW_SCAN:
            hits = ghw_scan(module, config.bases)
            payload["report"] = {
                "hits": [{"key": list(h.key), "basis": h.basis.to_json(), "dim": h.dim} for h in hits]
            }
            verdict = PASS if hits else FAIL
        else:
            bound_rows = uniform_bound_check(module)
            payload["report"] = {
                "rows": [
                    {"key": list(r.key), "dim": r.dim, "bound": r.bound, "holds": r.holds}
                    for r in bound_rows
                ]
            }
            verdict = PASS if all(r.holds for r in bound_rows) else FAIL
    payload["verdict"] = verdict
    return Artifact(payload, rows, verdict)


# ==================== Output ====================


def render(artifact: Artifact, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return json.dumps(artifact.payload, sort_keys=True, indent=2) + "\n"
    if artifact.rows is None:
        raise ValueError("csv output is only available for dimension tables and sweeps")
    buffer = io.StringIO()
    buffer.write(f"# config_digest: {artifact.payload['config_digest']}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(artifact.rows)
    return buffer.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename over the target."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("wrote %s", path)


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


# ==================== Argument parsing ====================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvtorus",
        description="Truncated weight modules of the rank-two Heisenberg-Virasoro algebra.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bracket", help="Bracket two elements, e.g. 't[1,0]' 'E[0,1]'")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("jacobi-fuzz", help="Check Jacobi on random symbol triples")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)

    for name, help_text in (
        ("dims", "Write the dimension table of a construction"),
        ("experiment", "Run an experiment and write its report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
        p.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
        if name == "experiment":
            p.add_argument(
                "--expect",
                choices=["stabilized", "growing", "inconclusive", PASS, FAIL],
                default=None,
                help="Exit 1 unless the verdict matches",
            )
    return parser


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{args.config} must hold a JSON object")
    data.setdefault("command", args.command)
    if data["command"] != args.command:
        raise ValueError(f"config is for '{data['command']}', not '{args.command}'")
    output = dict(data.get("output") or {})
    if args.out is not None:
        output["path"] = str(args.out)
    if args.format is not None:
        output["format"] = args.format
    data["output"] = output
    return load_config(data)


def run(args: argparse.Namespace) -> int:
    command = Command(args.command)
    if command is Command.BRACKET:
        print(cmd_bracket(args.left, args.right))
        return 0
    if command is Command.JACOBI_FUZZ:
        result = cmd_jacobi_fuzz(args.window, args.trials, args.seed)
        if args.out is not None:
            write_atomic(args.out, json.dumps(result.to_json(), sort_keys=True, indent=2) + "\n")
        if result.passed:
            print(f"pass ({result.trials} trials)")
            return 0
        print(f"fail after {result.trials} trials: {json.dumps(result.witness, sort_keys=True)}")
        return 1

    config = _load_run_config(args)
    artifact = cmd_dims(config) if command is Command.DIMS else cmd_experiment(config)
    emit(render(artifact, config.output.format), config.output.path)
    expect = getattr(args, "expect", None)
    if expect is None:
        if artifact.verdict == FAIL:
            print("verdict 'fail'", file=sys.stderr)
            return 1
        return 0
    if artifact.verdict != expect:
        print(f"verdict {artifact.verdict!r} does not match expected {expect!r}", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(verbose=args.verbose)
        return run(args)
    except ValidationError as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
    except (HvtorusError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())

"""``weylcap`` command-line front end.

Exit codes: 0 success, 2 parse/usage, 3 validation, 4 no proven formula,
5 dimension guard, 6 inequality margin violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import additivity_report, capacity_deformed, capacity_qc, dpi_batch, prop1_verify
from .errors import (
    FormulaNotApplicableError,
    MarginViolationError,
    NotADeformationError,
    ResourceGuardError,
    ValidationError,
)
from .io import SpecParseError, digest, load_spec, spec_to_dict, to_jsonable
from .linalg import random_density_matrix
from .majorization import tensor_block_bound
from .optimizer import OptimizerConfig, min_output_entropy, min_output_entropy_closed_form
from .weyl import (
    MAX_TENSOR_DIM,
    WeylChannelSpec,
    check_invariance,
    check_tensor_dim,
    check_weyl_covariance,
    deformation_certificate,
    is_qc_spec,
    marginals,
    prob_vector,
    qutrit_example_spec,
)

log = logging.getLogger("weylcap")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NO_FORMULA = 4
EXIT_GUARD = 5
EXIT_MARGIN = 6

CSV_COLUMNS = ["label", "n", "N", "scaled_single", "numeric_min", "block_bound", "gap_numeric", "gap_bound", "seed"]


class UsageError(Exception):
    pass


def _base_arg(value: str) -> str:
    if value in ("2", "bits"):
        return "2"
    if value in ("nat", "e", "nats"):
        return "nat"
    raise argparse.ArgumentTypeError("base must be 2 or nat")


def _positive_int(value: str) -> int:
    try:
        v = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _lib_base(base: str):
    return 2 if base == "2" else "e"


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed, threads=args.threads)


def _report(command: str, args, inputs: dict, results: dict) -> dict:
    return {
        "command": command,
        "inputs_digest": digest({"command": command, **inputs}),
        "base": args.base,
        "seed": args.seed,
        "tool_version": __version__,
        "results": to_jsonable(results),
    }


# -- commands ----------------------------------------------------------------


def describe(spec: WeylChannelSpec, seed: int) -> dict:
    cert = deformation_certificate(spec)
    rho = random_density_matrix(spec.n, seed)
    covariance = max(check_weyl_covariance(spec, rho, a, b) for a in range(spec.n) for b in range(spec.n))
    return {
        "spec": spec_to_dict(spec),
        "marginals": marginals(spec),
        "deformation_certificate": {
            "ordered": cert.ordered,
            "violation_index": cert.violation_index,
            "violation_entries": cert.violation_entries,
        },
        "is_qc": is_qc_spec(spec),
        "invariance_residual": check_invariance(spec, rho),
        "weyl_covariance_residual": covariance,
    }


def capacity(spec: WeylChannelSpec, base, formula: str = "auto"):
    if formula in ("auto", "deformed"):
        try:
            return capacity_deformed(spec, base)
        except NotADeformationError:
            if formula == "deformed":
                raise FormulaNotApplicableError("pi does not satisfy the descending chain") from None
    if is_qc_spec(spec):
        return capacity_qc(spec.pi.sum(axis=0), base)
    raise FormulaNotApplicableError(
        "no proven capacity formula: pi neither satisfies the descending chain nor has constant rows"
    )


def min_entropy(spec: WeylChannelSpec, N: int, config: OptimizerConfig, base) -> dict:
    check_tensor_dim(spec.n, N, MAX_TENSOR_DIM)
    result = min_output_entropy(spec, N, config, base)
    out = {
        "N": N,
        "entropy": result,
        "block_bound": tensor_block_bound(spec, N, base),
        "optimizer_config": config,
    }
    if deformation_certificate(spec).ordered:
        out["closed_form"] = min_output_entropy_closed_form(spec, N, base)
    return out


def _cmd_describe(args) -> dict:
    spec = load_spec(args.spec)
    return _report("describe", args, {"spec": spec_to_dict(spec), "seed": args.seed}, describe(spec, args.seed))


def _cmd_capacity(args) -> dict:
    spec = load_spec(args.spec)
    rep = capacity(spec, _lib_base(args.base), args.formula)
    inputs = {"spec": spec_to_dict(spec), "base": args.base, "formula": args.formula}
    return _report("capacity", args, inputs, rep)


def _cmd_min_entropy(args) -> dict:
    spec = load_spec(args.spec)
    cfg = _config(args)
    results = min_entropy(spec, args.N, cfg, _lib_base(args.base))
    inputs = {"spec": spec_to_dict(spec), "N": args.N, "config": cfg.digest(), "base": args.base}
    return _report("min-entropy", args, inputs, results)


def _cmd_additivity(args) -> dict:
    spec = load_spec(args.spec)
    cfg = _config(args)
    rep = additivity_report(spec, args.N, cfg, _lib_base(args.base))
    if args.csv:
        _append_csv(Path(args.csv), spec, rep, args.seed)
    inputs = {"spec": spec_to_dict(spec), "N": args.N, "config": cfg.digest(), "base": args.base}
    return _report("additivity", args, inputs, rep)


def _append_csv(path: Path, spec: WeylChannelSpec, rep, seed: int) -> None:
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(CSV_COLUMNS)
        writer.writerow(
            [
                spec.label or "",
                spec.n,
                rep.N,
                repr(rep.scaled_single),
                repr(rep.numeric_min_at_N),
                repr(rep.block_bound_at_N),
                repr(rep.gap_numeric),
                repr(rep.gap_bound),
                seed,
            ]
        )


def _parse_p(text: str) -> np.ndarray:
    try:
        values = [float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse --p {text!r}: {exc}") from exc
    return prob_vector(values)


def _cmd_verify(args) -> dict:
    if args.p is not None and args.spec is not None:
        raise UsageError("give either a spec file or --p, not both")
    if args.p is not None:
        p = _parse_p(args.p)
        source = {"p": p}
    elif args.spec is not None:
        spec = load_spec(args.spec)
        p = marginals(spec)
        source = {"spec": spec_to_dict(spec)}
    else:
        raise UsageError("verify needs a spec file or --p")
    base = _lib_base(args.base)
    prop1 = prop1_verify(p, args.samples, args.kdim, args.seed, base, strict=False)
    dpi = dpi_batch(args.dpi_samples, p.size, args.seed, base, strict=False)
    results = {"prop1": prop1, "dpi": dpi}
    inputs = {**source, "samples": args.samples, "kdim": args.kdim, "dpi_samples": args.dpi_samples, "base": args.base}
    report = _report("verify", args, inputs, results)
    worst = min(prop1.min_margin, prop1.min_dpi_margin, dpi.min_margin)
    if worst < -1e-8:
        raise MarginViolationError(f"inequality margin {worst:.3e} below -1e-8", {"report": report})
    return report


def example_qutrit(config: OptimizerConfig, base, seed: int = 0) -> dict:
    spec = qutrit_example_spec()
    return {
        "describe": describe(spec, seed),
        "capacity": capacity(spec, base, "deformed"),
        "min_entropy_N1": min_entropy(spec, 1, config, base),
        "min_entropy_N2": min_entropy(spec, 2, config, base),
        "additivity_N2": additivity_report(spec, 2, config, base),
    }


def _cmd_example_qutrit(args) -> dict:
    cfg = _config(args)
    results = example_qutrit(cfg, _lib_base(args.base), args.seed)
    inputs = {"spec": spec_to_dict(qutrit_example_spec()), "config": cfg.digest(), "base": args.base}
    return _report("example-qutrit", args, inputs, results)


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", type=_base_arg, default="2", help="logarithm base: 2 (bits) or nat")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--N", type=_positive_int, default=1, help="number of channel copies")
    opt.add_argument("--restarts", type=_positive_int, default=64)
    opt.add_argument("--threads", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="weylcap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", parents=[common], help="marginals, chain certificate, residuals")
    p.add_argument("spec")
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("capacity", parents=[common], help="closed-form classical capacity")
    p.add_argument("spec")
    p.add_argument("--formula", choices=["auto", "qc", "deformed"], default="auto")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("min-entropy", parents=[common, opt], help="numeric minimal output entropy")
    p.add_argument("spec")
    p.set_defaults(func=_cmd_min_entropy)

    p = sub.add_parser("additivity", parents=[common, opt], help="N-copy additivity bracket")
    p.add_argument("spec")
    p.add_argument("--csv", default=None, help="append a summary row to this CSV file")
    p.set_defaults(func=_cmd_additivity)

    p = sub.add_parser("verify", parents=[common], help="check the q-c lower bound and data processing")
    p.add_argument("spec", nargs="?")
    p.add_argument("--p", default=None, help="comma-separated distribution, fractions allowed")
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--kdim", type=_positive_int, default=2)
    p.add_argument("--dpi-samples", type=_positive_int, default=200)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("example-qutrit", parents=[common], help="the worked qutrit deformation")
    p.add_argument("--restarts", type=_positive_int, default=64)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.set_defaults(func=_cmd_example_qutrit)
    return parser


def _write(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    # diagnostics are plain text on stderr, never colored, so NO_COLOR holds trivially
    logging.basicConfig(level=logging.WARNING, format="weylcap: %(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except (SpecParseError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except FormulaNotApplicableError as exc:
        log.error("%s", exc)
        return EXIT_NO_FORMULA
    except ResourceGuardError as exc:
        log.error("%s", exc)
        return EXIT_GUARD
    except MarginViolationError as exc:
        log.error("%s", exc)
        log.error("diagnostics: %s", json.dumps(to_jsonable(exc.diagnostics), default=str))
        return EXIT_MARGIN
    except (ValidationError, NotADeformationError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    _write(report, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end emitting machine-readable JSON reports.

Every subcommand prints a single JSON document on standard output and
diagnostics on standard error.  Exit codes: 0 success, 2 malformed input,
3 property violation under ``--assert``.  Reports echo the tool version
and every seed and tolerance used, and identical inputs with identical
seeds produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import SchurKitError
from .linmaps import map_from_json, map_to_json
from .matrices import matrix_from_json, spectral_norm
from .multiplier import multiplier_norm, triangular_truncation_symbol
from .structure import (
    NotCanonical,
    analysis_report,
    classify_contraction,
    is_schur_multiplicative,
    is_schur_null_preserving,
    row_column_deletion_map,
)
from .truncation import (
    pointwise_convergence_check,
    rearrangement_growth_probe,
    scheme_from_json,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_ASSERT_FAILED = 3

SQRT2 = float(np.sqrt(2.0))


class AssertionFailed(Exception):
    """A --assert run detected a property violation."""


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchurKitError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchurKitError(f"{path} is not valid JSON: {exc}") from exc


def _meta(**extra) -> dict:
    meta = {"tool": "schurkit", "version": __version__}
    meta.update(extra)
    return meta


def _parse_levels(spec: str) -> list[int]:
    try:
        levels = [int(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise SchurKitError(f"bad levels {spec!r}: {exc}") from exc
    if not levels:
        raise SchurKitError("levels must not be empty")
    return levels


def _parse_probes(spec: str) -> list[tuple[int, int]]:
    probes = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise SchurKitError(f"bad probe {chunk!r}, expected 'i,j'")
        probes.append((int(parts[0]), int(parts[1])))
    if not probes:
        raise SchurKitError("no probes given")
    return probes


def _cmd_analyze(args) -> dict:
    t_map = map_from_json(_load_json(args.map))
    report = analysis_report(t_map, trials=args.trials, seed=args.seed)
    report.update(_meta())
    if args.assert_:
        form = report["canonical_form"]
        if form is not None and form["form"] == "conjugation":
            if report["isometry_max_dev"] > 1e-10:
                raise AssertionFailed(
                    f"conjugation form with isometry deviation {report['isometry_max_dev']:.3e}"
                )
        if report["witness"] is not None:
            _check_witness(t_map, report["witness"])
        if report["multiplicative"] and not report["null_preserving"]:
            raise AssertionFailed("multiplicative map failed the null-preservation check")
    return report


def _check_witness(t_map, witness_json) -> None:
    probe = matrix_from_json(witness_json["input"])
    norm_in = spectral_norm(probe)
    ratio = spectral_norm(t_map.apply(probe))
    if abs(norm_in - 1.0) > 1e-12:
        raise AssertionFailed(f"witness input norm {norm_in} is not 1")
    if ratio < SQRT2 - 1e-9:
        raise AssertionFailed(f"witness ratio {ratio} below sqrt(2)")
    if abs(ratio - witness_json["ratio"]) > 1e-9:
        raise AssertionFailed("stored witness ratio does not recompute")


def _cmd_classify(args) -> dict:
    t_map = map_from_json(_load_json(args.map))
    form = classify_contraction(t_map)
    report = {"canonical_form": form.to_json(), **_meta()}
    if args.assert_:
        if isinstance(form, NotCanonical):
            _check_witness(t_map, form.witness.to_json())
        else:
            rebuilt = form.to_map()
            if not np.allclose(rebuilt.images, t_map.images, atol=1e-12):
                raise AssertionFailed("reconstruction does not reproduce the map")
    return report


def _cmd_witness(args) -> dict:
    t_map = map_from_json(_load_json(args.map))
    form = classify_contraction(t_map)
    witness = form.witness.to_json() if isinstance(form, NotCanonical) else None
    report = {"witness": witness, **_meta()}
    if args.assert_ and witness is not None:
        _check_witness(t_map, witness)
    return report


def _cmd_norm(args) -> dict:
    psi = matrix_from_json(_load_json(args.symbol))
    est = multiplier_norm(psi, tol=args.tol, seed=args.seed, trials=args.trials)
    report = {**est.to_json(), **_meta()}
    sup = float(np.abs(psi).max())
    op = spectral_norm(psi)
    report["max_abs_entry"] = sup
    report["spectral_norm"] = op
    if args.assert_:
        slack = 1e-8 * max(1.0, float(np.linalg.norm(psi)))
        if not (sup <= est.lower + slack <= est.upper + 2 * slack <= op + 3 * slack):
            raise AssertionFailed(
                f"sandwich violated: {sup} <= {est.lower} <= {est.upper} <= {op}"
            )
        if est.budget_exceeded:
            raise AssertionFailed("iteration budget exceeded before bracket closed")
    return report


def _cmd_triangular(args) -> dict:
    levels = _parse_levels(args.levels)
    rows = []
    for n in levels:
        est = multiplier_norm(
            triangular_truncation_symbol(n), tol=args.tol, seed=args.seed
        )
        rows.append(
            {
                "n": n,
                "lower": est.lower,
                "upper": est.upper,
                "midpoint": 0.5 * (est.lower + est.upper),
                "iterations": est.iterations,
                "budget_exceeded": est.budget_exceeded,
            }
        )
    report = {
        "levels": rows,
        "tol": float(args.tol),
        "seed": int(args.seed),
        **_meta(),
    }
    if args.assert_:
        mids = [r["midpoint"] for r in rows]
        if any(b - a < 0.02 for a, b in zip(mids, mids[1:])):
            raise AssertionFailed(f"midpoints {mids} do not increase by 0.02")
    return report


def _cmd_converge(args) -> dict:
    scheme = scheme_from_json(_load_json(args.scheme))
    a = matrix_from_json(_load_json(args.input))
    probes = _parse_probes(args.probes)
    reports = pointwise_convergence_check(scheme, a, probes)
    report = {"probes": reports, **_meta()}
    if args.assert_:
        for entry in reports:
            if entry["stabilized_at"] is None or (
                entry["cover_level"] is not None
                and entry["stabilized_at"] > entry["cover_level"]
            ):
                raise AssertionFailed(
                    f"probe {entry['probe']} did not stabilize by its covering level"
                )
    return report


def _cmd_probe_growth(args) -> dict:
    levels = _parse_levels(args.levels)
    ratios = rearrangement_growth_probe(levels)
    report = {
        "ratios": [{"n": n, "ratio": r} for n, r in ratios],
        **_meta(),
    }
    if args.assert_:
        for n, r in ratios:
            if abs(r - float(np.sqrt(n))) > 1e-12:
                raise AssertionFailed(f"ratio at n={n} is {r}, expected sqrt(n)")
    return report


def _cmd_example(args) -> dict:
    t_map = row_column_deletion_map(args.n)
    report = {
        "map": map_to_json(t_map),
        "analysis": analysis_report(t_map, trials=args.trials, seed=args.seed),
        **_meta(),
    }
    if args.assert_:
        if not is_schur_multiplicative(t_map) or not is_schur_null_preserving(t_map):
            raise AssertionFailed("example map must be multiplicative")
        if t_map.is_injective():
            raise AssertionFailed("example map must not be injective")
        if t_map.rank() != args.n * args.n:
            raise AssertionFailed("example map must be surjective")
    return report


def _add_common(sub, *, seed=True, trials=None, tol=None):
    sub.add_argument("--assert", dest="assert_", action="store_true",
                     help="exit 3 if the report violates its documented properties")
    if seed:
        sub.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    if trials is not None:
        sub.add_argument("--trials", type=int, default=trials,
                         help=f"number of random probes (default {trials})")
    if tol is not None:
        sub.add_argument("--tol", type=float, default=tol,
                         help=f"bracket tolerance (default {tol})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schurkit",
        description="Structure analysis of Schur-product preservers and "
        "certified Schur multiplier norms.",
    )
    parser.add_argument("--version", action="version", version=f"schurkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full structure report for a map file")
    p.add_argument("map", help="path to a map JSON file")
    _add_common(p, trials=100)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("classify", help="canonical form of a multiplicative bijection")
    p.add_argument("map", help="path to a map JSON file")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("witness", help="non-contraction witness of a map, if any")
    p.add_argument("map", help="path to a map JSON file")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("norm", help="certified multiplier norm bracket for a symbol")
    p.add_argument("symbol", help="path to a matrix JSON file")
    _add_common(p, trials=8, tol=1e-3)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("triangular", help="norm brackets of triangular truncations")
    p.add_argument("--levels", default="2,4,8,16", help="comma-separated sizes")
    _add_common(p, tol=1e-3)
    p.set_defaults(func=_cmd_triangular)

    p = sub.add_parser("converge", help="pointwise convergence report for a scheme")
    p.add_argument("scheme", help="path to a scheme JSON file")
    p.add_argument("--input", required=True, help="path to the input matrix JSON")
    p.add_argument("--probes", required=True, help="semicolon-separated 'i,j' entries")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("probe-growth", help="rearrangement norm growth ratios")
    p.add_argument("--levels", default="4,16,64", help="comma-separated sizes")
    _add_common(p, seed=False)
    p.set_defaults(func=_cmd_probe_growth)

    p = sub.add_parser("example", help="built-in non-injective multiplicative example")
    p.add_argument("--n", type=int, default=2, help="destination size (default 2)")
    _add_common(p, trials=100)
    p.set_defaults(func=_cmd_example)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except AssertionFailed as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT_FAILED
    except SchurKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    _emit(report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

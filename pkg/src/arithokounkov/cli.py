"""Command line driver.

Exit codes: 0 success, 1 an inequality violation in ``verify-filtration``,
2 configuration error, 3 enumeration budget exhausted (partial outputs are
still written).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .filtration import CSV_COLUMNS, rows_to_csv, run_suite
from .normed_module import DEFAULT_BUDGET, BudgetExceeded
from .number_ring import FieldError, make_field
from .okounkov import (bc_incidence, bc_volume_report, counting_limit_report, main_identity_report,
                       polygon_svg)
from .reals import rel_diff
from .surface_model import BoxWeights, SurfaceBundle
from .valuation import FlagData, GenericFlag, ValuationError

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_TOLERANCES = {
    "area_vs_count": 0.10,
    "count_vs_volume": 0.25,
    "finite_vs_lambda": 0.10,
    "archimedean_vs_volume": 0.25,
}


class ConfigError(ValueError):
    pass


def _point(text):
    text = str(text).strip().lower()
    if text in ("inf", "infinity", "oo"):
        return "inf"
    return int(text)


def _generic(text):
    text = str(text).strip().lower()
    if text in ("inf", "infinity", "oo"):
        return "inf"
    return Fraction(text)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arithokounkov", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file; its keys override the flags")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="candidate budget per enumeration (default %(default)s)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes/threads (default: all cores)")
        p.add_argument("--json", dest="json_out", help="write the report here (default stdout)")

    vf = sub.add_parser(
        "verify-filtration", help="randomized filtration-inequality suite",
        description="Rows are written as CSV with columns: " + ", ".join(CSV_COLUMNS)
        + ".  minimal_C is the least C for which both inequalities hold on that row;"
        " margins are h0 - lower and upper - h0; normalizer is r0 log r0 + r0.")
    common(vf)
    vf.add_argument("--field", action="append", default=None,
                    help='field descriptor, e.g. Q or "Q(sqrt(-1))"; repeatable')
    vf.add_argument("--instances", type=int, default=200)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--radius-scale", default="1", help="multiplies every module weight")
    vf.add_argument("--C", dest="C", default=None, help="check at this C instead of the fitted one")
    vf.add_argument("--csv", help="per-instance rows (default: <json stem>.csv or filtration.csv)")

    bd = sub.add_parser("body", help="Okounkov body of a surface bundle")
    common(bd)
    bd.add_argument("--bundle", default="box:1,1", help='"box:b0,...,bm" or "fs:lambda"')
    bd.add_argument("--level", type=int, default=1, help="level of an FS bundle")
    bd.add_argument("--p", type=int, default=2)
    bd.add_argument("--point", default="0", help="residue a or inf")
    bd.add_argument("--kmax", type=int, default=10)
    bd.add_argument("--method", default="auto", choices=["auto", "scan", "structural"])
    bd.add_argument("--svg", help="write the hull of Lambda as SVG")
    bd.add_argument("--tol-area-count", type=float, default=DEFAULT_TOLERANCES["area_vs_count"])
    bd.add_argument("--tol-count-volume", type=float, default=DEFAULT_TOLERANCES["count_vs_volume"])

    bc = sub.add_parser("bc-compare", help="Boucksom-Chen incidence bodies on both sides")
    common(bc)
    bc.add_argument("--bundle", default="box:1,1")
    bc.add_argument("--level", type=int, default=1)
    bc.add_argument("--p", type=int, default=2)
    bc.add_argument("--point", default="0")
    bc.add_argument("--z0", default="0", help="generic-fiber point (rational or inf)")
    bc.add_argument("--k", type=int, default=8)
    bc.add_argument("--grid", type=int, default=32)
    bc.add_argument("--tol-finite", type=float, default=DEFAULT_TOLERANCES["finite_vs_lambda"])
    bc.add_argument("--tol-archimedean", type=float,
                    default=DEFAULT_TOLERANCES["archimedean_vs_volume"])
    return ap


def _load_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    if args.config:
        try:
            with open(args.config) as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(extra, dict):
            raise ConfigError("config must be a JSON object")
        for key, val in extra.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = val
    if cfg.get("budget") is None or int(cfg["budget"]) <= 0:
        raise ConfigError("budget must be positive")
    if cfg.get("workers") is not None and int(cfg["workers"]) < 1:
        raise ConfigError("workers must be positive")
    return cfg


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _write(path, text) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _envelope(cfg, tolerances, payload) -> dict:
    shown = {k: v for k, v in cfg.items() if k not in ("json_out", "workers")}
    return {"tool": "arithokounkov", "version": __version__, "config": shown,
            "tolerances": tolerances, **payload}


def _bundle(cfg) -> SurfaceBundle:
    try:
        return SurfaceBundle.parse(str(cfg["bundle"]), int(cfg.get("level") or 1))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad bundle {cfg['bundle']!r}: {exc}") from exc


def _flag(cfg) -> FlagData:
    try:
        return FlagData(int(cfg["p"]), _point(cfg["point"]))
    except (ValueError, ValuationError) as exc:
        raise ConfigError(f"bad flag p={cfg['p']} point={cfg['point']}: {exc}") from exc


def cmd_verify_filtration(cfg) -> int:
    fields = cfg.get("field") or ["Q"]
    if isinstance(fields, str):
        fields = [fields]
    n = int(cfg["instances"])
    if n < 0:
        raise ConfigError("instances must be nonnegative")
    for f in fields:
        try:
            make_field(f)
        except (FieldError, ValueError) as exc:
            raise ConfigError(f"bad field {f!r}: {exc}") from exc
    try:
        radius = Fraction(str(cfg["radius_scale"]))
        C = None if cfg.get("C") in (None, "") else Fraction(str(cfg["C"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc
    if radius <= 0:
        raise ConfigError("radius scale must be positive")
    workers = int(cfg["workers"] or os.cpu_count() or 1)
    rows, summaries = [], []
    for f in fields:
        res = run_suite(f, n, int(cfg["seed"]), radius, workers, int(cfg["budget"]), C)
        rows += res["rows"]
        summaries.append(res["summary"])
    csv_text = rows_to_csv(rows)
    json_out = cfg.get("json_out")
    csv_path = cfg.get("csv")
    if csv_path is None:
        stem = "filtration" if json_out in (None, "-") else os.path.splitext(json_out)[0]
        csv_path = stem + ".csv"
    _write(csv_path, csv_text)
    failures = sum(s["budget_failures"] for s in summaries)
    violations = sum(len(s["violations_at_fitted_C"]) for s in summaries)
    report = _envelope(cfg, {"fitted_C": {s["field"]: s["fitted_C"] for s in summaries}},
                       {"summaries": summaries, "csv": csv_path,
                        "max_minimal_C": max((s["max_minimal_C"] for s in summaries), default=0.0),
                        "status": "budget" if failures else ("violation" if violations else "ok")})
    _write(json_out, _dump(report))
    if failures:
        return EXIT_BUDGET
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_body(cfg) -> int:
    B = _bundle(cfg)
    F = _flag(cfg)
    kmax = int(cfg["kmax"])
    if kmax < 3:
        raise ConfigError("kmax must be at least 3")
    tol = {"area_vs_count": float(cfg["tol_area_count"]),
           "count_vs_volume": float(cfg["tol_count_volume"])}
    budget, method = int(cfg["budget"]), cfg["method"]
    payload = {"bundle": B.to_json(), "flag": F.to_json()}
    code = EXIT_OK
    try:
        ident, hull, pts = main_identity_report(B, F, kmax, budget, method)
        payload["identity"] = ident
        payload["volumes"] = {"area_log_p": ident["area_log_p"],
                              "count_ratio_log_p": ident["count_ratio_log_p"],
                              "half_volume": ident["half_volume"]}
        payload["big"] = ident["big"]
        if ident["big"]:
            payload["within_tolerance"] = {
                "area_vs_count": ident["rel_area_count"] <= tol["area_vs_count"],
                "count_vs_volume": ident["rel_count_volume"] <= tol["count_vs_volume"],
            }
        if cfg.get("svg"):
            _write(cfg["svg"], polygon_svg(hull, ("nu1/k", "nu2/k"), points=sorted(pts)))
    except BudgetExceeded as exc:
        payload["identity"] = {"error": str(exc)}
        code = EXIT_BUDGET
    counting = counting_limit_report(B, F, kmax, budget, method)
    payload["counting"] = counting
    if counting["partial"]:
        code = EXIT_BUDGET
    _write(cfg.get("json_out"), _dump(_envelope(cfg, tol, payload)))
    return code


def cmd_bc_compare(cfg) -> int:
    B = _bundle(cfg)
    F = _flag(cfg)
    try:
        G = GenericFlag(_generic(cfg["z0"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad generic point {cfg['z0']!r}") from exc
    k, grid = int(cfg["k"]), int(cfg["grid"])
    if k < 1 or grid < 4:
        raise ConfigError("need k >= 1 and grid >= 4")
    tol = {"finite_vs_lambda": float(cfg["tol_finite"]),
           "archimedean_vs_volume": float(cfg["tol_archimedean"])}
    budget = int(cfg["budget"])
    payload = {"bundle": B.to_json(), "flag": F.to_json(), "generic_flag": G.to_json()}
    code = EXIT_OK
    table = {}
    try:
        arch = bc_incidence(B, G, F, k, grid, "archimedean", budget)
        table["archimedean"] = {"profile": arch.to_json(), "report": bc_volume_report(arch, B, budget)}
    except BudgetExceeded as exc:
        table["archimedean"] = {"error": str(exc)}
        code = EXIT_BUDGET
    if isinstance(B.family, BoxWeights):
        try:
            fin = bc_incidence(B, None, F, k, grid, "finite", budget)
            ident, _, _ = main_identity_report(B, F, k, budget)
            rep = bc_volume_report(fin, B, budget)
            rep["lambda_area_log_p"] = ident["area_log_p"]
            rep["rel_diff_lambda"] = rel_diff(fin.volume, ident["area_log_p"])
            table["finite"] = {"profile": fin.to_json(), "report": rep}
        except BudgetExceeded as exc:
            table["finite"] = {"error": str(exc)}
            code = EXIT_BUDGET
    else:
        table["finite"] = {"error": "finite side needs a box bundle"}
    a = table.get("archimedean", {}).get("report")
    f = table.get("finite", {}).get("report")
    summary = {"empty": bool((a is None or a["empty"]) and (f is None or f["empty"]))}
    if a and f:
        summary["archimedean_volume"] = a["volume"]
        summary["finite_volume"] = f["volume"]
        summary["gap"] = abs(a["volume"] - f["volume"])
        summary["refinement_bound"] = a["refinement_bound"] + f["refinement_bound"]
    if a:
        summary["archimedean_within_tolerance"] = a["rel_diff"] <= tol["archimedean_vs_volume"]
    if f:
        summary["finite_within_tolerance"] = f["rel_diff_lambda"] <= tol["finite_vs_lambda"]
    payload["sides"] = table
    payload["summary"] = summary
    _write(cfg.get("json_out"), _dump(_envelope(cfg, tol, payload)))
    return code


COMMANDS = {"verify-filtration": cmd_verify_filtration, "body": cmd_body,
            "bc-compare": cmd_bc_compare}


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _load_config(args)
        return COMMANDS[cfg["command"]](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    loewner-c2d discretize --model paper-ex1 --h 0.4 --kbar 4 --out run/
    loewner-c2d compare --model paper-ex1 --h 0.4 --method tustin,zoh,impulse,loewner
    loewner-c2d sweep --model paper-tds --h 0.2 --out run/
    loewner-c2d respond --model paper-ex1 --h 0.4 --method zoh,loewner --signal impulse

Settings come from flags, then from an optional JSON ``--config`` file,
then from built-in defaults.  Every output file starts with the resolved
settings so that a run can be repeated exactly.  Exit codes: 0 success,
2 usage error, 3 numeric failure, 4 unsupported combination.
"""
import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .baselines import discretize_baseline
from .exceptions import (DiscretisationError, NumericFailure,
                         UnsupportedCombinationError)
from .metrics import (SWEEP_HEADER, freq_error, hinf_norm, order_sweep,
                      paper_grid, time_error_l2, time_response)
from .models import TimeDelayModel, dump_model, load_model
from .pipeline import STABILIZATIONS, LoewnerFit, loewner_discretize
from .plants import NAMED_PLANTS, named_plant

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_UNSUPPORTED = 0, 2, 3, 4
METHODS = ("tustin", "zoh", "impulse", "loewner")

DEFAULTS = {
    "model": None,
    "h": None,
    "m": 50,
    "kbar": 4,
    "rank_tol": 1e-10,
    "grid": 5000,
    "stabilize": "nehari",
    "method": None,
    "select": "best",
    "out": ".",
    "e2": "none",
    "signal": None,
    "t_end": 100.0,
    "dt": None,
    "k_range": None,
}

log = logging.getLogger("loewner_c2d")


class UsageError(Exception):
    pass


def fmt(x):
    """17 significant digits; booleans and integers verbatim."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _method_list(text):
    items = [s.strip() for s in text.split(",") if s.strip()] if text else []
    bad = [s for s in items if s not in METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    if not items:
        raise UsageError("empty method list")
    return items


def _k_range(text):
    if text is None:
        return None
    text = str(text)
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings (flags win)")
    common.add_argument("--model", help=f"model JSON file or one of {sorted(NAMED_PLANTS)}")
    common.add_argument("--h", type=float, help="sampling period")
    common.add_argument("--m", type=int, help="2m frequencies are sampled (default 50)")
    common.add_argument("--kbar", type=int, help="largest admissible order (default 4)")
    common.add_argument("--rank-tol", dest="rank_tol", type=float,
                        help="relative numerical-rank threshold (default 1e-10)")
    common.add_argument("--grid", type=int, help="frequency points for the error (default 5000)")
    common.add_argument("--stabilize", choices=STABILIZATIONS)
    common.add_argument("--select", choices=("first", "best"),
                        help="Loewner order selection (default best)")
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="loewner-c2d", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", parents=[common], help="discretise one model")
    p.add_argument("--method", help="loewner (default) or a baseline")

    p = sub.add_parser("compare", parents=[common], help="error table over methods")
    p.add_argument("--method", help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--e2", choices=("none", "impulse", "step"),
                   help="add a time-domain l2 error column")
    p.add_argument("--t-end", dest="t_end", type=float)

    p = sub.add_parser("sweep", parents=[common], help="errors versus Loewner order")
    p.add_argument("--k-range", dest="k_range", help="'lo:hi' or comma list (default 1:r)")

    p = sub.add_parser("respond", parents=[common], help="time responses")
    p.add_argument("--method", help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--signal", choices=("impulse", "step"))
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float, help="fine grid step (default h/100)")
    return parser


def resolve_config(args):
    """Merge flags over the config file over the defaults."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["command"] = args.command
    if cfg["model"] is None:
        raise UsageError("--model is required")
    if cfg["h"] is None or not cfg["h"] > 0:
        raise UsageError("--h must be given and positive")
    if cfg["m"] < 1 or cfg["kbar"] < 1 or cfg["grid"] < 1:
        raise UsageError("--m, --kbar and --grid must be >= 1")
    if cfg["method"] is None:
        cfg["method"] = "loewner"
    if cfg["signal"] is None:
        cfg["signal"] = "step" if cfg["model"] == "paper-tds" else "impulse"
    return cfg


def load_plant(name):
    if name in NAMED_PLANTS:
        return named_plant(name)
    try:
        return load_model(name)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot load model {name}: {exc}") from None


def _header(cfg):
    return "# config: " + json.dumps(cfg, sort_keys=True)


def _write_csv(path, cfg, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(_header(cfg) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) if not isinstance(x, str) else x for x in row])


def _discretize(G, cfg, method, fit=None):
    """Returns (model, info dict)."""
    if method == "loewner":
        res = loewner_discretize(G, cfg["h"], cfg["kbar"], m=cfg["m"], rank_tol=cfg["rank_tol"],
                                 stabilization=cfg["stabilize"], select=cfg["select"], fit=fit)
        for msg in res.log:
            log.info(msg)
        return res.model, {"r": res.r, "k": res.k, "interpolant_stable": res.interpolant_stable,
                           "estimate": res.estimate}
    return discretize_baseline(G, cfg["h"], method), {}


def cmd_discretize(cfg):
    G = load_plant(cfg["model"])
    methods = _method_list(cfg["method"])
    if len(methods) != 1:
        raise UsageError("discretize takes a single --method")
    method = methods[0]
    Gd, info = _discretize(G, cfg, method)
    report = freq_error(G, Gd, paper_grid(cfg["h"], cfg["grid"]))
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    dump_model(Gd, out / f"model_{method}.json", config=cfg)
    (out / f"error_{method}.json").write_text(
        report.to_json(config=cfg, method=method, order=Gd.order, **info) + "\n")
    print(f"{method}: order {Gd.order}, relative error {report.e_inf_rel:.4f}%")
    return EXIT_OK


def cmd_compare(cfg):
    G = load_plant(cfg["model"])
    methods = _method_list(cfg["method"])
    h = cfg["h"]
    w = paper_grid(h, cfg["grid"])
    norm = hinf_norm(G, w)
    fit = None
    rows = []
    for method in methods:
        if isinstance(G, TimeDelayModel) and method != "loewner":
            raise UnsupportedCombinationError(f"method {method} is not available for "
                                              "time-delay models")
        if method == "loewner" and fit is None:
            fit = LoewnerFit.from_model(G, h, cfg["m"], cfg["rank_tol"])
        Gd, _ = _discretize(G, cfg, method, fit)
        row = [method, Gd.order, freq_error(G, Gd, w, norm).e_inf_rel]
        if cfg["e2"] != "none":
            _, y, y_held = time_response(G, Gd, cfg["e2"], cfg["t_end"])
            row.append(time_error_l2(y, y_held))
        rows.append(row)
    header = ["method", "order", "e_rel"] + (["e2"] if cfg["e2"] != "none" else [])
    path = Path(cfg["out"]) / "compare.csv"
    _write_csv(path, cfg, header, rows)
    for row in rows:
        print(",".join(fmt(x) if not isinstance(x, str) else x for x in row))
    return EXIT_OK


def cmd_sweep(cfg):
    G = load_plant(cfg["model"])
    rows, fit = order_sweep(G, cfg["h"], cfg["m"], _k_range(cfg["k_range"]), cfg["rank_tol"],
                            cfg["grid"], cfg["stabilize"])
    for row in rows:
        if row.failed:
            log.warning("k = %d failed: %s", row.k, row.error)
    table = [[getattr(row, name) for name in SWEEP_HEADER] for row in rows]
    _write_csv(Path(cfg["out"]) / "sweep.csv", cfg, SWEEP_HEADER, table)
    print(f"r = {fit.r}; {len(rows)} rows, {sum(r.failed for r in rows)} failed")
    return EXIT_OK


def cmd_respond(cfg):
    G = load_plant(cfg["model"])
    methods = _method_list(cfg["method"])
    h = cfg["h"]
    dt = cfg["dt"] or h / 100
    subdivisions = round(h / dt)
    if subdivisions < 1 or abs(h / dt - subdivisions) > 1e-9 * subdivisions:
        raise UsageError(f"dt={dt} does not subdivide h={h}")
    if isinstance(G, TimeDelayModel) and cfg["signal"] == "impulse":
        raise UnsupportedCombinationError("impulse reference not available for time-delay "
                                          "models; use --signal step")
    for method in methods:
        if isinstance(G, TimeDelayModel) and method != "loewner":
            raise UnsupportedCombinationError(f"method {method} is not available for "
                                              "time-delay models")
        Gd, _ = _discretize(G, cfg, method)
        t, y, y_held = time_response(G, Gd, cfg["signal"], cfg["t_end"], subdivisions)
        rows = zip(t, y, y_held, y - y_held)
        _write_csv(Path(cfg["out"]) / f"respond_{method}.csv", cfg,
                   ["t", "y_continuous", "y_held_discrete", "error"], rows)
        if np.any(y != 0):
            print(f"{method}: e2 = {time_error_l2(y, y_held):.4f}%")
        else:
            print(f"{method}: zero reference response")
    return EXIT_OK


COMMANDS = {"discretize": cmd_discretize, "compare": cmd_compare, "sweep": cmd_sweep,
            "respond": cmd_respond}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg["command"]](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedCombinationError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (NumericFailure, DiscretisationError, ValueError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

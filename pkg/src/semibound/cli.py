"""Command-line front end.

    semibound analyze   --family morse --g 5.2 --alpha 1
    semibound analyze   --expr "-4/cosh(r)^2"
    semibound sweep     --family lj --g-min 1 --g-max 500 --g-steps 100 --out lj.csv --figures
    semibound certify   --family expfamily --alpha 3 --beta 1
    semibound reproduce --out table.csv

Exit status: 0 success, 2 bad configuration, 3 numerical failure,
4 a computed count violates an applicable limit, 5 a reproduce row failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .bounds import (BoundReport, Limit, Window, assemble_report, reports_to_csv,
                     _json_default)
from .exceptions import SemiboundError, StageError
from .expression import parse_expression
from .nodes import count_nodes_prufer, count_nodes_shooting
from .potentials import effective_potential, make_family, read_table
from .semiclassical import closed_form_semiclassical, semiclassical_integral
from .shape import certify_sign, find_zero_structure

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VIOLATION = 4
EXIT_REPRODUCE = 5

COMMANDS = ("analyze", "sweep", "certify", "reproduce")
# flag destinations that a --config file may set
CONFIG_KEYS = ("family", "g", "R", "alpha", "beta", "p", "ell", "expr", "table", "g_min", "g_max",
               "g_steps", "g_scale", "tol", "format", "out", "figures", "trace", "jobs")


class ConfigError(Exception):
    pass


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("potential")
    src.add_argument("--family", help="squarewell, morse, poschlteller (pt), lennardjones (lj), "
                                      "expfamily, exponential, inversepower")
    src.add_argument("--expr", help="V(r) as an expression in r, scaled by g^2")
    src.add_argument("--table", help="two-column file of (r, V) samples, scaled by g^2")
    src.add_argument("--g", type=float, help="coupling strength (default 1)")
    src.add_argument("--R", type=float, help="range parameter (default 1)")
    src.add_argument("--alpha", type=float)
    src.add_argument("--beta", type=float)
    src.add_argument("--p", type=float, help="InversePower exponent")
    src.add_argument("--ell", type=int, help="partial wave; adds ell(ell+1)/r^2")
    out = common.add_argument_group("output")
    out.add_argument("--tol", type=float, help="relative tolerance (default 1e-10)")
    out.add_argument("--format", choices=("csv", "json"))
    out.add_argument("--out", help="output file (default stdout)")
    out.add_argument("--figures", action="store_true", default=None,
                     help="write PNG figures next to the output file")
    out.add_argument("--trace", action="store_true", default=None,
                     help="write (r, u) and (r, eta) trace CSVs next to the output file")
    out.add_argument("--config", help="JSON file of option values; command-line flags win")

    ap = argparse.ArgumentParser(prog="semibound",
                                 description="Count bound states of central potentials and check "
                                             "the semiclassical limits on the count.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="full report for one potential")
    sw = sub.add_parser("sweep", parents=[common], help="one report row per coupling g")
    sw.add_argument("--g-min", dest="g_min", type=float)
    sw.add_argument("--g-max", dest="g_max", type=float)
    sw.add_argument("--g-steps", dest="g_steps", type=int)
    sw.add_argument("--g-scale", dest="g_scale", choices=("linear", "log"))
    sw.add_argument("--jobs", type=int, help="worker processes (default 1)")
    sub.add_parser("certify", parents=[common], help="zero structure and sign of F")
    sub.add_parser("reproduce", parents=[common], help="table of reference results with pass/fail")
    return ap


def _merge_config(args):
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(cfg) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        merged[key] = cfg.get(key) if val is None else val
    merged["command"] = args.command
    return merged


def build_model(cfg, g=None):
    """The potential named by a merged config, at coupling g if given."""
    sources = [k for k in ("family", "expr", "table") if cfg.get(k)]
    if len(sources) != 1:
        raise ConfigError("give exactly one of --family, --expr, --table"
                          + (f" (got {', '.join(sources)})" if sources else ""))
    g = cfg.get("g") if g is None else g
    g = 1.0 if g is None else float(g)
    R = cfg.get("R")
    try:
        if cfg.get("family"):
            model = make_family(cfg["family"], g=g, R=R, alpha=cfg.get("alpha"),
                                beta=cfg.get("beta"), p=cfg.get("p"))
        elif cfg.get("expr"):
            model = parse_expression(cfg["expr"], g=g, R=1.0 if R is None else R)
        else:
            model = read_table(cfg["table"]).with_coupling(g)
        if cfg.get("ell"):
            model = effective_potential(model, cfg["ell"])
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    return model


def _tol(cfg):
    tol = cfg.get("tol")
    tol = 1e-10 if tol is None else float(tol)
    if not 1e-12 < tol < 1e-2:
        raise ConfigError("--tol must lie in (1e-12, 1e-2)")
    return tol


def _g_grid(cfg):
    lo, hi, n = cfg.get("g_min"), cfg.get("g_max"), cfg.get("g_steps")
    if lo is None or hi is None:
        raise ConfigError("sweep needs --g-min and --g-max")
    n = 50 if n is None else int(n)
    if not (0 < lo < hi) or n < 2:
        raise ConfigError("sweep needs 0 < g_min < g_max and g_steps >= 2")
    if cfg.get("g_scale") == "log":
        return [float(x) for x in np.geomspace(lo, hi, n)]
    return [float(x) for x in np.linspace(lo, hi, n)]


def _error_report(model_params, g, exc):
    stage = exc.stage if isinstance(exc, StageError) else "setup"
    na = Limit(None, "error")
    return BoundReport(dict(model_params, g=g), None, None, na, na, Window(None, None, reason="error"),
                       None, None, flags=[], errors={stage: str(exc)})


def _sweep_point(args):
    cfg, g, tol = args
    model = build_model(cfg, g)
    try:
        return assemble_report(model, rel_tol=tol)
    except SemiboundError as exc:
        return _error_report(model.params(), g, exc)


def _sibling(cfg, suffix, default_stem):
    out = cfg.get("out")
    if out:
        p = Path(out)
        return p.with_name(p.stem + suffix)
    return Path(default_stem + suffix)


def _emit(text, cfg):
    out = cfg.get("out")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_json(rep):
    return rep.to_json(indent=2) + "\n"


def cmd_analyze(cfg) -> int:
    model = build_model(cfg)
    tol = _tol(cfg)
    rep = assemble_report(model, rel_tol=tol)
    fmt = cfg.get("format") or "json"
    _emit(_report_json(rep) if fmt == "json" else reports_to_csv([rep]), cfg)
    if cfg.get("trace") or cfg.get("figures"):
        _write_traces(model, rep, cfg, tol)
    return EXIT_VIOLATION if rep.violations else EXIT_OK


def _write_traces(model, rep, cfg, tol):
    shot = count_nodes_shooting(model, rtol=tol, keep_samples=True)
    phase = None
    if rep.zeros is not None and rep.zeros.conforming:
        phase = count_nodes_prufer(model, rep.zeros, rtol=tol, keep_samples=True)
    if cfg.get("trace"):
        path = _sibling(cfg, "_u.csv", "semibound")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "u", "segment"])
            w.writerows((repr(r), repr(u), s) for r, u, s in shot.samples)
        if phase is not None:
            path = _sibling(cfg, "_eta.csv", "semibound")
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["r", "eta"])
                w.writerows((repr(r), repr(e)) for r, e in phase.samples)
    if cfg.get("figures"):
        from . import plotting

        plotting.plot_wavefunction(shot.samples, _sibling(cfg, "_u.png", "semibound"))
        if rep.zeros is not None:
            plotting.plot_shape(model, rep.zeros, _sibling(cfg, "_shape.png", "semibound"))
        if phase is not None:
            plotting.plot_phase(phase.samples, _sibling(cfg, "_eta.png", "semibound"),
                                rep.n_semi.value if rep.n_semi else None)


def cmd_sweep(cfg) -> int:
    grid = _g_grid(cfg)
    tol = _tol(cfg)
    build_model(cfg, grid[0])  # fail fast on a bad potential
    jobs = cfg.get("jobs") or 1
    work = [(cfg, g, tol) for g in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_sweep_point, work))
    else:
        reports = [_sweep_point(w) for w in work]
    fmt = cfg.get("format") or "csv"
    if fmt == "csv":
        text = reports_to_csv(reports)
    else:
        text = json.dumps([r.to_dict() for r in reports], indent=2, default=_json_default) + "\n"
    _emit(text, cfg)
    if cfg.get("figures"):
        from . import plotting

        plotting.plot_sweep(reports, _sibling(cfg, ".png", "sweep"), title=reports[0].model.get("family", ""))
    if any(r.errors for r in reports):
        return EXIT_NUMERICAL
    return EXIT_VIOLATION if any(r.violations for r in reports) else EXIT_OK


def cmd_certify(cfg) -> int:
    model = build_model(cfg)
    zeros = find_zero_structure(model)
    out = {"model": model.params(), "zeros": zeros.to_dict(), "certificate": None}
    if zeros.conforming:
        out["certificate"] = certify_sign(model, zeros).to_dict()
    fmt = cfg.get("format") or "json"
    if fmt == "json":
        text = json.dumps(out, indent=2, default=_json_default) + "\n"
    else:
        cert = out["certificate"] or {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["classification", "r_minus", "r_plus", "verdict", "min_F", "argmin_r", "max_F", "argmax_r"])
        w.writerow([zeros.classification, zeros.r_minus, zeros.r_plus, cert.get("verdict", "NA"),
                    cert.get("min_F", "NA"), cert.get("argmin_r", "NA"), cert.get("max_F", "NA"),
                    cert.get("argmax_r", "NA")])
        text = buf.getvalue()
    _emit(text, cfg)
    if cfg.get("figures"):
        from . import plotting

        plotting.plot_shape(model, zeros, _sibling(cfg, "_shape.png", "certify"))
    return EXIT_OK


# ------------------------------------------------------------------ reproduce

def _row(item, expected, computed, ok):
    return {"item": item, "expected": expected, "computed": computed, "pass": bool(ok)}


def reference_rows(tol=1e-10):
    """Reference results recomputed from scratch, each with a pass flag."""
    rows = []

    def guarded(item, expected, fn):
        try:
            computed, ok = fn()
        except Exception as exc:  # a failing component marks only its row
            computed, ok = f"error: {exc}", False
        rows.append(_row(item, expected, computed, ok))

    def morse_count():
        m = make_family("morse", g=5.2, alpha=1.0)
        n = count_nodes_shooting(m, rtol=tol).n_nodes
        return n, n == math.floor(5.2 + 0.5)

    def morse_lower():
        rep = assemble_report(make_family("morse", g=5.2, alpha=1.0), rel_tol=tol, window=False)
        return rep.lower_11.value, rep.lower_11.value == 5 and rep.n_exact >= 5

    def pt_count():
        n = count_nodes_shooting(make_family("pt", g=6.0), rtol=tol).n_nodes
        return n, n == math.floor((1 + math.sqrt(1 + 4 * 36.0)) / 4)

    def pt_lower():
        rep = assemble_report(make_family("pt", g=7.0), rel_tol=tol, window=False)
        return rep.lower_11.value, rep.lower_11.value == 3 and rep.n_exact >= 3

    def lj_coefficient():
        c = closed_form_semiclassical(make_family("lj", g=1.0)).value
        q = semiclassical_integral(make_family("lj", g=1.0), tol).value
        return round(c, 6), round(c, 4) == 0.1339 and abs(q - c) < 1e-8

    def exp_family_lower():
        m = make_family("expfamily", g=10.0, alpha=3.0, beta=1.0)
        rep = assemble_report(m, rel_tol=tol, window=False)
        k = 1.5
        closed = math.floor(10.0 / math.pi * 2 ** k * math.gamma(k))
        return rep.lower_11.value, rep.lower_11.value == closed and rep.n_exact >= closed

    def square_well():
        g = 10.0
        rep = assemble_report(make_family("squarewell", g=g), rel_tol=tol, window=False)
        ok = (rep.n_exact == math.floor(g / math.pi + 0.5)
              and abs(rep.n_semi.value - g / math.pi) < 1e-10 and rep.margin is not None
              and 0 <= rep.margin <= 1)
        return f"N={rep.n_exact}, N_semi={rep.n_semi.value:.10f}, gap={rep.margin}", ok

    def headline(family, g, expected, **kw):
        def fn():
            n = count_nodes_shooting(make_family(family, g=g, **kw), rtol=tol).n_nodes
            return n, n == expected
        return fn

    guarded("Morse count floor(g+1/2), g=5.2, alpha=1", 5, morse_count)
    guarded("Morse lower limit floor(g), g=5.2", 5, morse_lower)
    guarded("Poschl-Teller count, g=6", 3, pt_count)
    guarded("Poschl-Teller lower limit floor(g/2), g=7", 3, pt_lower)
    guarded("Lennard-Jones coefficient Gamma(1/3)/(12 sqrt(pi) Gamma(11/6))", 0.1339, lj_coefficient)
    guarded("ExpFamily lower limit, alpha=3, beta=1, g=10",
            math.floor(10.0 / math.pi * 2 ** 1.5 * math.gamma(1.5)), exp_family_lower)
    guarded("Square well count, N_semi = g/pi, gap <= 1 (g=10)", "N=3, N_semi=g/pi, gap<=1", square_well)
    guarded("Lennard-Jones g=500 bound states", 67, headline("lj", 500.0, 67))
    guarded("Exponential g=200 bound states", 127, headline("exponential", 200.0, 127))
    return rows


def cmd_reproduce(cfg) -> int:
    rows = reference_rows(_tol(cfg))
    fmt = cfg.get("format") or "csv"
    if fmt == "json":
        text = json.dumps(rows, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["item", "expected", "computed", "pass"])
        for r in rows:
            w.writerow([r["item"], r["expected"], r["computed"], "PASS" if r["pass"] else "FAIL"])
        text = buf.getvalue()
    _emit(text, cfg)
    if cfg.get("figures"):
        from . import plotting

        grid = [float(x) for x in np.geomspace(1.0, 200.0, 40)]
        reports = [assemble_report(make_family("exponential", g=g), window=False, prufer=False) for g in grid]
        plotting.plot_sweep(reports, _sibling(cfg, "_exponential.png", "reproduce"), title="exponential")
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_REPRODUCE


HANDLERS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "certify": cmd_certify, "reproduce": cmd_reproduce}


def _glue_expr(argv):
    """Let ``--expr -4/cosh(r)^2`` through: argparse reads a leading '-' as a flag."""
    out = []
    it = iter(argv)
    for a in it:
        if a == "--expr":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--expr={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(_glue_expr(sys.argv[1:] if argv is None else list(argv)))
    try:
        cfg = _merge_config(args)
        if args.command != "reproduce":
            build_model(cfg)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"semibound: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SemiboundError, ValueError, ArithmeticError) as exc:
        print(f"semibound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

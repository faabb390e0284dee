"""Limits on the bound-state count and the report that gathers them.

* lower limit  N >= floor(N_semi)    when F >= 0 on the attractive interval;
* upper limit  N <= N_semi - 1       when F <= 0, V has no zero and decays
  no faster than r^-4;
* window       N_semi -+ log|V(p)/V(q)|/(4 pi) + (1/2, -3/2) for increasing V,
  with p and q cutting a phase of pi/2 off either end of the integral;
* the ratio N / N_semi, which should tend to 1 as the coupling grows.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .exceptions import NoAttractiveRegion, StageError
from .nodes import count_analytic, count_nodes_prufer, count_nodes_shooting
from .potentials import PotentialModel
from .semiclassical import (SemiclassicalEstimate, closed_form_semiclassical, has_closed_form,
                            running_integral, semiclassical_integral)
from .shape import (EVERYWHERE_ATTRACTIVE, ShapeCertificate, ZeroStructure, certify_sign,
                    find_zero_structure, scan_lower, tail_radius)

__all__ = [
    "Limit",
    "Window",
    "BoundReport",
    "CSV_HEADER",
    "lower_limit",
    "upper_limit",
    "decay_exponent",
    "chadan_window",
    "chadan_asymptotic_ratio",
    "assemble_report",
    "reports_to_csv",
]

CSV_HEADER = ["g", "n_exact", "n_semi", "lower11", "upper13", "lower7b", "upper7a", "gap", "flags"]
NOT_APPLICABLE = "NA"
INTEGER_GUARD = 1e-9
MAX_DECAY_EXPONENT = 4.0


@dataclass(frozen=True)
class Limit:
    """A limit value, or ``value=None`` with the reason it does not apply."""

    value: float | None
    reason: str = ""
    marginal: bool = False

    @property
    def applicable(self) -> bool:
        return self.value is not None

    def to_dict(self):
        return {"value": self.value, "applicable": self.applicable,
                "reason": self.reason, "marginal": self.marginal}


@dataclass(frozen=True)
class Window:
    lower: float | None
    upper: float | None
    p: float | None = None
    q: float | None = None
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.lower is not None

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "p": self.p, "q": self.q,
                "applicable": self.applicable, "reason": self.reason}


def lower_limit(n_semi: SemiclassicalEstimate, cert: ShapeCertificate | None) -> Limit:
    """floor(N_semi) when F >= 0 has been certified on a conforming interval."""
    if cert is None:
        return Limit(None, "no attractive region")
    if not cert.zeros.conforming:
        return Limit(None, "V is not negative on a single interval")
    if cert.verdict != "FNonNegative":
        return Limit(None, f"F sign is {cert.verdict}")
    v = n_semi.value
    n = math.floor(v)
    # N_semi an integer up to rounding: the strict inequality behind the
    # limit is then not guaranteed, so say so
    marginal = abs(v - round(v)) <= INTEGER_GUARD * max(1.0, abs(v))
    return Limit(n, "", marginal)


def decay_exponent(model: PotentialModel, r_end: float | None = None, decades: float = 2.0,
                   points: int = 32) -> float:
    """Least-squares slope of -log|V| against log r over the last decades before r_end."""
    r_end = r_end or tail_radius(model)
    r = np.geomspace(r_end / 10.0 ** decades, r_end, points)
    v = np.abs(np.asarray(model.value(r), dtype=float))
    if np.any(v == 0) or not np.all(np.isfinite(v)):
        return math.inf
    slope = np.polyfit(np.log(r), np.log(v), 1)[0]
    return float(-slope)


def upper_limit(n_semi: SemiclassicalEstimate, cert: ShapeCertificate | None,
                zeros: ZeroStructure | None, model: PotentialModel | None = None) -> Limit:
    """N_semi - 1 for everywhere-attractive V with F <= 0 and slow enough decay."""
    if cert is None or zeros is None:
        return Limit(None, "no attractive region")
    if zeros.classification != EVERYWHERE_ATTRACTIVE:
        return Limit(None, "V has a zero")
    if cert.verdict != "FNonPositive":
        return Limit(None, f"F sign is {cert.verdict}")
    if model is not None:
        k = decay_exponent(model)
        if k > MAX_DECAY_EXPONENT + 1e-6:
            return Limit(None, f"V decays like r^-{k:.3g}, faster than r^-4")
    return Limit(n_semi.value - 1.0)


def _is_increasing(model, zeros, n=1024):
    lo = scan_lower(model)
    hi = tail_radius(model) if math.isinf(model.domain[1]) else model.domain[1]
    r = np.geomspace(lo, hi, n)
    d = model.derivatives(r)
    v1 = np.asarray(d.v1, dtype=float)
    scale = np.abs(np.asarray(d.v0, dtype=float)) / r
    return bool(np.all(v1 >= -1e-9 * np.maximum(scale, 1e-300)))


def _solve_radius(model, target, lo, hi):
    f = lambda x: running_integral(model, x) - target
    if math.isinf(hi):
        hi = max(model.R, lo)
        while f(hi) < 0:
            hi *= 2.0
            if hi > 1e60:
                raise ValueError("phase budget not reached")
    return brentq(f, lo, hi, xtol=1e-14, rtol=1e-12)


def chadan_window(model: PotentialModel, n_semi: SemiclassicalEstimate,
                  zeros: ZeroStructure | None = None) -> Window:
    """The two-sided window for monotonically increasing potentials."""
    zeros = zeros or find_zero_structure(model)
    if not _is_increasing(model, zeros):
        return Window(None, None, reason="V is not increasing")
    if n_semi.value < 1.0:
        return Window(None, None, reason="N_semi < 1: no radii cut a phase of pi/2 from each end")
    total = math.pi * n_semi.value
    lo = max(zeros.r_minus, scan_lower(model))
    p = _solve_radius(model, 0.5 * math.pi, lo, zeros.r_plus)
    q = _solve_radius(model, total - 0.5 * math.pi, lo, zeros.r_plus)
    term = math.log(abs(float(model.value(p)) / float(model.value(q)))) / (4.0 * math.pi)
    return Window(n_semi.value - term - 1.5, n_semi.value + term + 0.5, p, q)


def _semi(model, rel_tol=1e-10):
    return closed_form_semiclassical(model) if has_closed_form(model) else semiclassical_integral(model, rel_tol)


def chadan_asymptotic_ratio(model: PotentialModel, g_list) -> list:
    """[(g, N / N_semi)] along the coupling list; N_semi = 0 gives ratio 0."""
    out = []
    prev = 0.0
    for g in g_list:
        if not g > prev:
            raise ValueError("g_list must be positive and increasing")
        prev = g
        m = model.with_coupling(g)
        n = count_nodes_shooting(m).n_nodes
        s = _semi(m).value
        out.append((g, n / s if s > 0 else 0.0))
    return out


@dataclass
class BoundReport:
    model: dict
    n_exact: int | None
    n_semi: SemiclassicalEstimate | None
    lower_11: Limit
    upper_13: Limit
    chadan_window: Window
    shape: ShapeCertificate | None
    zeros: ZeroStructure | None
    n_prufer: int | None = None
    n_analytic: int | None = None
    n_semi_closed_form: float | None = None
    phase_gain: float | None = None
    flags: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def g(self):
        return self.model.get("g")

    @property
    def margin(self):
        if self.n_exact is None or not self.lower_11.applicable:
            return None
        return self.n_exact - self.lower_11.value

    @property
    def violations(self) -> list:
        out = []
        if self.n_exact is None:
            return out
        if self.lower_11.applicable and self.n_exact < self.lower_11.value:
            out.append("lower")
        if self.upper_13.applicable and self.n_exact > self.upper_13.value:
            out.append("upper")
        w = self.chadan_window
        if w.applicable and not (w.lower < self.n_exact < w.upper):
            out.append("window")
        return out

    def to_dict(self):
        return {
            "model": self.model,
            "n_exact": self.n_exact,
            "n_prufer": self.n_prufer,
            "n_analytic": self.n_analytic,
            "n_semi": self.n_semi.to_dict() if self.n_semi else None,
            "n_semi_closed_form": self.n_semi_closed_form,
            "lower_11": self.lower_11.to_dict(),
            "upper_13": self.upper_13.to_dict(),
            "chadan_window": self.chadan_window.to_dict(),
            "margin": self.margin,
            "phase_gain_over_pi": None if self.phase_gain is None else self.phase_gain / math.pi,
            "zeros": self.zeros.to_dict() if self.zeros else None,
            "shape": self.shape.to_dict() if self.shape else None,
            "flags": list(self.flags),
            "violations": self.violations,
            "errors": dict(self.errors),
            "timing": dict(self.timing),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_json_default, **kw)

    def csv_row(self) -> list:
        def fmt(x):
            if x is None:
                return NOT_APPLICABLE
            return repr(float(x)) if isinstance(x, float) else str(x)
        w = self.chadan_window
        flags = list(self.flags) + [f"error:{k}" for k in self.errors]
        return [fmt(self.g), fmt(self.n_exact), fmt(self.n_semi.value if self.n_semi else None),
                fmt(self.lower_11.value), fmt(self.upper_13.value), fmt(w.lower), fmt(w.upper),
                fmt(self.margin), ";".join(flags)]


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def reports_to_csv(reports, stream=None) -> str:
    buf = stream or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        w.writerow(rep.csv_row())
    return buf.getvalue() if stream is None else ""


class _Stage:
    """Times a stage and re-raises failures as StageError."""

    def __init__(self, name, timing):
        self.name, self.timing = name, timing

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, exc_type, exc, tb):
        self.timing[self.name] = time.perf_counter() - self.t0
        if exc is not None and not isinstance(exc, (StageError, NoAttractiveRegion)):
            raise StageError(self.name, exc) from exc
        return False


def assemble_report(model: PotentialModel, *, rel_tol: float = 1e-10, prufer: bool = True,
                    window: bool = True) -> BoundReport:
    """Shape analysis, N_semi, both node counts and every applicable limit."""
    timing: dict = {}
    flags: list = []
    zeros = cert = None
    try:
        with _Stage("shape", timing):
            zeros = find_zero_structure(model)
            if zeros.conforming:
                cert = certify_sign(model, zeros)
    except NoAttractiveRegion:
        flags.append("no-attractive-region")
    if zeros is not None and not zeros.conforming:
        flags.append("not-conforming")
    if math.isfinite(model.domain[1]):
        flags.append("table-end-free-tail")
    if zeros is not None and zeros.outer_zero_region:
        # V = 0 rather than V > 0 beyond r_plus (square well): the limit is
        # still applied, as for the square well itself
        flags.append("outer-zero-region")

    with _Stage("semiclassical", timing):
        if zeros is None:
            n_semi = SemiclassicalEstimate(0.0, 0.0, 0.0, 0.0)
        else:
            n_semi = semiclassical_integral(model, rel_tol)
        closed = closed_form_semiclassical(model).value if has_closed_form(model) else None
    if closed is not None and abs(n_semi.value - closed) > 1e-8 * max(1.0, closed):
        flags.append("semiclassical-mismatch")

    with _Stage("shooting", timing):
        shot = count_nodes_shooting(model, rtol=min(rel_tol, 1e-10))
    n_exact = shot.n_nodes
    if shot.marginal:
        flags.append("marginal")

    n_prufer = phase_gain = None
    if prufer and zeros is not None and zeros.conforming:
        with _Stage("prufer", timing):
            trace = count_nodes_prufer(model, zeros, rtol=min(rel_tol, 1e-10))
        n_prufer, phase_gain = trace.n_total, trace.phase_gain
        if trace.marginal and "marginal" not in flags:
            flags.append("marginal")
        if n_prufer != n_exact:
            flags.append("method-disagreement")

    n_analytic = None
    try:
        n_analytic = count_analytic(model).n_nodes
    except ValueError:
        pass
    if n_analytic is not None and n_analytic != n_exact:
        flags.append("analytic-disagreement")

    with _Stage("limits", timing):
        low = lower_limit(n_semi, cert)
        up = upper_limit(n_semi, cert, zeros, model)
        win = Window(None, None, reason="not requested")
        if window and zeros is not None:
            win = chadan_window(model, n_semi, zeros)
    if low.marginal:
        flags.append("lower-marginal")

    report = BoundReport(model.params(), n_exact, n_semi, low, up, win, cert, zeros,
                         n_prufer, n_analytic, closed, phase_gain, flags, {}, timing)
    for v in report.violations:
        flags.append(f"violation:{v}")
    return report

"""Zero structure of V(r), the shape function F(r), and sign certificates.

F(r) = (5/16) (V'/V)^2 - V''/(4V) on the attractive interval.  It does
not depend on the coupling g.  Its sign on the interval decides which limit
on the bound-state count applies; ``certify_sign`` gathers dense-grid
evidence for that sign (it is not a proof).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .exceptions import NoAttractiveRegion
from .potentials import PotentialModel

__all__ = [
    "ZeroStructure",
    "ShapeCertificate",
    "tail_radius",
    "scan_lower",
    "sign_changes",
    "bisect",
    "find_zero_structure",
    "evaluate_F",
    "shape_function",
    "certify_sign",
]

TAIL_TOL = 1e-10
SCAN_POINTS = 1024
ZERO_RTOL = 1e-10

TWO_ZEROS = "TwoZeros"
ATTRACTIVE_AT_ORIGIN = "AttractiveAtOrigin"
ATTRACTIVE_AT_INFINITY = "AttractiveAtInfinity"
EVERYWHERE_ATTRACTIVE = "EverywhereAttractive"
NOT_CONFORMING = "NotConforming"


@dataclass(frozen=True)
class ZeroStructure:
    """Sign-change radii of V.

    ``r_minus = 0.0`` stands for the origin (attractive at the origin) and
    ``r_plus = math.inf`` for infinity.  For tabulated models the table ends
    play those roles.
    """

    r_minus: float
    r_plus: float
    classification: str
    changes: tuple = ()
    scan_range: tuple = (0.0, math.inf)
    #: V vanishes identically on part of the outer region (square well)
    outer_zero_region: bool = False
    #: r_plus is a jump of V rather than a smooth zero
    jump_at_r_plus: bool = False

    @property
    def conforming(self) -> bool:
        return self.classification != NOT_CONFORMING

    @property
    def origin_attractive(self) -> bool:
        return self.r_minus == 0.0

    @property
    def infinity_attractive(self) -> bool:
        return math.isinf(self.r_plus)

    def to_dict(self):
        d = asdict(self)
        d["r_minus"] = "origin" if self.origin_attractive else self.r_minus
        d["r_plus"] = "infinity" if self.infinity_attractive else self.r_plus
        d["changes"] = list(self.changes)
        d["scan_range"] = list(self.scan_range)
        return d


@dataclass(frozen=True)
class ShapeCertificate:
    """Grid evidence on the sign of F over (r_minus, r_plus)."""

    verdict: str  # "FNonNegative" | "FNonPositive" | "Indefinite"
    min_F: float
    argmin_r: float
    max_F: float
    argmax_r: float
    grid_size: int
    refinement_depth: int
    tolerance: float
    interval: tuple
    endpoint_offset: float
    zeros: ZeroStructure = field(repr=False)
    note: str = "grid evidence with local refinement, not a formal proof"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "min_F": self.min_F,
            "argmin_r": self.argmin_r,
            "max_F": self.max_F,
            "argmax_r": self.argmax_r,
            "grid_size": self.grid_size,
            "refinement_depth": self.refinement_depth,
            "tolerance": self.tolerance,
            "interval": list(self.interval),
            "endpoint_offset": self.endpoint_offset,
            "classification": self.zeros.classification,
            "note": self.note,
        }


def scan_lower(model: PotentialModel) -> float:
    """Smallest radius used when scanning (1e-6 R or the table start)."""
    lo = model.domain[0]
    return lo if lo > 0 else 1e-6 * model.R


def tail_radius(model: PotentialModel, tol: float = TAIL_TOL, cap: float = 1e60) -> float:
    """Radius beyond which |V r^2 - c| < tol, c the centrifugal coefficient.

    The test must hold at r and 2r.  Tabulated models return the table end.
    """
    lo, hi = model.domain
    if math.isfinite(hi):
        return hi
    c = model.centrifugal
    start = 2.0 * max([model.R, *model.breakpoints])

    def ok(r):
        with np.errstate(all="ignore"):
            v = float(model.value(r))
        return math.isfinite(v) and abs(v * r * r - c) < tol

    r = start
    while r < cap * model.R:
        if ok(r) and ok(2 * r) and ok(4 * r):
            return r
        r *= 2.0
    raise NoAttractiveRegion(f"potential does not decay fast enough: |V r^2| >= {tol} up to r = {r:.3g}")


def bisect(f, a, b, rtol=ZERO_RTOL, max_iter=200):
    """Bisection for a sign change of f between a and b (f(a) < 0 <= f(b) or reverse).

    Uses the 'negative vs nonnegative' split so that jumps to exactly 0 are
    located as well.
    """
    neg_a = f(a) < 0
    if neg_a == (f(b) < 0):
        raise ValueError("no sign change in bracket")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if (f(m) < 0) == neg_a:
            a = m
        else:
            b = m
        if abs(b - a) <= rtol * max(abs(a), abs(b)):
            break
    return 0.5 * (a + b)


def sign_changes(model: PotentialModel, lo: float, hi: float, n: int = SCAN_POINTS):
    """Bisection-refined radii where V switches between <0 and >=0 on [lo, hi].

    Returns (changes, first_negative, last_negative).
    """
    r = np.geomspace(lo, hi, n)
    for b in model.breakpoints:
        if lo < b < hi:
            r = np.union1d(r, [b, b * (1 + 1e-12)])
    with np.errstate(all="ignore"):
        v = np.asarray(model.value(r), dtype=float)
    neg = v < 0

    def f(x):
        with np.errstate(all="ignore"):
            return float(model.value(x))

    idx = np.nonzero(neg[1:] != neg[:-1])[0]
    roots = []
    for i in idx:
        x = bisect(f, r[i], r[i + 1])
        # a jump sits exactly on a breakpoint; report it there
        for b in model.breakpoints:
            if abs(x - b) <= 10 * ZERO_RTOL * b:
                x = float(b)
        roots.append(x)
    return tuple(roots), bool(neg[0]), bool(neg[-1])


def find_zero_structure(model: PotentialModel, r_max: float | None = None) -> ZeroStructure:
    """Locate r_minus and r_plus and classify the zero structure."""
    lo = scan_lower(model)
    if r_max is None:
        r_max = tail_radius(model)
    elif not math.isfinite(model.domain[1]):
        v = float(model.value(r_max))
        if abs(v * r_max ** 2 - model.centrifugal) >= 1e-6:
            raise ValueError(f"r_max = {r_max} is not in the tail (|V r^2| = {abs(v) * r_max ** 2:.3g})")
    roots, neg_first, neg_last = sign_changes(model, lo, r_max)
    jump = False
    if len(roots) == 0:
        if not neg_first:
            raise NoAttractiveRegion("V >= 0 on the whole scanned range")
        cls, rm, rp = EVERYWHERE_ATTRACTIVE, 0.0, math.inf
    elif len(roots) == 1:
        if neg_first:
            cls, rm, rp = ATTRACTIVE_AT_ORIGIN, 0.0, roots[0]
        else:
            cls, rm, rp = ATTRACTIVE_AT_INFINITY, roots[0], math.inf
    elif len(roots) == 2 and not neg_first:
        cls, rm, rp = TWO_ZEROS, roots[0], roots[1]
    else:
        cls = NOT_CONFORMING
        rm = 0.0 if neg_first else roots[0]
        rp = roots[-1] if not neg_last else math.inf
    outer_zero = False
    if math.isfinite(rp) and cls != NOT_CONFORMING:
        probe = np.geomspace(rp * (1 + 1e-6), r_max, 64)
        with np.errstate(all="ignore"):
            outer_zero = bool(np.any(model.value(probe) == 0.0))
        jump = any(abs(b - rp) <= 1e-9 * rp for b in model.breakpoints)
    return ZeroStructure(rm, rp, cls, roots, (lo, r_max), outer_zero, jump)


def shape_function(model: PotentialModel, r):
    """F(r) on arrays, returning nan where V >= 0 (no error)."""
    b = model.derivatives(r)
    with np.errstate(all="ignore"):
        F = (5.0 / 16.0) * (b.v1 / b.v0) ** 2 - b.v2 / (4.0 * b.v0)
    return np.where(np.asarray(b.v0) < 0, F, np.nan)


def evaluate_F(model: PotentialModel, r: float) -> float:
    """F at a single radius inside the attractive interval."""
    if not r > 0:
        raise ValueError(f"radius must be > 0, got {r}")
    b = model.derivatives(float(r))
    v0 = float(b.v0)
    if not v0 < 0:
        raise ValueError(f"F undefined at r = {r}: V = {v0} >= 0")
    return (5.0 / 16.0) * (float(b.v1) / v0) ** 2 - float(b.v2) / (4.0 * v0)


def _interval(model, zeros):
    lo = zeros.r_minus if not zeros.origin_attractive else zeros.scan_range[0]
    hi = zeros.r_plus if not zeros.infinity_attractive else zeros.scan_range[1]
    return lo, hi


def _grid(lo, hi, a_is_zero, b_is_zero, d, n):
    half = n // 2
    if a_is_zero and b_is_zero:
        m = 0.5 * (lo + hi)
    elif a_is_zero:
        m = min(2.0 * lo, 0.5 * (lo + hi))
    elif b_is_zero:
        m = 0.5 * hi
        m = max(m, lo * (1 + 1e-9))
    else:
        m = math.sqrt(lo * hi)
    if a_is_zero:
        left = lo + np.geomspace(d, m - lo, half)
    else:
        left = np.geomspace(lo, m, half)
    if b_is_zero:
        right = hi - np.geomspace(d, hi - m, n - half)[::-1]
    else:
        right = np.geomspace(m, hi, n - half)
    return np.unique(np.concatenate([left, right]))


def _refine(model, r, F, i, depth, pick):
    """Zoom on grid index i (a local extremum) ``depth`` times."""
    best_r, best_F = r[i], F[i]
    a = r[max(i - 1, 0)]
    b = r[min(i + 1, len(r) - 1)]
    for _ in range(depth):
        sub = np.linspace(a, b, 65)
        Fs = shape_function(model, sub)
        if np.all(np.isnan(Fs)):
            break
        j = int(pick(Fs))
        if (Fs[j] < best_F) if pick is np.nanargmin else (Fs[j] > best_F):
            best_r, best_F = sub[j], Fs[j]
        a, b = sub[max(j - 1, 0)], sub[min(j + 1, len(sub) - 1)]
    return best_r, best_F


def certify_sign(model: PotentialModel, zeros: ZeroStructure, *, grid_size: int = 4096,
                 depth: int = 6, endpoint_offset: float = 1e-8, max_refine: int = 8) -> ShapeCertificate:
    """Evidence that F >= 0 or F <= 0 on (r_minus, r_plus).

    F is sampled on a log grid clustered at finite zeros, stopping
    ``endpoint_offset * R`` short of them; the lowest (and highest) local
    extrema are then refined ``depth`` times.
    """
    if not zeros.conforming:
        raise ValueError("zero structure does not conform; no certificate")
    lo, hi = _interval(model, zeros)
    if not hi > lo:
        raise NoAttractiveRegion("empty attractive interval")
    d = endpoint_offset * model.R
    a_zero = not zeros.origin_attractive
    b_zero = not zeros.infinity_attractive
    r = _grid(lo, hi, a_zero, b_zero, d, grid_size)
    r = r[(r > 0) & (r >= zeros.scan_range[0])]
    F = shape_function(model, r)
    ok = np.isfinite(F)
    if not np.any(ok):
        raise NoAttractiveRegion("F could not be evaluated anywhere on the interval")
    r, F = r[ok], F[ok]

    def extrema(vals, lower):
        inner = vals[1:-1]
        if lower:
            mask = (inner <= vals[:-2]) & (inner <= vals[2:])
        else:
            mask = (inner >= vals[:-2]) & (inner >= vals[2:])
        idx = np.nonzero(mask)[0] + 1
        idx = np.concatenate([idx, [0, len(vals) - 1]])
        order = np.argsort(vals[idx] if lower else -vals[idx])
        return idx[order][:max_refine]

    i_min = int(np.argmin(F))
    min_r, min_F = r[i_min], F[i_min]
    for i in extrema(F, True):
        rr, ff = _refine(model, r, F, int(i), depth, np.nanargmin)
        if ff < min_F:
            min_r, min_F = rr, ff
    i_max = int(np.argmax(F))
    max_r, max_F = r[i_max], F[i_max]
    for i in extrema(F, False):
        rr, ff = _refine(model, r, F, int(i), depth, np.nanargmax)
        if ff > max_F:
            max_r, max_F = rr, ff

    tol = 1e-9 * max(1.0, float(abs(np.median(F))))
    if min_F >= -tol:
        verdict = "FNonNegative"
    elif max_F <= tol:
        verdict = "FNonPositive"
    else:
        verdict = "Indefinite"
    return ShapeCertificate(verdict, float(min_F), float(min_r), float(max_F), float(max_r),
                            int(len(r)), depth, tol, (float(lo), float(hi)), d, zeros)

"""The semiclassical estimate (1/pi) * integral of sqrt(-V^-) over (0, inf).

Quadrature handles three kinds of endpoint:

* a simple zero (or jump) r0 of V: substitute r = r0 +- t^2, which turns the
  sqrt(r - r0) behaviour into a smooth integrand;
* the origin and infinity: substitute r = anchor * exp(+-s) and integrate
  decade by decade; the chunk-to-chunk ratio gives a geometric estimate of
  what is left, used both to stop and as the reported tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .exceptions import NonIntegrableError, NumericalError
from .potentials import (EffectivePotential, ExpFamily, InversePower, LennardJones, Morse,
                         PoschlTeller, PotentialModel, SquareWell)
from .quadrature import integrate
from .shape import scan_lower, sign_changes, tail_radius
from .special import gamma_function

__all__ = [
    "SemiclassicalEstimate",
    "semiclassical_integral",
    "closed_form_semiclassical",
    "has_closed_form",
    "running_integral",
    "gamma_function",
]

LN10 = math.log(10.0)
OUTER_CAP_DECADES = 60
INNER_CAP_DECADES = 150


@dataclass(frozen=True)
class SemiclassicalEstimate:
    value: float
    abs_error: float
    truncation_radius: float
    tail_bound: float
    method: str = "quadrature"

    def to_dict(self):
        return asdict(self)


def _integrand(model):
    def f(r):
        with np.errstate(all="ignore"):
            v = np.asarray(model.value(r), dtype=float)
        return np.sqrt(np.where(v < 0, -v, 0.0))
    return f


class _Acc:
    """Running sums for the pieces of one integral."""

    def __init__(self):
        self.value = 0.0
        self.error = 0.0
        self.tail = 0.0
        self.outer = 0.0

    def add(self, res):
        self.value += res.value
        self.error += res.abs_error


def _sqrt_piece(f, r0, h, side, rel_tol, acc):
    """Integral over [r0, r0+h] (side=+1) or [r0-h, r0] (side=-1) with r = r0 +- t^2."""
    if h <= 0:
        return
    g = lambda t: 2.0 * t * f(r0 + side * t * t)
    acc.add(integrate(g, 0.0, math.sqrt(h), rel_tol=rel_tol, abs_tol=1e-300))


def _log_piece(f, anchor, outward, rel_tol, acc, ref, scale):
    """Integral from anchor to infinity (outward) or from 0 to anchor."""
    sign = 1.0 if outward else -1.0
    h = lambda s: f(anchor * np.exp(sign * s)) * anchor * np.exp(sign * s)
    cap = OUTER_CAP_DECADES if outward else INNER_CAP_DECADES
    if outward:
        cap = max(cap, int(math.ceil(math.log10(max(scale / anchor, 1.0)))) + OUTER_CAP_DECADES)
    else:
        # stay above ~1e-150 R so that r^-2 singularities cannot overflow
        cap = min(cap, int(math.log10(anchor / (1e-150 * scale))))
    chunks = []
    total = 0.0
    for k in range(cap):
        res = integrate(h, k * LN10, (k + 1) * LN10, rel_tol=rel_tol,
                        abs_tol=1e-3 * rel_tol * max(ref + total, 1e-300), initial_panels=2)
        chunks.append(res.value)
        total += res.value
        acc.add(res)
        if k < 2:
            continue
        c_prev, c_last = chunks[-2], chunks[-1]
        if c_last == 0.0:
            remainder, ratio = 0.0, 0.0
        elif c_prev <= 0.0:
            continue
        else:
            ratio = c_last / c_prev
            remainder = c_last * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
        if remainder <= 0.1 * rel_tol * max(ref + total, 1e-300):
            acc.value += remainder
            acc.tail += remainder
            if outward:
                acc.outer = anchor * 10.0 ** (k + 1)
            return
    # cap reached: accept only a clean geometric (power-law) remainder
    if len(chunks) >= 3 and chunks[-2] > 0:
        r1 = chunks[-1] / chunks[-2]
        r0 = chunks[-2] / chunks[-3] if chunks[-3] > 0 else math.inf
        if r1 < 1.0 - 1e-3 and abs(r1 - r0) <= 1e-3 * (1.0 - r1):
            remainder = chunks[-1] * r1 / (1.0 - r1)
            acc.value += remainder
            acc.tail += remainder * max(abs(r1 - r0) / (1.0 - r1), 1e-6)
            if outward:
                acc.outer = math.inf
            return
        if r1 >= 1.0 - 1e-3:
            where = "infinity" if outward else "the origin"
            raise NonIntegrableError(f"sqrt(-V) is not integrable at {where}")
    raise NumericalError("tail bound not achievable within the truncation cap")


def _segments(model):
    """Attractive segments as (a, a_kind, b, b_kind)."""
    lo, hi_dom = model.domain
    scan_lo = scan_lower(model)
    r_max = tail_radius(model)
    roots, neg_first, neg_last = sign_changes(model, scan_lo, r_max)
    start_kind = "origin" if lo == 0 else "edge"
    end_kind = "infinity" if math.isinf(hi_dom) else "edge"
    bounds = [(lo if lo > 0 else 0.0, start_kind)] + [(x, "zero") for x in roots] + [
        (hi_dom if math.isfinite(hi_dom) else math.inf, end_kind)]
    segs = []
    neg = neg_first
    for (a, ak), (b, bk) in zip(bounds[:-1], bounds[1:]):
        if neg:
            segs.append((a, ak, b, bk))
        neg = not neg
    return segs


def _segment_integral(f, seg, rel_tol, acc, ref, R):
    a, ak, b, bk = seg
    if ak == "zero" and bk == "zero":
        m = 0.5 * (a + b)
        _sqrt_piece(f, a, m - a, +1, rel_tol, acc)
        _sqrt_piece(f, b, b - m, -1, rel_tol, acc)
    elif ak == "zero" and bk == "infinity":
        m = a + max(a, R)
        _sqrt_piece(f, a, m - a, +1, rel_tol, acc)
        _log_piece(f, m, True, rel_tol, acc, ref + acc.value, R)
    elif ak == "origin" and bk == "zero":
        m = 0.5 * b
        _log_piece(f, m, False, rel_tol, acc, ref + acc.value, R)
        _sqrt_piece(f, b, b - m, -1, rel_tol, acc)
    elif ak == "origin" and bk == "infinity":
        _log_piece(f, R, False, rel_tol, acc, ref, R)
        _log_piece(f, R, True, rel_tol, acc, ref + acc.value, R)
    else:
        # table edges are plain endpoints
        if ak == "origin":
            m = 0.5 * b
            _log_piece(f, m, False, rel_tol, acc, ref, R)
            a = m
        if ak == "zero" and bk == "edge":
            m = 0.5 * (a + b)
            _sqrt_piece(f, a, m - a, +1, rel_tol, acc)
            a = m
        if bk == "zero":
            m = 0.5 * (a + b)
            _sqrt_piece(f, b, b - m, -1, rel_tol, acc)
            b = m
        acc.add(integrate(f, a, b, rel_tol=rel_tol, initial_panels=8))
        if bk == "edge":
            acc.outer = max(acc.outer, b)


def semiclassical_integral(model: PotentialModel, rel_tol: float = 1e-10) -> SemiclassicalEstimate:
    """(1/pi) * integral_0^inf sqrt(-V^-(r)) dr by adaptive quadrature."""
    if not 1e-12 < rel_tol < 1e-2:
        raise ValueError(f"rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")
    if model.g == 0:
        return SemiclassicalEstimate(0.0, 0.0, 0.0, 0.0)
    f = _integrand(model)
    acc = _Acc()
    segs = _segments(model)
    for seg in segs:
        _segment_integral(f, seg, rel_tol, acc, acc.value, model.R)
    value = acc.value / math.pi
    outer = acc.outer if acc.outer else (segs[-1][2] if segs else 0.0)
    return SemiclassicalEstimate(float(value), float(acc.error + abs(acc.tail)) / math.pi, float(outer),
                                 float(abs(acc.tail)) / math.pi)


def running_integral(model: PotentialModel, x: float, rel_tol: float = 1e-12) -> float:
    """integral_0^x sqrt(-V^-(r)) dr, for x inside the first attractive segment."""
    f = _integrand(model)
    acc = _Acc()
    segs = _segments(model)
    if not segs:
        return 0.0
    a, ak, b, bk = segs[0]
    if x <= a:
        return 0.0
    if x >= b:
        acc2 = _Acc()
        _segment_integral(f, segs[0], rel_tol, acc2, 0.0, model.R)
        return acc2.value
    if ak == "origin":
        m = min(0.5 * x, model.R)
        _log_piece(f, m, False, rel_tol, acc, 0.0, model.R)
        acc.add(integrate(f, m, x, rel_tol=rel_tol, initial_panels=4))
    elif ak == "zero":
        m = a + 0.5 * (x - a)
        _sqrt_piece(f, a, m - a, +1, rel_tol, acc)
        acc.add(integrate(f, m, x, rel_tol=rel_tol, initial_panels=4))
    else:
        acc.add(integrate(f, a, x, rel_tol=rel_tol, initial_panels=4))
    return acc.value


def has_closed_form(model: PotentialModel) -> bool:
    return isinstance(model, (SquareWell, Morse, PoschlTeller, LennardJones, ExpFamily, InversePower))


def closed_form_semiclassical(model: PotentialModel) -> SemiclassicalEstimate:
    """Exact estimate for the built-in families (no R dependence)."""
    if isinstance(model, EffectivePotential) or not has_closed_form(model):
        raise ValueError(f"no closed form for {model.family}"
                         + (f" with ell={model.ell}" if model.ell else ""))
    g = model.g
    if isinstance(model, SquareWell):
        v = g / math.pi
    elif isinstance(model, Morse):
        # sqrt(-V) = (g/R) sqrt(w (2 - w)); with w = 2 sin^2(theta) the integral is 2 theta + sin 2 theta
        theta = math.asin(math.sqrt(min(1.0, math.exp(model.alpha) / 2.0)))
        v = g * (2.0 * theta + math.sin(2.0 * theta)) / math.pi
    elif isinstance(model, PoschlTeller):
        v = g / 2.0
    elif isinstance(model, LennardJones):
        v = g / (12.0 * math.sqrt(math.pi)) * gamma_function(1.0 / 3.0) / gamma_function(11.0 / 6.0)
    elif isinstance(model, ExpFamily):
        k = model.alpha / (2.0 * model.beta)
        v = g / (math.pi * model.beta) * 2.0 ** k * gamma_function(k)
    else:
        v = 2.0 * g / (math.pi * (model.p - 2.0))
    return SemiclassicalEstimate(v, 0.0, math.inf, 0.0, method="closed-form")

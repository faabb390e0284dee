"""Dormand-Prince 5(4) integrator for small scalar systems.

Written for the two tiny systems this package solves (the radial equation
as a 2-vector and the one-dimensional phase equation), so the state is a
tuple of Python floats and the right-hand side is called once per stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import IntegrationError

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# 5th-order weights are the last row of _A; E = b5 - b4
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass
class StepStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0


def dopri5(fun, t0, y0, t1, *, rtol=1e-10, atol=1e-12, h0=None, hmax=None,
           on_step=None, stats=None, max_steps=2_000_000):
    """Integrate ``y' = fun(t, y)`` from t0 to t1 (either direction).

    ``hmax`` may be a number or a callable of t giving the largest allowed
    |h|.  ``on_step(t_old, y_old, t_new, y_new)`` is called after every
    accepted step; if it returns a tuple, that tuple replaces ``y_new``
    (used for renormalisation).  Returns ``(t1, y)``.
    """
    stats = stats if stats is not None else StepStats()
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0:
        return t1, tuple(y0)
    n = len(y0)
    y = tuple(float(v) for v in y0)
    t = float(t0)

    def _hmax(tt):
        if hmax is None:
            return span
        return hmax(tt) if callable(hmax) else hmax

    h = abs(h0) if h0 else 1e-3 * span
    h = min(h, span, _hmax(t))
    k1 = fun(t, y)
    stats.evaluations += 1
    while True:
        remaining = abs(t1 - t)
        if remaining <= 4e-16 * max(abs(t), abs(t1)):
            break
        last = h >= remaining
        if last:
            h = remaining
        hs = direction * h
        ks = [k1]
        for s in range(1, 7):
            a = _A[s]
            yi = tuple(y[i] + hs * sum(a[j] * ks[j][i] for j in range(s)) for i in range(n))
            ks.append(fun(t + _C[s] * hs, yi))
        stats.evaluations += 6
        y_new = yi  # stage 7 state is the 5th-order solution (FSAL)
        err = 0.0
        for i in range(n):
            ei = hs * sum(_E[j] * ks[j][i] for j in range(7))
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err += (ei / sc) ** 2
        err = math.sqrt(err / n)
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t_new = t1 if last else t + hs
            stats.steps += 1
            if on_step is not None:
                repl = on_step(t, y, t_new, y_new)
                if repl is not None:
                    y_new = tuple(repl)
                    ks[6] = fun(t_new, y_new)
                    stats.evaluations += 1
            t, y = t_new, y_new
            k1 = ks[6]
            if last:
                break
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(h * fac, _hmax(t))
        else:
            stats.rejected += 1
            h *= max(0.1, 0.9 * err ** -0.2)
            if h < 1e-14 * max(abs(t), 1e-300):
                raise IntegrationError(f"step-size underflow at t = {t:.6g}")
        if stats.steps + stats.rejected > max_steps:
            raise IntegrationError(f"too many steps (>{max_steps}) before t = {t1:.6g}")
    return t, y

"""Figures for reports and sweeps, written straight to files.

matplotlib is imported lazily (Agg backend) so the rest of the package
works without it.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .shape import shape_function, tail_radius, scan_lower

__all__ = ["plot_sweep", "plot_shape", "plot_phase", "plot_wavefunction"]


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("figures need matplotlib (pip install matplotlib)") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return path


def plot_sweep(reports, path, title=""):
    """N, N_semi and the lower limit against g."""
    plt = _pyplot()
    rows = [r for r in reports if r.n_exact is not None and r.n_semi is not None]
    g = np.array([float(r.g) for r in rows])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.step(g, [r.n_exact for r in rows], where="post", label="N (node count)", lw=1.6)
    ax.plot(g, [r.n_semi.value for r in rows], "--", label="N_semi", lw=1.0)
    low = [(float(r.g), r.lower_11.value) for r in rows if r.lower_11.applicable]
    if low:
        gl, vl = zip(*low)
        ax.step(gl, vl, where="post", label="floor(N_semi)", lw=1.0)
    ax.set_xlabel("g")
    ax.set_ylabel("bound states")
    ax.set_title(title)
    ax.legend(frameon=False)
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_shape(model, zeros, path, points=2000):
    """V(r) and the shape function F(r) on the attractive interval."""
    plt = _pyplot()
    lo = max(scan_lower(model), zeros.r_minus * 0.5 if zeros else 0.0)
    hi = tail_radius(model, tol=1e-4)
    if zeros is not None and math.isfinite(zeros.r_plus):
        hi = min(hi, 3.0 * zeros.r_plus)
    r = np.geomspace(lo, hi, points)
    v = np.asarray(model.value(r), dtype=float)
    fig, (a1, a2) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 5.2))
    a1.plot(r, v, lw=1.2)
    a1.axhline(0.0, color="0.6", lw=0.6)
    a1.set_ylabel("V(r)")
    a1.set_xscale("log")
    vmin = np.nanmin(v)
    a1.set_ylim(1.2 * vmin if vmin < 0 else -1.0, max(-0.5 * vmin, 1.0))
    F = shape_function(model, r)
    a2.plot(r, F, lw=1.2, color="C3")
    a2.axhline(0.0, color="0.6", lw=0.6)
    a2.set_ylabel("F(r)")
    a2.set_xlabel("r")
    fin = F[np.isfinite(F)]
    if fin.size:
        lo_f, hi_f = np.percentile(fin, [2, 90])
        pad = 0.2 * (hi_f - lo_f + 1e-12)
        a2.set_ylim(min(lo_f - pad, -pad), hi_f + pad)
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_phase(samples, path, n_semi=None):
    """eta(r)/pi from a phase trace."""
    plt = _pyplot()
    r, eta = zip(*samples)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(r, np.asarray(eta) / math.pi, lw=1.2)
    top = int(math.ceil(max(eta) / math.pi))
    for k in range(top + 1):
        ax.axhline(k, color="0.85", lw=0.5)
    if n_semi is not None:
        ax.axhline(n_semi, color="C1", ls="--", lw=1.0, label="N_semi")
        ax.legend(frameon=False)
    ax.set_xlabel("r")
    ax.set_ylabel("eta / pi")
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_wavefunction(samples, path):
    """Zero-energy solution; each renormalised stretch is rescaled to unit peak."""
    plt = _pyplot()
    arr = np.asarray(samples, dtype=float)
    r, u, seg = arr[:, 0], arr[:, 1], arr[:, 2]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for s in np.unique(seg):
        m = seg == s
        peak = np.max(np.abs(u[m])) or 1.0
        ax.plot(r[m], u[m] / peak, lw=1.0, color="C0")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xscale("log")
    ax.set_xlabel("r")
    ax.set_ylabel("u(r) (rescaled)")
    out = _save(fig, path)
    plt.close(fig)
    return out

"""Central potentials V(r) in units hbar = 2m = 1.

Every built-in family is written as ``V(r) = g**2 * v(r)`` with a
dimensionless coupling ``g`` and a length scale ``R``; ``V`` carries units
of 1/length**2.  Analytic families return closed-form first and second
derivatives.  Custom expressions use central finite differences and tabulated
data use a cubic spline.

All ``value``/``derivatives`` methods are vectorised over numpy arrays and
also accept plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import DomainError

__all__ = [
    "DerivativeBundle",
    "PotentialModel",
    "SquareWell",
    "Morse",
    "PoschlTeller",
    "LennardJones",
    "ExpFamily",
    "InversePower",
    "Custom",
    "Tabulated",
    "EffectivePotential",
    "FAMILIES",
    "evaluate",
    "negative_part",
    "effective_potential",
    "load_tabulated",
    "read_table",
    "make_family",
]


class DerivativeBundle(NamedTuple):
    """V, V' and V'' at one radius (or arrays of them).

    ``step`` is the finite-difference step used, or None for closed forms.
    """

    v0: float
    v1: float
    v2: float
    step: float | None = None


class PotentialModel:
    """Base class.  Subclasses implement ``value`` and ``derivatives``."""

    family = "Custom"
    #: Radii where V is discontinuous; integrators stop exactly there.
    breakpoints: tuple = ()

    @property
    def ell(self) -> int:
        return 0

    @property
    def centrifugal(self) -> float:
        """Coefficient c of the c/r**2 term that survives at large r."""
        return float(self.ell * (self.ell + 1))

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, math.inf)

    @property
    def strength(self) -> float:
        return self.g ** 2

    def value(self, r):
        raise NotImplementedError

    def derivatives(self, r) -> DerivativeBundle:
        raise NotImplementedError

    def shape(self, r):
        """The coupling-free shape v(r) = V(r)/g**2."""
        if self.g == 0:
            raise ZeroDivisionError("shape undefined for g = 0")
        return self.value(r) / self.g ** 2

    def with_coupling(self, g: float) -> "PotentialModel":
        """Same shape, different coupling."""
        from dataclasses import replace

        return replace(self, g=g)

    def params(self) -> dict:
        """Family name and parameters, for reports."""
        out = {"family": self.family}
        for name in getattr(self, "__dataclass_fields__", {}):
            val = getattr(self, name)
            if isinstance(val, (int, float, str)):
                out[name] = val
        return out

    def _check_common(self):
        if not (self.g >= 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be finite and >= 0, got {self.g}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"R must be finite and > 0, got {self.R}")


@dataclass(frozen=True)
class SquareWell(PotentialModel):
    """V = -g^2/R^2 for r <= R, 0 beyond (theta(0) = 1)."""

    g: float = 1.0
    R: float = 1.0
    family = "SquareWell"

    def __post_init__(self):
        self._check_common()

    @property
    def breakpoints(self):
        return (self.R,)

    def value(self, r):
        k = self.g ** 2 / self.R ** 2
        return np.where(np.asarray(r) <= self.R, -k, 0.0) + 0.0 * np.asarray(r, dtype=float)

    def derivatives(self, r):
        v = self.value(r)
        z = np.zeros_like(v)
        return DerivativeBundle(v, z, z)


@dataclass(frozen=True)
class Morse(PotentialModel):
    """V = -(g/R)^2 [2 exp(alpha - r/R) - exp(2 alpha - 2 r/R)]."""

    g: float = 1.0
    R: float = 1.0
    alpha: float = 1.0
    family = "Morse"

    def __post_init__(self):
        self._check_common()
        if not self.alpha > 0:
            raise ValueError("Morse requires alpha > 0")

    def _w(self, r):
        return np.exp(self.alpha - np.asarray(r, dtype=float) / self.R)

    def value(self, r):
        w = self._w(r)
        return -(self.g / self.R) ** 2 * w * (2.0 - w)

    def derivatives(self, r):
        w = self._w(r)
        k = (self.g / self.R) ** 2
        v0 = -k * w * (2.0 - w)
        v1 = 2.0 * k * w * (1.0 - w) / self.R
        v2 = 2.0 * k * w * (2.0 * w - 1.0) / self.R ** 2
        return DerivativeBundle(v0, v1, v2)


@dataclass(frozen=True)
class PoschlTeller(PotentialModel):
    """V = -(g/R)^2 / cosh^2(r/R)."""

    g: float = 1.0
    R: float = 1.0
    family = "PoschlTeller"

    def __post_init__(self):
        self._check_common()

    def _sech2_tanh(self, r):
        x = np.asarray(r, dtype=float) / self.R
        e = np.exp(-2.0 * np.abs(x))
        sech2 = 4.0 * e / (1.0 + e) ** 2
        return sech2, np.tanh(x)

    def value(self, r):
        s, _ = self._sech2_tanh(r)
        return -(self.g / self.R) ** 2 * s

    def derivatives(self, r):
        s, t = self._sech2_tanh(r)
        k = (self.g / self.R) ** 2
        v0 = -k * s
        v1 = 2.0 * k * s * t / self.R
        v2 = -k * s * (4.0 * t * t - 2.0 * s) / self.R ** 2
        return DerivativeBundle(v0, v1, v2)


@dataclass(frozen=True)
class LennardJones(PotentialModel):
    """V = (g/R)^2 [(R/r)^12 - (R/r)^6]."""

    g: float = 1.0
    R: float = 1.0
    family = "LennardJones"

    def __post_init__(self):
        self._check_common()

    def value(self, r):
        y = self.R / np.asarray(r, dtype=float)
        y6 = y ** 6
        return (self.g / self.R) ** 2 * y6 * (y6 - 1.0)

    def derivatives(self, r):
        y = self.R / np.asarray(r, dtype=float)
        y6 = y ** 6
        k = (self.g / self.R) ** 2
        v0 = k * y6 * (y6 - 1.0)
        v1 = k * y6 * y * (-12.0 * y6 + 6.0) / self.R
        v2 = k * y6 * y * y * (156.0 * y6 - 42.0) / self.R ** 2
        return DerivativeBundle(v0, v1, v2)


@dataclass(frozen=True)
class ExpFamily(PotentialModel):
    """V = -(g/R)^2 (r/R)^(alpha-2) exp[-(r/R)^beta], alpha > beta > 0.

    ``alpha=2, beta=1`` is the plain exponential well.
    """

    g: float = 1.0
    R: float = 1.0
    alpha: float = 2.0
    beta: float = 1.0
    family = "ExpFamily"

    def __post_init__(self):
        self._check_common()
        if not self.alpha > self.beta > 0:
            raise ValueError(f"ExpFamily requires alpha > beta > 0, got alpha={self.alpha}, beta={self.beta}")

    def value(self, r):
        x = np.asarray(r, dtype=float) / self.R
        return -(self.g / self.R) ** 2 * x ** (self.alpha - 2.0) * np.exp(-x ** self.beta)

    def derivatives(self, r):
        x = np.asarray(r, dtype=float) / self.R
        a, b = self.alpha - 2.0, self.beta
        v0 = -(self.g / self.R) ** 2 * x ** a * np.exp(-x ** b)
        # logarithmic derivative L = V'/V and its derivative, in units of 1/R
        L = a / x - b * x ** (b - 1.0)
        dL = -a / x ** 2 - b * (b - 1.0) * x ** (b - 2.0)
        v1 = v0 * L / self.R
        v2 = v0 * (L * L + dL) / self.R ** 2
        return DerivativeBundle(v0, v1, v2)


@dataclass(frozen=True)
class InversePower(PotentialModel):
    """V = -g^2 R^(p-2) (r+R)^(-p), p > 2."""

    g: float = 1.0
    R: float = 1.0
    p: float = 3.0
    family = "InversePower"

    def __post_init__(self):
        self._check_common()
        if not self.p > 2:
            raise ValueError("InversePower requires p > 2 (finite semiclassical integral)")

    def value(self, r):
        s = 1.0 + np.asarray(r, dtype=float) / self.R
        return -(self.g / self.R) ** 2 * s ** (-self.p)

    def derivatives(self, r):
        s = 1.0 + np.asarray(r, dtype=float) / self.R
        k = (self.g / self.R) ** 2
        p = self.p
        v0 = -k * s ** (-p)
        v1 = k * p * s ** (-p - 1.0) / self.R
        v2 = -k * p * (p + 1.0) * s ** (-p - 2.0) / self.R ** 2
        return DerivativeBundle(v0, v1, v2)


def _fd_step(r):
    # relative step: keeps r - 2h > 0 and balances truncation vs round-off for V''
    return 1e-3 * np.abs(r)


@dataclass(frozen=True)
class Custom(PotentialModel):
    """V = g^2 f(r) for a user function f (usually from ``parse_expression``).

    ``jet``, when given, maps r to (f, f', f'') exactly; otherwise
    derivatives use 5-point central differences with step h = 1e-3 r.
    """

    func: Callable = field(compare=False)
    text: str = ""
    g: float = 1.0
    R: float = 1.0
    jet: Callable | None = field(default=None, compare=False, repr=False)
    family = "Custom"

    def __post_init__(self):
        self._check_common()

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.g ** 2 * np.asarray(self.func(r), dtype=float) + 0.0 * r

    def derivatives(self, r):
        r = np.asarray(r, dtype=float)
        if self.jet is not None:
            k = self.g ** 2
            v0, v1, v2 = self.jet(r)
            return DerivativeBundle(k * v0, k * v1, k * v2)
        h = _fd_step(r)
        f = self.value
        fm2, fm1, f0, fp1, fp2 = f(r - 2 * h), f(r - h), f(r), f(r + h), f(r + 2 * h)
        v1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
        v2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
        return DerivativeBundle(f0, v1, v2, h)

    def params(self):
        return {"family": self.family, "expr": self.text, "g": self.g, "R": self.R}


@dataclass(frozen=True)
class Tabulated(PotentialModel):
    """Cubic-spline interpolant through (radius, value) samples, times g^2.

    Queries outside ``[radii[0], radii[-1]]`` raise DomainError; no tail is
    guessed beyond the last sample.
    """

    radii: tuple
    values: tuple
    g: float = 1.0
    R: float = 1.0
    source: str = ""
    family = "Tabulated"

    def __post_init__(self):
        self._check_common()
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("radii and values must be 1-D and of equal length")
        if r.size < 4:
            raise ValueError(f"need at least 4 points, got {r.size}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("table contains non-finite entries")
        if not np.all(np.diff(r) > 0):
            raise ValueError("radii must be strictly increasing")
        if r[0] <= 0:
            raise ValueError("radii must be positive")

    @cached_property
    def _spline(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(np.asarray(self.radii, float), np.asarray(self.values, float))

    @property
    def domain(self):
        return (float(self.radii[0]), float(self.radii[-1]))

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        # small slack so that an exact endpoint computed in floating point is accepted
        slack = 1e-12 * hi
        if np.any(r < lo - slack) or np.any(r > hi + slack):
            raise DomainError(f"radius outside table range [{lo}, {hi}]")
        return np.clip(r, lo, hi)

    def value(self, r):
        return self.g ** 2 * self._spline(self._check(r))

    def derivatives(self, r):
        r = self._check(r)
        s = self._spline
        k = self.g ** 2
        return DerivativeBundle(k * s(r), k * s(r, 1), k * s(r, 2))

    def params(self):
        return {"family": self.family, "source": self.source, "points": len(self.radii), "g": self.g}


@dataclass(frozen=True)
class EffectivePotential(PotentialModel):
    """V(r) + ell(ell+1)/r^2 for a base model."""

    base: PotentialModel
    ell: int = 0

    def __post_init__(self):
        if self.ell < 0 or int(self.ell) != self.ell:
            raise ValueError("ell must be a nonnegative integer")

    @property
    def family(self):
        return self.base.family

    @property
    def g(self):
        return self.base.g

    @property
    def R(self):
        return self.base.R

    @property
    def breakpoints(self):
        return self.base.breakpoints

    @property
    def domain(self):
        return self.base.domain

    def with_coupling(self, g):
        return EffectivePotential(self.base.with_coupling(g), self.ell)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.base.value(r) + self.centrifugal / r ** 2

    def derivatives(self, r):
        r = np.asarray(r, dtype=float)
        b = self.base.derivatives(r)
        c = self.centrifugal
        return DerivativeBundle(b.v0 + c / r ** 2, b.v1 - 2.0 * c / r ** 3, b.v2 + 6.0 * c / r ** 4, b.step)

    def params(self):
        out = self.base.params()
        out["ell"] = self.ell
        return out


FAMILIES = {
    cls.family: cls
    for cls in (SquareWell, Morse, PoschlTeller, LennardJones, ExpFamily, InversePower)
}


def make_family(name: str, **params) -> PotentialModel:
    """Build a built-in family by (case-insensitive) name, dropping None params."""
    lookup = {k.lower(): v for k, v in FAMILIES.items()}
    aliases = {"exponential": ("expfamily", {"alpha": 2.0, "beta": 1.0}),
               "pt": ("poschlteller", {}), "lj": ("lennardjones", {})}
    key = name.lower().replace("-", "").replace("_", "")
    preset = {}
    if key in aliases:
        key, preset = aliases[key]
    if key not in lookup:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)} or 'exponential'")
    cls = lookup[key]
    kwargs = {**preset, **{k: v for k, v in params.items() if v is not None}}
    allowed = set(cls.__dataclass_fields__)
    extra = set(kwargs) - allowed
    if extra:
        raise ValueError(f"{cls.family} does not take parameters {sorted(extra)}")
    return cls(**kwargs)


def _check_radius(model, r):
    r = float(r)
    if not r > 0:
        raise DomainError(f"radius must be > 0, got {r}")
    return r


def evaluate(model: PotentialModel, r: float) -> DerivativeBundle:
    """V, V', V'' at a single radius r > 0."""
    r = _check_radius(model, r)
    b = model.derivatives(r)
    return DerivativeBundle(float(b.v0), float(b.v1), float(b.v2),
                            None if b.step is None else float(b.step))


def negative_part(model: PotentialModel, r):
    """V(r) where V < 0, else 0."""
    if np.ndim(r) == 0:
        _check_radius(model, r)
    elif np.any(np.asarray(r) <= 0):
        raise DomainError("radius must be > 0")
    v = model.value(r)
    return np.where(v < 0, v, 0.0)


def effective_potential(model: PotentialModel, ell: int) -> PotentialModel:
    """Add the centrifugal term ell(ell+1)/r^2.  ``ell=0`` returns the model."""
    if ell < 0 or int(ell) != ell:
        raise ValueError(f"ell must be a nonnegative integer, got {ell}")
    if isinstance(model, EffectivePotential):
        model = model.base
    if ell == 0:
        return model
    return EffectivePotential(model, int(ell))


def load_tabulated(radii, values, *, g: float = 1.0, source: str = "") -> Tabulated:
    """Build a Tabulated model from sample lists."""
    return Tabulated(tuple(float(x) for x in radii), tuple(float(x) for x in values), g=g, source=source)


def read_table(path) -> Tabulated:
    """Read a two-column (radius, value) whitespace table with '#' comments."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] < 2:
        raise ValueError(f"{path}: expected two columns")
    return load_tabulated(data[:, 0], data[:, 1], source=str(path))

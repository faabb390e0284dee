"""Bound-state counts from the zero-energy radial equation u'' = V u, u(0) = 0.

By Sturm oscillation the number of S-wave (or ell-wave, for an effective
potential) bound states equals the number of zeros of the regular
zero-energy solution on (0, inf).  Two independent counters are provided:

* ``count_nodes_shooting`` integrates (u, u') and counts sign changes;
* ``count_nodes_prufer`` integrates the phase eta defined by
  sqrt(-V) cot(eta) = u'/u + V'/(4V), which obeys
  eta' = sqrt(-V) + F sin^2(eta) / sqrt(-V) on the attractive interval.

Beyond the last integration radius V is within tolerance of ell(ell+1)/r^2,
so u = a (r/r_t)^(ell+1) + b (r/r_t)^(-ell) there and one more zero occurs
exactly when a and u(r_t) have opposite signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from .exceptions import DomainError, NumericalError
from .ode import StepStats, dopri5
from .potentials import Morse, PoschlTeller, PotentialModel, SquareWell, EffectivePotential
from .shape import find_zero_structure, tail_radius, ZeroStructure

__all__ = [
    "NodeCountResult",
    "PruferTrace",
    "count_nodes_shooting",
    "count_nodes_prufer",
    "count_analytic",
    "tail_extra_node",
]

SHOOTING = "Shooting"
PRUFER = "Prufer"
ANALYTIC = "Analytic"

RENORM_THRESHOLD = 1e100
MARGINAL_TOL = 1e-6
PHASE_TOL = 1e-4
SNAP_TOL = 1e-3
START_OFFSET = 1e-8
BARRIER_DEPTH = 40.0
HANDOFF_TAIL_TOL = 1e-3


@dataclass
class IntegrationStats:
    steps: int = 0
    rejected: int = 0
    renormalizations: int = 0
    evaluations: int = 0

    def absorb(self, st: StepStats):
        self.steps += st.steps
        self.rejected += st.rejected
        self.evaluations += st.evaluations


@dataclass
class NodeCountResult:
    n_nodes: int
    method: str
    r_last_node: float | None = None
    stats: IntegrationStats = field(default_factory=IntegrationStats)
    marginal: bool = False
    r_start: float = 0.0
    r_max: float = math.inf
    samples: list | None = None

    def to_dict(self):
        d = asdict(self)
        d.pop("samples")
        return d


@dataclass
class PruferTrace:
    eta_start: float
    eta_end: float
    n_tilde: int
    n_total: int
    r_minus: float
    r_plus: float
    eps_start: float
    eps_end: float | None
    marginal: bool = False
    snap_distance: float = 0.0
    stats: IntegrationStats = field(default_factory=IntegrationStats)
    samples: list | None = None

    @property
    def phase_gain(self) -> float:
        return self.eta_end - self.eta_start

    def as_result(self) -> NodeCountResult:
        return NodeCountResult(self.n_total, PRUFER, None, self.stats, self.marginal,
                               self.r_minus, self.r_plus)

    def to_dict(self):
        d = asdict(self)
        d.pop("samples")
        return d


def _v(model, r):
    return float(model.value(r))


def tail_extra_node(ell: int, r: float, u: float, du: float):
    """(extra, marginal) for the free tail V = ell(ell+1)/r^2 beyond r."""
    a = (ell * u + r * du) / (2 * ell + 1)
    b = ((ell + 1) * u - r * du) / (2 * ell + 1)
    scale = abs(a) + abs(b)
    if scale == 0:
        return 0, True
    return int(a * u < 0), abs(a) <= MARGINAL_TOL * scale


def _start_log_derivative(model, r):
    """u'/u of the regular solution at small r.

    (1 + sqrt(1 + 4 V r^2)) / (2 r) is exact for V = c/r^2 (giving
    (ell+1)/r), tends to 1/r for a regular V and to sqrt(V) deep inside a
    strong repulsive core.
    """
    v = _v(model, r)
    return (1.0 + math.sqrt(max(0.0, 1.0 + 4.0 * v * r * r))) / (2.0 * r)


def _shooting_start(model):
    """Start radius: 1e-8 R, or further out inside a strong repulsive core.

    In a core where V r^2 is large the growing solution dominates, so the
    start sits where the remaining barrier integral of sqrt(V) up to the
    core edge is BARRIER_DEPTH: whatever error the WKB start value carries
    has been suppressed by exp(-2 BARRIER_DEPTH) when the core is left.
    Integrating (u, u') through the whole core would cost ~sqrt(V) steps
    per unit length for nothing.
    """
    lo = model.domain[0]
    r0 = lo if lo > 0 else START_OFFSET * model.R
    strong = lambda r: _v(model, r) * r * r > 100.0 + model.centrifugal
    if not strong(r0):
        return r0
    grid = [r0]
    while strong(grid[-1]) and grid[-1] < 1e3 * model.R:
        grid.append(grid[-1] * 1.01)
    depth = 0.0
    for i in range(len(grid) - 1, 0, -1):
        a, b = grid[i - 1], grid[i]
        depth += 0.5 * (b - a) * (math.sqrt(max(_v(model, a), 0.0)) + math.sqrt(max(_v(model, b), 0.0)))
        if depth >= BARRIER_DEPTH:
            return a
    return r0


def _step_cap(model):
    R = model.R

    def hmax(r):
        v = abs(_v(model, r))
        cap = 0.25 * max(r, 1e-3 * R)
        if v > 0:
            cap = min(cap, 0.5 / math.sqrt(v))
        return cap
    return hmax


def _shoot(model, r_a, state, r_b, stats, *, rtol, atol, samples=None, nodes=None):
    """Integrate (u, u') from r_a to r_b, honouring breakpoints; returns state."""
    cuts = [b for b in model.breakpoints if r_a < b < r_b]
    edges = [r_a] + cuts + [r_b]
    hmax = _step_cap(model)

    def rhs(r, y):
        return (y[1], _v(model, r) * y[0])

    def on_step(t0, y0, t1, y1):
        if y0[0] * y1[0] < 0 or (y0[0] != 0 and y1[0] == 0):
            nodes.append(t0 + (t1 - t0) * y0[0] / (y0[0] - y1[0]))
        if samples is not None:
            samples.append((t1, y1[0], stats.renormalizations))
        norm = abs(y1[0]) + abs(y1[1])
        if norm > RENORM_THRESHOLD or 0 < norm < 1.0 / RENORM_THRESHOLD:
            stats.renormalizations += 1
            return (y1[0] / norm, y1[1] / norm)
        return None

    y = state
    for a, b in zip(edges[:-1], edges[1:]):
        st = StepStats()
        _, y = dopri5(rhs, a, y, b, rtol=rtol, atol=atol, hmax=hmax, on_step=on_step, stats=st)
        stats.absorb(st)
    return y


def count_nodes_shooting(model: PotentialModel, r_max: float | None = None, *,
                         rtol: float = 1e-10, atol: float = 1e-12,
                         keep_samples: bool = False) -> NodeCountResult:
    """Count zeros of the regular zero-energy solution by direct integration."""
    lo, hi = model.domain
    if r_max is None:
        r_max = tail_radius(model) if math.isinf(hi) else hi
    r_max = min(r_max, hi)
    r0 = _shooting_start(model)
    if not r0 < r_max:
        raise DomainError(f"r_max = {r_max} must exceed the start radius {r0}")
    # only u'/u matters; scale so that |u| + |u'| = 1
    lam = _start_log_derivative(model, r0)
    state = (1.0 / (1.0 + lam), lam / (1.0 + lam))
    stats = IntegrationStats()
    nodes: list = []
    samples = [] if keep_samples else None
    if samples is not None:
        samples.append((r0, state[0], 0))
    u, du = _shoot(model, r0, state, r_max, stats, rtol=rtol, atol=atol, samples=samples, nodes=nodes)
    extra, marginal = tail_extra_node(model.ell, r_max, u, du)
    # at a table end the free tail is an assumption, not something to test
    if not (math.isfinite(hi) and r_max >= hi):
        rest = abs(_v(model, r_max) * r_max * r_max - model.centrifugal)
        if rest > 1e-6:
            raise NumericalError(f"r_max = {r_max:g} is not in the tail: |V r^2 - l(l+1)| = {rest:.3g}")
    return NodeCountResult(len(nodes) + extra, SHOOTING, nodes[-1] if nodes else None, stats,
                           marginal, r0, r_max, samples)


# ---------------------------------------------------------------- phase method

def _phase_rhs(model):
    def rhs(r, y):
        d = model.derivatives(r)
        v0, v1, v2 = float(d.v0), float(d.v1), float(d.v2)
        if v0 >= 0:
            # rounding right at an endpoint; the phase is frozen there
            return (0.0,)
        k = math.sqrt(-v0)
        F = 5.0 / 16.0 * (v1 / v0) ** 2 - v2 / (4.0 * v0)
        s = math.sin(y[0])
        return (k + F * s * s / k,)
    return rhs


def _eta_from_log_derivative(model, r, lam):
    """Phase in (0, pi) at r for u'/u = lam."""
    d = model.derivatives(r)
    v0, v1 = float(d.v0), float(d.v1)
    x = (lam + v1 / (4.0 * v0)) / math.sqrt(-v0)
    return math.atan2(1.0, x)


def _state_from_eta(model, r, eta):
    """(u, u') with u = sin(eta), consistent with the phase definition."""
    d = model.derivatives(r)
    v0, v1 = float(d.v0), float(d.v1)
    s, c = math.sin(eta), math.cos(eta)
    return s, math.sqrt(-v0) * c - v1 / (4.0 * v0) * s


def _phase(model, r_a, eta, r_b, stats, rtol, samples=None):
    """eta(r_b) from eta(r_a).

    The state is eta minus its nearest multiple of pi.  Near the interval
    ends eta sits within a tiny delta of a multiple of pi, and which side of
    it eta is on decides whether one more zero follows; carrying the offset
    separately lets pure relative error control resolve delta.
    """
    rhs = _phase_rhs(model)
    cuts = [b for b in model.breakpoints if r_a < b < r_b]
    edges = [r_a] + cuts + [r_b]
    hmax = _step_cap(model)
    k0 = round(eta / math.pi)
    offset = [k0]

    def on_step(t0, y0, t1, y1):
        if samples is not None:
            samples.append((t1, offset[0] * math.pi + y1[0]))
        if abs(y1[0]) > 0.5 * math.pi:
            k = round(y1[0] / math.pi)
            offset[0] += k
            return (y1[0] - k * math.pi,)
        return None

    y = (eta - k0 * math.pi,)
    for a, b in zip(edges[:-1], edges[1:]):
        st = StepStats()
        _, y = dopri5(rhs, a, y, b, rtol=rtol, atol=1e-300, hmax=hmax, on_step=on_step, stats=st)
        stats.absorb(st)
    return offset[0] * math.pi + y[0]


def _core_log_derivative(model, r_end, stats, rtol, r_from=None, w_from=None):
    """u'/u at r_end, integrated as w' = V - w^2 across the region where V > 0.

    u is convex and positive there, so w stays finite and no zero can be
    missed; this keeps the phase method independent of zero counting.
    Pass (r_from, w_from) to resume from an earlier result.
    """
    if r_from is None:
        r_from = _shooting_start(model)
        w_from = _start_log_derivative(model, r_from)
    if r_end <= r_from:
        return w_from
    st = StepStats()
    _, (w,) = dopri5(lambda r, y: (_v(model, r) - y[0] * y[0],), r_from, (w_from,), r_end,
                     rtol=rtol, atol=1e-12, hmax=_step_cap(model), stats=st)
    stats.absorb(st)
    return w


def count_nodes_prufer(model: PotentialModel, zeros: ZeroStructure | None = None, *,
                       rtol: float = 1e-10, atol: float = 1e-12, keep_samples: bool = False,
                       max_halvings: int = 30) -> PruferTrace:
    """Count zeros through the phase equation on the attractive interval.

    The phase is integrated from r_minus + eps to r_plus - eps, with eps
    halved until the endpoint phase is stable, then snapped to a multiple of
    pi.  When r_plus is a jump the phase is read off directly.  Zeros past
    r_plus (at most one, since u is convex there) come from continuing the
    solution reconstructed at a handoff radius inside the interval.
    """
    zeros = zeros or find_zero_structure(model)
    if not zeros.conforming:
        raise DomainError("the phase method needs a potential negative on one interval")
    stats = IntegrationStats()
    samples = [] if keep_samples else None
    lo_dom, hi_dom = model.domain
    r_m, r_p = zeros.r_minus, zeros.r_plus
    origin = zeros.origin_attractive
    table_start = lo_dom > 0 and r_m <= lo_dom
    r_lo = max(r_m, lo_dom)   # a table may start inside the attractive interval
    width = (r_p - r_lo) if math.isfinite(r_p) else max(model.R, r_lo)
    # interior matching radii on either side
    a_mid = r_lo + 1e-3 * width
    if math.isfinite(r_p):
        b_mid = r_p - 1e-3 * width
    else:
        # deep in the tail eta sits within ~sqrt(-V) of a multiple of pi, below
        # what a phase of size n*pi resolves; (u, u') takes over there
        b_mid = max(tail_radius(model, tol=HANDOFF_TAIL_TOL), 2.0 * a_mid)
        if math.isfinite(hi_dom):
            b_mid = min(b_mid, hi_dom)
    # --- start: eta(r_minus + eps) ~ 0, drive eps down until eta(a_mid) settles
    if not (origin or table_start):
        r_core = r_m - 1e-3 * width
        w_core = _core_log_derivative(model, r_core, stats, rtol)
        r_core = max(r_core, _shooting_start(model))

    def start_run(eps):
        r0 = lo_dom if table_start else r_m + eps
        if origin or table_start:
            lam = _start_log_derivative(model, r0)
        else:
            lam = _core_log_derivative(model, r0, stats, rtol, r_core, w_core)
        e0 = _eta_from_log_derivative(model, r0, lam)
        return e0, _phase(model, r0, e0, a_mid, stats, rtol)

    if table_start:
        eps = 0.0
        eta0, eta_a = start_run(0.0)
    else:
        eps = START_OFFSET * model.R if origin else 1e-6 * width
        eta0, eta_a = start_run(eps)
        for _ in range(max_halvings):
            eps *= 0.5
            eta0, eta_new = start_run(eps)
            done = abs(eta_new - eta_a) < PHASE_TOL
            eta_a = eta_new
            if done:
                break
        else:
            raise NumericalError("start-phase offset did not converge")
    eta_start = 0.0  # eta0 lies in (0, pi) and tends to 0 with eps
    if samples is not None:
        samples.append((r_m + eps, eta0))

    eta_b = _phase(model, a_mid, eta_a, b_mid, stats, rtol, samples)
    marginal = False
    snap = 0.0
    eps_end = None

    crossings_b = math.floor(eta_b / math.pi)
    r_hand, eta_hand, crossings_hand = b_mid, eta_b, crossings_b
    if math.isfinite(r_p) and zeros.jump_at_r_plus:
        eta_p = _phase(model, b_mid, eta_b, r_p, stats, rtol, samples)
        # a jump up to V >= 0 is the limit of a steep rise, across which
        # V'/(4V) -> -inf carries eta up to the next multiple of pi
        k = math.ceil(eta_p / math.pi)
        snap = k * math.pi - eta_p
        marginal = snap < SNAP_TOL or snap > math.pi - SNAP_TOL
        eta_end = k * math.pi
        n_tilde = k - 1
        r_hand, eta_hand, crossings_hand = r_p, eta_p, math.floor(eta_p / math.pi)
    elif math.isfinite(r_p):
        eps_end = 1e-6 * width
        eta_p = _phase(model, b_mid, eta_b, r_p - eps_end, stats, rtol)
        for _ in range(max_halvings):
            eps_end *= 0.5
            eta_new = _phase(model, b_mid, eta_b, r_p - eps_end, stats, rtol)
            done = abs(eta_new - eta_p) < PHASE_TOL
            eta_p = eta_new
            if done:
                break
        else:
            raise NumericalError("end-phase offset did not converge")
        k = round(eta_p / math.pi)
        snap = abs(eta_p - k * math.pi)
        marginal = snap > SNAP_TOL
        eta_end = k * math.pi
        n_tilde = k - 1
    # continue the wave function from the handoff radius to the tail
    state = _state_from_eta(model, r_hand, eta_hand)
    nodes: list = []
    r_t = tail_radius(model) if math.isinf(hi_dom) else hi_dom
    if r_t > r_hand:
        state = _shoot(model, r_hand, state, r_t, stats, rtol=rtol, atol=atol, nodes=nodes)
    else:
        r_t = r_hand
    extra, tail_marginal = tail_extra_node(model.ell, r_t, *state)
    marginal = bool(marginal or tail_marginal)
    n_total = crossings_hand + len(nodes) + extra
    if math.isinf(r_p):
        # every zero lies inside the attractive interval
        n_tilde = n_total
        eta_end = math.pi * (n_total + 1)
    if samples is not None:
        samples.append((r_p if math.isfinite(r_p) else b_mid, eta_end))
    return PruferTrace(eta_start, eta_end, int(n_tilde), int(n_total), r_m, r_p, eps, eps_end,
                       marginal, float(snap), stats, samples)


# ---------------------------------------------------------------- closed forms

def _floor_with_margin(x):
    n = math.floor(x)
    return n, min(x - n, n + 1 - x) < 1e-9


def count_analytic(model: PotentialModel) -> NodeCountResult:
    """Closed-form counts: square well, Morse, Poschl-Teller (S-wave only)."""
    if isinstance(model, EffectivePotential) or model.ell != 0:
        raise ValueError("closed-form counts exist only for ell = 0")
    g = model.g
    if isinstance(model, SquareWell):
        n, marg = _floor_with_margin(g / math.pi + 0.5)
    elif isinstance(model, Morse):
        # stated as independent of alpha; shooting shows it is not for small alpha
        n, marg = _floor_with_margin(g + 0.5)
    elif isinstance(model, PoschlTeller):
        n, marg = _floor_with_margin((1.0 + math.sqrt(1.0 + 4.0 * g * g)) / 4.0)
    else:
        raise ValueError(f"no closed-form count for {model.family}")
    return NodeCountResult(int(n), ANALYTIC, None, IntegrationStats(), marg)

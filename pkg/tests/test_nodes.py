import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import j1, y1

from semibound import (ExpFamily, InversePower, LennardJones, Morse, NumericalError, PoschlTeller, SquareWell,
                       count_analytic, count_nodes_prufer, count_nodes_shooting, effective_potential,
                       parse_expression)
from semibound.nodes import tail_extra_node


def sign_changes(values):
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def bessel_count(g):
    """Nodes of the exact solution for V = -g^2 (1+r)^-3.

    With s = 1 + r the regular solution is
    sqrt(s) [J1(2g/sqrt(s)) Y1(2g) - Y1(2g/sqrt(s)) J1(2g)], and r in (0, inf)
    maps onto z = 2g/sqrt(s) in (0, 2g).
    """
    z = np.linspace(1e-6, 2 * g, 400_001)[:-1]
    return sign_changes(j1(z) * y1(2 * g) - y1(z) * j1(2 * g))


def whittaker_count(g, alpha):
    """Nodes of the exact Morse solution z^(-1/2) [M(z) W(z0) - W(z) M(z0)], z = 2g exp(alpha - r)."""
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    z0 = 2 * g * math.exp(alpha)
    m0, w0 = mpmath.whitm(g, 0, z0), mpmath.whitw(g, 0, z0)
    x = np.linspace(1e-9, math.log(z0) + 12.0, 3000)
    vals = [float(mpmath.whitm(g, 0, zz) * w0 - mpmath.whitw(g, 0, zz) * m0)
            for zz in z0 * np.exp(-x)]
    return sign_changes(vals)


@pytest.mark.parametrize("g", [1.7, 4.6, 10.0, 30.0])
def test_inverse_power_against_bessel(g):
    m = InversePower(g=g, p=3.0)
    n = bessel_count(g)
    assert count_nodes_shooting(m).n_nodes == n
    assert count_nodes_prufer(m).n_total == n


@pytest.mark.parametrize("g, alpha", [(5.2, 0.2), (5.2, 1.0), (10.7, 0.2), (2.3, math.log(2.0))])
def test_morse_against_whittaker(g, alpha):
    m = Morse(g=g, alpha=alpha)
    n = whittaker_count(g, alpha)
    assert count_nodes_shooting(m).n_nodes == n
    assert count_nodes_prufer(m).n_total == n


def test_documented_counts():
    assert count_nodes_shooting(Morse(g=5.2, alpha=1.0)).n_nodes == 5
    assert count_nodes_shooting(PoschlTeller(g=0.1)).n_nodes == 0
    assert count_nodes_prufer(PoschlTeller(g=6.0)).n_total == 3
    assert count_nodes_prufer(Morse(g=5.2, alpha=1.0)).n_total == 5


def test_square_well_phase():
    t = count_nodes_prufer(SquareWell(g=10.0))
    assert t.n_total == 3
    # F = 0 inside, so eta grows by exactly g up to R, then reaches the next multiple of pi
    assert t.eta_start == 0.0
    assert t.eta_end == pytest.approx(4 * math.pi)
    assert t.n_tilde == math.floor(10.0 / math.pi)


def test_analytic_counts():
    assert count_analytic(SquareWell(g=math.pi)).n_nodes == 1
    assert count_analytic(Morse(g=0.4)).n_nodes == 0
    assert count_analytic(PoschlTeller(g=6.0)).n_nodes == 3
    assert count_analytic(SquareWell(g=math.pi / 2)).marginal
    with pytest.raises(ValueError):
        count_analytic(LennardJones(g=3.0))
    with pytest.raises(ValueError):
        count_analytic(effective_potential(PoschlTeller(g=3.0), 1))


CROSS = [
    ("SquareWell", lambda g: SquareWell(g=g)),
    ("Morse1", lambda g: Morse(g=g, alpha=1.0)),
    ("Morse0.2", lambda g: Morse(g=g, alpha=0.2)),
    ("PoschlTeller", lambda g: PoschlTeller(g=g)),
    ("LennardJones", lambda g: LennardJones(g=g)),
    ("exponential", lambda g: ExpFamily(g=g, alpha=2.0, beta=1.0)),
    ("ExpFamily31", lambda g: ExpFamily(g=g, alpha=3.0, beta=1.0)),
    ("InversePower3", lambda g: InversePower(g=g, p=3.0)),
]


@pytest.mark.parametrize("name, make", CROSS, ids=[c[0] for c in CROSS])
def test_cross_method_grid(name, make):
    counts = []
    for g in np.linspace(1.0, 50.0, 50):
        m = make(g)
        n = count_nodes_shooting(m).n_nodes
        assert count_nodes_prufer(m).n_total == n, (name, g)
        try:
            assert count_analytic(m).n_nodes == n or name == "Morse0.2", (name, g)
        except ValueError:
            pass
        counts.append(n)
    assert counts == sorted(counts)   # never decreases with g


@pytest.mark.parametrize("model", [LennardJones(g=30.0), Morse(g=12.3, alpha=1.0), PoschlTeller(g=9.0),
                                   ExpFamily(g=14.0, alpha=3.0, beta=1.0)], ids=repr)
def test_scale_covariance(model):
    # r -> r/s and V -> s^2 V is the same model with R -> R/s
    n = count_nodes_shooting(model).n_nodes
    for s in (0.5, 2.0, 10.0):
        assert count_nodes_shooting(replace(model, R=model.R / s)).n_nodes == n


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.5, 30.0), st.floats(0.01, 10.0))
def test_monotone_in_g(alpha, g, dg):
    a = count_nodes_shooting(Morse(g=g, alpha=alpha)).n_nodes
    b = count_nodes_shooting(Morse(g=g + dg, alpha=alpha)).n_nodes
    assert a <= b


def test_p_wave_trace_invariants():
    m = effective_potential(PoschlTeller(g=10.0), 1)
    t = count_nodes_prufer(m, keep_samples=True)
    assert t.n_total == count_nodes_shooting(m).n_nodes
    assert t.eta_end > t.eta_start
    assert t.eta_start / math.pi == pytest.approx(round(t.eta_start / math.pi), abs=1e-9)
    assert t.n_tilde == round((t.eta_end - t.eta_start) / math.pi) - 1
    r, eta = np.array(t.samples).T
    assert np.all(np.diff(r) > 0)
    # eta only crosses multiples of pi upwards
    assert np.all(np.diff(np.floor(eta / math.pi)) >= 0)


def _continuous_phase(trace):
    # the last sample is the snapped end phase; drop it
    r, eta = np.array(trace.samples[:-1]).T
    return r, eta


@pytest.mark.parametrize("p", [2.5, 3.0, 3.5])
def test_phase_bounded_by_running_integral_when_F_negative(p):
    # eta' = sqrt(-V) + F sin^2(eta)/sqrt(-V) <= sqrt(-V) when F <= 0
    g = 40.0
    t = count_nodes_prufer(InversePower(g=g, p=p), keep_samples=True)
    r, eta = _continuous_phase(t)
    running = 2 * g / (p - 2) * (1 - (1 + r) ** (1 - p / 2))
    assert np.all(eta <= running * (1 + 1e-8) + 1e-8)


def test_phase_exceeds_running_integral_when_F_positive():
    g = 7.3
    t = count_nodes_prufer(PoschlTeller(g=g), keep_samples=True)
    r, eta = _continuous_phase(t)
    running = 2 * g * np.arctan(np.tanh(r / 2))     # integral of g / cosh
    assert np.all(eta >= running * (1 - 1e-8) - 1e-8)
    assert t.phase_gain > math.pi * g / 2


def test_snapped_phase_can_exceed_semiclassical_for_slow_decay():
    # the end phase (N + 1) pi overshoots pi N_semi although the continuous
    # phase stays below it: eta tends to N pi from above in a r^-3.5 tail
    from semibound import closed_form_semiclassical

    m = InversePower(g=40.0, p=3.5)
    t = count_nodes_prufer(m, keep_samples=True)
    semi = closed_form_semiclassical(m).value
    _, eta = _continuous_phase(t)
    assert eta[-1] < math.pi * semi < t.phase_gain
    assert math.floor(eta[-1] / math.pi) == t.n_total


def test_renormalisation_keeps_count():
    m = effective_potential(PoschlTeller(g=30.0), 15)
    res = count_nodes_shooting(m)
    assert res.stats.renormalizations >= 1
    assert res.n_nodes == count_nodes_prufer(m).n_total


def test_marginal_zero_energy_state():
    # g = pi/2: a zero-energy bound state, u'(R) = 0
    res = count_nodes_shooting(SquareWell(g=math.pi / 2))
    assert res.marginal


def test_tail_extra_node():
    # s wave, free tail u = a r + b: u(1) = 1, u'(1) = -2 crosses at r = 1.5
    extra, marginal = tail_extra_node(0, 1.0, 1.0, -2.0)
    assert extra and not marginal
    extra, _ = tail_extra_node(0, 1.0, 1.0, 0.5)
    assert not extra


def test_shooting_errors_and_samples():
    with pytest.raises(NumericalError):
        count_nodes_shooting(LennardJones(g=5.0), r_max=1.5)
    res = count_nodes_shooting(Morse(g=3.3, alpha=1.0), keep_samples=True)
    r, u, seg = np.array(res.samples).T
    assert sign_changes(u) == res.n_nodes or sign_changes(u) == res.n_nodes - 1
    assert res.r_last_node is not None and res.stats.steps > 0


def test_expression_counts_match_family():
    assert count_nodes_shooting(parse_expression("-4/cosh(r)^2")).n_nodes == \
        count_nodes_shooting(PoschlTeller(g=2.0)).n_nodes

import math

import numpy as np
import pytest

from semibound import (DomainError, ExpFamily, InversePower, LennardJones, Morse, PoschlTeller,
                       SquareWell, Custom, count_nodes_prufer, count_nodes_shooting, effective_potential,
                       evaluate, load_tabulated, make_family, negative_part, read_table)

ANALYTIC = [
    Morse(g=2.0, alpha=1.0),
    Morse(g=2.0, alpha=0.3, R=0.5),
    PoschlTeller(g=3.0, R=2.0),
    LennardJones(g=4.0),
    ExpFamily(g=1.5, alpha=2.0, beta=1.0),
    ExpFamily(g=1.5, alpha=3.0, beta=0.5),
    InversePower(g=2.0, p=3.0),
]


def central_differences(model, r):
    h = 1e-3 * r
    v = [np.asarray(model.value(r + k * h), dtype=float) for k in (-2, -1, 0, 1, 2)]
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h ** 2)
    return d1, d2


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: f"{m.family}-{m.g}")
def test_closed_form_derivatives_match_differences(model):
    r = np.geomspace(1e-2, 30.0, 100)
    b = model.derivatives(r)
    d1, d2 = central_differences(model, r)
    scale1 = np.abs(b.v0) / r + np.abs(b.v1)
    scale2 = np.abs(b.v0) / r ** 2 + np.abs(b.v2)
    ok = scale1 > 1e-200
    assert np.all(np.abs(d1 - b.v1)[ok] <= 1e-6 * scale1[ok])
    assert np.all(np.abs(d2 - b.v2)[ok] <= 1e-6 * scale2[ok])


def test_square_well_values():
    m = SquareWell(g=3.0, R=1.0)
    assert evaluate(m, 0.5).v0 == -9.0
    assert m.value(1.0) == -9.0          # theta(0) = 1
    assert m.value(1.5) == 0.0
    b = evaluate(m, 0.5)
    assert b.v1 == 0.0 and b.v2 == 0.0


def test_lennard_jones_zero_at_R():
    assert LennardJones(g=7.0, R=2.0).value(2.0) == pytest.approx(0.0, abs=1e-14)


def test_morse_vanishes_at_origin_for_alpha_log2():
    m = Morse(g=3.0, alpha=math.log(2.0))
    assert abs(m.value(1e-12)) < 1e-9


def test_evaluate_rejects_nonpositive_radius():
    with pytest.raises(DomainError):
        evaluate(Morse(g=1.0), 0.0)
    with pytest.raises(DomainError):
        negative_part(Morse(g=1.0), -1.0)


@pytest.mark.parametrize("bad", [dict(g=-1.0), dict(R=0.0), dict(g=math.nan)])
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        Morse(**bad)


def test_exp_family_requires_alpha_above_beta():
    with pytest.raises(ValueError):
        ExpFamily(alpha=1.0, beta=1.0)
    ExpFamily(alpha=1.5, beta=1.0)       # condition on F is not checked here


def test_negative_part():
    pt = PoschlTeller(g=2.0)
    r = np.linspace(0.1, 5.0, 7)
    assert np.array_equal(negative_part(pt, r), pt.value(r))
    assert negative_part(LennardJones(g=1.0), 0.5) == 0.0
    assert negative_part(SquareWell(g=3.0), 2.0) == 0.0
    lj = LennardJones(g=3.0)
    r = np.geomspace(0.3, 10.0, 200)
    neg = negative_part(lj, r)
    v = lj.value(r)
    assert np.all(neg <= 0)
    assert np.array_equal(neg[v < 0], v[v < 0])


def test_effective_potential():
    pt = PoschlTeller(g=2.0)
    r = np.geomspace(0.05, 8.0, 25)
    assert np.array_equal(effective_potential(pt, 0).value(r), pt.value(r))
    zero = Custom(lambda x: 0.0 * x, "0")
    assert effective_potential(zero, 1).value(1.0) == pytest.approx(2.0)
    rng = np.random.default_rng(3)
    r = rng.uniform(0.1, 5.0, 10)
    eff = effective_potential(pt, 2)
    assert np.allclose(eff.value(r), -4.0 / np.cosh(r) ** 2 + 6.0 / r ** 2, rtol=1e-14)
    b = eff.derivatives(r)
    b0 = pt.derivatives(r)
    assert np.allclose(b.v1, b0.v1 - 12.0 / r ** 3, rtol=1e-13)
    assert np.allclose(b.v2, b0.v2 + 36.0 / r ** 4, rtol=1e-13)
    assert eff.ell == 2
    with pytest.raises(ValueError):
        effective_potential(pt, -1)


def test_with_coupling_keeps_shape():
    m = ExpFamily(g=2.0, alpha=3.0, beta=0.5)
    r = np.geomspace(0.1, 20, 9)
    assert np.allclose(m.with_coupling(5.0).shape(r), m.shape(r), rtol=1e-15)


def test_make_family():
    assert make_family("exponential", g=2.0) == ExpFamily(g=2.0, alpha=2.0, beta=1.0)
    with pytest.raises(ValueError):
        make_family("Yukawa", g=1.0)
    with pytest.raises(ValueError):
        make_family("Morse", g=1.0, p=3.0)


def test_tabulated_reproduces_nodes():
    r = np.linspace(0.1, 0.9, 9)
    t = load_tabulated(r, SquareWell(g=2.0).value(r))
    assert np.array_equal(t.value(r), np.full(9, -4.0))


def test_tabulated_rejects_bad_tables():
    with pytest.raises(ValueError):
        load_tabulated([1, 2, 3], [0, 0, 0])
    with pytest.raises(ValueError):
        load_tabulated([1, 3, 2, 4], [0, 0, 0, 0])
    with pytest.raises(ValueError):
        load_tabulated([1, 2, 3, 4], [0, np.inf, 0, 0])
    t = load_tabulated([1, 2, 3, 4], [-1, -2, -1, 0])
    with pytest.raises(DomainError):
        t.value(4.5)


def test_tabulated_exponential_count(tmp_path):
    exact = ExpFamily(g=10.0, alpha=2.0, beta=1.0)
    r = np.linspace(0.01, 40.0, 2000)
    path = tmp_path / "exp.dat"
    np.savetxt(path, np.column_stack([r, exact.value(r)]), header="r V")
    table = read_table(path)
    assert count_nodes_shooting(table).n_nodes == count_nodes_shooting(exact).n_nodes == 6
    assert count_nodes_prufer(table).n_total == 6

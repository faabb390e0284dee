"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Counts are cached so that the cross-method criterion reuses the cases of
the others.  Run directly (python tests/test_acceptance.py) for the lines
alone.
"""

import math
import time
from functools import lru_cache

import numpy as np

from conftest import record
from semibound import (ExpFamily, InversePower, LennardJones, Morse, PoschlTeller, SquareWell,
                       assemble_report, certify_sign, chadan_window, closed_form_semiclassical,
                       count_analytic, count_nodes_prufer, count_nodes_shooting, effective_potential,
                       find_zero_structure, semiclassical_integral, shape_function)
from semibound.nodes import _start_log_derivative, _shooting_start

MORSE_G = (0.4, 1.0, 2.5, 5.2, 10.7, 25.5, 50.1)
MORSE_ALPHA = (0.2, math.log(2.0), 1.5)
PT_G = tuple(np.linspace(0.0, 100.0, 31)[1:])
SW_G = tuple(np.linspace(0.5, 60.0, 20))
POWER_P = (2.5, 3.0, 3.5)
POWER_G = tuple(np.linspace(0.5, 60.0, 30))
GRID_FAMILIES = {
    "Morse": (lambda g: Morse(g=g, alpha=1.0), 500.0),
    "PoschlTeller": (lambda g: PoschlTeller(g=g), 500.0),
    "LennardJones": (lambda g: LennardJones(g=g), 500.0),
    "exponential": (lambda g: ExpFamily(g=g, alpha=2.0, beta=1.0), 200.0),
    "ExpFamily(3,1)": (lambda g: ExpFamily(g=g, alpha=3.0, beta=1.0), 200.0),
}


def _key(model):
    return (type(model).__name__, tuple(sorted(model.params().items())))


_MODELS = {}


def _remember(model):
    _MODELS[_key(model)] = model
    return _key(model)


@lru_cache(maxsize=None)
def _shoot(key):
    t0 = time.perf_counter()
    res = count_nodes_shooting(_MODELS[key])
    return res.n_nodes, time.perf_counter() - t0


@lru_cache(maxsize=None)
def _prufer(key):
    trace = count_nodes_prufer(_MODELS[key])
    return trace.n_total, trace.phase_gain


@lru_cache(maxsize=None)
def _verdict(shape_key):
    model = _MODELS[shape_key]
    return certify_sign(model, find_zero_structure(model)).verdict


def shoot(model):
    return _shoot(_remember(model))


def prufer(model):
    return _prufer(_remember(model))


def verdict(model):
    # F does not depend on g, so one certificate per shape
    return _verdict(_remember(model.with_coupling(1.0)))


def grid(g_max):
    return np.geomspace(0.1, g_max, 100)


def cases_1():
    return [Morse(g=g, alpha=a) for a in MORSE_ALPHA for g in MORSE_G]


def cases_2():
    return [PoschlTeller(g=g) for g in PT_G]


def cases_3():
    return [SquareWell(g=g) for g in SW_G]


def cases_4():
    return [ExpFamily(g=200.0, alpha=2.0, beta=1.0), LennardJones(g=500.0)]


def cases_5():
    return [make(g) for make, g_max in GRID_FAMILIES.values() for g in grid(g_max)]


def cases_7():
    return [InversePower(g=g, p=p) for p in POWER_P for g in POWER_G]


def _failures(items, limit=4):
    text = "; ".join(items[:limit])
    return text + (f" (+{len(items) - limit} more)" if len(items) > limit else "")


def _check(number, bad, total, what):
    ok = not bad
    detail = f"{total - len(bad)}/{total} {what}" + ("" if ok else ": " + _failures(bad))
    record(number, ok, detail)
    assert ok, detail


def test_criterion_1_morse_exact():
    bad, total = [], 0
    for m in cases_1():
        total += 1
        n, dt = shoot(m)
        expected = math.floor(m.g + 0.5)
        if n != expected or dt >= 1.0:
            bad.append(f"alpha={m.alpha:.4g} g={m.g}: N={n} vs {expected} ({dt:.2f}s)")
    _check(1, bad, total, "Morse cases with N = floor(g + 1/2) in < 1 s")


def test_criterion_2_poschl_teller_exact():
    bad, total = [], 0
    for m in cases_2():
        total += 1
        n, dt = shoot(m)
        expected = math.floor((1.0 + math.sqrt(1.0 + 4.0 * m.g ** 2)) / 4.0)
        if n != expected or dt >= 1.0:
            bad.append(f"g={m.g:.4g}: N={n} vs {expected} ({dt:.2f}s)")
    _check(2, bad, total, "Poschl-Teller cases exact in < 1 s")


def test_criterion_3_square_well():
    bad, total = [], 0
    for m in cases_3():
        total += 1
        n, _ = shoot(m)
        a = count_analytic(m).n_nodes
        semi = semiclassical_integral(m, 1e-11).value
        if n != a or abs(semi - m.g / math.pi) > 1e-10 * max(1.0, m.g / math.pi):
            bad.append(f"g={m.g:.4g}: shooting {n}, analytic {a}, N_semi-g/pi={semi - m.g / math.pi:.2e}")
    _check(3, bad, total, "square wells: analytic = shooting, N_semi = g/pi to 1e-10")


def test_criterion_4_headlines():
    bad = []
    for m, expected in zip(cases_4(), (127, 67)):
        n, dt = shoot(m)
        if n != expected or dt >= 30.0:
            bad.append(f"{m.family} g={m.g}: N={n} vs {expected} ({dt:.2f}s)")
    _check(4, bad, 2, "headline counts (exponential g=200 -> 127, LJ g=500 -> 67) in < 30 s")


def test_criterion_5_lower_bound_and_gap():
    bad, total = [], 0
    for name, (make, g_max) in GRID_FAMILIES.items():
        if verdict(make(1.0)) != "FNonNegative":
            bad.append(f"{name}: certificate {verdict(make(1.0))}")
            continue
        for g in grid(g_max):
            m = make(g)
            total += 1
            n, _ = shoot(m)
            low = math.floor(closed_form_semiclassical(m).value)
            if not (n >= low and n - low in (0, 1)):
                bad.append(f"{name} g={g:.4g}: N={n}, floor(N_semi)={low}")
    _check(5, bad, total, "grid points with N - floor(N_semi) in {0, 1}")


def exp_family_f_nonnegative(alpha, beta):
    """F >= 0 for V = -g^2 x^(alpha-2) exp(-x^beta), from the exact sign analysis.

    16 x^2 F = y^2 + 2(2 beta - alpha) y + alpha^2 - 4 with y = beta x^beta > 0.
    """
    if alpha < 2.0:
        return False
    return alpha <= 2.0 * beta or alpha * beta >= beta ** 2 + 1.0


def criterion_6_grid():
    betas = np.linspace(0.3, 2.5, 20)
    factors = np.linspace(0.5, 1.5, 20)
    # alpha = beta + f / beta puts the line alpha beta = beta^2 + 1 at f = 1
    return [(b + f / b, b) for b in betas for f in factors]


def test_criterion_6_shape_boundary():
    bad, total = [], 0
    for alpha, beta in criterion_6_grid():
        total += 1
        got = verdict(ExpFamily(g=1.0, alpha=alpha, beta=beta)) == "FNonNegative"
        want = alpha * beta >= beta ** 2 + 1.0
        if got != want and abs(alpha * beta - beta ** 2 - 1.0) > 1e-6:
            bad.append(f"alpha={alpha:.4g} beta={beta:.4g}: FNonNegative={got}")
    _check(6, bad, total, "grid points with FNonNegative <=> alpha beta >= beta^2 + 1")


def test_shape_grid_matches_exact_condition():
    # companion to criterion 6: every verdict on the same grid agrees with the exact sign condition
    bad = [(a, b) for a, b in criterion_6_grid()
           if (verdict(ExpFamily(g=1.0, alpha=a, beta=b)) == "FNonNegative") != exp_family_f_nonnegative(a, b)]
    assert not bad


def finite_difference_F(model, r):
    """F from 5-point differences of V alone, independent of the model's derivatives."""
    h = 1e-3 * (r + model.R)
    v = [np.asarray(model.value(r + k * h), dtype=float) for k in (-2, -1, 0, 1, 2)]
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h ** 2)
    return 5.0 / 16.0 * (d1 / v[2]) ** 2 - d2 / (4.0 * v[2])


def test_criterion_7_upper_limit():
    bad, total = [], 0
    r = np.geomspace(1e-3, 1e3, 13)
    for p in POWER_P:
        shape = InversePower(g=1.0, p=p)
        oracle = p * (p - 4.0) / (16.0 * (r + shape.R) ** 2)
        if not np.allclose(shape_function(shape, r), oracle, rtol=1e-9, atol=0):
            bad.append(f"p={p}: F differs from p(p-4)/(16(r+R)^2)")
        if not np.allclose(finite_difference_F(shape, r), oracle, rtol=1e-6, atol=0):
            bad.append(f"p={p}: finite-difference F differs from p(p-4)/(16(r+R)^2)")
        if verdict(shape) != "FNonPositive":
            bad.append(f"p={p}: certificate {verdict(shape)}")
    for m in cases_7():
        total += 1
        n, _ = shoot(m)
        up = closed_form_semiclassical(m).value - 1.0
        if n > up:
            bad.append(f"p={m.p} g={m.g:.4g}: N={n} > N_semi-1={up:.3f}")
    _check(7, bad, total, "InversePower cases with N <= N_semi - 1 (and F <= 0 certified)")


def test_criterion_8_cross_method():
    bad, total = [], 0
    cases = cases_1() + cases_2() + cases_3() + cases_4() + cases_5() + cases_7()
    for m in cases:
        total += 1
        n, _ = shoot(m)
        try:
            n_phase, gain = prufer(m)
        except Exception as exc:  # a failure is a disagreement, report it
            bad.append(f"{m.family} g={m.g:.4g}: {type(exc).__name__}")
            continue
        if n_phase != n:
            bad.append(f"{m.family} {m.params()}: phase {n_phase} vs shooting {n}")
        elif verdict(m) == "FNonNegative":
            semi = closed_form_semiclassical(m).value
            if not gain > math.pi * semi:
                bad.append(f"{m.family} g={m.g:.4g}: phase gain/pi={gain / math.pi:.6f} <= N_semi={semi:.6f}")
    _check(8, bad, total, "cases with phase count = shooting count and the phase inequality")


def test_criterion_9_window():
    bad = []
    gs = np.linspace(math.pi + 0.1, 200.0, 20)   # N_semi = 2g/pi >= 2
    for g in gs:
        m = ExpFamily(g=g, alpha=2.0, beta=1.0)
        semi = closed_form_semiclassical(m)
        assert semi.value >= 2.0
        w = chadan_window(m, semi)
        n, _ = shoot(m)
        if not (w.applicable and w.lower < n < w.upper):
            bad.append(f"g={g:.4g}: N={n}, window ({w.lower}, {w.upper})")
    _check(9, bad, len(gs), "exponential cases inside the window")


def test_criterion_10_ratio():
    bad = []
    for m in (Morse(g=200.0, alpha=1.0), PoschlTeller(g=200.0)):
        n, _ = shoot(m)
        ratio = n / closed_form_semiclassical(m).value
        if abs(ratio - 1.0) > 0.005:
            bad.append(f"{m.family}: ratio {ratio:.5f}")
    _check(10, bad, 2, "families with |N/N_semi - 1| <= 0.5% at g = 200")


def test_criterion_11_p_wave():
    m = effective_potential(PoschlTeller(g=10.0), 1)
    zeros = find_zero_structure(m)
    rep = assemble_report(m, prufer=False, window=False)
    r0 = _shooting_start(m)
    start_ok = abs(_start_log_derivative(m, r0) * r0 - 2.0) < 1e-6
    ok = (zeros.conforming and zeros.r_minus > 0 and rep.lower_11.applicable
          and rep.n_exact >= rep.lower_11.value and start_ok)
    detail = (f"r_minus={zeros.r_minus:.4g} ({zeros.classification}), N={rep.n_exact}, "
              f"lower={rep.lower_11.value}, start u'/u*r={_start_log_derivative(m, r0) * r0:.8f}")
    record(11, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    import conftest

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    for number in sorted(conftest.ACCEPTANCE):
        passed, detail = conftest.ACCEPTANCE[number]
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

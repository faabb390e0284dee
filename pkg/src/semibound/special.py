"""Gamma function via the Lanczos approximation.

Uses the g = 7, n = 9 coefficient set, which is good to about 1e-15
relative for x >= 1/2; smaller arguments go through the reflection formula.
"""

import math

# Lanczos coefficients for g = 7, n = 9
_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_function(x: float) -> float:
    """Gamma(x) for real x > 0."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"gamma_function requires x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_function(1.0 - x))
    x -= 1.0
    a = _COEF[0]
    t = x + _G + 0.5
    for i in range(1, len(_COEF)):
        a += _COEF[i] / (x + i)
    # large x: work in logs to avoid overflow of t**(x+0.5)
    if x > 140:
        return math.exp(0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(a))
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a

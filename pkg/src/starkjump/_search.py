"""Bracketed 1-D golden-section minimization shared by the search routines."""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_min(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Minimize a unimodal f on [a, b]; returns (x_min, f(x_min)).

    The bracket shrinks until its width is below ``tol``; the best sampled
    point is returned, so the result is also valid for mildly non-smooth
    objectives such as |linear| kinks.
    """
    if b < a:
        a, b = b, a
    h = b - a
    best_x = a
    best_f = f(a)
    fb = f(b)
    if fb < best_f:
        best_x, best_f = b, fb
    if h <= tol:
        return best_x, best_f
    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(max(n, 1)):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
    if yc < best_f:
        best_x, best_f = c, yc
    if yd < best_f:
        best_x, best_f = d, yd
    return best_x, best_f

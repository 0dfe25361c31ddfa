"""Adaptive Simpson quadrature over panels with known breakpoints."""
from __future__ import annotations

import math
from typing import Callable, Iterable


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-9, max_depth: int = 50) -> float:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    Uses the Richardson-corrected estimate on accepted intervals.
    Iterative (explicit stack) so deep refinement near kinks cannot
    overflow the interpreter stack.
    """
    if b == a:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    stack = [(a, fa, m, fm, b, fb, whole, tol, 0)]
    parts = []
    while stack:
        a, fa, m, fm, b, fb, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson(f, a, fa, m, fm)
        rm, frm, right = _simpson(f, m, fm, b, fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            parts.append(left + right + delta / 15.0)
        else:
            stack.append((a, fa, lm, flm, m, fm, left, eps / 2.0, depth + 1))
            stack.append((m, fm, rm, frm, b, fb, right, eps / 2.0, depth + 1))
    return math.fsum(parts)


def integrate_panels(f: Callable[[float], float], breakpoints: Iterable[float],
                     tol: float = 1e-9) -> float:
    """Sum of adaptive Simpson integrals over consecutive breakpoint panels.

    The tolerance is split evenly over panels.
    """
    pts = sorted(set(float(x) for x in breakpoints))
    if len(pts) < 2:
        return 0.0
    panel_tol = tol / (len(pts) - 1)
    return math.fsum(adaptive_simpson(f, lo, hi, panel_tol)
                     for lo, hi in zip(pts[:-1], pts[1:]) if hi > lo)

"""One-dimensional minimisation helpers."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np


EPS = float(np.finfo(float).eps)
INVPHI = (math.sqrt(5) - 1) / 2
# growth factor of the bracket search around the guessed root
STRIDE = 8.0


def golden_section(f: Callable[[float], float], a: float, b: float,
                   xtol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [a, b]; returns ``(argmin, min)``.

    The endpoints are compared against the interior estimate, so monotone
    functions return the correct endpoint.
    """
    fa, fb = f(a), f(b)
    lo, hi = a, b
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= xtol * (1.0 + abs(lo) + abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = f(x2)
    t, ft = (x1, f1) if f1 <= f2 else (x2, f2)
    if fa < ft:
        t, ft = a, fa
    if fb < ft:
        t, ft = b, fb
    return t, ft


def convex_line_search(dphi: Callable[[float], float], gamma_max: float,
                       ftol: float = 0.0, xtol: float = 1e-15, max_iter: int = 200,
                       guess: float | None = None, d0: float | None = None,
                       breakpoints=None) -> float:
    """Exact minimiser on [0, gamma_max] of a differentiable convex function.

    Works on the (nondecreasing) derivative ``dphi``: the minimiser is an
    endpoint when the derivative does not change sign, otherwise its root,
    found by Illinois regula falsi. A ``guess`` of the root's scale is used
    to shrink the initial bracket by geometric expansion or contraction, which matters when
    the root is many orders of magnitude below gamma_max. ``d0`` is the
    derivative at 0 when the caller already has it.

    ``breakpoints`` lists points where ``dphi`` may fail to be smooth (a
    kink or an infinite slope). The bracket is first cut down to one
    smooth piece; a root sitting exactly at a breakpoint, where regula
    falsi converges only linearly, is recognised directly.
    """
    a, fa = 0.0, (dphi(0.0) if d0 is None else d0)
    if fa >= -ftol:
        return 0.0
    b, fb = gamma_max, None
    if guess is not None and 0.0 < guess < gamma_max:
        g = guess
        fg = dphi(g)
        if fg > 0:
            b, fb = g, fg
            while True:
                h = g / STRIDE
                fh = dphi(h)
                if fh > 0:
                    b, fb, g = h, fh, h
                else:
                    a, fa = h, fh
                    break
                if h <= xtol * gamma_max:
                    return h
        else:
            a, fa = g, fg
            while STRIDE * g < gamma_max:
                g *= STRIDE
                fg = dphi(g)
                if fg > 0:
                    b, fb = g, fg
                    break
                a, fa = g, fg
        if abs(fa) <= ftol:
            return a
    if fb is None:
        fb = dphi(gamma_max)
        if fb <= ftol:
            return gamma_max
    if breakpoints is not None:
        bp = np.sort(np.asarray(breakpoints, dtype=float))
        bp = bp[(bp > a) & (bp < b)]
        a_bp = b_bp = False
        lo, hi = 0, bp.size
        while lo < hi:
            mid = (lo + hi) // 2
            t = float(bp[mid])
            ft = dphi(t)
            if abs(ft) <= ftol:
                return t
            if ft > 0:
                b, fb, b_bp, hi = t, ft, True, mid
            else:
                a, fa, a_bp, lo = t, ft, True, mid + 1
        # a root at a breakpoint shows as a sign change within rounding of it
        step = 16 * EPS * max(abs(a), abs(b))
        if b_bp and b - step > a:
            t = b - step
            ft = dphi(t)
            if ft < 0:
                return b
            b, fb = t, ft
        if a_bp and a + step < b:
            t = a + step
            ft = dphi(t)
            if ft > 0:
                return a
            a, fa = t, ft
    side = 0
    c = a
    widths = [b - a, b - a]
    for _ in range(max_iter):
        if b - a > 0.5 * widths[-2]:
            # regula falsi is stalling (flat or multiple root): bisect, in
            # log scale while the bracket spans orders of magnitude
            c = math.sqrt(a * b) if a > 0 and b > 16 * a else 0.5 * (a + b)
        else:
            c = b - fb * (b - a) / (fb - fa)
            if not a < c < b:
                c = 0.5 * (a + b)
        widths.append(b - a)
        fc = dphi(c)
        if abs(fc) <= ftol or b - a <= xtol * gamma_max:
            return c
        if fc > 0:
            b, fb = c, fc
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = c, fc
            if side == 1:
                fb *= 0.5
            side = 1
    return c

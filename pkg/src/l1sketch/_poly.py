"""Dense univariate polynomial helpers on the monomial basis.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``x**k``.
The main entry point is :func:`integrate_abs_poly`, which integrates ``|p|``
exactly by splitting the interval at the sign changes of ``p`` and summing
closed-form antiderivative differences.  Sign changes are isolated with a
Sturm-sequence guided bisection; degrees 1 and 2 use closed forms.
"""

from __future__ import annotations

import math

import numpy as np

#: Degrees above this are rejected; monomial-basis conditioning degrades.
MAX_DEGREE = 16

#: Relative root-isolation tolerance, scaled by the interval width.
ROOT_TOL_REL = 1e-12


def poly_eval(coeffs, x):
    """Evaluate a polynomial by Horner's rule; vectorized over ``x``."""
    c = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, c[-1])
    for k in range(len(c) - 2, -1, -1):
        out = out * x + c[k]
    return out


def poly_trim(coeffs, rel: float = 1e-13):
    """Drop leading coefficients that are negligible relative to the largest."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    top = np.abs(c).max()
    if top == 0.0:
        return np.zeros(1)
    nz = np.nonzero(np.abs(c) > rel * top)[0]
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def poly_deriv(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if len(c) <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, len(c))


def poly_antideriv(coeffs):
    """Antiderivative with zero constant term."""
    c = np.asarray(coeffs, dtype=float)
    return np.concatenate([[0.0], c / np.arange(1, len(c) + 1)])


def _poly_divmod(num: np.ndarray, den: np.ndarray):
    num = num.copy()
    dd = len(den) - 1
    dn = len(num) - 1
    if dn < dd:
        return np.zeros(1), num
    q = np.zeros(dn - dd + 1)
    for k in range(dn - dd, -1, -1):
        q[k] = num[k + dd] / den[dd]
        num[k : k + dd + 1] -= q[k] * den
    return q, poly_trim(num, rel=1e-14)


def sturm_chain(coeffs):
    """Sturm sequence of ``p``, each member scale-normalized.

    Normalizing by the max-abs coefficient keeps the chain in range; positive
    scaling preserves all sign information the chain is used for.
    """
    c = poly_trim(coeffs)
    chain = [c]
    if len(c) > 1:
        chain.append(poly_trim(poly_deriv(c)))
        while len(chain[-1]) > 1:
            _, rem = _poly_divmod(chain[-2], chain[-1])
            if len(rem) == 1 and rem[0] == 0.0:
                break
            rem = -rem
            chain.append(rem / np.abs(rem).max())
    return chain


def sign_variations(chain, x: float) -> int:
    """Number of sign changes along the chain evaluated at ``x`` (zeros skipped)."""
    v = 0
    prev = 0
    for c in chain:
        val = poly_eval(c, x)
        s = 0 if val == 0.0 else (1 if val > 0.0 else -1)
        if s != 0:
            if prev != 0 and s != prev:
                v += 1
            prev = s
    return v


def _refine_sign_change(coeffs, lo, hi, flo, tol):
    """Bisect a bracketed sign change of ``p`` down to width ``tol``."""
    a, b = lo, hi
    sa = flo > 0.0
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = poly_eval(coeffs, m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == sa:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def sign_change_roots(coeffs, lo: float, hi: float, tol: float | None = None):
    """Points in ``(lo, hi)`` where ``p`` changes sign, sorted.

    Roots of even multiplicity are ignored when cleanly detected: they do
    not affect the sign of ``p`` and therefore not ``integral of |p|``.
    Near multiple roots, floating-point evaluation of ``p`` is noise-level
    and may flip sign more than once; the resulting extra split points are
    harmless for integration (the affected mass is below noise).
    """
    if tol is None:
        tol = ROOT_TOL_REL * (hi - lo)
    c = poly_trim(coeffs)
    deg = len(c) - 1
    if deg <= 0 or hi <= lo:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [r] if lo < r < hi else []
    if deg == 2:
        disc = c[1] * c[1] - 4.0 * c[2] * c[0]
        if disc <= 0.0:
            return []
        q = -0.5 * (c[1] + math.copysign(math.sqrt(disc), c[1] if c[1] != 0.0 else 1.0))
        roots = []
        if q != 0.0:
            roots = [q / c[2], c[0] / q]
        else:
            r = math.sqrt(-c[0] / c[2]) if -c[0] / c[2] > 0 else 0.0
            roots = [-r, r]
        return sorted(r for r in roots if lo < r < hi)

    chain = sturm_chain(c)
    # Nudge endpoints inward so exact zeros of chain members at the interval
    # boundary cannot corrupt the variation counts.
    eta = 0.25 * tol
    roots: list[float] = []
    a0, b0 = lo + eta, hi - eta
    stack = [(a0, b0, sign_variations(chain, a0), sign_variations(chain, b0))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n <= 0:
            continue
        fa = poly_eval(c, a)
        fb = poly_eval(c, b)
        if n == 1:
            if fa == 0.0:
                roots.append(a)
            elif fb == 0.0:
                roots.append(b)
            elif (fa > 0.0) != (fb > 0.0):
                roots.append(_refine_sign_change(c, a, b, fa, tol))
            # same sign at both ends: even-multiplicity root, no split needed
            continue
        if b - a <= tol:
            if (fa > 0.0) != (fb > 0.0):
                roots.append(0.5 * (a + b))
            continue
        m = 0.5 * (a + b)
        vm = sign_variations(chain, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    roots.sort()
    # collapse splits closer than the tolerance (noise near multiple roots);
    # any sign information lost this way is below the isolation tolerance
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return merged


def integrate_abs_poly(coeffs, lo: float, hi: float) -> float:
    """Integral of ``|p|`` over ``[lo, hi]``, exact up to root isolation.

    The interval is split at the sign changes of ``p``; on each piece the
    signed integral is computed from the antiderivative and its absolute
    value is accumulated.  Splitting at a point that is not a sign change is
    harmless, so root-location error of order ``ROOT_TOL_REL * (hi - lo)``
    perturbs the result only at second order.
    """
    if hi <= lo:
        return 0.0
    c = poly_trim(coeffs)
    if len(c) == 1:
        return abs(c[0]) * (hi - lo)
    anti = poly_antideriv(c)
    pts = [lo] + sign_change_roots(c, lo, hi) + [hi]
    vals = poly_eval(anti, np.asarray(pts))
    return float(np.abs(np.diff(vals)).sum())

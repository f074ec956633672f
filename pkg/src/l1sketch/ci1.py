"""Exact sampling for the joint law of ``(integral of 1 dL, integral of x dL)``.

``L`` is Cauchy motion on ``[0, 1]`` (the symmetric 1-stable process).  The
pair of stochastic integrals of the functions ``1`` and ``x`` has an explicit
two-dimensional density with two analytic branches: a generic closed form
involving a complex arctangent, and a simpler formula on the line
``x0 = 2*x1`` where the generic expression degenerates.  The density is
dominated by ``(C/pi)`` times a bivariate Student law with one degree of
freedom, which yields an exact rejection sampler with acceptance rate
``pi/C``.

Conventions: ``x0`` is the coefficient-of-1 component, ``x1`` the
coefficient-of-x component.  All complex powers and logarithms use the
principal branch (log imaginary part in ``(-pi, pi]``, arctangent real part
in ``(-pi/2, pi/2)``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import EnvelopeDominationError, ParameterError
from .randstream import RandomStream

#: Domination constant: density <= (C/pi) * envelope everywhere.
DOMINATION_C = 25.0

#: Expected proposals per accepted sample.
REJECTION_OVERHEAD = DOMINATION_C / np.pi

#: Proposal cap per requested sample before declaring the envelope broken.
REJECTION_ITERATION_CAP = 10_000

_FOUR_OVER_PI2 = 4.0 / np.pi**2
_TWO_OVER_PI2 = 2.0 / np.pi**2


class Branch(enum.Enum):
    GENERIC = "generic"
    DIAGONAL = "diagonal"


@dataclass
class CI1Sample:
    """One draw (or a batch) of the pair of stochastic integrals."""

    x0: float | np.ndarray
    x1: float | np.ndarray


@dataclass
class CI1DensityTrace:
    """Diagnostic record of a single density evaluation."""

    q: complex
    branch: Branch
    value: float


def complex_atan(z):
    """Principal-branch arctangent, ``(i/2) * (log(1 - i z) - log(1 + i z))``.

    Evaluating the two logarithms separately (rather than the log of their
    ratio) keeps the real part in ``(-pi/2, pi/2)`` for every argument off
    the branch cuts on the imaginary axis.
    """
    z = np.asarray(z, dtype=complex)
    return 0.5j * (np.log(1.0 - 1j * z) - np.log(1.0 + 1j * z))


def diagonal_tolerance(x0):
    """Half-width of the band around ``x0 = 2 x1`` that uses the diagonal branch.

    Inside the band the generic formula divides by ``x0 - 2 x1`` and suffers
    cancellation; the diagonal formula is its analytic limit, and switching
    at ``1e-8 * (1 + |x0|)`` keeps the branch-selection error below 1e-6.
    """
    return 1e-8 * (1.0 + np.abs(x0))


def _density_generic(x0, x1):
    # Valid only away from the diagonal band: divides by x0 - 2*x1.
    delta = x0 - 2.0 * x1
    s0 = 1.0 + x0 * x0
    q = s0 - 2j * delta
    root_q = np.sqrt(q)  # principal; Re(q) >= 1 keeps it off the cut
    q32 = q * root_q
    flat = _FOUR_OVER_PI2 / (s0 * s0 + 4.0 * delta * delta)
    return flat + _TWO_OVER_PI2 * np.real(complex_atan(1j * root_q / delta) / q32)


def _density_diagonal(x0):
    s0 = 1.0 + x0 * x0
    return _FOUR_OVER_PI2 / (s0 * s0) + 1.0 / (np.pi * s0 * np.sqrt(s0))


def ci1_density(x0, x1):
    """Joint density of the unit-interval pair at ``(x0, x1)``; vectorized.

    Points with ``|x0 - 2 x1|`` inside :func:`diagonal_tolerance` use the
    diagonal closed form; all others use the generic formula.  Nonnegative
    for all finite inputs.
    """
    x0a, x1a = np.broadcast_arrays(
        np.asarray(x0, dtype=float), np.asarray(x1, dtype=float)
    )
    scalar = x0a.ndim == 0
    x0a, x1a = np.atleast_1d(x0a), np.atleast_1d(x1a)
    on_diag = np.abs(x0a - 2.0 * x1a) <= diagonal_tolerance(x0a)
    if not on_diag.any():
        out = _density_generic(x0a, x1a)
    else:
        out = np.empty(x0a.shape)
        out[on_diag] = _density_diagonal(x0a[on_diag])
        rest = ~on_diag
        if rest.any():
            out[rest] = _density_generic(x0a[rest], x1a[rest])
    return float(out[0]) if scalar else out


def ci1_density_trace(x0: float, x1: float) -> CI1DensityTrace:
    """Scalar density evaluation that also reports the branch taken."""
    x0 = float(x0)
    x1 = float(x1)
    delta = x0 - 2.0 * x1
    s0 = 1.0 + x0 * x0
    q = complex(s0, -2.0 * delta)
    if abs(delta) <= diagonal_tolerance(x0):
        return CI1DensityTrace(q=q, branch=Branch.DIAGONAL, value=float(_density_diagonal(x0)))
    return CI1DensityTrace(
        q=q, branch=Branch.GENERIC, value=float(_density_generic(np.float64(x0), np.float64(x1)))
    )


def student_envelope_density(x0, x1):
    """Bivariate Student(1 df) envelope ``(1/pi) (1 + x0^2 + (2 x1 - x0)^2)^(-3/2)``."""
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    t = 1.0 + x0 * x0 + (2.0 * x1 - x0) ** 2
    out = 1.0 / (np.pi * t * np.sqrt(t))
    return float(out) if out.ndim == 0 else out


def _envelope_draws(gen: np.random.Generator, n: int):
    """Raw envelope proposals from a numpy generator; resamples w == 0."""
    y = gen.standard_normal((n, 3))
    w = y[:, 2] * y[:, 2]
    while np.any(w == 0.0):
        bad = w == 0.0
        y[bad, 2] = gen.standard_normal(int(bad.sum()))
        w = y[:, 2] * y[:, 2]
    rw = np.sqrt(w)
    u = y[:, 0] / rw
    v = y[:, 1] / rw
    return u, 0.5 * (u + v)


def _proposal_block(gen: np.random.Generator, n: int):
    """Envelope proposals plus their acceptance uniforms, in fixed draw order."""
    x0, x1 = _envelope_draws(gen, n)
    return x0, x1, gen.random(n)


def _accept_mask(x0, x1, u01):
    """Rejection test: accept when ``u * (C/pi) * g <= f``."""
    return u01 * REJECTION_OVERHEAD * student_envelope_density(x0, x1) <= ci1_density(x0, x1)


def sample_student_envelope(rng: RandomStream, size: int | None = None) -> CI1Sample:
    """Draw from the envelope: ``u = y1/sqrt(w)``, ``v = y2/sqrt(w)``,
    return ``(u, (u + v)/2)``.

    ``y1, y2`` are standard normal and ``w`` is chi-squared(1); a zero ``w``
    (probability zero) is resampled.  The change of variables ``u = x0``,
    ``v = 2 x1 - x0`` (Jacobian 1/2) maps the spherical bivariate Student(1)
    law of ``(u, v)`` exactly onto :func:`student_envelope_density`.
    """
    n = 1 if size is None else int(size)
    x0, x1 = _envelope_draws(rng.generator, n)
    if size is None:
        return CI1Sample(float(x0[0]), float(x1[0]))
    return CI1Sample(x0, x1)


def sample_ci1_unit(rng: RandomStream, size: int | None = None) -> CI1Sample:
    """Exact draws of the unit-interval pair by rejection under the envelope.

    Proposals come from :func:`sample_student_envelope`; a proposal ``z`` is
    accepted when ``u * (C/pi) * g(z) <= f(z)`` with ``C = 25``.  Expected
    proposals per sample: ``25/pi``, about 8.  A proposal budget of
    ``REJECTION_ITERATION_CAP`` per requested sample guards against a broken
    domination bound; exceeding it raises, it never loops silently.
    """
    n = 1 if size is None else int(size)
    if n == 0:
        return CI1Sample(np.empty(0), np.empty(0))
    out0 = np.empty(n)
    out1 = np.empty(n)
    filled = 0
    proposals_used = 0
    while filled < n:
        k = max(int((n - filled) * REJECTION_OVERHEAD * 1.3), 64)
        px0, px1, u = _proposal_block(rng.generator, k)
        accept = _accept_mask(px0, px1, u)
        take = min(int(accept.sum()), n - filled)
        if take > 0:
            out0[filled : filled + take] = px0[accept][:take]
            out1[filled : filled + take] = px1[accept][:take]
            filled += take
        proposals_used += k
        if proposals_used > REJECTION_ITERATION_CAP * n:
            raise EnvelopeDominationError(
                f"rejection sampler used {proposals_used} proposals for {n} draws; "
                "envelope domination appears violated"
            )
    if size is None:
        return CI1Sample(float(out0[0]), float(out1[0]))
    return CI1Sample(out0, out1)


def rescale_ci1(z: CI1Sample, a: float, b: float) -> CI1Sample:
    """Map unit-interval draws to the interval ``[a, b]``.

    The integrand ``(1, x)`` restricted to ``[a, b]`` pulls back to
    ``(1, a + (b-a) u)`` on the unit interval, so by linearity and scaling of
    the stochastic integral the image draw is
    ``((b-a) x0, (b-a) (a x0 + (b-a) x1))``.
    """
    if not b > a:
        raise ParameterError(f"need b > a, got a={a}, b={b}")
    w = b - a
    return CI1Sample(w * z.x0, w * (a * z.x0 + w * z.x1))

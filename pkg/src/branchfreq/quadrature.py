"""Adaptive quadrature helpers for power-law and Beta-type kernels.

All generator evaluations integrate smooth factors against kernels
``y**p * (1-y)**q`` whose exponents may lie in (-1, 0].  Endpoint
singularities are removed by the substitutions ``y = s**(1/(1+p))`` near 0
and ``1 - y = s**(1/(1+q))`` near 1, after which QUADPACK converges at the
requested absolute tolerance.
"""

import math

import numpy as np
from scipy import integrate

from .errors import DivergentMass

QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-11
_QUAD_LIMIT = 200


def radial_power_integral(exponent: float, lo: float, hi: float) -> float:
    """Closed form of ``int_lo^hi r**exponent dr`` with 0 <= lo <= hi <= inf.

    Raises DivergentMass when the integral is infinite.
    """
    if lo < 0 or hi < lo:
        raise ValueError(f"invalid radial interval ({lo}, {hi})")
    if hi == lo:
        return 0.0
    e1 = exponent + 1.0
    if math.isinf(hi):
        if e1 >= 0:
            raise DivergentMass(f"r**{exponent} diverges on ({lo}, inf)")
        if lo == 0:
            raise DivergentMass(f"r**{exponent} diverges at 0")
        return -(lo ** e1) / e1
    if lo == 0:
        if e1 <= 0:
            raise DivergentMass(f"r**{exponent} diverges at 0")
        return (hi ** e1) / e1
    if e1 == 0:
        return math.log(hi / lo)
    return (hi ** e1 - lo ** e1) / e1


def _quad(f, a, b, points=None):
    if points:
        pts = sorted(p for p in points if a < p < b)
    else:
        pts = None
    val, _ = integrate.quad(
        f, a, b, points=pts, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=_QUAD_LIMIT
    )
    return val


def beta_kernel_integral(smooth, p: float, q: float, lo: float = 0.0, hi: float = 1.0,
                         points=None) -> float:
    """Integrate ``smooth(y) * y**p * (1-y)**q`` over (lo, hi) in (0, 1).

    ``smooth`` must be bounded on (lo, hi); a kernel exponent <= -1 is allowed
    only when the corresponding endpoint is excluded (lo > 0 resp. hi < 1).
    ``points`` marks interior breakpoints (kinks) of ``smooth``.
    """
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"invalid kernel interval ({lo}, {hi})")
    if lo == 0.0 and p <= -1.0:
        raise DivergentMass(f"kernel y**{p} diverges at 0")
    if hi == 1.0 and q <= -1.0:
        raise DivergentMass(f"kernel (1-y)**{q} diverges at 1")

    points = list(points) if points else []
    mid = 0.5
    total = 0.0

    def raw(y):
        return smooth(y) * y ** p * (1.0 - y) ** q

    # Lower piece, substituted when y**p is singular at an included endpoint 0.
    lo_hi = min(hi, mid)
    if lo < lo_hi:
        if -1.0 < p < 0.0 and lo < 0.05:
            c = 1.0 / (1.0 + p)

            def lower(s):
                y = s ** c
                return c * smooth(y) * (1.0 - y) ** q

            total += _quad(lower, lo ** (1.0 / c), lo_hi ** (1.0 / c),
                           points=[pt ** (1.0 / c) for pt in points])
        else:
            total += _quad(raw, lo, lo_hi, points=points)

    # Upper piece, substituted when (1-y)**q is singular at an included endpoint 1.
    hi_lo = max(lo, mid)
    if hi_lo < hi:
        if -1.0 < q < 0.0 and hi > 0.95:
            c = 1.0 / (1.0 + q)

            def upper(s):
                y = 1.0 - s ** c
                return c * smooth(y) * y ** p

            total += _quad(upper, (1.0 - hi) ** (1.0 / c), (1.0 - hi_lo) ** (1.0 / c),
                           points=[(1.0 - pt) ** (1.0 / c) for pt in points])
        else:
            total += _quad(raw, hi_lo, hi, points=points)

    return total


def poly_shift_divide(coeffs: np.ndarray) -> np.ndarray:
    """Divide a polynomial with zero constant term by its variable.

    Exact coefficient shift; used to strip known zeros of jump integrands
    without numerical cancellation.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size and abs(coeffs[0]) > 1e-13 * max(1.0, np.max(np.abs(coeffs))):
        raise ValueError("polynomial has a nonzero constant term")
    return coeffs[1:] if coeffs.size > 1 else np.zeros(1)

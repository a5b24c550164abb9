"""Quadrature evaluation of the generators in play.

Four generator surfaces live here: the full two-type generator composed with
the frequency map g(x) = x1/(x1+x2), the three limiting frequency generators,
the two-type Lambda-Fleming-Viot generator in polar coordinates, and the
action of the frequency generators on the monomial basis (moment matrices
with the induced linear moment ODE).

Test functions are polynomials of degree at most 8; jump integrands are
evaluated through exact polynomial compositions so that the known zeros at
small jump sizes never suffer numerical cancellation.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate, linalg

from .csbi_model import (
    CSBIParams,
    Case2Coeffs,
    Case3Coeffs,
    GwfCoeffs,
    TruncationChoice,
)
from .errors import DivergentMass, NotClosed
from .quadrature import QUAD_ABS_TOL, QUAD_REL_TOL, beta_kernel_integral

MAX_DEGREE = 8


@dataclass(frozen=True)
class TestFunction:
    """Polynomial test function on [0, 1] in the monomial basis."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("empty coefficient list")
        if len(self.coefficients) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(self.coefficients) - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        for c in self.coefficients:
            if not math.isfinite(c):
                raise ValueError("coefficients must be finite")

    @classmethod
    def monomial(cls, n: int) -> "TestFunction":
        return cls((0.0,) * n + (1.0,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return npoly.polyval(x, self.coefficients)

    def df(self, x):
        return npoly.polyval(x, npoly.polyder(self.coefficients))

    def d2f(self, x):
        return npoly.polyval(x, npoly.polyder(self.coefficients, 2))


def beta_value(beta_exponent: float, z):
    """Clock density beta(z) = z**e."""
    return np.asarray(z, dtype=float) ** beta_exponent


def _affine_compose(coeffs, a: float, b: float) -> np.ndarray:
    """Coefficients in y of f(a + b*y) for polynomial f."""
    out = np.zeros(1)
    for c in reversed(coeffs):
        out = npoly.polymul(out, [a, b])
        out = npoly.polyadd(out, [c])
    return np.atleast_1d(out)


@lru_cache(maxsize=4096)
def _pure_beta(p: float, q: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Cached int y**p (1-y)**q dy over (lo, hi) by adaptive quadrature."""
    return beta_kernel_integral(lambda y: np.ones_like(np.asarray(y, dtype=float)), p, q, lo, hi)


@lru_cache(maxsize=512)
def _one_minus_pow_defect(n: int, p: float, q: float) -> float:
    """Cached int ((1-y)**n - 1)/y * y**(p+1) (1-y)**q dy over (0, 1)."""
    # ((1-y)**n - 1)/y is a polynomial: exact binomial coefficients.
    coeffs = np.array([math.comb(n, j + 1) * (-1.0) ** (j + 1) for j in range(n)])
    return beta_kernel_integral(lambda y: npoly.polyval(y, coeffs), p + 1.0, q)


def _jump_bracket_integral(f_comp: np.ndarray, comp_coeff: float, alpha: float,
                           y_cut: float, kernel_q: float) -> float:
    """Integral of [P(y) - C*y/(1-y)*1{y<=y_cut}] * y**(-1-alpha) * (1-y)**kernel_q dy
    over (0, 1), where P(y) = f(target(y)) - f(start) is given by its exact
    composition coefficients (f_comp with the constant removed).

    For alpha >= 1 convergence requires the first-order terms to cancel;
    a mismatch means the underlying measure is not admissible at this state
    and raises DivergentMass.
    """
    pdiv = f_comp[1:] if f_comp.size > 1 else np.zeros(1)
    b1 = pdiv[0] if pdiv.size else 0.0
    scale = max(1.0, float(np.max(np.abs(f_comp))), abs(comp_coeff))

    if alpha >= 1.0:
        if abs(b1 - comp_coeff) > 1e-10 * scale:
            raise DivergentMass(
                "first-order jump term is uncompensated; the generator integral diverges"
            )
        pdiv2 = pdiv[1:] if pdiv.size > 1 else np.zeros(1)
        inner = beta_kernel_integral(
            lambda y: npoly.polyval(y, pdiv2) - comp_coeff / (1.0 - y),
            1.0 - alpha, kernel_q, hi=y_cut,
        )
        outer = beta_kernel_integral(
            lambda y: npoly.polyval(y, pdiv), -alpha, kernel_q, lo=y_cut,
        )
        return inner + outer

    inner = beta_kernel_integral(
        lambda y: npoly.polyval(y, pdiv) - comp_coeff / (1.0 - y),
        -alpha, kernel_q, hi=y_cut,
    )
    outer = beta_kernel_integral(
        lambda y: npoly.polyval(y, pdiv), -alpha, kernel_q, lo=y_cut,
    )
    return inner + outer


def csbi_generator_apply(
    p: CSBIParams, trunc: TruncationChoice, f: TestFunction, x: tuple[float, float]
) -> float:
    """Full two-type generator applied to f(g(x)) with g(x) = x1/(x1+x2).

    Works for arbitrary parameters of the generator, not only classified
    ones; a jump integral that genuinely diverges (first-order terms left
    uncompensated by off-axis mass with index >= 1, or an immigration tail
    with index <= 1) raises DivergentMass.
    """
    x1, x2 = float(x[0]), float(x[1])
    z = x1 + x2
    if not z > 0:
        raise ValueError("state must have positive total mass")
    r = x1 / z
    fp = f.df(r)
    fpp = f.d2f(r)

    value = p.c1 * (r / z) * (fpp * (1.0 - r) ** 2 - 2.0 * fp * (1.0 - r))
    value += p.c2 * ((1.0 - r) / z) * (fpp * r ** 2 + 2.0 * fp * r)
    value += (1.0 - r) * fp * (p.b11 * r + p.b21 * (1.0 - r) + p.eta1 / z)
    value -= r * fp * (p.b12 * r + p.b22 * (1.0 - r) + p.eta2 / z)

    kappa = trunc.cutoff
    y_cut = kappa / (z + kappa)

    for i, m in enumerate(p.branching_measures):
        if m is None or m.total_weight == 0.0:
            continue
        alpha = m.alpha
        mass = x1 if i == 0 else x2
        if mass == 0.0:
            continue
        for atom in m.atoms:
            if atom.weight == 0.0:
                continue
            s = atom.total
            c = atom.xi[0] / s
            comp = _affine_compose(f.coefficients, r, c - r)
            # Compensator linear coefficient of the bracket: the truncation
            # subtracts c*(1-r)*f' (type 1) resp. adds (1-c)*r*f' (type 2).
            comp_coeff = c * (1.0 - r) * fp if i == 0 else -(1.0 - c) * r * fp
            integral = _jump_bracket_integral(comp, comp_coeff, alpha, y_cut, alpha - 1.0)
            value += mass * atom.weight * (z / s) ** (-alpha) * integral

    if p.nu is not None and p.nu.total_weight > 0.0:
        alpha = p.nu.alpha
        if alpha <= 1.0:
            raise DivergentMass("immigration tail mass is infinite for alpha <= 1")
        for atom in p.nu.atoms:
            if atom.weight == 0.0:
                continue
            s = atom.total
            c = atom.xi[0] / s
            comp = _affine_compose(f.coefficients, r, c - r)
            pdiv = comp[1:] if comp.size > 1 else np.zeros(1)
            integral = beta_kernel_integral(
                lambda y, pd=pdiv: npoly.polyval(y, pd), 1.0 - alpha, alpha - 2.0
            )
            value += atom.weight * (z / s) ** (1.0 - alpha) * integral

    return float(value)


def freq_generator_apply(coeffs, f: TestFunction, r: float) -> float:
    """Limiting frequency generator applied to f at r in [0, 1]."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r={r} outside [0, 1]")
    r = float(r)
    fp = f.df(r)
    fpp = f.d2f(r)

    if isinstance(coeffs, GwfCoeffs):
        drift = (
            2.0 * (coeffs.c2 - coeffs.c1) * r * (1.0 - r)
            + coeffs.eta1 * (1.0 - r)
            - coeffs.eta2 * r
        )
        diff = coeffs.c1 * r * (1.0 - r) ** 2 + coeffs.c2 * (1.0 - r) * r ** 2
        return float(drift * fp + diff * fpp)

    if isinstance(coeffs, Case2Coeffs):
        alpha = coeffs.alpha
        value = 0.0
        b_sel = _pure_beta(1.0 - alpha, alpha - 2.0)
        for a_i, up in ((coeffs.a1, True), (coeffs.a2, False)):
            if a_i == 0.0:
                continue
            delta = (1.0 - r) if up else -r
            comp = _affine_compose(f.coefficients, r, delta)
            pdiv2 = comp[2:] if comp.size > 2 else np.zeros(1)
            j_smooth = beta_kernel_integral(
                lambda w, pd=pdiv2: npoly.polyval(w, pd), 1.0 - alpha, alpha - 1.0
            )
            # w/(1-w) - w = w^2/(1-w): the compensator defect integrates to
            # the Beta-type selection constant.
            pref = r if up else (1.0 - r)
            comp_lin = fp * (1.0 - r) if up else -fp * r
            value += a_i * pref * (j_smooth - comp_lin * b_sel)
        for atom in coeffs.lambda_immigration:
            s = atom.total
            c = atom.xi[0] / s
            comp = _affine_compose(f.coefficients, r, c - r)
            pdiv = comp[1:] if comp.size > 1 else np.zeros(1)
            integral = beta_kernel_integral(
                lambda y, pd=pdiv: npoly.polyval(y, pd), 1.0 - alpha, alpha - 2.0
            )
            value += atom.weight * s ** (alpha - 1.0) * integral
        return float(value)

    if isinstance(coeffs, Case3Coeffs):
        alpha = coeffs.alpha
        value = 0.0
        for atoms, pref in ((coeffs.lambda1, r), (coeffs.lambda2, 1.0 - r)):
            if pref == 0.0:
                continue
            for atom in atoms:
                s = atom.total
                c = atom.xi[0] / s
                comp = _affine_compose(f.coefficients, r, c - r)
                pdiv = comp[1:] if comp.size > 1 else np.zeros(1)
                integral = beta_kernel_integral(
                    lambda y, pd=pdiv: npoly.polyval(y, pd), -alpha, alpha - 1.0
                )
                value += pref * atom.weight * s ** alpha * integral
        return float(value)

    raise TypeError(f"unsupported coefficient set {type(coeffs).__name__}")


def griffiths_generator_apply(lambda1, lambda2, alpha: float, g: TestFunction,
                              x: float) -> float:
    """Two-type jump Fleming-Viot generator with polar-coordinate intensities.

    Evaluates, for each atom xi of the two spherical measures,
        int_0^{1/s} [g(x(1 - s u) + u xi_1) - g(x)] (1 - s u)^(alpha-1) u^(-1-alpha) du
    with s = xi_1 + xi_2, weighting type 1 by x and type 2 by (1 - x).  The
    quadrature runs in the radial polar variable u, independent of the
    relative-size variable used by the limiting case-3 generator.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha={alpha} outside (0, 1)")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")

    def atom_integral(atom):
        s = atom.total
        drift_dir = atom.xi[0] - s * x
        gx = g(x)
        gp = g.df(x)

        def bracket(u):
            if u < 1e-13:
                return u * gp * drift_dir
            return g(x + u * drift_dir) - gx

        c_low = 1.0 / (1.0 - alpha)
        u_mid = 0.5 / s

        def lower(t):
            u = t ** c_low
            return c_low * (bracket(u) / u) * (1.0 - s * u) ** (alpha - 1.0)

        low, _ = integrate.quad(
            lower, 0.0, u_mid ** (1.0 - alpha),
            epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=200,
        )

        c_up = 1.0 / alpha

        def upper_sub(t):
            v = t ** c_up
            u = (1.0 - v) / s
            return (c_up / s) * bracket(u) * u ** (-1.0 - alpha)

        up, _ = integrate.quad(
            upper_sub, 0.0, 0.5 ** alpha,
            epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=200,
        )
        return low + up

    value = 0.0
    for atoms, pref in ((lambda1, x), (lambda2, 1.0 - x)):
        if pref == 0.0:
            continue
        for atom in atoms:
            if atom.weight == 0.0:
                continue
            value += pref * atom.weight * atom_integral(atom)
    return float(value)


# --- moment matrices --------------------------------------------------------


@dataclass(frozen=True)
class MomentMatrix:
    """Action of a frequency generator on monomials r**n, n <= n_max.

    Row n holds the coefficients of A(r**n) over degrees 0..n_max+1; the
    system is closed when the degree-(n_max+1) column vanishes, in which case
    the raw moments follow the linear ODE m' = Q m.
    """

    Q: np.ndarray
    closed: bool
    n_max: int
    tol: float


def _pad(coeffs, width):
    out = np.zeros(width)
    arr = np.asarray(coeffs, dtype=float)
    out[: arr.size] = arr
    return out


def moment_matrix(coeffs, n_max: int = 4, tol: float = 1e-10) -> MomentMatrix:
    """Expand A(r**n) in the monomial basis for n = 0..n_max."""
    if not 0 <= n_max <= MAX_DEGREE:
        raise ValueError(f"n_max={n_max} outside 0..{MAX_DEGREE}")
    width = n_max + 2
    Q = np.zeros((n_max + 1, width))

    if isinstance(coeffs, GwfCoeffs):
        drift = np.array([
            coeffs.eta1,
            2.0 * (coeffs.c2 - coeffs.c1) - coeffs.eta1 - coeffs.eta2,
            -2.0 * (coeffs.c2 - coeffs.c1),
        ])
        diff = np.array([
            0.0,
            coeffs.c1,
            coeffs.c2 - 2.0 * coeffs.c1,
            coeffs.c1 - coeffs.c2,
        ])
        for n in range(1, n_max + 1):
            row = n * npoly.polymul(drift, _monomial_shift(1.0, n - 1))
            if n >= 2:
                row = npoly.polyadd(
                    row, n * (n - 1) * npoly.polymul(diff, _monomial_shift(1.0, n - 2))
                )
            Q[n, :] = _pad(row, width)[:width]
    elif isinstance(coeffs, Case2Coeffs):
        alpha = coeffs.alpha
        b_sel = _pure_beta(1.0 - alpha, alpha - 2.0)
        for n in range(1, n_max + 1):
            row = np.zeros(width)
            # type-1 branching: prefactor r, target r + w(1-r)
            if coeffs.a1 != 0.0:
                acc = np.zeros(width)
                for j in range(2, n + 1):
                    i_j = _pure_beta(j - 1.0 - alpha, alpha - 1.0)
                    term = math.comb(n, j) * i_j * _poly_one_minus_pow(j, n - j, extra_shift=1)
                    acc = npoly.polyadd(acc, term)
                sel = -n * b_sel * _poly_one_minus_pow(1, n - 1, extra_shift=1)
                acc = npoly.polyadd(acc, sel)
                row = npoly.polyadd(row, coeffs.a1 * acc)
            # type-2 branching: prefactor (1-r), target r(1-w)
            if coeffs.a2 != 0.0:
                acc = np.zeros(width)
                for j in range(2, n + 1):
                    i_j = _pure_beta(j - 1.0 - alpha, alpha - 1.0)
                    term = math.comb(n, j) * ((-1.0) ** j) * i_j * _monomial_shift(1, n)
                    acc = npoly.polyadd(acc, term)
                acc = npoly.polyadd(acc, n * b_sel * _monomial_shift(1.0, n))
                acc = npoly.polymul(acc, [1.0, -1.0])
                row = npoly.polyadd(_pad(row, width), coeffs.a2 * _pad(acc, width))
            # immigration
            for atom in coeffs.lambda_immigration:
                s = atom.total
                c = atom.xi[0] / s
                acc = np.zeros(width)
                for k in range(n):
                    i_k = _pure_beta(n - k - alpha, k + alpha - 2.0)
                    acc = npoly.polyadd(
                        acc, math.comb(n, k) * (c ** (n - k)) * i_k * _monomial_shift(1, k)
                    )
                acc = npoly.polyadd(acc, _one_minus_pow_defect(n, -alpha, alpha - 2.0) * _monomial_shift(1, n))
                row = npoly.polyadd(_pad(row, width), atom.weight * s ** (alpha - 1.0) * _pad(acc, width))
            Q[n, :] = _pad(row, width)[:width]
    elif isinstance(coeffs, Case3Coeffs):
        alpha = coeffs.alpha
        for n in range(1, n_max + 1):
            row = np.zeros(width)
            for atoms, pref_shift in ((coeffs.lambda1, True), (coeffs.lambda2, False)):
                for atom in atoms:
                    s = atom.total
                    c = atom.xi[0] / s
                    acc = np.zeros(width)
                    for k in range(n):
                        i_k = _pure_beta(n - k - 1.0 - alpha, k + alpha - 1.0)
                        acc = npoly.polyadd(
                            acc, math.comb(n, k) * (c ** (n - k)) * i_k * _monomial_shift(1, k)
                        )
                    acc = npoly.polyadd(
                        acc, _one_minus_pow_defect(n, -1.0 - alpha, alpha - 1.0) * _monomial_shift(1, n)
                    )
                    if pref_shift:
                        acc = npoly.polymul(acc, [0.0, 1.0])
                    else:
                        acc = npoly.polymul(acc, [1.0, -1.0])
                    row = npoly.polyadd(_pad(row, width), atom.weight * (s ** alpha) * _pad(acc, width))
            Q[n, :] = _pad(row, width)[:width]
    else:
        raise TypeError(f"unsupported coefficient set {type(coeffs).__name__}")

    closed = bool(np.max(np.abs(Q[:, n_max + 1])) < tol)
    return MomentMatrix(Q=Q, closed=closed, n_max=n_max, tol=tol)


def _monomial_shift(coeff: float, power: int) -> np.ndarray:
    """Polynomial coeff * r**power as a coefficient array."""
    out = np.zeros(power + 1)
    out[power] = coeff
    return out


def _poly_one_minus_pow(j: int, base_power: int, extra_shift: int = 0) -> np.ndarray:
    """Coefficients of r**(base_power + extra_shift) * (1-r)**j."""
    poly = np.array([1.0])
    for _ in range(j):
        poly = npoly.polymul(poly, [1.0, -1.0])
    return npoly.polymul(poly, _monomial_shift(1.0, base_power + extra_shift))


def moment_ode_solve(mm: MomentMatrix, r0: float, t: float) -> np.ndarray:
    """Raw moments (1, m1, ..., m_{n_max}) at time t via the matrix exponential."""
    if not mm.closed:
        raise NotClosed("moment system is not closed; degree grows past n_max")
    S = mm.Q[:, : mm.n_max + 1]
    m0 = np.array([r0 ** n for n in range(mm.n_max + 1)])
    return linalg.expm(t * S) @ m0


def apply_polynomial(coeffs, f: TestFunction) -> np.ndarray:
    """Coefficients of A f for polynomial f, aggregated from moment rows.

    The returned array has degree at most f.degree + 1; evaluate with
    numpy.polynomial.polynomial.polyval.  This is the fast path for
    martingale-residual batteries, where Af must be evaluated at every
    sampled state.
    """
    mm = moment_matrix(coeffs, n_max=f.degree)
    out = np.zeros(f.degree + 2)
    for n, c in enumerate(f.coefficients):
        if c != 0.0:
            out += c * mm.Q[n, :]
    return out

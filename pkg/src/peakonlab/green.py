"""Green's function of the Helmholtz operator (1 - d^2/dx^2) on the line and unit circle.

Line:   G(x) = e^{-|x|} / 2
Circle: G(x) = ch(1/2 - x + floor(x)) / (2 sh(1/2))

Besides kernel evaluation this module holds a kink-aware adaptive
Gauss-Legendre convolution, the spectral inverse on a uniform grid, and the
closed-form convolutions that appear in the peakon residuals together with
their quadrature assemblies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AtKink, ToleranceNotMet
from .model import CH_HALF, SH_HALF, Domain, zeta
from .spectral import GridState

LINE_CUTOFF = 40.0
GL_ORDER = 15
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GreenKernel:
    domain: Domain

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        if self.domain is Domain.LINE:
            return 0.5 * np.exp(-np.abs(x))
        return np.cosh(zeta(x)) / (2.0 * SH_HALF)

    def eval_dx(self, x):
        """G'(x), taking the value 0 (line) or the right limit (circle) at the kink."""
        x = np.asarray(x, dtype=float)
        if self.domain is Domain.LINE:
            return -0.5 * np.sign(x) * np.exp(-np.abs(x))
        return -np.sinh(zeta(x)) / (2.0 * SH_HALF)


LINE_KERNEL = GreenKernel(Domain.LINE)
CIRCLE_KERNEL = GreenKernel(Domain.CIRCLE)


def eval_green(kernel: GreenKernel, x):
    return kernel.eval(x)


@dataclass(frozen=True)
class KinkSet:
    locations: tuple[float, ...] = ()

    def __post_init__(self):
        pts = sorted(float(p) for p in self.locations)
        out: list[float] = []
        for p in pts:
            if not out or p - out[-1] > 1e-14:
                out.append(p)
        object.__setattr__(self, "locations", tuple(out))

    @classmethod
    def of(cls, *points: float) -> KinkSet:
        return cls(tuple(points))


def helmholtz_inverse(state: GridState) -> GridState:
    """Apply (1 - d^2/dx^2)^{-1} on the period-1 circle by the Fourier multiplier."""
    g = state.grid
    uh = np.fft.rfft(state.u) / g.helmholtz
    return GridState(state.time, np.fft.irfft(uh, state.N))


def helmholtz_forward(state: GridState) -> GridState:
    return GridState(state.time, state.m)


# -- adaptive Gauss-Legendre ---------------------------------------------------

def _gl(func, a, b):
    half = 0.5 * (b - a)
    y = 0.5 * (a + b) + half * _GL_X
    v = func(y)
    return half * np.dot(_GL_W, v), half * np.dot(_GL_W, np.abs(v))


def adaptive_gauss_legendre(func: Callable, breakpoints, tol: float, max_intervals: int = 4000) -> float:
    """Integrate ``func`` over [breakpoints[0], breakpoints[-1]], refining dyadically.

    Each panel between consecutive breakpoints is integrated with 15-point
    Gauss-Legendre; a panel is accepted once it agrees with the sum over its
    two halves to within its share of ``tol`` (or to rounding level).
    """
    pts = np.asarray(breakpoints, dtype=float)
    total_len = pts[-1] - pts[0]
    if total_len <= 0.0:
        return 0.0
    stack = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            whole, absw = _gl(func, a, b)
            stack.append((a, b, whole, absw))
    result = 0.0
    used = len(stack)
    while stack:
        a, b, whole, absw = stack.pop()
        m = 0.5 * (a + b)
        left, absl = _gl(func, a, m)
        right, absr = _gl(func, m, b)
        err = abs(left + right - whole)
        share = tol * (b - a) / total_len
        if err <= share or err <= 64.0 * _EPS * (absl + absr):
            result += left + right
            continue
        used += 2
        if used > max_intervals or (b - a) < 1e-12 * total_len:
            raise ToleranceNotMet(
                f"adaptive quadrature budget exhausted on [{a:.6g}, {b:.6g}] (error estimate {err:.3g})"
            )
        stack.append((a, m, left, absl))
        stack.append((m, b, right, absr))
    return float(result)


def quad_convolve(kernel: GreenKernel, f: Callable, kinks: KinkSet | tuple = (), x: float = 0.0,
                  tol: float = 1e-13, *, derivative: bool = False) -> float:
    """(K * f)(x) = int K(x - y) f(y) dy with K = G, or G' when ``derivative``.

    ``f`` must be vectorized and piecewise smooth with kinks (or jumps) only
    at ``kinks``; on the circle kink locations are read modulo 1.  The line
    integral is truncated to |y - x| <= 40.
    """
    if not 1e-14 < tol < 1e-4:
        raise ValueError(f"tol must lie in (1e-14, 1e-4), got {tol}")
    locs = kinks.locations if isinstance(kinks, KinkSet) else tuple(kinks)
    x = float(x)
    kfun = kernel.eval_dx if derivative else kernel.eval
    if kernel.domain is Domain.LINE:
        a, b = x - LINE_CUTOFF, x + LINE_CUTOFF
        inner = [k for k in locs if a < k < b]
    else:
        # one period ending at the kernel kink y = x
        a, b = x - 1.0, x
        inner = []
        for k in locs:
            k = k - math.floor(k)
            p = k + math.floor(a - k) + 1.0
            if a < p < b:
                inner.append(p)
    pts = sorted({a, b, *inner} | ({x} if a < x < b else set()))
    return adaptive_gauss_legendre(lambda y: kfun(x - y) * f(y), pts, tol)


# -- closed forms ---------------------------------------------------------------

def _sgn_abs(s):
    s = np.asarray(s, dtype=float)
    return np.sign(s), np.abs(s)


def closedform_line_cubic(A: float, k1: float, s):
    """1/2 k1 G*u_x^3 + k1 G*d_x(u^3 + 3/2 u u_x^2) for u = A e^{-|x-ct|}, at s = x - ct."""
    sg, a = _sgn_abs(s)
    return sg * k1 * A**3 * (np.exp(-3.0 * a) - np.exp(-a))


def closedform_line_quadratic(A: float, k2: float, s):
    """k2 G*d_x(u^2 + u_x^2/2) for the line peakon."""
    sg, a = _sgn_abs(s)
    return sg * k2 * A**2 * (np.exp(-2.0 * a) - np.exp(-a))


def _circle_sigma(s, side):
    s = np.asarray(s, dtype=float)
    sigma = s - np.floor(s)
    at = sigma == 0.0
    if np.any(at):
        if side is None:
            raise AtKink("s is an integer (crest line); pass side='+' or side='-'")
        sigma = np.where(at, 0.0 if side == "+" else 1.0, sigma)
    return sigma


def closedform_circle_cubic(a: float, k1: float, s):
    """k1 a^3 (sh^2(1/2) sh(zeta) - sh^3(zeta)).

    This is the negated nonlocal cubic part of the residual,
    -(1/2 k1 G*u_x^3 + k1 G*d_x(u^3 + 3/2 u u_x^2)), for u = a ch(zeta).
    """
    z = np.sinh(zeta(s))
    return k1 * a**3 * (SH_HALF**2 * z - z**3)


def closedform_circle_sh2(s, side: str | None = None):
    """G * sh(2 zeta) on the circle."""
    w = 0.5 - _circle_sigma(s, side)
    out = (2.0 / 3.0) * (CH_HALF * np.sinh(w) - np.sinh(w) * np.cosh(w))
    return out if np.ndim(out) else float(out)


def closedform_circle_quadratic(a: float, k2: float, s, side: str | None = None):
    """-k2 G*d_x(u^2 + u_x^2/2) = k2 a^2 (ch(1/2) - ch(zeta)) sh(zeta)."""
    w = 0.5 - _circle_sigma(s, side)
    out = k2 * a**2 * (CH_HALF - np.cosh(w)) * np.sinh(w)
    return out if np.ndim(out) else float(out)


# -- quadrature assemblies of the same convolutions ----------------------------

def _each(fun, s):
    s = np.asarray(s, dtype=float)
    out = np.array([fun(float(v)) for v in s.ravel()]).reshape(s.shape)
    return out if out.ndim else float(out)


def quadrature_line_cubic(A: float, k1: float, s, tol: float = 1e-13):
    u = lambda y: A * np.exp(-np.abs(y))
    ux = lambda y: -A * np.sign(y) * np.exp(-np.abs(y))
    cube = lambda y: ux(y) ** 3
    flux = lambda y: u(y) ** 3 + 1.5 * u(y) * ux(y) ** 2
    kinks = KinkSet.of(0.0)

    def one(x):
        return k1 * (0.5 * quad_convolve(LINE_KERNEL, cube, kinks, x, tol)
                     + quad_convolve(LINE_KERNEL, flux, kinks, x, tol, derivative=True))
    return _each(one, s)


def quadrature_line_quadratic(A: float, k2: float, s, tol: float = 1e-13):
    flux = lambda y: 1.5 * A**2 * np.exp(-2.0 * np.abs(y))
    kinks = KinkSet.of(0.0)
    return _each(lambda x: k2 * quad_convolve(LINE_KERNEL, flux, kinks, x, tol, derivative=True), s)


def quadrature_circle_cubic(a: float, k1: float, s, tol: float = 1e-13):
    """k1 a^3 [G*(3 sh zeta + 7/2 sh^3 zeta) - 3/2 G_x*(ch zeta sh^2 zeta)] by quadrature."""
    odd = lambda y: 3.0 * np.sinh(zeta(y)) + 3.5 * np.sinh(zeta(y)) ** 3
    even = lambda y: np.cosh(zeta(y)) * np.sinh(zeta(y)) ** 2
    kinks = KinkSet.of(0.0)

    def one(x):
        return k1 * a**3 * (quad_convolve(CIRCLE_KERNEL, odd, kinks, x, tol)
                            - 1.5 * quad_convolve(CIRCLE_KERNEL, even, kinks, x, tol, derivative=True))
    return _each(one, s)


def quadrature_circle_sh2(s, tol: float = 1e-13):
    f = lambda y: np.sinh(2.0 * zeta(y))
    kinks = KinkSet.of(0.0)
    return _each(lambda x: quad_convolve(CIRCLE_KERNEL, f, kinks, x, tol), s)


def quadrature_circle_quadratic(a: float, k2: float, s, tol: float = 1e-13):
    flux = lambda y: a**2 * (np.cosh(zeta(y)) ** 2 + 0.5 * np.sinh(zeta(y)) ** 2)
    kinks = KinkSet.of(0.0)
    return _each(lambda x: -k2 * quad_convolve(CIRCLE_KERNEL, flux, kinks, x, tol, derivative=True), s)

"""Equation parameters, peakon amplitude algebra and exact traveling profiles.

The model is

    m_t + k1 (3 u u_x m + u^2 m_x) + k2 (2 m u_x + m_x u) = 0,   m = u - u_xx,

with k1 = 0, k2 = 1 giving Camassa-Holm and k1 = 1, k2 = 0 giving Novikov.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BranchUnavailable, DegenerateParams, NoRealAmplitude

CH_HALF = math.cosh(0.5)
SH_HALF = math.sinh(0.5)


class Domain(str, Enum):
    LINE = "line"
    CIRCLE = "circle"


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class ModelParams:
    k1: float
    k2: float
    c: float

    def __post_init__(self):
        for name in ("k1", "k2", "c"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    def as_dict(self):
        return {"k1": self.k1, "k2": self.k2, "c": self.c}


@dataclass(frozen=True)
class AmplitudeSolution:
    """Real roots of an amplitude polynomial, sorted ascending.

    ``plus``/``minus`` label the roots by the sign in front of the square
    root of the closed-form solution; both point at the same value for the
    linear (k1 = 0) case and for a double root.
    """

    roots: tuple[float, ...]
    discriminant: float
    exists: bool
    plus: float | None = None
    minus: float | None = None

    def branch(self, branch: Branch) -> float:
        if not self.exists:
            raise NoRealAmplitude(self.discriminant)
        r = self.plus if Branch(branch) is Branch.PLUS else self.minus
        if r is None:
            raise BranchUnavailable(f"{Branch(branch).value} root overflows")
        return r


def _check_nondegenerate(params: ModelParams):
    if params.k1 == 0.0 and params.k2 == 0.0:
        raise DegenerateParams("k1 = k2 = 0: the equation is linear and has no peakon amplitude")


def _check_finite_roots(*roots):
    if not all(math.isfinite(r) for r in roots):
        raise DegenerateParams("coefficients too small: amplitude overflows")


def _solve(a2: float, a1: float, a0: float, disc_scale: float, raise_missing: bool) -> AmplitudeSolution:
    # a2 x^2 + a1 x + a0 = 0 with a0 = -c; a2 == 0 is the linear case.
    disc = a1 * a1 - 4.0 * a2 * a0
    if a2 == 0.0:
        r = -a0 / a1
        _check_finite_roots(r)
        return AmplitudeSolution((r,), disc, True, r, r)
    # relative to the size of the terms in disc, so tiny coefficients are not
    # mistaken for a double root
    eps = 1e-12 * disc_scale
    if disc < -eps:
        if raise_missing:
            raise NoRealAmplitude(disc)
        return AmplitudeSolution((), disc, False)
    if disc <= 0.0:
        r = -a1 / (2.0 * a2)
        _check_finite_roots(r)
        return AmplitudeSolution((r,), disc, True, r, r)
    sq = math.sqrt(disc)
    sgn = 1.0 if a1 >= 0.0 else -1.0
    q = -0.5 * (a1 + sgn * sq)
    big = q / a2
    small = a0 / q
    _check_finite_roots(small)
    if not math.isfinite(big):
        # k1 so small that the far root is not representable; keep the finite one
        big = None
    # big carries "-sgn*sqrt" in the textbook formula
    if sgn > 0:
        plus, minus = small, big
    else:
        plus, minus = big, small
    roots = tuple(sorted(r for r in (plus, minus) if r is not None))
    return AmplitudeSolution(roots, disc, True, plus, minus)


def solve_line_amplitudes(params: ModelParams, *, raise_missing: bool = True) -> AmplitudeSolution:
    """Roots of k1 A^2 + k2 A - c = 0 (single peakon A e^{-|x-ct|})."""
    _check_nondegenerate(params)
    k1, k2, c = params.k1, params.k2, params.c
    return _solve(k1, k2, -c, k2 * k2 + abs(4.0 * k1 * c), raise_missing)


def solve_periodic_amplitudes(params: ModelParams, *, raise_missing: bool = True) -> AmplitudeSolution:
    """Roots of k1 (1 + sh^2(1/2)) a^2 + k2 ch(1/2) a - c = 0 (periodic peakon a ch(zeta))."""
    _check_nondegenerate(params)
    k1, k2, c = params.k1, params.k2, params.c
    a2 = k1 * (1.0 + SH_HALF**2)
    a1 = k2 * CH_HALF
    return _solve(a2, a1, -c, a1 * a1 + abs(4.0 * a2 * c), raise_missing)


def solve_amplitudes(params: ModelParams, domain: Domain, **kw) -> AmplitudeSolution:
    if Domain(domain) is Domain.LINE:
        return solve_line_amplitudes(params, **kw)
    return solve_periodic_amplitudes(params, **kw)


def zeta(s):
    """Periodic phase 1/2 - s + floor(s), valued in (-1/2, 1/2]."""
    s = np.asarray(s, dtype=float)
    frac = s - np.floor(s)
    # s slightly below an integer can round to frac == 1
    out = 0.5 - np.where(frac >= 1.0, 0.0, frac)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TravelingProfile:
    """Exact peakon-family profile traveling at ``speed``.

    Derivatives are the classical ones away from the crest lines; at a crest
    the line profile reports u_x = 0 and the circle profile the right limit.
    """

    domain: Domain
    amplitude: float
    speed: float
    kinks: tuple[float, ...] = field(default=(0.0,), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))

    def u(self, t, x):
        s = np.asarray(x, dtype=float) - self.speed * np.asarray(t, dtype=float)
        if self.domain is Domain.LINE:
            return self.amplitude * np.exp(-np.abs(s))
        return self.amplitude * np.cosh(zeta(s))

    def ux(self, t, x):
        s = np.asarray(x, dtype=float) - self.speed * np.asarray(t, dtype=float)
        if self.domain is Domain.LINE:
            return -self.amplitude * np.sign(s) * np.exp(-np.abs(s))
        return -self.amplitude * np.sinh(zeta(s))

    def ut(self, t, x):
        return -self.speed * self.ux(t, x)

    @property
    def crest(self) -> float:
        return self.amplitude * (1.0 if self.domain is Domain.LINE else CH_HALF)


def make_profile(domain: Domain, amplitude: float, speed: float) -> TravelingProfile:
    return TravelingProfile(Domain(domain), float(amplitude), float(speed))


def make_peakon(params: ModelParams, domain: Domain = Domain.LINE, branch: Branch = Branch.PLUS) -> TravelingProfile:
    sol = solve_amplitudes(params, Domain(domain))
    return make_profile(domain, sol.branch(branch), params.c)


def peakon_branches(params: ModelParams, domain: Domain = Domain.LINE) -> dict[Branch, TravelingProfile]:
    """Both peakons; raises BranchUnavailable when the roots are not distinct."""
    sol = solve_amplitudes(params, Domain(domain))
    if len(sol.roots) < 2:
        raise BranchUnavailable(
            "k1 = 0 (or a double root) leaves a single amplitude; there is no distinct second branch"
        )
    return {b: make_profile(domain, sol.branch(b), params.c) for b in Branch}


def branch_continuity_limit(k2: float, c: float, k1_sequence) -> list[float]:
    """Line amplitudes along k1 -> 0 on the branch that meets the CH root c/k2.

    That is the Plus branch for k2 > 0 and the Minus branch for k2 < 0 (the
    other root runs off to infinity like -k2/k1).
    """
    if k2 == 0.0:
        raise DegenerateParams("k2 must be nonzero for the CH limit")
    branch = Branch.PLUS if k2 > 0 else Branch.MINUS
    return [solve_line_amplitudes(ModelParams(k1, k2, c)).branch(branch) for k1 in k1_sequence]

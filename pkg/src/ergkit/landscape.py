"""Replica-symmetric scalar problem for the edge-triangle model.

Everything here is a function of the rescaled parameters ``(alpha, h)``:
the energy function ``g(u) = alpha/6 u^3 + h/2 u - I(u)/2`` on ``[0, 1]``,
its global maximizers, the phase they put ``(alpha, h)`` in, the critical
curve ``h = q(alpha)`` and the limit laws of the mean-field triangle density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize, special

ALPHA_C = 27.0 / 8.0
H_C = math.log(2.0) - 1.5
U_C = 2.0 / 3.0

GRID_POINTS = 20001
GRID_EPS = 1e-9
NEWTON_MAXITER = 50
TIE_VALUE_TOL = 1e-10
TIE_LOCATION_TOL = 1e-4
CRITICAL_TOL = 1e-9
CURVE_BISECTIONS = 80


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a formula."""


class BracketError(RuntimeError):
    """Raised when the bistable regime of the critical curve cannot be bracketed."""


@dataclass(frozen=True)
class ModelParams:
    """Triangle weight ``alpha`` (= 6 beta_2) and edge weight ``h`` (= 2 beta_1)."""

    alpha: float
    h: float

    def require_replica_symmetric(self):
        if not self.alpha > -2.0:
            raise DomainError(f"alpha={self.alpha} outside the replica-symmetric regime alpha > -2")

    @property
    def is_critical(self) -> bool:
        return abs(self.alpha - ALPHA_C) < CRITICAL_TOL and abs(self.h - H_C) < CRITICAL_TOL


CRITICAL_POINT = ModelParams(ALPHA_C, H_C)


def _as_params(p) -> ModelParams:
    if isinstance(p, ModelParams):
        return p
    alpha, h = p
    return ModelParams(float(alpha), float(h))


def _check_unit(u):
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u > 1.0)) or np.any(np.isnan(u)):
        raise DomainError("argument must lie in [0, 1]")
    return u


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def entropy(u):
    """``u ln u + (1-u) ln(1-u)`` with ``I(0) = I(1) = 0``. Accepts arrays."""
    u = _check_unit(u)
    out = special.xlogy(u, u) + special.xlogy(1.0 - u, 1.0 - u)
    return _scalar_or_array(out)


def energy_g(p, u):
    p = _as_params(p)
    u = _check_unit(u)
    out = p.alpha / 6.0 * u**3 + p.h / 2.0 * u - 0.5 * np.asarray(entropy(u))
    return _scalar_or_array(out)


def g_prime(p, u):
    p = _as_params(p)
    return 0.5 * (p.alpha * u * u + p.h - special.logit(u))


def g_second(p, u):
    p = _as_params(p)
    return p.alpha * u - 0.5 / (u * (1.0 - u))


def fixed_point_residual(p, u):
    """``logistic(alpha u^2 + h) - u``; zero exactly at stationary points of g."""
    p = _as_params(p)
    return special.expit(p.alpha * u * u + p.h) - u


@dataclass
class MaximizerSet:
    maximizers: list[float]
    free_energy: float
    residuals: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.maximizers)


def _newton_in_bracket(p: ModelParams, lo: float, hi: float) -> float:
    # The residual is >= 0 left of a maximizer and <= 0 right of it; Newton
    # steps that leave the bracket fall back to bisection.
    u = 0.5 * (lo + hi)
    for _ in range(NEWTON_MAXITER):
        s = special.expit(p.alpha * u * u + p.h)
        r = s - u
        if r == 0.0:
            return u
        if r > 0.0:
            lo = u
        else:
            hi = u
        dr = 2.0 * p.alpha * u * s * (1.0 - s) - 1.0
        step_ok = dr != 0.0
        if step_ok:
            cand = u - r / dr
            step_ok = lo < cand < hi
        new = cand if step_ok else 0.5 * (lo + hi)
        if abs(new - u) <= 4e-16 * max(1.0, abs(u)):
            return new
        u = new
    return u


def _local_maximizers(p: ModelParams) -> list[float]:
    grid = np.linspace(GRID_EPS, 1.0 - GRID_EPS, GRID_POINTS)
    vals = energy_g(p, grid)
    interior = np.flatnonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])) + 1
    found = []
    for i in interior:
        u = _newton_in_bracket(p, grid[i - 1], grid[i + 1])
        if g_second(p, u) <= 1e-9 and not any(abs(u - v) <= TIE_LOCATION_TOL for v in found):
            found.append(u)
    # Maximizers pushed against the grid edges (|h| very large).
    for lo, hi, idx in ((0.0, grid[1], 0), (grid[-2], 1.0, -1)):
        if vals[idx] >= vals[idx + (1 if idx == 0 else -1)]:
            u = _newton_in_bracket(p, max(lo, 1e-300), min(hi, 1.0 - 1e-16))
            if not any(abs(u - v) <= TIE_LOCATION_TOL for v in found):
                found.append(u)
    return sorted(found)


def find_maximizers(p) -> MaximizerSet:
    """Global maximizers of the energy function on ``[0, 1]``.

    A 20001-point grid isolates the basins; each local maximum is then
    polished with safeguarded Newton on the fixed-point residual. Two maxima
    are both kept only if their values agree to ``TIE_VALUE_TOL`` and they are
    more than ``TIE_LOCATION_TOL`` apart. At the critical point the degenerate
    (flat quartic) maximizer is returned as exactly 2/3.
    """
    p = _as_params(p)
    p.require_replica_symmetric()
    if p.is_critical:
        us = [U_C]
    else:
        cands = _local_maximizers(p)
        values = [energy_g(p, u) for u in cands]
        best = max(values)
        us = [u for u, v in zip(cands, values) if best - v < TIE_VALUE_TOL]
    f = max(energy_g(p, u) for u in us)
    return MaximizerSet(us, f, [float(fixed_point_residual(p, u)) for u in us])


def free_energy(p) -> float:
    return find_maximizers(p).free_energy


@dataclass(frozen=True)
class Uniqueness:
    u0: float


@dataclass(frozen=True)
class CriticalCurve:
    u1: float
    u2: float


@dataclass(frozen=True)
class CriticalPoint:
    u_c: float = U_C


PhaseClass = Uniqueness | CriticalCurve | CriticalPoint


def classify_phase(p) -> PhaseClass:
    p = _as_params(p)
    ms = find_maximizers(p)
    if p.is_critical:
        return CriticalPoint()
    if len(ms) == 2:
        return CriticalCurve(*ms.maximizers)
    return Uniqueness(ms.maximizers[0])


# --- critical curve -------------------------------------------------------

def _stationary_h(alpha, u):
    # h for which u is a stationary point of g
    return special.logit(u) - alpha * u * u


def spinodal_interval(alpha: float) -> tuple[float, float, float, float]:
    """Bistable window of ``h`` at fixed ``alpha > 27/8``.

    Returns ``(h_lo, h_hi, u_a, u_b)`` where ``u_a < 2/3 < u_b`` are the roots of
    ``2 alpha u^2 (1-u) = 1``. For ``h_lo < h < h_hi`` the energy function has
    a low maximizer in ``(0, u_a)`` and a high one in ``(u_b, 1)``.
    """
    if not alpha > ALPHA_C:
        raise BracketError(f"alpha={alpha} is not above the critical value {ALPHA_C}")

    def cubic(u):
        return 2.0 * alpha * u * u * (1.0 - u) - 1.0

    if not cubic(U_C) > 0.0:
        raise BracketError(f"alpha={alpha} too close to the critical value to bracket")
    u_a = optimize.brentq(cubic, 1e-12, U_C, xtol=1e-15, rtol=1e-15)
    u_b = optimize.brentq(cubic, U_C, 1.0 - 1e-15, xtol=1e-15, rtol=1e-15)
    h_hi = _stationary_h(alpha, u_a)
    h_lo = _stationary_h(alpha, u_b)
    if not h_lo < h_hi:
        raise BracketError(f"empty bistable window at alpha={alpha}")
    return h_lo, h_hi, u_a, u_b


def _branch_maximizers(alpha, h, u_a, u_b):
    def root(lo, hi):
        return optimize.brentq(lambda u: _stationary_h(alpha, u) - h, lo, hi,
                               xtol=1e-15, rtol=1e-15, maxiter=200)

    return root(1e-300, u_a), root(u_b, 1.0 - 1e-16)


def branch_gap(alpha: float, h: float) -> tuple[float, float, float]:
    """``(g(u_high) - g(u_low), u_low, u_high)`` inside the bistable window."""
    h_lo, h_hi, u_a, u_b = spinodal_interval(alpha)
    if not h_lo <= h <= h_hi:
        raise BracketError(f"h={h} outside the bistable window [{h_lo}, {h_hi}] at alpha={alpha}")
    u1, u2 = _branch_maximizers(alpha, h, u_a, u_b)
    p = ModelParams(alpha, h)
    return energy_g(p, u2) - energy_g(p, u1), u1, u2


@dataclass(frozen=True)
class CurvePoint:
    alpha: float
    h: float
    u1: float
    u2: float
    gap: float

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.h)

    @property
    def kappa(self) -> float:
        return mixture_weight(self.params, self.u1, self.u2)


def critical_curve_point(alpha: float) -> CurvePoint:
    """``q(alpha)`` by bisection of the branch value gap over the bistable window."""
    alpha = float(alpha)
    h_lo, h_hi, u_a, u_b = spinodal_interval(alpha)

    def gap(h):
        u1, u2 = _branch_maximizers(alpha, h, u_a, u_b)
        p = ModelParams(alpha, h)
        return energy_g(p, u2) - energy_g(p, u1), u1, u2

    # The gap increases with h (d gap / dh = (u_high - u_low) / 2 > 0).
    lo, hi = h_lo, h_hi
    if not (gap(lo)[0] <= 0.0 <= gap(hi)[0]):
        raise BracketError(f"value gap does not change sign over the bistable window at alpha={alpha}")
    for _ in range(CURVE_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if gap(mid)[0] < 0.0:
            lo = mid
        else:
            hi = mid
    h = lo if abs(gap(lo)[0]) <= abs(gap(hi)[0]) else hi
    d, u1, u2 = gap(h)
    return CurvePoint(alpha, float(h), float(u1), float(u2), float(d))


def trace_critical_curve(alpha_grid) -> list[CurvePoint]:
    """Trace ``h = q(alpha)`` over a grid of ``alpha > 27/8``.

    Raises :class:`BracketError` for any grid point where the bistable
    window cannot be established; no point is silently dropped.
    """
    alphas = np.asarray(alpha_grid, dtype=float)
    if np.any(alphas <= ALPHA_C):
        raise DomainError("all alpha values must exceed 27/8")
    return [critical_curve_point(a) for a in alphas]


def q(alpha: float) -> float:
    return critical_curve_point(alpha).h


# --- curvature and limit laws --------------------------------------------

def curvature_c(p, u_star: float) -> float:
    """``-g''(u*)/2 = (1 - 2 alpha u*^2 (1-u*)) / (4 u* (1-u*))``."""
    p = _as_params(p)
    if not 0.0 < u_star < 1.0:
        raise DomainError("u_star must lie strictly inside (0, 1)")
    return (1.0 - 2.0 * p.alpha * u_star**2 * (1.0 - u_star)) / (4.0 * u_star * (1.0 - u_star))


def laplace_weight(p, u_star: float) -> float:
    """``[1 - 2 alpha u*^2 (1-u*)]^{-1/2}``, the Laplace weight of a maximizer."""
    p = _as_params(p)
    return 1.0 / math.sqrt(1.0 - 2.0 * p.alpha * u_star**2 * (1.0 - u_star))


def mixture_weight(p, u1: float, u2: float) -> float:
    """Weight of the ``u1`` atom in the two-phase limit on the critical curve."""
    w1, w2 = laplace_weight(p, u1), laplace_weight(p, u2)
    return w1 / (w1 + w2)


@dataclass(frozen=True)
class Gaussian:
    variance: float

    @property
    def scale(self):
        return math.sqrt(self.variance)

    def pdf(self, y):
        return np.exp(-0.5 * np.square(y) / self.variance) / math.sqrt(2.0 * math.pi * self.variance)

    def cdf(self, y):
        return special.ndtr(np.asarray(y, dtype=float) / self.scale)

    def moment(self, k: int) -> float:
        if k % 2:
            return 0.0
        return self.variance ** (k // 2) * float(special.factorial2(k - 1, exact=True))

    def abs_mean(self) -> float:
        return math.sqrt(2.0 * self.variance / math.pi)

    def sample(self, rng, size):
        return rng.normal(0.0, self.scale, size)


@dataclass(frozen=True)
class GeneralizedGaussian:
    """Density proportional to ``exp(-(y / scale)^power)`` on the real line."""

    scale: float
    power: int = 4

    @cached_property
    def norm(self) -> float:
        val, _ = integrate.quad(lambda y: math.exp(-((abs(y) / self.scale) ** self.power)),
                                -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        return val

    @property
    def coefficient(self) -> float:
        """The ``a`` in ``exp(-a y^power)``."""
        return self.scale ** (-self.power)

    def _unnorm(self, y):
        return np.exp(-np.power(np.abs(y) / self.scale, self.power))

    def pdf(self, y):
        return self._unnorm(np.asarray(y, dtype=float)) / self.norm

    def _cdf_scalar(self, y: float) -> float:
        # integrate the shorter tail and reflect
        tail, _ = integrate.quad(lambda t: math.exp(-((t / self.scale) ** self.power)),
                                 abs(y), np.inf, epsabs=1e-14, epsrel=1e-12)
        tail /= self.norm
        return 1.0 - tail if y >= 0 else tail

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        if y.ndim == 0:
            return self._cdf_scalar(float(y))
        # cumulative quadrature over sorted points, one quad per gap
        order = np.argsort(y)
        ys = y[order]
        out = np.empty_like(ys)
        prev = None
        acc = 0.0
        for i, v in enumerate(ys):
            if prev is None:
                acc = self._cdf_scalar(v)
            elif v > prev:
                piece, _ = integrate.quad(lambda t: math.exp(-((abs(t) / self.scale) ** self.power)),
                                          prev, v, epsabs=1e-14, epsrel=1e-12)
                acc += piece / self.norm
            out[i] = acc
            prev = v
        res = np.empty_like(out)
        res[order] = np.clip(out, 0.0, 1.0)
        return res

    def moment(self, k: int) -> float:
        if k % 2:
            return 0.0
        val, _ = integrate.quad(lambda y: y**k * math.exp(-((abs(y) / self.scale) ** self.power)),
                                -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        return val / self.norm

    def abs_mean(self) -> float:
        val, _ = integrate.quad(lambda y: y * math.exp(-((y / self.scale) ** self.power)),
                                0.0, np.inf, epsabs=1e-13, epsrel=1e-12)
        return 2.0 * val / self.norm

    @property
    def variance(self) -> float:
        return self.moment(2)

    def kurtosis(self) -> float:
        return self.moment(4) / self.moment(2) ** 2

    def sample(self, rng, size):
        # |Y/scale|^power ~ Gamma(1/power)
        g = rng.gamma(1.0 / self.power, 1.0, size)
        sign = rng.choice((-1.0, 1.0), size)
        return sign * self.scale * g ** (1.0 / self.power)


@dataclass(frozen=True)
class Mixture:
    kappa: float
    atom1: float
    atom2: float

    def swapped(self) -> Mixture:
        return Mixture(1.0 - self.kappa, self.atom2, self.atom1)

    def mean(self) -> float:
        return self.kappa * self.atom1 + (1.0 - self.kappa) * self.atom2


LimitLaw = Gaussian | GeneralizedGaussian | Mixture

# Scale of the critical triangle fluctuation law: 1/s^4 = 3^8 / 2^14.
CRITICAL_TRIANGLE_SCALE = 2.0**3.5 / 9.0


def limit_law_triangle(p) -> LimitLaw:
    p = _as_params(p)
    phase = classify_phase(p)
    if isinstance(phase, CriticalPoint):
        return GeneralizedGaussian(CRITICAL_TRIANGLE_SCALE)
    if isinstance(phase, CriticalCurve):
        kappa = mixture_weight(p, phase.u1, phase.u2)
        return Mixture(kappa, phase.u1**3, phase.u2**3)
    u = phase.u0
    return Gaussian(float(3.0 * u**4 / (4.0 * curvature_c(p, u))))


def limit_law_clique(p, ell: int) -> LimitLaw:
    """Limit law of the approximated ``ell``-clique count (``3 <= ell <= 5``).

    At criticality the returned law has scale ``gamma`` (density
    ``exp(-(y / gamma)^4)``), which reproduces the triangle law for ``ell = 3``.
    """
    if not 3 <= int(ell) <= 5 or int(ell) != ell:
        raise DomainError("ell must be an integer in 3..5")
    ell = int(ell)
    p = _as_params(p)
    e = math.comb(ell, 2)
    phase = classify_phase(p)
    if isinstance(phase, CriticalPoint):
        gamma = 2.0 ** (e + 0.5) / 3.0**e * e
        return GeneralizedGaussian(gamma)
    if isinstance(phase, CriticalCurve):
        kappa = mixture_weight(p, phase.u1, phase.u2)
        return Mixture(kappa, phase.u1**e, phase.u2**e)
    u = phase.u0
    c0 = curvature_c(p, u)
    return Gaussian(float((e * u ** (e - 1)) ** 2 / (2.0 * math.factorial(ell) * c0)))


# --- rate function --------------------------------------------------------

def rate_function(p, x):
    """Scalar large-deviation rate ``f - g(x)`` of the edge density."""
    p = _as_params(p)
    p.require_replica_symmetric()
    x = _check_unit(x)
    f = free_energy(p)
    out = f - np.asarray(energy_g(p, x))
    return _scalar_or_array(np.maximum(out, 0.0) if np.ndim(out) else max(float(out), 0.0))


def rate_taylor_coefficients(p, u_star: float) -> tuple[float, float, float, float]:
    """Coefficients ``(a1, a2, a3, a4)`` of the rate expansion around ``u_star``.

    ``I(u* + d) = a1 d + a2 d^2 + a3 d^3 + a4 d^4 + o(d^4)``.
    """
    p = _as_params(p)
    if not 0.0 < u_star < 1.0:
        raise DomainError("u_star must lie strictly inside (0, 1)")
    u = u_star
    w = u * (1.0 - u)
    a1 = 0.5 * (math.log(u / (1.0 - u)) - p.alpha * u * u - p.h)
    a2 = 0.5 * (1.0 / (2.0 * w) - p.alpha * u)
    a3 = 0.5 * ((2.0 * u - 1.0) / (6.0 * w * w) - p.alpha / 3.0)
    a4 = (3.0 * u * u - 3.0 * u + 1.0) / (24.0 * w**3)
    return a1, a2, a3, a4

"""Exact finite-n law of the edge density under the mean-field Hamiltonian.

The mean-field Gibbs measure only sees the edge count ``k``, so its law is a
pmf on the lattice ``m = 2k / n^2``, ``k = 0..N`` with ``N = n(n-1)/2``, and
weights ``C(N, k) exp(n^2 (alpha/6 m^3 + h/2 m))``. All weights live in log
space.

``lattice="balanced"`` is the variant with ``m = k / N`` and energy
``2N (alpha/6 m^3 + h/2 m)``. Its log-binomial matches ``-N I(m)`` up to
``O(log n)``; on the default lattice ``log C(N, k) + n^2 I(m) / 2`` grows
linearly in ``n``, which tilts the law by ``O(n (m - u*))``. The tilt is
invisible at Gaussian scale but shifts critical and two-phase behaviour.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from .landscape import (
    U_C,
    DomainError,
    GeneralizedGaussian,
    MaximizerSet,
    ModelParams,
    _as_params,
    classify_phase,
    CriticalCurve,
    CriticalPoint,
    curvature_c,
    find_maximizers,
    limit_law_triangle,
)

DEFAULT_DELTA = 0.3


class EmptyWindow(ValueError):
    """No lattice point of the edge-density pmf falls inside the window."""


@dataclass
class EdgeDensityPmf:
    n: int
    k: np.ndarray
    log_weights: np.ndarray
    log_partition: float
    lattice: str = "literal"

    @property
    def support(self) -> np.ndarray:
        if self.lattice == "balanced":
            return self.k / num_edge_slots(self.n)
        return 2.0 * self.k / self.n**2

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_partition)

    def expect(self, values) -> float:
        return float(np.dot(self.probs, values))

    def to_csv(self, path):
        """Write ``k,m,log_weight,prob`` rows with 17 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "m", "log_weight", "prob"])
            for k, m, lw, pr in zip(self.k, self.support, self.log_weights, self.probs):
                w.writerow([int(k), f"{m:.17g}", f"{lw:.17g}", f"{pr:.17g}"])


@dataclass(frozen=True)
class WindowSpec:
    """Window ``|m - u_i*| <= n^-delta`` around maximizer ``center_index`` (1-based)."""

    center_index: int = 1
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.center_index not in (1, 2):
            raise ValueError("center_index must be 1 or 2")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


def num_edge_slots(n: int) -> int:
    return n * (n - 1) // 2


def log_binomials(n: int) -> np.ndarray:
    big = num_edge_slots(n)
    k = np.arange(big + 1, dtype=float)
    return special.gammaln(big + 1.0) - special.gammaln(k + 1.0) - special.gammaln(big - k + 1.0)


LATTICES = ("literal", "balanced")


def build_pmf(n: int, p, lattice: str = "literal") -> EdgeDensityPmf:
    if n < 3:
        raise ValueError("need n >= 3")
    if lattice not in LATTICES:
        raise ValueError(f"lattice must be one of {LATTICES}")
    p = _as_params(p)
    big = num_edge_slots(n)
    k = np.arange(big + 1)
    if lattice == "literal":
        m, volume = 2.0 * k / n**2, float(n * n)
    else:
        m, volume = k / big, 2.0 * big
    lw = log_binomials(n) + volume * (p.alpha / 6.0 * m**3 + p.h / 2.0 * m)
    return EdgeDensityPmf(n, k, lw, float(special.logsumexp(lw)), lattice)


def finite_free_energy(n: int, p, lattice: str = "literal") -> float:
    """``ln Z_n / n^2`` for the mean-field model."""
    return build_pmf(n, p, lattice).log_partition / n**2


def moment(pmf: EdgeDensityPmf, k: int) -> float:
    """``E[m^k]``; ``k = 3`` is the mean triangle density ``6 E[T/n] / n^2``."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return pmf.expect(pmf.support**k)


def triangle_mean(pmf: EdgeDensityPmf) -> float:
    return moment(pmf, 3)


def triangle_variance(pmf: EdgeDensityPmf, p=None) -> float:
    """``Var(T) / n^3`` with ``T = n^3 m^3 / 6`` the approximated triangle count.

    Equals ``n`` times the second alpha-derivative of the finite free energy.
    """
    m3 = pmf.support**3
    mean = pmf.expect(m3)
    var = pmf.expect((m3 - mean) ** 2)
    return pmf.n**3 * var / 36.0


def alpha_derivatives(n: int, p, step: float = 1e-4) -> tuple[float, float]:
    """Central differences ``(d/dalpha, d^2/dalpha^2)`` of the finite free energy."""
    p = _as_params(p)
    f0 = finite_free_energy(n, p)
    fp = finite_free_energy(n, ModelParams(p.alpha + step, p.h))
    fm = finite_free_energy(n, ModelParams(p.alpha - step, p.h))
    return (fp - fm) / (2.0 * step), (fp - 2.0 * f0 + fm) / step**2


def window_mask(pmf: EdgeDensityPmf, center: float, delta: float) -> np.ndarray:
    return np.abs(pmf.support - center) <= pmf.n ** (-delta)


def conditional_pmf(pmf: EdgeDensityPmf, window: WindowSpec, maximizers: MaximizerSet) -> EdgeDensityPmf:
    if window.center_index > len(maximizers.maximizers):
        raise ValueError("window refers to a maximizer that does not exist")
    center = maximizers.maximizers[window.center_index - 1]
    mask = window_mask(pmf, center, window.delta)
    if not mask.any():
        raise EmptyWindow(f"no lattice point within n^-{window.delta} of {center} at n={pmf.n}")
    lw = pmf.log_weights[mask]
    return EdgeDensityPmf(pmf.n, pmf.k[mask], lw, float(special.logsumexp(lw)), pmf.lattice)


def g_third(p, u):
    p = _as_params(p)
    return p.alpha + (1.0 - 2.0 * u) / (2.0 * u * u * (1.0 - u) ** 2)


def g_fifth(u):
    # alpha enters g only through the cubic term, so it drops out here
    return 3.0 / u**4 - 3.0 / (1.0 - u) ** 4


def riemann_D(n: int, p, maximizers: MaximizerSet | None = None, delta: float = DEFAULT_DELTA) -> list[float]:
    """Laplace sums ``D_i^(n)`` (one per maximizer) or ``D_c^(n)`` at criticality.

    The lattice is ``x = n (m - u*)`` (resp. ``sqrt(n) (m - u*)``) for ``m`` in
    the edge-density lattice, restricted to ``|x| < n^{1-delta}`` (resp.
    ``n^{1/2-delta}``). Cubic/quintic Taylor constants are taken at ``u*``.
    """
    p = _as_params(p)
    if maximizers is None:
        maximizers = find_maximizers(p)
    m = 2.0 * np.arange(num_edge_slots(n) + 1) / n**2
    if p.is_critical:
        if not 0.0 < delta < 3.0 / 8.0:
            raise DomainError("delta must lie in (0, 3/8) at the critical point")
        u = U_C
        kc = g_fifth(u) / 120.0
        rn = math.sqrt(n)
        x = rn * (m - u)
        x = x[np.abs(x) < n ** (0.5 - delta)]
        y = u + x / rn
        terms = np.exp(-81.0 / 64.0 * x**4 + kc / rn * x**5) / np.sqrt(y * (1.0 - y))
        return [float(2.0 / n**1.5 * terms.sum())]
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    out = []
    for u in maximizers.maximizers:
        c = curvature_c(p, u)
        k3 = g_third(p, u) / 6.0
        x = n * (m - u)
        x = x[np.abs(x) < n ** (1.0 - delta)]
        y = u + x / n
        terms = np.exp(-c * x**2 + k3 / n * x**3) / np.sqrt(y * (1.0 - y))
        out.append(float(2.0 / n * terms.sum()))
    return out


def riemann_D_limit(p, maximizers: MaximizerSet | None = None) -> list[float]:
    """``n -> infinity`` values of :func:`riemann_D`, the critical one by quadrature."""
    p = _as_params(p)
    if p.is_critical:
        law = GeneralizedGaussian((64.0 / 81.0) ** 0.25)
        return [3.0 / math.sqrt(2.0) * law.norm]
    if maximizers is None:
        maximizers = find_maximizers(p)
    return [2.0 * math.sqrt(math.pi / (1.0 - 2.0 * p.alpha * u * u * (1.0 - u))) for u in maximizers.maximizers]


@dataclass(frozen=True)
class MixtureMass:
    mass1: float
    mass2: float
    remainder: float

    @property
    def kappa_estimate(self) -> float:
        return self.mass1 / (self.mass1 + self.mass2)


def mixture_mass(pmf: EdgeDensityPmf, maximizers: MaximizerSet, delta: float = DEFAULT_DELTA) -> MixtureMass:
    if len(maximizers.maximizers) != 2:
        raise ValueError("mixture masses need two maximizers")
    probs = pmf.probs
    masks = [window_mask(pmf, u, delta) for u in maximizers.maximizers]
    if not masks[0].any() or not masks[1].any():
        raise EmptyWindow("a maximizer window contains no lattice point")
    if np.any(masks[0] & masks[1]):
        raise ValueError("maximizer windows overlap; increase n or delta")
    m1, m2 = float(probs[masks[0]].sum()), float(probs[masks[1]].sum())
    rem = float(probs[~(masks[0] | masks[1])].sum())
    return MixtureMass(m1, m2, rem)


@dataclass(frozen=True)
class SpeedRow:
    n: int
    mean_error: float      # n |m_n - u*^3|  (sqrt(n) at criticality)
    abs_error: float       # n E|m^3 - u*^3| (sqrt(n) at criticality)
    abs_error_limit: float


def convergence_speed_table(p, n_list, lattice: str = "literal") -> list[SpeedRow]:
    """Scaled errors of the mean triangle density against ``u*^3``."""
    p = _as_params(p)
    phase = classify_phase(p)
    if isinstance(phase, CriticalCurve):
        raise DomainError("convergence speeds are not defined on the critical curve")
    if isinstance(phase, CriticalPoint):
        u = U_C
        limit = limit_law_triangle(p).abs_mean()
        def scale(n): return math.sqrt(n)
    else:
        u = phase.u0
        # n E|m^3 - u^3| -> E|X| with Var X = 6 * (3 u^4 / (4 c0))
        var = 6.0 * limit_law_triangle(p).variance
        limit = math.sqrt(2.0 * var / math.pi)
        def scale(n): return float(n)
    rows = []
    for n in n_list:
        pmf = build_pmf(int(n), p, lattice)
        m3 = pmf.support**3
        s = scale(int(n))
        rows.append(SpeedRow(int(n), float(s * abs(pmf.expect(m3) - u**3)), float(s * pmf.expect(np.abs(m3 - u**3))), float(limit)))
    return rows


def standardized_moments(pmf: EdgeDensityPmf, mode: str = "clt", center: float | None = None) -> dict:
    """Moments of the standardized triangle statistic under the exact pmf.

    ``clt``: ``(n / sqrt 6)(m^3 - center)``; ``nonstd``: ``sqrt(n)(m^3 - center)``.
    ``center`` defaults to the exact mean ``E[m^3]``.
    """
    m3 = pmf.support**3
    if center is None:
        center = pmf.expect(m3)
    factor = {"clt": pmf.n / math.sqrt(6.0), "nonstd": math.sqrt(pmf.n)}[mode]
    y = factor * (m3 - center)
    mean = pmf.expect(y)
    var = pmf.expect((y - mean) ** 2)
    m4 = pmf.expect((y - mean) ** 4)
    return {"values": y, "probs": pmf.probs, "mean": mean, "variance": var,
            "kurtosis": m4 / var**2, "center": center}


def rational_edge_moments(n: int, orders, odds=Fraction(1)) -> dict[int, Fraction]:
    """Exact ``E[m^j]`` for ``alpha = 0`` and edge odds ``e^h = odds`` (rational).

    Uses integer binomials only; serves as the exact reference for small ``n``.
    """
    odds = Fraction(odds)
    big = num_edge_slots(n)
    weights = [math.comb(big, k) * odds**k for k in range(big + 1)]
    z = sum(weights)
    return {j: sum(w * Fraction(2 * k, n * n) ** j for k, w in enumerate(weights)) / z for j in orders}


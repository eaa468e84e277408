"""Exact small-n Gibbs oracle and comparisons of sampled laws with limit laws."""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from .glauber import SampleBatch, update_coefficient
from .graph import Clique, SubgraphKind
from .landscape import Gaussian, GeneralizedGaussian, MaximizerSet, Mixture, ModelParams, _as_params

MAX_BRUTE_N = 6
SCALINGS = ("CLT", "NonStdCLT", "Raw")


# --- brute-force enumeration ---------------------------------------------

def _edge_index(n: int) -> dict:
    return {pair: i for i, pair in enumerate(itertools.combinations(range(n), 2))}


def _all_graph_bits(n: int) -> np.ndarray:
    """Row ``g`` holds the edge indicators of graph number ``g``."""
    slots = n * (n - 1) // 2
    codes = np.arange(1 << slots, dtype=np.int64)
    return ((codes[:, None] >> np.arange(slots)) & 1).astype(np.int64)


def _clique_counts(bits: np.ndarray, n: int, ell: int) -> np.ndarray:
    idx = _edge_index(n)
    out = np.zeros(bits.shape[0], dtype=np.int64)
    for verts in itertools.combinations(range(n), ell):
        cols = [idx[pair] for pair in itertools.combinations(verts, 2)]
        out += np.all(bits[:, cols] == 1, axis=1)
    return out


def _degree_matrix(n: int) -> np.ndarray:
    inc = np.zeros((n * (n - 1) // 2, n), dtype=np.int64)
    for (a, b), i in _edge_index(n).items():
        inc[i, a] = inc[i, b] = 1
    return inc


@dataclass
class BruteForceGibbs:
    """Exact Gibbs law on all ``2^(n(n-1)/2)`` graphs of a tiny vertex set."""

    n: int
    params: ModelParams
    edge_count: np.ndarray
    triangle_count: np.ndarray
    statistic: np.ndarray
    log_weights: np.ndarray
    log_partition: float
    normalization: str = "hamiltonian"

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_partition)

    def expect(self, values=None) -> float:
        values = self.statistic if values is None else values
        return float(np.dot(self.probs, values))

    def moments(self, orders=(1, 2, 3, 4)) -> dict[int, float]:
        return {k: self.expect(self.statistic.astype(float) ** k) for k in orders}

    def distribution(self, values=None) -> tuple[np.ndarray, np.ndarray]:
        """Distinct values of the statistic and their probabilities."""
        values = self.statistic if values is None else values
        uniq, inv = np.unique(values, return_inverse=True)
        return uniq, np.bincount(inv, weights=self.probs)

    def joint_et(self) -> dict[tuple[int, int], float]:
        keys = self.edge_count * (self.triangle_count.max() + 1) + self.triangle_count
        uniq, inv = np.unique(keys, return_inverse=True)
        mass = np.bincount(inv, weights=self.probs)
        base = self.triangle_count.max() + 1
        return {(int(k // base), int(k % base)): float(w) for k, w in zip(uniq, mass)}


def brute_force(n: int, p, statistic="triangle", normalization: str = "hamiltonian") -> BruteForceGibbs:
    """Enumerate every graph on ``n <= 6`` vertices under ``H = c T + h E``.

    ``c = alpha / n`` for the default normalization, ``alpha`` for
    ``"literal"``. ``statistic`` is ``"edge"``, ``"triangle"`` or a
    :class:`SubgraphKind` / :class:`Clique` (homomorphism count).
    """
    if not 3 <= n <= MAX_BRUTE_N:
        raise ValueError(f"brute force needs 3 <= n <= {MAX_BRUTE_N}")
    p = _as_params(p)
    bits = _all_graph_bits(n)
    e = bits.sum(axis=1)
    t = _clique_counts(bits, n, 3)
    coef = update_coefficient(p.alpha, n, normalization)
    logw = coef * t + p.h * e
    if statistic in ("edge", SubgraphKind.EDGE):
        stat = e
    elif statistic in ("triangle", SubgraphKind.TRIANGLE):
        stat = t
    elif statistic is SubgraphKind.WEDGE:
        deg = bits @ _degree_matrix(n)
        stat = (deg * deg).sum(axis=1)
    elif isinstance(statistic, Clique):
        stat = math.factorial(statistic.ell) * _clique_counts(bits, n, statistic.ell)
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    return BruteForceGibbs(n, p, e, t, stat, logw, float(logsumexp(logw)), normalization)


def exact_edge_moments(n: int, orders, odds=Fraction(1)) -> dict[int, Fraction]:
    """``E[(2E/n^2)^j]`` at ``alpha = 0`` summed graph by graph in rationals."""
    if not 3 <= n <= MAX_BRUTE_N:
        raise ValueError(f"brute force needs 3 <= n <= {MAX_BRUTE_N}")
    odds = Fraction(odds)
    slots = n * (n - 1) // 2
    graphs_per_count = np.bincount(_all_graph_bits(n).sum(axis=1), minlength=slots + 1)
    z = (1 + odds) ** slots
    out = {}
    for j in orders:
        total = sum(int(c) * odds**k * Fraction(2 * k, n * n) ** j for k, c in enumerate(graphs_per_count))
        out[j] = total / z
    return out


def tv_distance(batch: SampleBatch, gibbs: BruteForceGibbs) -> float:
    """Total variation between the sampled ``(E, T)`` law and the exact one."""
    exact = gibbs.joint_et()
    pairs, counts = np.unique(np.column_stack([batch.edge_count, batch.triangle_count]),
                              axis=0, return_counts=True)
    emp = {(int(a), int(b)): c / len(batch) for (a, b), c in zip(pairs, counts)}
    keys = set(exact) | set(emp)
    return 0.5 * sum(abs(exact.get(k, 0.0) - emp.get(k, 0.0)) for k in keys)


# --- standardization and comparison --------------------------------------

@dataclass
class StandardizedSeries:
    values: np.ndarray
    scaling: str
    center: float
    n: int
    weights: np.ndarray | None = None  # probabilities when built from an exact pmf

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("standardized values must be finite")

    @property
    def formula(self) -> str:
        return {"CLT": "(T/n - n^2 m/6) * sqrt(6) / n",
                "NonStdCLT": "(T/n - n^2 m/6) * 6 / n^(3/2)",
                "Raw": "6 T / n^3"}[self.scaling]

    def _w(self):
        if self.weights is None:
            return np.full(len(self.values), 1.0 / len(self.values))
        return np.asarray(self.weights, dtype=float) / np.sum(self.weights)

    def moment(self, k: int) -> float:
        return float(np.dot(self._w(), self.values**k))

    def variance(self) -> float:
        w = self._w()
        mu = np.dot(w, self.values)
        return float(np.dot(w, (self.values - mu) ** 2))

    def kurtosis(self) -> float:
        w = self._w()
        mu = np.dot(w, self.values)
        var = np.dot(w, (self.values - mu) ** 2)
        return float(np.dot(w, (self.values - mu) ** 4) / var**2)


def _scale_triangles(t, n: int, mode: str, t_center: float) -> np.ndarray:
    # t_center is the centering in triangle-count units, n^3 m / 6
    t = np.asarray(t, dtype=float)
    if mode == "Raw":
        return 6.0 * t / n**3
    shifted = (t - t_center) / n
    if mode == "CLT":
        return shifted * math.sqrt(6.0) / n
    if mode == "NonStdCLT":
        return shifted * 6.0 / n**1.5
    raise ValueError(f"mode must be one of {SCALINGS}")


def standardize(batch, mode: str = "CLT", center: float | None = None) -> StandardizedSeries:
    """Affine map of the triangle counts of ``batch`` to the chosen scaling.

    ``center`` is a triangle density (``6T/n^3`` scale); by default the
    empirical mean of the batch, so only the shape of the law is tested.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    n = batch.config.n
    t = np.asarray(batch.triangle_count, dtype=float)
    t_center = float(np.mean(t)) if center is None else n**3 * center / 6.0
    if center is None:
        center = 6.0 * t_center / n**3
    return StandardizedSeries(_scale_triangles(t, n, mode, t_center), mode, float(center), n)


def standardize_pmf(pmf, mode: str = "CLT", center: float | None = None) -> StandardizedSeries:
    """Same maps applied to the mean-field triangle count ``T = n^3 m^3 / 6``."""
    m3 = pmf.support**3
    if center is None:
        center = pmf.expect(m3)
    n = pmf.n
    t = n**3 * m3 / 6.0
    return StandardizedSeries(_scale_triangles(t, n, mode, n**3 * center / 6.0), mode, float(center), n, pmf.probs)


def _check_law(law):
    if isinstance(law, Mixture):
        raise TypeError("mixture laws have no single CDF here; use concentration_check")
    if not isinstance(law, (Gaussian, GeneralizedGaussian)):
        raise TypeError(f"unsupported law {law!r}")


def ks_distance(series: StandardizedSeries, law) -> float:
    """Sup distance between the (weighted) empirical CDF and the law's CDF."""
    _check_law(law)
    if len(series.values) == 0:
        raise ValueError("empty series")
    uniq, inv = np.unique(series.values, return_inverse=True)
    mass = np.bincount(inv, weights=series._w())
    right = np.minimum(np.cumsum(mass), 1.0)
    left = right - mass
    f = np.asarray(law.cdf(uniq), dtype=float)
    return float(max(np.max(np.abs(right - f)), np.max(np.abs(left - f))))


@dataclass
class MomentRow:
    order: int
    empirical: float
    theoretical: float
    gap: float


def moment_report(series: StandardizedSeries, law, orders=(1, 2, 4)) -> list[MomentRow]:
    """Empirical against law moments; ``gap`` is relative (absolute when the law moment is 0)."""
    _check_law(law)
    rows = []
    for k in orders:
        emp, theo = series.moment(k), float(law.moment(k))
        gap = abs(emp - theo) / abs(theo) if theo else abs(emp - theo)
        rows.append(MomentRow(k, emp, theo, gap))
    return rows


@dataclass
class Concentration:
    fraction: float
    intervals: list
    atom_counts: list
    total: int

    @property
    def atom_fractions(self) -> list[float]:
        return [c / self.total for c in self.atom_counts]


def concentration_check(batch, maximizers, epsilon: float) -> Concentration:
    """Fraction of samples with ``6T/n^3`` within ``epsilon`` of some ``u*^3``."""
    us = maximizers.maximizers if isinstance(maximizers, MaximizerSet) else tuple(maximizers)
    centers = sorted(u**3 for u in us)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    for a, b in zip(centers, centers[1:]):
        if b - a <= 2 * epsilon:
            raise ValueError("the intervals of J(epsilon) overlap; decrease epsilon")
    if isinstance(batch, SampleBatch):
        dens = batch.triangle_density()
    else:
        dens = np.asarray(batch, dtype=float)
    counts = [int(np.sum(np.abs(dens - c) <= epsilon)) for c in centers]
    intervals = [(c - epsilon, c + epsilon) for c in centers]
    return Concentration(sum(counts) / len(dens), intervals, counts, len(dens))


# --- exports ---------------------------------------------------------------

def _g17(x) -> str:
    return format(float(x), ".17g")


@dataclass
class HistogramRow:
    bin_left: float
    bin_right: float
    count: int
    theory_density: float


def histogram_table(series: StandardizedSeries, law=None, bins: int = 40) -> list[HistogramRow]:
    """Histogram of the series; ``theory_density`` is the law's mean density per bin."""
    counts, edges = np.histogram(series.values, bins=bins)
    if law is not None:
        _check_law(law)
        cdf = np.asarray(law.cdf(edges), dtype=float)
        dens = np.diff(cdf) / np.diff(edges)
    else:
        dens = np.full(bins, np.nan)
    return [HistogramRow(float(edges[i]), float(edges[i + 1]), int(counts[i]), float(dens[i])) for i in range(bins)]


def write_histogram_csv(path, rows: list[HistogramRow]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "count", "theory_density"])
        for r in rows:
            w.writerow([_g17(r.bin_left), _g17(r.bin_right), r.count, _g17(r.theory_density)])


def law_description(law) -> dict:
    name = type(law).__name__
    return {"law": name, **{k: v for k, v in asdict(law).items()}}


@dataclass
class CheckReport:
    law: dict
    scaling: str
    center: float
    n: int
    num_samples: int
    ks: float
    moments: list = field(default_factory=list)
    kurtosis: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, default=float)


def check_series(series: StandardizedSeries, law) -> CheckReport:
    return CheckReport(law_description(law), series.scaling, series.center, series.n, len(series.values),
                       ks_distance(series, law), [asdict(r) for r in moment_report(series, law)],
                       series.kurtosis())


__all__ = [
    "BruteForceGibbs", "CheckReport", "Concentration", "HistogramRow", "MomentRow", "StandardizedSeries",
    "brute_force", "check_series", "concentration_check", "exact_edge_moments", "histogram_table",
    "ks_distance", "moment_report", "standardize", "standardize_pmf", "tv_distance", "write_histogram_csv",
]

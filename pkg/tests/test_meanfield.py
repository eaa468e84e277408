import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

import oracles
from ergkit.landscape import CRITICAL_POINT, DomainError, MaximizerSet, critical_curve_point
from ergkit.meanfield import (
    WindowSpec,
    alpha_derivatives,
    build_pmf,
    conditional_pmf,
    convergence_speed_table,
    finite_free_energy,
    mixture_mass,
    rational_edge_moments,
    riemann_D,
    riemann_D_limit,
    standardized_moments,
    triangle_variance,
)


def test_pmf_matches_mpmath_n4():
    pmf = build_pmf(4, (1.0, 0.0))
    ref = [float(x) for x in oracles.meanfield_pmf_mp(4, 1, 0)]
    assert pmf.probs == pytest.approx(ref, rel=1e-13)
    assert pmf.support[-1] == pytest.approx(12 / 16)


def test_pmf_matches_mpmath_n12():
    pmf = build_pmf(12, (2.5, -1.2))
    ref = [float(x) for x in oracles.meanfield_pmf_mp(12, 2.5, -1.2)]
    assert pmf.probs == pytest.approx(ref, rel=1e-11, abs=1e-300)


@pytest.mark.parametrize("h", [-1.0, 0.0, 0.7])
def test_alpha_zero_partition(h):
    n = 30
    big = n * (n - 1) // 2
    assert build_pmf(n, (0.0, h)).log_partition == pytest.approx(big * math.log1p(math.exp(h)), rel=1e-13)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_rational_moments_match_enumeration(n):
    odds = Fraction(3, 2)
    exact = rational_edge_moments(n, (1, 2, 3), odds)
    assert exact == oracles.gibbs_moments_alpha0(n, (1, 2, 3), odds)
    pmf = build_pmf(n, (0.0, math.log(1.5)))
    for j, v in exact.items():
        assert pmf.expect(pmf.support**j) == pytest.approx(float(v), rel=1e-13)


def test_variance_is_n_times_second_derivative():
    p = (-1.0, 1.0)
    n = 60
    _, d2 = alpha_derivatives(n, p, step=1e-3)
    assert triangle_variance(build_pmf(n, p)) == pytest.approx(n * d2, rel=1e-4)


def test_free_energy_converges():
    from ergkit.landscape import free_energy
    p = (1.0, -0.5)
    gaps = [abs(finite_free_energy(n, p, "balanced") - free_energy(p)) for n in (50, 100, 200)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_D_sums():
    assert riemann_D(4000, (0.0, 0.0))[0] == pytest.approx(2 * math.sqrt(math.pi), abs=0.01)
    assert riemann_D_limit(CRITICAL_POINT)[0] == pytest.approx(float(oracles.critical_D_limit()), rel=1e-10)
    assert riemann_D(4000, CRITICAL_POINT)[0] == pytest.approx(3.63, abs=0.01)
    with pytest.raises(DomainError):
        riemann_D(100, CRITICAL_POINT, delta=0.4)


def test_conditional_window():
    cp = critical_curve_point(5.0)
    ms = MaximizerSet([cp.u1, cp.u2], 0.0)
    pmf = build_pmf(300, cp.params)
    low = conditional_pmf(pmf, WindowSpec(1, 0.3), ms)
    assert np.all(np.abs(low.support - cp.u1) <= 300 ** -0.3)
    assert low.probs.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        conditional_pmf(pmf, WindowSpec(2, 0.3), MaximizerSet([cp.u1], 0.0))
    with pytest.raises(ValueError):
        WindowSpec(3, 0.3)


def test_balanced_lattice_mixture_masses():
    cp = critical_curve_point(5.0)
    ms = MaximizerSet([cp.u1, cp.u2], 0.0)
    mm = mixture_mass(build_pmf(2000, cp.params, "balanced"), ms)
    assert mm.mass1 == pytest.approx(cp.kappa, abs=0.01)
    assert mm.remainder < 1e-6


def test_balanced_lattice_speeds():
    rows = convergence_speed_table((-1.0, 1.0), [200, 400, 800, 1600], "balanced")
    errs = [r.mean_error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < errs[0] / 4


def test_balanced_lattice_critical_kurtosis():
    from ergkit.landscape import limit_law_triangle
    st = standardized_moments(build_pmf(2000, CRITICAL_POINT, "balanced"), "nonstd")
    assert st["kurtosis"] == pytest.approx(limit_law_triangle(CRITICAL_POINT).kurtosis(), rel=0.02)


def test_literal_lattice_tilt_grows_linearly():
    # log C(N,k) + n^2 I(m)/2 at fixed m drifts by O(n) on the 2k/n^2 lattice
    def defect(n, m):
        big = n * (n - 1) // 2
        k = round(m * n * n / 2)
        x = 2 * k / n**2
        ent = x * math.log(x) + (1 - x) * math.log(1 - x)
        return float(mp.log(mp.binomial(big, k))) + n * n * ent / 2

    slope = (defect(2000, 0.3) - defect(1000, 0.3)) / 1000
    assert slope == pytest.approx(-0.18, abs=0.02)


def test_clt_variance_alpha0():
    # the 2k/n^2 lattice has mean edge density (1 - 1/n)/2, a 1/n bias that
    # puts n = 200 at a 2.5% gap; the balanced lattice is within 0.6% there
    st = standardized_moments(build_pmf(200, (0.0, 0.0), "balanced"), "clt")
    assert st["variance"] == pytest.approx(3 / 64, rel=0.02)
    st = standardized_moments(build_pmf(400, (0.0, 0.0)), "clt")
    assert st["variance"] == pytest.approx(3 / 64, rel=0.02)


def test_csv_export(tmp_path):
    pmf = build_pmf(6, (1.0, 0.0))
    path = tmp_path / "pmf.csv"
    pmf.to_csv(path)
    rows = path.read_text().splitlines()
    assert rows[0] == "k,m,log_weight,prob"
    assert len(rows) == 17
    assert float(rows[5].split(",")[3]) == pmf.probs[4]


def test_speed_table_rejects_curve():
    cp = critical_curve_point(5.0)
    with pytest.raises(DomainError):
        convergence_speed_table(cp.params, [100])

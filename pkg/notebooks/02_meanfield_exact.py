# Exact finite-n mean-field laws: the edge count is a sufficient statistic,
# so the whole Gibbs measure is a pmf over k = 0..n(n-1)/2.
import math

from ergkit import CRITICAL_POINT, build_pmf, limit_law_triangle, riemann_D
from ergkit.landscape import MaximizerSet, critical_curve_point
from ergkit.meanfield import convergence_speed_table, mixture_mass, standardized_moments

# CLT variance against the Gaussian limit
p = (-1.0, 1.0)
v0 = limit_law_triangle(p).variance
for n in (200, 400, 800, 1600):
    var = standardized_moments(build_pmf(n, p), "clt")["variance"]
    print(n, var, var / v0 - 1)

# Laplace sums
print("D_c(4000)", riemann_D(4000, CRITICAL_POINT)[0], "D_0(4000)", riemann_D(4000, (0, 0))[0], 2 * math.sqrt(math.pi))

# Two lattices. The default one, m = 2k/n^2, is the literal mean-field
# Hamiltonian; its binomial entropy differs from n^2 I(m)/2 by O(n), which
# shows up at the critical point and on the curve. The balanced lattice
# m = k/N removes that drift.
law = limit_law_triangle(CRITICAL_POINT)
for lattice in ("literal", "balanced"):
    st = standardized_moments(build_pmf(2000, CRITICAL_POINT, lattice), "nonstd")
    print(lattice, "critical kurtosis", st["kurtosis"], "target", law.kurtosis())

cp = critical_curve_point(5.0)
ms = MaximizerSet([cp.u1, cp.u2], 0.0)
for lattice in ("literal", "balanced"):
    print(lattice, mixture_mass(build_pmf(2000, cp.params, lattice), ms))

for lattice in ("literal", "balanced"):
    print(lattice, [round(r.mean_error, 5) for r in convergence_speed_table(p, [200, 400, 800, 1600], lattice)])

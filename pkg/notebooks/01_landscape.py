# The scalar problem behind the edge-triangle model.
# Everything starts from g(u) = alpha/6 u^3 + h/2 u - I(u)/2 on [0, 1].
import numpy as np

from ergkit import CRITICAL_POINT, classify_phase, find_maximizers, limit_law_triangle
from ergkit.landscape import critical_curve_point, rate_function, rate_taylor_coefficients

# A point in the uniqueness region: one maximizer, Gaussian fluctuations
p = (-1.0, 1.0)
ms = find_maximizers(p)
print("maximizer", ms.maximizers, "free energy", ms.free_energy)
print("phase", classify_phase(p))
print("triangle law", limit_law_triangle(p))

# At the critical point the maximizer is 2/3 and the law turns quartic
print(classify_phase(CRITICAL_POINT), limit_law_triangle(CRITICAL_POINT))
print("quartic kurtosis", limit_law_triangle(CRITICAL_POINT).kurtosis())

# Above alpha = 27/8 there is a curve h = q(alpha) with two equal maxima
for alpha in (3.5, 4.0, 6.0, 8.0):
    cp = critical_curve_point(alpha)
    print(f"alpha={alpha:4.1f}  q={cp.h:+.6f}  u1={cp.u1:.5f}  u2={cp.u2:.5f}  kappa={cp.kappa:.6f}")
# kappa sits at 1/2 everywhere: u^2(1-u) takes the same value at both maxima

# The rate function vanishes at u* and grows quadratically around it,
# except at the critical point where the first nonzero term is quartic
xs = np.linspace(0.05, 0.95, 7)
print(np.round(rate_function(p, xs), 5))
print("critical Taylor coefficients", rate_taylor_coefficients(CRITICAL_POINT, 2 / 3))

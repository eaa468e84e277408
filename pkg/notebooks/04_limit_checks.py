# Standardize sampled triangle counts and compare with the predicted limit laws.
from ergkit import ChainConfig, find_maximizers, limit_law_triangle, run_chain
from ergkit.limitlab import check_series, concentration_check, histogram_table, standardize

# The reference parameters (n=150, M=5000) take a few seconds each; fewer samples here
for p in [(-1.0, 1.0), (1.0, 1.0)]:
    batch = run_chain(ChainConfig(150, *p, seed=11, num_samples=1000))
    law = limit_law_triangle(p)
    series = standardize(batch, "CLT")  # empirically centered
    rep = check_series(series, law)
    print(p, "KS", round(rep.ks, 4), "variance", round(series.variance(), 4), "vs", round(law.variance, 4))
    for row in rep.moments:
        print("   ", row)
    print("   fraction in J(0.05):", concentration_check(batch, find_maximizers(p), 0.05).fraction)

rows = histogram_table(series, law, bins=12)
for r in rows:
    print(f"{r.bin_left:+.3f} {r.bin_right:+.3f} {r.count:4d} {r.theory_density:.4f}")

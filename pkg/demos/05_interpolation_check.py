"""Exponents and an empirical constant for the interpolation inequality

    ||phi||_q^q <= C0 ||phi||_r^delta + eps ||grad phi||_2^2 + ||phi||_2^2.

The exponents come out of exact rational arithmetic, so the textbook
instance (n=3, r=1, q=2) gives lambda = 3/5 and delta = 2 with no rounding.
The sampler then fits the smallest C0 that covers 200 random smooth
profiles for each eps. With q = 2 the left side coincides with the last
term on the right and any C0 works, so the sampler is shown at q = 2.5.
"""

from nlchemo import gn_exponents
from nlchemo.inequality import check_inequality

for q, r, n in [(2, 1, 3), (2, 2, 3), (2.5, 1, 2), (3, 1, 2), (3.5, 1, 1)]:
    ex = gn_exponents(q, r, n)
    if ex.admissible:
        tag = " (formal p for n < 3)" if ex.convention else ""
        print(f"q={q:<4} r={r:<3} n={n}: lambda = {ex.lam:.6g}, delta = {ex.delta:.6g}{tag}")
    else:
        print(f"q={q:<4} r={r:<3} n={n}: inadmissible, {ex.reason}")

print()
result = check_inequality(2.5, 1, 3, samples=200)
for fit in result.fits:
    print(f"eps = {fit.eps:<4g} fitted C0 = {fit.c0:.4g} (median {fit.median:.3g}, "
          f"99% quantile {fit.quantiles['0.99']:.3g})")

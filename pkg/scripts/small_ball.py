"""Small-ball diagnostics: concentration of Rademacher sums against the
Kolmogorov-Rogozin bound, and covering numbers of normalized coefficient
points for the Kac and elliptic arrays.

    python scripts/small_ball.py
"""
import cmath
import math

import numpy as np

from eqdist.bases import CoefficientArray, profile_array
from eqdist.potential import Profile
from eqdist.rngdist import DistributionSpec, sample_logpolar, stream
from eqdist.stats import concentration_estimate, covering_number, kr_bound_check, normalized_coefficient_points


def rademacher_table(samples=100_000):
    print("n     exact Q    estimate   KR bound (C=2)")
    for n in (16, 64, 256, 1024):
        q = math.comb(n, n // 2) / 2 ** n
        signs = sample_logpolar(DistributionSpec.rademacher(), stream(8, n), samples * n).unit.real
        est = concentration_estimate(signs.reshape(samples, n).sum(axis=1), 1.0)
        print(f"{n:<5d} {q:.5f}    {est:.5f}    {kr_bound_check([0.5] * n, q, 2.0).bound:.5f}")


def covering_table(eps=0.1):
    print(f"\ncovering numbers at radius exp(-{eps} n)")
    print("array     z            n     count   n+1")
    for label, make in (("kac", CoefficientArray.kac), ("elliptic", lambda n: profile_array(Profile.elliptic(), n))):
        for zname, z in (("e^{i pi/7}", cmath.exp(1j * math.pi / 7)), ("e^{i}", cmath.exp(1j))):
            for n in (32, 64, 128, 256):
                pts = normalized_coefficient_points(make(n), z)
                count = covering_number(pts, math.exp(-eps * n))
                print(f"{label:<9s} {zname:<12s} {n:<5d} {count:<7d} {n + 1}")


if __name__ == "__main__":
    rademacher_table()
    covering_table()

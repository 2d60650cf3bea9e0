"""Independent reference computations for the test suite."""
import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment


def companion_roots(coeffs, dps=50):
    """Roots from companion eigenvalues, each polished by mpmath Newton steps."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1] / c[-1]
    guesses = np.linalg.eigvals(C)
    mp_c = [mpmath.mpc(complex(x)) for x in c[::-1]]
    out = []
    with mpmath.workdps(dps):
        for g in guesses:
            z = mpmath.mpc(complex(g))
            for _ in range(30):
                p, dp = mpmath.polyval(mp_c, z, derivative=True)
                if dp == 0:
                    break
                step = p / dp
                z -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(z)):
                    break
            out.append(complex(z))
    return np.array(out)


def matching_distance(a, b):
    """Max distance under the optimal pairing of two equal-size multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    assert a.size == b.size
    if a.size == 0:
        return 0.0
    D = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(D)
    return float(D[i, j].max())


def hausdorff(a, b):
    D = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))

"""Independent numerical oracles used only by the test suite.

The Laplace inversion referee is mpmath's arbitrary-precision Gaver-Stehfest
method applied to transform formulas written here from scratch, so it shares
no code with the package's quadrature path.  (A float64 fixed-Talbot
summation was tried first and diverges for these transforms: the
exp(-x sqrt(s/eps)) factor oscillates ever faster along the contour, and
the inversion error grows with the node count.)
"""

import mpmath as mp


def khat_mp(x, s, eps, a, c):
    """Transform of the fundamental solution, mpmath arithmetic."""
    c2 = c * c
    return mp.e ** (-abs(x) * mp.sqrt(s * (s + a) / (eps * s + c2))) / (
        2 * mp.sqrt(s * (s + a) * (eps * s + c2)))


def ghat_mp(r, s, eps, a, c):
    b = c * c / eps
    return mp.e ** (-r * mp.sqrt(s * (s + a) / (s + b))) / (
        2 * mp.sqrt(eps) * mp.sqrt((s + a) * (s + b)))


def invert_laplace(fhat, t, degree=32, dps=None):
    """Gaver-Stehfest inversion at time t; fhat maps an mpmath s to a value."""
    old = mp.mp.dps
    try:
        mp.mp.dps = dps if dps is not None else max(30, int(2.1 * degree))
        return float(mp.invertlaplace(fhat, t, method="stehfest", degree=degree))
    finally:
        mp.mp.dps = old


def k_reference(x, t, eps, a, c, degree=32):
    return invert_laplace(lambda s: khat_mp(x, s, eps, a, c), t, degree)


def g_reference(r, t, eps, a, c, degree=32):
    return invert_laplace(lambda s: ghat_mp(r, s, eps, a, c), t, degree)

"""Krawtchouk weights, normalized polynomials, single-line and two-line
kernels, and their Hermite tangency limit.

Positions may be real numbers (the tangency scaling needs off-lattice
evaluation); binomial factors then go through lgamma.  Weighted kernel sums
attach the square-root weight to the recurrence seed so magnitudes stay
bounded even when the bare polynomial values would overflow.
"""

import math
from collections import namedtuple
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "KrawtchoukParams", "weight", "log_weight", "poly", "kernel_single",
    "ensemble_prob", "l_kernel", "hermite_fn", "hermite_kernel_I",
    "hermite_limit_check", "LimitReport",
]


class KrawtchoukParams:
    """Degree bound n and success probability q, with p = 1 - q.

    The tiling weight a enters only through from_tiling_weight, so the
    conversion q = a^2/(1+a^2) lives in exactly one place.
    """

    __slots__ = ("n", "q", "p")

    def __init__(self, n, q):
        n = int(n)
        if n < 1:
            raise ValueError("degree bound must be at least 1")
        if not 0.0 < q < 1.0:
            raise ValueError("q must lie strictly between 0 and 1")
        self.n = n
        self.q = float(q)
        self.p = 1.0 - float(q)

    @classmethod
    def from_tiling_weight(cls, n, a):
        if a <= 0:
            raise ValueError("tiling weight must be positive")
        return cls(n, a * a / (1.0 + a * a))

    def __repr__(self):
        return "KrawtchoukParams(n=%d, q=%g)" % (self.n, self.q)


def _log_binomial(n, x):
    return math.lgamma(n + 1) - math.lgamma(x + 1) - math.lgamma(n - x + 1)


def log_weight(x, prm):
    """log of C(n,x) q^x p^(n-x); x may be real in [0, n]."""
    if not 0 <= x <= prm.n:
        raise ValueError("position %s outside 0..%d" % (x, prm.n))
    return (_log_binomial(prm.n, x) + x * math.log(prm.q)
            + (prm.n - x) * math.log(prm.p))


def weight(x, prm):
    """Binomial weight C(n,x) q^x p^(n-x)."""
    return math.exp(log_weight(x, prm))


def _recurrence_coeffs(prm, kmax):
    n, q, p = prm.n, prm.q, prm.p
    ks = np.arange(kmax + 2, dtype=float)
    a = q * n + ks * (p - q)
    b = np.sqrt(ks * p * q * (n - ks + 1.0))
    return a, b


def poly(k, x, prm):
    """Normalized polynomial p_k(x); zero when k falls outside 0..n.

    Three-term recurrence seeded at p_0 = 1, so the value is the bare
    polynomial without any weight factor.  The loop runs in extended
    precision: near the edge of the weight the recurrence cancels enough
    that pure double drifts to ~1e-9 relative by n = 15.
    """
    if k < 0 or k > prm.n:
        return 0.0
    if not 0 <= x <= prm.n:
        raise ValueError("position %s outside 0..%d" % (x, prm.n))
    n = prm.n
    q = np.longdouble(prm.q)
    p = np.longdouble(1.0) - q
    xl = np.longdouble(x)
    ks = np.arange(k + 2, dtype=np.longdouble)
    a = q * n + ks * (p - q)
    b = np.sqrt(ks * p * q * (n - ks + 1.0))
    prev, cur = np.longdouble(0.0), np.longdouble(1.0)
    for j in range(k):
        prev, cur = cur, ((a[j] - xl) * cur - b[j] * prev) / b[j + 1]
    return float(cur)


def _phi_row(x, prm, kmax):
    """Array phi_k(x) = p_k(x) sqrt(w(x)) for k = 0..kmax."""
    half = 0.5 * log_weight(x, prm)
    out = np.zeros(kmax + 1)
    if half < -700.0:
        return out
    a, b = _recurrence_coeffs(prm, kmax)
    prev, cur = 0.0, math.exp(half)
    out[0] = cur
    for j in range(kmax):
        prev, cur = cur, ((a[j] - x) * cur - b[j] * prev) / b[j + 1]
        out[j + 1] = cur
    return out


def kernel_single(r, x, y, prm):
    """Rank-r projection kernel: sum of the first r weighted polynomial
    products."""
    if not 1 <= r <= prm.n:
        raise ValueError("rank %d outside 1..%d" % (r, prm.n))
    fx = _phi_row(x, prm, r - 1)
    fy = fx if y == x else _phi_row(y, prm, r - 1)
    return float(fx @ fy)


@lru_cache(maxsize=None)
def _partition_sum(r, n, q):
    prm = KrawtchoukParams(n, q)
    total = 0.0
    for h in combinations(range(n + 1), r):
        van = 1.0
        for i in range(r):
            for j in range(i + 1, r):
                van *= h[j] - h[i]
        total += van * van * math.prod(weight(x, prm) for x in h)
    return total


_SUMMATION_CAP = 20000


def ensemble_prob(h, r, prm):
    """Probability that the r-point ensemble sits exactly on the set h.

    Small cases go through the squared-Vandermonde form with the
    normalization obtained by exhaustive summation; larger ones use the
    determinant of the rank-r kernel, which needs no normalization.
    """
    pts = [int(x) for x in h]
    if len(pts) != r:
        raise ValueError("expected %d points, got %d" % (r, len(pts)))
    if len(set(pts)) != r:
        raise ValueError("ensemble positions must be distinct")
    for x in pts:
        if not 0 <= x <= prm.n:
            raise ValueError("position %d outside 0..%d" % (x, prm.n))
    if math.comb(prm.n + 1, r) <= _SUMMATION_CAP:
        van = 1.0
        for i in range(r):
            for j in range(i + 1, r):
                van *= pts[j] - pts[i]
        num = van * van * math.prod(weight(x, prm) for x in pts)
        return num / _partition_sum(r, prm.n, prm.q)
    mat = np.array([[kernel_single(r, x, y, prm) for y in pts] for x in pts])
    return float(np.linalg.det(mat))


def l_kernel(r, x, s, y, prm):
    """Two-line kernel; the index sums run over the part of the lattice
    where the binomials live, and the r = s diagonal reduces to
    kernel_single."""
    n = prm.n
    if not (1 <= r <= n and 1 <= s <= n):
        raise ValueError("line indices outside 1..%d" % n)
    if r <= s:
        fx = _phi_row(x, prm, r - 1)
        fy = _phi_row(y, prm, s - 1)
        total = 0.0
        for k in range(-r, 0):
            ratio = math.exp(0.5 * (_log_binomial(n, k + r)
                                    - _log_binomial(n, k + s)))
            total += ratio * fx[k + r] * fy[k + s]
        return total
    kmax = n - r
    fx = _phi_row(x, prm, n)
    fy = _phi_row(y, prm, kmax + s)
    total = 0.0
    for k in range(kmax + 1):
        ratio = math.exp(0.5 * (_log_binomial(n, k + r)
                                - _log_binomial(n, k + s)))
        total += ratio * fx[k + r] * fy[k + s]
    return -total


def hermite_fn(k, xi):
    """Normalized Hermite polynomial h_k, orthonormal against exp(-xi^2)."""
    if k < 0:
        return 0.0
    prev, cur = 0.0, math.pi ** -0.25
    for j in range(k):
        prev, cur = cur, (xi * math.sqrt(2.0 / (j + 1)) * cur
                          - math.sqrt(j / (j + 1.0)) * prev)
    return cur


def _hermite_row(xi, kmax):
    out = np.zeros(kmax + 1)
    prev, cur = 0.0, math.pi ** -0.25
    out[0] = cur
    for j in range(kmax):
        prev, cur = cur, (xi * math.sqrt(2.0 / (j + 1)) * cur
                          - math.sqrt(j / (j + 1.0)) * prev)
        out[j + 1] = cur
    return out


def hermite_kernel_I(r, xi, s, eta, terms=4000):
    """Two-line Hermite kernel at the tangency point.

    For r <= s the sum has at most r terms.  For r > s the reversed-order
    series is infinite and converges only through oscillation; it is summed
    to `terms` terms with the last two partial sums averaged, which is
    adequate for qualitative use but not for tight tolerances.
    """
    if r < 1 or s < 1:
        raise ValueError("line indices must be positive")
    damp = math.exp(-0.5 * (xi * xi + eta * eta))
    if r <= s:
        hx = _hermite_row(xi, r - 1)
        hy = _hermite_row(eta, s - 1)
        total = 0.0
        for j in range(-r, 0):
            ratio = math.exp(0.5 * (math.lgamma(s + j + 1)
                                    - math.lgamma(r + j + 1)))
            total += ratio * hx[r + j] * hy[s + j]
        return total * damp
    hx = _hermite_row(xi, r + terms)
    hy = _hermite_row(eta, s + terms)
    total = 0.0
    prev_total = 0.0
    for j in range(terms + 1):
        ratio = math.exp(0.5 * (math.lgamma(s + j + 1)
                                - math.lgamma(r + j + 1)))
        prev_total = total
        total += ratio * hx[r + j] * hy[s + j]
    return -0.5 * (total + prev_total) * damp


LimitReport = namedtuple("LimitReport", ["ns", "gaps", "decreasing"])


def hermite_limit_check(index, ns, q, xi=0.5, eta=0.5):
    """Track the gap between the finite-n object and its Hermite limit.

    index is either a single polynomial degree k, checked through the
    pointwise limit of p_k at the tangency scaling, or a pair (r, s),
    checked through the rescaled two-line kernel.  Returns the gap per n
    and whether the sequence is non-increasing.
    """
    ns = [int(n) for n in ns]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("need at least two strictly increasing orders")
    p = 1.0 - q
    gaps = []
    if isinstance(index, tuple):
        r, s = index
        target = hermite_kernel_I(r, xi, s, eta)
        for n in ns:
            prm = KrawtchoukParams(n, q)
            scale = math.sqrt(2.0 * n * p * q)
            x = q * n + xi * scale
            y = q * n + eta * scale
            # The off-diagonal normalization is (-1)^(s-r) n^((s-r)/2): each
            # displaced binomial ratio contributes n^((r-s)/2), so this power
            # (and not s-r itself) is what the pointwise polynomial limit
            # leaves over.
            val = ((-1.0) ** (s - r) * float(n) ** ((s - r) / 2.0)
                   * scale * l_kernel(r, x, s, y, prm))
            gaps.append(abs(val - target))
    else:
        k = int(index)
        target = (-1.0) ** k * hermite_fn(k, xi) * math.pi ** 0.25
        for n in ns:
            prm = KrawtchoukParams(n, q)
            x = q * n + xi * math.sqrt(2.0 * n * p * q)
            gaps.append(abs(poly(k, x, prm) - target))
    decreasing = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    return LimitReport(tuple(ns), tuple(gaps), decreasing)

"""Space-time kernel of the tiling particle process.

Three evaluation routes coexist and cross-check each other:

* double-contour quadrature (circle-circle for a < 1, line-circle at a = 1);
* an exact rational route that does the w-integral as a series coefficient
  and the z-integral as a single residue at 1/a, valid for any rational
  weight including a = 1;
* for odd lines, delegation to the two-line polynomial kernel through the
  re-indexing identity, which is the stable path for large-order work.

Correlation and gap determinants, the conjugated/rescaled variants used in
the boundary scaling, and the path-family weight live here too.
"""

import functools
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from . import krawtchouk as kw
from . import numerics as nm
from .tiling import line_window

__all__ = [
    "AztecKernelParams", "KernelQuery", "GapSpec", "SingularityError",
    "ConvergenceError", "alpha_step", "beta_step", "phi", "phi_exact",
    "g_factor", "kernel", "kernel_exact", "conjugated_kernel",
    "rescaled_query", "rescaled_kernel", "correlation", "gap_probability",
    "path_family_weight", "line_index", "line_from_index",
    "odd_line_to_zigzag", "zigzag_to_odd_line", "scaling_line",
    "scaling_center", "scaling_unit",
]


class SingularityError(ValueError):
    """Evaluation requested exactly on a pole."""


ConvergenceError = nm.ConvergenceError


KernelQuery = namedtuple("KernelQuery", ["r", "x", "s", "y"])

GapSpec = namedtuple("GapSpec", ["lines", "thresholds"])


# ---------------------------------------------------------------------------
# index maps between the three frames (particle lines, half-line pairs,
# zig-zag re-indexing)


def line_index(line):
    """Split a line number as line = 2r - eps with eps in {0, 1}."""
    r = (line + 1) // 2
    return r, 2 * r - line


def line_from_index(r, eps):
    return 2 * r - eps


def odd_line_to_zigzag(n, line, x):
    """Map an odd-line site to its zig-zag label (k, h), h in 0..n."""
    if line % 2 == 0:
        raise ValueError("line %d is not odd" % line)
    k = n - (line - 1) // 2
    return k, x + k - 1


def zigzag_to_odd_line(n, k, h):
    return 2 * (n - k) + 1, h - k + 1


# ---------------------------------------------------------------------------
# transition coefficients


def alpha_step(d, a):
    """Single even-step weight: a for an up-step, 1 for a level step."""
    if d == 1:
        return float(a)
    return 1.0 if d == 0 else 0.0


def beta_step(d, a):
    """Single odd-step weight: a^(-d) for any down- or level step."""
    return float(a) ** (-d) if d <= 0 else 0.0


def _parity_counts(l1, l2):
    """Number of even and of odd integers t with l1 <= t < l2."""
    total = max(l2 - l1, 0)
    evens = (l2 + 1) // 2 - (l1 + 1) // 2
    return evens, total - evens


def phi_exact(l1, l2, x, y, a):
    """Multi-step transition weight as an exact series coefficient.

    The product of step factors is (1+az)^A (1-a/z)^(-B) with A even and B
    odd steps; the (x -> y) weight is its Laurent coefficient at z^(y-x),
    a finite sum because only A powers of z point upward.
    """
    if l1 >= l2:
        return Fraction(0)
    a = Fraction(a)
    shape, odd = _parity_counts(l1, l2)
    d = y - x
    if odd == 0:
        if 0 <= d <= shape:
            return math.comb(shape, d) * a ** d
        return Fraction(0)
    total = Fraction(0)
    for i in range(max(d, 0), shape + 1):
        j = i - d
        total += (math.comb(shape, i) * math.comb(odd - 1 + j, j)
                  * a ** (i + j))
    return total


def phi(l1, l2, x, y, a):
    """Transition weight from (line l1, x) to (line l2, y); zero unless
    l1 < l2."""
    return float(phi_exact(l1, l2, x, y, a))


def _phi_contour(l1, l2, x, y, a, nodes=256):
    """Contour cross-check of phi: coefficient extraction on a circle just
    outside the pole circle |z| = a."""
    if l1 >= l2:
        return 0.0
    evens, odds = _parity_counts(l1, l2)
    circle = nm.ContourSpec.circle(0.0, 2.0 * a + 1.0, nodes)
    val = nm.integrate_contour(
        lambda z: (1 + a * z) ** evens * (1 - a / z) ** -odds
        / z ** (y - x + 1), circle)
    return float(val.real)


# ---------------------------------------------------------------------------
# contour integrand and quadrature evaluation


def g_factor(n, r, s, e1, e2, z, w, a):
    """Ratio of the generating factors accumulated between two half-lines."""
    z = complex(z)
    w = complex(w)
    if z == 0 or w == 0:
        raise SingularityError("contour variable at the origin")
    den = (1 - a * z) ** (n - r + e1) * (1 + a / z) ** r
    if den == 0:
        raise SingularityError("z = %r sits on a pole" % (z,))
    return (1 - a * w) ** (n - s + e2) * (1 + a / w) ** s / den


class AztecKernelParams:
    """Order n, weight a in (0, 1], and quadrature resolution.

    a may be a Fraction, in which case the exact route accepts a < 1 too.
    """

    def __init__(self, n, a, z_nodes=128, w_nodes=128, tol=1e-9):
        if n < 1:
            raise ValueError("order must be at least 1")
        if not 0 < a <= 1:
            raise ValueError("weight must lie in (0, 1]")
        self.n = int(n)
        self.a = a
        self.z_nodes = int(z_nodes)
        self.w_nodes = int(w_nodes)
        self.tol = float(tol)
        self._cache = {}

    def exact_weight(self):
        if isinstance(self.a, (int, Fraction)):
            return Fraction(self.a)
        if float(self.a) == 1.0:
            return Fraction(1)
        raise ValueError("exact evaluation needs a rational weight; "
                         "got float %r" % (self.a,))

    def contours_for(self, line1, line2):
        """Contour pair for a query from line1 to line2, per the ordering
        rule: the w-circle sits inside z when line1 >= line2, outside
        otherwise."""
        af = float(self.a)
        if af < 1.0:
            r1 = 0.5 * (af + 1.0 / af)
            r2 = 0.5 * r1 if line1 >= line2 else 1.5 * r1
            return (nm.ContourSpec.circle(0.0, r1, self.z_nodes),
                    nm.ContourSpec.circle(0.0, r2, self.w_nodes))
        if line1 < line2:
            raise ValueError("line-circle form needs line1 >= line2; "
                             "subtract the transition term separately")
        return (nm.ContourSpec.vline(0.5, self.z_nodes),
                nm.ContourSpec.circle(0.0, 0.25, self.w_nodes))

    def __repr__(self):
        return "AztecKernelParams(n=%d, a=%r)" % (self.n, self.a)


def _quadrature_value(n, a, line1, x, line2, y, zc, wc):
    r, e1 = line_index(line1)
    s, e2 = line_index(line2)
    zs, zwt = zc.rule()
    ws, wwt = wc.rule()
    Z = zs[:, None]
    W = ws[None, :]
    vals = (W ** y * (1 - a * W) ** (n - s + e2) * (1 + a / W) ** s
            / (Z ** x * (1 - a * Z) ** (n - r + e1) * (1 + a / Z) ** r))
    vals = vals / (W * (Z - W))
    return complex(np.sum(zwt[:, None] * wwt[None, :] * vals))


def _kernel_quadrature(n, a, line1, x, line2, y, z_nodes, w_nodes):
    """Direct double-contour evaluation.

    At a = 1 the line form converges absolutely only above the window
    floor of even lines; floor entries take their value from the
    weight-continuity limit, which the line rule misses by half the
    infinity correction, so cross-checks there use the exact route.
    """
    af = float(a)
    if af < 1.0:
        r1 = 0.5 * (af + 1.0 / af)
        r2 = 0.5 * r1 if line1 >= line2 else 1.5 * r1
        zc = nm.ContourSpec.circle(0.0, r1, z_nodes)
        wc = nm.ContourSpec.circle(0.0, r2, w_nodes)
        return _quadrature_value(n, af, line1, x, line2, y, zc, wc).real
    zc = nm.ContourSpec.vline(0.5, z_nodes)
    wc = nm.ContourSpec.circle(0.0, 0.25, w_nodes)
    tilde = _quadrature_value(n, af, line1, x, line2, y, zc, wc).real
    return tilde - phi(line1, line2, x, y, af)


# ---------------------------------------------------------------------------
# exact rational route


def _falling(base, count):
    out = 1
    for i in range(count):
        out *= base - i
    return out


def _log_abs_fraction(frac):
    """log |frac| for an exact rational, safe for huge terms.

    math.log accepts arbitrarily large ints, so this never overflows even
    when the value itself is far outside float range.
    """
    return math.log(abs(frac.numerator)) - math.log(frac.denominator)


def _safe_float(frac):
    """Fraction to float, falling back through logarithms near the edge of
    float range."""
    try:
        return float(frac)
    except OverflowError:
        sign = 1.0 if frac > 0 else -1.0
        return sign * math.exp(_log_abs_fraction(frac))


@functools.lru_cache(maxsize=512)
def _coeffs_one_minus_aw_pow_times_w_plus_a_pow(m, s, a):
    """Coefficient list of (1 - a w)^m (w + a)^s, exact."""
    left = [math.comb(m, i) * (-a) ** i for i in range(m + 1)]
    right = [math.comb(s, j) * a ** (s - j) for j in range(s + 1)]
    out = [Fraction(0)] * (m + s + 1)
    for i, ci in enumerate(left):
        if ci == 0:
            continue
        for j, cj in enumerate(right):
            out[i + j] += ci * cj
    return tuple(out)


@functools.lru_cache(maxsize=65536)
def _z_residue_integral(n, r, gamma, rho, a):
    """Exact value of the z-integral of z^rho (z+a)^(-r) (1-az)^(-gamma)
    over the separating contour, done by closing onto the pole at 1/a.

    The integrand falls off like z^(-d) with d = r + gamma - rho.  Slow
    decay moves weight to the residue at infinity, restored here as a
    finite correction.  That correction is kept in full even at a = 1:
    the line-contour principal value would halve the d = 1 term, but the
    value demanded by the particle process (occupation 1 at the deepest
    reachable site of an even line) is the a -> 1 limit of the circle
    form, which keeps it whole.
    """
    d = r + gamma - rho
    inv = 1 / a
    res = Fraction(0)
    for i in range(gamma):
        res += (math.comb(gamma - 1, i) * _falling(rho, i) * inv ** (rho - i)
                * _falling(-r, gamma - 1 - i)
                * (inv + a) ** (-(r + gamma - 1 - i)))
    res *= (-a) ** -gamma * Fraction(1, math.factorial(gamma - 1))
    val = -res
    if d <= 1:
        tail = Fraction(0)
        for i in range(1 - d + 1):
            j = 1 - d - i
            tail += ((-1) ** i * math.comb(r + i - 1, i) * a ** i
                     * math.comb(gamma + j - 1, j) * a ** -j)
        tail *= (-a) ** -gamma
        val += tail
    return val


def kernel_exact(n, line1, x, line2, y, a=Fraction(1)):
    """Exact rational kernel value at rational weight a in (0, 1].

    The w-integral reduces to polynomial coefficients, the z-integral to one
    residue; the transition term is subtracted exactly for line1 < line2.
    """
    a = Fraction(a)
    if not 0 < a <= 1:
        raise ValueError("weight must lie in (0, 1]")
    r, e1 = line_index(line1)
    s, e2 = line_index(line2)
    gamma = n - r + e1
    total = Fraction(0)
    tmax = s - y
    if tmax >= 0:
        coeffs = _coeffs_one_minus_aw_pow_times_w_plus_a_pow(
            n - s + e2, s, a)
        for t in range(tmax + 1):
            j = tmax - t
            if j >= len(coeffs) or coeffs[j] == 0:
                continue
            rho = r - x - t - 1
            total += coeffs[j] * _z_residue_integral(n, r, gamma, rho, a)
    if line1 < line2:
        total -= phi_exact(line1, line2, x, y, a)
    return total


# ---------------------------------------------------------------------------
# dispatch


def _kernel_identity(n, a, line1, x, line2, y):
    k1, hx = odd_line_to_zigzag(n, line1, x)
    k2, hy = odd_line_to_zigzag(n, line2, y)
    af = float(a)
    prm = kw.KrawtchoukParams.from_tiling_weight(n, af)
    pref = math.exp(0.5 * (kw._log_binomial(n, hy) - kw._log_binomial(n, hx)))
    return ((-1) ** (k1 - k2) * pref
            * kw.l_kernel(k1, hx, k2, hy, prm))


def _validate_query(qy, n):
    line1, x, line2, y = qy
    for line in (line1, line2):
        if not 1 <= line <= 2 * n - 1:
            raise ValueError("line %d outside 1..%d" % (line, 2 * n - 1))
    for line, pos in ((line1, x), (line2, y)):
        lo, _hi = line_window(n, line)
        if pos < lo:
            raise ValueError("position %d below the line-%d floor %d"
                             % (pos, line, lo))


def kernel(qy, prm, method="auto"):
    """Kernel entry K(line1, x; line2, y).

    auto routing: same-line odd queries inside the window at a = 1 go
    through the polynomial identity (the projection form is stable at any
    order), every other a = 1 query through the exact rational route (the
    cross-line polynomial sums cancel catastrophically at large order),
    and a < 1 through quadrature with a doubling check.
    """
    qy = KernelQuery(*qy)
    _validate_query(qy, prm.n)
    key = (qy, method)
    hit = prm._cache.get(key)
    if hit is not None:
        return hit
    line1, x, line2, y = qy
    n = prm.n
    af = float(prm.a)
    if method == "auto":
        if af == 1.0:
            in_windows = (x <= line_window(n, line1)[1]
                          and y <= line_window(n, line2)[1])
            if line1 == line2 and line1 % 2 and in_windows:
                val = _kernel_identity(n, prm.a, line1, x, line2, y)
            else:
                val = _safe_float(kernel_exact(n, line1, x, line2, y))
        else:
            estimates = [_kernel_quadrature(n, af, line1, x, line2, y,
                                            level * prm.z_nodes,
                                            level * prm.w_nodes)
                         for level in (1, 2)]
            while abs(estimates[-1] - estimates[-2]) > max(
                    prm.tol, 1e-12 * abs(estimates[-1])):
                if len(estimates) == 3:
                    raise ConvergenceError(estimates[-2], estimates[-1])
                estimates.append(_kernel_quadrature(
                    n, af, line1, x, line2, y,
                    4 * prm.z_nodes, 4 * prm.w_nodes))
            val = estimates[-1]
    elif method == "identity":
        val = _kernel_identity(n, prm.a, line1, x, line2, y)
    elif method == "exact":
        val = _safe_float(kernel_exact(n, line1, x, line2, y,
                                       prm.exact_weight()))
    elif method == "quadrature":
        val = _kernel_quadrature(n, af, line1, x, line2, y,
                                 prm.z_nodes, prm.w_nodes)
    else:
        raise ValueError("unknown method %r" % (method,))
    prm._cache[key] = val
    return val


# ---------------------------------------------------------------------------
# boundary scaling: conjugation and rescaling


_SQRT2 = math.sqrt(2.0)


def scaling_line(n, tau):
    """Real-valued line coordinate whose floor-to-even is the lattice line."""
    return n * (1.0 + 1.0 / _SQRT2) + 2.0 ** (-1.0 / 6.0) * tau * n ** (2.0 / 3.0)


def scaling_center(n, tau):
    return n / _SQRT2 - 2.0 ** (-5.0 / 6.0) * tau * tau * n ** (1.0 / 3.0)


def scaling_unit(n):
    return 2.0 ** (-5.0 / 6.0) * n ** (1.0 / 3.0)


def _tau_of_line(n, line):
    return (line - n * (1.0 + 1.0 / _SQRT2)) / (2.0 ** (-1.0 / 6.0)
                                                * n ** (2.0 / 3.0))


def conjugated_kernel(qy, prm):
    """Kernel conjugated by the boundary-scaling exponential; determinants
    are unchanged but entries stay of order one near the edge.

    At a = 1 the raw entry and the conjugating factor can separately leave
    float range while their product is of order one, so the exact rational
    value is combined with the prefactor in log space.
    """
    qy = KernelQuery(*qy)
    _validate_query(qy, prm.n)
    hit = prm._cache.get(("conj", qy))
    if hit is not None:
        return hit
    n = prm.n
    line1, x, line2, y = qy
    tau1 = _tau_of_line(n, line1)
    tau2 = _tau_of_line(n, line2)
    cn = scaling_unit(n)
    xi1 = (x - scaling_center(n, tau1)) / cn
    xi2 = (y - scaling_center(n, tau2)) / cn
    log_pref = ((x - y + line2 - line1) * math.log(_SQRT2 - 1.0)
                + xi1 * tau1 - xi2 * tau2
                - tau1 ** 3 / 3.0 + tau2 ** 3 / 3.0)
    if float(prm.a) == 1.0:
        exact = kernel_exact(n, line1, x, line2, y)
        if exact == 0:
            val = 0.0
        else:
            sign = 1.0 if exact > 0 else -1.0
            val = sign * math.exp(_log_abs_fraction(exact) + log_pref)
    else:
        val = math.exp(log_pref) * kernel(qy, prm)
    prm._cache[("conj", qy)] = val
    return val


def rescaled_query(n, tau, xi):
    """Lattice site for scaled coordinates (tau, xi): line floored to even,
    position floored, plus the exactly-inverted realized (tau, xi)."""
    line = 2 * int(math.floor(scaling_line(n, tau) / 2.0))
    if not 1 <= line <= 2 * n - 1:
        raise ValueError("scaled time %g leaves the line range at n=%d"
                         % (tau, n))
    tau_hat = _tau_of_line(n, line)
    cn = scaling_unit(n)
    x = int(math.floor(scaling_center(n, tau_hat) + cn * xi))
    xi_hat = (x - scaling_center(n, tau_hat)) / cn
    return line, x, tau_hat, xi_hat


def rescaled_transition(tau, xi, tau2, xi2, n):
    """Scaled transition weight between the floored sites of two scaled
    arguments, the piece of the kernel that becomes a heat kernel in the
    boundary limit.  Returns the value and the realized coordinates."""
    line1, x, tau_hat, xi_hat = rescaled_query(n, tau, xi)
    line2, y, tau2_hat, xi2_hat = rescaled_query(n, tau2, xi2)
    if line1 >= line2:
        raise ValueError("needs strictly increasing scaled times")
    val = (scaling_unit(n) * (_SQRT2 - 1.0) ** (x - y + line2 - line1)
           * phi(line1, line2, x, y, 1.0))
    return val, (tau_hat, xi_hat, tau2_hat, xi2_hat)


def rescaled_kernel(tau, xi, tau2, xi2, n, prm=None):
    """Kernel in boundary coordinates: c_n times the conjugated kernel at
    the floored lattice site of each scaled argument."""
    if prm is None:
        prm = AztecKernelParams(n, 1.0)
    elif prm.n != n:
        raise ValueError("params order %d does not match n=%d" % (prm.n, n))
    line1, x, _t1, _x1 = rescaled_query(n, tau, xi)
    line2, y, _t2, _x2 = rescaled_query(n, tau2, xi2)
    return scaling_unit(n) * conjugated_kernel(
        KernelQuery(line1, x, line2, y), prm)


# ---------------------------------------------------------------------------
# determinants


def correlation(points, prm):
    """Probability of finding particles at every listed (line, position)."""
    pts = [(int(line), int(x)) for line, x in points]
    if len(set(pts)) != len(pts):
        raise ValueError("correlation points must be distinct")
    if not pts:
        return 1.0
    mat = np.array([[kernel(KernelQuery(l1, x1, l2, x2), prm)
                     for l2, x2 in pts] for l1, x1 in pts])
    return float(nm.det_complex(mat).real)


def _gap_sites(n, spec):
    lines = list(spec.lines)
    thresholds = list(spec.thresholds)
    if len(lines) != len(thresholds):
        raise ValueError("lines and thresholds must pair up")
    if any(b <= a for a, b in zip(lines, lines[1:])):
        raise ValueError("lines must be strictly increasing")
    sites = []
    for line, ell in zip(lines, thresholds):
        if not 1 <= line <= 2 * n - 1:
            raise ValueError("line %d outside 1..%d" % (line, 2 * n - 1))
        lo, hi = line_window(n, line)
        if ell < lo:
            raise ValueError("threshold %g below the line-%d floor %d"
                             % (ell, line, lo))
        first = int(math.floor(ell)) + 1
        sites.extend((line, x) for x in range(first, hi + 1))
    return sites


def gap_probability(spec, prm):
    """Probability that every listed line stays at or below its threshold.

    The finite index set runs from just above each threshold to the hard
    ceiling of the top particle, so the determinant is exact.  The matrix
    is always assembled in a balanced frame where entries stay of order
    one: the zig-zag projection form for a single odd line at a = 1, the
    scaling conjugation (determinant-neutral) for several lines at a = 1,
    and the raw kernel otherwise.
    """
    spec = GapSpec(tuple(spec.lines), tuple(spec.thresholds))
    n = prm.n
    sites = _gap_sites(n, spec)
    if not sites:
        return 1.0
    af = float(prm.a)
    single_odd = len(set(line for line, _ in sites)) == 1 and sites[0][0] % 2
    if af == 1.0 and single_odd:
        kprm = kw.KrawtchoukParams.from_tiling_weight(n, af)
        labels = [odd_line_to_zigzag(n, line, x) for line, x in sites]
        mat = np.array([[kw.l_kernel(k1, h1, k2, h2, kprm)
                         for k2, h2 in labels] for k1, h1 in labels])
    elif af == 1.0:
        mat = np.array([[conjugated_kernel(KernelQuery(l1, x1, l2, x2), prm)
                         for l2, x2 in sites] for l1, x1 in sites])
    else:
        mat = np.array([[kernel(KernelQuery(l1, x1, l2, x2), prm)
                         for l2, x2 in sites] for l1, x1 in sites])
    return float(nm.fredholm_det_discrete(-mat).real)


def path_family_weight(config, n, big_n, a):
    """Unnormalized weight of a full particle configuration: the product
    over consecutive lines of single-step transition determinants."""
    arr = np.asarray(config, dtype=np.int64)
    if arr.shape != (big_n, 2 * n + 1):
        raise ValueError("config must have shape (%d, %d)"
                         % (big_n, 2 * n + 1))
    start = 1 - np.arange(1, big_n + 1)
    if not (np.array_equal(arr[:, 0], start)
            and np.array_equal(arr[:, -1], start)):
        raise ValueError("boundary columns must hold 1-k")
    total = 1.0
    for line in range(2 * n):
        step = alpha_step if line % 2 == 0 else beta_step
        mat = np.array([[step(arr[k, line + 1] - arr[j, line], a)
                         for k in range(big_n)] for j in range(big_n)])
        total *= float(nm.det_complex(mat).real)
        if total == 0.0:
            return 0.0
    return total

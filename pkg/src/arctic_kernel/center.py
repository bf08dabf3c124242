"""Local dimer statistics at the middle of a large diamond.

The whole-plane kernel P is a double lattice integral whose inner integral
has two simple poles, the roots of z^2 - 2 sin(theta) z - 1.  Their product
is -1, so exactly one root sits inside the unit circle, switching sides with
the sign of sin(theta); doing that integral by residues leaves one analytic
integrand per half range, and Gauss-Legendre on each half converges
spectrally.  A literal nested-trapezoid evaluation on a singularity-avoiding
midpoint grid stays available as a coarse cross-check, and a half-circle arc
formula covers lattice points with x + y odd and positive.

Green-particle probabilities come in two matched forms: determinants of
R(v) = P(v-1) + iP(v-i) for the infinite plane, and exact rational
determinants of the order-n kernel on the even lines 2l + n + 1 for the
finite diamond.  `limiting_kernel` is the large-order limit of the latter,
an arc integral over the half circle through 1 (through -1, with a sign,
when the line offset is negative, mirroring the contour ordering of the
finite kernel).

A particle sits at site (u, l), the black cell (u, -u + 2l), exactly when
the covering domino's partner cell lies east or north; `green_particle`
and `green_particle_grid` read that off sampled tilings for Monte Carlo
cross-checks.
"""

import functools
import math
from fractions import Fraction

import numpy as np

from . import numerics as nm
from .extended_kernel import kernel_exact
from .tiling import cell_in_diamond, grid_offset, line_window

__all__ = [
    "P_TABLE_RADIUS", "p_kernel_double", "p_kernel_arc", "r_kernel",
    "green_prob_plane", "green_prob_aztec", "limiting_kernel",
    "limiting_kernel_from_p", "green_particle", "green_particle_grid",
]

P_TABLE_RADIUS = 64

_TABLE_NODES = 384
_ARC_START = 64
_ARC_CAP = 1 << 22


def _lattice_point(v):
    v = complex(v)
    x, y = round(v.real), round(v.imag)
    if v != complex(x, y):
        raise ValueError("lattice vector needed, got %r" % (v,))
    return int(x), int(y)


# ---------------------------------------------------------------------------
# the plane kernel P


@functools.lru_cache(maxsize=32)
def _half_rules(nodes):
    """Per-half quadrature data: nodes, weights, inside and outside root."""
    rules = []
    for lo, hi, sgn in ((0.0, math.pi, 1.0), (-math.pi, 0.0, -1.0)):
        th, wt = nm.gauss_legendre_on(lo, hi, nodes)
        s = np.sin(th)
        root = np.sqrt(1.0 + s * s)
        rules.append((th, wt, s - sgn * root, s + sgn * root))
    return tuple(rules)


def _p_quad(x, y, nodes):
    """Residue-reduced value of the double integral at one resolution.

    The inside root is raised to -y for y <= 0 and the outside root for
    y > 0; either way the power has modulus at most one, so the integrand
    never grows with |y|.
    """
    total = 0.0j
    for th, wt, r_in, r_out in _half_rules(nodes):
        base = r_in if y <= 0 else r_out
        total += np.sum(wt * np.exp(1j * x * th) * base ** (-y)
                        / (r_in - r_out))
    return 0.5j / math.pi * complex(total)


def p_kernel_double(v, tol=1e-10):
    """Plane kernel P at the lattice point v = x + iy.

    Evaluated at two resolutions; disagreement beyond tol raises
    ConvergenceError carrying both estimates.
    """
    x, y = _lattice_point(v)
    nodes = 96 + 2 * (abs(x) + abs(y))
    coarse = _p_quad(x, y, nodes)
    fine = _p_quad(x, y, 2 * nodes)
    if abs(fine - coarse) > tol:
        raise nm.ConvergenceError(coarse, fine)
    return fine


def _p_double_trapezoid(v, mesh=256):
    """Literal nested trapezoid on the symmetric midpoint grid.

    The grid offsets by half a step so none of the nodes hits the singular
    lines sin(theta) = 0 or sin(phi) = 0; coarse diagnostic only.
    """
    x, y = _lattice_point(v)
    h = 2.0 * math.pi / mesh
    th = -math.pi + (np.arange(mesh) + 0.5) * h
    t_grid, f_grid = np.meshgrid(th, th, indexing="ij")
    vals = (np.exp(1j * (x * t_grid - y * f_grid))
            / (2j * np.sin(t_grid) + 2.0 * np.sin(f_grid)))
    return complex(np.sum(vals)) * h * h / (4.0 * math.pi ** 2)


def _build_table():
    span = np.arange(-P_TABLE_RADIUS, P_TABLE_RADIUS + 1)
    tab = np.zeros((span.size, span.size), dtype=complex)
    for th, wt, r_in, r_out in _half_rules(_TABLE_NODES):
        osc = np.exp(1j * np.outer(span, th))
        pows = np.where(span[None, :] <= 0,
                        np.power(r_in[:, None], -span[None, :]),
                        np.power(r_out[:, None], -span[None, :]))
        tab += osc @ (pows * (wt / (r_in - r_out))[:, None])
    tab *= 0.5j / math.pi
    tab.setflags(write=False)
    return tab


_P_TABLE = _build_table()


def _p_value(x, y):
    if abs(x) <= P_TABLE_RADIUS and abs(y) <= P_TABLE_RADIUS:
        return complex(_P_TABLE[x + P_TABLE_RADIUS, y + P_TABLE_RADIUS])
    return p_kernel_double(complex(x, y))


# ---------------------------------------------------------------------------
# arc formulas


def _trapezoid_ladder(values, lo, hi, tol):
    """Composite trapezoid under node doubling until two levels agree."""
    prev = None
    count = _ARC_START
    while count <= _ARC_CAP:
        ts = np.linspace(lo, hi, count + 1)
        vals = values(ts)
        step = (hi - lo) / count
        cur = complex(step * (0.5 * (vals[0] + vals[-1]) + vals[1:-1].sum()))
        if prev is not None and abs(cur - prev) <= tol:
            return cur
        prev = cur
        count *= 2
    raise nm.ConvergenceError(prev, cur)


def p_kernel_arc(v, tol=1e-10):
    """P at x + iy with x + y odd and >= 1, via the half-circle arc through 1.

    Closed form at v = 1: the integrand reduces to w/(w+1) and the arc
    antiderivative gives exactly 1/4.
    """
    x, y = _lattice_point(v)
    if x + y < 1 or (x + y) % 2 == 0:
        raise ValueError("arc formula needs x + y odd and >= 1, got "
                         "(%d, %d)" % (x, y))
    half = (x + y - 1) // 2

    def values(ts):
        w = np.exp(1j * ts)
        return (w ** ((x - y + 1) // 2) * (w - 1.0) ** half
                / (w + 1.0) ** (half + 1))

    pref = 1j ** ((x - 1) % 4) / (2.0 * math.pi)
    return pref * _trapezoid_ladder(values, -0.5 * math.pi, 0.5 * math.pi, tol)


def limiting_kernel(u_j, l_j, u_k, l_k, tol=1e-10):
    """Large-order limit of the finite kernel between two green sites.

    For l_j >= l_k this is the arc integral over the right half circle;
    for l_j < l_k the contour ordering of the finite kernel flips, and the
    limit becomes minus the integral over the left half circle, where the
    inverted power is the analytic one.
    """
    du = int(u_j) - int(u_k)
    dl = int(l_j) - int(l_k)
    if dl >= 0:
        lo, hi, sign = -0.5 * math.pi, 0.5 * math.pi, 1.0
    else:
        lo, hi, sign = 0.5 * math.pi, 1.5 * math.pi, -1.0

    def values(ts):
        w = np.exp(1j * ts)
        if dl >= 0:
            fac = ((1.0 - w) / (w * (1.0 + w))) ** dl
        else:
            fac = (w * (1.0 + w) / (1.0 - w)) ** (-dl)
        return w ** du * fac

    return sign / (2.0 * math.pi) * _trapezoid_ladder(values, lo, hi, tol)


def limiting_kernel_from_p(u_j, l_j, u_k, l_k):
    """The same limit assembled from two plane-kernel values.

    Substituting the arc parameter into the half-circle form of P turns
    the limiting integrand into R(du + i(-du + 2 dl)) times the
    quarter-turn phase i ** (2 dl - du).  The phase telescopes across any
    determinant, so probabilities are insensitive to the sign of its
    exponent; entrywise only this sign matches the arc integral (the
    opposite one agrees at even du and flips at odd du).
    """
    du = int(u_j) - int(u_k)
    dl = int(l_j) - int(l_k)
    return 1j ** ((2 * dl - du) % 4) * r_kernel(complex(du, -du + 2 * dl))


# ---------------------------------------------------------------------------
# green-particle determinants


def r_kernel(v):
    """R(v) = P(v - 1) + iP(v - i), table-backed for small arguments."""
    x, y = _lattice_point(v)
    return _p_value(x - 1, y) + 1j * _p_value(x, y - 1)


def _parse_sites(sites):
    out = []
    for site in sites:
        u, l = site
        ui, li = int(u), int(l)
        if ui != u or li != l:
            raise ValueError("green sites take integer (u, l) pairs")
        out.append((ui, li))
    if len(set(out)) != len(out):
        raise ValueError("green sites must be distinct")
    return out


def _r_matrix(sites):
    m = len(sites)
    mat = np.empty((m, m), dtype=complex)
    for j, (uj, lj) in enumerate(sites):
        for k, (uk, lk) in enumerate(sites):
            mat[j, k] = r_kernel(complex(uj - uk, uk - uj + 2 * (lj - lk)))
    return mat


def green_prob_plane(sites):
    """Whole-plane probability of green particles at every listed site.

    The R determinant picks up a sign from the edge-weight bookkeeping
    (a single site gives exactly -1/2), so the probability is its modulus;
    the finite-diamond determinants pin that convention.
    """
    sites = _parse_sites(sites)
    if not sites:
        return 1.0
    return float(abs(nm.det_complex(_r_matrix(sites))))


def _det_exact(rows):
    """Fraction determinant by elimination; exact at any size in play."""
    m = len(rows)
    mat = [list(row) for row in rows]
    det = Fraction(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if mat[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, m):
            factor = mat[r][col] * inv
            if factor == 0:
                continue
            for c in range(col, m):
                mat[r][c] -= factor * mat[col][c]
    return det


def _site_coords(sites, n):
    coords = []
    for u, l in sites:
        line = 2 * l + n + 1
        pos = 2 * l - u + 1
        if (not cell_in_diamond(u, -u + 2 * l, n)
                or not 1 <= line <= 2 * n - 1):
            raise ValueError("site (%d, %d) falls outside the reachable "
                             "part of the order-%d diamond" % (u, l, n))
        lo, hi = line_window(n, line)
        if not lo <= pos <= hi:
            raise ValueError("site (%d, %d) maps outside the live window "
                             "of line %d" % (u, l, line))
        coords.append((line, pos))
    return coords


def green_prob_aztec(sites, n, a=1):
    """Probability of green particles at the listed sites in the order-n
    diamond, as an exact rational determinant converted to float at the end.

    Site (u, l) maps to position 2l - u + 1 on the even line 2l + n + 1.
    Needs odd n so the coloring puts the black cells where the sites are.
    """
    sites = _parse_sites(sites)
    if n < 1 or n % 2 == 0:
        raise ValueError("center statistics need an odd diamond order, "
                         "got %d" % n)
    coords = _site_coords(sites, n)
    if not coords:
        return 1.0
    weight = Fraction(a)
    rows = [[kernel_exact(n, lj, xj, lk, xk, weight) for lk, xk in coords]
            for lj, xj in coords]
    return float(_det_exact(rows))


# ---------------------------------------------------------------------------
# reading green particles off tilings


def green_particle(t, u, l):
    """Whether tiling t has a green particle at site (u, l)."""
    cell = (int(u), -int(u) + 2 * int(l))
    try:
        d = t.domino_at(cell[0], cell[1])
    except KeyError:
        raise ValueError("site (%d, %d) lies outside the order-%d diamond"
                         % (u, l, t.n)) from None
    return (d.x, d.y) == cell


def green_particle_grid(grid, n, u, l):
    """Same reading from an int8 anchor grid, without building a Tiling."""
    m, c = int(u), -int(u) + 2 * int(l)
    if not cell_in_diamond(m, c, n):
        raise ValueError("site (%d, %d) lies outside the order-%d diamond"
                         % (u, l, n))
    off = grid_offset(n)
    return bool(grid[m + off, c + off])

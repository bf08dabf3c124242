"""Airy function, the two-time Airy kernel, and gap determinants built on it.

The Airy function itself is evaluated from scratch: a pair of Maclaurin
series in extended precision on |x| <= 8 and the standard asymptotic
expansions outside, glued at the point where their error curves cross.
Everything downstream is quadrature: the two-time kernel is a Laplace-type
integral over a half line, and the process marginals are Nystrom
determinants of the symmetrized operator on a block grid, one block per
time.
"""

import math
from collections import namedtuple

import numpy as np

from . import numerics as nm

__all__ = [
    "AiryQuery", "FddSpec", "airy_ai", "airy_ai_prime",
    "extended_airy_kernel", "airy_fdd", "tracy_widom_f2",
]


AiryQuery = namedtuple("AiryQuery", ["tau1", "xi1", "tau2", "xi2"])

FddSpec = namedtuple("FddSpec", ["times", "levels", "m_hi", "nodes"])
FddSpec.__new__.__defaults__ = (12.0, 64)

# Values at the origin, from 3^(-2/3)/Gamma(2/3) and -3^(-1/3)/Gamma(1/3).
# Written as strings so the parse keeps extended precision; a float literal
# here would cap the series accuracy near the crossover at ~1e-10.
_AI0 = np.longdouble("0.355028053887817239260063186004")
_AIP0 = np.longdouble("-0.258819403792806798405183560189")

_SERIES_CUT = 8.0
_PUBLIC_RANGE = 30.0

_SQRT_PI = math.sqrt(math.pi)


def _asym_coeffs(count):
    """Coefficient tables for the large-|x| expansions.

    u[0] = 1, u[k] = u[k-1] (6k-1)(6k-5) / (72k); v[k] = u[k] (6k+1)/(1-6k).
    """
    u = [1.0]
    v = [1.0]
    for k in range(1, count):
        uk = u[-1] * (6.0 * k - 1.0) * (6.0 * k - 5.0) / (72.0 * k)
        u.append(uk)
        v.append(uk * (6.0 * k + 1.0) / (1.0 - 6.0 * k))
    return np.array(u), np.array(v)


_ASYM_U, _ASYM_V = _asym_coeffs(41)


def _series_pair(x):
    """Ai and Ai' on a small-argument array via the two Maclaurin series.

    Runs in extended precision because the two series cancel: at |x| = 8
    the partial sums reach ~2e6 while Ai(8) is 5e-8, which burns thirteen
    digits.  The extra bits of longdouble keep the absolute error near
    1e-13 at the crossover.
    """
    x = np.asarray(x, dtype=np.longdouble)
    x3 = x * x * x
    f = np.ones_like(x)          # series with f(0) = 1, f'(0) = 0
    g = x.copy()                 # series with g(0) = 0, g'(0) = 1
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    tf = np.ones_like(x)
    tg = x.copy()
    tfp = 0.5 * x * x
    tgp = np.ones_like(x)
    for k in range(1, 130):
        tf = tf * x3 / (3.0 * k * (3.0 * k - 1.0))
        tg = tg * x3 / (3.0 * k * (3.0 * k + 1.0))
        tgp = tgp * x3 / (3.0 * k * (3.0 * k - 2.0))
        if k >= 2:
            tfp = tfp * x3 / (3.0 * (k - 1.0) * (3.0 * k - 1.0))
        f += tf
        g += tg
        fp += tfp
        gp += tgp
        if max(np.max(np.abs(tf)), np.max(np.abs(tg))) < 1e-28:
            break
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return ai.astype(float), aip.astype(float)


def _alt_sum(coeffs, zeta, start, step):
    """sum of (-1)^k coeffs[start + step*k] zeta^(-(start + step*k)).

    The expansion is divergent, so each element stops adding the moment its
    terms stop shrinking; with |zeta| >= 12 the smallest term is far below
    float precision and the truncation error is negligible.
    """
    total = np.zeros_like(zeta)
    prev = np.full_like(zeta, np.inf)
    live = np.ones(zeta.shape, dtype=bool)
    sign = 1.0
    for idx in range(start, len(coeffs), step):
        term = sign * coeffs[idx] * zeta ** (-float(idx))
        mag = np.abs(term)
        live = live & (mag < prev)
        total = np.where(live, total + term, total)
        prev = mag
        sign = -sign
        if not live.any():
            break
    return total


def _asym_pair(x):
    """Ai and Ai' on a large-argument array via the asymptotic expansions."""
    x = np.asarray(x, dtype=float)
    ai = np.empty_like(x)
    aip = np.empty_like(x)

    pos = x > 0
    if pos.any():
        z = x[pos]
        zeta = (2.0 / 3.0) * z ** 1.5
        root = z ** 0.25
        damp = np.exp(-zeta)
        su = _alt_sum(_ASYM_U, zeta, 0, 1)
        sv = _alt_sum(_ASYM_V, zeta, 0, 1)
        ai[pos] = 0.5 / _SQRT_PI / root * damp * su
        aip[pos] = -0.5 / _SQRT_PI * root * damp * sv
    if (~pos).any():
        z = -x[~pos]
        zeta = (2.0 / 3.0) * z ** 1.5
        root = z ** 0.25
        ce = _alt_sum(_ASYM_U, zeta, 0, 2)
        co = _alt_sum(_ASYM_U, zeta, 1, 2)
        de = _alt_sum(_ASYM_V, zeta, 0, 2)
        do = _alt_sum(_ASYM_V, zeta, 1, 2)
        s = np.sin(zeta + 0.25 * math.pi)
        c = np.cos(zeta + 0.25 * math.pi)
        ai[~pos] = (s * ce - c * co) / _SQRT_PI / root
        aip[~pos] = -(c * de + s * do) * root / _SQRT_PI
    return ai, aip


def _ai_pair(x):
    """Ai and Ai' on an arbitrary float array, no range check.

    Valid until the positive tail underflows around x = 105; the negative
    side only gets more accurate as the argument grows.  Public callers go
    through airy_ai / airy_ai_prime, which enforce the advertised range.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    small = np.abs(flat) <= _SERIES_CUT
    if small.any():
        ai[small], aip[small] = _series_pair(flat[small])
    if (~small).any():
        ai[~small], aip[~small] = _asym_pair(flat[~small])
    return ai.reshape(x.shape), aip.reshape(x.shape)


def airy_ai(x):
    """The Airy function Ai at a real point, |x| <= 30."""
    x = float(x)
    if abs(x) > _PUBLIC_RANGE:
        raise ValueError("argument %g outside the supported range |x| <= %g"
                         % (x, _PUBLIC_RANGE))
    return float(_ai_pair(np.array([x]))[0][0])


def airy_ai_prime(x):
    """Derivative of the Airy function at a real point, |x| <= 30."""
    x = float(x)
    if abs(x) > _PUBLIC_RANGE:
        raise ValueError("argument %g outside the supported range |x| <= %g"
                         % (x, _PUBLIC_RANGE))
    return float(_ai_pair(np.array([x]))[1][0])


# ---------------------------------------------------------------------------
# two-time kernel


def _equal_time_point(x1, x2):
    """Equal-time kernel value through the first-order identity.

    The half-line integral of Ai(x1+l) Ai(x2+l) collapses to
    (Ai Ai' - Ai' Ai) / (x1 - x2), with the confluent limit
    Ai'(x)^2 - x Ai(x)^2 on the diagonal.  Near-coincident arguments are
    routed through the midpoint limit: at separation h the ratio form
    carries ~2e-18/h of rounding noise while the midpoint form is biased
    ~h^2/20, so the switch sits near 3e-6 where the two error curves cross.
    """
    if abs(x1 - x2) < 3e-6:
        m = 0.5 * (x1 + x2)
        ai, aip = _ai_pair(np.array([m]))
        return float(aip[0] ** 2 - m * ai[0] ** 2)
    ai, aip = _ai_pair(np.array([x1, x2]))
    return float((ai[0] * aip[1] - aip[0] * ai[1]) / (x1 - x2))


def _pos_tail_cut(x1, x2):
    """Upper limit for the decaying-side integral over Ai(x+l) Ai(y+l)."""
    return 12.0 + max(0.0, -x1, -x2)


def _osc_nodes(base, depth):
    """Node budget: a floor plus ten nodes per oscillation period.

    depth bounds how far the Airy arguments reach into the oscillatory
    region, where the local frequency is sqrt(|arg|); the accumulated phase
    over that stretch is (4/3) depth^(3/2).
    """
    phase = (4.0 / 3.0) * max(depth, 0.0) ** 1.5
    return int(base + 10 * math.ceil(phase / (2.0 * math.pi)))


def _pos_lambda_value(s, x1, x2, npts):
    """integral over [0, inf) of exp(-l s) Ai(x1+l) Ai(x2+l), s >= 0."""
    cut = _pos_tail_cut(x1, x2)
    lam, w = nm.gauss_legendre_on(0.0, cut, npts)
    a1 = _ai_pair(x1 + lam)[0]
    a2 = _ai_pair(x2 + lam)[0]
    return float(np.dot(w, np.exp(-lam * s) * a1 * a2))


def _neg_lambda_value(d, x1, x2, npts):
    """minus the integral over (-inf, 0] of exp(l d) Ai(x1+l) Ai(x2+l), d > 0.

    Substituting l = -m makes it -int_0^inf exp(-m d) Ai(x1-m) Ai(x2-m) dm.
    The Airy factors only oscillate there, so all decay comes from the
    exponential; the cut is set so exp(-d cut) is below 4e-18.  Only used
    for separations d >= 0.4, where the cut stays at or below 100; smaller
    separations go through the full-line subtraction instead.
    """
    cut = 40.0 / d
    mu, w = nm.gauss_legendre_on(0.0, cut, npts)
    a1 = _ai_pair(x1 - mu)[0]
    a2 = _ai_pair(x2 - mu)[0]
    return -float(np.dot(w, np.exp(-mu * d) * a1 * a2))


def _drift_gaussian(d, x1, x2):
    """Closed form of the full-line integral of exp(l d) Ai(x1+l) Ai(x2+l).

    A Gaussian in x1 - x2 with a drift and a d^3/12 growth factor; it is
    the continuum shadow of the discrete multi-step transition weight.
    """
    expo = -(x1 - x2) ** 2 / (4.0 * d) - 0.5 * d * (x1 + x2) + d ** 3 / 12.0
    return math.exp(expo) / math.sqrt(4.0 * math.pi * d)


_NEG_DIRECT_MIN = 0.4


def _neg_identity_value(d, x1, x2, npts):
    """Small-separation form of the oscillatory branch.

    For d below 0.4 the direct cut would have to grow like 40/d and the
    node count like its 3/2 power, so instead subtract the closed-form
    full-line integral from the decaying-side one: both terms stay order
    one and the quadrature runs over [0, cut] where the Airy product
    crushes the mild exp(l d) growth.
    """
    return _pos_lambda_value(-d, x1, x2, npts) - _drift_gaussian(d, x1, x2)


def _escalate(evaluate, base, tol):
    """Accept the quadrature once two node ladders agree, else escalate.

    Tries base and 2x base, then 4x as a last chance; failure raises with
    the last two distinct estimates attached.
    """
    estimates = [evaluate(base), evaluate(2 * base)]
    while abs(estimates[-1] - estimates[-2]) > max(tol,
                                                   1e-12 * abs(estimates[-1])):
        if len(estimates) == 3:
            raise nm.ConvergenceError(estimates[-2], estimates[-1])
        estimates.append(evaluate(4 * base))
    return estimates[-1]


def extended_airy_kernel(q, tol=None):
    """Two-time Airy kernel A(tau1, xi1; tau2, xi2).

    For tau1 >= tau2 this is the half-line integral over [0, inf) of
    exp(-l (tau1-tau2)) Ai(xi1+l) Ai(xi2+l); for tau1 < tau2 it is minus
    the companion integral over (-inf, 0].  Equal times collapse to the
    first-order identity and need no quadrature.  The oscillatory branch
    carries a wider default tolerance (1e-8 instead of 1e-9) because its
    integrand decays only through the exponential factor; below separation
    0.4 it switches to the full-line subtraction so the cut never has to
    chase a weak exponential.
    """
    q = AiryQuery(*q)
    t1, x1, t2, x2 = (float(v) for v in q)
    if t1 == t2:
        return _equal_time_point(x1, x2)
    if t1 > t2:
        s = t1 - t2
        depth = max(0.0, -x1, -x2)
        base = _osc_nodes(96, depth)
        return _escalate(lambda n: _pos_lambda_value(s, x1, x2, n),
                         base, 1e-9 if tol is None else tol)
    d = t2 - t1
    if d < _NEG_DIRECT_MIN:
        depth = max(0.0, -x1, -x2)
        base = _osc_nodes(96, depth)
        return _escalate(lambda n: _neg_identity_value(d, x1, x2, n),
                         base, 1e-8 if tol is None else tol)
    depth = 40.0 / d + max(0.0, -x1, -x2)
    base = _osc_nodes(128, depth)
    return _escalate(lambda n: _neg_lambda_value(d, x1, x2, n),
                     base, 1e-8 if tol is None else tol)


# ---------------------------------------------------------------------------
# block Nystrom determinants


def _cd_matrix(xs, ys):
    """Equal-time kernel on a grid pair, elementwise-safe near the diagonal."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ai_x, aip_x = _ai_pair(xs)
    ai_y, aip_y = _ai_pair(ys)
    diff = xs[:, None] - ys[None, :]
    near = np.abs(diff) < 3e-6
    num = ai_x[:, None] * aip_y[None, :] - aip_x[:, None] * ai_y[None, :]
    out = num / np.where(near, 1.0, diff)
    if near.any():
        mid = 0.5 * (xs[:, None] + ys[None, :])
        ai_m, aip_m = _ai_pair(mid)
        out = np.where(near, aip_m ** 2 - mid * ai_m ** 2, out)
    return out


def _pos_block(xs, ys, s, npts):
    """Kernel block for a decaying time separation s > 0, shared l-grid."""
    cut = _pos_tail_cut(float(np.min(xs)), float(np.min(ys)))
    lam, w = nm.gauss_legendre_on(0.0, cut, npts)
    u = _ai_pair(xs[:, None] + lam[None, :])[0]
    v = _ai_pair(ys[:, None] + lam[None, :])[0]
    return (u * (w * np.exp(-lam * s))[None, :]) @ v.T


def _neg_block(xs, ys, d, npts):
    """Kernel block for the oscillatory branch, time separation d > 0."""
    if d < _NEG_DIRECT_MIN:
        cut = _pos_tail_cut(float(np.min(xs)), float(np.min(ys)))
        lam, w = nm.gauss_legendre_on(0.0, cut, npts)
        u = _ai_pair(xs[:, None] + lam[None, :])[0]
        v = _ai_pair(ys[:, None] + lam[None, :])[0]
        grow = (u * (w * np.exp(lam * d))[None, :]) @ v.T
        gauss = np.array([[_drift_gaussian(d, float(x), float(y))
                           for y in ys] for x in xs])
        return grow - gauss
    cut = 40.0 / d
    mu, w = nm.gauss_legendre_on(0.0, cut, npts)
    u = _ai_pair(xs[:, None] - mu[None, :])[0]
    v = _ai_pair(ys[:, None] - mu[None, :])[0]
    return -(u * (w * np.exp(-mu * d))[None, :]) @ v.T


def _merge_constraints(times, levels):
    """Collapse repeated times; simultaneous constraints keep the lowest level."""
    merged_t = []
    merged_l = []
    for t, l in zip(times, levels):
        if merged_t and t == merged_t[-1]:
            merged_l[-1] = min(merged_l[-1], l)
        else:
            merged_t.append(t)
            merged_l.append(l)
    return merged_t, merged_l


def _fdd_det(times, levels, m_hi, nodes):
    """One full Nystrom determinant at a fixed grid resolution."""
    grids = [nm.gauss_legendre_on(level, m_hi, nodes) for level in levels]
    m = len(times)
    deepest = min(levels)
    blocks = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            xs, wx = grids[i]
            ys, wy = grids[j]
            if i == j:
                block = _cd_matrix(xs, ys)
            elif times[i] > times[j]:
                s = times[i] - times[j]
                npts = _osc_nodes(128, max(0.0, -deepest))
                block = _pos_block(xs, ys, s, npts)
            else:
                d = times[j] - times[i]
                if d < _NEG_DIRECT_MIN:
                    npts = _osc_nodes(192, max(0.0, -deepest))
                else:
                    npts = _osc_nodes(192, 40.0 / d + max(0.0, -deepest))
                block = _neg_block(xs, ys, d, npts)
            blocks[i][j] = block * np.sqrt(wx)[:, None] * np.sqrt(wy)[None, :]
    full = np.block(blocks)
    return float(nm.fredholm_det_discrete(-full).real)


def airy_fdd(spec):
    """Probability that the limit process stays below each level at each time.

    det(I - f^(1/2) A f^(1/2)) over the direct sum of one interval
    [level_j, m_hi] per time, discretized with Gauss-Legendre and
    symmetrized weights.  The value is accepted only if a refined grid
    (more nodes per interval, higher truncation point, denser l-grids)
    agrees to 1e-7; otherwise a convergence error carries both values.

    Repeated times are allowed and collapse to a single constraint at the
    lower level; strictly decreasing times are rejected.
    """
    spec = FddSpec(*spec)
    times = [float(t) for t in spec.times]
    levels = [float(l) for l in spec.levels]
    if len(times) == 0 or len(times) != len(levels):
        raise ValueError("need matching, nonempty times and levels")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be nondecreasing")
    m_hi = float(spec.m_hi)
    if not m_hi > max(levels):
        raise ValueError("truncation point %g is not above every level" % m_hi)
    nodes = int(spec.nodes)
    if nodes < 8:
        raise ValueError("need at least 8 nodes per interval")
    times, levels = _merge_constraints(times, levels)

    coarse = _fdd_det(times, levels, m_hi, nodes)
    fine = _fdd_det(times, levels, m_hi + 3.0, nodes + 32)
    if abs(fine - coarse) > 1e-7:
        raise nm.ConvergenceError(coarse, fine)
    if not -1e-6 <= fine <= 1.0 + 1e-6:
        raise nm.ConvergenceError(coarse, fine)
    return fine


def tracy_widom_f2(xi, m_hi=12.0, nodes=64):
    """Distribution function of the one-time marginal of the limit process."""
    xi = float(xi)
    if not -_PUBLIC_RANGE <= xi <= m_hi - 2.0:
        raise ValueError("level %g outside the supported range" % xi)
    return airy_fdd(FddSpec((0.0,), (xi,), m_hi, nodes))

"""Complex contour quadrature and determinant helpers shared by the kernel modules.

All contour integrals here carry the 1/(2*pi*i) normalization.  Circles are
traversed counterclockwise and discretized with the periodic trapezoid rule,
which is spectrally accurate for integrands analytic in an annulus around the
contour.  Vertical lines are traversed upward, compactified by
z = abscissa + i*tan(u) and integrated with Gauss-Legendre in u.
"""

from collections import namedtuple

import numpy as np


class ConvergenceError(RuntimeError):
    """Quadrature failed its refinement check; carries both estimates."""

    def __init__(self, coarse, fine):
        super().__init__("quadrature estimates %r / %r disagree"
                         % (coarse, fine))
        self.coarse = coarse
        self.fine = fine


_gl_cache = {}


def gauss_legendre(npts):
    """Gauss-Legendre nodes and weights on [-1, 1], cached across calls."""
    npts = int(npts)
    if npts < 1:
        raise ValueError("node count must be positive")
    if npts not in _gl_cache:
        _gl_cache[npts] = np.polynomial.legendre.leggauss(npts)
    return _gl_cache[npts]


def gauss_legendre_on(lo, hi, npts):
    """Nodes and weights transported to the interval [lo, hi]."""
    x, w = gauss_legendre(npts)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


class ContourSpec:
    """A quadrature contour: either a circle or a vertical line.

    Circles need an even node count so the rule stays symmetric under
    z -> conjugate; everything needs at least 8 nodes to be worth calling.
    """

    def __init__(self, kind, nodes, center=0j, radius=1.0, abscissa=0.0):
        nodes = int(nodes)
        if nodes < 8:
            raise ValueError("need at least 8 quadrature nodes, got %d" % nodes)
        if kind == "circle":
            if nodes % 2 != 0:
                raise ValueError("circle rule wants an even node count")
            if not radius > 0.0:
                raise ValueError("circle radius must be positive")
        elif kind != "vline":
            raise ValueError("unknown contour kind %r" % (kind,))
        self.kind = kind
        self.nodes = nodes
        self.center = complex(center)
        self.radius = float(radius)
        self.abscissa = float(abscissa)

    @classmethod
    def circle(cls, center, radius, nodes=64):
        return cls("circle", nodes, center=center, radius=radius)

    @classmethod
    def vline(cls, abscissa, nodes=128):
        return cls("vline", nodes, abscissa=abscissa)

    def with_nodes(self, nodes):
        return ContourSpec(self.kind, nodes, center=self.center,
                           radius=self.radius, abscissa=self.abscissa)

    def rule(self):
        """Points z_k and weights c_k so (1/2 pi i) int f dz ~ sum c_k f(z_k)."""
        if self.kind == "circle":
            th = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
            z = self.center + self.radius * np.exp(1j * th)
            w = (z - self.center) / self.nodes
        else:
            u, wu = gauss_legendre(self.nodes)
            u = 0.5 * np.pi * u
            t = np.tan(u)
            z = self.abscissa + 1j * t
            # dz = i sec^2(u) du; the i cancels against 1/(2 pi i),
            # leaving (pi/2) * sec^2(u) / (2 pi) = (1 + t^2) / 4
            w = 0.25 * wu * (1.0 + t * t)
        return z, w


def integrate_contour(f, contour):
    """(1/2 pi i) times the integral of f along the contour.

    f must accept a complex ndarray and evaluate elementwise.
    """
    z, w = contour.rule()
    return complex(np.sum(w * f(z)))


def det_complex(m):
    """Determinant with the empty-matrix convention det of nothing = 1.

    Dimensions above 64 go through slogdet so the raw pivot product cannot
    overflow; below that plain det is both faster and exact enough.
    """
    m = np.asarray(m)
    if m.size == 0:
        return 1.0
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix is not square: shape %s" % (m.shape,))
    if m.shape[0] <= 64:
        return np.linalg.det(m)
    sign, logabs = np.linalg.slogdet(m)
    return sign * np.exp(logabs)


def fredholm_det_discrete(m):
    """det(I + M) for a discretized integral operator M."""
    m = np.asarray(m)
    if m.size == 0:
        return 1.0
    return det_complex(np.eye(m.shape[0]) + m)


RichardsonResult = namedtuple("RichardsonResult", ["value", "error", "history"])


def richardson_check(evaluate, node_counts):
    """Evaluate at a strictly increasing ladder of node counts.

    Returns the finest value, |finest - previous| as the error estimate, and
    the whole history for diagnostics.
    """
    counts = [int(c) for c in node_counts]
    if len(counts) < 2:
        raise ValueError("need at least two node counts")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("node counts must be strictly increasing")
    hist = [evaluate(c) for c in counts]
    return RichardsonResult(hist[-1], abs(hist[-1] - hist[-2]), hist)

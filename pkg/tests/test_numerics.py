import numpy as np
import pytest

from arctic_kernel.numerics import (ContourSpec, det_complex,
                                    fredholm_det_discrete, gauss_legendre,
                                    gauss_legendre_on, integrate_contour,
                                    richardson_check)


def test_gauss_legendre_basics():
    x, w = gauss_legendre(20)
    assert abs(w.sum() - 2.0) < 1e-14
    assert abs(np.sum(w * x ** 2) - 2.0 / 3.0) < 1e-14
    x, w = gauss_legendre_on(0.0, np.pi, 40)
    assert abs(np.sum(w * np.sin(x)) - 2.0) < 1e-13


def test_contour_validation():
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, 1.0, nodes=6)
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, 1.0, nodes=33)
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, -1.0, nodes=32)
    with pytest.raises(ValueError):
        ContourSpec("banana", 32)


@pytest.mark.parametrize("k", range(-7, 8))
def test_circle_power_moments(k):
    # (1/2 pi i) int z^(k-1) dz = delta_{k,0}, exact up to aliasing at |k| = N
    spec = ContourSpec.circle(0.0, 1.3, nodes=16)
    val = integrate_contour(lambda z: z ** (k - 1), spec)
    assert abs(val - (1.0 if k == 0 else 0.0)) < 1e-12


def test_circle_shifted_center():
    spec = ContourSpec.circle(2.0 - 1.0j, 0.5, nodes=32)
    val = integrate_contour(lambda z: 1.0 / (z - (2.0 - 1.0j)), spec)
    assert abs(val - 1.0) < 1e-13
    # pole outside the circle contributes nothing
    val = integrate_contour(lambda z: 1.0 / (z - 5.0), spec)
    assert abs(val) < 1e-13


def test_vline_rational():
    # poles at 1 and -2; closing right of Re z = 0 picks up -residue at 1
    spec = ContourSpec.vline(0.0, nodes=256)
    val = integrate_contour(lambda z: 1.0 / ((z - 1.0) * (z + 2.0)), spec)
    assert abs(val - (-1.0 / 3.0)) < 1e-9
    # double pole left of the line: closing right gives zero
    val = integrate_contour(lambda z: (z + 1.0) ** -2.0, spec)
    assert abs(val) < 1e-9


def test_det_empty_and_cofactor():
    assert det_complex(np.zeros((0, 0))) == 1.0

    rng = np.random.default_rng(7)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))

    def cof(a):
        if a.shape[0] == 1:
            return a[0, 0]
        tot = 0.0
        for j in range(a.shape[0]):
            minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
            tot += (-1.0) ** j * a[0, j] * cof(minor)
        return tot

    assert abs(det_complex(m) - cof(m)) < 1e-10


def test_det_large_matches_small_path():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((80, 80)) + 1j * rng.standard_normal((80, 80))
    q, _ = np.linalg.qr(a)
    m = np.eye(80) + 0.1 * q
    direct = np.linalg.det(m)
    assert abs(det_complex(m) - direct) / abs(direct) < 1e-10


def test_fredholm_rank_one():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(12)
    v = rng.standard_normal(12)
    got = fredholm_det_discrete(np.outer(u, v))
    assert abs(got - (1.0 + v @ u)) < 1e-12
    assert fredholm_det_discrete(np.zeros((0, 0))) == 1.0


def test_richardson_doubling():
    spec = ContourSpec.circle(0.0, 1.0, nodes=8)

    # (1/2 pi i) int e^z / z dz = 1
    def at(nodes):
        return integrate_contour(lambda z: np.exp(z) / z,
                                 spec.with_nodes(nodes))

    rep = richardson_check(at, [16, 32, 64])
    assert abs(rep.value - 1.0) < 1e-13
    assert rep.error < 1e-12
    assert len(rep.history) == 3

    with pytest.raises(ValueError):
        richardson_check(at, [16])
    with pytest.raises(ValueError):
        richardson_check(at, [32, 16])

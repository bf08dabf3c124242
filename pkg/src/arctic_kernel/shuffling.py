"""Exact sampling of tilings by the biased growth shuffle.

A sample of order n is grown from the empty order-0 diamond through n
rounds of annihilate/slide/fill.  Each 2x2 creation block turns vertical
with probability a^2/(1+a^2), which realizes the measure proportional to
a^(vertical count).

Randomness is counter-based: sample index i under seed s always uses the
Philox stream keyed by s with block counter i, so chunked or out-of-order
generation reproduces the same tilings.

The compiled backend `_shuffle_core` is preferred when the extension built;
set ARCTIC_KERNEL_PURE=1 to force the numpy fallback.  Both consume the
per-round uniforms in the same order and yield byte-identical grids.
"""

import os

import numpy as np
from numpy.random import Generator, Philox

from . import _shuffle_py
from .tiling import Tiling, tiling_from_grid

try:
    from . import _shuffle_core
except ImportError:
    _shuffle_core = None


def backend_name():
    if os.environ.get("ARCTIC_KERNEL_PURE"):
        return "pure"
    return "cython" if _shuffle_core is not None else "pure"


def _impl(name=None):
    if name is None or name == "auto":
        name = backend_name()
    if name == "cython":
        if _shuffle_core is None:
            raise RuntimeError("compiled shuffle backend is not available")
        return _shuffle_core
    if name == "pure":
        return _shuffle_py
    raise ValueError("unknown backend %r" % (name,))


def sample_rng(seed, index):
    """The dedicated RNG of sample `index` under `seed`."""
    return Generator(Philox(key=int(seed) & (2 ** 128 - 1),
                            counter=[0, 0, 0, int(index)]))


def grow_grid(n, a, rng, backend=None):
    """Run the n growth rounds with the given RNG; returns the final grid."""
    if n < 1:
        raise ValueError("diamond order must be at least 1")
    if not a > 0.0:
        raise ValueError("the vertical bias a must be positive")
    impl = _impl(backend)
    vfrac = a * a / (1.0 + a * a)
    g = np.zeros((2, 2), dtype=np.int8)
    for k in range(n):
        g, nsurv = impl.slide(g, k)
        area = 2 * (k + 1) * (k + 2)
        nblocks = (area - 2 * nsurv) // 4
        impl.fill(g, k + 1, rng.random(nblocks), vfrac)
    return g


def sample_grid(n, a=1.0, seed=0, index=0, backend=None):
    return grow_grid(n, a, sample_rng(seed, index), backend=backend)


def sample_grids(n, a=1.0, samples=1, seed=0, start=0, backend=None):
    """Yield `samples` independent grids, counter indices start..start+samples-1."""
    for idx in range(start, start + samples):
        yield grow_grid(n, a, sample_rng(seed, idx), backend=backend)


def sample_tiling(n, a=1.0, seed=0, index=0, backend=None):
    return tiling_from_grid(sample_grid(n, a, seed, index, backend), n)


def sample_tilings(n, a=1.0, samples=1, seed=0, start=0, backend=None):
    for g in sample_grids(n, a, samples, seed, start, backend):
        yield tiling_from_grid(g, n)

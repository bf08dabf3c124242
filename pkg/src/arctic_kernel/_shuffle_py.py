"""Pure numpy backend for the growth shuffle.

Both backends implement the same two-phase contract per round:

    slide(src, k)            -> (dst, survivors)
    fill(dst, k1, u, vfrac)  -> None, mutates dst

and must consume the uniform draws in identical (l, m) block-scan order so a
given seed produces byte-identical grids on either backend.
"""

import numpy as np

_mask_cache = {}


def diamond_mask(n):
    """Boolean grid marking the cells of the order-n diamond."""
    if n not in _mask_cache:
        coords = np.arange(2 * n + 2) - (n + 1)
        hw = np.where(coords >= 0, coords + 1, -coords)
        _mask_cache[n] = (hw[:, None] + hw[None, :]) <= n + 1
    return _mask_cache[n]


def slide(src, k):
    """Annihilate colliding pairs and move the survivors one step.

    Returns the order-(k+1) grid holding only the slid survivors, plus the
    survivor count.
    """
    s_old = 2 * k + 2
    dst = np.zeros((s_old + 2, s_old + 2), dtype=np.int8)
    an = src == 1
    as_ = src == 2
    aw = src == 3
    ae = src == 4
    # N at (m,l) facing S at (m,l+1) vanish together, same for E at (m-1,l)
    # facing W at (m,l)
    sn = an.copy()
    sn[:, :-1] &= ~as_[:, 1:]
    ss = as_.copy()
    ss[:, 1:] &= ~an[:, :-1]
    sw = aw.copy()
    sw[1:, :] &= ~ae[:-1, :]
    se = ae.copy()
    se[:-1, :] &= ~aw[1:, :]
    dst[1:s_old + 1, 2:s_old + 2][sn] = 1
    dst[1:s_old + 1, 0:s_old][ss] = 2
    dst[0:s_old, 1:s_old + 1][sw] = 3
    dst[2:s_old + 2, 1:s_old + 1][se] = 4
    nsurv = int(sn.sum()) + int(ss.sum()) + int(sw.sum()) + int(se.sum())
    if int((dst > 0).sum()) != nsurv:
        raise AssertionError("slid anchors collided")
    return dst, nsurv


def fill(dst, k1, uniforms, vfrac):
    """Partition the empty region into 2x2 blocks, scanning cells by (l, m),
    and fill each block vertically with probability vfrac."""
    s = 2 * k1 + 2
    off = k1 + 1
    anch = dst > 0
    horiz = (dst == 1) | (dst == 2)
    vert = (dst == 3) | (dst == 4)
    if horiz[-1, :].any() or vert[:, -1].any():
        raise AssertionError("domino slid out of the grid")
    occ = anch.copy()
    occ[1:, :] |= horiz[:-1, :]
    occ[:, 1:] |= vert[:, :-1]
    if int(occ.sum()) != 2 * int(anch.sum()):
        raise AssertionError("dominoes overlap after the slide")
    mask = diamond_mask(k1)
    if np.any(occ & ~mask):
        raise AssertionError("domino outside the diamond after the slide")
    c = 0
    total = uniforms.shape[0]
    for j, i in np.argwhere((mask & ~occ).T):
        if occ[i, j]:
            continue
        if (i + 1 >= s or j + 1 >= s
                or not (mask[i + 1, j] and mask[i, j + 1]
                        and mask[i + 1, j + 1])
                or occ[i + 1, j] or occ[i, j + 1] or occ[i + 1, j + 1]):
            raise AssertionError("empty region is not 2x2-partitionable "
                                 "at (%d, %d)" % (i - off, j - off))
        if c >= total:
            raise AssertionError("ran out of fill randomness")
        m = i - off
        l = j - off
        if uniforms[c] < vfrac:
            dst[i, j] = 3 if (m + l + 1 + k1) % 2 == 0 else 4
            dst[i + 1, j] = 3 if (m + l + k1) % 2 == 0 else 4
        else:
            dst[i, j] = 1 if (m + l + k1) % 2 == 0 else 2
            dst[i, j + 1] = 1 if (m + l + 1 + k1) % 2 == 0 else 2
        c += 1
        occ[i, j] = occ[i + 1, j] = occ[i, j + 1] = occ[i + 1, j + 1] = True
    if c != total:
        raise AssertionError("fill consumed %d of %d draws" % (c, total))

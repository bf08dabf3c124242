# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the growth shuffle.

Mirrors _shuffle_py exactly: same slide/fill contract, same (l, m) block
scan order, so both backends consume the uniform draws identically.
"""

import numpy as np

cimport numpy as cnp


cdef inline int _hw(int t) nogil:
    return t + 1 if t >= 0 else -t


def slide(cnp.int8_t[:, :] src, int k):
    cdef int s_old = 2 * k + 2
    dst_arr = np.zeros((s_old + 2, s_old + 2), dtype=np.int8)
    cdef cnp.int8_t[:, :] dst = dst_arr
    cdef int i, j, c, nsurv = 0
    for i in range(s_old):
        for j in range(s_old):
            c = src[i, j]
            if c == 0:
                continue
            if c == 1:
                if j + 1 < s_old and src[i, j + 1] == 2:
                    continue
                if dst[i + 1, j + 2] != 0:
                    raise AssertionError("slid anchors collided")
                dst[i + 1, j + 2] = 1
            elif c == 2:
                if j - 1 >= 0 and src[i, j - 1] == 1:
                    continue
                if dst[i + 1, j] != 0:
                    raise AssertionError("slid anchors collided")
                dst[i + 1, j] = 2
            elif c == 3:
                if i - 1 >= 0 and src[i - 1, j] == 4:
                    continue
                if dst[i, j + 1] != 0:
                    raise AssertionError("slid anchors collided")
                dst[i, j + 1] = 3
            else:
                if i + 1 < s_old and src[i + 1, j] == 3:
                    continue
                if dst[i + 2, j + 1] != 0:
                    raise AssertionError("slid anchors collided")
                dst[i + 2, j + 1] = 4
            nsurv += 1
    return dst_arr, nsurv


def fill(cnp.int8_t[:, :] dst, int k1, double[:] uniforms, double vfrac):
    cdef int s = 2 * k1 + 2
    cdef int off = k1 + 1
    cdef int i, j, c, m, l
    cdef Py_ssize_t used = 0, total = uniforms.shape[0]
    occ_arr = np.zeros((s, s), dtype=np.int8)
    cdef cnp.int8_t[:, :] occ = occ_arr
    for i in range(s):
        for j in range(s):
            c = dst[i, j]
            if c == 0:
                continue
            occ[i, j] += 1
            if c <= 2:
                if i + 1 >= s:
                    raise AssertionError("domino slid out of the grid")
                occ[i + 1, j] += 1
            else:
                if j + 1 >= s:
                    raise AssertionError("domino slid out of the grid")
                occ[i, j + 1] += 1
    for i in range(s):
        for j in range(s):
            if occ[i, j] > 1:
                raise AssertionError("dominoes overlap after the slide")
            if occ[i, j] == 1 and _hw(i - off) + _hw(j - off) > k1 + 1:
                raise AssertionError("domino outside the diamond after "
                                     "the slide")
    for j in range(s):
        for i in range(s):
            m = i - off
            l = j - off
            if _hw(m) + _hw(l) > k1 + 1:
                continue
            if occ[i, j] != 0:
                continue
            if (i + 1 >= s or j + 1 >= s
                    or _hw(m + 1) + _hw(l) > k1 + 1
                    or _hw(m) + _hw(l + 1) > k1 + 1
                    or _hw(m + 1) + _hw(l + 1) > k1 + 1
                    or occ[i + 1, j] != 0 or occ[i, j + 1] != 0
                    or occ[i + 1, j + 1] != 0):
                raise AssertionError("empty region is not 2x2-partitionable")
            if used >= total:
                raise AssertionError("ran out of fill randomness")
            if uniforms[used] < vfrac:
                dst[i, j] = 3 if (m + l + 1 + k1) % 2 == 0 else 4
                dst[i + 1, j] = 3 if (m + l + k1) % 2 == 0 else 4
            else:
                dst[i, j] = 1 if (m + l + k1) % 2 == 0 else 2
                dst[i, j + 1] = 1 if (m + l + 1 + k1) % 2 == 0 else 2
            used += 1
            occ[i, j] = occ[i + 1, j] = occ[i, j + 1] = occ[i + 1, j + 1] = 1
    if used != total:
        raise AssertionError("fill consumed %d of %d draws" % (used, total))

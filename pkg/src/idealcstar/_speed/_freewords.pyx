# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled free-group word kernels (hot loops of the workbench).

Packed-code conventions are documented in ``fallback.py``; the two modules
are interchangeable and the test suite checks them against each other.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def free_ball(int num_letters, int radius):
    """Enumerate all freely reduced words of length <= radius (packed codes)."""
    cdef long long base = num_letters + 1
    cdef long long total = 1, level = 1
    cdef int k
    for k in range(radius):
        level = level * (num_letters - 1) if k > 0 else num_letters
        total += level
    cdef cnp.ndarray[cnp.int64_t, ndim=1] codes = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] last = np.empty(total, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offsets = np.empty(radius + 2, dtype=np.int64)
    cdef long long[:] cv = codes
    cdef char[:] lv = last
    cdef long long[:] off = offsets
    cdef long long write = 1, lo, hi, i
    cdef int g
    cv[0] = 0
    lv[0] = -1
    off[0] = 0
    off[1] = 1
    lo = 0
    hi = 1
    for k in range(radius):
        for i in range(lo, hi):
            for g in range(num_letters):
                if lv[i] != (g ^ 1):
                    cv[write] = cv[i] * base + (g + 1)
                    lv[write] = <char> g
                    write += 1
        lo = hi
        hi = write
        off[k + 2] = write
    return codes[:write], offsets


def left_mult_index(codes, u_letters, int num_letters, big_codes):
    """Index of u * s in sorted big_codes for each packed word s (or -1)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cs = np.ascontiguousarray(codes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] big = np.ascontiguousarray(big_codes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] us = np.asarray(list(u_letters), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(cs.shape[0], dtype=np.int64)
    cdef long long base = num_letters + 1
    cdef long long n = cs.shape[0], m = big.shape[0], nu = us.shape[0]
    cdef long long i, lo, hi, mid, val, lead, first
    cdef long long j
    cdef int length, nb, g
    cdef long long powers[42]
    cdef long long bounds[42]
    cdef long long[:] cv = cs, bv = big, uv = us, ov = out
    # powers[k] = base**k; bounds[k] = smallest code of length k+1 (repunit)
    nb = 0
    val = 1
    lead = 1
    while val < (<long long> 1 << 62) // base and nb < 41:
        powers[nb] = lead
        bounds[nb] = val
        lead *= base
        val = val * base + 1
        nb += 1
    powers[nb] = lead
    with nogil:
        for i in range(n):
            val = cv[i]
            # word length once per code; letters change it by +-1
            lo = 0
            hi = nb
            while lo < hi:
                mid = (lo + hi) >> 1
                if bounds[mid] <= val:
                    lo = mid + 1
                else:
                    hi = mid
            length = <int> lo
            for j in range(nu - 1, -1, -1):
                g = <int> uv[j]
                if length == 0:
                    val = g + 1
                    length = 1
                    continue
                lead = powers[length - 1]
                first = val / lead - 1
                if first == (g ^ 1):
                    val -= (first + 1) * lead
                    length -= 1
                else:
                    val += (g + 1) * lead * base
                    length += 1
            lo = 0
            hi = m
            while lo < hi:
                mid = (lo + hi) >> 1
                if bv[mid] < val:
                    lo = mid + 1
                else:
                    hi = mid
            ov[i] = lo if lo < m and bv[lo] == val else -1
    return out


def pair_dist(letters_a, len_a, letters_b, len_b, chunk=512):
    """Matrix |a^-1 b| = len(a) + len(b) - 2 lcp(a, b) over all row pairs."""
    cdef cnp.ndarray[cnp.int8_t, ndim=2] A = np.ascontiguousarray(letters_a, dtype=np.int8)
    cdef cnp.ndarray[cnp.int8_t, ndim=2] B = np.ascontiguousarray(letters_b, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] la = np.ascontiguousarray(len_a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lb = np.ascontiguousarray(len_b, dtype=np.int64)
    cdef long long n = A.shape[0], m = B.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out = np.empty((n, m), dtype=np.int32)
    cdef char[:, :] av = A, bv = B
    cdef long long[:] lav = la, lbv = lb
    cdef int[:, :] ov = out
    cdef long long i, j
    cdef int c, lim, width
    width = min(A.shape[1], B.shape[1])
    with nogil:
        for i in range(n):
            for j in range(m):
                lim = <int> (lav[i] if lav[i] < lbv[j] else lbv[j])
                if lim > width:
                    lim = width
                c = 0
                while c < lim and av[i, c] == bv[j, c]:
                    c += 1
                ov[i, j] = <int> (lav[i] + lbv[j] - 2 * c)
    return out

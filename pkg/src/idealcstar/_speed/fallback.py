"""NumPy implementations of the free-group word kernels.

Words over the symmetric alphabet of a free group F_m are packed into int64
codes: the word l_1 ... l_k (letter ids 0 .. 2m-1) becomes
sum_i (l_i + 1) * B**(k-1-i) with base B = 2m + 1.  Codes are injective
across lengths, and the numeric order of codes equals the canonical
(length, lex) order of reduced words.  Letter id 2i is the i-th generator,
2i + 1 its inverse, so the inverse of a letter is ``letter ^ 1``.

The compiled twin of this module is ``_freewords.pyx``; both expose the same
three functions and must stay bit-for-bit interchangeable.
"""

import numpy as np


def free_ball(num_letters, radius):
    """Enumerate all freely reduced words of length <= radius.

    Returns (codes, offsets): sorted int64 packed codes, and offsets such
    that codes[offsets[k]:offsets[k+1]] is the sphere of radius k.
    """
    base = num_letters + 1
    levels = [np.zeros(1, dtype=np.int64)]
    lasts = [np.full(1, -1, dtype=np.int64)]
    offsets = [0, 1]
    for _ in range(radius):
        parents = levels[-1]
        plast = lasts[-1]
        letters = np.arange(num_letters, dtype=np.int64)
        child = parents[:, None] * base + (letters[None, :] + 1)
        keep = plast[:, None] != (letters[None, :] ^ 1)
        levels.append(child[keep])
        lasts.append(np.broadcast_to(letters, keep.shape)[keep])
        offsets.append(offsets[-1] + levels[-1].size)
    codes = np.concatenate(levels)
    return codes, np.asarray(offsets, dtype=np.int64)


def _lengths_of(codes, base, max_len=64):
    """Word length of each packed code (length-k codes occupy a known range)."""
    bounds = []
    lo = 1  # smallest code of length k+1 is the base-B repunit
    while lo < 2**62 and len(bounds) < max_len:
        bounds.append(lo)
        lo = lo * base + 1
    return np.searchsorted(np.asarray(bounds, dtype=np.int64), codes, side="right")


def left_mult_index(codes, u_letters, num_letters, big_codes):
    """Index of u * s in big_codes for each packed word s in codes.

    big_codes must be sorted (canonical ball order is).  Returns -1 where the
    product falls outside big_codes.
    """
    base = num_letters + 1
    cur = np.asarray(codes, dtype=np.int64).copy()
    for g in reversed(list(u_letters)):
        lengths = _lengths_of(cur, base)
        lead = np.ones_like(cur)
        nonzero = lengths > 0
        lead[nonzero] = base ** (lengths[nonzero] - 1)
        first = cur // lead - 1  # -1 for the empty word
        cancel = nonzero & (first == (g ^ 1))
        cur = np.where(cancel, cur - (first + 1) * lead, (g + 1) * base**lengths + cur)
    pos = np.searchsorted(big_codes, cur)
    pos = np.minimum(pos, len(big_codes) - 1)
    ok = big_codes[pos] == cur if len(big_codes) else np.zeros(cur.shape, bool)
    return np.where(ok, pos, -1).astype(np.int64)


def pair_dist(letters_a, len_a, letters_b, len_b, chunk=512):
    """Matrix of word lengths |a^-1 b| for reduced words a, b of a free group.

    letters_* are left-aligned letter-id matrices padded with -1 (rows may
    have distinct pad widths between a and b).  Cancellation in a^-1 b is
    exactly the longest common prefix, so
    d(a, b) = len(a) + len(b) - 2 * lcp(a, b).
    """
    n, m = letters_a.shape[0], letters_b.shape[0]
    width = min(letters_a.shape[1], letters_b.shape[1])
    out = np.empty((n, m), dtype=np.int32)
    lb = len_b.astype(np.int32)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        a = letters_a[start:stop, None, :width]
        b = letters_b[None, :, :width]
        eq = (a == b) & (a >= 0)
        lcp = np.cumprod(eq, axis=2, dtype=np.int32).sum(axis=2, dtype=np.int32)
        out[start:stop] = len_a[start:stop, None].astype(np.int32) + lb[None, :] - 2 * lcp
    return out

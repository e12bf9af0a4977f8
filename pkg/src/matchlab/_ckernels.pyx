# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled matching kernels; semantics identical to ``_pykernels``."""

import numpy as np



cdef bint _augment(const unsigned char[:, ::1] allowed, int k, int i,
                   int[::1] owner, unsigned char[::1] seen):
    cdef int j
    for j in range(k):
        if allowed[i, j] and not seen[j]:
            seen[j] = 1
            if owner[j] < 0 or _augment(allowed, k, owner[j], owner, seen):
                owner[j] = i
                return True
    return False


def find_perfect(const unsigned char[:, ::1] allowed):
    cdef int k = allowed.shape[0]
    cdef int i, j
    owner_arr = np.full(k, -1, dtype=np.intc)
    seen_arr = np.zeros(k, dtype=np.uint8)
    cdef int[::1] owner = owner_arr
    cdef unsigned char[::1] seen = seen_arr
    for i in range(k):
        seen[:] = 0
        if not _augment(allowed, k, i, owner, seen):
            return None
    perm = [0] * k
    for j in range(k):
        perm[owner[j]] = j
    return perm


def enumerate_perfect(const unsigned char[:, ::1] allowed, Py_ssize_t cap):
    cdef int k = allowed.shape[0]
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t size = 64 if cap > 64 else cap
    cdef int i, j
    cdef bint overflow = False
    out_arr = np.empty((max(size, 1), k), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    cdef int[::1] perm = np.full(k, -1, dtype=np.intc)
    cdef unsigned char[::1] used = np.zeros(k, dtype=np.uint8)

    if k == 0:
        return np.empty((0, 0), dtype=np.int32), True
    i = 0
    while i >= 0:
        # advance row i to its next free allowed column
        j = perm[i] + 1
        if perm[i] >= 0:
            used[perm[i]] = 0
        while j < k and (not allowed[i, j] or used[j]):
            j += 1
        if j == k:
            perm[i] = -1
            i -= 1
            continue
        perm[i] = j
        used[j] = 1
        if i < k - 1:
            i += 1
            continue
        if count == cap:
            overflow = True
            break
        if count == size:
            size *= 2
            grown = np.empty((size, k), dtype=np.int32)
            grown[:count] = out_arr[:count]
            out_arr = grown
            out = out_arr
        out[count, :] = perm
        count += 1
    return out_arr[:count].copy(), not overflow

"""Pure-Python matching kernels.

Reference implementation of the compiled ``_ckernels`` module; both take a
square C-contiguous ``uint8`` allowed-edge matrix and must agree exactly.
"""

from __future__ import annotations

import numpy as np


def find_perfect(allowed):
    """Perfect matching by augmenting paths, or ``None``.

    Rows are processed in index order and columns tried in ascending order,
    so the result is a deterministic function of ``allowed``.
    """
    k = allowed.shape[0]
    adj = [[j for j in range(k) if allowed[i, j]] for i in range(k)]
    owner = [-1] * k

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(k):
        if not augment(i, [False] * k):
            return None
    perm = [0] * k
    for j, i in enumerate(owner):
        perm[i] = j
    return perm


def enumerate_perfect(allowed, cap):
    """All perfect matchings in lexicographic order of the column sequence.

    Returns ``(perms, exhaustive)`` where ``perms`` is an ``int32`` array of
    shape ``(m, k)`` with ``m <= cap``; ``exhaustive`` is False when more
    than ``cap`` matchings exist.
    """
    k = allowed.shape[0]
    adj = [[j for j in range(k) if allowed[i, j]] for i in range(k)]
    out = []
    used = [False] * k
    perm = [0] * k
    overflow = False

    def rec(i):
        nonlocal overflow
        if i == k:
            if len(out) == cap:
                overflow = True
                return True
            out.append(perm[:])
            return False
        for j in adj[i]:
            if not used[j]:
                used[j] = True
                perm[i] = j
                stop = rec(i + 1)
                used[j] = False
                if stop:
                    return True
        return False

    rec(0)
    arr = np.array(out, dtype=np.int32).reshape(len(out), k)
    return arr, not overflow

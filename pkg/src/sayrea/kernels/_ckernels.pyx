# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sequence kernels. Tokens arrive pre-coded as small ints."""

from libc.stdlib cimport free, malloc


def window_distance_coded(int[::1] window, int[::1] label):
    """Edit distance with free window-token deletion over int-coded tokens."""
    cdef Py_ssize_t n = label.shape[0]
    cdef Py_ssize_t m = window.shape[0]
    if n == 0:
        return 0
    cdef int *dp = <int *> malloc((n + 1) * sizeof(int))
    if dp == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int prev_diag, cur, cand, tok
    try:
        for j in range(n + 1):
            dp[j] = <int> j
        for i in range(m):
            tok = window[i]
            prev_diag = dp[0]
            for j in range(1, n + 1):
                cur = dp[j]
                if tok == label[j - 1]:
                    cand = prev_diag
                else:
                    cand = prev_diag + 1
                    if dp[j - 1] + 1 < cand:
                        cand = dp[j - 1] + 1
                if cur < cand:
                    cand = cur
                dp[j] = cand
                prev_diag = cur
        return dp[n]
    finally:
        free(dp)

"""Compiled inner loop for path simulation.

The walk semantics are fixed: at each step one uniform draw u in [0,1) is
consumed, and the next state is the smallest j with u < cumsum(P[state])[j]
(inverse-CDF over states in increasing index order).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def inverse_cdf_walk(cum, u, start):
    """Walk a chain with cumulative transition rows `cum` from `start`.

    cum is the row-wise cumulative sum of the transition matrix, u the uniform
    draws (one per transition). Returns the full path of length len(u) + 1.
    """
    n = u.shape[0] + 1
    d = cum.shape[1]
    out = np.empty(n, dtype=np.int64)
    out[0] = start
    s = start
    for t in range(1, n):
        v = u[t - 1]
        j = 0
        while j < d - 1 and v >= cum[s, j]:
            j += 1
        s = j
        out[t] = s
    return out

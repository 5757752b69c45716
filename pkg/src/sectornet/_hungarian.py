"""Dense rectangular assignment kernel for bipartite matching.

Shortest-augmenting-path formulation with row/column potentials
(Jonker-Volgenant style). Minimizes total cost over assignments of all
rows of an (nl, nr) matrix with nl <= nr; the bipartite matching
wrapper negates weights and pads missing pairs with zero cost, so the
minimum-cost assignment is a maximum-weight matching once zero-cost
pairs are discarded. Runs in O(nl^2 * nr) with float64 arithmetic;
every potential update is an add or subtract of an input value, so
integer and dyadic-rational weights are handled exactly.
"""

from __future__ import annotations

import numpy as np

from ._jit import maybe_jit


@maybe_jit
def assign_min_cost(cost):
    """Column owner array for a minimum-cost assignment of all rows.

    ``cost`` is float64 with shape (nl, nr), nl <= nr. Returns an int64
    array ``owner`` of length nr with ``owner[j]`` the row assigned to
    column j, or -1 when the column is free.
    """
    nl, nr = cost.shape
    owner = np.full(nr, -1, np.int64)
    if nl == 0:
        return owner

    u = np.zeros(nl + 1, np.float64)
    v = np.zeros(nr + 1, np.float64)
    # 1-based columns with column 0 as the virtual start; p[j] = row
    # assigned to column j (1-based rows, 0 = free).
    p = np.zeros(nr + 1, np.int64)
    way = np.zeros(nr + 1, np.int64)
    minv = np.empty(nr + 1, np.float64)
    used = np.empty(nr + 1, np.bool_)

    for i in range(1, nl + 1):
        p[0] = i
        j0 = 0
        for j in range(nr + 1):
            minv[j] = np.inf
            used[j] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = -1
            for j in range(1, nr + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(nr + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    for j in range(1, nr + 1):
        if p[j] != 0:
            owner[j - 1] = p[j] - 1
    return owner

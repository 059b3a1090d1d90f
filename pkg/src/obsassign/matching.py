"""Maximum-weight bipartite matching (Hungarian method with potentials).

Rectangular inputs are solved directly on the smaller side, so the result
always covers every node of that side.  Among all optimal
matchings the lexicographically smallest pair list is returned, which keeps
benchmark output reproducible.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError


@dataclass(frozen=True)
class Matching:
    pairs: tuple  # ((left, right), ...) sorted by left index
    total_weight: float

    def as_dict(self) -> dict:
        return dict(self.pairs)


def _as_weights(w) -> np.ndarray:
    a = np.array(w, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"weight matrix must be 2-D with at least one row and column, got shape {a.shape}")
    if np.isnan(a).any() or np.isposinf(a).any():
        raise ValueError("weights must be finite or -inf")
    return a


def hungarian_min(cost: np.ndarray):
    """Min-cost assignment of every row of an ``n x m`` matrix, ``n <= m``.

    Returns ``(row_to_col, u, v)`` with optimal dual potentials:
    ``cost[i, j] - u[i] - v[j] >= 0``, equality on matched edges, and
    ``v[j] == 0`` on every unmatched column.
    """
    n, m = cost.shape
    if n > m:
        raise ValueError("hungarian_min needs rows <= cols; transpose first")
    # 1-based working arrays; column 0 is the virtual root
    a = np.zeros((n + 1, m + 1))
    a[1:, 1:] = cost
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=int)
    way = np.zeros(m + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = a[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(free, minv, np.inf)
            j1 = int(np.argmin(masked))
            delta = masked[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = np.full(n, -1, dtype=int)
    cols = np.flatnonzero(p[1:])
    row_to_col[p[1:][cols] - 1] = cols
    return row_to_col, u[1:], v[1:]


def _lex_min_perfect(tight: np.ndarray, match: np.ndarray, col_order: np.ndarray) -> np.ndarray:
    """Turn a perfect matching of the boolean graph ``tight`` into the one that
    is lexicographically smallest row by row, columns ranked by ``col_order``."""
    n = len(match)
    match = match.copy()
    owner = np.empty(n, dtype=int)
    owner[match] = np.arange(n)
    adj = [np.flatnonzero(tight[i]) for i in range(n)]
    rank = np.empty(n, dtype=int)
    rank[col_order] = np.arange(n)
    adj = [cols[np.argsort(rank[cols])] for cols in adj]
    fixed_col = np.zeros(n, dtype=bool)

    def reroute(start_row, target_col, frozen_row):
        # alternating path from a free row to a free column over unfixed nodes
        prev = {}
        seen = np.zeros(n, dtype=bool)
        queue = deque([start_row])
        while queue:
            r = queue.popleft()
            for c in adj[r]:
                if fixed_col[c] or seen[c]:
                    continue
                seen[c] = True
                prev[c] = r
                if c == target_col:
                    path = c
                    while True:
                        rr = prev[path]
                        nxt = match[rr]
                        match[rr] = path
                        owner[path] = rr
                        if rr == start_row:
                            return True
                        path = nxt
                nr = owner[c]
                if nr != frozen_row:
                    queue.append(nr)
        return False

    for i in range(n):
        for j in adj[i]:
            if fixed_col[j]:
                continue
            if match[i] == j:
                break
            old_col, other = match[i], owner[j]
            saved = match.copy(), owner.copy()
            match[i], owner[j] = j, i
            match[other] = -1
            fixed_col[j] = True
            if reroute(other, old_col, i):
                fixed_col[j] = False
                break
            fixed_col[j] = False
            match[:], owner[:] = saved
        fixed_col[match[i]] = True
    return match


def max_weight_matching(w) -> Matching:
    """Maximum-weight matching covering every node of the smaller side.

    ``-inf`` entries mark forbidden edges; :class:`InfeasibleError` is raised
    when they leave no complete matching of the smaller side.
    """
    wts = _as_weights(w)
    transposed = wts.shape[0] > wts.shape[1]
    a = wts.T if transposed else wts
    n, m = a.shape
    forbidden = np.isneginf(a)
    finite = a[~forbidden]
    spread = float(finite.max() - finite.min()) if finite.size else 0.0
    scale = float(np.abs(finite).max()) if finite.size else 0.0
    big = (n + 1) * (spread + 1.0) + scale  # beats any difference between feasible totals
    cost = np.where(forbidden, big, -np.where(forbidden, 0.0, a))
    match, u, v = hungarian_min(cost)
    if forbidden[np.arange(n), match].any():
        raise InfeasibleError("forbidden edges leave no complete matching of the smaller side")

    # Optimal matchings are exactly the complete matchings on tight edges that
    # leave only zero-potential columns unmatched; pick the lexicographic one.
    # only rounding-level slack counts as tight, so real weight gaps survive
    mag = 1.0 + scale + float(np.abs(u).max()) + float(np.abs(v).max())
    tol = 64.0 * np.finfo(float).eps * mag * max(n, 1)
    tight = (cost - u[:, None] - v[None, :] <= tol) & ~forbidden
    tight[np.arange(n), match] = True
    keep = np.flatnonzero(tight.any(axis=0))  # other columns are unmatched in every optimum
    col_pos = {c: k for k, c in enumerate(keep)}
    size = len(keep)
    square = np.zeros((size, size), dtype=bool)
    square[:n] = tight[:, keep]
    square[n:] = (v[keep] >= -tol)[None, :]
    init = np.empty(size, dtype=int)
    init[:n] = [col_pos[c] for c in match]
    init[n:] = sorted(set(range(size)) - set(init[:n]))
    if transposed:
        # lexicographic order runs over the original rows, i.e. our columns
        col_match = np.empty(size, dtype=int)
        col_match[init] = np.arange(size)
        lex = _lex_min_perfect(square.T, col_match, np.arange(size))
        pairs = tuple((int(keep[k]), int(lex[k])) for k in range(size) if lex[k] < n)
    else:
        lex = _lex_min_perfect(square, init, np.arange(size))
        pairs = tuple((i, int(keep[lex[i]])) for i in range(n))
    total = float(sum(wts[i, j] for i, j in pairs))
    base = [(int(match[i]), i) if transposed else (i, int(match[i])) for i in range(n)]
    base_total = float(sum(wts[i, j] for i, j in base))
    if total < base_total - tol * n:
        pairs, total = tuple(sorted(base)), base_total
    return Matching(pairs, total)


def brute_force_matching(w) -> Matching:
    """Exhaustive optimum over all complete matchings of the smaller side."""
    wts = _as_weights(w)
    rows, cols = wts.shape
    best = None
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            pairs = tuple(enumerate(perm))
            total = float(sum(wts[i, j] for i, j in pairs))
            if best is None or total > best.total_weight:
                best = Matching(pairs, total)
    else:
        for perm in itertools.permutations(range(rows), cols):
            pairs = tuple(sorted((i, j) for j, i in enumerate(perm)))
            total = float(sum(wts[i, j] for i, j in pairs))
            if best is None or total > best.total_weight or (
                    total == best.total_weight and pairs < best.pairs):
                best = Matching(pairs, total)
    if best is None or np.isneginf(best.total_weight):
        raise InfeasibleError("no complete matching of the smaller side")
    return best

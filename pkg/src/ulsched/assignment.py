"""Reward-maximizing assignment solver and the matrix transforms that square
rectangular scheduling problems (zero-cost dummy columns, replicated penalty
columns for unscheduled-user costs).

All solvers break ties the same way: among optimal assignments, the one whose
column vector (col of row 0, col of row 1, ...) is lexicographically smallest
wins. Matrices are integer bytes in normal use; floats are accepted but exact
tie canonicalization is only guaranteed for integer inputs.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np


class AssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class Assignment:
    """A perfect row->column matching and its total reward."""

    mapping: tuple  # mapping[i] = column assigned to row i
    objective: int | float

    def columns_used(self):
        return set(self.mapping)


def _as_matrix(m):
    a = np.asarray(m)
    if a.ndim != 2 or a.size == 0:
        raise AssignmentError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.astype(np.float64))):
        raise AssignmentError("matrix entries must be finite")
    return a


def _is_integral(a):
    return np.issubdtype(a.dtype, np.integer) or bool(np.all(a == np.round(a)))


# ---------------------------------------------------------------------------
# core solver
# ---------------------------------------------------------------------------

def _jv_min(cost_rows, n_rows, n_cols):
    """Shortest-augmenting-path assignment for a nonnegative cost matrix
    given as a list of row lists, n_rows <= n_cols (minimization). Every row
    gets a column; surplus columns stay unmatched with dual 0. Returns
    (row_to_col, u, v); duals stay integral for integral costs, so reduced
    costs can be tested exactly afterwards.
    """
    INF = float("inf")
    u = [0] * (n_rows + 1)
    v = [0] * (n_cols + 1)
    p = [0] * (n_cols + 1)    # p[j]: 1-based row matched to column j; column 0 is virtual
    way = [0] * (n_cols + 1)
    for i in range(1, n_rows + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n_cols + 1)
        used = [False] * (n_cols + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = -1
            row = cost_rows[i0 - 1]
            du = u[i0]
            for j in range(1, n_cols + 1):
                if not used[j]:
                    cur = row[j - 1] - du - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n_cols + 1):
                if used[j]:
                    if p[j]:
                        u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = [-1] * n_rows
    for j in range(1, n_cols + 1):
        if p[j]:
            row_to_col[p[j] - 1] = j - 1
    return row_to_col, u[1:], v[1:]


def _lexi_smallest_matching(adj, match):
    """Lexicographically smallest perfect matching of a bipartite graph.

    adj[i] is a bitmask of the columns row i may use. Because adj holds
    exactly the zero-reduced-cost cells of an optimal solution, every perfect
    matching here is optimal (complementary slackness), so reshaping the
    matching only resolves ties. match is one known perfect matching.
    """
    n = len(adj)
    col_of = list(match)
    row_of = [0] * n
    for i, c in enumerate(col_of):
        row_of[c] = i
    locked = 0  # columns fixed by rows already processed

    def kuhn(r, visited):
        # give row r a column; a column is free when row_of[col] is None
        avail = adj[r] & ~visited[0]
        while avail:
            c = (avail & -avail).bit_length() - 1
            avail &= avail - 1
            visited[0] |= 1 << c
            holder = row_of[c]
            if holder is None or kuhn(holder, visited):
                row_of[c] = r
                col_of[r] = c
                return True
        return False

    for i in range(n):
        cur = col_of[i]
        cand = adj[i] & ~locked
        while cand:
            c = (cand & -cand).bit_length() - 1
            if c >= cur:
                break
            cand &= cand - 1
            displaced = row_of[c]
            # tentatively move row i to column c, vacating cur for the cascade
            row_of[cur] = None
            row_of[c] = i
            col_of[i] = c
            visited = [locked | (1 << c)]
            if kuhn(displaced, visited):
                cur = c
                break
            row_of[c] = displaced
            row_of[cur] = i
            col_of[i] = cur
        locked |= 1 << cur
    return col_of


def solve_max_assignment(m) -> Assignment:
    """Exact maximum-reward perfect matching on a square matrix.

    Entries may be negative (penalty columns carry negated drop counts); the
    internal conversion to a nonnegative minimization cost is
    cost = row_max - reward, which shifts every perfect matching by the same
    per-row constants and so preserves the argmax. The reported objective is
    computed from the original rewards.
    """
    a = _as_matrix(m)
    n, cols = a.shape
    if n != cols:
        raise AssignmentError(f"matrix must be square, got {n}x{cols}")
    integral = _is_integral(a)
    work = a.astype(np.int64) if integral else a.astype(np.float64)
    if n == 1:
        return Assignment(mapping=(0,), objective=work[0, 0].item())
    cost = work.max(axis=1, keepdims=True) - work
    cost_rows = cost.tolist()
    row_to_col, u, v = _jv_min(cost_rows, n, n)
    if n <= 64:
        eps = 0 if integral else 1e-9 * max(1.0, float(np.abs(cost).max()))
        adj = []
        for i in range(n):
            mask = 0
            ui = u[i]
            row = cost_rows[i]
            for j in range(n):
                if row[j] - ui - v[j] <= eps:
                    mask |= 1 << j
            adj.append(mask)
        row_to_col = _lexi_smallest_matching(adj, row_to_col)
    obj = sum(work[i, c].item() for i, c in enumerate(row_to_col))
    return Assignment(mapping=tuple(row_to_col), objective=obj)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

_PERM_CACHE: dict = {}


def brute_force_assignment(m, limit: int = 8) -> Assignment:
    """Exact optimum by full permutation enumeration (test oracle, n <= 8).

    Permutations are generated in lexicographic order and argmax keeps the
    first maximum, which matches solve_max_assignment's tie-break rule by
    construction.
    """
    a = _as_matrix(m)
    n, cols = a.shape
    if n != cols:
        raise AssignmentError(f"matrix must be square, got {n}x{cols}")
    if n > limit:
        raise AssignmentError(f"brute force limited to n <= {limit}, got {n}")
    perms = _PERM_CACHE.get(n)
    if perms is None:
        perms = np.array(list(permutations(range(n))), dtype=np.intp)
        _PERM_CACHE[n] = perms
    objs = a[np.arange(n), perms].sum(axis=1)
    best = int(np.argmax(objs))
    return Assignment(mapping=tuple(int(c) for c in perms[best]), objective=objs[best].item())


# ---------------------------------------------------------------------------
# squaring transforms
# ---------------------------------------------------------------------------

def pad_with_zero_dummies(m):
    """Square an n_ue x n_rc reward matrix (n_ue >= n_rc) by appending
    all-zero dummy columns. Rows assigned to a dummy get no resource."""
    a = _as_matrix(m)
    n_ue, n_rc = a.shape
    if n_ue < n_rc:
        raise AssignmentError(
            "more columns than rows: pad dummy rows instead (surplus-resource regime)")
    if n_ue == n_rc:
        return a.copy()
    out = np.zeros((n_ue, n_ue), dtype=a.dtype)
    out[:, :n_rc] = a
    return out


def replicate_penalty_dummies(gamma, k):
    """Square an n_ue x n_rc matrix (n_ue > n_rc) with replicated penalty
    columns: every dummy column equals (-k_1, ..., -k_n). Assigning row i to
    any dummy then contributes -k_i, so the square optimum equals the
    rectangular problem where each unassigned row pays k_i.
    """
    g = _as_matrix(gamma)
    n_ue, n_rc = g.shape
    kv = np.asarray(k)
    if kv.shape != (n_ue,):
        raise AssignmentError(f"penalty vector must have length {n_ue}, got shape {kv.shape}")
    if np.any(kv < 0):
        raise AssignmentError("penalties must be nonnegative")
    if n_ue <= n_rc:
        raise AssignmentError("replication requires more rows than real columns")
    out = np.empty((n_ue, n_ue), dtype=np.result_type(g.dtype, kv.dtype))
    out[:, :n_rc] = g
    out[:, n_rc:] = -kv[:, None]
    return out

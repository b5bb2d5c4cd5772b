"""Per-TTI allocation policies run at the base station.

dham   - channel plus buffer aware: maximize total transmittable bytes.
darts  - dham extended with drop awareness: unscheduled users pay their
         imminent-drop byte count k, scheduled users pay the residual drop
         d = max(0, k_current - w); reduces to an assignment problem by
         replicating a -k dummy column per missing resource chunk.
dafs   - darts driven by the mixed-traffic urgency metric.

For speed the replicated dummy block is folded algebraically: a square
assignment with (n - m) identical dummy columns valued -k_i equals the
rectangular problem with rewards (gamma + k) where every real column must be
matched and each unmatched row contributes -k_i. The fold preserves
objectives and the lexicographic tie rule exactly; tests cross-check it
against the literal replicate-and-solve pipeline.
"""

from dataclasses import dataclass

import numpy as np

from .assignment import _jv_min, solve_max_assignment
from .channel import cqi_to_bytes_per_rc
from .traffic import UrgencyReport


class SchedulerError(ValueError):
    pass


@dataclass(frozen=True)
class TrafficMatrixW:
    """Transmittable bytes per (UE, RC): w = min(channel capacity p, buffer b)."""

    w: np.ndarray  # (n_ue, n_rc) bytes
    p: np.ndarray  # (n_ue, n_rc) bytes
    b: np.ndarray  # (n_ue,) bytes

    @property
    def n_ues(self) -> int:
        return self.w.shape[0]

    @property
    def n_rcs(self) -> int:
        return self.w.shape[1]


@dataclass(frozen=True)
class SchedulerDecision:
    rc_to_ue: tuple          # per RC: scheduled UE index or None
    ue_rcs: tuple            # per UE: tuple of RCs granted (surplus mode may give several)
    grants: np.ndarray       # per UE: granted bytes this TTI
    unscheduled: tuple       # UE indices holding data but left without an RC (beta = 1)
    objective: int           # value of the optimization actually solved

    @property
    def total_grant(self) -> int:
        return int(self.grants.sum())


def build_traffic_matrix(cqi_grid, buffers) -> TrafficMatrixW:
    """w_ij = min(p_ij, b_i): p from the CQI-to-bytes map, b the buffered
    bytes per UE (buffers may be UeBuffer objects or an int array)."""
    grid = np.asarray(cqi_grid)
    if grid.ndim != 2:
        raise SchedulerError(f"CQI grid must be 2-D, got shape {grid.shape}")
    p = cqi_to_bytes_per_rc(grid)
    if hasattr(buffers, "__len__") and len(buffers) and hasattr(buffers[0], "total"):
        b = np.array([buf.total for buf in buffers], dtype=np.int64)
    else:
        b = np.asarray(buffers, dtype=np.int64)
    if b.shape != (grid.shape[0],):
        raise SchedulerError(f"need one buffer size per UE, got {b.shape}")
    w = np.minimum(p, b[:, None])
    return TrafficMatrixW(w=w, p=p, b=b)


def compute_drop_matrix(k_current, W: TrafficMatrixW) -> np.ndarray:
    """d_ij = max(0, k_i - w_ij): bytes UE i still drops when granted RC j.
    Uses the current-TTI critical bytes only; history bytes are already gone.
    """
    k = np.asarray(k_current, dtype=np.int64)
    if k.shape != (W.n_ues,):
        raise SchedulerError(f"need one k per UE, got {k.shape}")
    return np.maximum(0, k[:, None] - W.w)


def _k_vectors(urgency, n_ues):
    """Accept urgency as an UrgencyReport sequence or a plain k vector."""
    if urgency is None:
        z = np.zeros(n_ues, dtype=np.int64)
        return z, z
    seq = urgency if isinstance(urgency, np.ndarray) else list(urgency)
    if len(seq) and isinstance(seq[0], UrgencyReport):
        k = np.array([r.k for r in seq], dtype=np.int64)
        k_cur = np.array([r.k_current for r in seq], dtype=np.int64)
    else:
        k = np.asarray(seq, dtype=np.int64)
        k_cur = k.copy()
    if k.shape != (n_ues,):
        raise SchedulerError(f"need one urgency entry per UE, got {np.shape(seq)}")
    return k, k_cur


# ---------------------------------------------------------------------------
# reduced solver: every column matched, unmatched rows pay a penalty
# ---------------------------------------------------------------------------

def _solve_with_penalties(rewards, k):
    """Maximize sum(rewards[i, c]) - sum(k[i] over unmatched rows), where the
    m columns go to m distinct rows (n >= m). Equivalent - including the
    lexicographic tie rule - to replicate_penalty_dummies followed by
    solve_max_assignment: rows ascending take the lowest-indexed column
    consistent with optimality, else none.

    Returns (col_of_row list with -1 for unmatched, objective).
    """
    r = np.asarray(rewards, dtype=np.int64)
    kv = np.asarray(k, dtype=np.int64)
    n, m = r.shape
    if n < m:
        raise SchedulerError("penalty solve requires rows >= cols")
    folded = r + kv[:, None]
    # minimize on the transposed problem: each column-row must take a UE
    ct = (folded.max(axis=0, keepdims=True) - folded).T  # (m, n)
    cost_rows = ct.tolist()
    col_to_row, u, v = _jv_min(cost_rows, m, n)

    row_of_col = list(col_to_row)
    col_of_row = [-1] * n
    for c, i in enumerate(row_of_col):
        col_of_row[i] = c
    # complementary slackness: optimal configurations are exactly the
    # column-perfect matchings over tight cells in which every row with a
    # negative dual stays matched
    tight = []
    for c in range(m):
        uc = u[c]
        crow = cost_rows[c]
        tight.append([crow[i] - uc - v[i] == 0 for i in range(n)])
    may_exit = [v[i] == 0 for i in range(n)]

    locked_rows = [False] * n
    locked_cols = 0
    all_cols = (1 << m) - 1

    def entry_row(col):
        # lowest unlocked, unmatched row that can legally take `col`
        trow = tight[col]
        for e in range(n):
            if not locked_rows[e] and col_of_row[e] == -1 and trow[e]:
                return e
        return -1

    def place(d, visited, vacated, vac_filled):
        """Row d lost its column; re-home it along tight cells. One row may
        leave the matching (dual zero), pairing with an entry that refills
        the vacated column. Mutates the matching only on success."""
        if vacated is not None and not vac_filled[0] and tight[vacated][d]:
            row_of_col[vacated] = d
            col_of_row[d] = vacated
            vac_filled[0] = True
            return True
        for c2 in range(m):
            bit = 1 << c2
            if visited[0] & bit or not tight[c2][d]:
                continue
            visited[0] |= bit
            holder = row_of_col[c2]
            if place(holder, visited, vacated, vac_filled):
                row_of_col[c2] = d
                col_of_row[d] = c2
                return True
        if may_exit[d]:
            if vacated is None or vac_filled[0]:
                col_of_row[d] = -1
                return True
            e = entry_row(vacated)
            if e >= 0:
                row_of_col[vacated] = e
                col_of_row[e] = vacated
                vac_filled[0] = True
                col_of_row[d] = -1
                return True
        return False

    for i in range(n):
        if locked_cols == all_cols:
            break
        cur = col_of_row[i]
        stop = cur if cur >= 0 else m
        for c in range(stop):
            if (locked_cols >> c) & 1 or not tight[c][i]:
                continue
            displaced = row_of_col[c]
            if cur >= 0:
                row_of_col[cur] = -1
            row_of_col[c] = i
            col_of_row[i] = c
            visited = [locked_cols | (1 << c)]
            vac_filled = [cur < 0]
            if place(displaced, visited, cur if cur >= 0 else None, vac_filled):
                cur = c
                break
            # revert the tentative move
            row_of_col[c] = displaced
            col_of_row[displaced] = c
            col_of_row[i] = cur
            if cur >= 0:
                row_of_col[cur] = i
        locked_rows[i] = True
        if cur >= 0:
            locked_cols |= 1 << cur

    objective = 0
    for i, c in enumerate(col_of_row):
        objective += int(r[i, c]) if c >= 0 else -int(kv[i])
    return col_of_row, objective


def _solve_rows_all(rewards):
    """Every row matched to a distinct column (n <= m), surplus columns left
    empty; ties as in the zero-dummy-row padding pipeline. Sizes here are at
    most the RC count, so the literal square solve is used directly.
    Returns (col_of_row, objective)."""
    r = np.asarray(rewards, dtype=np.int64)
    n, m = r.shape
    if n > m:
        raise SchedulerError("row-side solve requires rows <= cols")
    square = np.zeros((m, m), dtype=np.int64)
    square[:n] = r
    sol = solve_max_assignment(square)
    col_of_row = [sol.mapping[i] for i in range(n)]
    objective = int(sum(r[i, c] for i, c in enumerate(col_of_row)))
    return col_of_row, objective


# ---------------------------------------------------------------------------
# policies
# ---------------------------------------------------------------------------

def _decision_from_cols(col_of_row, W, rows, objective, grants=None):
    """Assemble a SchedulerDecision from per-row column choices computed on a
    row subset `rows` of the full UE set."""
    n, m = W.n_ues, W.n_rcs
    rc_to_ue = [None] * m
    ue_rcs = [() for _ in range(n)]
    g = np.zeros(n, dtype=np.int64) if grants is None else grants
    unscheduled = []
    for local, ue in enumerate(rows):
        c = col_of_row[local]
        if c is not None and 0 <= c < m:
            rc_to_ue[c] = ue
            ue_rcs[ue] = (c,)
            if grants is None:
                g[ue] = W.w[ue, c]
        else:
            unscheduled.append(ue)
    return SchedulerDecision(rc_to_ue=tuple(rc_to_ue), ue_rcs=tuple(ue_rcs),
                             grants=g, unscheduled=tuple(unscheduled),
                             objective=int(objective))


def schedule_dham(W: TrafficMatrixW) -> SchedulerDecision:
    """Maximize total transmittable bytes. Users with nothing to send are
    treated as dummy-assigned; at most min(n_rc, capable users) real grants.
    """
    capable = [i for i in range(W.n_ues) if W.b[i] > 0]
    if not capable:
        return _decision_from_cols([], W, [], 0)
    sub = W.w[capable]
    if len(capable) >= W.n_rcs:
        cols, obj = _solve_with_penalties(sub, np.zeros(len(capable), dtype=np.int64))
    else:
        cols, obj = _solve_rows_all(sub)
    return _decision_from_cols(cols, W, capable, obj)


def schedule_darts(W: TrafficMatrixW, urgency, d=None) -> SchedulerDecision:
    """Drop-aware scheduling, n_ue >= n_rc: maximize
    sum(alpha_ij (w_ij - d_ij)) - sum(beta_i k_i). With n_ue == n_rc no dummy
    is needed and every user is scheduled. `d` may be injected for testing;
    by default it derives from the current-TTI urgency.
    """
    k, k_cur = _k_vectors(urgency, W.n_ues)
    return _schedule_darts_k(W, k, k_cur, d)


def _schedule_darts_k(W, k, k_cur, d=None) -> SchedulerDecision:
    n, m = W.n_ues, W.n_rcs
    if n < m:
        raise SchedulerError("n_ue < n_rc: use schedule_iterative_surplus")
    if d is None:
        d = compute_drop_matrix(k_cur, W)
    else:
        d = np.asarray(d, dtype=np.int64)
        if d.shape != W.w.shape:
            raise SchedulerError(f"drop matrix shape {d.shape} != {W.w.shape}")
    gamma = W.w - d
    cols, obj = _solve_with_penalties(gamma, k)
    return _decision_from_cols(cols, W, list(range(n)), obj)


def schedule_iterative_surplus(W: TrafficMatrixW, urgency=None,
                               max_rounds=None) -> SchedulerDecision:
    """Surplus-resource regime (n_ue < n_rc): repeat single-RC assignment
    rounds, rebuilding w from the depleted buffers, until every RC is granted
    or all buffers empty. The drop matrix is omitted; k shrinks by the bytes
    granted (floor zero). Zero-buffer dummy users square the later rounds.
    """
    n, m = W.n_ues, W.n_rcs
    k, _ = _k_vectors(urgency, n)
    k = k.copy()
    b = W.b.copy()
    remaining = list(range(m))
    grants = np.zeros(n, dtype=np.int64)
    ue_rcs = [[] for _ in range(n)]
    rc_to_ue = [None] * m
    rounds = max_rounds if max_rounds is not None else m
    for _ in range(rounds):
        active = [i for i in range(n) if b[i] > 0]
        if not active or not remaining:
            break
        w_round = np.minimum(W.p[np.ix_(active, remaining)], b[active, None])
        if len(active) <= len(remaining):
            cols, _obj = _solve_rows_all(w_round)
        else:
            cols, _obj = _solve_with_penalties(w_round, k[active])
        granted_any = False
        taken = []
        for local, ue in enumerate(active):
            c = cols[local]
            if c is None or c < 0 or c >= len(remaining):
                continue
            rc = remaining[c]
            got = int(w_round[local, c])
            if got <= 0:
                continue
            granted_any = True
            taken.append(rc)
            rc_to_ue[rc] = ue
            ue_rcs[ue].append(rc)
            grants[ue] += got
            b[ue] -= got
            k[ue] = max(0, k[ue] - got)
        if not granted_any:
            break
        remaining = [rc for rc in remaining if rc not in taken]
    unscheduled = tuple(i for i in range(n) if not ue_rcs[i] and W.b[i] > 0)
    objective = int(grants.sum() - k[list(unscheduled)].sum()) if len(unscheduled) \
        else int(grants.sum())
    return SchedulerDecision(rc_to_ue=tuple(rc_to_ue),
                             ue_rcs=tuple(tuple(x) for x in ue_rcs),
                             grants=grants, unscheduled=unscheduled,
                             objective=objective)


def dafs_metric(urgency) -> np.ndarray:
    """Mixed-traffic urgency vector: k = m_vo + m_vi + m_d plus the windowed
    drop history, straight from mixed-mode urgency reports."""
    reports = list(urgency)
    if any(not isinstance(r, UrgencyReport) for r in reports):
        raise SchedulerError("dafs_metric expects UrgencyReport entries")
    return np.array([r.k for r in reports], dtype=np.int64)


POLICIES = ("dham", "darts", "dafs")


def dispatch(policy: str, W: TrafficMatrixW, urgency=None) -> SchedulerDecision:
    """Run one TTI decision. Users with empty buffers are pruned first (their
    k is treated as zero: with no bytes buffered nothing can drop this TTI,
    and an idle user must not consume a resource chunk just to dodge a
    history penalty). The regime - square, dummy-padded, or iterative
    surplus - follows from the pruned user count."""
    if policy not in POLICIES:
        raise SchedulerError(f"unknown policy {policy!r}")
    active = [i for i in range(W.n_ues) if W.b[i] > 0]
    if not active:
        return SchedulerDecision(rc_to_ue=(None,) * W.n_rcs,
                                 ue_rcs=((),) * W.n_ues,
                                 grants=np.zeros(W.n_ues, dtype=np.int64),
                                 unscheduled=(), objective=0)
    sub = TrafficMatrixW(w=W.w[active], p=W.p[active], b=W.b[active])
    if policy == "dham":
        if len(active) < W.n_rcs:
            dec = schedule_iterative_surplus(sub)
        else:
            dec = schedule_dham(sub)
    else:
        k, k_cur = _k_vectors(urgency, W.n_ues)
        if len(active) < W.n_rcs:
            dec = schedule_iterative_surplus(sub, k[active])
        else:
            dec = _schedule_darts_k(sub, k[active], k_cur[active])
    return _expand_decision(dec, active, W)


def _expand_decision(dec: SchedulerDecision, rows, W: TrafficMatrixW) -> SchedulerDecision:
    """Map a decision computed on a row subset back to full UE indexing."""
    n, m = W.n_ues, W.n_rcs
    rc_to_ue = [None] * m
    ue_rcs = [() for _ in range(n)]
    grants = np.zeros(n, dtype=np.int64)
    for rc, local in enumerate(dec.rc_to_ue):
        if local is not None:
            rc_to_ue[rc] = rows[local]
    for local, ue in enumerate(rows):
        ue_rcs[ue] = dec.ue_rcs[local]
        grants[ue] = dec.grants[local]
    unscheduled = tuple(rows[local] for local in dec.unscheduled)
    return SchedulerDecision(rc_to_ue=tuple(rc_to_ue), ue_rcs=tuple(ue_rcs),
                             grants=grants, unscheduled=unscheduled,
                             objective=dec.objective)

"""Point-regularity of chained systems: kernel supports, the Seq reduction,
and the recursive regularity test with its nonvanishing-determinant
certificate."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .jets import DiffSystem, JetPoint, jacobian_at, order_matrix, truncated_determinant_at
from .matching import ZeroPattern, koenig_cover
from .tropical import NEG_INF, tropical_det_bruteforce

DEFAULT_TOL = 1e-9


def rank_tolerance(tol: float | None = None) -> float:
    if tol is not None:
        return tol
    env = os.environ.get("FLATCHAIN_TOL")
    return float(env) if env else DEFAULT_TOL


def _matrix_rank(rows, tol: float, exact: bool) -> int:
    if not rows or not len(rows[0]):
        return 0
    if exact:
        m = [list(r) for r in rows]
        rank = 0
        ncols = len(m[0])
        row = 0
        for c in range(ncols):
            pivot = next((r for r in range(row, len(m)) if m[r][c] != 0), None)
            if pivot is None:
                continue
            m[row], m[pivot] = m[pivot], m[row]
            inv = Fraction(1) / m[row][c]
            for r in range(row + 1, len(m)):
                if m[r][c] != 0:
                    f = m[r][c] * inv
                    for k in range(c, ncols):
                        m[r][k] -= f * m[row][k]
            rank += 1
            row += 1
            if row == len(m):
                break
        return rank
    arr = np.asarray(rows, dtype=float)
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


@dataclass(frozen=True)
class KernelSupport:
    """Rows supporting the left-kernel of J (on nontrivial pattern rows) and
    the columns holding their candidate positions, plus the reduced pair."""

    R_K: frozenset[int]
    C_K: frozenset[int]
    rows_kept: tuple[int, ...]
    cols_kept: tuple[int, ...]
    pattern: ZeroPattern
    jacobian: object  # ndarray, or Fraction rows in exact mode


def kernel_support(Bpat: ZeroPattern, J, tol: float | None = None, exact: bool = False) -> KernelSupport:
    """Union of supports of any left-kernel basis of J, restricted to rows
    whose pattern is nonempty; basis independence makes the set canonical.

    A nontrivial row i belongs to the kernel support iff deleting it does
    not lower the rank (some dependency involves it).
    """
    tol = rank_tolerance(tol)
    if exact:
        jrows = [list(r) for r in J]
    else:
        J = np.asarray(J, dtype=float)
        jrows = [list(J[i]) for i in range(Bpat.rows)]
    nontrivial = [i for i in range(Bpat.rows) if Bpat.adjacency[i]]
    sub = [jrows[i] for i in nontrivial]
    r_full = _matrix_rank(sub, tol, exact)
    in_support = []
    for pos, i in enumerate(nontrivial):
        others = sub[:pos] + sub[pos + 1 :]
        if _matrix_rank(others, tol, exact) == r_full:
            in_support.append(i)
    R_K = frozenset(in_support)
    C_K = frozenset(c for i in R_K for c in Bpat.adjacency[i])
    rows_kept = tuple(i for i in range(Bpat.rows) if i not in R_K)
    cols_kept = tuple(j for j in range(Bpat.cols) if j not in C_K)
    reduced = Bpat.restrict(rows_kept, cols_kept)
    if exact:
        jac = [tuple(jrows[i][j] for j in cols_kept) for i in rows_kept]
    else:
        jac = J[np.ix_(rows_kept, cols_kept)] if rows_kept and cols_kept else np.zeros(
            (len(rows_kept), len(cols_kept))
        )
    return KernelSupport(R_K, C_K, rows_kept, cols_kept, reduced, jac)


@dataclass(frozen=True)
class SeqResult:
    rows: tuple[int, ...]  # surviving row ids (w.r.t. the input pattern)
    cols: tuple[int, ...]  # surviving column ids
    pattern: ZeroPattern
    jacobian: object
    iterations: int


def seq(Bpat: ZeroPattern, J, tol: float | None = None, exact: bool = False) -> SeqResult:
    """Alternate the Kőnig restriction and the kernel reduction to a fixed
    point: at most ``rows`` iterations; may legitimately end empty."""
    tol = rank_tolerance(tol)
    rows = tuple(range(Bpat.rows))
    cols = tuple(range(Bpat.cols))
    pat = Bpat
    jac = J
    for it in range(1, Bpat.rows + 2):
        cover = koenig_cover(pat)
        keep_rows = tuple(sorted(cover.R0))
        keep_cols = tuple(j for j in range(pat.cols) if j not in cover.C0)
        sub_pat = pat.restrict(keep_rows, keep_cols)
        if exact:
            sub_jac = [tuple(jac[i][j] for j in keep_cols) for i in keep_rows]
        else:
            arr = np.asarray(jac, dtype=float)
            sub_jac = (
                arr[np.ix_(keep_rows, keep_cols)]
                if keep_rows and keep_cols
                else np.zeros((len(keep_rows), len(keep_cols)))
            )
        ks = kernel_support(sub_pat, sub_jac, tol, exact)
        new_rows = tuple(keep_rows[i] for i in ks.rows_kept)
        new_cols = tuple(keep_cols[j] for j in ks.cols_kept)
        stable = new_rows == tuple(range(pat.rows)) and new_cols == tuple(range(pat.cols))
        rows = tuple(rows[i] for i in new_rows)
        cols = tuple(cols[j] for j in new_cols)
        pat = ks.pattern
        jac = ks.jacobian
        if stable or not rows:
            return SeqResult(rows, cols, pat, jac, it)
    raise RuntimeError("Seq failed to stabilize (bug)")


def _select_invertible_columns(J, pattern: ZeroPattern, tol: float, exact: bool):
    """Pick one column per row, leftmost-pivot Gaussian style, so that the
    selected square submatrix of J is nonsingular."""
    nrows = pattern.rows
    if nrows == 0:
        return ()
    if exact:
        work = [list(r) for r in J]
    else:
        work = [list(map(float, r)) for r in np.asarray(J, dtype=float)]
    ncols = pattern.cols
    chosen = []
    used_rows: set[int] = set()
    scale = 1.0
    if not exact:
        top = max((abs(v) for r in work for v in r), default=1.0)
        scale = top if top > 0 else 1.0
    for j in range(ncols):
        if len(chosen) == nrows:
            break
        pivot_row = None
        best = None
        for i in range(nrows):
            if i in used_rows:
                continue
            v = work[i][j]
            ok = (v != 0) if exact else (abs(v) > tol * scale)
            if ok and (best is None or abs(v) > best):
                best = abs(v)
                pivot_row = i
        if pivot_row is None:
            continue
        chosen.append(j)
        used_rows.add(pivot_row)
        pv = work[pivot_row][j]
        for i in range(nrows):
            if i == pivot_row or i in used_rows:
                continue
            f = work[i][j] / pv
            for k in range(ncols):
                work[i][k] -= f * work[pivot_row][k]
    if len(chosen) != nrows:
        return None
    return tuple(chosen)


@dataclass(frozen=True)
class ORegLevel:
    Y1: tuple[int, ...]  # columns chosen at this level (variable indices)
    rows: tuple[int, ...]  # equations handled at this level


@dataclass(frozen=True)
class ORegResult:
    status: str  # "found" | "failed"
    failure: str | None  # None | "structural" | "near-singular"
    Y: frozenset[int]
    certificate: tuple[ORegLevel, ...]
    nabla: float | Fraction | None

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def depth(self) -> int:
        return len(self.certificate)


def _o_reg_rec(system: DiffSystem, point: JetPoint, rows, cols, tol, exact, levels):
    if not rows:
        return frozenset()
    A = order_matrix(system)
    entries = A.entries
    if len(rows) > len(cols):
        return None
    for i in rows:
        if all(entries[i][j] == NEG_INF for j in cols):
            return None
    cols = [j for j in cols if any(entries[i][j] != NEG_INF for i in rows)]
    b_cols = [j for j in cols if all(entries[i][j] in (0, NEG_INF) for i in rows)]
    pattern = ZeroPattern(
        rows=len(rows),
        cols=len(b_cols),
        adjacency=tuple(
            tuple(jj for jj, j in enumerate(b_cols) if entries[i][j] == 0) for i in rows
        ),
    )
    sub_system = DiffSystem(system.variables, tuple(system.equations[i] for i in rows))
    J = jacobian_at(sub_system, [(j, 0) for j in b_cols], point, exact=exact)
    res = seq(pattern, J, tol, exact)
    if not res.rows:
        return None
    chosen = _select_invertible_columns(res.jacobian, res.pattern, rank_tolerance(tol), exact)
    if chosen is None:
        return None
    level_rows = tuple(rows[i] for i in res.rows)
    Y1 = tuple(b_cols[res.cols[j]] for j in chosen)
    levels.append(ORegLevel(Y1=Y1, rows=level_rows))
    next_rows = [i for i in rows if i not in set(level_rows)]
    survived_cols = {b_cols[j] for j in res.cols}
    next_cols = [j for j in cols if j not in survived_cols]
    Y2 = _o_reg_rec(system, point, next_rows, next_cols, tol, exact, levels)
    if Y2 is None:
        return None
    return frozenset(Y1) | Y2


def o_reg(system: DiffSystem, point: JetPoint, tol: float | None = None, exact: bool = False) -> ORegResult:
    """Regularity test at a point: find Y with zero restricted tropical
    determinant and a nonvanishing truncated determinant there.

    Column identities are global throughout the recursion.  A structural
    failure (empty reduction) is distinguished from a near-singular final
    determinant check.
    """
    tol = rank_tolerance(tol)
    levels: list[ORegLevel] = []
    Y = _o_reg_rec(
        system, point, list(range(system.n_eqs)), list(range(system.n_vars)), tol, exact, levels
    )
    if Y is None:
        return ORegResult("failed", "structural", frozenset(), tuple(levels), None)
    nabla = truncated_determinant_at(system, sorted(Y), point, exact=exact)
    ok = (nabla != 0) if exact else abs(nabla) > tol
    if not ok:
        return ORegResult("failed", "near-singular", frozenset(Y), tuple(levels), nabla)
    return ORegResult("found", None, frozenset(Y), tuple(levels), nabla)


def o_reg_bruteforce(system: DiffSystem, point: JetPoint, tol: float | None = None) -> bool:
    """Oracle: does any size-s column subset have O = 0 and |nabla| > tol?"""
    tol = rank_tolerance(tol)
    A = order_matrix(system)
    s, n = A.rows, A.cols
    if s > n:
        return False
    for cols in itertools.combinations(range(n), s):
        if tropical_det_bruteforce(A.submatrix(range(s), cols)) != 0:
            continue
        nabla = truncated_determinant_at(system, list(cols), point)
        if abs(nabla) > tol:
            return True
    return False


@dataclass(frozen=True)
class BlockRank:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    rank: int
    full: bool


@dataclass(frozen=True)
class RegularityCheck:
    blocks: tuple[BlockRank, ...]
    regular: bool  # every block has full row rank: sufficient for regularity
    necessary_applicable: bool  # dense blocks or the (m-1)-subrank hypothesis


def sufficient_regularity_check(
    system: DiffSystem,
    sigma_blocks,
    xi_blocks,
    point: JetPoint,
    tol: float | None = None,
) -> RegularityCheck:
    """Per-block rank test: rank of d(Sigma_h)/d(Xi_h) at the point must be
    the block's equation count.  Also reports whether the block structure
    satisfies a density/subrank hypothesis making the condition necessary
    as well."""
    tol = rank_tolerance(tol)
    A = order_matrix(system)
    reports = []
    necessary = True
    for sigma, xi in zip(sigma_blocks, xi_blocks):
        sub = DiffSystem(system.variables, tuple(system.equations[i] for i in sigma))
        J = jacobian_at(sub, [(j, 0) for j in xi], point)
        rank = _matrix_rank([list(r) for r in J], tol, exact=False)
        reports.append(BlockRank(tuple(sigma), tuple(xi), rank, rank == len(sigma)))
        dense = all(A.entries[i][j] == 0 for i in sigma for j in xi)
        subrank_ok = True
        if not dense and len(sigma) > 1:
            for drop in range(len(sigma)):
                keep = [r for k, r in enumerate(sigma) if k != drop]
                sub2 = DiffSystem(system.variables, tuple(system.equations[i] for i in keep))
                J2 = jacobian_at(sub2, [(j, 0) for j in xi], point)
                if _matrix_rank([list(r) for r in J2], tol, exact=False) != len(keep):
                    subrank_ok = False
                    break
        if not (dense or subrank_ok):
            necessary = False
    return RegularityCheck(
        blocks=tuple(reports),
        regular=all(b.full for b in reports),
        necessary_applicable=necessary,
    )

"""Detection of chained (saddle-number-zero) structure in order matrices.

``o_test`` decides in polynomial time whether some size-s column subset Y
has a zero restricted tropical determinant, returning Y and the block
partition discovered along the way; ``saddle_jacobi_bruteforce`` is the
exponential oracle it is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .matching import ZeroPattern, koenig_cover
from .tropical import NEG_INF, ExtMatrix, SizeLimitError, tropical_det_bruteforce


@dataclass(frozen=True)
class Block:
    """One recursion level: equations Sigma_h and variable block Xi_h."""

    sigma: tuple[int, ...]  # row indices
    xi: tuple[int, ...]  # column indices (the {0,-inf} columns kept at this level)


@dataclass(frozen=True)
class OTestResult:
    status: str  # "found" | "failed"
    Y: frozenset[int]
    blocks: tuple[Block, ...]  # ordered Xi_1 first (last discovered block first)

    @property
    def found(self) -> bool:
        return self.status == "found"


def _o_test_rec(A: ExtMatrix, row_ids, col_ids, blocks) -> frozenset[int] | None:
    if not row_ids:
        return frozenset()
    entries = A.entries
    if len(row_ids) > len(col_ids):
        return None
    for i in row_ids:
        if not any(entries[i][j] == 0 for j in col_ids):
            return None
    # drop all -inf columns, then split off the {0,-inf} columns
    col_ids = [j for j in col_ids if any(entries[i][j] != NEG_INF for i in row_ids)]
    b_cols = [
        j for j in col_ids if all(entries[i][j] in (0, NEG_INF) for i in row_ids)
    ]
    pattern = ZeroPattern(
        rows=len(row_ids),
        cols=len(b_cols),
        adjacency=tuple(
            tuple(jj for jj, j in enumerate(b_cols) if entries[i][j] == 0) for i in row_ids
        ),
    )
    cover = koenig_cover(pattern, prefer_high_cols=True)
    if not cover.R0:
        return None
    matched = dict(cover.matching)
    R0_global = [row_ids[i] for i in sorted(cover.R0)]
    C0_global = {b_cols[j] for j in cover.C0}
    Y1 = frozenset(b_cols[matched[i]] for i in cover.R0)
    blocks.append(
        Block(
            sigma=tuple(R0_global),
            xi=tuple(j for j in b_cols if j not in C0_global),
        )
    )
    next_rows = [i for i in row_ids if i not in set(R0_global)]
    keep = set(col_ids) - (set(b_cols) - C0_global)
    next_cols = [j for j in col_ids if j in keep]
    Y2 = _o_test_rec(A, next_rows, next_cols, blocks)
    if Y2 is None:
        return None
    return Y1 | Y2


def o_test(A: ExtMatrix) -> OTestResult:
    """Search for Y with a zero restricted tropical determinant (saddle test).

    Each level peels off the Kőnig row part R0 of the submatrix B of
    {0,-inf} columns together with the columns of B outside C0; failure at
    any level means the saddle number is not 0.
    """
    blocks: list[Block] = []
    Y = _o_test_rec(A, list(range(A.rows)), list(range(A.cols)), blocks)
    if Y is None:
        return OTestResult(status="failed", Y=frozenset(), blocks=())
    return OTestResult(status="found", Y=Y, blocks=tuple(reversed(blocks)))


def saddle_jacobi_bruteforce(A: ExtMatrix, max_cols: int = 12, max_rows: int = 8):
    """Minimum over size-s column subsets of the restricted tropical determinant.

    NEG_INF when no subset has a finite determinant (or s > n). Exponential;
    guarded oracle.
    """
    s, n = A.rows, A.cols
    if n > max_cols or s > max_rows:
        raise SizeLimitError(f"saddle brute force limited to {max_rows}x{max_cols}")
    if s > n:
        return NEG_INF
    best = None
    for cols in itertools.combinations(range(n), s):
        det = tropical_det_bruteforce(A.submatrix(range(s), cols))
        if det == NEG_INF:
            continue
        if best is None or det < best:
            best = det
    return NEG_INF if best is None else best


@dataclass(frozen=True)
class LevelReport:
    level: int
    sizes_match: bool  # i)   #Xi_{h-1} == #Sigma_h
    order_one_transversal: bool  # ii)  O_{Xi_{h-1}, Sigma_h} == #Xi_{h-1}
    zero_transversal: bool  # iii) O_{Xi_h, Sigma_h} == 0
    dense: bool  # iv)  every a_ij == 0 on Sigma_h x Xi_h
    triangular: bool  # no variable of a later block appears
    chained: bool
    strictly_chained: bool


@dataclass(frozen=True)
class BlockTriangularReport:
    levels: tuple[LevelReport, ...]
    block_triangular: bool  # i)-iii) at every level
    dense: bool
    triangular: bool


def classify_block_triangular(A, sigma_blocks, xi_blocks) -> BlockTriangularReport:
    """Check the order-1 block-triangular conditions on a candidate partition.

    ``A`` is an order matrix or a parsed differential system.
    ``sigma_blocks`` lists the equation blocks Sigma_1..Sigma_p and
    ``xi_blocks`` the variable blocks Xi_0..Xi_p (row/column index lists).
    Level h is checked for: matching sizes with Xi_{h-1}; a full transversal
    of order-1 entries on (Sigma_h, Xi_{h-1}); a zero transversal on
    (Sigma_h, Xi_h); density of zeros there; triangularity (no dependence on
    later blocks); and the chained / strictly chained refinements.
    """
    if not isinstance(A, ExtMatrix):
        from .jets import order_matrix

        A = order_matrix(A)
    if len(xi_blocks) != len(sigma_blocks) + 1:
        raise ValueError("need one more variable block (Xi_0) than equation blocks")
    all_rows = [i for blk in sigma_blocks for i in blk]
    if sorted(all_rows) != list(range(A.rows)):
        raise ValueError("equation blocks must partition the rows")
    all_cols = [j for blk in xi_blocks for j in blk]
    if len(set(all_cols)) != len(all_cols) or any(j >= A.cols for j in all_cols):
        raise ValueError("variable blocks must be disjoint column sets")

    levels = []
    for h, sigma in enumerate(sigma_blocks, start=1):
        xi_prev = list(xi_blocks[h - 1])
        xi_here = list(xi_blocks[h])
        sub_prev = A.submatrix(sigma, xi_prev)
        sub_here = A.submatrix(sigma, xi_here)
        sizes = len(xi_prev) == len(sigma)
        o_prev = tropical_det_bruteforce(sub_prev) if len(sigma) <= len(xi_prev) else NEG_INF
        order_one = o_prev == len(xi_prev) and sizes
        o_here = (
            tropical_det_bruteforce(sub_here) if len(sigma) <= len(xi_here) else NEG_INF
        )
        zero_tr = o_here == 0
        dense = all(
            A.entries[i][j] == 0 for i in sigma for j in xi_here
        )
        later = {j for blk in xi_blocks[h + 1 :] for j in blk}
        allowed = {j for blk in xi_blocks[: h + 1] for j in blk}
        triangular = True
        chained = True
        strictly = True
        for i in sigma:
            for j in range(A.cols):
                v = A.entries[i][j]
                if v == NEG_INF:
                    continue
                if j in later or j not in allowed:
                    triangular = False
                if j not in set(xi_prev) | set(xi_here):
                    chained = False
                if j in xi_prev and v != 1:
                    strictly = False
                if j in xi_prev and v > 1:
                    triangular = False
                elif j not in xi_prev and v > 0:
                    triangular = False
        strictly = strictly and chained
        levels.append(
            LevelReport(
                level=h,
                sizes_match=sizes,
                order_one_transversal=order_one,
                zero_transversal=zero_tr,
                dense=dense,
                triangular=triangular,
                chained=chained,
                strictly_chained=strictly,
            )
        )
    ok = all(lv.sizes_match and lv.order_one_transversal and lv.zero_transversal for lv in levels)
    return BlockTriangularReport(
        levels=tuple(levels),
        block_triangular=ok and all(lv.triangular for lv in levels),
        dense=all(lv.dense for lv in levels),
        triangular=all(lv.triangular for lv in levels),
    )

"""Maximum bipartite matching and the canonical Kőnig row/column cover."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .tropical import ExtMatrix

_UNSET = -1
_INF = float("inf")


@dataclass(frozen=True)
class ZeroPattern:
    """Candidate transversal positions of a matrix (rows x cols boolean grid).

    ``adjacency[i]`` lists the columns where row i has a candidate, in
    ascending order.
    """

    rows: int
    cols: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_grid(cls, grid) -> "ZeroPattern":
        grid = [list(row) for row in grid]
        rows = len(grid)
        cols = len(grid[0]) if grid else 0
        adjacency = tuple(tuple(j for j in range(cols) if grid[i][j]) for i in range(rows))
        return cls(rows, cols, adjacency)

    @classmethod
    def from_matrix_zeros(cls, A: ExtMatrix) -> "ZeroPattern":
        """Pattern of the 0 entries of an order matrix (the {0,-inf} -> {1,0} view)."""
        adjacency = tuple(
            tuple(j for j in range(A.cols) if A.entries[i][j] == 0) for i in range(A.rows)
        )
        return cls(A.rows, A.cols, adjacency)

    def restrict(self, rows, cols) -> "ZeroPattern":
        rows = list(rows)
        cols = list(cols)
        pos = {j: jj for jj, j in enumerate(cols)}
        adjacency = tuple(
            tuple(pos[j] for j in self.adjacency[i] if j in pos) for i in rows
        )
        return ZeroPattern(len(rows), len(cols), adjacency)


@dataclass(frozen=True)
class KoenigResult:
    matching: frozenset[tuple[int, int]]
    R0: frozenset[int]
    C0: frozenset[int]
    size: int


def hopcroft_karp(P: ZeroPattern, prefer_high_cols: bool = False) -> dict[int, int]:
    """Maximum-cardinality matching, returned as a row -> column mapping.

    Deterministic: rows are processed in ascending order; within a row the
    candidate columns are tried ascending (or descending when
    ``prefer_high_cols`` is set, which reproduces the transversal choices of
    the chained-system detector's reference outputs).
    """
    order = tuple(
        tuple(sorted(adj, reverse=prefer_high_cols)) for adj in P.adjacency
    )
    pair_row = [_UNSET] * P.rows
    pair_col = [_UNSET] * P.cols
    dist = [0.0] * P.rows

    def bfs() -> bool:
        queue = deque()
        for r in range(P.rows):
            if pair_row[r] == _UNSET:
                dist[r] = 0.0
                queue.append(r)
            else:
                dist[r] = _INF
        found = _INF
        while queue:
            r = queue.popleft()
            if dist[r] >= found:
                continue
            for c in order[r]:
                other = pair_col[c]
                if other == _UNSET:
                    found = min(found, dist[r] + 1)
                elif dist[other] == _INF:
                    dist[other] = dist[r] + 1
                    queue.append(other)
        return found != _INF

    def dfs(r: int) -> bool:
        for c in order[r]:
            other = pair_col[c]
            if other == _UNSET or (dist[other] == dist[r] + 1 and dfs(other)):
                pair_row[r] = c
                pair_col[c] = r
                return True
        dist[r] = _INF
        return False

    while bfs():
        for r in range(P.rows):
            if pair_row[r] == _UNSET:
                dfs(r)
    return {r: c for r, c in enumerate(pair_row) if c != _UNSET}


def koenig_cover(P: ZeroPattern, prefer_high_cols: bool = False) -> KoenigResult:
    """Kőnig decomposition with the inclusion-maximal row part.

    R0 is the set of rows not reachable from an unmatched row by an
    alternating path, C0 the columns that are reachable; this is the unique
    cover of size ``|matching|`` whose row part contains every other row
    part, and every candidate position lies in an R0 row or a C0 column.
    """
    matching = hopcroft_karp(P, prefer_high_cols=prefer_high_cols)
    matched_col = {c: r for r, c in matching.items()}
    seen_rows = set(r for r in range(P.rows) if r not in matching)
    seen_cols: set[int] = set()
    queue = deque(seen_rows)
    while queue:
        r = queue.popleft()
        for c in P.adjacency[r]:
            if c in seen_cols or matching.get(r) == c:
                continue
            seen_cols.add(c)
            other = matched_col.get(c)
            if other is not None and other not in seen_rows:
                seen_rows.add(other)
                queue.append(other)
    R0 = frozenset(range(P.rows)) - seen_rows
    C0 = frozenset(seen_cols)
    return KoenigResult(
        matching=frozenset(matching.items()),
        R0=R0,
        C0=C0,
        size=len(matching),
    )

"""Order matrices over the tropical (max, +) semiring: determinants, canons, covers.

Entries live in ``int | NEG_INF`` where ``NEG_INF`` is the IEEE -inf value.
Addition saturates (``NEG_INF + x == NEG_INF``) and ``max(NEG_INF, x) == x``,
so plain Python arithmetic implements the extended integers directly; the
only rule is that no float other than -inf is ever stored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

NEG_INF: float = float("-inf")

ExtInt = int | float  # the float member is only ever NEG_INF


class SizeLimitError(ValueError):
    """Raised when a brute-force oracle is asked for more than it can chew."""


class NoTransversalError(ValueError):
    """Raised when a square matrix has no finite transversal family."""


def as_extint(v) -> ExtInt:
    if isinstance(v, bool):
        raise TypeError(f"matrix entry must be int or -inf, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        if v == NEG_INF:
            return NEG_INF
        if v.is_integer():
            return int(v)
        raise TypeError(f"matrix entry must be int or -inf, got {v!r}")
    raise TypeError(f"matrix entry must be int or -inf, got {v!r}")


@dataclass(frozen=True)
class ExtMatrix:
    """A rectangular matrix of extended integers (derivative orders)."""

    entries: tuple[tuple[ExtInt, ...], ...]

    @classmethod
    def from_rows(cls, rows) -> "ExtMatrix":
        tup = tuple(tuple(as_extint(v) for v in row) for row in rows)
        if tup and any(len(r) != len(tup[0]) for r in tup):
            raise ValueError("ragged matrix")
        return cls(tup)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def submatrix(self, rows, cols) -> "ExtMatrix":
        rows = tuple(rows)
        cols = tuple(cols)
        return ExtMatrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def padded_square(self, fill: int = 0) -> "ExtMatrix":
        """Pad with rows of ``fill`` until square (requires rows <= cols)."""
        s, n = self.rows, self.cols
        if s > n:
            raise ValueError("cannot pad a matrix with more rows than columns")
        pad = tuple(tuple(fill for _ in range(n)) for _ in range(n - s))
        return ExtMatrix(self.entries + pad)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        for row in self.entries:
            lines.append(" ".join("-inf" if v == NEG_INF else str(v) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExtMatrix":
        tokens_by_line = [
            ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")
        ]
        if not tokens_by_line:
            raise ValueError("empty matrix file")
        header = tokens_by_line[0]
        if len(header) != 2:
            raise ValueError("first line must be 's n'")
        s, n = int(header[0]), int(header[1])
        body = tokens_by_line[1:]
        if len(body) != s:
            raise ValueError(f"expected {s} matrix rows, found {len(body)}")
        rows = []
        for ln in body:
            if len(ln) != n:
                raise ValueError(f"expected {n} entries per row, found {len(ln)}")
            rows.append([NEG_INF if tok == "-inf" else int(tok) for tok in ln])
        return cls.from_rows(rows)


@dataclass(frozen=True)
class Canon:
    """A row-shift vector making a full transversal family of column maxima."""

    l: tuple[int, ...]
    witness: tuple[int, ...] | None = None  # row i matched to column witness[i]


@dataclass(frozen=True)
class Cover:
    """Row/column weights with a_ij <= mu_i + nu_j everywhere."""

    mu: tuple[ExtInt, ...]
    nu: tuple[ExtInt, ...]


def tropical_det_bruteforce(A: ExtMatrix, limit: int = 9) -> ExtInt:
    """Maximal transversal sum by exhaustion over all injections rows -> cols.

    Exponential; intended as a test oracle. Rows above ``limit`` are refused.
    """
    s, n = A.rows, A.cols
    if s > n:
        return NEG_INF
    if s == 0:
        return 0
    if s > limit:
        raise SizeLimitError(f"brute force limited to {limit} rows, got {s}")
    best = NEG_INF
    rows = A.entries
    for cols in itertools.permutations(range(n), s):
        total = 0
        for i, j in enumerate(cols):
            v = rows[i][j]
            if v == NEG_INF:
                break
            total += v
        else:
            if total > best:
                best = total
    return best


def _column_maxima(entries, l, rows, cols):
    """Max of a_ij + l_i per column over finite entries (NEG_INF if none)."""
    maxima = {}
    for j in cols:
        m = NEG_INF
        for i in rows:
            v = entries[i][j]
            if v != NEG_INF and v + l[i] > m:
                m = v + l[i]
        maxima[j] = m
    return maxima


def _transversal_matching(entries, l, rows, cols):
    """Maximum matching on positions attaining their column maximum.

    Deterministic: rows in order, candidate columns ascending, augmenting
    paths explored in that order (ties resolved toward low column indices).
    """
    from .matching import ZeroPattern, hopcroft_karp

    maxima = _column_maxima(entries, l, rows, cols)
    rows = list(rows)
    cols = list(cols)
    adjacency = []
    for i in rows:
        adjacency.append(
            tuple(
                jj
                for jj, j in enumerate(cols)
                if entries[i][j] != NEG_INF and entries[i][j] + l[i] == maxima[j]
            )
        )
    pattern = ZeroPattern(len(rows), len(cols), tuple(adjacency))
    local = hopcroft_karp(pattern)
    return {rows[li]: cols[lj] for li, lj in local.items()}


def _has_full_matching(A: ExtMatrix) -> bool:
    from .matching import ZeroPattern, hopcroft_karp

    adjacency = tuple(
        tuple(j for j in range(A.cols) if A.entries[i][j] != NEG_INF) for i in range(A.rows)
    )
    pattern = ZeroPattern(A.rows, A.cols, adjacency)
    return len(hopcroft_karp(pattern)) == A.rows


def minimal_canon(A: ExtMatrix) -> Canon:
    """Unique componentwise-minimal canon, by Jacobi's raising algorithm.

    Starts from the zero vector and repeatedly raises the "third class"
    rows (rows without a starred transversal maximum, plus every row with a
    path to one) by 1 until a full transversal family of column maxima
    exists.  Rectangular inputs with fewer rows than columns are padded with
    zero rows; the padding is stripped from the result.
    """
    s, n = A.rows, A.cols
    if s > n:
        raise ValueError("minimal_canon requires rows <= cols")
    if s == 0:
        return Canon(l=(), witness=())
    padded = A.padded_square() if s < n else A
    if not _has_full_matching(padded):
        raise NoTransversalError("no transversal family: tropical determinant is -inf")

    entries = padded.entries
    m = padded.rows
    rows = range(m)
    cols = range(m)
    l = [0] * m
    # Each raise increases sum(l) by >= 1 and sum(minimal canon) is bounded
    # by m * (max - min finite entry); guard generously.
    finite = [v for row in entries for v in row if v != NEG_INF]
    cap = m * (max(finite) - min(finite) + 1) + m + 1
    for _ in range(cap):
        matching = _transversal_matching(entries, l, rows, cols)
        if len(matching) == m:
            witness = tuple(matching[i] for i in range(s))
            return Canon(l=tuple(l[:s]), witness=witness)
        maxima = _column_maxima(entries, l, rows, cols)
        third = set(rows) - set(matching)
        # close under "path to a third-class row": starred row i1 joins when
        # another third-class row attains the maximum in column matching[i1]
        changed = True
        while changed:
            changed = False
            for i1, j1 in matching.items():
                if i1 in third:
                    continue
                for i2 in third:
                    v = entries[i2][j1]
                    if v != NEG_INF and v + l[i2] == maxima[j1]:
                        third.add(i1)
                        changed = True
                        break
        for i in third:
            l[i] += 1
    raise RuntimeError("canon raising failed to terminate (bug)")


def canon_to_cover(A: ExtMatrix, canon: Canon) -> Cover:
    """Minimal cover associated with a canon: mu_i = max l - l_i, nu from mu."""
    if A.rows == 0:
        return Cover(mu=(), nu=tuple(NEG_INF for _ in range(A.cols)))
    top = max(canon.l)
    mu = tuple(top - li for li in canon.l)
    nu = []
    for j in range(A.cols):
        best = NEG_INF
        for i in range(A.rows):
            v = A.entries[i][j]
            if v != NEG_INF and v - mu[i] > best:
                best = v - mu[i]
        nu.append(best)
    return Cover(mu=mu, nu=tuple(nu))


def cover_to_canon(mu) -> tuple[int, ...]:
    """Canon associated with the row part of a minimal cover."""
    mu = tuple(mu)
    if not mu:
        return ()
    top = max(mu)
    return tuple(top - m for m in mu)


def is_canon(A: ExtMatrix, l) -> bool:
    l = tuple(l)
    if len(l) != A.rows or any(li < 0 for li in l):
        return False
    matching = _transversal_matching(A.entries, l, range(A.rows), range(A.cols))
    return len(matching) == A.rows


def path_relation(A: ExtMatrix, canon: Canon) -> tuple[tuple[bool, ...], ...]:
    """Reflexive-transitive closure of the elementary path relation.

    There is an elementary path from row i1 to row i2 when the starred entry
    of row i1 reappears (after the l-shift) as the column maximum in row i2.
    """
    s = A.rows
    if canon.witness is None:
        raise ValueError("canon has no witness")
    l = canon.l
    entries = A.entries
    reach = [[i == k for k in range(s)] for i in range(s)]
    for i1 in range(s):
        j = canon.witness[i1]
        star = entries[i1][j] + l[i1]
        for i2 in range(s):
            v = entries[i2][j]
            if i2 != i1 and v != NEG_INF and v + l[i2] == star:
                reach[i1][i2] = True
    for k in range(s):
        for i in range(s):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(s):
                    if row_k[j]:
                        row_i[j] = True
    return tuple(tuple(r) for r in reach)


def is_minimal_canon(A: ExtMatrix, l) -> bool:
    """A canon is minimal iff every row has a path to a row with l = 0."""
    l = tuple(l)
    if not is_canon(A, l):
        return False
    if not l:
        return True
    matching = _transversal_matching(A.entries, l, range(A.rows), range(A.cols))
    canon = Canon(l=l, witness=tuple(matching[i] for i in range(A.rows)))
    reach = path_relation(A, canon)
    zero_rows = [i for i in range(A.rows) if l[i] == 0]
    return all(any(reach[i][z] for z in zero_rows) for i in range(A.rows))


def isoperimetric_matrix(orders) -> ExtMatrix:
    """Order matrix of a stationarity system whose i-th equation reaches
    order ``orders[i] + orders[j]`` in the j-th variable.

    Minimal canon, cover and tropical determinant all have closed forms
    (max e - e_i; e_i - min e and e_j + min e; twice the order sum), which
    makes the family a convenient generator of nontrivial fixtures.
    """
    e = [int(v) for v in orders]
    return ExtMatrix.from_rows([[ei + ej for ej in e] for ei in e])


def tropical_det_from_canon(A: ExtMatrix, canon: Canon) -> ExtInt:
    """Transversal sum certified by the canon's witness."""
    if canon.witness is None:
        raise ValueError("canon has no witness")
    if not canon.witness:
        return 0
    return sum(A.entries[i][j] for i, j in enumerate(canon.witness))

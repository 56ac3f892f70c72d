"""Differential systems in jet coordinates: order matrices, Jacobians, and
truncated determinants evaluated at a point."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as ex
from . import parser
from .tropical import (
    NEG_INF,
    Canon,
    Cover,
    ExtMatrix,
    canon_to_cover,
    minimal_canon,
)


@dataclass(frozen=True)
class DiffSystem:
    """Named variables plus one differential polynomial per equation."""

    variables: tuple[str, ...]
    equations: tuple

    @classmethod
    def parse(cls, text: str) -> "DiffSystem":
        names, eqs = parser.parse_system_source(text)
        return cls(tuple(names), tuple(eqs))

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_eqs(self) -> int:
        return len(self.equations)

    def var_index(self, name: str) -> int:
        return self.variables.index(name)


def parse_system(text: str) -> DiffSystem:
    return DiffSystem.parse(text)


@dataclass
class JetPoint:
    """Finite assignment of jet variables; unset ones read 0 unless strict."""

    values: dict[tuple[int, int], float] = field(default_factory=dict)
    strict: bool = False

    @classmethod
    def from_names(cls, system: DiffSystem, mapping, strict: bool = False) -> "JetPoint":
        """Build from ``{"x5": 0.0, "x2:1": 3.0}`` style keys (name[:order])."""
        values = {}
        for key, val in mapping.items():
            name, _, order = key.partition(":")
            idx = system.var_index(name)
            values[(idx, int(order) if order else 0)] = val
        return cls(values, strict=strict)


def order_matrix(system: DiffSystem) -> ExtMatrix:
    rows = []
    for eq in system.equations:
        rows.append([ex.order_in(eq, j) for j in range(system.n_vars)])
    return ExtMatrix.from_rows(rows) if rows else ExtMatrix(())


def jacobian_at(system: DiffSystem, targets, point: JetPoint, exact: bool = False):
    """Matrix of partials d(equation i) / d(x_j^(k)) for (j, k) in ``targets``.

    ``targets`` is a sequence of (variable index, derivative order) pairs.
    Returns a numpy array of floats, or a list of Fraction rows when
    ``exact`` is set.
    """
    rows = []
    for eq in system.equations:
        row = []
        for (j, k) in targets:
            d = ex.diff(eq, j, k)
            row.append(ex.evaluate(d, point.values, strict=point.strict, exact=exact))
        rows.append(row)
    if exact:
        return [tuple(r) for r in rows]
    return np.array(rows, dtype=float)


def restricted_cover(system: DiffSystem, columns) -> tuple[ExtMatrix, Canon, Cover]:
    """Order matrix restricted to ``columns`` with its minimal canon and cover."""
    A = order_matrix(system)
    sub = A.submatrix(range(system.n_eqs), columns)
    canon = minimal_canon(sub)
    cover = canon_to_cover(sub, canon)
    return sub, canon, cover


def truncated_determinant_at(system: DiffSystem, columns, point: JetPoint, exact: bool = False):
    """Jacobi's truncated system determinant for the variables in ``columns``.

    The Jacobi cover (alpha, beta) of the restricted order matrix selects,
    for every equation/variable pair, the jet variable of order
    ``alpha_i + beta_j``; entries where the actual order falls short differ
    from that jet order and are identically 0.  Requires as many columns as
    equations and a finite restricted tropical determinant.
    """
    columns = list(columns)
    if len(columns) != system.n_eqs:
        raise ValueError("need exactly one column per equation")
    _, canon, cover = restricted_cover(system, columns)
    targets = []
    entries = []
    for i, eq in enumerate(system.equations):
        row = []
        for jj, j in enumerate(columns):
            k = cover.mu[i] + cover.nu[jj]
            if k == NEG_INF or k < 0:
                row.append(Fraction(0) if exact else 0.0)
                continue
            d = ex.diff(eq, j, int(k))
            row.append(ex.evaluate(d, point.values, strict=point.strict, exact=exact))
        entries.append(row)
    if exact:
        return _fraction_det(entries)
    return float(np.linalg.det(np.array(entries, dtype=float)))


def _fraction_det(rows) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                factor = m[r][c] * inv
                for k in range(c, n):
                    m[r][k] -= factor * m[c][k]
    return det

import math
from fractions import Fraction

import numpy as np
import pytest

from flatchain import expr as ex
from flatchain.jets import (
    JetPoint,
    jacobian_at,
    order_matrix,
    parse_system,
    restricted_cover,
    truncated_determinant_at,
)
from flatchain.parser import ParseError
from flatchain.tropical import NEG_INF

from conftest import fixture_text, pq_system


class TestParser:
    def test_simple_equation(self):
        S = parse_system("x1 + d(x2,1)")
        assert S.variables == ("x1", "x2")
        assert order_matrix(S).entries == ((0, 1),)

    def test_pq_first_equation(self):
        S = parse_system("x1^2 + x6 + d(x7,1)")
        assert order_matrix(S).entries == ((0, NEG_INF, NEG_INF, NEG_INF, NEG_INF, 0, 1),)

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_system("d(x1,1) +")
        assert err.value.line == 1
        assert "value" in str(err.value)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_system("x1 + speed")

    def test_malformed_derivative(self):
        with pytest.raises(ParseError, match="malformed derivative"):
            parse_system("d(x1, x2)")
        with pytest.raises(ParseError, match="order must be"):
            parse_system("d(x1, 1.5)")

    def test_unbalanced_parentheses(self):
        with pytest.raises(ParseError, match="unbalanced|value"):
            parse_system("(x1 + x2")

    def test_alias_header(self):
        S = parse_system("vars: V gamma\nd(V,1) + sin(gamma)")
        assert S.variables == ("V", "gamma")
        assert order_matrix(S).entries == ((1, 0),)
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_system("vars: V gamma\nd(V,1) + x3")

    def test_functions_and_division(self):
        S = parse_system("sin(x1) * cos(x2) - tan(x1) + x1/x2 + recip(x2)")
        pt = JetPoint({(0, 0): 0.3, (1, 0): 0.7})
        val = ex.evaluate(S.equations[0], pt.values)
        expected = (
            math.sin(0.3) * math.cos(0.7) - math.tan(0.3) + 0.3 / 0.7 + 1.0 / 0.7
        )
        assert val == pytest.approx(expected, rel=1e-14)

    def test_comments_and_blank_lines(self):
        S = parse_system("# header\n\nx1 + x2  # trailing\n")
        assert S.n_eqs == 1

    def test_round_trip_through_text(self):
        S = parse_system(fixture_text("ex_nnr.dsys"))
        rendered = "\n".join(ex.to_text(eq) for eq in S.equations)
        again = parse_system(rendered)
        assert order_matrix(again) == order_matrix(S)


class TestOrderMatrix:
    def test_jac_fixture(self):
        S = parse_system(fixture_text("ex_jac.dsys"))
        assert order_matrix(S).entries == ((0, 1, NEG_INF), (1, 2, 0), (NEG_INF, 3, 1))

    def test_nnr_fixture(self, nnr_system):
        expected = (
            (0, NEG_INF, 1, NEG_INF, NEG_INF, 0),
            (0, NEG_INF, NEG_INF, 1, 0, NEG_INF),
            (1, NEG_INF, 0, NEG_INF, NEG_INF, NEG_INF),
            (NEG_INF, 1, NEG_INF, 0, NEG_INF, NEG_INF),
        )
        assert order_matrix(nnr_system).entries == expected

    def test_single_variable(self):
        assert order_matrix(parse_system("x1")).entries == ((0,),)

    def test_invariant_under_lower_order_terms(self):
        a = parse_system("d(x1,3) + x2")
        b = parse_system("d(x1,3) + d(x1,2) + x1 + x2")
        assert order_matrix(a) == order_matrix(b)


class TestDifferentiation:
    def test_partial_example(self, nnr_system):
        # d(x6^2)/dx6 at x6 = 2
        J = jacobian_at(nnr_system, [(5, 0)], JetPoint({(5, 0): 2.0}))
        assert J[0, 0] == pytest.approx(4.0)

    def test_absent_variable_is_zero(self, nnr_system):
        J = jacobian_at(nnr_system, [(1, 3)], JetPoint({}))
        assert np.all(J == 0.0)

    def test_pq3_candidate_block_jacobian(self):
        S = pq_system(3)
        J = jacobian_at(S, [(0, 0), (1, 0), (2, 0), (3, 0)], JetPoint({}))
        assert J.tolist() == [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
        ]

    def test_against_finite_differences(self, rng):
        S = parse_system(
            "x1^3 * sin(x2) + d(x3,2)^2 - recip(1 + x1^2) + tan(x2)*d(x1,1)\n"
            "cos(x1*x2) + d(x2,1)*d(x3,2) - 2*x3"
        )
        targets = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 2)]
        for _ in range(100):
            vals = {t: float(v) for t, v in zip(targets, rng.uniform(-1.2, 1.2, len(targets)))}
            J = jacobian_at(S, targets, JetPoint(vals))
            for col, tgt in enumerate(targets):
                h = 1e-6
                up = dict(vals)
                up[tgt] += h
                dn = dict(vals)
                dn[tgt] -= h
                for row, eq in enumerate(S.equations):
                    fd = (ex.evaluate(eq, up) - ex.evaluate(eq, dn)) / (2 * h)
                    assert J[row, col] == pytest.approx(fd, rel=1e-6, abs=1e-7)

    def test_strict_mode(self):
        S = parse_system("x1 * x2")
        with pytest.raises(ex.EvalError, match="not set"):
            ex.evaluate(S.equations[0], {(0, 0): 1.0}, strict=True)
        # d/dx1 (x1 x2) = x2, so strict evaluation needs x2 but not x1
        with pytest.raises(ex.EvalError, match="not set"):
            jacobian_at(S, [(0, 0)], JetPoint({(0, 0): 1.0}, strict=True))
        J = jacobian_at(S, [(0, 0)], JetPoint({(1, 0): 3.0}, strict=True))
        assert J[0, 0] == 3.0


class TestTruncatedDeterminant:
    def test_nnr_full_complement(self, nnr_system):
        # Y = {x3, x4, x5, x6}: the determinant is -6 x5^2 x6 (the product of
        # the two block determinants; it vanishes exactly on x5 x6 = 0)
        pt = JetPoint({(4, 0): 2.0, (5, 0): 1.0})
        val = truncated_determinant_at(nnr_system, [2, 3, 4, 5], pt)
        assert abs(val) == pytest.approx(6.0 * 4.0 * 1.0, rel=1e-12)
        pt0 = JetPoint({(4, 0): 0.0, (5, 0): 3.0})
        assert truncated_determinant_at(nnr_system, [2, 3, 4, 5], pt0) == pytest.approx(0.0)

    def test_nnr_alternative_set(self, nnr_system):
        pt = JetPoint({(4, 0): 0.0, (5, 0): 1.0})
        val = truncated_determinant_at(nnr_system, [0, 2, 3, 5], pt)
        assert abs(val) == pytest.approx(2.0, rel=1e-12)

    def test_isoperimetric_quadratic_is_hessian(self, rng):
        # stationarity equations of a quadratic form: P_i = sum_j H_ij x_j,
        # all orders zero, so the truncated determinant is det H exactly
        H = rng.integers(-3, 4, size=(3, 3))
        H = (H + H.T + 5 * np.eye(3, dtype=int)).tolist()
        lines = []
        for i in range(3):
            terms = [f"{H[i][j]}*x{j + 1}" for j in range(3)]
            lines.append(" + ".join(terms))
        S = parse_system("\n".join(lines))
        val = truncated_determinant_at(S, [0, 1, 2], JetPoint({}))
        assert val == pytest.approx(np.linalg.det(np.array(H, dtype=float)), rel=1e-9)

    def test_exact_rational_mode(self, nnr_system):
        pt = JetPoint({(4, 0): Fraction(1, 3), (5, 0): Fraction(1, 2)})
        val = truncated_determinant_at(nnr_system, [2, 3, 4, 5], pt, exact=True)
        assert isinstance(val, Fraction)
        assert abs(val) == Fraction(6, 1) * Fraction(1, 9) * Fraction(1, 2)

    def test_restricted_cover_of_jac_fixture(self):
        S = parse_system(fixture_text("ex_jac.dsys"))
        _, canon, cover = restricted_cover(S, [0, 1, 2])
        assert canon.l == (2, 1, 0)
        assert cover.mu == (0, 1, 2)
        assert cover.nu == (0, 1, -1)

    def test_requires_square_selection(self, nnr_system):
        with pytest.raises(ValueError):
            truncated_determinant_at(nnr_system, [0, 1], JetPoint({}))

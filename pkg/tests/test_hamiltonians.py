import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

import stellar as st
from stellar.dynamics import operator_symmetry_deficit
from stellar.errors import ExpressionSemanticError, ExpressionSyntaxError, ResourceError
from stellar.hamiltonians import FACTORS, PairTerm, SymTerm, TensorTerm, parse, pretty

X, Y, Z, I2 = FACTORS["X"], FACTORS["Y"], FACTORS["Z"], FACTORS["I"]


class TestParse:
    def test_pair_shorthand(self):
        expr = parse("H(2,3)")
        assert expr.terms == (PairTerm(1.0, 2, 3),)
        h = st.build_matrix(expr).matrix
        assert np.allclose(h, 0.5 * (np.kron(Y, Z) + np.kron(Z, Y)))

    def test_pair_combination(self):
        expr = parse("1/sqrt(2)*H(2,3) + 1/sqrt(2)*H(0,3)")
        assert expr.terms == (
            PairTerm(1 / math.sqrt(2), 2, 3),
            PairTerm(1 / math.sqrt(2), 0, 3),
        )

    def test_sym_body(self):
        expr = parse("sym(X Z P0)")
        assert expr.terms == (SymTerm(1.0, ("X", "Z", "P0")),)

    def test_plain_tensor_with_signs(self):
        expr = parse("-1*X x Y + -1*Y x X")
        assert expr.terms == (TensorTerm(-1.0, ("X", "Y")), TensorTerm(-1.0, ("Y", "X")))

    def test_coefficient_forms(self):
        assert parse("0.5*Z").terms[0].coeff == 0.5
        assert parse("1/2*Z").terms[0].coeff == 0.5
        assert parse("sqrt(2)*Z").terms[0].coeff == pytest.approx(math.sqrt(2))
        assert parse("1/sqrt(2)*Z").terms[0].coeff == pytest.approx(1 / math.sqrt(2))

    def test_minus_separator(self):
        expr = parse("Z x Z - X x X")
        assert expr.terms[1].coeff == -1.0

    def test_unknown_factor_reports_location(self):
        with pytest.raises(ExpressionSyntaxError) as err:
            parse("X x Q")
        assert err.value.token == "Q"
        assert err.value.line == 1 and err.value.column == 5

    def test_truncated_input(self):
        with pytest.raises(ExpressionSyntaxError):
            parse("X x")

    def test_arity_mismatch(self):
        with pytest.raises(ExpressionSemanticError):
            parse("X x X + Z")

    def test_pair_mixed_with_higher_arity(self):
        with pytest.raises(ExpressionSemanticError):
            parse("H(0,3) + X x X x X")

    def test_pair_index_range(self):
        with pytest.raises(ExpressionSemanticError):
            parse("H(0,4)")

    def test_whitespace_insensitive(self):
        a = st.build_matrix(parse("1/sqrt(2)*H(2,3)+1/sqrt(2)*H(0,3)")).matrix
        b = st.build_matrix(parse(" 1 / sqrt( 2 ) * H( 2 , 3 )  +  1/sqrt(2) * H(0,3) ")).matrix
        assert np.array_equal(a, b)


class TestBuildMatrix:
    def test_xy_plus_yx(self):
        h = st.build_matrix(parse("-1*X x Y + -1*Y x X")).matrix
        ket00 = np.array([1, 0, 0, 0], dtype=complex)
        out = h @ ket00
        assert np.allclose(out, [0, 0, 0, -2j])

    def test_pair_diagonal(self):
        h = st.build_matrix(parse("H(0,3)")).matrix
        assert np.allclose(h, 0.5 * (np.kron(I2, Z) + np.kron(Z, I2)))
        assert np.allclose(h, np.diag([1.0, 0.0, 0.0, -1.0]))

    def test_sym_distinct_arrangements(self):
        h = st.build_matrix(parse("sym(X Z P0)")).matrix
        mats = {"X": X, "Z": Z, "P0": FACTORS["P0"]}
        expected = np.zeros((8, 8), dtype=complex)
        import itertools

        for arr in set(itertools.permutations(("X", "Z", "P0"))):
            expected += np.kron(np.kron(mats[arr[0]], mats[arr[1]]), mats[arr[2]])
        assert np.allclose(h, expected)

    def test_sym_repeated_factors_counted_once(self):
        h = st.build_matrix(parse("sym(X X Z)")).matrix
        expected = (
            np.kron(np.kron(X, X), Z) + np.kron(np.kron(X, Z), X) + np.kron(np.kron(Z, X), X)
        )
        assert np.allclose(h, expected)

    def test_hermitian_and_symmetric(self):
        for src in ("H(1,2)", "sym(X Z P0)", "0.3*sym(Y P1) - 2*sym(Z Z)"):
            op = st.build_matrix(parse(src))
            assert np.abs(op.matrix - op.matrix.conj().T).max() <= 1e-12
            assert operator_symmetry_deficit(op.matrix, op.n) <= 1e-12

    def test_size_limit(self):
        src = " x ".join(["I"] * 15)
        with pytest.raises(ResourceError):
            st.build_matrix(parse(src))

    def test_projector_factors(self):
        h = st.build_matrix(parse("P0 x P1 + P1 x P0")).matrix
        assert np.allclose(h, np.diag([0.0, 1.0, 1.0, 0.0]))


_FACTOR_NAMES = sorted(FACTORS)


def _terms():
    coeff = hs.floats(
        min_value=-8, max_value=8, allow_nan=False, allow_infinity=False
    ).filter(lambda c: abs(c) > 1e-6)
    factors = hs.lists(hs.sampled_from(_FACTOR_NAMES), min_size=2, max_size=4)
    tensor = hs.builds(lambda c, f: TensorTerm(c, tuple(f)), coeff, factors)
    sym = hs.builds(lambda c, f: SymTerm(c, tuple(f)), coeff, factors)
    return hs.one_of(tensor, sym)


class TestPrettyPrint:
    @given(hs.lists(_terms(), min_size=1, max_size=4))
    @settings(max_examples=100, deadline=None)
    def test_round_trip(self, terms):
        arity = terms[0].arity
        terms = tuple(
            t if t.arity == arity else type(t)(t.coeff, t.factors[:arity] + ("I",) * (arity - len(t.factors[:arity])))
            for t in terms
        )
        expr = st.HamiltonianExpr(terms)
        assert parse(pretty(expr)) == expr

    def test_pair_round_trip(self):
        expr = st.HamiltonianExpr((PairTerm(-0.25, 1, 3), PairTerm(2.0, 0, 2)))
        assert parse(pretty(expr)) == expr

"""Property tests for the core invariants (hypothesis-driven)."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from bracealg.linalg import QQ, Matrix, kernel_basis, rank, rref, solve
from bracealg.algebra import build_truncated_polynomial
from bracealg import hochschild as H


small_rational = st.fractions(
    min_value=Fraction(-4), max_value=Fraction(4), max_denominator=3
)


@st.composite
def matrices(draw, max_dim=5):
    rows = draw(st.integers(1, max_dim))
    cols = draw(st.integers(1, max_dim))
    ent = draw(
        st.lists(
            st.lists(small_rational, min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
    return Matrix([[QQ.of(x.numerator, x.denominator) for x in r] for r in ent], QQ)


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_rref_idempotent(m):
    red, piv = rref(m)
    red2, piv2 = rref(red)
    assert red2 == red and piv2 == piv


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel_basis(m).dim == m.cols


@settings(max_examples=40, deadline=None)
@given(matrices(), st.lists(small_rational, min_size=1, max_size=5))
def test_solve_is_exact_or_certifiably_inconsistent(m, b):
    b = [QQ.of(x.numerator, x.denominator) for x in b[: m.rows]]
    b = b + [QQ.zero] * (m.rows - len(b))
    v = solve(m, b)
    if v is None:
        assert rank(m.augment(Matrix.column_vector(b))) > rank(m)
    else:
        assert m.apply(v) == b


LAM = build_truncated_polynomial(2)


@st.composite
def cochains(draw, max_arity=2):
    p = draw(st.integers(0, max_arity))
    j = draw(st.integers(0, 1))
    d = LAM.dim
    ent = draw(
        st.lists(
            st.lists(st.integers(-3, 3), min_size=d**p, max_size=d**p),
            min_size=d,
            max_size=d,
        )
    )
    return H.Cochain.from_matrix(LAM, p, Matrix.from_int_rows(ent), j)


@settings(max_examples=25, deadline=None)
@given(cochains())
def test_d_squared_vanishes(c):
    assert H.differential(H.differential(c)).is_zero()


@settings(max_examples=25, deadline=None)
@given(cochains(), cochains())
def test_bracket_graded_antisymmetry(x, y):
    px = (x.arities() or [0])[0]
    py = (y.arities() or [0])[0]
    sign = QQ.one if ((px - 1) * (py - 1)) % 2 == 0 else -QQ.one
    assert (H.bracket(x, y) + H.bracket(y, x).scale(sign)).is_zero()


@settings(max_examples=20, deadline=None)
@given(cochains(max_arity=1), cochains(max_arity=1), cochains(max_arity=1))
def test_cup_associative(a, b, c):
    assert (H.cup(H.cup(a, b), c) - H.cup(a, H.cup(b, c))).is_zero()

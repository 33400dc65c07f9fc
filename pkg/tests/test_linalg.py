import random

import pytest

from bracealg.linalg import (
    GF,
    QQ,
    Matrix,
    SubspaceBasis,
    SubspaceNotContained,
    image_basis,
    intersect,
    kernel_basis,
    quotient_basis,
    rank,
    rref,
    solve,
)


def rand_matrix(rng, rows, cols, field=QQ):
    return Matrix(
        [[field.of(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rows)],
        field,
    )


def test_rref_identity():
    m = Matrix.identity(2)
    red, piv = rref(m)
    assert red == m
    assert piv == [0, 1]


def test_rref_rank_one():
    m = Matrix.from_int_rows([[2, 4], [1, 2]])
    red, piv = rref(m)
    assert red == Matrix.from_int_rows([[1, 2], [0, 0]])
    assert piv == [0]


def test_rref_idempotent_random():
    rng = random.Random(7)
    for _ in range(10):
        m = rand_matrix(rng, 5, 7)
        red, piv = rref(m)
        red2, piv2 = rref(red)
        assert red2 == red and piv2 == piv
        assert piv == sorted(piv)


def test_kernel_identity_empty():
    assert kernel_basis(Matrix.identity(4)).dim == 0


def test_kernel_zero_full():
    assert kernel_basis(Matrix.zeros(3, 3)).dim == 3


def test_kernel_substitution():
    m = Matrix.from_int_rows([[1, 1, 0]])
    ker = kernel_basis(m)
    assert ker.dim == 2
    for v in ker.vectors():
        assert all(x == QQ.zero for x in m.apply(v))


def test_rank_nullity_random():
    rng = random.Random(3)
    for _ in range(12):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = rand_matrix(rng, r, c)
        assert rank(m) + kernel_basis(m).dim == c


def test_solve_identity():
    b = [QQ.of(3), QQ.of(-1, 2), QQ.of(0)]
    assert solve(Matrix.identity(3), b) == b


def test_solve_exact_or_none():
    rng = random.Random(11)
    for _ in range(20):
        m = rand_matrix(rng, 4, 3)
        b = [QQ.of(rng.randint(-3, 3)) for _ in range(4)]
        v = solve(m, b)
        if v is None:
            assert rank(m.augment(Matrix.column_vector(b))) > rank(m)
        else:
            assert m.apply(v) == b


def test_quotient_by_itself_zero():
    s = SubspaceBasis(3, [[1, 0, 0], [0, 1, 0]], QQ)
    reps, proj = quotient_basis(s, s)
    assert reps == []
    assert proj(s.vectors()[0]) == []


def test_quotient_dim_random_nested():
    rng = random.Random(5)
    for _ in range(10):
        n = 6
        vecs = [[QQ.of(rng.randint(-2, 2)) for _ in range(n)] for _ in range(4)]
        big = SubspaceBasis(n, vecs, QQ)
        small = SubspaceBasis(n, big.vectors()[: rng.randint(0, big.dim)], QQ)
        reps, proj = quotient_basis(big, small)
        assert len(reps) == big.dim - small.dim
        # projection kills exactly the small subspace
        for v in small.vectors():
            assert all(x == QQ.zero for x in proj(v))


def test_quotient_not_contained_raises():
    big = SubspaceBasis(3, [[1, 0, 0]], QQ)
    small = SubspaceBasis(3, [[0, 1, 0]], QQ)
    with pytest.raises(SubspaceNotContained):
        quotient_basis(big, small)


def test_image_basis_column_space():
    m = Matrix.from_int_rows([[1, 2], [0, 0], [1, 2]])
    im = image_basis(m)
    assert im.dim == 1
    assert im.contains([QQ.of(1), QQ.of(0), QQ.of(1)])


def test_intersect():
    a = SubspaceBasis(3, [[1, 0, 0], [0, 1, 0]], QQ)
    b = SubspaceBasis(3, [[0, 1, 0], [0, 0, 1]], QQ)
    c = intersect(a, b)
    assert c.dim == 1
    assert c.contains([QQ.of(0), QQ.of(1), QQ.of(0)])


def test_prime_field_roundtrip():
    f = GF(23)
    m = Matrix([[f.of(2), f.of(4)], [f.of(1), f.of(2)]], f)
    red, piv = rref(m)
    assert piv == [0]
    assert red.entries[0] == [f.one, f.of(2)]


def test_subspace_canonical_equality():
    a = SubspaceBasis(3, [[1, 1, 0], [0, 1, 1]], QQ)
    b = SubspaceBasis(3, [[1, 0, -1], [0, 2, 2]], QQ)
    assert a == b

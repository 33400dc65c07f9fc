import random

import pytest

from bracealg.algebra import build_truncated_polynomial
from bracealg.linalg import Matrix, QQ, kernel_basis, rank
from bracealg import hochschild as H


LAM2 = build_truncated_polynomial(2)
LAM3 = build_truncated_polynomial(3)


def rc(lam, p, j, rng, norm=False):
    return H.random_cochain(lam, p, j, rng, normalized=norm)


def total(c):
    ar = c.arities()
    return (ar[0] if ar else 0) - 2 * c.iota


def sgn(lam, e):
    return lam.field.one if e % 2 == 0 else -lam.field.one


# -- differential -----------------------------------------------------------


def test_zero_cochain_differential_commutative():
    a = H.Cochain.from_matrix(LAM2, 0, Matrix([[QQ.of(2)], [QQ.of(5)]]), 0)
    assert H.differential(a).is_zero()


def test_derivation_is_cocycle():
    # x d/dx on k[x]/(x^3)
    m = Matrix.zeros(3, 3, QQ).entries
    for i in range(3):
        m[i][i] = QQ.of(i)
    D = H.Cochain.from_matrix(LAM3, 1, Matrix(m, QQ), 0)
    assert H.differential(D).is_zero()


def test_identity_cochain_not_cocycle():
    I = H.Cochain.from_matrix(LAM2, 1, Matrix.identity(2, QQ), 0)
    assert not H.differential(I).is_zero()


@pytest.mark.parametrize("lam", [LAM2, LAM3])
def test_d_squared_zero_random(lam):
    rng = random.Random(11)
    for p in range(0, 4):
        c = rc(lam, p, rng.choice([0, 1]), rng)
        assert H.differential(H.differential(c)).is_zero()


def test_d_equals_bracket_with_m2():
    rng = random.Random(2)
    c = rc(LAM2, 2, 0, rng)
    m2 = H.Cochain.multiplication(LAM2)
    assert (H.differential(c) - H.bracket(m2, c)).is_zero()


# -- braces ------------------------------------------------------------------


def test_brace_vanishes_low_arity():
    rng = random.Random(3)
    x = rc(LAM2, 1, 0, rng)
    y1, y2 = rc(LAM2, 1, 0, rng), rc(LAM2, 2, 0, rng)
    assert H.brace(x, [y1, y2]).is_zero()


def brace_relation_holds(lam, x, ys, zs):
    p, q = len(ys), len(zs)
    lhs = H.brace(H.brace(x, ys), zs)
    rhs = H.Cochain.zero(lam, lhs.iota)

    def positions(k, start):
        if k == p:
            yield []
            return
        for i in range(start, q + 1):
            for j in range(i, q + 1):
                for rest in positions(k + 1, j):
                    yield [(i, j)] + rest

    for pos in positions(0, 0):
        eps = 0
        for k, (i, _) in enumerate(pos):
            eps += (total(ys[k]) - 1) * sum(total(zs[l]) - 1 for l in range(i))
        args = []
        cur = 0
        for k, (i, j) in enumerate(pos):
            args.extend(zs[cur:i])
            args.append(H.brace(ys[k], zs[i:j]))
            cur = j
        args.extend(zs[cur:])
        rhs = rhs + H.brace(x, args).scale(sgn(lam, eps))
    return (lhs - rhs).is_zero()


@pytest.mark.parametrize("pq", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_brace_relation(pq):
    p, q = pq
    rng = random.Random(100 + 10 * p + q)
    for _ in range(3):
        x = rc(LAM2, rng.randint(max(p, 1), 3), rng.choice([0, 1]), rng)
        ys = [rc(LAM2, rng.randint(0, 2), 0, rng) for _ in range(p)]
        zs = [rc(LAM2, rng.randint(0, 2), 0, rng) for _ in range(q)]
        assert brace_relation_holds(LAM2, x, ys, zs)


def lemma_differential_holds(lam, x0, xs):
    n = len(xs)
    lhs = H.differential(H.brace(x0, xs))
    rhs = H.brace(H.differential(x0), xs)
    degs = [total(x0)] + [total(x) for x in xs]
    for i in range(1, n + 1):
        e = sum(degs[j] for j in range(i)) - i
        rhs = rhs + H.brace(x0, xs[: i - 1] + [H.differential(xs[i - 1])] + xs[i:]).scale(sgn(lam, e))
    e = degs[0] - 1 + degs[0] * degs[1]
    rhs = rhs + H.cup(xs[0], H.brace(x0, xs[1:])).scale(sgn(lam, e))
    for i in range(1, n):
        e = sum(degs[j] for j in range(i + 1)) - i - 1
        merged = xs[: i - 1] + [H.cup(xs[i - 1], xs[i])] + xs[i + 1 :]
        rhs = rhs + H.brace(x0, merged).scale(sgn(lam, e))
    e = sum(degs[j] for j in range(n)) - n - 1
    rhs = rhs + H.cup(H.brace(x0, xs[:-1]), xs[-1]).scale(sgn(lam, e))
    return (lhs - rhs).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lemma_braces_vs_differential(n):
    rng = random.Random(200 + n)
    for _ in range(4):
        x0 = rc(LAM2, rng.randint(n, 3), rng.choice([0, 1]), rng)
        xs = [rc(LAM2, rng.randint(0, 2), rng.choice([0, 1]), rng) for _ in range(n)]
        assert lemma_differential_holds(LAM2, x0, xs)


def lemma_cup_holds(lam, x, y, zs):
    n = len(zs)
    lhs = H.brace(H.cup(x, y), zs)
    rhs = H.Cochain.zero(lam, lhs.iota)
    for i in range(n + 1):
        e = total(y) * sum((total(z) - 1) for z in zs[:i])
        rhs = rhs + H.cup(H.brace(x, zs[:i]), H.brace(y, zs[i:])).scale(sgn(lam, e))
    return (lhs - rhs).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_lemma_braces_vs_cup(n):
    rng = random.Random(300 + n)
    for _ in range(4):
        x = rc(LAM2, rng.randint(0, 2), rng.choice([0, 1]), rng)
        y = rc(LAM2, rng.randint(0, 2), rng.choice([0, 1]), rng)
        zs = [rc(LAM2, rng.randint(0, 2), 0, rng) for _ in range(n)]
        assert lemma_cup_holds(LAM2, x, y, zs)


def test_cup_unit_laws_and_associativity():
    rng = random.Random(4)
    u = H.Cochain.unit_cochain(LAM2)
    c = rc(LAM2, 2, 1, rng)
    assert (H.cup(u, c) - c).is_zero()
    assert (H.cup(c, u) - c).is_zero()
    a, b, d = rc(LAM2, 1, 0, rng), rc(LAM2, 2, 0, rng), rc(LAM2, 1, 1, rng)
    assert (H.cup(H.cup(a, b), d) - H.cup(a, H.cup(b, d))).is_zero()


def test_bracket_even_square():
    rng = random.Random(5)
    x = rc(LAM2, 2, 0, rng)  # even total degree
    assert (H.bracket(x, x) - H.brace(x, [x]).scale(QQ.of(2))).is_zero()


def test_graded_jacobi():
    rng = random.Random(6)
    for _ in range(5):
        x = rc(LAM2, rng.randint(1, 2), rng.choice([0, 1]), rng)
        y = rc(LAM2, rng.randint(1, 2), 0, rng)
        z = rc(LAM2, rng.randint(1, 2), 0, rng)
        lhs = H.bracket(x, H.bracket(y, z))
        rhs = H.bracket(H.bracket(x, y), z) + H.bracket(y, H.bracket(x, z)).scale(
            sgn(LAM2, (total(x) - 1) * (total(y) - 1))
        )
        assert (lhs - rhs).is_zero()


# -- cohomology --------------------------------------------------------------


def test_hh_dims_k():
    lam = build_truncated_polynomial(1)
    assert len(H.cohomology(lam, 0, 0)) == 1
    for p in (1, 2, 3):
        assert len(H.cohomology(lam, p, 0)) == 0


def test_hh_dims_kx2():
    assert len(H.cohomology(LAM2, 0, 0)) == 2  # centre = Lambda
    for p in (1, 2, 3, 4):
        assert len(H.cohomology(LAM2, p, p // 2)) == 1


def full_complex_dims(lam, pmax):
    """Independent oracle: ranks of the unnormalized cochain complex."""
    d = lam.dim
    dims = []
    prev_rank = 0
    for p in range(pmax + 1):
        src = d * d**p
        cols = []
        for t in range(src):
            m = Matrix.zeros(d, d**p, lam.field).entries
            row, col = t % d, t // d
            m[row][col] = lam.field.one
            c = H.Cochain.from_matrix(lam, p, Matrix(m, lam.field, _copy=False), 0)
            dc = H.differential(c)
            mat = dc.component_matrix(p + 1)
            vec = []
            for cc in range(d ** (p + 1)):
                vec.extend(mat.entries[r][cc] for r in range(d))
            cols.append(vec)
        Dp = Matrix([[cols[j][i] for j in range(src)] for i in range(d * d ** (p + 1))], lam.field)
        kdim = kernel_basis(Dp).dim
        dims.append(kdim - prev_rank)
        prev_rank = rank(Dp)
    return dims


def test_hh_dims_cross_checked_against_bar_complex():
    assert full_complex_dims(LAM2, 4) == [2, 1, 1, 1, 1]
    assert [len(H.cohomology(LAM2, p, 0)) for p in range(5)] == [2, 1, 1, 1, 1]
    assert full_complex_dims(LAM3, 3) == [3, 2, 2, 2]
    assert [len(H.cohomology(LAM3, p, 0)) for p in range(4)] == [3, 2, 2, 2]


def test_cap_too_low():
    with pytest.raises(H.CapTooLow):
        H.cohomology(LAM2, H.DEFAULT_CAP, 0)


def test_cup_graded_commutative_in_cohomology_only():
    # cochain level may fail, class level holds
    rng = random.Random(8)
    x = H.cohomology(LAM2, 1, 0)[0]
    y = H.cohomology(LAM2, 2, 1)[0]
    xy = x.cup_cls(y)
    yx = y.cup_cls(x)
    s = (total(x.representative)) * (total(y.representative))
    expect = yx.scale(sgn(LAM2, s))
    assert xy == expect
    # exhibit non-commutativity at cochain level (unnormalized pair)
    found = False
    for _ in range(20):
        a = rc(LAM2, 1, 0, rng, norm=False)
        b = rc(LAM2, 2, 0, rng, norm=False)
        lhs = H.cup(a, b)
        rhs = H.cup(b, a).scale(sgn(LAM2, total(a) * total(b)))
        if not (lhs - rhs).is_zero():
            found = True
            break
    assert found


def test_leibniz_bracket_over_cup_class_level():
    # [x, y.z] = [x,y].z + (-1)^((|x|-1)|y|) y.[x,z] in cohomology
    for (px, jx), (py, jy), (pz, jz) in [
        ((1, 0), (1, 0), (2, 1)),
        ((2, 1), (1, 0), (1, 0)),
        ((1, 0), (2, 1), (1, 0)),
    ]:
        x = H.cohomology(LAM2, px, jx)[0]
        y = H.cohomology(LAM2, py, jy)[0]
        z = H.cohomology(LAM2, pz, jz)[0]
        lhs = x.bracket_cls(y.cup_cls(z))
        t1 = x.bracket_cls(y).cup_cls(z)
        t2 = y.cup_cls(x.bracket_cls(z)).scale(
            sgn(LAM2, (total(x.representative) - 1) * total(y.representative))
        )
        assert lhs == t1 + t2


# -- Euler-adjoined model -----------------------------------------------------


def test_euler_values():
    e2 = H.Cochain.euler(LAM2)
    val, j = e2.evaluate([(LAM2.unit, 1)])
    assert val == [-QQ.one, QQ.zero] and j == 1
    val0, _ = e2.evaluate([(LAM2.basis_vector(1), 0)])
    assert all(v == QQ.zero for v in val0)
    assert H.differential(e2).is_zero()


def test_bracket_table():
    iota_c = H.Cochain.iota_cochain(LAM2, 1)
    e2 = H.Cochain.euler(LAM2)
    hh = H.cohomology(LAM2, 2, 0)[0].representative
    assert H.bracket(iota_c, hh).is_zero()
    assert H.bracket(iota_c, H.Cochain.iota_cochain(LAM2, 1)).is_zero()
    assert H.bracket(e2, hh).is_zero()
    assert (H.bracket(e2, iota_c) + iota_c).is_zero()


def test_forward_backward_roundtrip():
    rng = random.Random(9)
    for _ in range(15):
        p = rng.randint(1, 3)
        j = rng.choice([0, 1, 2])
        x = rc(LAM2, p, j, rng, norm=True)
        y = rc(LAM2, p - 1, j, rng, norm=True)
        pair = H.EulerAdjoinedCochain(x, y)
        assert (H.hh_isos_forward(H.hh_isos_backward(pair)) - pair).is_zero()


def test_forward_iota_linear_zero_euler_part():
    rng = random.Random(10)
    x = rc(LAM2, 2, 1, rng, norm=True)
    fw = H.hh_isos_forward(x)
    assert fw.euler.is_zero() and (fw.plain - x).is_zero()


def test_restrict_j_chain_map():
    rng = random.Random(12)
    for _ in range(5):
        c = rc(LAM2, 2, 1, rng, norm=True)
        b = rc(LAM2, 1, 1, rng, norm=True)
        # j* of a coboundary is a coboundary (here: the identity on data)
        db = H.differential(b)
        assert (H.restrict_j(db) - H.differential(H.restrict_j(b))).is_zero()
        assert (H.restrict_j(H.differential(c)) - H.differential(H.restrict_j(c))).is_zero()


def test_restrict_of_multiplication():
    m2 = H.Cochain.multiplication(LAM2)
    assert (H.restrict_j(m2) - m2).is_zero()


# -- cocycle -> extension, Tate units -----------------------------------------


def test_cocycle_to_extension_zero():
    z = H.vec_to_cochain(LAM2, 4, 1, [QQ.zero] * H.normalized_space_dim(LAM2, 4))
    fmap = H.cocycle_to_extension(z)
    assert fmap.matrix.is_zero()


def test_not_a_cocycle_rejected():
    # over k[x]/(x^2) every normalized 4-cochain is a cocycle, so use an
    # unnormalized one to find a non-cocycle
    rng = random.Random(14)
    for _ in range(50):
        c = rc(LAM2, 4, 1, rng, norm=False)
        if not H.differential(c).is_zero():
            break
    else:
        pytest.fail("could not sample a non-cocycle")
    with pytest.raises(H.NotACocycle):
        H.cocycle_to_extension(c)


def test_coboundary_gives_non_stable_iso():
    rng = random.Random(15)
    b = rc(LAM2, 3, 1, rng, norm=True)
    db = H.differential(b)
    dbn = H.Cochain.from_matrix(LAM2, 4, db.component_matrix(4), 1)
    from bracealg.algebra import is_stable_iso

    fmap = H.cocycle_to_extension(dbn)
    assert not is_stable_iso(fmap)


def test_tate_unit_check_periodicity_class():
    u = H.cohomology(LAM2, 4, 1)[0]
    res = H.tate_unit_check(u)
    assert bool(res) and not res.separable


def test_tate_unit_check_zero_class_false():
    u = H.cohomology(LAM2, 4, 1)[0]
    zero = u.scale(QQ.zero)
    assert not H.tate_unit_check(zero)


def test_tate_unit_representative_independent():
    rng = random.Random(16)
    u = H.cohomology(LAM2, 4, 1)[0]
    b = rc(LAM2, 3, 1, rng, norm=True)
    rep2 = u.representative + H.differential(b)
    rep2 = H.Cochain.from_matrix(LAM2, 4, rep2.component_matrix(4), 1)
    u2 = H.HHClass(u.context, rep2)
    assert u2 == u
    assert bool(H.tate_unit_check(u2)) == bool(H.tate_unit_check(u))


def test_tate_unit_separable_flag():
    lam = build_truncated_polynomial(1)
    zero = H.HHClass(
        H.hh_context(lam, 4, 1),
        H.vec_to_cochain(lam, 4, 1, [QQ.zero] * H.normalized_space_dim(lam, 4)),
    )
    res = H.tate_unit_check(zero)
    assert bool(res) and res.separable


def test_wrong_bidegree():
    u = H.cohomology(LAM2, 2, 1)[0]
    with pytest.raises(H.WrongBidegree):
        H.tate_unit_check(u)


def test_divide_class():
    u = H.cohomology(LAM2, 4, 1)[0]
    x6 = H.cohomology(LAM2, 6, 2)[0]
    v = H.divide_class(x6, u)
    assert u.cup_cls(v) == x6


def test_cochain_json_dump():
    rng = random.Random(17)
    c = rc(LAM2, 2, 1, rng, norm=True)
    data = c.to_json()
    assert data["iota_power"] == 1 and "2" in data["components"]


def test_euler_derivation_operation():
    from bracealg.algebra import LaurentAlgebra

    lau = LaurentAlgebra(LAM2)
    e = H.euler_derivation(lau)
    assert e.plain.is_zero()
    # the pair (0, 1) models e2 itself: its honest cochain sends iota to -iota
    c = H.hh_isos_backward(e)
    val, j = c.evaluate([(LAM2.unit, 1)])
    assert val == [-QQ.one, QQ.zero] and j == 1
    # and the forward image of e2's honest cochain is the pair again
    assert (H.hh_isos_forward(c) - e).is_zero()


def test_forward_euler_free_part_is_restriction():
    rng = random.Random(21)
    x = rc(LAM2, 2, 1, rng, norm=True)
    fw = H.hh_isos_forward(x)
    assert (H.restrict_j(fw.plain) - H.restrict_j(x)).is_zero()


@pytest.mark.parametrize("lam", [build_truncated_polynomial(1), LAM2, LAM3])
def test_d_squared_exhaustive_basis_cochains(lam):
    # module invariant: d^2 = 0 on every basis cochain, p <= 4
    from bracealg.linalg import Matrix

    d = lam.dim
    for p in range(0, 5):
        if d ** p * d > 300:
            # full exhaustion is quadratic in this count; sample the basis
            # deterministically above desk scale
            idxs = range(0, d * d**p, 3)
        else:
            idxs = range(d * d**p)
        for t in idxs:
            m = Matrix.zeros(d, d**p, lam.field).entries
            m[t % d][t // d] = lam.field.one
            c = H.Cochain.from_matrix(lam, p, Matrix(m, lam.field, _copy=False), 0)
            assert H.differential(H.differential(c)).is_zero()

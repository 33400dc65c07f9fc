import pytest

from bracealg.linalg import QQ, Matrix, rank
from bracealg.algebra import (
    AlgebraSpecError,
    BimoduleMap,
    FiniteAlgebra,
    bar_resolution,
    build_truncated_polynomial,
    comparison_map_to_periodic,
    diagonal_bimodule,
    enveloping,
    free_rank_one_bimodule,
    is_stable_iso,
    is_symmetric,
    load_algebra,
    periodic_bimodule_resolution,
    strip_projective_summands,
    syzygy,
)


def k_algebra():
    return build_truncated_polynomial(1)


def kxx(n):
    return build_truncated_polynomial(n)


def two_copies_of_k():
    # k x k with componentwise multiplication
    z, o = 0, 1
    mult = [[[o, z], [z, z]], [[z, z], [z, o]]]
    return FiniteAlgebra(["e1", "e2"], [o, o], mult)


# -- finite algebras -------------------------------------------------------


def test_truncated_polynomial_n1_is_field():
    a = k_algebra()
    assert a.dim == 1
    assert a.mul([QQ.one], [QQ.one]) == [QQ.one]


def test_truncated_polynomial_n2():
    a = kxx(2)
    assert a.dim == 2
    x = a.basis_vector(1)
    assert a.mul(x, x) == [QQ.zero, QQ.zero]


def test_truncated_polynomial_n4_constructor_checks():
    # constructor runs the 64-triple associativity check
    a = kxx(4)
    assert a.dim == 4


def test_associativity_violation_rejected():
    # basis 1, a, b with a*a = b, a*b = 1, b*a = 0: (aa)b != a(ab)
    z3 = [0, 0, 0]
    mult = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
        [[0, 0, 1], z3, z3],
    ]
    with pytest.raises(AlgebraSpecError):
        FiniteAlgebra(["1", "a", "b"], [1, 0, 0], mult)


def test_enveloping_dims():
    assert enveloping(k_algebra()).dim == 1
    assert enveloping(kxx(2)).dim == 4
    e = enveloping(kxx(3))
    # spot-check (a(x)b)(c(x)d) = ac (x) db: (x(x)1)(x(x)x) = x^2 (x) x
    d = 3
    xb1 = 1 * d + 0
    xbx = 1 * d + 1
    prod = e.mult[xb1][xbx]
    expect = [QQ.zero] * 9
    expect[2 * d + 1] = QQ.one
    assert prod == expect


def test_center_and_units():
    a = kxx(2)
    assert a.center_basis().dim == 2  # commutative
    assert a.is_unit(a.element_from([1, 1]))
    assert not a.is_unit(a.element_from([0, 1]))
    inv = a.inverse(a.element_from([1, 1]))
    assert a.mul(inv, a.element_from([1, 1])) == a.unit


def test_radical_and_socle():
    a = kxx(3)
    assert a.radical_basis().dim == 2
    soc = a.socle_generator()
    assert soc is not None
    # socle of k[x]/(x^3) is spanned by x^2
    assert soc[2] and not soc[0] and not soc[1]
    e = enveloping(kxx(2))
    assert e.radical_basis().dim == 3
    assert e.socle_generator() is not None


# -- bar resolution --------------------------------------------------------


def test_bar_resolution_over_k():
    res = bar_resolution(k_algebra(), 3)
    assert [m.dim for m in res.modules] == [1, 1, 1, 1]
    # differentials alternate id/0 over k
    d1 = res.differential_matrix(1)
    d2 = res.differential_matrix(2)
    assert d1.is_zero() or rank(d1) == 1
    assert (d1 * d2).is_zero()
    assert res.exactness_verified_up_to == 2


def test_bar_resolution_kx2_rank_oracle():
    lam = kxx(2)
    res = bar_resolution(lam, 3)
    # rank of d_1 equals dim of the kernel of the augmentation
    aug = Matrix(
        [[res.augmentation[j][r] for j in range(res.modules[0].dim)] for r in range(lam.dim)],
        QQ,
    )
    assert rank(res.differential_matrix(1)) == res.modules[0].dim - rank(aug)


def test_bar_differential_squares_to_zero_kx3():
    lam = kxx(3)
    res = bar_resolution(lam, 3)
    for p in range(2, 4):
        dp = res.differential_matrix(p)
        dpm1 = res.differential_matrix(p - 1)
        assert (dpm1 * dp).is_zero()


# -- syzygies and the periodic oracle --------------------------------------


def test_syzygy_zero_is_diagonal():
    lam = kxx(2)
    res = bar_resolution(lam, 2)
    s0 = syzygy(res, 0)
    assert s0.dim == 2


def test_syzygy_dims_kx2():
    lam = kxx(2)
    res = bar_resolution(lam, 4)
    assert syzygy(res, 1).dim == 2
    assert syzygy(res, 2).dim == 6
    assert syzygy(res, 4).dim == 22


def test_periodic_resolution_is_exact():
    lam = kxx(3)
    res = periodic_bimodule_resolution(lam, 5)
    assert res.exactness_verified_up_to == 4


@pytest.mark.parametrize("n,k", [(2, 2), (2, 4), (3, 2), (3, 4)])
def test_syzygy_stably_isomorphic_to_lambda(n, k):
    lam = kxx(n)
    res = bar_resolution(lam, k)
    cmp_map = comparison_map_to_periodic(res, k)
    assert is_stable_iso(cmp_map)


# -- stripping -------------------------------------------------------------


def test_strip_free_module_to_zero():
    lam = kxx(2)
    free = free_rank_one_bimodule(lam)
    core, r = strip_projective_summands(free)
    assert core.dim == 0 and r == 1


def test_strip_diagonal_is_core():
    lam = kxx(2)
    diag = diagonal_bimodule(lam)
    core, r = strip_projective_summands(diag)
    assert core.dim == 2 and r == 0
    # idempotence
    core2, r2 = strip_projective_summands(core)
    assert core2.dim == 2 and r2 == 0


def test_strip_lambda_plus_free():
    lam = kxx(2)
    diag = diagonal_bimodule(lam)
    free = free_rank_one_bimodule(lam)

    def block(a, b):
        z1 = Matrix.zeros(a.rows, b.cols, QQ)
        z2 = Matrix.zeros(b.rows, a.cols, QQ)
        top = Matrix([ra + rb for ra, rb in zip(a.entries, z1.entries)], QQ)
        bot = Matrix([ra + rb for ra, rb in zip(z2.entries, b.entries)], QQ)
        return top.stack(bot)

    from bracealg.algebra import Bimodule

    summ = Bimodule(
        lam,
        [block(diag.left[i], free.left[i]) for i in range(2)],
        [block(diag.right[i], free.right[i]) for i in range(2)],
    )
    core, r = strip_projective_summands(summ)
    assert r == 1
    assert core.dim == 2


def test_strip_over_semisimple():
    lam = k_algebra()
    diag = diagonal_bimodule(lam)
    core, r = strip_projective_summands(diag)
    assert core.dim == 0 and r == 1


# -- stable isomorphism ----------------------------------------------------


def test_identity_is_stable_iso():
    lam = kxx(2)
    diag = diagonal_bimodule(lam)
    f = BimoduleMap(diag, diag, Matrix.identity(2, QQ))
    assert is_stable_iso(f)


def test_zero_map_not_stable_iso():
    lam = kxx(2)
    diag = diagonal_bimodule(lam)
    f = BimoduleMap(diag, diag, Matrix.zeros(2, 2, QQ))
    assert not is_stable_iso(f)


# -- symmetric forms -------------------------------------------------------


def test_symmetric_form_truncated_polynomial():
    for n in (1, 2, 3, 4):
        a = kxx(n)
        form = is_symmetric(a)
        assert form is not None
        # nondegenerate associative pairing; top coefficient involved
        assert form[n - 1]


def test_symmetric_form_k_times_k():
    a = two_copies_of_k()
    # the candidate (1, 0) is degenerate and must be rejected by the search
    form = is_symmetric(a)
    assert form is not None
    assert form[0] and form[1]


# -- JSON loader ------------------------------------------------------------


def test_load_algebra_roundtrip():
    a = kxx(3)
    data = a.to_json()
    b = load_algebra(data)
    assert b.mult == a.mult and b.unit == a.unit


def test_load_algebra_position_precise_errors():
    a = kxx(2)
    data = a.to_json()
    data["mult"][1][2] = ["1", "bogus"]
    with pytest.raises(AlgebraSpecError) as exc:
        load_algebra(data)
    assert "mult[1]" in str(exc.value)
    data2 = a.to_json()
    data2["unit"] = ["1"]
    with pytest.raises(AlgebraSpecError) as exc2:
        load_algebra(data2)
    assert "unit" in str(exc2.value)


def test_load_algebra_rejects_invariant_violations():
    # unit law broken: 1 * t = 1
    data = {
        "dim": 2,
        "labels": ["1", "t"],
        "unit": ["1", "0"],
        "mult": [[0, 0, ["1", "0"]], [0, 1, ["1", "0"]], [1, 0, ["0", "1"]], [1, 1, ["0", "0"]]],
    }
    with pytest.raises(AlgebraSpecError):
        load_algebra(data)
    # non-associative 3-dim table
    data3 = {
        "dim": 3,
        "labels": ["1", "a", "b"],
        "unit": ["1", "0", "0"],
        "mult": [
            [0, 0, ["1", "0", "0"]], [0, 1, ["0", "1", "0"]], [0, 2, ["0", "0", "1"]],
            [1, 0, ["0", "1", "0"]], [1, 1, ["0", "0", "1"]], [1, 2, ["1", "0", "0"]],
            [2, 0, ["0", "0", "1"]], [2, 1, ["0", "0", "0"]], [2, 2, ["0", "0", "0"]],
        ],
    }
    with pytest.raises(AlgebraSpecError):
        load_algebra(data3)

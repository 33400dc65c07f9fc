"""Dense exact linear algebra over the rationals (or a prime field).

All matrices are small (desk scale) and dense; elimination skips zero
multipliers, which makes the common sparse 0/±1 inputs cheap without a
separate sparse type.  Every operation is a pure function of its inputs,
values are never mutated after construction, and results are bit-exact.
"""

from __future__ import annotations

from fractions import Fraction

try:  # gmpy2's mpq is a drop-in, much faster rational
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover
    _mpq = Fraction
    _HAVE_GMPY = False


class SubspaceNotContained(Exception):
    """Raised when a quotient is requested by a non-subspace."""


class RationalField:
    """The field of rationals, elements are gmpy2.mpq (or Fraction)."""

    name = "QQ"

    def of(self, num, den=1):
        return _mpq(num, den)

    @property
    def zero(self):
        return _mpq(0)

    @property
    def one(self):
        return _mpq(1)

    def inv(self, x):
        return 1 / x

    def to_str(self, x):
        return str(x)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


def _fp_class(p):
    class Fp(int):
        __slots__ = ()

        def __new__(cls, v):
            return int.__new__(cls, v % p)

        def __add__(self, other):
            return Fp(int(self) + int(other))

        __radd__ = __add__

        def __sub__(self, other):
            return Fp(int(self) - int(other))

        def __rsub__(self, other):
            return Fp(int(other) - int(self))

        def __mul__(self, other):
            return Fp(int(self) * int(other))

        __rmul__ = __mul__

        def __neg__(self):
            return Fp(-int(self))

    return Fp


class PrimeField:
    """F_p for an odd prime p; elements stay reduced to [0, p)."""

    def __init__(self, p):
        if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError("p must be an odd prime, got %r" % (p,))
        self.p = p
        self.name = "GF(%d)" % p
        self._cls = _fp_class(p)

    def of(self, num, den=1):
        if den % self.p == 0:
            raise ZeroDivisionError("denominator divisible by p")
        return self._cls(num * pow(den, -1, self.p))

    @property
    def zero(self):
        return self._cls(0)

    @property
    def one(self):
        return self._cls(1)

    def inv(self, x):
        return self._cls(pow(int(x), -1, self.p))

    def to_str(self, x):
        return str(x)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


def GF(p):
    return PrimeField(p)


class Matrix:
    """Immutable dense matrix over an exact field."""

    __slots__ = ("rows", "cols", "entries", "field", "_rref")

    def __init__(self, entries, field=QQ, _copy=True, cols=None):
        if _copy:
            entries = [list(r) for r in entries]
        self.entries = entries
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else (cols or 0)
        for r in entries:
            if len(r) != self.cols:
                raise ValueError("ragged rows")
        self.field = field
        self._rref = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(rows, cols, field=QQ):
        z = field.zero
        return Matrix([[z] * cols for _ in range(rows)], field, _copy=False, cols=cols)

    @staticmethod
    def identity(n, field=QQ):
        z, o = field.zero, field.one
        ent = [[o if i == j else z for j in range(n)] for i in range(n)]
        return Matrix(ent, field, _copy=False)

    @staticmethod
    def from_int_rows(rows, field=QQ):
        return Matrix([[field.of(x) for x in r] for r in rows], field, _copy=False)

    @staticmethod
    def row_vector(vec, field=QQ):
        return Matrix([list(vec)], field)

    @staticmethod
    def column_vector(vec, field=QQ):
        return Matrix([[x] for x in vec], field)

    # -- basics --------------------------------------------------------

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def row(self, i):
        return list(self.entries[i])

    def column(self, j):
        return [r[j] for r in self.entries]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.entries)))

    def __repr__(self):
        if self.rows * self.cols > 64:
            return "Matrix(%dx%d over %r)" % (self.rows, self.cols, self.field)
        return "Matrix(%r)" % (self.entries,)

    def is_zero(self):
        z = self.field.zero
        return all(x == z for r in self.entries for x in r)

    def __add__(self, other):
        return Matrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.field,
            _copy=False,
        )

    def __sub__(self, other):
        return Matrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
            self.field,
            _copy=False,
        )

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self.entries], self.field, _copy=False)

    def scale(self, c):
        return Matrix([[c * a for a in r] for r in self.entries], self.field, _copy=False)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch %dx%d * %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        z = self.field.zero
        ob = other.entries
        out = []
        for ra in self.entries:
            acc = [z] * other.cols
            for k, a in enumerate(ra):
                if a:
                    rb = ob[k]
                    acc = [s + a * b for s, b in zip(acc, rb)]
            out.append(acc)
        return Matrix(out, self.field, _copy=False, cols=other.cols)

    def apply(self, vec):
        """Matrix times column vector, as a plain list."""
        z = self.field.zero
        acc = [z] * self.rows
        for k, a in enumerate(vec):
            if a:
                for i in range(self.rows):
                    e = self.entries[i][k]
                    if e:
                        acc[i] = acc[i] + e * a
        return acc

    def transpose(self):
        return Matrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.field,
            _copy=False,
            cols=self.rows,
        )

    def stack(self, other):
        """Rows of self followed by rows of other."""
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return Matrix(self.entries + other.entries, self.field)

    def augment(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return Matrix(
            [ra + rb for ra, rb in zip(self.entries, other.entries)], self.field
        )


def rref(m: Matrix):
    """Reduced row echelon form.  Returns (Matrix, pivot column list).

    The result is the unique RREF, so it can be used for canonical
    comparisons; the pivot list is strictly increasing.
    """
    if m._rref is not None:
        return m._rref
    z = m.field.zero
    rows = [list(r) for r in m.entries]
    nr, nc = m.rows, m.cols
    pivots = []
    pr = 0
    for pc in range(nc):
        piv = None
        for i in range(pr, nr):
            if rows[i][pc] != z:
                piv = i
                break
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        inv = m.field.inv(rows[pr][pc])
        if inv != m.field.one:
            rows[pr] = [x * inv for x in rows[pr]]
        rp = rows[pr]
        for i in range(nr):
            if i == pr:
                continue
            f = rows[i][pc]
            if f:
                ri = rows[i]
                rows[i] = [a - f * b for a, b in zip(ri, rp)]
        pivots.append(pc)
        pr += 1
        if pr == nr:
            break
    out = Matrix(rows, m.field, _copy=False)
    result = (out, pivots)
    m._rref = result
    out._rref = result
    return result


def rank(m: Matrix):
    return len(rref(m)[1])


class SubspaceBasis:
    """A subspace of k^n stored by its unique RREF row basis.

    Equality of subspaces is structural equality of the stored data.
    """

    __slots__ = ("ambient_dim", "matrix", "pivots")

    def __init__(self, ambient_dim, vectors, field=QQ, _reduced=False):
        self.ambient_dim = ambient_dim
        if _reduced:
            self.matrix = vectors
            self.pivots = vectors._rref[1] if vectors._rref else rref(vectors)[1]
            return
        if not vectors:
            self.matrix = Matrix.zeros(0, ambient_dim, field)
            self.pivots = []
            return
        red, piv = rref(Matrix(vectors, field))
        keep = red.entries[: len(piv)]
        self.matrix = Matrix(keep, field, _copy=False)
        self.pivots = piv
        rref(self.matrix)

    @property
    def dim(self):
        return len(self.pivots)

    @property
    def field(self):
        return self.matrix.field

    def vectors(self):
        return [self.matrix.row(i) for i in range(self.dim)]

    def __eq__(self, other):
        return (
            isinstance(other, SubspaceBasis)
            and self.ambient_dim == other.ambient_dim
            and self.matrix == other.matrix
        )

    def __repr__(self):
        return "SubspaceBasis(dim %d of k^%d)" % (self.dim, self.ambient_dim)

    def coordinates(self, vec):
        """Coordinates of vec in this RREF basis, or None if not a member."""
        z = self.field.zero
        v = list(vec)
        coords = []
        for i, pc in enumerate(self.pivots):
            c = v[pc]
            coords.append(c)
            if c:
                row = self.matrix.entries[i]
                v = [a - c * b for a, b in zip(v, row)]
        if any(x != z for x in v):
            return None
        return coords

    def contains(self, vec):
        return self.coordinates(vec) is not None

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.vectors())


def kernel_basis(m: Matrix) -> SubspaceBasis:
    """Basis of {v : m v = 0}, canonical (RREF) form."""
    red, piv = rref(m)
    z, o = m.field.zero, m.field.one
    free = [j for j in range(m.cols) if j not in piv]
    vecs = []
    for j in free:
        v = [z] * m.cols
        v[j] = o
        for i, pc in enumerate(piv):
            v[pc] = -red.entries[i][j]
        vecs.append(v)
    return SubspaceBasis(m.cols, vecs, m.field)


def image_basis(m: Matrix) -> SubspaceBasis:
    """Column space of m, canonical form."""
    return SubspaceBasis(m.rows, [m.column(j) for j in range(m.cols)], m.field)


def row_space(m: Matrix) -> SubspaceBasis:
    return SubspaceBasis(m.cols, [m.row(i) for i in range(m.rows)], m.field)


def solve(m: Matrix, b) -> list | None:
    """Some exact solution v of m v = b, or None when inconsistent.

    The returned solution is the one with zero free coordinates, hence
    deterministic (echelon-minimal).
    """
    aug, piv = rref(m.augment(Matrix.column_vector(b, m.field)))
    if piv and piv[-1] == m.cols:
        return None
    z = m.field.zero
    v = [z] * m.cols
    for i, pc in enumerate(piv):
        v[pc] = aug.entries[i][m.cols]
    return v


def solve_matrix(m: Matrix, b: Matrix) -> Matrix | None:
    """Solve m X = b columnwise; None if any column is inconsistent."""
    aug, piv = rref(m.augment(b))
    if piv and piv[-1] >= m.cols:
        return None
    z = m.field.zero
    out = Matrix.zeros(m.cols, b.cols, m.field).entries
    for i, pc in enumerate(piv):
        for j in range(b.cols):
            out[pc][j] = aug.entries[i][m.cols + j]
    return Matrix(out, m.field, _copy=False)


def quotient_basis(big: SubspaceBasis, small: SubspaceBasis):
    """Representatives and projection for big/small.

    Returns (reps, proj) where reps is a list of vectors of big whose
    classes form a basis of the quotient, and proj maps any vector of big
    to its coordinate list in those classes (a surjective linear map with
    kernel exactly small).  Raises SubspaceNotContained if small is not a
    subspace of big.
    """
    if big.ambient_dim != small.ambient_dim:
        raise SubspaceNotContained("ambient dimensions differ")
    if not big.contains_subspace(small):
        raise SubspaceNotContained("quotient by a non-subspace")
    field = big.field
    stacked = small.matrix.entries + big.matrix.entries
    reps = []
    seen = small.dim
    cur = SubspaceBasis(big.ambient_dim, small.matrix.entries, field)
    for v in big.vectors():
        if not cur.contains(v):
            reps.append(v)
            cur = SubspaceBasis(big.ambient_dim, cur.vectors() + [v], field)
    base = Matrix(small.vectors() + reps, field) if (small.dim or reps) else Matrix.zeros(0, big.ambient_dim, field)

    def proj(vec):
        coords = _coords_in_rows(base, vec)
        if coords is None:
            raise SubspaceNotContained("vector not in the big subspace")
        return coords[small.dim :]

    return reps, proj


def _coords_in_rows(base: Matrix, vec):
    """Coordinates of vec as a combination of the rows of base."""
    if base.rows == 0:
        z = base.field.zero
        return [] if all(x == z for x in vec) else None
    sol = solve(base.transpose(), vec)
    return sol


def intersect(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """Intersection of two subspaces of the same ambient space."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient mismatch")
    if a.dim == 0 or b.dim == 0:
        return SubspaceBasis(a.ambient_dim, [], a.field)
    stacked = Matrix(a.vectors() + b.vectors(), a.field)
    ker = kernel_basis(stacked.transpose())
    vecs = []
    for w in ker.vectors():
        coeffs = w[: a.dim]
        v = [a.field.zero] * a.ambient_dim
        for c, row in zip(coeffs, a.vectors()):
            if c:
                v = [x + c * y for x, y in zip(v, row)]
        vecs.append(v)
    return SubspaceBasis(a.ambient_dim, vecs, a.field)

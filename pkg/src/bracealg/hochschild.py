"""Hochschild cochains on a finite-dimensional algebra and their brace calculus.

A cochain lives on the Laurent extension L[i^{\\pm 1}] of the coefficient
algebra L (|i| = -2) but is stored finitely: a component of arity p is a
matrix dim(L) x dim(L)^p together with a single iota power recording the
internal degree, plus optional "weight" matrices recording polynomial
dependence on the iota powers of individual inputs.  iota-linear cochains
have no weights; the fractional Euler derivation is the basic example of
a weight-one cochain.  Braces, cup product, Lie bracket and the
differential are computed exactly in this representation.

Sign convention: Koszul signs with respect to the total degree shifted by
-1 (the bar convention).  The binary product cochain is minus the algebra
multiplication; that normalisation is forced by unitality of the cup
product.  The convention is pinned operationally by the identity test
suite (d = [m2,-], d^2 = 0, the brace relation and the two compatibility
lemmas relating braces to the differential and the cup product).
"""

from __future__ import annotations

import math
from itertools import combinations, product

from .algebra import (
    AlgebraSpecError,
    BimoduleMap,
    FiniteAlgebra,
    bar_resolution,
    diagonal_bimodule,
    is_stable_iso,
    syzygy,
)
from .linalg import Matrix, QQ, SubspaceBasis, kernel_basis, solve, solve_matrix


class CapTooLow(Exception):
    """An operation needed cochain components beyond the reliable range."""


class NotACocycle(Exception):
    pass


class WrongBidegree(Exception):
    pass


DEFAULT_CAP = 10


def _encode(tup, d):
    idx = 0
    for t in tup:
        idx = idx * d + t
    return idx


def _decode(idx, d, p):
    out = []
    for _ in range(p):
        out.append(idx % d)
        idx //= d
    out.reverse()
    return tuple(out)


class Cochain:
    """A Hochschild cochain with iota bookkeeping and optional weights.

    comps[p] is a dict {weight-tuple: Matrix}; the weight tuple has length
    p, and the value of the component on inputs l_1 i^{j_1}, ..., l_p i^{j_p}
    is sum_e (prod_i j_i^{e_i}) M_e(l_1,...,l_p) * i^{iota + sum j_i}.
    Components with arity > cap are unknown rather than zero.
    """

    __slots__ = ("algebra", "iota", "comps", "cap")

    def __init__(self, algebra: FiniteAlgebra, iota=0, comps=None, cap=math.inf):
        self.algebra = algebra
        self.iota = iota
        self.comps = comps or {}
        self.cap = cap

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(algebra, iota=0):
        return Cochain(algebra, iota, {}, math.inf)

    @staticmethod
    def from_matrix(algebra, p, matrix, iota=0, cap=math.inf):
        zero_w = (0,) * p
        return Cochain(algebra, iota, {p: {zero_w: matrix}}, cap)

    @staticmethod
    def unit_cochain(algebra):
        """The unit of L as a 0-cochain."""
        m = Matrix([[c] for c in algebra.unit], algebra.field)
        return Cochain.from_matrix(algebra, 0, m, 0)

    @staticmethod
    def iota_cochain(algebra, power=1):
        """The central element iota^power as a 0-cochain."""
        m = Matrix([[c] for c in algebra.unit], algebra.field)
        return Cochain.from_matrix(algebra, 0, m, power)

    @staticmethod
    def multiplication(algebra):
        """The product 2-cochain m2 (equal to minus the multiplication)."""
        d = algebra.dim
        field = algebra.field
        cols = []
        m = Matrix.zeros(d, d * d, field).entries
        for i in range(d):
            for j in range(d):
                col = i * d + j
                for r, c in enumerate(algebra.mult[i][j]):
                    if c:
                        m[r][col] = -c
        return Cochain.from_matrix(algebra, 2, Matrix(m, field, _copy=False), 0)

    @staticmethod
    def euler(algebra):
        """The fractional Euler derivation a -> (|a|/2) a as a weight-one 1-cochain."""
        d = algebra.dim
        return Cochain(algebra, 0, {1: {(1,): -Matrix.identity(d, algebra.field)}}, math.inf)

    # -- bookkeeping -----------------------------------------------------

    def arities(self):
        return sorted(self.comps)

    def min_arity(self):
        ar = [p for p, c in self.comps.items() if c]
        return min(ar) if ar else None

    def is_iota_linear(self):
        return all(
            not any(e) or mat.is_zero()
            for comp in self.comps.values()
            for e, mat in comp.items()
        )

    def component_matrix(self, p, weights=None):
        d = self.algebra.dim
        w = weights if weights is not None else (0,) * p
        comp = self.comps.get(p)
        if comp is None or w not in comp:
            return Matrix.zeros(d, d**p, self.algebra.field)
        return comp[w]

    def with_cap(self, cap):
        return Cochain(self.algebra, self.iota, {p: dict(c) for p, c in self.comps.items() if p <= cap}, cap)

    def shift_iota(self, delta):
        return Cochain(self.algebra, self.iota + delta, self.comps, self.cap)

    def total_degree(self, p):
        return p - 2 * self.iota

    # -- linear structure -------------------------------------------------

    def _merged(self, other, sign):
        if self.algebra is not other.algebra and self.algebra.mult != other.algebra.mult:
            raise AlgebraSpecError("cochain algebra mismatch")
        if self.iota != other.iota:
            if _support_empty(self.comps):
                return Cochain(other.algebra, other.iota, _scaled(other.comps, sign, other.algebra.field), min(self.cap, other.cap))
            if _support_empty(other.comps):
                return Cochain(self.algebra, self.iota, {p: dict(c) for p, c in self.comps.items()}, min(self.cap, other.cap))
            raise AlgebraSpecError("cannot add cochains of different internal degree")
        comps = {p: dict(c) for p, c in self.comps.items()}
        for p, comp in other.comps.items():
            tgt = comps.setdefault(p, {})
            for e, mat in comp.items():
                cur = tgt.get(e)
                new = mat.scale(sign) if sign != self.algebra.field.one else mat
                tgt[e] = cur + new if cur is not None else new
        return Cochain(self.algebra, self.iota, comps, min(self.cap, other.cap))

    def __add__(self, other):
        return self._merged(other, self.algebra.field.one)

    def __sub__(self, other):
        return self._merged(other, -self.algebra.field.one)

    def scale(self, c):
        return Cochain(self.algebra, self.iota, _scaled(self.comps, c, self.algebra.field), self.cap)

    def is_zero(self, up_to=None):
        bound = self.cap if up_to is None else min(up_to, self.cap)
        if up_to is not None and up_to > self.cap:
            raise CapTooLow("zero test up to %s exceeds reliable cap %s" % (up_to, self.cap))
        for p, comp in self.comps.items():
            if p <= bound:
                for mat in comp.values():
                    if not mat.is_zero():
                        return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self - other).is_zero()

    def is_normalized(self):
        """Vanishing whenever some input is the unit (a basis direction)."""
        uidx = _unit_index(self.algebra)
        if uidx is None:
            return False
        d = self.algebra.dim
        for p, comp in self.comps.items():
            for e, mat in comp.items():
                for col in range(d**p):
                    tup = _decode(col, d, p)
                    if uidx in tup and any(mat.entries[r][col] for r in range(mat.rows)):
                        return False
        return True

    # -- evaluation -------------------------------------------------------

    def evaluate(self, inputs):
        """Value on inputs [(vector, jpower), ...]; returns (vector, jpower).

        Only usable when all stored components of this arity agree on the
        output iota power, which they do by construction.
        """
        p = len(inputs)
        d = self.algebra.dim
        field = self.algebra.field
        out = [field.zero] * d
        comp = self.comps.get(p)
        if p > self.cap:
            raise CapTooLow("evaluation at arity %d beyond cap" % p)
        if comp:
            for e, mat in comp.items():
                wcoeff = 1
                for exp, (_, j) in zip(e, inputs):
                    if exp:
                        wcoeff *= j**exp
                if wcoeff == 0:
                    continue
                c = field.of(wcoeff)
                for choice in product(*[range(d)] * p) if p else [()]:
                    coef = c
                    for t, (vec, _) in zip(choice, inputs):
                        coef = coef * vec[t]
                        if not coef:
                            break
                    if coef:
                        col = _encode(choice, d)
                        for r in range(d):
                            m = mat.entries[r][col]
                            if m:
                                out[r] = out[r] + coef * m
        jout = self.iota + sum(j for _, j in inputs)
        return out, jout

    def __repr__(self):
        ar = {p: len(c) for p, c in self.comps.items()}
        return "Cochain(iota=%d, arities=%r, cap=%s)" % (self.iota, ar, self.cap)

    def to_json(self):
        ser = self.algebra.field.to_str
        comps = {}
        for p, comp in sorted(self.comps.items()):
            entry = []
            for e, mat in sorted(comp.items()):
                entry.append({
                    "weights": list(e),
                    "matrix": [[ser(x) for x in row] for row in mat.entries],
                })
            comps[str(p)] = entry
        return {
            "iota_power": self.iota,
            "cap": None if self.cap == math.inf else self.cap,
            "components": comps,
        }


def _support_empty(comps):
    return all(mat.is_zero() for comp in comps.values() for mat in comp.values())


def _scaled(comps, c, field):
    return {p: {e: m.scale(c) for e, m in comp.items()} for p, comp in comps.items()}


def _unit_index(algebra):
    idx = None
    for i, c in enumerate(algebra.unit):
        if c == algebra.field.one:
            if idx is not None:
                return None
            idx = i
        elif c:
            return None
    return idx


# ---------------------------------------------------------------------------
# The brace engine


def _bar_degree(p, iota):
    # total degree p - 2*iota, shifted by -1; only the parity matters
    return (p + 1) % 2


def _expand_weight_power(qk, positions, exponent):
    """(qk + sum_{u in positions} j_u)^exponent as {monomial-dict: int}."""
    terms = {(): 1}
    for _ in range(exponent):
        new = {}
        for mono, coeff in terms.items():
            base = dict(zip(mono[::2], mono[1::2]))
            if qk:
                me = _mono_encode(base)
                new[me] = new.get(me, 0) + coeff * qk
            for u in positions:
                b2 = dict(base)
                b2[u] = b2.get(u, 0) + 1
                me = _mono_encode(b2)
                new[me] = new.get(me, 0) + coeff
        terms = new
    return terms


def _mono_encode(d):
    out = []
    for k in sorted(d):
        if d[k]:
            out.extend((k, d[k]))
    return tuple(out)


def _min_possible_arity(c: Cochain):
    """Smallest arity at which c can be nonzero (inf for the exact zero)."""
    m = c.min_arity()
    if m is not None:
        return m
    return c.cap + 1 if c.cap != math.inf else math.inf


def brace(x0: Cochain, args, cap=None) -> Cochain:
    """The brace x0{y_1, ..., y_n}; vanishes when arity(x0) < n.

    The result arity-P component collects every way of inserting the
    arguments, in order, into distinct slots of an x0 component; the sign
    of a term is the Koszul sign for moving each y_k past the inputs that
    precede its block, all degrees shifted by -1.
    """
    args = list(args)
    n = len(args)
    lam = x0.algebra
    field = lam.field
    if n == 0:
        return x0
    iota = x0.iota + sum(a.iota for a in args)
    # reliable range: one below the smallest arity receiving an unknown term
    amins = [_min_possible_arity(a) for a in args]
    x0min = _min_possible_arity(x0)
    limit = math.inf
    if x0.cap != math.inf:
        limit = min(limit, (x0.cap + 1) - n + sum(amins))
    for k, a in enumerate(args):
        if a.cap != math.inf:
            others = sum(m for t, m in enumerate(amins) if t != k)
            limit = min(limit, max(x0min, n) - n + (a.cap + 1) + others)
    if limit != math.inf:
        limit -= 1
    if cap is not None:
        limit = min(limit, cap)
    out = {}
    for p0, comp0 in x0.comps.items():
        if p0 < n or p0 > x0.cap:
            continue
        arg_choices = []
        for a in args:
            arg_choices.append(
                [
                    (pk, ek, mk, a.iota)
                    for pk, compk in a.comps.items()
                    if pk <= a.cap
                    for ek, mk in compk.items()
                ]
            )
        for slots in combinations(range(p0), n):
            for choice in product(*arg_choices):
                pks = [c[0] for c in choice]
                P = p0 - n + sum(pks)
                if P > limit:
                    continue
                block_start = {}
                ik = []
                pos = 0
                bcount = 0
                slotpos = {}
                for t in range(p0):
                    if bcount < n and t == slots[bcount]:
                        block_start[bcount] = pos
                        ik.append(pos)
                        pos += pks[bcount]
                        bcount += 1
                    else:
                        slotpos[t] = pos
                        pos += 1
                sign_exp = sum(_bar_degree(pks[k], 0) * ik[k] for k in range(n))
                sgn = field.one if sign_exp % 2 == 0 else -field.one
                for e0, mat0 in comp0.items():
                    _brace_term(out, lam, P, p0, slots, choice, e0, mat0,
                                block_start, slotpos, sgn)
    comps = {}
    for p, comp in out.items():
        kept = {e: m for e, m in comp.items() if not m.is_zero()}
        if kept:
            comps[p] = kept
    return Cochain(lam, iota, comps, limit)


def _brace_term(out, lam, P, p0, slots, choice, e0, mat0, block_start, slotpos, sgn):
    """Accumulate one (slots, argument components) combination into out[P]."""
    field = lam.field
    d = lam.dim
    n = len(slots)
    pks = [c[0] for c in choice]
    # weights of the inserted cochains transfer to their global positions
    base_mono = {}
    for k, (pk, ek, mk, qk) in enumerate(choice):
        for u, exp in enumerate(ek):
            if exp:
                g = block_start[k] + u
                base_mono[g] = base_mono.get(g, 0) + exp
    # x0's weight at a free slot moves to its position; at an inserted slot
    # it sees the iota power of the inserted value, q_k plus the block's
    # input powers, and expands multinomially.
    weight_terms = {_mono_encode(base_mono): 1}
    for t in range(p0):
        exp = e0[t]
        if not exp:
            continue
        if t in slotpos:
            g = slotpos[t]
            new = {}
            for mono, coeff in weight_terms.items():
                md = dict(zip(mono[::2], mono[1::2]))
                md[g] = md.get(g, 0) + exp
                me = _mono_encode(md)
                new[me] = new.get(me, 0) + coeff
            weight_terms = new
        else:
            k = slots.index(t)
            blockpos = list(range(block_start[k], block_start[k] + pks[k]))
            expanded = _expand_weight_power(choice[k][3], blockpos, exp)
            new = {}
            for mono, coeff in weight_terms.items():
                md0 = dict(zip(mono[::2], mono[1::2]))
                for mono2, c2 in expanded.items():
                    md = dict(md0)
                    for g, ee in zip(mono2[::2], mono2[1::2]):
                        md[g] = md.get(g, 0) + ee
                    me = _mono_encode(md)
                    new[me] = new.get(me, 0) + coeff * c2
            weight_terms = new
    weight_terms = {m: c for m, c in weight_terms.items() if c}
    if not weight_terms:
        return
    # matrix of the term
    mats = [c[2] for c in choice]
    res = Matrix.zeros(d, d**P, field).entries
    any_nonzero = False
    tuples = product(*[range(d)] * P) if P else [()]
    for tup in tuples:
        col = _encode(tup, d) if P else 0
        inners = []
        ok = True
        for k in range(n):
            block = tup[block_start[k] : block_start[k] + pks[k]]
            icol = _encode(block, d) if pks[k] else 0
            vec = [mats[k].entries[r][icol] for r in range(d)]
            if not any(vec):
                ok = False
                break
            inners.append(vec)
        if not ok:
            continue
        supports = [[(r, v[r]) for r in range(d) if v[r]] for v in inners]
        for pick in product(*supports):
            coeff = field.one
            for _, c in pick:
                coeff = coeff * c
            x0tup = []
            bcount = 0
            for t in range(p0):
                if bcount < n and t == slots[bcount]:
                    x0tup.append(pick[bcount][0])
                    bcount += 1
                else:
                    x0tup.append(tup[slotpos[t]])
            x0col = _encode(tuple(x0tup), d) if p0 else 0
            for r in range(d):
                v = mat0.entries[r][x0col]
                if v:
                    res[r][col] = res[r][col] + coeff * v
                    any_nonzero = True
    if not any_nonzero:
        return
    term = Matrix(res, field, _copy=False)
    bucket = out.setdefault(P, {})
    for mono, wc in weight_terms.items():
        md = dict(zip(mono[::2], mono[1::2]))
        e = tuple(md.get(g, 0) for g in range(P))
        add = term.scale(sgn * field.of(wc))
        cur = bucket.get(e)
        bucket[e] = cur + add if cur is not None else add


# ---------------------------------------------------------------------------
# Cup, bracket, differential


def _arity_slice(c: Cochain, p):
    comp = c.comps.get(p)
    return Cochain(c.algebra, c.iota, {p: comp} if comp else {}, math.inf)


def cup(x: Cochain, y: Cochain, cap=None) -> Cochain:
    """Cup product x.y = (-1)^(|x|-1) m2{x, y}, extended bilinearly."""
    lam = x.algebra
    m2 = Cochain.multiplication(lam)
    out = Cochain.zero(lam, x.iota + y.iota)
    limit = math.inf
    if x.cap != math.inf:
        limit = min(limit, x.cap + _min_possible_arity(y))
    if y.cap != math.inf:
        limit = min(limit, y.cap + _min_possible_arity(x))
    if cap is not None:
        limit = min(limit, cap)
    for p in x.arities():
        sgn = lam.field.one if (p - 2 * x.iota - 1) % 2 == 0 else -lam.field.one
        term = brace(m2, [_arity_slice(x, p), y], cap=cap).scale(sgn)
        out = out + term
    out.cap = min(out.cap, limit)
    return out


def bracket(x: Cochain, y: Cochain, cap=None) -> Cochain:
    """Gerstenhaber bracket [x,y] = x{y} - (-1)^(|x|-1)(|y|-1) y{x}."""
    lam = x.algebra
    out = Cochain.zero(lam, x.iota + y.iota)
    limit = math.inf
    if x.cap != math.inf:
        limit = min(limit, x.cap + _min_possible_arity(y) - 1)
    if y.cap != math.inf:
        limit = min(limit, y.cap + _min_possible_arity(x) - 1)
    if cap is not None:
        limit = min(limit, cap)
    for p in x.arities():
        xs = _arity_slice(x, p)
        for q in y.arities():
            ys = _arity_slice(y, q)
            first = brace(xs, [ys], cap=cap)
            second = brace(ys, [xs], cap=cap)
            sgn = (p - 1) * (q - 1)  # iota powers are even and drop mod 2
            if sgn % 2 == 0:
                out = out + first - second
            else:
                out = out + first + second
    out.cap = min(out.cap, limit)
    return out


def differential(c: Cochain, cap=None) -> Cochain:
    """Hochschild differential d(c) = [m2, c] (bidegree (1, 0))."""
    m2 = Cochain.multiplication(c.algebra)
    return bracket(m2, c, cap=cap)


# ---------------------------------------------------------------------------
# The normalized subcomplex as finite coordinates


def _reduced_indices(lam: FiniteAlgebra):
    uidx = _unit_index(lam)
    if uidx is None:
        raise AlgebraSpecError(
            "normalized-complex coordinates need the unit to be a basis vector"
        )
    return uidx, [i for i in range(lam.dim) if i != uidx]


def normalized_space_dim(lam, p):
    return lam.dim * (lam.dim - 1) ** p


def cochain_to_vec(c: Cochain, p):
    """Coordinates of the arity-p component on reduced input tuples.

    Requires an iota-linear component (no weights).
    """
    lam = c.algebra
    d = lam.dim
    uidx, red = _reduced_indices(lam)
    comp = c.comps.get(p, {})
    for e, m in comp.items():
        if any(e) and not m.is_zero():
            raise AlgebraSpecError("cochain has Euler weights; not in the iota-linear model")
    mat = c.component_matrix(p)
    r = len(red)
    out = []
    for t in range(r**p):
        tup = tuple(red[i] for i in _decode(t, r, p))
        col = _encode(tup, d) if p else 0
        out.extend(mat.entries[row][col] for row in range(d))
    return out


def vec_to_cochain(lam, p, j, vec, cap=math.inf):
    """Normalized cochain from reduced coordinates (zero on unit inputs)."""
    d = lam.dim
    uidx, red = _reduced_indices(lam)
    r = len(red)
    m = Matrix.zeros(d, d**p, lam.field).entries
    for t in range(r**p):
        tup = tuple(red[i] for i in _decode(t, r, p))
        col = _encode(tup, d) if p else 0
        for row in range(d):
            m[row][col] = vec[t * d + row]
    return Cochain.from_matrix(lam, p, Matrix(m, lam.field, _copy=False), j, cap)


_diff_cache = {}


def _lam_key(lam):
    return (
        lam.field,
        lam.dim,
        tuple(lam.unit),
        tuple(tuple(tuple(v) for v in row) for row in lam.mult),
    )


def normalized_differential_matrix(lam, p):
    """Matrix of d on normalized cochains, arity p -> p+1, reduced coords."""
    key = (_lam_key(lam), p)
    if key in _diff_cache:
        return _diff_cache[key]
    r = lam.dim - 1
    src = normalized_space_dim(lam, p)
    cols = []
    for t in range(src):
        vec = [lam.field.zero] * src
        vec[t] = lam.field.one
        c = vec_to_cochain(lam, p, 0, vec)
        dc = differential(c)
        if not _is_normalized_component(dc, p + 1):
            raise AlgebraSpecError("differential left the normalized subcomplex")
        cols.append(cochain_to_vec(dc, p + 1))
    tgt = normalized_space_dim(lam, p + 1)
    mat = Matrix(
        [[cols[j][i] for j in range(src)] for i in range(tgt)],
        lam.field,
        _copy=False,
        cols=src,
    )
    _diff_cache[key] = mat
    return mat


def _is_normalized_component(c: Cochain, p):
    lam = c.algebra
    uidx, _ = _reduced_indices(lam)
    mat = c.component_matrix(p)
    d = lam.dim
    for col in range(d**p):
        tup = _decode(col, d, p)
        if uidx in tup and any(mat.entries[row][col] for row in range(d)):
            return False
    return True


# ---------------------------------------------------------------------------
# Cohomology classes


class HHContext:
    """Cocycles and coboundaries of the normalized complex at (p, -2j)."""

    def __init__(self, lam, p, j):
        self.algebra = lam
        self.p = p
        self.j = j
        dmat = normalized_differential_matrix(lam, p)
        self.cocycles = kernel_basis(dmat)
        if p >= 1:
            prev = normalized_differential_matrix(lam, p - 1)
            from .linalg import image_basis

            self.coboundaries = image_basis(prev)
        else:
            self.coboundaries = SubspaceBasis(normalized_space_dim(lam, p), [], lam.field)
        from .linalg import quotient_basis

        self.reps, self._proj = quotient_basis(self.cocycles, self.coboundaries)

    @property
    def dim(self):
        return self.cocycles.dim - self.coboundaries.dim

    def classify(self, vec):
        """Quotient coordinates of a cocycle vector."""
        if not self.cocycles.contains(vec):
            raise NotACocycle("vector is not a cocycle at (%d, %d)" % (self.p, -2 * self.j))
        return self._proj(vec)

    def basis_classes(self):
        return [
            HHClass(self, vec_to_cochain(self.algebra, self.p, self.j, v))
            for v in self.reps
        ]


_ctx_cache = {}


def hh_context(lam, p, j) -> HHContext:
    key = (_lam_key(lam), p, j)
    if key not in _ctx_cache:
        if p + 1 > DEFAULT_CAP:
            raise CapTooLow("cohomology at arity %d exceeds the horizontal cap %d" % (p, DEFAULT_CAP))
        _ctx_cache[key] = HHContext(lam, p, j)
    return _ctx_cache[key]


class HHClass:
    """A Hochschild cohomology class with a normalized representative."""

    def __init__(self, context: HHContext, representative: Cochain):
        self.context = context
        self.representative = representative
        vec = cochain_to_vec(representative, context.p)
        self.coords = context.classify(vec)

    @property
    def bidegree(self):
        return (self.context.p, -2 * self.context.j)

    def is_zero(self):
        z = self.context.algebra.field.zero
        return all(c == z for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, HHClass):
            return NotImplemented
        return (
            self.context.p == other.context.p
            and self.context.j == other.context.j
            and self.coords == other.coords
        )

    def scale(self, c):
        return HHClass(self.context, self.representative.scale(c))

    def __add__(self, other):
        return HHClass(self.context, self.representative + other.representative)

    def __sub__(self, other):
        return HHClass(self.context, self.representative - other.representative)

    def cup_cls(self, other) -> "HHClass":
        lam = self.context.algebra
        prod = cup(self.representative, other.representative)
        ctx = hh_context(lam, self.context.p + other.context.p, self.context.j + other.context.j)
        return HHClass(ctx, _normalized_projection(prod, ctx.p))

    def bracket_cls(self, other) -> "HHClass":
        lam = self.context.algebra
        p = self.context.p + other.context.p - 1
        j = self.context.j + other.context.j
        if p < 0:
            # bracket of two 0-cochains vanishes identically
            ctx0 = hh_context(lam, 0, j)
            return HHClass(ctx0, vec_to_cochain(lam, 0, j, [lam.field.zero] * lam.dim))
        br = bracket(self.representative, other.representative)
        ctx = hh_context(lam, p, j)
        return HHClass(ctx, _normalized_projection(br, ctx.p))

    def __repr__(self):
        return "HHClass(p=%d, q=%d, coords=%r)" % (
            self.context.p,
            -2 * self.context.j,
            [str(c) for c in self.coords],
        )


def _normalized_projection(c: Cochain, p):
    """The cochain itself; products of normalized cochains stay normalized."""
    if not _is_normalized_component(c, p):
        raise AlgebraSpecError("expected a normalized cochain")
    return Cochain.from_matrix(c.algebra, p, c.component_matrix(p), c.iota, c.cap)


def class_of(lam, c: Cochain, p, j) -> HHClass:
    ctx = hh_context(lam, p, j)
    return HHClass(ctx, _normalized_projection(c, p))


def cohomology(lam, p, j):
    """Representatives of a basis of HH^{p,-2j}(L, L i^j) (dim = len)."""
    return hh_context(lam, p, j).basis_classes()


def solve_coboundary(lam, target: Cochain, p, j):
    """A normalized primitive b (arity p-1) with d(b) = target, or None."""
    dmat = normalized_differential_matrix(lam, p - 1)
    vec = cochain_to_vec(target, p)
    sol = solve(dmat, vec)
    if sol is None:
        return None
    return vec_to_cochain(lam, p - 1, j, sol)


def divide_class(x_cls: HHClass, u_cls: HHClass) -> HHClass:
    """The class v with [u][v] = [x] (unique when cup-by-u is bijective).

    Only positive target degrees are used, where Hochschild and Tate
    cohomology agree, so invertibility of u makes the division exact.
    """
    lam = x_cls.context.algebra
    p = x_cls.context.p - u_cls.context.p
    j = x_cls.context.j - u_cls.context.j
    if p <= 0:
        raise WrongBidegree("class division only implemented in positive degrees")
    ctx = hh_context(lam, p, j)
    cols = []
    for b in ctx.basis_classes():
        prod = u_cls.cup_cls(b)
        cols.append(prod.coords)
    if not cols:
        raise NotACocycle("empty source space in class division")
    mat = Matrix(
        [[cols[jj][i] for jj in range(len(cols))] for i in range(len(cols[0]))],
        lam.field,
        cols=len(cols),
    )
    sol = solve(mat, x_cls.coords)
    if sol is None:
        raise NotACocycle("class is not divisible by the unit class")
    rep = Cochain.zero(lam, j)
    basis = ctx.basis_classes()
    for c, b in zip(sol, basis):
        if c:
            rep = rep + b.representative.scale(c)
    return HHClass(ctx, rep if rep.comps else vec_to_cochain(lam, p, j, [lam.field.zero] * normalized_space_dim(lam, p)))


# ---------------------------------------------------------------------------
# The Euler-adjoined model


class EulerAdjoinedCochain:
    """A pair (x, y) modelling the cochain x + y . e2 on the Laurent algebra.

    x and y are iota-linear; squares of e2 are never formed at this level
    (they only vanish in cohomology), so products of two Euler-adjoined
    cochains are offered at class level only.
    """

    def __init__(self, plain: Cochain, euler: Cochain):
        self.plain = plain
        self.euler = euler

    @property
    def algebra(self):
        return self.plain.algebra

    def to_cochain(self) -> Cochain:
        e2 = Cochain.euler(self.algebra)
        return self.plain + cup(self.euler, e2)

    def __add__(self, other):
        return EulerAdjoinedCochain(self.plain + other.plain, self.euler + other.euler)

    def __sub__(self, other):
        return EulerAdjoinedCochain(self.plain - other.plain, self.euler - other.euler)

    def scale(self, c):
        return EulerAdjoinedCochain(self.plain.scale(c), self.euler.scale(c))

    def is_zero(self, up_to=None):
        return self.plain.is_zero(up_to) and self.euler.is_zero(up_to)

    def __eq__(self, other):
        if not isinstance(other, EulerAdjoinedCochain):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return "EulerAdjoined(plain=%r, euler=%r)" % (self.plain, self.euler)


def euler_derivation(lau) -> EulerAdjoinedCochain:
    """The fractional Euler derivation a -> (|a|/2) a as the pair (0, 1)."""
    lam = lau.base if hasattr(lau, "base") else lau
    return EulerAdjoinedCochain(Cochain.zero(lam, 0), Cochain.unit_cochain(lam))


def restrict_j(c: Cochain) -> Cochain:
    """Restriction along the degree-zero inclusion: drop all Euler weights.

    For an iota-linear cochain this is the identity on the stored data,
    reinterpreted with coefficients L . i^j.
    """
    comps = {}
    for p, comp in c.comps.items():
        zero_w = (0,) * p
        if zero_w in comp:
            comps[p] = {zero_w: comp[zero_w]}
    return Cochain(c.algebra, c.iota, comps, c.cap)


def hh_isos_forward(c: Cochain) -> EulerAdjoinedCochain:
    """x -> j*(x) - i^{-1} j*([x, iota]) e2 in the pair model."""
    lam = c.algebra
    iota_c = Cochain.iota_cochain(lam, 1)
    plain = restrict_j(c)
    br = bracket(c, iota_c)
    euler = restrict_j(br).scale(-lam.field.one).shift_iota(-1)
    return EulerAdjoinedCochain(plain, euler)


def hh_isos_backward(e: EulerAdjoinedCochain) -> Cochain:
    """x + y e2 -> i(x) + i(y) . e2 as an honest (weighted) cochain."""
    return e.to_cochain()


# ---------------------------------------------------------------------------
# Cocycle -> bimodule extension and the Tate unit test


_bar_cache = {}


def _bar_of(lam, length):
    key = (_lam_key(lam), length)
    if key not in _bar_cache:
        _bar_cache[key] = bar_resolution(lam, length)
    return _bar_cache[key]


def cocycle_to_extension(c: Cochain, degree=4) -> BimoduleMap:
    """The bimodule map Omega^degree(L) -> L induced by a cocycle.

    A cocycle of arity k corresponds to a map on bar_k vanishing on the
    image of d_{k+1}; by exactness it factors through Omega^k = ker d_{k-1}
    via d_k.  Cohomologous cocycles give maps equal up to one factoring
    through a projective.
    """
    lam = c.algebra
    field = lam.field
    if not c.is_iota_linear():
        raise NotACocycle("extension dictionary needs an iota-linear cochain")
    dc = differential(c)
    if not dc.is_zero(up_to=degree + 1 if dc.cap >= degree + 1 else None):
        raise NotACocycle("not a cocycle")
    res = _bar_of(lam, degree)
    syz = syzygy(res, degree)
    dmat = res.differential_matrix(degree)
    incl = syz.inclusion.vectors()
    B = Matrix([[v[i] for v in incl] for i in range(len(incl[0]))], field)
    W = solve_matrix(dmat, B)
    if W is None:
        raise NotACocycle("syzygy vectors are not boundaries (resolution too short?)")
    cmat = c.component_matrix(degree)
    bar_top = res.modules[degree]
    d = lam.dim
    cols = []
    for t in range(syz.dim):
        w = W.column(t)
        acc = [field.zero] * d
        for idx, coeff in enumerate(w):
            if not coeff:
                continue
            full = bar_top.decode(idx)
            a0, mid, a1 = full[0], full[1:-1], full[-1]
            col = _encode(mid, d)
            val = [cmat.entries[r][col] for r in range(d)]
            if not any(val):
                continue
            val = lam.mul(lam.basis_vector(a0), val)
            val = lam.mul(val, lam.basis_vector(a1))
            acc = [x + coeff * y for x, y in zip(acc, val)]
        cols.append(acc)
    mat = Matrix([[cols[t][r] for t in range(syz.dim)] for r in range(d)], field)
    return BimoduleMap(syz, diagonal_bimodule(lam), mat, check=(syz.dim <= 64))


class TateUnitResult(int):
    """Boolean with a flag marking the degenerate separable case."""

    def __new__(cls, value, separable=False):
        self = int.__new__(cls, bool(value))
        self.separable = separable
        return self

    def __repr__(self):
        extra = ", separable coefficient" if self.separable else ""
        return "TateUnitResult(%s%s)" % (bool(self), extra)


def tate_unit_check(cls: HHClass) -> TateUnitResult:
    """Is the class a unit in Hochschild--Tate cohomology?

    Criterion: the induced map Omega^4(L) -> L is a stable isomorphism.
    The result does not depend on the representative (tested).
    """
    if cls.bidegree != (4, -2):
        raise WrongBidegree("tate unit check needs bidegree (4, -2), got %r" % (cls.bidegree,))
    lam = cls.context.algebra
    from .algebra import _env_of

    env = _env_of(lam)
    separable = env.radical_basis().dim == 0
    fmap = cocycle_to_extension(cls.representative, 4)
    return TateUnitResult(is_stable_iso(fmap), separable)


# ---------------------------------------------------------------------------
# Seeded random cochains (test and calibration helpers)


def random_cochain(lam, p, j, rng, normalized=True, cap=math.inf):
    d = lam.dim
    if normalized:
        n = normalized_space_dim(lam, p)
        vec = [lam.field.of(rng.randint(-3, 3)) for _ in range(n)]
        return vec_to_cochain(lam, p, j, vec, cap)
    m = Matrix(
        [[lam.field.of(rng.randint(-3, 3)) for _ in range(d**p)] for _ in range(d)],
        lam.field,
    )
    return Cochain.from_matrix(lam, p, m, j, cap)

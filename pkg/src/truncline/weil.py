"""Division-kernel pairings: residue duality, tensor operators, Moore forms.

The coordinate ring has a distinguished logarithmic differential with poles
only at the two conjugate points above the truncation place.  Pairing an
element f against h times that differential by the trace of the residue gives
a perfect F_q-valued duality between the quotient by a principal ideal and a
dual system of ring elements; the pairing of division kernels is obtained by
feeding that dual system through a Moore determinant.

Representation invariants:

* A ``SymPoly`` is a tensor-power expression in r slot variable pairs
  (X_i, Y_i): a dict mapping keys -- tuples of r pairs ``(a, b)`` with
  ``b in (0, 1)``, slot i carrying the monomial X_i^a Y_i^b -- to nonzero
  coefficients in the quadratic extension of the base coefficient field.
  Zero coefficients are never stored.  No general SymPoly product is needed;
  ring products happen in the coordinate ring before tensor assembly.

* ``QuotientBasis`` fixes one of the two standard monomial bases of the
  quotient by a principal ideal whose generator has a nonzero leading
  x-coefficient ("w" version) or leading y-coefficient ("v" version), and
  reduces ring elements to coordinates on that basis by exact linear algebra
  in the finite-dimensional spaces of bounded pole order.

* ``dual_w`` / ``dual_v`` return, for each basis monomial E, the ring element
  whose product with the normalized differential is residue-dual to E.  Both
  are written with coefficient arithmetic entirely inside the base field.

* Operators for the rank-two case follow the closed two-slot display; the
  symmetrized half-sums of the display are stored as single sums over the
  full symmetric index range, which agrees with the half-sum form whenever 2
  is invertible and stays well-defined in characteristic 2.  The y-diagonal
  coefficient of the "v"-version display is taken as -alpha_0 beta_k / beta_0
  (no alpha_k term), the unique choice consistent with the difference of the
  two versions being kappa times the per-slot generator; the construction
  operator built from the dual system independently cross-checks this.

* ``torsion_kernel`` searches extensions of the structure field by their
  degree, extracts the common kernel of the ideal's image operators by
  prime-field linear algebra, and returns an F_q-basis certified by a nonzero
  Moore determinant.  ``q``-power arithmetic in extensions always goes
  through a twisted-ring adapter so Frobenius means the q-power map.
"""

import itertools
import math

from .domain import (
    Domain,
    DomainElem,
    Ideal,
    PrincipalIdeal,
    SpecialIdeal,
    get_domain,
    to_ratfunc,
)
from .drinfeld import DrinfeldModule, annihilator, wedge
from .ffield import FieldElem, embed, make_field, mat_kernel, mat_solve, unembed, with_twist
from .funcfield import RatFunc, local_expansion
from .skew import SkewPoly, evaluate


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------


def trace_residue(dom: Domain, h: RatFunc) -> FieldElem:
    """Trace (to the base field) of the residue of h times the logarithmic
    differential dt / ((t - zeta)(t - zeta^q)) at the designated root."""
    g = h * to_ratfunc(dom.x)
    res = local_expansion(g, dom.zeta, -1, 0)[0]
    F2 = dom.Fq2
    res_conj = FieldElem(F2, F2.frobi(res.code, dom.Fq.degree))
    return unembed(res + res_conj, dom.Fq)


def residue_pairing(f: DomainElem, h) -> FieldElem:
    """The base-field pairing of a ring element f against h (a rational
    function or ring element) through the logarithmic differential."""
    if isinstance(h, DomainElem):
        h = to_ratfunc(h)
    return trace_residue(f.dom, to_ratfunc(f) * h)


# ---------------------------------------------------------------------------
# dual systems for a principal ideal
# ---------------------------------------------------------------------------


def _coef(ideal: PrincipalIdeal):
    """Coefficient accessors as base-field elements, with out-of-range
    indices reading as zero (in particular beta_{-1} = beta_d = 0)."""
    Fq = ideal.dom.Fq
    d = ideal.d

    def al(k: int) -> FieldElem:
        if k == d:
            return FieldElem(Fq, ideal.alpha_d)
        return FieldElem(Fq, ideal.alpha[k] if 0 <= k < d else 0)

    def be(k: int) -> FieldElem:
        return FieldElem(Fq, ideal.beta[k] if 0 <= k < d else 0)

    return al, be


def quotient_basis_monomials(ideal: PrincipalIdeal, version: str) -> list[tuple[int, int]]:
    """Monomial exponents (x-exponent, y-exponent) of the residue basis:
    version "w" uses 1, y, x, xy, ..., x^(d-1), x^(d-1) y  (needs alpha_0 != 0);
    version "v" uses 1, y, x, xy, ..., x^(d-2) y, x^(d-1), x^d  (needs beta_0 != 0)."""
    d = ideal.d
    if version == "w":
        return [(i, b) for i in range(d) for b in (0, 1)]
    if version == "v":
        out = [(i, b) for i in range(d) for b in (0, 1) if not (b and i == d - 1)]
        out.append((d, 0))
        return out
    raise ValueError(f"unknown basis version {version!r}")


def dual_w(ideal: PrincipalIdeal) -> dict[tuple[int, int], DomainElem]:
    """The dual system for the "w" basis (alpha_0 != 0): maps each basis
    monomial to the ring element pairing to its indicator functional."""
    dom = ideal.dom
    d = ideal.d
    al, be = _coef(ideal)
    if not al(0):
        raise ValueError("the w-version dual system needs alpha_0 != 0")
    tr, nm = dom.tr, dom.nm
    a0i = al(0).inverse()
    kap1 = tr + nm * be(0) * a0i
    two = dom.Fq(2)
    out: dict[tuple[int, int], DomainElem] = {}
    for j in range(d):
        e = dom.zero
        for k in range(j):
            e = e + be(k) * dom.monomial(j - k - 1, True) + al(k) * dom.monomial(j - k)
        e = e + (al(j) + kap1 * be(j)) * dom.one
        out[(d - 1 - j, 1)] = e
    for j in range(1, d):
        e = dom.zero
        for k in range(j):
            e = e + al(k) * (dom.monomial(j - 1 - k, True) - tr * dom.monomial(j - k))
            e = e + (be(k - 1) - nm * be(k)) * dom.monomial(j - k)
        e = e + (be(j - 1) - nm * be(j) + al(j) * a0i * nm * be(0)) * dom.one
        out[(d - j, 0)] = e
    e = (be(d - 1) + tr * al(d) + two * nm * al(d) * a0i * be(0)) * dom.one
    for k in range(1, d):
        e = e + (kap1 * be(k) + al(k)) * dom.monomial(d - k - 1, True)
        e = e + (nm * be(0) * al(k) * a0i + be(k - 1) - nm * be(k)) * dom.monomial(d - k)
    e = e + (kap1 * be(0) + al(0)) * dom.monomial(d - 1, True)
    out[(0, 0)] = e
    return out


def dual_v(ideal: PrincipalIdeal) -> dict[tuple[int, int], DomainElem]:
    """The dual system for the "v" basis (beta_0 != 0)."""
    dom = ideal.dom
    d = ideal.d
    al, be = _coef(ideal)
    if not be(0):
        raise ValueError("the v-version dual system needs beta_0 != 0")
    tr, nm = dom.tr, dom.nm
    b0i = be(0).inverse()
    two = dom.Fq(2)
    norm_form = be(0) * be(0) * nm + al(0) * be(0) * tr + al(0) * al(0)
    out: dict[tuple[int, int], DomainElem] = {}
    out[(d, 0)] = (-(norm_form * b0i)) * dom.one
    for j in range(1, d):
        e = dom.zero
        for k in range(j):
            e = e + be(k) * dom.monomial(j - k - 1, True) + al(k) * dom.monomial(j - k)
        e = e + (al(j) - al(0) * be(j) * b0i) * dom.one
        out[(d - 1 - j, 1)] = e
    for j in range(1, d):
        e = dom.zero
        for k in range(j):
            e = e + al(k) * (dom.monomial(j - 1 - k, True) - tr * dom.monomial(j - k))
            e = e + (be(k - 1) - nm * be(k)) * dom.monomial(j - k)
        e = e + (be(j - 1) - nm * be(j) - (tr + al(0) * b0i) * al(j)) * dom.one
        out[(d - j, 0)] = e
    e = (-(tr * al(d)) + be(d - 1) - two * al(0) * al(d) * b0i) * dom.one
    for k in range(1, d):
        e = e + (al(k) - al(0) * be(k) * b0i) * dom.monomial(d - k - 1, True)
        e = e - ((tr + al(0) * b0i) * al(k) - be(k - 1) + nm * be(k)) * dom.monomial(d - k)
    e = e - ((tr + al(0) * b0i) * al(0) + nm * be(0)) * dom.monomial(d)
    out[(0, 0)] = e
    return out


# ---------------------------------------------------------------------------
# reduction onto a residue basis
# ---------------------------------------------------------------------------


class QuotientBasis:
    """A residue basis modulo a principal generator, with exact reduction.

    Reduction of a monomial of index m solves one linear system in the space
    of elements of pole order at most m: the multiples x^k P and x^k y P of
    the generator together with the basis monomials form a square coordinate
    system there, and the basis coordinates of the solution are the reduced
    form.  Results are memoized per monomial.
    """

    def __init__(self, ideal: PrincipalIdeal, version: str | None = None):
        if version is None:
            version = "w" if ideal.alpha[0] else "v"
        if version == "w" and not ideal.alpha[0]:
            raise ValueError("the w-version basis needs alpha_0 != 0")
        if version == "v" and not ideal.beta[0]:
            raise ValueError("the v-version basis needs beta_0 != 0")
        self.ideal = ideal
        self.dom = ideal.dom
        self.version = version
        self.monomials = quotient_basis_monomials(ideal, version)
        self._index = {mono: i for i, mono in enumerate(self.monomials)}
        self._red: dict[tuple[int, int], tuple] = {}

    def reduce_monomial(self, a: int, b: int) -> tuple:
        """Reduction of X^a Y^b as a tuple of (basis monomial, coefficient
        code) pairs with nonzero codes."""
        key = (a, b)
        got = self._red.get(key)
        if got is not None:
            return got
        if key in self._index:
            out = ((key, 1),)
            self._red[key] = out
            return out
        dom = self.dom
        d = self.ideal.d
        m = max(a + b, d)
        gens = [dom.monomial(k) * self.ideal.elem for k in range(m - d + 1)]
        gens += [dom.monomial(k, True) * self.ideal.elem for k in range(m - d)]
        cols = gens + [dom.monomial(i, bool(bb)) for (i, bb) in self.monomials]
        vecs = [dom.coords(e, m) for e in cols]
        n = 2 * m + 1
        rows = [[vecs[j][i] for j in range(len(cols))] for i in range(n)]
        rhs = dom.coords(dom.monomial(a, bool(b)), m)
        sol = mat_solve(dom.Fq, rows, rhs)
        if sol is None:
            raise ArithmeticError("reduction system is singular")
        tail = sol[len(gens):]
        out = tuple((mono, c) for mono, c in zip(self.monomials, tail) if c)
        self._red[key] = out
        return out

    def reduce(self, e: DomainElem) -> dict[tuple[int, int], int]:
        """Basis coordinates (as nonzero coefficient codes) of e mod the ideal."""
        Fq = self.dom.Fq
        acc: dict[tuple[int, int], int] = {}

        def take(c: int, mono_red: tuple):
            for mono, code in mono_red:
                v = Fq.addi(acc.get(mono, 0), Fq.muli(c, code))
                if v:
                    acc[mono] = v
                elif mono in acc:
                    del acc[mono]

        for i, c in enumerate(e.p_part):
            if c:
                take(c, self.reduce_monomial(i, 0))
        for i, c in enumerate(e.s_part):
            if c:
                take(c, self.reduce_monomial(i, 1))
        return acc


# ---------------------------------------------------------------------------
# tensor-power expressions
# ---------------------------------------------------------------------------


def _c2(dom: Domain, c) -> FieldElem:
    """Coerce a coefficient into the quadratic extension of the base field."""
    F2 = dom.Fq2
    if isinstance(c, FieldElem):
        if c.field is F2:
            return c
        if c.field is dom.Fq:
            return embed(c, F2)
        raise ValueError(f"coefficient {c!r} is not in the coefficient tower")
    return F2(c)


class SymPoly:
    """A tensor-power expression over the coordinate ring: per-slot monomial
    exponents with coefficients in the quadratic extension of the base field."""

    __slots__ = ("dom", "r", "terms")

    def __init__(self, dom: Domain, r: int, terms: dict | None = None):
        self.dom = dom
        self.r = r
        clean: dict[tuple, FieldElem] = {}
        for key, c in (terms or {}).items():
            if len(key) != r:
                raise ValueError(f"key {key!r} does not have {r} slots")
            for (a, b) in key:
                if a < 0 or b not in (0, 1):
                    raise ValueError(f"bad slot monomial in {key!r}")
            c2 = _c2(dom, c)
            if c2:
                clean[tuple(tuple(mono) for mono in key)] = c2
        self.terms = clean

    # -- construction --------------------------------------------------------

    @classmethod
    def constant(cls, dom: Domain, r: int, c=1) -> "SymPoly":
        return cls(dom, r, {((0, 0),) * r: c})

    def _add_term(self, terms: dict, key: tuple, c: FieldElem):
        if not c:
            return
        cur = terms.get(key)
        nc = c if cur is None else cur + c
        if nc:
            terms[key] = nc
        elif cur is not None:
            del terms[key]

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "SymPoly") -> "SymPoly":
        if not isinstance(other, SymPoly) or other.dom is not self.dom or other.r != self.r:
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            self._add_term(out, key, c)
        res = SymPoly(self.dom, self.r)
        res.terms = out
        return res

    def __neg__(self) -> "SymPoly":
        res = SymPoly(self.dom, self.r)
        res.terms = {key: -c for key, c in self.terms.items()}
        return res

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        o = other.__neg__()
        if o is NotImplemented:
            return NotImplemented
        return self.__add__(o)

    def scale(self, c) -> "SymPoly":
        c2 = _c2(self.dom, c)
        res = SymPoly(self.dom, self.r)
        if c2:
            res.terms = {key: cc * c2 for key, cc in self.terms.items()}
        return res

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.dom is other.dom and self.r == other.r and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.dom), self.r, frozenset(self.terms.items())))

    # -- structure -------------------------------------------------------------

    def is_pairwise_symmetric(self) -> bool:
        """Whether every transposition of two slots preserves the expression."""
        for i in range(self.r):
            for j in range(i + 1, self.r):
                for key, c in self.terms.items():
                    swapped = list(key)
                    swapped[i], swapped[j] = swapped[j], swapped[i]
                    if self.terms.get(tuple(swapped)) != c:
                        return False
        return True

    def reduce_slots(self, qb: QuotientBasis) -> "SymPoly":
        """Rewrite every slot monomial on the residue basis of qb."""
        dom = self.dom
        out: dict[tuple, FieldElem] = {}
        for key, c in self.terms.items():
            partial = [((), c)]
            for mono in key:
                red = qb.reduce_monomial(*mono)
                nxt = []
                for prefix, coef in partial:
                    for bm, code in red:
                        nxt.append((prefix + (bm,), coef * _c2(dom, FieldElem(dom.Fq, code))))
                partial = nxt
            for full_key, coef in partial:
                self._add_term(out, full_key, coef)
        res = SymPoly(dom, self.r)
        res.terms = out
        return res

    def to_json(self):
        items = sorted(self.terms.items(), key=lambda kv: kv[0])
        return [{"slots": [list(mono) for mono in key], "c": c.to_json()}
                for key, c in items]

    def __repr__(self):
        return f"SymPoly(r={self.r}, terms={len(self.terms)})"


def sym_elementary(dom: Domain, r: int, k: int, use_y: bool) -> SymPoly:
    """The k-th elementary symmetric expression in the slot variables
    Y_1..Y_r (use_y) or X_1..X_r."""
    mono = (0, 1) if use_y else (1, 0)
    terms = {}
    for subset in itertools.combinations(range(r), k):
        key = tuple(mono if i in subset else (0, 0) for i in range(r))
        terms[key] = 1
    return SymPoly(dom, r, terms)


def sym_generator_slot(ideal: PrincipalIdeal, r: int, slot: int) -> SymPoly:
    """The ideal generator written in the variables of one slot."""
    dom = ideal.dom
    d = ideal.d
    al, be = _coef(ideal)
    terms: dict[tuple, FieldElem] = {}

    def put(mono, c):
        if not c:
            return
        key = tuple(mono if i == slot else (0, 0) for i in range(r))
        terms[key] = c

    put((0, 0), al(d))
    for j in range(d):
        put((d - j, 0), al(j))
        put((d - j - 1, 1), be(j))
    return SymPoly(dom, r, terms)


def kappa(ideal: PrincipalIdeal) -> FieldElem:
    """The base-field unit relating the two rank-two operator versions;
    needs both leading coefficients nonzero."""
    dom = ideal.dom
    al, be = _coef(ideal)
    if not (al(0) and be(0)):
        raise ValueError("kappa needs alpha_0 != 0 and beta_0 != 0")
    return dom.tr + dom.nm * be(0) * al(0).inverse() + al(0) * be(0).inverse()


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def rank2_operator(ideal: PrincipalIdeal, version: str | None = None) -> SymPoly:
    """The closed two-slot operator of a principal ideal, version "w"
    (alpha_0 != 0) or "v" (beta_0 != 0); the default picks "w" when legal.

    Symmetrized half-sums of the display are stored as single sums over the
    full symmetric index range (equal whenever 2 is invertible, and the
    construction operator certifies the characteristic-2 case).
    """
    dom = ideal.dom
    d = ideal.d
    al, be = _coef(ideal)
    if version is None:
        version = "w" if al(0) else "v"
    tr, nm = dom.tr, dom.nm
    two = dom.Fq(2)
    terms: dict[tuple, FieldElem] = {}
    poly = SymPoly(dom, 2)

    def add(m1, m2, c):
        poly._add_term(terms, (m1, m2), _c2(dom, c))

    if version == "w":
        if not al(0):
            raise ValueError("the w-version operator needs alpha_0 != 0")
        a0i = al(0).inverse()
        kap1 = tr + nm * be(0) * a0i
        add((0, 0), (0, 0), be(d - 1) + tr * al(d) + two * nm * al(d) * a0i * be(0))
        for k in range(d):
            cy = kap1 * be(k)
            add((d - k - 1, 1), (0, 0), cy)
            add((0, 0), (d - k - 1, 1), cy)
            cx = nm * be(0) * al(k) * a0i + be(k - 1) - nm * be(k)
            add((d - k, 0), (0, 0), cx)
            add((0, 0), (d - k, 0), cx)
    elif version == "v":
        if not be(0):
            raise ValueError("the v-version operator needs beta_0 != 0")
        b0i = be(0).inverse()
        add((0, 0), (0, 0), -(tr * al(d)) + be(d - 1) - two * al(0) * al(d) * b0i)
        for k in range(d):
            cy = -(al(0) * be(k) * b0i)
            add((d - k - 1, 1), (0, 0), cy)
            add((0, 0), (d - k - 1, 1), cy)
            cx = -((tr + al(0) * b0i) * al(k) - be(k - 1) + nm * be(k))
            add((d - k, 0), (0, 0), cx)
            add((0, 0), (d - k, 0), cx)
    else:
        raise ValueError(f"unknown operator version {version!r}")
    for k in range(d - 1):
        for j in range(d - 1 - k):
            add((j, 1), (d - 2 - j - k, 1), be(k))
    for k in range(d):
        for j in range(d - k):
            m2 = d - 1 - j - k
            add((j, 1), (m2, 0), al(k))
            add((j, 0), (m2, 1), al(k))
    for k in range(d):
        for j in range(1, d - k):
            m2 = d - j - k
            add((j, 0), (m2, 0), -(al(k) * tr - be(k - 1) + nm * be(k)))
    out = SymPoly(dom, 2)
    out.terms = terms
    return out


def weil_operator_construction(ideal: PrincipalIdeal, r: int,
                               version: str | None = None) -> SymPoly:
    """The rank-r operator assembled from the dual system: a sum over all
    (r-1)-tuples of basis monomials, with the product of their duals reduced
    into the last slot."""
    if r < 1:
        raise ValueError("the operator needs at least one slot")
    qb = QuotientBasis(ideal, version)
    duals = dual_w(ideal) if qb.version == "w" else dual_v(ideal)
    dom = ideal.dom
    poly = SymPoly(dom, r)
    terms: dict[tuple, FieldElem] = {}
    for combo in itertools.product(qb.monomials, repeat=r - 1):
        prod = dom.one
        for mono in combo:
            prod = prod * duals[mono]
        for mono, code in qb.reduce(prod).items():
            key = combo + (mono,)
            poly._add_term(terms, key, _c2(dom, FieldElem(dom.Fq, code)))
    out = SymPoly(dom, r)
    out.terms = terms
    return out


def weil_operator(ideal: Ideal, r: int) -> SymPoly:
    """The rank-r pairing operator of an ideal, normalized to the standard
    differential scaled by the inverse of the generator.

    Monomial degree-one generators get their closed forms at every rank, a
    general principal ideal gets the two-slot display at r = 2 and the
    dual-system construction at higher rank, and the special ideal at
    infinity gets the unit tensor (plain Moore pairing).
    """
    if isinstance(ideal, SpecialIdeal):
        if ideal.kind == "infinity":
            return SymPoly.constant(ideal.dom, r)
        raise ValueError("only the special ideal at infinity has a closed operator")
    if not isinstance(ideal, PrincipalIdeal):
        raise TypeError(f"no operator scheme for {type(ideal).__name__}")
    dom = ideal.dom
    al, be = _coef(ideal)
    if ideal.d == 1 and not ideal.alpha_d:
        if not ideal.beta[0]:
            scal = al(0) ** (r - 1)
            return sym_elementary(dom, r, r - 1, use_y=True).scale(scal)
        if not ideal.alpha[0]:
            scal = be(0) ** (r - 1)
            out = SymPoly(dom, r)
            sign = dom.Fq(1)
            nm_pow = dom.Fq(1)
            for k in range(r):
                out = out + sym_elementary(dom, r, k, use_y=False).scale(sign * nm_pow * scal)
                sign = -sign
                nm_pow = nm_pow * dom.nm
            return out
    if r == 2:
        return rank2_operator(ideal)
    return weil_operator_construction(ideal, r)


# ---------------------------------------------------------------------------
# Moore determinants and the module product
# ---------------------------------------------------------------------------


def moore(ring, xs) -> object:
    """The Moore determinant det(x_i^(q^(j-1))) over a twisted ring; nonzero
    exactly when the arguments are linearly independent over the q-element
    field."""
    xs = list(xs)
    n = len(xs)
    if n == 0:
        return ring.one()
    rows = []
    for x in xs:
        row = [x]
        for _ in range(n - 1):
            row.append(ring.qpow(row[-1], 1))
        rows.append(row)
    det = ring.one()
    for col in range(n):
        pivot = None
        for i in range(col, n):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            return ring.zero()
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        pv = rows[col][col]
        det = det * pv
        pv_inv = ring.inv(pv)
        for i in range(col + 1, n):
            if rows[i][col]:
                ratio = rows[i][col] * pv_inv
                rows[i] = [rows[i][j] - ratio * rows[col][j] for j in range(n)]
    return det


def dm_product(op: SymPoly, m: DrinfeldModule, mus, target=None):
    """Evaluate a tensor operator through the module: each slot monomial acts
    on its argument by the module image of that ring monomial, and each term
    contributes its coefficient times the Moore determinant of the slot
    values."""
    ring = target if target is not None else m.ring
    mus = list(mus)
    if len(mus) != op.r:
        raise ValueError(f"operator has {op.r} slots, got {len(mus)} arguments")
    caches: list[dict] = [{(0, 0): mu} for mu in mus]

    def val(i: int, a: int, b: int):
        memo = caches[i]
        got = memo.get((a, b))
        if got is not None:
            return got
        if b:
            v = evaluate(m.phi_y, val(i, a, b - 1), target=ring)
        else:
            v = evaluate(m.phi_x, val(i, a - 1, 0), target=ring)
        memo[(a, b)] = v
        return v

    total = ring.zero()
    for key, c in op.terms.items():
        vs = [val(i, a, b) for i, (a, b) in enumerate(key)]
        det = moore(ring, vs)
        if det:
            total = total + ring.coerce(c) * det
    return total


# ---------------------------------------------------------------------------
# torsion kernels over finite structure fields
# ---------------------------------------------------------------------------


class TorsionSet:
    """The kernel of an ideal's action on a module over a finite structure
    field: the smallest searched extension where the kernel fills, an
    F_q-basis certified by a nonzero Moore determinant, and (when small
    enough to enumerate) the full point list."""

    def __init__(self, module: DrinfeldModule, ideal: Ideal, ann: SkewPoly,
                 field, ring, s: int, basis: list, points: list | None):
        self.module = module
        self.ideal = ideal
        self.annihilator = ann
        self.field = field
        self.ring = ring
        self.s = s
        self.basis = basis
        self.points = points
        self.dim = len(basis)

    def __len__(self) -> int:
        return self.module.spec.q ** self.dim

    def to_json(self):
        out = {
            "extension_degree": self.s,
            "dimension": self.dim,
            "kernel_size": len(self),
            "basis": [b.code for b in self.basis],
            "annihilator_degree": self.annihilator.deg,
        }
        if self.points is not None:
            out["points"] = sorted(p.code for p in self.points)
        return out

    def __repr__(self):
        return (f"TorsionSet(dim={self.dim}, extension_degree={self.s}, "
                f"size={len(self)})")


def _base_p_digits(code: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(code % p)
        code //= p
    return out


def _kernel_data(ann: SkewPoly, L, ring, dom: Domain, k: int,
                 span_cap: int = 4096):
    """Kernel of an additive operator inside one fixed extension field.

    Returns (found_dim, basis, points): the F_q-dimension found there, and --
    only when the kernel fills to dimension k -- a Moore-certified F_q-basis
    plus the enumerated span (None above span_cap points).  Everything is
    computed inside L with one fixed coefficient embedding, never by moving
    points between differently built fields, so the result is consistent
    with any other operator evaluated through the same ring adapter.
    """
    q = dom.q
    p = L.char
    n = L.degree
    Fp = make_field(p, 1)
    cols = []
    for i in range(n):
        img = evaluate(ann, FieldElem(L, p ** i), target=ring)
        cols.append(_base_p_digits(img.code, p, n))
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    kern = mat_kernel(Fp, rows, n)
    dq = dom.Fq.degree
    found_dim = len(kern) // dq
    if len(kern) != dq * k:
        return found_dim, None, None
    vecs = [FieldElem(L, sum(dig * p ** i for i, dig in enumerate(v))) for v in kern]
    basis: list[FieldElem] = []
    for v in vecs:
        if len(basis) == k:
            break
        if moore(ring, basis + [v]):
            basis.append(v)
    if len(basis) != k:
        raise ArithmeticError("kernel basis extraction failed the independence certificate")
    points = None
    if q ** k <= span_cap:
        scalars = [ring.coerce(FieldElem(dom.Fq, c)) for c in range(q)]
        points = []
        for combo in itertools.product(scalars, repeat=k):
            v = ring.zero()
            for c, b in zip(combo, basis):
                v = v + c * b
            points.append(v)
        for pt in points:
            if evaluate(ann, pt, target=ring):
                raise ArithmeticError("a spanned point escapes the kernel")
    return found_dim, basis, points


def torsion_kernel(m: DrinfeldModule, ideal: Ideal, cap: int = 12) -> TorsionSet:
    """Search extensions of the structure field (by increasing degree, up to
    cap steps over the coefficient field) for the full kernel of the ideal's
    action; certify an F_q-basis by a nonzero Moore determinant and spell out
    the F_q-span when it is small enough to enumerate."""
    spec = m.spec
    if not getattr(spec, "is_finite", False):
        raise ValueError("torsion kernels live over finite structure fields")
    q = spec.q
    dom = get_domain(q)
    ann = annihilator(m, ideal)
    if not ann.coeffs or not ann.coeffs[0]:
        raise ValueError("inseparable ideal action: the kernel operator has no constant term")
    k = ann.deg
    big = m.ring.field
    p = big.char
    dq = dom.Fq.degree
    rel = big.degree // (dq * spec.m)
    found_dim = 0
    for u in range(1, cap + 1):
        L = make_field(p, big.degree * u)
        ring = with_twist(L, q)
        dim, basis, points = _kernel_data(ann, L, ring, dom, k)
        found_dim = max(found_dim, dim)
        if basis is None:
            continue
        return TorsionSet(m, ideal, ann, L, ring, rel * u, basis, points)
    raise ValueError(
        f"kernel does not fill within extension cap {cap}: "
        f"found dimension {found_dim} of {k}")


# ---------------------------------------------------------------------------
# the pairing and its property report
# ---------------------------------------------------------------------------


def weil_pairing(m: DrinfeldModule, ideal: Ideal, mus, target=None, check: bool = True):
    """Pair kernel points through the ideal's operator; with check on,
    membership of every argument in the kernel is verified first."""
    mus = list(mus)
    ring = target
    if ring is None:
        if mus and isinstance(mus[0], FieldElem):
            ring = with_twist(mus[0].field, m.spec.q)
        else:
            ring = m.ring
    if check:
        ann = annihilator(m, ideal)
        for mu in mus:
            if evaluate(ann, mu, target=ring):
                raise ValueError("argument is not in the division kernel")
    op = weil_operator(ideal, len(mus))
    return dm_product(op, m, mus, target=ring)


def _monomial_kind(ideal: Ideal) -> str | None:
    """'x' or 'y' for degree-one monomial principal ideals, else None."""
    if isinstance(ideal, PrincipalIdeal) and ideal.d == 1 and not ideal.alpha_d:
        if not ideal.beta[0]:
            return "x"
        if not ideal.alpha[0]:
            return "y"
    return None


# ---------------------------------------------------------------------------
# change-of-ideal compatibility as an identity of bilinear forms
# ---------------------------------------------------------------------------
#
# On the division kernel of a monomial ideal, every value this module computes
# -- the rank-two pairing, the Moore form of the special-ideal images, and the
# wedge annihilator applied to either -- is a bilinear combination of the
# coordinates u_i = u^(q^i) of its two arguments.  Coefficient matrices over
# those coordinates are therefore exact proxies for functions on the kernel:
# the kernel relation (the monic annihilator) rewrites any coordinate of index
# >= deg down to lower ones, and a basis of the kernel has an invertible Moore
# matrix, so two reduced matrices are equal exactly when the functions agree
# on every pair of kernel points.  Working at matrix level checks the law on
# the whole kernel at once, entirely inside the structure field.


def _mat_add(D: dict, key, c):
    """Accumulate one coordinate-monomial coefficient, dropping zeros."""
    if not c:
        return
    got = D.get(key)
    v = c if got is None else got + c
    if v:
        D[key] = v
    else:
        del D[key]


def _mat_reduce(ring, D: dict, rel: list) -> dict:
    """Rewrite u_a, v_b with index >= len(rel) via the kernel relation
    u_n = -(rel_0 u_0 + ... + rel_(n-1) u_(n-1)), Frobenius-shifted to the
    needed index, until every index is < n."""
    n = len(rel)
    work = dict(D)
    out: dict = {}
    while work:
        (a, b), c = work.popitem()
        if not c:
            continue
        if a >= n:
            e = a - n
            for k in range(n):
                vv = -(ring.qpow(rel[k], e) * c)
                if vv:
                    work[(k + e, b)] = work.get((k + e, b), ring.zero()) + vv
            continue
        if b >= n:
            e = b - n
            for k in range(n):
                vv = -(ring.qpow(rel[k], e) * c)
                if vv:
                    work[(a, k + e)] = work.get((a, k + e), ring.zero()) + vv
            continue
        _mat_add(out, (a, b), c)
    return out


def _moore_matrix(ring, f1: SkewPoly, f2: SkewPoly) -> dict:
    """Coefficient matrix of (u, v) -> f1(u) f2(v)^[1] - f2(v) f1(u)^[1]."""
    D: dict = {}
    for i in range(f1.deg + 1):
        for j in range(f2.deg + 1):
            _mat_add(D, (i, j + 1), f1.coeff(i) * ring.qpow(f2.coeff(j), 1))
            _mat_add(D, (i + 1, j), -(f2.coeff(j) * ring.qpow(f1.coeff(i), 1)))
    return D


def _operator_matrix(op: SymPoly, m: DrinfeldModule) -> dict:
    """Coefficient matrix of a two-slot tensor operator fed through the
    module, as in dm_product, with both slot arguments left symbolic."""
    ring = m.ring
    images: dict = {}

    def slot_poly(ab):
        got = images.get(ab)
        if got is None:
            a, b = ab
            f = SkewPoly(ring, [ring.one()])
            for _ in range(a):
                f = m.phi_x * f
            for _ in range(b):
                f = m.phi_y * f
            images[ab] = got = f
        return got

    D: dict = {}
    for key, c in op.terms.items():
        f1, f2 = slot_poly(key[0]), slot_poly(key[1])
        cc = ring.coerce(c)
        for ab, v in _moore_matrix(ring, f1, f2).items():
            _mat_add(D, ab, cc * v)
    return D


def compatibility_constant(m: DrinfeldModule, kind: str):
    """The unit relating the two sides of the change-of-ideal law for this
    library's rank-two family: zeta^(q(q+1)/2), divided by zeta once more for
    the 'y' ideal, times the twist parameter to the power -(q+1).  Returns
    None when the module does not carry its twist parameter."""
    J = (m.params or {}).get("J")
    if J is None:
        return None
    spec = m.spec
    q = spec.q
    e = (q * (q + 1)) // 2 - (1 if kind == "y" else 0)
    ring = m.ring
    z = ring.coerce(spec.zeta)
    num = ring.one()
    for _ in range(e):
        num = num * z
    # The twist parameter may live in the extension where it was found even
    # when the module's coefficients descend; its (q+1)-th power always lies
    # in the structure field, so power first, then project.
    den = J
    for _ in range(q):
        den = den * J
    if isinstance(den, FieldElem) and den.field is not ring.field:
        den = unembed(den, ring.field) if den.field.degree > ring.field.degree else den
    den = ring.coerce(den)
    return num * ring.inv(den)


def ideal_compatibility(m: DrinfeldModule, psi: DrinfeldModule, ideal: Ideal,
                        inner: Ideal) -> dict:
    """Check, as an exact identity of reduced coefficient matrices on the
    ideal's division kernel, that pairing the inner ideal's images equals a
    unit times the wedge image of the ideal's pairing:

        moore(ann_inner u, ann_inner v) = c * ann_psi_inner(pairing(u, v)).

    Returns the verdict, the derived unit c (None if the two sides are not
    proportional), and whether c matches the closed form for the family."""
    ring = m.ring
    ann = annihilator(m, ideal)
    rel = [ann.coeff(i) for i in range(ann.deg)]
    ann_inner = annihilator(m, inner)
    ann_psi = annihilator(psi, inner)
    if ann_psi.deg != 1:
        raise ValueError("the wedge annihilator of the inner ideal must have degree one")
    w0 = -ann_psi.coeff(0)

    W = _mat_reduce(ring, _operator_matrix(weil_operator(ideal, 2), m), rel)
    lhs: dict = {}
    for (a, b), c in W.items():
        _mat_add(lhs, (a + 1, b + 1), ring.qpow(c, 1))
    for (a, b), c in W.items():
        _mat_add(lhs, (a, b), -(w0 * c))
    lhs = _mat_reduce(ring, lhs, rel)
    rhs = _mat_reduce(ring, _moore_matrix(ring, ann_inner, ann_inner), rel)

    constant = None
    proportional = set(rhs) == set(lhs)
    if proportional and rhs:
        for key in rhs:
            ratio = rhs[key] * ring.inv(lhs[key])
            if constant is None:
                constant = ratio
            elif ratio - constant:
                proportional = False
                constant = None
                break
    closed = compatibility_constant(m, _monomial_kind(ideal))
    matches = None
    if constant is not None and closed is not None:
        matches = not (constant - closed)
    return {
        "identity": proportional and constant is not None,
        "constant": constant,
        "closed_form": closed,
        "closed_form_match": matches,
    }


def property_suite(m: DrinfeldModule, ideal: Ideal, psi: DrinfeldModule | None = None,
                   cap: int = 12, include_table: bool = True) -> dict:
    """Exhaustive checks of the pairing laws on one division kernel.

    Reports additivity and scalar/ring semilinearity in each slot (against
    the exterior-square module), the alternating law, surjectivity onto the
    exterior square's kernel, equivariance under the structure-field
    Frobenius, and -- for the two degree-one monomial ideals -- the
    change-of-ideal compatibility through the special ideals whose product
    they are.
    """
    spec = m.spec
    q = spec.q
    dom = get_domain(q)
    ts = torsion_kernel(m, ideal, cap)
    if psi is None:
        psi = wedge(m)
    ts2 = torsion_kernel(psi, ideal, cap)
    if ts.points is None or ts2.points is None:
        raise ValueError("the kernel is too large for the exhaustive property suite")
    p = ts.field.char
    n = math.lcm(ts.field.degree, ts2.field.degree)
    L = make_field(p, n)
    ring = with_twist(L, q)
    # Both kernels are recomputed inside the one composite field: moving
    # points between separately built extensions can silently conjugate the
    # coefficient embedding, so nothing is ever embedded across towers.
    if ts.field is L:
        pts = ts.points
    else:
        _, _, pts = _kernel_data(ts.annihilator, L, ring, dom, ts.dim)
        if pts is None:
            raise ArithmeticError("kernel does not fill in the composite field")
    if ts2.field is L:
        psi_points = ts2.points
    else:
        _, _, psi_points = _kernel_data(ts2.annihilator, L, ring, dom, ts2.dim)
        if psi_points is None:
            raise ArithmeticError("kernel does not fill in the composite field")
    ker_psi = {v.code for v in psi_points}
    idx = {v.code: i for i, v in enumerate(pts)}
    N = len(pts)
    if N > 100:
        raise ValueError("the kernel is too large for the exhaustive property suite")
    op = weil_operator(ideal, 2)
    table = [[dm_product(op, m, [pts[i], pts[j]], target=ring) for j in range(N)]
             for i in range(N)]

    alternating = all(not table[i][i] for i in range(N))
    alternating = alternating and all(
        not (table[i][j] + table[j][i]) for i in range(N) for j in range(i + 1, N))

    additive = True
    for i1 in range(N):
        for i2 in range(N):
            i3 = idx[(pts[i1] + pts[i2]).code]
            for j in range(N):
                if table[i3][j] != table[i1][j] + table[i2][j]:
                    additive = False
                if table[j][i3] != table[j][i1] + table[j][i2]:
                    additive = False
            if not additive:
                break
        if not additive:
            break

    scalar = True
    for c in range(2, q):
        cc = ring.coerce(FieldElem(dom.Fq, c))
        for i in range(N):
            i2 = idx[(cc * pts[i]).code]
            for j in range(N):
                if table[i2][j] != cc * table[i][j] or table[j][i2] != cc * table[j][i]:
                    scalar = False
                    break
            if not scalar:
                break
        if not scalar:
            break

    semilinear = True
    for f_m, f_psi in ((m.phi_x, psi.phi_x), (m.phi_y, psi.phi_y)):
        img = [idx[evaluate(f_m, v, target=ring).code] for v in pts]
        for i in range(N):
            for j in range(N):
                want = evaluate(f_psi, table[i][j], target=ring)
                if table[img[i]][j] != want or table[i][img[j]] != want:
                    semilinear = False
                    break
            if not semilinear:
                break
        if not semilinear:
            break

    values = {table[i][j].code for i in range(N) for j in range(N)}
    membership = values <= ker_psi
    surjective = values == ker_psi

    steps = m.ring.field.degree
    galois = True
    for i in range(N):
        si = idx[FieldElem(L, L.frobi(pts[i].code, steps)).code]
        for j in range(N):
            sj = idx[FieldElem(L, L.frobi(pts[j].code, steps)).code]
            if table[si][sj] != FieldElem(L, L.frobi(table[i][j].code, steps)):
                galois = False
                break
        if not galois:
            break

    # Change-of-ideal compatibility.  The literal form -- wedge image of the
    # pairing equals the Moore form of the special-ideal images -- holds only
    # for leading-term-normalized families; for this library's family the two
    # sides are proportional by an explicit unit (see ideal_compatibility).
    # The law is checked as an exact identity of reduced coefficient matrices
    # (equivalent to checking every pair of kernel points at once), the unit
    # is required to match its closed form, and the already-computed pairing
    # table cross-checks the same unit pointwise in the composite field.
    kind = _monomial_kind(ideal)
    compatible = None
    if kind is not None:
        routes = (("infinity",) if kind == "x" else ("zero", "infinity"))
        compatible = True
        for route in routes:
            inner = SpecialIdeal(dom, route)
            verdict = ideal_compatibility(m, psi, ideal, inner)
            if not verdict["identity"] or verdict["closed_form_match"] is False:
                compatible = False
                break
            cc = ring.coerce(verdict["constant"])
            ann_inner = annihilator(m, inner)
            ann_psi_out = annihilator(psi, inner)
            img = [evaluate(ann_inner, v, target=ring) for v in pts]
            for i in range(N):
                for j in range(N):
                    lhs = evaluate(ann_psi_out, table[i][j], target=ring)
                    rhs = moore(ring, [img[i], img[j]])
                    if rhs != cc * lhs:
                        compatible = False
                        break
                if not compatible:
                    break
            if not compatible:
                break

    report = {
        "ideal": ideal.to_json(),
        "extension_degree": n // (dom.Fq.degree * spec.m),
        "kernel_size": N,
        "properties": {
            "alternating": alternating,
            "multilinear": additive and scalar and semilinear,
            "surjective": surjective,
            "membership": membership,
            "galois": galois,
            "compatible": compatible,
        },
    }
    if include_table and N <= 16:
        report["pairing_table"] = [[table[i][j].code for j in range(N)] for i in range(N)]
    return report

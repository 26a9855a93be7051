"""The coordinate ring of the degree-two-truncated projective line.

Fix a prime power q and a generator zeta of the quadratic extension's
multiplicative group.  The ring is generated over F_q by x and y subject to

    y^2 - tr * x * y + nm * x^2 - x = 0,

where tr and nm are the trace and norm of zeta down to F_q.  Concretely,
inside the rational function field these are x = 1/pi and y = t/pi for the
defining quadratic pi = (t - zeta)(t - zeta^q), and the ring consists of
exactly the functions whose only pole is the degree-two place cut out by pi.

Elements are stored eagerly reduced: a pair of F_q-polynomials (p, s) in x
standing for p(x) + s(x) y, with every y^2 rewritten through the relation at
multiplication time.  The degree of a nonzero element is minus twice its
valuation at the distinguished place, which equals the dimension of the
quotient by the element — and, conveniently, 2 * max(deg p, deg s + 1).

Ideals come in three restricted flavors (all this library needs): principal
ideals recorded through the coefficient scheme (alpha_j, beta_j, alpha_d) of
their generator, the two distinguished non-principal primes above the
infinite place — (x, y) and (x - nm^-1, y) — and formal products.  Products
stay as generator sets; equality and membership questions are answered by
bounded-degree linear algebra over F_q, which is exact and honest at desk
scale.
"""

from __future__ import annotations

from . import funcfield as _ff
from .ffield import FieldElem, make_field, mat_solve, trace_norm, unembed
from .funcfield import FuncField, RatFunc, std_elements

_DOMAIN_CACHE: dict[int, "Domain"] = {}


def get_domain(q: int) -> "Domain":
    dom = _DOMAIN_CACHE.get(q)
    if dom is None:
        dom = Domain(q)
        _DOMAIN_CACHE[q] = dom
    return dom


class Domain:
    """Context object tying together F_q, its quadratic extension, and the
    rational-function model of the coordinate ring."""

    def __init__(self, q: int):
        p = _char_of(q)
        dq = 0
        qq = 1
        while qq < q:
            qq *= p
            dq += 1
        if qq != q:
            raise ValueError(f"{q} is not a prime power")
        self.q = q
        self.p = p
        self.Fq = make_field(p, dq)
        self.Fq2 = make_field(p, 2 * dq)
        self.zeta = self.Fq2.gen
        self.H = FuncField(self.Fq2, q)
        self.std = std_elements(self.H)
        tr, nm = trace_norm(self.zeta, self.Fq)
        self.tr = tr  # trace of zeta, an F_q element
        self.nm = nm  # norm of zeta = zeta^(q+1), an F_q element
        self._pi_t = self.std["pi"]

    # -- element constructors ------------------------------------------------

    def elem(self, p_part, s_part=()) -> "DomainElem":
        pp = [self._fq_code(c) for c in p_part]
        ss = [self._fq_code(c) for c in s_part]
        return DomainElem(self, _ff.ptrim(pp), _ff.ptrim(ss))

    def _fq_code(self, c) -> int:
        if isinstance(c, FieldElem):
            if c.field is not self.Fq:
                raise ValueError(f"coefficient {c!r} is not in F_{self.q}")
            return c.code
        return self.Fq(c).code

    @property
    def zero(self) -> "DomainElem":
        return DomainElem(self, [], [])

    @property
    def one(self) -> "DomainElem":
        return DomainElem(self, [1], [])

    @property
    def x(self) -> "DomainElem":
        return DomainElem(self, [0, 1], [])

    @property
    def y(self) -> "DomainElem":
        return DomainElem(self, [], [1])

    def monomial(self, i: int, with_y: bool = False) -> "DomainElem":
        if with_y:
            return DomainElem(self, [], [0] * i + [1])
        return DomainElem(self, [0] * i + [1], [])

    def coord_len(self, k: int) -> int:
        return 2 * k + 1

    def coords(self, e: "DomainElem", k: int) -> list[int]:
        """Coordinates of an element of index <= k in the flat monomial order
        1, x, y, x^2, xy, x^3, x^2 y, ...: position 0 is the constant, and
        positions 2i-1, 2i hold the x^i and x^(i-1) y coefficients."""
        if e.index > k:
            raise ValueError(f"element of index {e.index} exceeds capacity {k}")
        out = [0] * (2 * k + 1)
        for i, c in enumerate(e.p_part):
            if c:
                out[0 if i == 0 else 2 * i - 1] = c
        for j, c in enumerate(e.s_part):
            if c:
                out[2 * (j + 1)] = c
        return out

    def from_coords(self, v: list[int]) -> "DomainElem":
        pp = [v[0]] + [v[2 * i - 1] for i in range(1, (len(v) + 1) // 2)]
        ss = [v[2 * i] for i in range(1, (len(v) + 1) // 2)]
        return DomainElem(self, _ff.ptrim(pp), _ff.ptrim(ss))

    def __repr__(self):
        return f"TruncatedLineRing(q={self.q})"


def _char_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise ValueError("q must be >= 2")


class DomainElem:
    """p(x) + s(x) * y with F_q coefficients, eagerly reduced."""

    __slots__ = ("dom", "p_part", "s_part")

    def __init__(self, dom: Domain, p_part: list[int], s_part: list[int]):
        self.dom = dom
        self.p_part = p_part
        self.s_part = s_part

    # -- basic ring structure -------------------------------------------------

    def _co(self, other):
        if isinstance(other, DomainElem):
            return other if other.dom is self.dom else None
        if isinstance(other, int):
            return self.dom.elem([other])
        if isinstance(other, FieldElem) and other.field is self.dom.Fq:
            return self.dom.elem([other])
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        F = self.dom.Fq
        return DomainElem(self.dom, _ff.padd(F, self.p_part, o.p_part), _ff.padd(F, self.s_part, o.s_part))

    __radd__ = __add__

    def __neg__(self):
        F = self.dom.Fq
        return DomainElem(self.dom, _ff.pneg(F, self.p_part), _ff.pneg(F, self.s_part))

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        dom = self.dom
        F = dom.Fq
        p1, s1, p2, s2 = self.p_part, self.s_part, o.p_part, o.s_part
        pp = _ff.pmul(F, p1, p2)
        ss = _ff.padd(F, _ff.pmul(F, p1, s2), _ff.pmul(F, s1, p2))
        cross = _ff.pmul(F, s1, s2)
        if cross:
            # y^2 = tr * x * y - nm * x^2 + x
            tr_c, nm_c = dom.tr.code, dom.nm.code
            ss = _ff.padd(F, ss, [0] + _ff.pscale(F, tr_c, cross))
            xterm = _ff.psub(F, [0] + cross, [0, 0] + _ff.pscale(F, nm_c, cross))
            pp = _ff.padd(F, pp, xterm)
        return DomainElem(dom, pp, ss)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("coordinate-ring elements have no negative powers")
        result = self.dom.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.p_part == o.p_part and self.s_part == o.s_part

    def __hash__(self):
        return hash((tuple(self.p_part), tuple(self.s_part)))

    def __bool__(self):
        return bool(self.p_part) or bool(self.s_part)

    # -- structure -------------------------------------------------------------

    @property
    def index(self) -> int:
        """Half the degree: max(deg_x p, deg_x s + 1); 0 for constants and 0."""
        dp = len(self.p_part) - 1
        ds = len(self.s_part) - 1
        return max(dp, ds + 1, 0)

    def to_json(self):
        F = self.dom.Fq
        return {
            "c": FieldElem(F, self.p_part[0] if self.p_part else 0).to_json(),
            "a": [FieldElem(F, c).to_json() for c in self.p_part[1:]],
            "b": [FieldElem(F, c).to_json() for c in self.s_part],
        }

    def __repr__(self):
        F = self.dom.Fq
        parts = []
        if self.p_part:
            parts.append(_ff.pstr(F, self.p_part, "x"))
        if self.s_part:
            parts.append(f"({_ff.pstr(F, self.s_part, 'x')})*y")
        return " + ".join(parts) if parts else "0"


def deg(a: DomainElem) -> int:
    """Minus twice the valuation at the distinguished degree-two place;
    equals dim of the quotient by (a).  Errors on zero."""
    if not a:
        raise ValueError("the zero element has no degree")
    return 2 * a.index


def to_ratfunc(a: DomainElem) -> RatFunc:
    """The element as a rational function of t: numerator over pi^index."""
    dom = a.dom
    H = dom.H
    F2 = dom.Fq2
    d = a.index
    pi_num = dom._pi_t.num
    num: list[int] = []
    pw = {0: [1]}
    for k in range(1, d + 1):
        pw[k] = _ff.pmul(F2, pw[k - 1], pi_num)
    for i, c in enumerate(a.p_part):
        if c:
            ce = _emb_code(dom, c)
            num = _ff.padd(F2, num, _ff.pscale(F2, ce, pw[d - i]))
    for j, c in enumerate(a.s_part):
        if c:
            ce = _emb_code(dom, c)
            num = _ff.padd(F2, num, _ff.pscale(F2, ce, _ff.pmul(F2, [0, 1], pw[d - 1 - j])))
    return RatFunc(H, num, pw[d])


def _emb_code(dom: Domain, c: int) -> int:
    from .ffield import embed

    return embed(FieldElem(dom.Fq, c), dom.Fq2).code


class NotInRingError(ValueError):
    """The rational function does not lie in the coordinate ring."""


def from_ratfunc(dom: Domain, f: RatFunc) -> DomainElem:
    """Inverse of to_ratfunc.  Errors name what goes wrong: a denominator
    factor supported away from the distinguished place, a pole at the place
    over t = infinity, or coefficients outside F_q."""
    if f.ff is not dom.H:
        raise ValueError("rational function lives over a different field")
    F2 = dom.Fq2
    pi_num = dom._pi_t.num
    den = list(f.den)
    k = 0
    while len(den) > 1:
        quot, rem = _ff.pdivmod(F2, den, pi_num)
        if rem:
            raise NotInRingError(
                f"denominator factor {_ff.pstr(F2, den, 't')} is not a power of the "
                f"distinguished quadratic {_ff.pstr(F2, pi_num, 't')}: "
                "the function has a pole at a forbidden place"
            )
        den = quot
        k += 1
    num = list(f.num)
    if len(num) - 1 > 2 * k:
        raise NotInRingError(
            f"numerator degree {len(num) - 1} exceeds {2 * k}: "
            "the function has a pole at the place over t = infinity"
        )
    alphas = []
    betas = []
    for m in range(k + 1):
        if m < k:
            num, digit = _ff.pdivmod(F2, num, pi_num)
        else:
            num, digit = [], num
        # digit has degree <= 1
        a_c = digit[0] if digit else 0
        b_c = digit[1] if len(digit) > 1 else 0
        alphas.append(_unemb(dom, a_c, m))
        betas.append(_unemb(dom, b_c, m))
    if betas[k] != 0:
        raise NotInRingError("top digit is not constant")  # pragma: no cover
    pp = [alphas[k]] + [alphas[k - i] for i in range(1, k + 1)]
    ss = [betas[k - 1 - j] for j in range(k)]
    return DomainElem(dom, _ff.ptrim(pp), _ff.ptrim(ss))


def _unemb(dom: Domain, code: int, digit_index: int) -> int:
    try:
        return unembed(FieldElem(dom.Fq2, code), dom.Fq).code
    except ValueError:
        raise NotInRingError(
            f"expansion digit {digit_index} has a coefficient outside F_{dom.q}: "
            "the function is not defined over the base"
        ) from None


def rr_basis(dom: Domain, k: int) -> list[DomainElem]:
    """Basis of the functions with pole order at most k at the distinguished
    place: 1, x, ..., x^k, y, xy, ..., x^(k-1) y.  Dimension 2k + 1."""
    if k < 0:
        raise ValueError("pole order bound must be >= 0")
    out = [dom.one]
    out.extend(dom.monomial(i) for i in range(1, k + 1))
    out.extend(dom.monomial(i, with_y=True) for i in range(0, k))
    return out


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------


class Ideal:
    dom: Domain

    def generators(self) -> list[DomainElem]:
        raise NotImplementedError

    def quotient_dim(self) -> int:
        raise NotImplementedError


class PrincipalIdeal(Ideal):
    """(P) for P = alpha_d + sum_j (alpha_j x^(d-j) + beta_j y x^(d-j-1)).

    The coefficient scheme (alpha list, beta list, alpha_d) is the canonical
    serialization; the generator element is kept alongside.
    """

    def __init__(self, dom: Domain, alpha, beta, alpha_d):
        self.dom = dom
        d = len(alpha)
        if len(beta) != d:
            raise ValueError("alpha and beta must have equal length")
        self.alpha = [dom._fq_code(c) for c in alpha]
        self.beta = [dom._fq_code(c) for c in beta]
        self.alpha_d = dom._fq_code(alpha_d)
        self.d = d
        pp = [self.alpha_d] + [self.alpha[d - i] for i in range(1, d + 1)]
        ss = [self.beta[d - 1 - j] for j in range(d)]
        self.elem = DomainElem(dom, _ff.ptrim(pp), _ff.ptrim(ss))
        if not self.elem:
            raise ValueError("zero generator")
        if d >= 1 and self.alpha[0] == 0 and self.beta[0] == 0:
            raise ValueError(
                "degenerate coefficient scheme: alpha_0 = beta_0 = 0 (the generator has lower degree)"
            )

    @classmethod
    def from_elem(cls, a: DomainElem) -> "PrincipalIdeal":
        d = a.index
        alpha = [0] * d
        beta = [0] * d
        alpha_d = a.p_part[0] if a.p_part else 0
        for i, c in enumerate(a.p_part):
            if i >= 1:
                alpha[d - i] = c
        for j, c in enumerate(a.s_part):
            beta[d - 1 - j] = c
        F = a.dom.Fq
        return cls(a.dom, [FieldElem(F, c) for c in alpha], [FieldElem(F, c) for c in beta],
                   FieldElem(F, alpha_d))

    def generators(self) -> list[DomainElem]:
        return [self.elem]

    def quotient_dim(self) -> int:
        return deg(self.elem)

    def to_json(self):
        F = self.dom.Fq
        return {
            "alpha": [FieldElem(F, c).to_json() for c in self.alpha],
            "beta": [FieldElem(F, c).to_json() for c in self.beta],
            "alpha_d": FieldElem(F, self.alpha_d).to_json(),
        }

    def __repr__(self):
        return f"({self.elem!r})"


class SpecialIdeal(Ideal):
    """The two distinguished degree-one primes over the infinite place:
    kind "zero" is (x - nm^-1, y); kind "infinity" is (x, y)."""

    def __init__(self, dom: Domain, kind: str):
        if kind not in ("zero", "infinity"):
            raise ValueError("kind must be 'zero' or 'infinity'")
        self.dom = dom
        self.kind = kind

    def generators(self) -> list[DomainElem]:
        dom = self.dom
        if self.kind == "infinity":
            return [dom.x, dom.y]
        c = dom.nm.inverse()
        return [dom.x - dom.elem([c]), dom.y]

    def quotient_dim(self) -> int:
        return 1

    def to_json(self):
        return {"special": self.kind}

    def __repr__(self):
        return f"SpecialIdeal({self.kind})"


class ProductIdeal(Ideal):
    def __init__(self, factors: list[Ideal]):
        if not factors:
            raise ValueError("empty product")
        self.dom = factors[0].dom
        if any(f.dom is not self.dom for f in factors):
            raise ValueError("factors live over different rings")
        self.factors = list(factors)

    def generators(self) -> list[DomainElem]:
        gens = [self.dom.one]
        for f in self.factors:
            gens = [g * h for g in gens for h in f.generators()]
        return gens

    def quotient_dim(self) -> int:
        return sum(f.quotient_dim() for f in self.factors)

    def to_json(self):
        return {"product": [f.to_json() for f in self.factors]}

    def __repr__(self):
        return " * ".join(repr(f) for f in self.factors)


def ideal_product(*ideals: Ideal) -> ProductIdeal:
    flat: list[Ideal] = []
    for ideal in ideals:
        if isinstance(ideal, ProductIdeal):
            flat.extend(ideal.factors)
        else:
            flat.append(ideal)
    return ProductIdeal(flat)


def in_ideal(g: DomainElem, ideal: Ideal | list[DomainElem], slack: int = 3):
    """A witness list (a_i) with sum a_i h_i = g over the generators h_i, or
    None.  Searches multipliers of index up to index(g) + slack, which is
    exhaustive enough for the desk-scale identities exercised here."""
    gens = ideal.generators() if isinstance(ideal, Ideal) else list(ideal)
    gens = [h for h in gens if h]
    if not gens:
        return None if g else []
    dom = g.dom if isinstance(g, DomainElem) else gens[0].dom
    gi = g.index if g else 0
    caps = [max(0, gi - min(h.index for h in gens)) + slack for h in gens]
    row_cap = max(cap + h.index for cap, h in zip(caps, gens))
    row_cap = max(row_cap, gi)
    nrows = dom.coord_len(row_cap)
    cols: list[list[int]] = []
    labels: list[tuple[int, int, bool]] = []
    for gen_idx, (h, cap) in enumerate(zip(gens, caps)):
        for i in range(cap + 1):
            for with_y in ((False,) if i == 0 else (False, True)):
                mono = dom.monomial(i - 1, True) if with_y else dom.monomial(i) if i else dom.one
                prod = mono * h
                cols.append(dom.coords(prod, row_cap))
                labels.append((gen_idx, i, with_y))
        # include the pure-y monomial at x-power 0
        prod = dom.y * h
        cols.append(dom.coords(prod, row_cap))
        labels.append((gen_idx, 0, True))
    rows = [[col[r] for col in cols] for r in range(nrows)]
    rhs = dom.coords(g, row_cap)
    sol = mat_solve(dom.Fq, rows, rhs)
    if sol is None:
        return None
    witness = [dom.zero for _ in gens]
    for coef, (gen_idx, i, with_y) in zip(sol, labels):
        if coef:
            if with_y:
                mono = dom.monomial(i - 1, True) if i else dom.y
            else:
                mono = dom.monomial(i) if i else dom.one
            scal = DomainElem(dom, [coef], [])  # coef is an F_q code
            witness[gen_idx] = witness[gen_idx] + scal * mono
    return witness


def ideal_contains(big: Ideal, small: Ideal, slack: int = 3) -> bool:
    return all(in_ideal(g, big, slack) is not None for g in small.generators())


def ideal_equal(a: Ideal, b: Ideal, slack: int = 3) -> bool:
    return ideal_contains(a, b, slack) and ideal_contains(b, a, slack)


def quotient_basis(ideal: PrincipalIdeal):
    """(basis, reduce) for the quotient by a principal ideal.

    For alpha_0 != 0 the basis is 1, y, x, xy, ..., x^(d-1), x^(d-1) y; for
    alpha_0 = 0 (so beta_0 != 0) it is 1, y, x, xy, ..., x^(d-2) y, x^(d-1),
    x^d.  ``reduce`` maps any ring element to its coefficient vector over the
    basis (a list of F_q elements, basis order).
    """
    dom = ideal.dom
    d = ideal.d
    if d == 0:
        raise ValueError("the unit ideal has an empty quotient")
    if ideal.alpha[0] != 0:
        basis = []
        for i in range(d):
            basis.append(dom.monomial(i) if i else dom.one)
            basis.append(dom.monomial(i, with_y=True))
    else:
        basis = []
        for i in range(d - 1):
            basis.append(dom.monomial(i) if i else dom.one)
            basis.append(dom.monomial(i, with_y=True))
        basis.append(dom.monomial(d - 1))
        basis.append(dom.monomial(d))
    P = ideal.elem
    Fq = dom.Fq

    def reduce(e: DomainElem) -> list[FieldElem]:
        cap = max(e.index, d) - d + 1
        row_cap = max(e.index, cap + P.index, max(b.index for b in basis))
        nrows = dom.coord_len(row_cap)
        cols = [dom.coords(b, row_cap) for b in basis]
        mult_monos = [dom.one]
        mult_monos += [dom.monomial(i) for i in range(1, cap + 1)]
        mult_monos += [dom.monomial(i, with_y=True) for i in range(cap)]
        cols_p = [dom.coords(m * P, row_cap) for m in mult_monos]
        all_cols = cols + cols_p
        rows = [[col[r] for col in all_cols] for r in range(nrows)]
        rhs = dom.coords(e, row_cap)
        sol = mat_solve(Fq, rows, rhs)
        if sol is None:  # pragma: no cover - the basis spans the quotient
            raise RuntimeError("reduction failed; quotient basis does not span")
        return [FieldElem(Fq, c) for c in sol[: len(basis)]]

    return basis, reduce

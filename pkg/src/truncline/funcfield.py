"""Rational function fields over finite fields, with the infinite place.

The central object is :class:`FuncField` -- the field K(t) for a finite
coefficient field K carrying a designated twist q (a power of the
characteristic).  Rational functions are kept in canonical form (monic
denominator, numerator and denominator coprime), so equality is
coefficientwise.  Polynomials appear internally as little-endian lists of
integer field codes with no trailing zeros.

On top of that live:

* Laurent expansion at the infinite place, in the local coordinate
  u = t - zeta^q (the reciprocal of the standard uniformizer), and residues
  at t = zeta;
* radical extensions K(t)(root) for X^n - c, built only after an
  irreducibility check (Capelli: c escapes all prime-power conditions), with
  a designated named root and the twist acting by root -> root^q;
* a univariate symbolic coefficient ring whose variable is an unknown unit:
  Laurent polynomials in one symbol, with the twist sending the symbol to
  its q-th power.

Everything here exposes one shared coefficient-ring protocol -- zero(),
one(), coerce(), qpow(), inv(), is_unit(), attribute q -- consumed by the
twisted-polynomial layer.
"""

from __future__ import annotations

from .ffield import FieldElem, FiniteField, embed, is_subfield, nth_roots

# ---------------------------------------------------------------------------
# polynomials as little-endian lists of integer codes over a FiniteField
# ---------------------------------------------------------------------------


def ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def padd(F: FiniteField, f: list[int], g: list[int]) -> list[int]:
    if len(f) < len(g):
        f, g = g, f
    out = f[:]
    for i, c in enumerate(g):
        out[i] = F.addi(out[i], c)
    return ptrim(out)


def pneg(F: FiniteField, f: list[int]) -> list[int]:
    return [F.negi(c) for c in f]


def psub(F: FiniteField, f: list[int], g: list[int]) -> list[int]:
    return padd(F, f, pneg(F, g))


def pscale(F: FiniteField, c: int, f: list[int]) -> list[int]:
    if c == 0:
        return []
    return ptrim([F.muli(c, a) for a in f])


def pmul(F: FiniteField, f: list[int], g: list[int]) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = F.addi(out[i + j], F.muli(a, b))
    return ptrim(out)


def pdivmod(F: FiniteField, f: list[int], g: list[int]) -> tuple[list[int], list[int]]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = f[:]
    dg = len(g) - 1
    inv_lead = F.invi(g[-1])
    quot = [0] * max(0, len(f) - dg)
    while len(f) > dg:
        c = f[-1]
        if c:
            c = F.muli(c, inv_lead)
            off = len(f) - 1 - dg
            quot[off] = c
            for i, a in enumerate(g):
                f[off + i] = F.subi(f[off + i], F.muli(c, a))
        f.pop()
    return ptrim(quot), ptrim(f)


def pgcd(F: FiniteField, f: list[int], g: list[int]) -> list[int]:
    f, g = f[:], g[:]
    while g:
        _, r = pdivmod(F, f, g)
        f, g = g, r
    if f:
        inv = F.invi(f[-1])
        f = [F.muli(inv, c) for c in f]
    return f


def ppow(F: FiniteField, f: list[int], n: int) -> list[int]:
    result = [1]
    base = f[:]
    while n:
        if n & 1:
            result = pmul(F, result, base)
        n >>= 1
        if n:
            base = pmul(F, base, base)
    return result


def pqpow(F: FiniteField, f: list[int], dq: int, k: int = 1) -> list[int]:
    """f ** (p**dq)**k via the additive Frobenius: codes to the q-power, exponents stretched."""
    if not f or k == 0:
        return f[:]
    stretch = pow(F.char, dq * k)
    out = [0] * ((len(f) - 1) * stretch + 1)
    for i, c in enumerate(f):
        if c:
            out[i * stretch] = F.frobi(c, dq * k)
    return out


def peval(F: FiniteField, f: list[int], c: int) -> int:
    acc = 0
    for a in reversed(f):
        acc = F.addi(F.muli(acc, c), a)
    return acc


def pderiv(F: FiniteField, f: list[int]) -> list[int]:
    out = []
    for i in range(1, len(f)):
        scalar = i % F.char
        out.append(F.muli(scalar, f[i]) if scalar else 0)
    return ptrim(out)


def ptaylor(F: FiniteField, f: list[int], c: int, nterms: int) -> list[int]:
    """First nterms coefficients of f(c + u) as a polynomial in u (synthetic division)."""
    f = f[:]
    out = []
    for _ in range(nterms):
        if not f:
            out.append(0)
            continue
        quot = [0] * (len(f) - 1)
        acc = 0
        for i in range(len(f) - 1, 0, -1):
            acc = F.addi(F.muli(acc, c), f[i])
            quot[i - 1] = acc
        out.append(F.addi(F.muli(acc, c), f[0]))
        f = ptrim(quot)
    return out


def pord_at(F: FiniteField, f: list[int], c: int) -> int:
    """Multiplicity of the root t = c in f (f nonzero)."""
    if not f:
        raise ValueError("zero polynomial has no finite order")
    n = 0
    while True:
        acc = 0
        quot = [0] * (len(f) - 1)
        for i in range(len(f) - 1, 0, -1):
            acc = F.addi(F.muli(acc, c), f[i])
            quot[i - 1] = acc
        rem = F.addi(F.muli(acc, c), f[0])
        if rem != 0:
            return n
        n += 1
        f = ptrim(quot)
        if not f:
            return n


def pstr(F: FiniteField, f: list[int], var: str) -> str:
    if not f:
        return "0"
    parts = []
    for i, c in enumerate(f):
        if c == 0:
            continue
        cs = str(FieldElem(F, c).to_json()) if F.degree > 1 else str(c)
        if i == 0:
            parts.append(cs)
        else:
            head = "" if c == 1 else f"{cs}*"
            parts.append(f"{head}{var}" + (f"^{i}" if i > 1 else ""))
    return " + ".join(reversed(parts))


# ---------------------------------------------------------------------------
# the rational function field
# ---------------------------------------------------------------------------


class FuncField:
    """K(t) for a finite coefficient field K, with a designated twist q.

    When the coefficient field has order exactly q**2 the attribute ``zeta``
    holds its generator, the standard models' distinguished constant; the
    infinite-place machinery requires it.
    """

    def __init__(self, field: FiniteField, q: int, var: str = "t"):
        self.field = field
        self.q = q
        self.var = var
        d = 0
        qq = 1
        while qq < q:
            qq *= field.char
            d += 1
        if qq != q:
            raise ValueError(f"{q} is not a power of the characteristic {field.char}")
        self._dq = d
        self.zeta = field.gen if field.order == q * q else None

    def __repr__(self):
        return f"{self.field!r}({self.var})"

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash((FuncField, self.field, self.q, self.var))

    # ring protocol ---------------------------------------------------------

    def zero(self) -> "RatFunc":
        return RatFunc._raw(self, [], [1])

    def one(self) -> "RatFunc":
        return RatFunc._raw(self, [1], [1])

    def coerce(self, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            if x.ff is self:
                return x
            raise ValueError(f"element of {x.ff!r} passed to {self!r}")
        if isinstance(x, FieldElem):
            if x.field is self.field:
                return RatFunc._raw(self, [x.code] if x.code else [], [1])
            if is_subfield(x.field, self.field):
                c = embed(x, self.field)
                return RatFunc._raw(self, [c.code] if c.code else [], [1])
            raise ValueError(f"cannot coerce {x!r} into {self!r}")
        if isinstance(x, int):
            return self.coerce(self.field(x))
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def qpow(self, f: "RatFunc", k: int = 1) -> "RatFunc":
        if k == 0:
            return f
        num = pqpow(self.field, f.num, self._dq, k)
        den = pqpow(self.field, f.den, self._dq, k)
        return RatFunc._raw(self, num, den)

    def inv(self, f: "RatFunc") -> "RatFunc":
        return f.inverse()

    def is_unit(self, f) -> bool:
        return bool(f)

    # convenience -----------------------------------------------------------

    @property
    def t(self) -> "RatFunc":
        return RatFunc._raw(self, [0, 1], [1])

    def poly(self, coeffs) -> "RatFunc":
        codes = []
        for c in coeffs:
            if isinstance(c, FieldElem):
                if c.field is not self.field:
                    c = embed(c, self.field)
                codes.append(c.code)
            else:
                codes.append(self.field(c).code)
        return RatFunc(self, codes, [1])


class RatFunc:
    """A rational function in canonical form: monic denominator, coprime parts."""

    __slots__ = ("ff", "num", "den")

    def __init__(self, ff: FuncField, num: list[int], den: list[int]):
        F = ff.field
        num = ptrim(list(num))
        den = ptrim(list(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num:
            g = pgcd(F, num, den)
            if len(g) > 1:
                num, _ = pdivmod(F, num, g)
                den, _ = pdivmod(F, den, g)
        else:
            den = [1]
        if den[-1] != 1:
            inv = F.invi(den[-1])
            num = [F.muli(inv, c) for c in num]
            den = [F.muli(inv, c) for c in den]
        self.ff = ff
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, ff: FuncField, num: list[int], den: list[int]) -> "RatFunc":
        """Trusted constructor: parts already coprime; only monicizes."""
        obj = object.__new__(cls)
        num = ptrim(list(num))
        den = ptrim(list(den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            den = [1]
        elif den[-1] != 1:
            inv = ff.field.invi(den[-1])
            num = [ff.field.muli(inv, c) for c in num]
            den = [ff.field.muli(inv, c) for c in den]
        obj.ff = ff
        obj.num = num
        obj.den = den
        return obj

    # -- arithmetic ---------------------------------------------------------

    def _co(self, other):
        if isinstance(other, RatFunc):
            return other if other.ff is self.ff else None
        if isinstance(other, (FieldElem, int)):
            try:
                return self.ff.coerce(other)
            except (ValueError, TypeError):
                return None
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        F = self.ff.field
        num = padd(F, pmul(F, self.num, o.den), pmul(F, o.num, self.den))
        return RatFunc(self.ff, num, pmul(F, self.den, o.den))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        F = self.ff.field
        num = psub(F, pmul(F, self.num, o.den), pmul(F, o.num, self.den))
        return RatFunc(self.ff, num, pmul(F, self.den, o.den))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __neg__(self):
        return RatFunc._raw(self.ff, pneg(self.ff.field, self.num), self.den)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        F = self.ff.field
        n1, d1, n2, d2 = self.num, self.den, o.num, o.den
        if not n1 or not n2:
            return self.ff.zero()
        g1 = pgcd(F, n1, d2)
        if len(g1) > 1:
            n1, _ = pdivmod(F, n1, g1)
            d2, _ = pdivmod(F, d2, g1)
        g2 = pgcd(F, n2, d1)
        if len(g2) > 1:
            n2, _ = pdivmod(F, n2, g2)
            d1, _ = pdivmod(F, d1, g2)
        return RatFunc._raw(self.ff, pmul(F, n1, n2), pmul(F, d1, d2))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n == 0:
            return self.ff.one()
        base = self if n > 0 else self.inverse()
        n = abs(n)
        F = self.ff.field
        return RatFunc._raw(self.ff, ppow(F, base.num, n), ppow(F, base.den, n))

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc._raw(self.ff, self.den, self.num)

    def qpow(self, k: int = 1) -> "RatFunc":
        return self.ff.qpow(self, k)

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den)))

    def __bool__(self):
        return bool(self.num)

    # -- structure ----------------------------------------------------------

    def is_polynomial(self) -> bool:
        return self.den == [1]

    def derivative(self) -> "RatFunc":
        F = self.ff.field
        num = psub(
            F,
            pmul(F, pderiv(F, self.num), self.den),
            pmul(F, self.num, pderiv(F, self.den)),
        )
        return RatFunc(self.ff, num, pmul(F, self.den, self.den))

    def ord_at(self, c) -> int:
        """Order of vanishing at t = c (negative for a pole); c a coefficient-field element."""
        code = c.code if isinstance(c, FieldElem) else self.ff.field(c).code
        if not self.num:
            raise ValueError("zero function has no finite order")
        F = self.ff.field
        up = pord_at(F, self.num, code)
        if up:
            return up
        return -pord_at(F, self.den, code)

    def eval_at(self, c) -> FieldElem:
        code = c.code if isinstance(c, FieldElem) else self.ff.field(c).code
        F = self.ff.field
        d = peval(F, self.den, code)
        if d == 0:
            raise ZeroDivisionError(f"pole at {self.ff.var} = {c!r}")
        n = peval(F, self.num, code)
        return FieldElem(F, F.muli(n, F.invi(d)))

    def to_json(self):
        F = self.ff.field
        return {
            "num": [FieldElem(F, c).to_json() for c in self.num],
            "den": [FieldElem(F, c).to_json() for c in self.den],
        }

    def __repr__(self):
        F, v = self.ff.field, self.ff.var
        if self.den == [1]:
            return pstr(F, self.num, v)
        return f"({pstr(F, self.num, v)})/({pstr(F, self.den, v)})"


# ---------------------------------------------------------------------------
# Laurent series at the infinite place
# ---------------------------------------------------------------------------


class LaurentSeries:
    """A truncated Laurent series in the local coordinate u: sum of c_k u^k.

    ``coeffs[i]`` is the coefficient of u^(val + i); exponents >= trunc are
    unknown.  The zero series is coeffs = [] with val = trunc.
    """

    __slots__ = ("field", "val", "coeffs", "trunc")

    def __init__(self, field: FiniteField, val: int, coeffs: list[int], trunc: int):
        coeffs = list(coeffs)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            val += 1
        while len(coeffs) > trunc - val:
            coeffs.pop()
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            val = trunc
        self.field = field
        self.val = val
        self.coeffs = coeffs
        self.trunc = trunc

    def coeff(self, k: int) -> FieldElem:
        if k >= self.trunc:
            raise ValueError(f"coefficient of exponent {k} is beyond the truncation {self.trunc}")
        if k < self.val or k - self.val >= len(self.coeffs):
            return FieldElem(self.field, 0)
        return FieldElem(self.field, self.coeffs[k - self.val])

    def __bool__(self):
        return bool(self.coeffs)

    def __neg__(self):
        return LaurentSeries(self.field, self.val, [self.field.negi(c) for c in self.coeffs], self.trunc)

    def _binop(self, other, op):
        F = self.field
        trunc = min(self.trunc, other.trunc)
        val = min(self.val, other.val, trunc)
        out = [0] * (trunc - val)
        for i, c in enumerate(self.coeffs):
            k = self.val + i
            if k < trunc:
                out[k - val] = c
        for i, c in enumerate(other.coeffs):
            k = other.val + i
            if k < trunc:
                out[k - val] = op(out[k - val], c)
        return LaurentSeries(F, val, out, trunc)

    def __add__(self, other):
        return self._binop(other, self.field.addi)

    def __sub__(self, other):
        return self._binop(other, self.field.subi)

    def __mul__(self, other):
        F = self.field
        if not self.coeffs or not other.coeffs:
            return LaurentSeries(F, 0, [], min(self.trunc + other.val, other.trunc + self.val))
        trunc = min(self.trunc + other.val, other.trunc + self.val)
        val = self.val + other.val
        out = [0] * max(0, trunc - val)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b and i + j < len(out):
                        out[i + j] = F.addi(out[i + j], F.muli(a, b))
        return LaurentSeries(F, val, out, trunc)

    def first_difference(self, other) -> int | None:
        """Smallest exponent where the two series visibly differ, or None."""
        trunc = min(self.trunc, other.trunc)
        lo = min(self.val, other.val)
        for k in range(lo, trunc):
            if self.coeff(k) != other.coeff(k):
                return k
        return None

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.field is other.field
            and self.val == other.val
            and self.coeffs == other.coeffs
            and self.trunc == other.trunc
        )

    def __hash__(self):
        return hash((self.val, tuple(self.coeffs), self.trunc))

    def to_json(self):
        F = self.field
        return {
            "val": self.val,
            "coeffs": [FieldElem(F, c).to_json() for c in self.coeffs],
            "trunc": self.trunc,
        }

    def __repr__(self):
        if not self.coeffs:
            return f"O(u^{self.trunc})"
        parts = []
        for i, c in enumerate(self.coeffs[:8]):
            if c:
                parts.append(f"{FieldElem(self.field, c).to_json()}*u^{self.val + i}")
        tail = " + ..." if len(self.coeffs) > 8 else ""
        return " + ".join(parts) + tail + f" + O(u^{self.trunc})"


def _series_inv(F: FiniteField, a: list[int], n: int) -> list[int]:
    """First n coefficients of 1/(a0 + a1 u + ...), a0 != 0."""
    inv0 = F.invi(a[0])
    out = [inv0] + [0] * (n - 1)
    for k in range(1, n):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = F.addi(acc, F.muli(a[j], out[k - j]))
        out[k] = F.negi(F.muli(inv0, acc))
    return out


def expand_at_infinity(f: RatFunc, N: int) -> LaurentSeries:
    """Laurent expansion of f at the infinite place, in u = the reciprocal of
    the standard uniformizer, i.e. the substitution t = zeta^q + u.

    Coefficients of u^k are produced for all k < N.
    """
    ff = f.ff
    if ff.zeta is None:
        raise ValueError("expansion needs a coefficient field of order q^2 (no designated zeta)")
    F = ff.field
    zq = F.frobi(ff.zeta.code, ff._dq)
    if not f.num:
        return LaurentSeries(F, 0, [], N)
    vn = pord_at(F, f.num, zq)
    vd = pord_at(F, f.den, zq)
    val = vn - vd
    nterms = N - val
    if nterms <= 0:
        return LaurentSeries(F, 0, [], N)
    num_t = ptaylor(F, f.num, zq, nterms + vn)[vn:]
    den_t = ptaylor(F, f.den, zq, nterms + vd)[vd:]
    inv_d = _series_inv(F, den_t, nterms)
    out = [0] * nterms
    for i, a in enumerate(num_t):
        if a:
            for j in range(0, nterms - i):
                b = inv_d[j]
                if b:
                    out[i + j] = F.addi(out[i + j], F.muli(a, b))
    return LaurentSeries(F, val, out, N)


def local_expansion(f: RatFunc, c, lo: int, hi: int) -> list[FieldElem]:
    """Coefficients of (t - c)^k for k in [lo, hi) in the local expansion at t = c."""
    ff = f.ff
    F = ff.field
    code = c.code if isinstance(c, FieldElem) else F(c).code
    if not f.num:
        return [FieldElem(F, 0)] * (hi - lo)
    vn = pord_at(F, f.num, code)
    vd = pord_at(F, f.den, code)
    val = vn - vd
    if hi <= val:
        return [FieldElem(F, 0)] * (hi - lo)
    nterms = hi - val
    num_t = ptaylor(F, f.num, code, nterms + vn)[vn:]
    den_t = ptaylor(F, f.den, code, nterms + vd)[vd:]
    inv_d = _series_inv(F, den_t, nterms)
    series = [0] * nterms
    for i, a in enumerate(num_t):
        if a:
            for j in range(0, nterms - i):
                b = inv_d[j]
                if b:
                    series[i + j] = F.addi(series[i + j], F.muli(a, b))
    out = []
    for k in range(lo, hi):
        i = k - val
        out.append(FieldElem(F, series[i]) if 0 <= i < nterms else FieldElem(F, 0))
    return out


def residue_at_zeta(f: RatFunc) -> FieldElem:
    """Residue of f dt at t = zeta, for f with at worst a simple pole there.

    Simple-pole evaluation: numerator(zeta) / denominator'(zeta).  A pole of
    order two or more raises ValueError (callers wanting general orders use
    local_expansion).
    """
    ff = f.ff
    if ff.zeta is None:
        raise ValueError("residue needs a coefficient field of order q^2 (no designated zeta)")
    F = ff.field
    z = ff.zeta.code
    if not f.num:
        return FieldElem(F, 0)
    m = pord_at(F, f.den, z)
    if m == 0:
        return FieldElem(F, 0)
    if m > 1:
        raise ValueError(f"pole of order {m} at t = zeta; only simple poles are supported here")
    n = peval(F, f.num, z)
    dp = peval(F, pderiv(F, f.den), z)
    return FieldElem(F, F.muli(n, F.invi(dp)))


def std_elements(ff: FuncField) -> dict[str, RatFunc]:
    """The standard rational functions of the truncated-line coordinate ring.

    Keys: t, pi (the defining quadratic (t - zeta)(t - zeta^q)), T and Tsigma
    (the reciprocals of t - zeta^q and t - zeta), and the coordinate-ring
    generators x = 1/pi, y = t/pi.
    """
    if ff.zeta is None:
        raise ValueError("std_elements needs a coefficient field of order q^2")
    F = ff.field
    z = ff.zeta.code
    zq = F.frobi(z, ff._dq)
    t = ff.t
    pi_poly = pmul(F, [F.negi(z), 1], [F.negi(zq), 1])
    pi = RatFunc._raw(ff, pi_poly, [1])
    T = RatFunc._raw(ff, [1], [F.negi(zq), 1])
    Ts = RatFunc._raw(ff, [1], [F.negi(z), 1])
    x = RatFunc._raw(ff, [1], pi_poly)
    y = RatFunc._raw(ff, [0, 1], pi_poly)
    return {"t": t, "pi": pi, "T": T, "Tsigma": Ts, "x": x, "y": y}


# ---------------------------------------------------------------------------
# generic dense polynomials over any coefficient ring in the shared protocol
# (used for radical-field inversion; degrees here are tiny)
# ---------------------------------------------------------------------------


def _gp_trim(f: list) -> list:
    while f and not f[-1]:
        f.pop()
    return f


def _gp_divmod(ring, f: list, g: list) -> tuple[list, list]:
    f = f[:]
    dg = len(g) - 1
    inv_lead = ring.inv(g[-1])
    quot = [ring.zero() for _ in range(max(0, len(f) - dg))]
    while len(f) > dg:
        c = f[-1]
        if c:
            c = c * inv_lead
            off = len(f) - 1 - dg
            quot[off] = c
            for i, a in enumerate(g):
                f[off + i] = f[off + i] - c * a
        f.pop()
    return _gp_trim(quot), _gp_trim(f)


def _gp_xgcd(ring, f: list, g: list) -> tuple[list, list, list]:
    """(d, a, b) with a f + b g = d, all over the fraction-field-like ring."""
    r0, r1 = f[:], g[:]
    s0, s1 = [ring.one()], []
    t0, t1 = [], [ring.one()]
    while r1:
        q, r = _gp_divmod(ring, r0, r1)
        r0, r1 = r1, r

        def _mulsub(a: list, q: list, b: list) -> list:
            prod = [ring.zero()] * (len(q) + len(b) - 1) if q and b else []
            for i, qa in enumerate(q):
                if qa:
                    for j, bb in enumerate(b):
                        if bb:
                            prod[i + j] = prod[i + j] + qa * bb
            out = list(a) + [ring.zero()] * max(0, len(prod) - len(a))
            for i, c in enumerate(prod):
                out[i] = out[i] - c
            return _gp_trim(out)

        s0, s1 = s1, _mulsub(s0, q, s1)
        t0, t1 = t1, _mulsub(t0, q, t1)
    return r0, s0, t0


# ---------------------------------------------------------------------------
# radical extensions with a designated root
# ---------------------------------------------------------------------------


class RadicalExtensionError(ValueError):
    """X^n - c is reducible (or undecidable) over the requested base."""

    def __init__(self, message: str, witness: int | None = None):
        super().__init__(message)
        self.witness = witness


class RadicalElem:
    """Element of a radical extension: a sparse vector over the base ring,
    indexed by powers 0..n-1 of the designated root."""

    __slots__ = ("ring", "parts")

    def __init__(self, ring: "RadicalField", parts: dict):
        self.ring = ring
        self.parts = {i: v for i, v in parts.items() if v}

    def _co(self, other):
        if isinstance(other, RadicalElem):
            return other if other.ring is self.ring else None
        try:
            return self.ring.coerce(other)
        except (ValueError, TypeError):
            return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        out = dict(self.parts)
        for i, v in o.parts.items():
            cur = out.get(i)
            out[i] = v if cur is None else cur + v
        return RadicalElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RadicalElem(self.ring, {i: -v for i, v in self.parts.items()})

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
        ring = self.ring
        n, c = ring.n, ring.radicand
        out: dict = {}
        for i, a in self.parts.items():
            for j, b in o.parts.items():
                k = i + j
                v = a * b
                if k >= n:
                    k -= n
                    v = v * c
                cur = out.get(k)
                out[k] = v if cur is None else cur + v
        return RadicalElem(ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, m: int):
        if m == 0:
            return self.ring.one()
        base = self if m > 0 else self.inverse()
        m = abs(m)
        result = self.ring.one()
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def inverse(self) -> "RadicalElem":
        return self.ring.inv(self)

    def qpow(self, k: int = 1) -> "RadicalElem":
        return self.ring.qpow(self, k)

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.parts == o.parts

    def __hash__(self):
        return hash(tuple(sorted((i, v) for i, v in self.parts.items())))

    def __bool__(self):
        return bool(self.parts)

    def monomial_part(self) -> tuple[int, object] | None:
        """(exponent, coefficient) when the element is a single root-power; else None."""
        if len(self.parts) != 1:
            return None
        [(i, v)] = self.parts.items()
        return i, v

    def to_json(self):
        n = self.ring.n
        zero = self.ring.base.zero()
        return {"coeffs": [_elem_json(self.parts.get(i, zero)) for i in range(n)]}

    def __repr__(self):
        if not self.parts:
            return "0"
        name = self.ring.root_name
        bits = []
        for i in sorted(self.parts):
            head = f"({self.parts[i]!r})"
            bits.append(head if i == 0 else f"{head}*{name}" + (f"^{i}" if i > 1 else ""))
        return " + ".join(bits)


def _elem_json(v):
    return v.to_json() if hasattr(v, "to_json") else v


class RadicalField:
    """Base field with a designated n-th root of c adjoined (X^n - c irreducible).

    The designated root is the class of X; the twist acts by sending the root
    to its q-th power (reduced via root^n = c).  Construction is guarded by
    the irreducibility criterion: for every prime r dividing n the radicand
    must escape r-th powers, and when 4 divides n it must also escape
    -4 * (fourth powers); violations raise RadicalExtensionError carrying
    the witnessing exponent.
    """

    def __init__(self, base, n: int, c, root_name: str = "r", _checked: bool = False):
        if n < 1:
            raise ValueError("root index must be >= 1")
        c = base.coerce(c)
        if not base.is_unit(c):
            raise ValueError("radicand must be a unit")
        if not _checked:
            witness = _capelli_witness(base, n, c)
            if witness is not None:
                raise RadicalExtensionError(
                    f"X^{n} - ({c!r}) is reducible over {base!r}: "
                    f"the radicand is caught by the exponent-{witness[0]} condition "
                    f"(root {witness[1]!r})",
                    witness=witness[0],
                )
        self.base = base
        self.n = n
        self.radicand = c
        self.root_name = root_name
        self.q = base.q

    def __repr__(self):
        return f"{self.base!r}[{self.root_name}; {self.root_name}^{self.n} = {self.radicand!r}]"

    # ring protocol ---------------------------------------------------------

    def zero(self) -> RadicalElem:
        return RadicalElem(self, {})

    def one(self) -> RadicalElem:
        return RadicalElem(self, {0: self.base.one()})

    @property
    def root(self) -> RadicalElem:
        if self.n == 1:
            return RadicalElem(self, {0: self.radicand})
        return RadicalElem(self, {1: self.base.one()})

    def coerce(self, x) -> RadicalElem:
        if isinstance(x, RadicalElem):
            if x.ring is self:
                return x
            raise ValueError(f"element of {x.ring!r} passed to {self!r}")
        v = self.base.coerce(x)
        return RadicalElem(self, {0: v})

    def qpow(self, a: RadicalElem, k: int = 1) -> RadicalElem:
        for _ in range(k):
            out: dict = {}
            for i, v in a.parts.items():
                iq = i * self.q
                j, r = divmod(iq, self.n)
                w = self.base.qpow(v)
                if j:
                    w = w * (self.radicand ** j)
                cur = out.get(r)
                out[r] = w if cur is None else cur + w
            a = RadicalElem(self, out)
        return a

    def inv(self, a: RadicalElem) -> RadicalElem:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        mono = a.monomial_part()
        if mono is not None:
            i, v = mono
            vi = self.base.inv(v) if not isinstance(v, RadicalElem) else v.inverse()
            if i == 0:
                return RadicalElem(self, {0: vi})
            # root^-i = root^(n-i) / c
            return RadicalElem(self, {self.n - i: vi * self.base.inv(self.radicand)})
        # general case: extended Euclid against X^n - c over the base
        f = [a.parts.get(i, self.base.zero()) for i in range(max(a.parts) + 1)]
        modulus = [-self.radicand] + [self.base.zero()] * (self.n - 1) + [self.base.one()]
        d, s, _ = _gp_xgcd(self.base, f, modulus)
        if len(d) != 1:
            raise ZeroDivisionError("element is not invertible (reducible modulus?)")
        dinv = self.base.inv(d[0])
        return RadicalElem(self, {i: v * dinv for i, v in enumerate(s)})

    def is_unit(self, a) -> bool:
        return bool(a)

    def to_json(self):
        return {
            "kind": "radical",
            "n": self.n,
            "radicand": _elem_json(self.radicand),
            "root": self.root_name,
            "base": self.base.to_json() if hasattr(self.base, "to_json") else repr(self.base),
        }


def _rth_power_root(base, z, r: int):
    """A root of X^r = z over the base ring, or None.  Complete over K(t);
    complete for single-power-of-the-root elements over radical extensions
    (which is the only shape nested constructions produce); raises for
    shapes it cannot decide."""
    if r == 1:
        return z
    if isinstance(base, FuncField):
        return _ratfunc_rth_root(base, z, r)
    if isinstance(base, RadicalField):
        mono = base.coerce(z).monomial_part()
        if mono is None:
            raise RadicalExtensionError(
                f"cannot decide whether {z!r} is an {r}-th power over {base!r}"
            )
        j, a = mono
        n, c = base.n, base.radicand
        for k in range(n):
            if (k * r - j) % n == 0:
                shift = (k * r - j) // n
                cand = a * (c ** (-shift)) if shift else a
                b = _rth_power_root(base.base, cand, r)
                if b is not None:
                    return RadicalElem(base, {k: b})
        return None
    raise RadicalExtensionError(f"cannot decide {r}-th powers over {base!r}")


def _poly_rth_root(F: FiniteField, f: list[int], r: int) -> list[int] | None:
    """Monic r-th root of a monic polynomial, or None."""
    if f == [1]:
        return [1]
    p = F.char
    # strip the p-part of r via coefficientwise p-th roots
    while r % p == 0:
        if (len(f) - 1) % p != 0:
            return None
        root = [0] * ((len(f) - 1) // p + 1)
        for i, c in enumerate(f):
            if c:
                if i % p != 0:
                    return None
                root[i // p] = F.frobi(c, F.degree - 1)  # c^(1/p)
        f = root
        r //= p
    if r == 1:
        return f
    d = len(f) - 1
    if d % r != 0:
        return None
    m = d // r
    g = [0] * m + [1]
    for k in range(1, m + 1):
        gr = ppow(F, g, r)
        idx = d - k
        have = gr[idx] if idx < len(gr) else 0
        want = f[idx] if idx < len(f) else 0
        delta = F.subi(want, have)
        # coefficient of t^(d-k) in (g + s t^(m-k))^r differs from g^r by r*s at first order
        s = F.muli(delta, F.invi(r % p))
        g[m - k] = F.addi(g[m - k], s)
    return g if ppow(F, g, r) == ptrim(f[:]) else None


def _ratfunc_rth_root(ff: FuncField, z: RatFunc, r: int) -> RatFunc | None:
    F = ff.field
    if not z.num:
        return ff.zero()
    lc = z.num[-1]
    num_monic = [F.muli(F.invi(lc), c) for c in z.num]
    rn = _poly_rth_root(F, num_monic, r)
    if rn is None:
        return None
    rd = _poly_rth_root(F, list(z.den), r)
    if rd is None:
        return None
    units = nth_roots(FieldElem(F, lc), r)
    if not units or not units[0]:
        return None
    u = units[0]
    return RatFunc._raw(ff, pscale(F, u.code, rn), rd)


def _capelli_witness(base, n: int, c):
    """None when X^n - c is irreducible; else (witnessing exponent, a root)."""
    seen = set()
    for r in _prime_factors_small(n):
        if r in seen:
            continue
        seen.add(r)
        root = _rth_power_root(base, c, r)
        if root is not None:
            return (r, root)
    if n % 4 == 0:
        # c = -4 d^4 would split X^n - c; equivalently -c/4 is a fourth power
        char = _ring_char(base)
        if char != 2:
            quarter = base.coerce(-1) * base.inv(base.coerce(4 % char if 4 % char else 1))
            target = c * quarter
            root = _rth_power_root(base, target, 4)
            if root is not None:
                return (4, root)
    return None


def _prime_factors_small(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _ring_char(base) -> int:
    while isinstance(base, (RadicalField,)):
        base = base.base
    if isinstance(base, FuncField):
        return base.field.char
    raise TypeError(f"cannot find characteristic of {base!r}")


def radical_extend(base, n: int, c, root_name: str = "r") -> RadicalField:
    """Adjoin a designated n-th root of c to the base ring.

    Fails (RadicalExtensionError, carrying the witnessing exponent) when
    X^n - c is reducible.  n = 1 is allowed and simply wraps the base with
    the "root" c itself, so towers can be built uniformly.
    """
    return RadicalField(base, n, c, root_name=root_name)


# ---------------------------------------------------------------------------
# symbolic Laurent coefficients: one unknown unit, twist = variable^q
# ---------------------------------------------------------------------------


class SymbolicElem:
    """Laurent polynomial in the ring's symbol, coefficients in the base ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: "SymbolicRing", terms: dict):
        self.ring = ring
        self.terms = {k: v for k, v in terms.items() if v}

    def _co(self, other):
        if isinstance(other, SymbolicElem):
            return other if other.ring is self.ring else None
        try:
            return self.ring.coerce(other)
        except (ValueError, TypeError):
            return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, v in o.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return SymbolicElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicElem(self.ring, {k: -v for k, v in self.terms.items()})

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
        out: dict = {}
        for i, a in self.terms.items():
            for j, b in o.terms.items():
                k = i + j
                v = a * b
                cur = out.get(k)
                out[k] = v if cur is None else cur + v
        return SymbolicElem(self.ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * self.ring.inv(o)

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.ring.inv(self)

    def __pow__(self, m: int):
        if m == 0:
            return self.ring.one()
        base = self if m > 0 else self.ring.inv(self)
        m = abs(m)
        result = self.ring.one()
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def inverse(self) -> "SymbolicElem":
        return self.ring.inv(self)

    def qpow(self, k: int = 1) -> "SymbolicElem":
        return self.ring.qpow(self, k)

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(tuple(sorted((k, v) for k, v in self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def substitute(self, value):
        """Evaluate at symbol = value (an element of the base ring)."""
        v = self.ring.base.coerce(value)
        acc = self.ring.base.zero()
        for k, coef in self.terms.items():
            acc = acc + coef * (v ** k)
        return acc

    def to_json(self):
        return {
            "symbol": self.ring.symbol,
            "terms": [[k, _elem_json(v)] for k, v in sorted(self.terms.items())],
        }

    def __repr__(self):
        if not self.terms:
            return "0"
        s = self.ring.symbol
        bits = []
        for k in sorted(self.terms):
            head = f"({self.terms[k]!r})"
            bits.append(head if k == 0 else f"{head}*{s}^{k}")
        return " + ".join(bits)


class SymbolicRing:
    """Laurent polynomials in one symbol over a base coefficient ring.

    The symbol stands for an unknown unit, so single-term elements are
    invertible; the twist sends sum a_k s^k to sum qpow(a_k) s^(k q).
    """

    def __init__(self, base, symbol: str = "J"):
        self.base = base
        self.symbol = symbol
        self.q = base.q

    def __repr__(self):
        return f"{self.base!r}[{self.symbol}^±1]"

    def zero(self) -> SymbolicElem:
        return SymbolicElem(self, {})

    def one(self) -> SymbolicElem:
        return SymbolicElem(self, {0: self.base.one()})

    @property
    def var(self) -> SymbolicElem:
        return SymbolicElem(self, {1: self.base.one()})

    def coerce(self, x) -> SymbolicElem:
        if isinstance(x, SymbolicElem):
            if x.ring is self:
                return x
            raise ValueError(f"element of {x.ring!r} passed to {self!r}")
        v = self.base.coerce(x)
        return SymbolicElem(self, {0: v})

    def qpow(self, a: SymbolicElem, k: int = 1) -> SymbolicElem:
        if k == 0:
            return a
        qk = self.q ** k
        return SymbolicElem(self, {e * qk: self.base.qpow(v, k) for e, v in a.terms.items()})

    def inv(self, a: SymbolicElem) -> SymbolicElem:
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if len(a.terms) != 1:
            raise ZeroDivisionError(
                "only single-term symbolic elements are invertible (the symbol is a unit, sums are not)"
            )
        [(k, v)] = a.terms.items()
        return SymbolicElem(self, {-k: self.base.inv(v)})

    def is_unit(self, a) -> bool:
        try:
            a = self.coerce(a)
        except (ValueError, TypeError):
            return False
        return len(a.terms) == 1 and self.base.is_unit(next(iter(a.terms.values())))

    def to_json(self):
        return {
            "kind": "symbolic",
            "symbol": self.symbol,
            "base": self.base.to_json() if hasattr(self.base, "to_json") else repr(self.base),
        }

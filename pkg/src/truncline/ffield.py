"""Finite fields with deterministic construction and element enumeration.

Fields come from :func:`make_field` and are cached, so two requests for the
same ``(p, e)`` return the identical descriptor object.  The defining modulus
is chosen deterministically: scanning monic degree-``e`` polynomials over
``F_p`` in ascending order of their little-endian coefficient vector read as
a base-``p`` integer, the constructor takes the first irreducible polynomial
whose root generates the multiplicative group (a primitive polynomial always
exists), falling back to the first plain irreducible if the scan somehow
exhausts.  The reported generator is therefore always the residue class of X.

Elements are immutable wrappers around an integer code; the base-``p``
digits of the code, least significant first, are the coefficients of the
residue polynomial.  Small fields (order <= 2**16) precompute exp/log tables
for multiplication; addition is XOR in characteristic 2 and a digit loop (or
a full table for tiny fields) otherwise.

Roots, traces and embeddings are exhaustive-search based: the fields here are
desk scale, and an O(|F|) scan is both trivially fast and easy to trust.
Wherever a choice among conjugate roots must be made, the designated root is
the first in coefficient-vector lexicographic order.
"""

from __future__ import annotations

import itertools

_TABLE_BOUND = 1 << 16
_ADD_TABLE_BOUND = 512
_DEFAULT_MAX_SIZE = 1 << 20

_FIELD_CACHE: dict[tuple[int, int], "FiniteField"] = {}
_EMBED_CACHE: dict[tuple[tuple[int, int], tuple[int, int]], list[int]] = {}
_UNEMBED_CACHE: dict[tuple[tuple[int, int], tuple[int, int]], tuple] = {}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in itertools.chain([2], range(3, n, 2)):
        if d * d > n:
            return True
        if n % d == 0:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over the prime field, used only during field construction
# ---------------------------------------------------------------------------

def _pp_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pp_mulmod(p: int, f: list[int], g: list[int], m: list[int]) -> list[int]:
    prod = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    prod[i + j] = (prod[i + j] + a * b) % p
    return _pp_rem(p, prod, m)


def _pp_rem(p: int, f: list[int], m: list[int]) -> list[int]:
    f = f[:]
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(f) > dm:
        c = f[-1] % p
        if c:
            c = c * inv_lead % p
            off = len(f) - 1 - dm
            for i, a in enumerate(m):
                f[off + i] = (f[off + i] - c * a) % p
        f.pop()
    return _pp_trim(f)


def _pp_powmod(p: int, f: list[int], n: int, m: list[int]) -> list[int]:
    result = [1]
    base = _pp_rem(p, f, m)
    while n:
        if n & 1:
            result = _pp_mulmod(p, result, base, m)
        base = _pp_mulmod(p, base, base, m)
        n >>= 1
    return result


def _pp_gcd(p: int, f: list[int], g: list[int]) -> list[int]:
    f, g = f[:], g[:]
    while g:
        f = _pp_rem(p, f, g) if len(f) >= len(g) else f
        f, g = g, f
        if g and len(g) > len(f):
            f, g = g, f
    return f


def _is_irreducible(p: int, m: list[int]) -> bool:
    e = len(m) - 1
    if e <= 0:
        return False
    if e == 1:
        return True
    x = [0, 1]
    xq = _pp_powmod(p, x, p**e, m)
    diff = _pp_trim([(a - b) % p for a, b in itertools.zip_longest(xq, x, fillvalue=0)])
    if diff:
        return False
    for r in _prime_factors(e):
        xr = _pp_powmod(p, x, p ** (e // r), m)
        diff = _pp_trim([(a - b) % p for a, b in itertools.zip_longest(xr, x, fillvalue=0)])
        g = _pp_gcd(p, m, diff)
        if len(g) != 1:
            return False
    return True


def _root_is_primitive(p: int, m: list[int]) -> bool:
    e = len(m) - 1
    order = p**e - 1
    x = [0, 1] if e > 1 else [(-m[0]) % p]
    if not _pp_trim(x[:]):
        return False  # the root is zero, not a unit
    if order == 1:
        return True
    for r in _prime_factors(order):
        f = _pp_powmod(p, x, order // r, m) if e > 1 else [pow(x[0], order // r, p)]
        if f == [1]:
            return False
    return True


class FieldElem:
    """Element of a :class:`FiniteField`; wraps an integer code."""

    __slots__ = ("field", "code")

    def __init__(self, field: "FiniteField", code: int):
        self.field = field
        self.code = code

    def coeffs(self) -> tuple[int, ...]:
        """Little-endian F_p coefficient vector (always length e)."""
        p, e, c = self.field.char, self.field.degree, self.code
        out = []
        for _ in range(e):
            c, r = divmod(c, p)
            out.append(r)
        return tuple(out)

    def to_json(self) -> list[int]:
        return list(self.coeffs())

    def _co(self, other):
        if isinstance(other, FieldElem):
            if other.field is self.field:
                return other
            return None
        if isinstance(other, int):
            return FieldElem(self.field, other % self.field.char)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.addi(self.code, o.code))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.subi(self.code, o.code))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.subi(o.code, self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field.negi(self.code))

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.muli(self.code, o.code))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.muli(self.code, self.field.invi(o.code)))

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.field, self.field.muli(o.code, self.field.invi(self.code)))

    def __pow__(self, n: int):
        return FieldElem(self.field, self.field.powi(self.code, n))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field is other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.char
        return NotImplemented

    def __hash__(self):
        return hash((self.field.char, self.field.degree, self.code))

    def __bool__(self):
        return self.code != 0

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.invi(self.code))

    def __repr__(self):
        return f"{self.field!r}({list(self.coeffs())})"


class FiniteField:
    """Descriptor for GF(p^e): modulus, tables, and integer-code arithmetic."""

    def __init__(self, p: int, e: int):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        self.char = p
        self.degree = e
        self.order = p**e
        self.modulus = self._pick_modulus()
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._add_table: list[int] | None = None
        self._xpow_rows: list[list[int]] | None = None
        if self.order <= _TABLE_BOUND:
            self._build_tables()
        if p != 2 and self.order <= _ADD_TABLE_BOUND:
            n = self.order
            self._add_table = [self._add_slow(a, b) for a in range(n) for b in range(n)]

    # -- construction -------------------------------------------------------

    def _pick_modulus(self) -> list[int]:
        p, e = self.char, self.degree
        fallback = None
        for n in range(p**e):
            m = self._digits(n) + [1]
            if not _is_irreducible(p, m):
                continue
            if fallback is None:
                fallback = m
            if _root_is_primitive(p, m):
                return m
        if fallback is None:  # pragma: no cover - cannot happen
            raise RuntimeError("no irreducible polynomial found")
        return fallback  # pragma: no cover - primitive always exists

    def _digits(self, code: int) -> list[int]:
        p, e = self.char, self.degree
        out = []
        for _ in range(e):
            code, r = divmod(code, p)
            out.append(r)
        return out

    def _undigits(self, digits: list[int]) -> int:
        code = 0
        for d in reversed(digits):
            code = code * self.char + (d % self.char)
        return code

    def _build_tables(self):
        n = self.order
        exp = [0] * (n - 1)
        log = [0] * n
        g = self.gen_code
        acc = 1
        for i in range(n - 1):
            exp[i] = acc
            log[acc] = i
            acc = self._mul_slow(acc, g)
        if acc != 1:  # pragma: no cover - generator is primitive by construction
            raise RuntimeError("generator does not have full order")
        self._exp, self._log = exp, log

    @property
    def gen_code(self) -> int:
        if self.degree == 1:
            return (-self.modulus[0]) % self.char
        return self.char  # code of X

    # -- integer-code arithmetic -------------------------------------------

    def addi(self, a: int, b: int) -> int:
        if self.char == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a * self.order + b]
        return self._add_slow(a, b)

    def _add_slow(self, a: int, b: int) -> int:
        p = self.char
        out = 0
        mult = 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * mult
            mult *= p
        return out

    def negi(self, a: int) -> int:
        if self.char == 2:
            return a
        p = self.char
        out = 0
        mult = 1
        while a:
            a, r = divmod(a, p)
            out += ((-r) % p) * mult
            mult *= p
        return out

    def subi(self, a: int, b: int) -> int:
        if self.char == 2:
            return a ^ b
        return self.addi(a, self.negi(b))

    def muli(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._mul_slow(a, b)

    def _mul_slow(self, a: int, b: int) -> int:
        p, e = self.char, self.degree
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * e - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    if cb:
                        prod[i + j] = (prod[i + j] + ca * cb) % p
        if self._xpow_rows is None:
            rows = []
            cur = [(-c) % p for c in self.modulus[:-1]]  # X^e reduced
            rows.append(cur[:])
            for _ in range(e - 2):
                nxt = [0] + cur[:-1]
                top = cur[-1]
                if top:
                    for k in range(e):
                        nxt[k] = (nxt[k] - top * self.modulus[k]) % p
                cur = nxt
                rows.append(cur[:])
            self._xpow_rows = rows
        out = prod[:e]
        for i in range(e, 2 * e - 1):
            c = prod[i]
            if c:
                row = self._xpow_rows[i - e]
                for k in range(e):
                    out[k] = (out[k] + c * row[k]) % p
        return self._undigits(out)

    def invi(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        if self._exp is not None:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self.powi(a, self.order - 2)

    def powi(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("inverse of zero field element")
            return 0
        n %= self.order - 1
        if n == 0:
            return 1
        if self._exp is not None:
            return self._exp[(self._log[a] * n) % (self.order - 1)]
        result = 1
        base = a
        while n:
            if n & 1:
                result = self.muli(result, base)
            base = self.muli(base, base)
            n >>= 1
        return result

    def frobi(self, a: int, k: int = 1) -> int:
        """a ** (p**k), with k reduced modulo the extension degree."""
        k %= self.degree
        if k == 0 or a == 0 or a == 1:
            return a
        return self.powi(a, pow(self.char, k))

    # -- public element layer ------------------------------------------------

    def __call__(self, v) -> FieldElem:
        if isinstance(v, FieldElem):
            if v.field is self:
                return v
            raise ValueError(f"element of {v.field!r} passed to {self!r}; use embed()")
        if isinstance(v, int):
            return FieldElem(self, v % self.char)
        coeffs = list(v)
        if len(coeffs) > self.degree:
            raise ValueError("coefficient vector longer than extension degree")
        return FieldElem(self, self._undigits([c % self.char for c in coeffs]))

    def from_code(self, code: int) -> FieldElem:
        if not 0 <= code < self.order:
            raise ValueError("code out of range")
        return FieldElem(self, code)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def gen(self) -> FieldElem:
        return FieldElem(self, self.gen_code)

    def elements(self):
        """All field elements, in ascending code order."""
        for c in range(self.order):
            yield FieldElem(self, c)

    def __repr__(self):
        return f"GF({self.order})"

    def __hash__(self):
        return hash((FiniteField, self.char, self.degree))

    def __eq__(self, other):
        return self is other

    def to_json(self):
        return {"p": self.char, "e": self.degree, "modulus": list(self.modulus)}


def make_field(p: int, e: int, max_size: int = _DEFAULT_MAX_SIZE) -> FiniteField:
    """The finite field GF(p^e) with the deterministic primitive modulus."""
    key = (p, e)
    cached = _FIELD_CACHE.get(key)
    if cached is not None:
        return cached
    if p**e > max_size:
        raise ValueError(f"field order {p}^{e} exceeds the size bound {max_size}")
    field = FiniteField(p, e)
    _FIELD_CACHE[key] = field
    return field


def is_subfield(sub: FiniteField, sup: FiniteField) -> bool:
    return sub.char == sup.char and sup.degree % sub.degree == 0


def _embed_powers(sub: FiniteField, sup: FiniteField) -> list[int]:
    """Codes of img^0 .. img^(e_sub - 1) where img is the designated image of sub.gen."""
    key = ((sub.char, sub.degree), (sup.char, sup.degree))
    cached = _EMBED_CACHE.get(key)
    if cached is not None:
        return cached
    if not is_subfield(sub, sup):
        raise ValueError(f"{sub!r} is not a subfield of {sup!r}")
    if sub is sup:
        powers = [sup.powi(sup.gen_code, i) for i in range(sub.degree)]
        _EMBED_CACHE[key] = powers
        return powers
    step = (sup.order - 1) // (sub.order - 1)
    gstep = sup.powi(sup.gen_code, step)
    roots = []
    cand = 1
    for _ in range(sub.order - 1):
        acc = 0  # evaluate sub.modulus at cand, Horner
        for c in reversed(sub.modulus):
            acc = sup.addi(sup.muli(acc, cand), c % sup.char)
        if acc == 0:
            roots.append(cand)
        cand = sup.muli(cand, gstep)
    if not roots:  # pragma: no cover - subfield always contains the roots
        raise RuntimeError("no root of subfield modulus found")
    img = min(roots, key=lambda c: FieldElem(sup, c).coeffs())
    powers = [sup.powi(img, i) for i in range(sub.degree)]
    _EMBED_CACHE[key] = powers
    return powers


def embed(a: FieldElem, target: FiniteField) -> FieldElem:
    """Image of ``a`` under the designated embedding of its field into ``target``.

    The embedding sends the source generator to the coefficient-lex smallest
    root of the source modulus inside ``target``, so repeated calls agree.
    """
    if a.field is target:
        return a
    powers = _embed_powers(a.field, target)
    code = 0
    for digit, pw in zip(a.coeffs(), powers):
        if digit:
            code = target.addi(code, target.muli(digit, pw))
    return FieldElem(target, code)


def unembed(a: FieldElem, sub: FiniteField) -> FieldElem:
    """Preimage of ``a`` under embed(sub -> field of a); raises if outside."""
    sup = a.field
    if sup is sub:
        return a
    key = ((sub.char, sub.degree), (sup.char, sup.degree))
    cached = _UNEMBED_CACHE.get(key)
    if cached is None:
        powers = _embed_powers(sub, sup)
        # columns: F_p coordinates of img^i, i < e_sub
        cols = [FieldElem(sup, pw).coeffs() for pw in powers]
        rows = [[cols[j][i] for j in range(sub.degree)] for i in range(sup.degree)]
        cached = (rows,)
        _UNEMBED_CACHE[key] = cached
    (rows,) = cached
    prime = make_field(sup.char, 1)
    rhs = list(a.coeffs())
    sol = mat_solve(prime, [row[:] for row in rows], rhs)
    if sol is None:
        raise ValueError(f"{a!r} does not lie in the image of {sub!r}")
    return FieldElem(sub, sub._undigits([c % sub.char for c in sol]))


def frobenius(a: FieldElem, base: FiniteField, k: int = 1) -> FieldElem:
    """a ** (|base| ** k): the k-th power of the Frobenius relative to ``base``."""
    if a.field.char != base.char:
        raise ValueError("frobenius base has a different characteristic")
    return FieldElem(a.field, a.field.frobi(a.code, base.degree * k))


def trace_norm(a: FieldElem, sub: FiniteField) -> tuple[FieldElem, FieldElem]:
    """(trace, norm) of ``a`` relative to ``sub``, returned as elements of ``sub``."""
    sup = a.field
    if not is_subfield(sub, sup):
        raise ValueError(f"{sub!r} is not a subfield of {sup!r}")
    n = sup.degree // sub.degree
    tr = 0
    nm = 1
    c = a.code
    for _ in range(n):
        tr = sup.addi(tr, c)
        nm = sup.muli(nm, c)
        c = sup.frobi(c, sub.degree)
    return unembed(FieldElem(sup, tr), sub), unembed(FieldElem(sup, nm), sub)


def nth_roots(a: FieldElem, n: int) -> list[FieldElem]:
    """All solutions of X**n = a, sorted by coefficient-vector lex order.

    Exhaustive search (walking successive generator powers); empty when no
    root exists; [0] for a = 0.  Callers needing a designated root take the
    first entry.
    """
    if n < 1:
        raise ValueError("root index must be >= 1")
    field = a.field
    if not a:
        return [field.zero]
    roots = []
    gn = field.powi(field.gen_code, n)
    cand_n = 1
    cand = 1
    for _ in range(field.order - 1):
        if cand_n == a.code:
            roots.append(FieldElem(field, cand))
        cand = field.muli(cand, field.gen_code)
        cand_n = field.muli(cand_n, gn)
    roots.sort(key=lambda b: b.coeffs())
    return roots


class TwistedField:
    """A finite field with a designated q-power endomorphism, for twisted work.

    Exposes the coefficient-ring protocol shared by all twist-carrying rings:
    zero()/one(), coerce(), qpow(), inv(), is_unit(), and the attribute ``q``.
    """

    def __init__(self, field: FiniteField, q: int):
        self.field = field
        self.q = q
        d = 0
        qq = 1
        while qq < q:
            qq *= field.char
            d += 1
        if qq != q:
            raise ValueError(f"{q} is not a power of the characteristic {field.char}")
        if field.degree % d != 0:
            raise ValueError(f"GF({q}) is not a subfield of {field!r}")
        self._dq = d

    def zero(self) -> FieldElem:
        return self.field.zero

    def one(self) -> FieldElem:
        return self.field.one

    def coerce(self, x) -> FieldElem:
        if isinstance(x, FieldElem):
            if x.field is self.field:
                return x
            if is_subfield(x.field, self.field):
                return embed(x, self.field)
            raise ValueError(f"cannot coerce {x!r} into {self.field!r}")
        if isinstance(x, int):
            return self.field(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self.field!r}")

    def qpow(self, a: FieldElem, k: int = 1) -> FieldElem:
        return FieldElem(self.field, self.field.frobi(a.code, self._dq * k))

    def inv(self, a: FieldElem) -> FieldElem:
        return a.inverse()

    def is_unit(self, a) -> bool:
        return bool(a)

    def __repr__(self):
        return f"{self.field!r}[q={self.q}]"


_TWIST_CACHE: dict[tuple[int, int, int], TwistedField] = {}


def with_twist(field: FiniteField, q: int) -> TwistedField:
    key = (field.char, field.degree, q)
    tw = _TWIST_CACHE.get(key)
    if tw is None:
        tw = TwistedField(field, q)
        _TWIST_CACHE[key] = tw
    return tw


# ---------------------------------------------------------------------------
# dense linear algebra over a FiniteField, on integer codes
# ---------------------------------------------------------------------------

def mat_rref(F: FiniteField, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form (in place on copies); returns (rows, pivot columns)."""
    rows = [r[:] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = F.invi(rows[r][c])
        rows[r] = [F.muli(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [F.subi(a, F.muli(f, b)) for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def mat_solve(F: FiniteField, rows: list[list[int]], rhs: list[int]) -> list[int] | None:
    """One solution of rows * x = rhs, or None.  rows: m lists of length n."""
    if not rows:
        return None
    n = len(rows[0])
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    red, pivots = mat_rref(F, aug, n)
    for row in red:
        if not any(row[:n]) and row[n] != 0:
            return None
    sol = [0] * n
    for i, c in enumerate(pivots):
        sol[c] = red[i][n]
    return sol


def mat_kernel(F: FiniteField, rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of the right kernel {x : rows * x = 0}."""
    red, pivots = mat_rref(F, rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = F.negi(red[i][fc])
        basis.append(vec)
    return basis


def mat_rank(F: FiniteField, rows: list[list[int]], ncols: int) -> int:
    return len(mat_rref(F, rows, ncols)[1])

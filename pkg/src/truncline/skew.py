"""Twisted polynomials over a coefficient ring with a designated q-power map.

A twisted polynomial is sum c_i tau^i with the commutation rule
tau * c = qpow(c) * tau, composed like the additive operators they represent
(tau acting as the q-power map on any extension).  Coefficients live in any
ring exposing the shared protocol (zero/one/coerce/qpow/inv/is_unit, plus
elements with arithmetic dunders): finite fields with a twist, rational
function fields, radical extensions, or the symbolic Laurent ring.

Coefficient lists are little-endian in the tau-degree and carry no trailing
zeros, so the zero operator has an empty list.  Division happens from the
right: right_divmod(f, g) yields f = q*g + r with deg r < deg g, whenever the
leading coefficient of g (and its twists) is a unit.  Right gcds normalize to
monic only once, at the very end, so intermediate results stay exact over
non-field rings as long as every pivot happens to be a unit.
"""

from __future__ import annotations


class SkewPoly:
    """sum coeffs[i] * tau^i over a twist-carrying coefficient ring."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        cs = [ring.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.ring = ring
        self.coeffs = cs

    @property
    def deg(self) -> int:
        """tau-degree; -1 for the zero operator."""
        return len(self.coeffs) - 1

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ring.zero()

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("zero operator has no leading coefficient")
        return self.coeffs[-1]

    @property
    def constant(self):
        return self.coeff(0)

    # -- arithmetic ---------------------------------------------------------

    def _co(self, other):
        if isinstance(other, SkewPoly):
            return other if other.ring is self.ring else None
        try:
            return SkewPoly(self.ring, [self.ring.coerce(other)])
        except (ValueError, TypeError):
            return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return SkewPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return SkewPoly(self.ring, [-c for c in self.coeffs])

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
        if not self.coeffs or not o.coeffs:
            return SkewPoly(ring, [])
        out = [ring.zero() for _ in range(len(self.coeffs) + len(o.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * ring.qpow(b, i)
        return SkewPoly(ring, out)

    def __rmul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("twisted polynomials have no negative composition powers")
        result = SkewPoly(self.ring, [self.ring.one()])
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
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    # -- structure ----------------------------------------------------------

    def monic(self) -> "SkewPoly":
        if not self.coeffs:
            return self
        inv = self.ring.inv(self.lead)
        return SkewPoly(self.ring, [inv * c for c in self.coeffs])

    def map_coefficients(self, fn, new_ring) -> "SkewPoly":
        return SkewPoly(new_ring, [fn(c) for c in self.coeffs])

    def to_json(self):
        return {"coeffs": [_coeff_json(c) for c in self.coeffs]}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                bits.append(f"({c!r})")
            else:
                bits.append(f"({c!r})*tau" + (f"^{i}" if i > 1 else ""))
        return " + ".join(bits)


def _coeff_json(c):
    return c.to_json() if hasattr(c, "to_json") else c


def smul(f: SkewPoly, g) -> SkewPoly:
    """Twisted product f * g (tau * c = qpow(c) * tau)."""
    out = f * g
    if out is NotImplemented:
        raise TypeError("operands live over different coefficient rings")
    return out


def right_divmod(f: SkewPoly, g: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """(quotient, remainder) with f = quotient * g + remainder, deg r < deg g.

    Requires the leading coefficient of g to be a unit (each elimination step
    divides by one of its twists).
    """
    ring = f.ring
    if g.ring is not ring:
        raise TypeError("operands live over different coefficient rings")
    if not g:
        raise ZeroDivisionError("right division by the zero operator")
    if not ring.is_unit(g.lead):
        raise ValueError(f"leading coefficient {g.lead!r} is not a unit; cannot divide")
    rem = list(f.coeffs)
    dg = g.deg
    quot = [ring.zero() for _ in range(max(0, len(rem) - dg))]
    while len(rem) - 1 >= dg and rem:
        k = len(rem) - 1 - dg
        c = rem[-1] * ring.inv(ring.qpow(g.lead, k))
        quot[k] = c
        for j, b in enumerate(g.coeffs):
            rem[k + j] = rem[k + j] - c * ring.qpow(b, k)
        while rem and not rem[-1]:
            rem.pop()
    return SkewPoly(ring, quot), SkewPoly(ring, rem)


def right_gcd(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Monic generator of the right ideal (f, g): the usual Euclidean loop,
    normalized to monic only at the very end.  right_gcd(f, 0) = monic(f)."""
    if f.ring is not g.ring:
        raise TypeError("operands live over different coefficient rings")
    a, b = f, g
    while b:
        _, r = right_divmod(a, b)
        a, b = b, r
    return a.monic() if a else a


def evaluate(f: SkewPoly, xi, target=None, lift=None):
    """Apply the additive operator: sum coeffs[i] * xi^(q^i).

    ``xi`` may live in an extension of the coefficient ring; pass its ring as
    ``target`` (anything with qpow/coerce) and, when plain coercion does not
    reach it, an explicit coefficient ``lift``.
    """
    ring = target if target is not None else f.ring
    if lift is None:
        lift = ring.coerce
    acc = ring.zero()
    pw = xi
    for i, c in enumerate(f.coeffs):
        if i > 0:
            pw = ring.qpow(pw, 1)
        if c:
            acc = acc + lift(c) * pw
    return acc

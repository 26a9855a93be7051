"""Truncated exponential/logarithm tower for the rank-one standard model.

The coordinate ring acts on its completion at the distinguished degree-two
place through a lattice-exponential; everything here computes with that
exponential at the level of exact rational functions of t, expanding to
Laurent series in the local parameter only at the final comparison step.

Representation invariants:
- A LinearizedSeries over a coefficient ring R stores ``coeffs`` with
  ``coeffs[j]`` the coefficient of X^(q^j), trimmed of trailing zeros, and a
  truncation index ``trunc``: the series is only known modulo X^(q^trunc),
  and ``len(coeffs) <= trunc`` always holds.  Composition and addition
  truncate to the weaker window of the two operands.
- AnalyticTower caches the denominator sequences D_j (exponential side) and
  L_j (logarithm side) and the bracket elements as exact RatFunc values.
  Caches are write-once per index: concurrent readers take a lock-free fast
  path, a single initializer fills missing indices under the tower lock, and
  every cached value is immutable.
- Bracket elements: bracket(2k) = T^(q^(2k)) - T and
  bracket(2k-1) = T^(q^(2k-1)) - T^sigma, where T = 1/(t - zeta^q) and
  T^sigma = 1/(t - zeta); bracket(0) = 0.
- All period statements are made on the (q-1)-th power of the period, where
  the ambiguity by a (q-1)-th root of unity disappears.
"""

from __future__ import annotations

import itertools
import threading

from . import funcfield as _ff
from .domain import DomainElem, deg, get_domain, rr_basis, to_ratfunc
from .funcfield import LaurentSeries, RatFunc, expand_at_infinity


class LinearizedSeries:
    """An F_q-linear power series sum_j coeffs[j] X^(q^j) modulo X^(q^trunc)."""

    def __init__(self, ring, coeffs, trunc: int):
        if trunc < 1:
            raise ValueError("truncation index must be at least 1")
        cs = list(coeffs[:trunc])
        while cs and not cs[-1]:
            cs.pop()
        self.ring = ring
        self.coeffs = cs
        self.trunc = trunc

    def coeff(self, j: int):
        if j >= self.trunc:
            raise ValueError(f"coefficient {j} is beyond the truncation {self.trunc}")
        if j < len(self.coeffs):
            return self.coeffs[j]
        return self.ring.zero()

    def degree(self) -> int:
        """Index of the highest stored nonzero coefficient (-1 for zero)."""
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def _binop(self, other, op):
        if self.ring is not other.ring:
            raise ValueError("series live over different coefficient rings")
        trunc = min(self.trunc, other.trunc)
        n = min(trunc, max(len(self.coeffs), len(other.coeffs)))
        out = [op(self.coeff(j), other.coeff(j)) for j in range(n)]
        return LinearizedSeries(self.ring, out, trunc)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __neg__(self):
        return LinearizedSeries(self.ring, [-c for c in self.coeffs], self.trunc)

    def scale(self, c):
        """The series c * f(X)."""
        return LinearizedSeries(self.ring, [c * a for a in self.coeffs], self.trunc)

    def scale_input(self, a):
        """The series f(a X); coefficient j picks up a^(q^j)."""
        ring = self.ring
        out = [c * ring.qpow(a, j) for j, c in enumerate(self.coeffs)]
        return LinearizedSeries(ring, out, self.trunc)

    def compose(self, other) -> "LinearizedSeries":
        """The series f(g(X)); truncation is the weaker of the two windows."""
        if self.ring is not other.ring:
            raise ValueError("series live over different coefficient rings")
        ring = self.ring
        n = min(self.trunc, other.trunc)
        out = [ring.zero() for _ in range(n)]
        for i, ci in enumerate(self.coeffs):
            if i >= n:
                break
            if not ci:
                continue
            for j, gj in enumerate(other.coeffs):
                if i + j >= n:
                    break
                if gj:
                    out[i + j] = out[i + j] + ci * ring.qpow(gj, i)
        return LinearizedSeries(ring, out, n)

    def evaluate(self, v):
        """sum_j coeffs[j] * v^(q^j) over the stored coefficients.

        Meaningful when the series is an exact polynomial (a kernel
        polynomial, say); for a genuinely truncated series this is only the
        truncated sum.
        """
        ring = self.ring
        out = ring.zero()
        for j, c in enumerate(self.coeffs):
            if c:
                out = out + c * ring.qpow(v, j)
        return out

    def __eq__(self, other):
        if not isinstance(other, LinearizedSeries):
            return NotImplemented
        return (
            self.ring is other.ring
            and self.trunc == other.trunc
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.trunc, len(self.coeffs)))

    def to_json(self):
        return {
            "coeffs": [c.to_json() for c in self.coeffs],
            "trunc": self.trunc,
        }

    def __repr__(self):
        return f"LinearizedSeries({len(self.coeffs)} coeffs mod X^(q^{self.trunc}))"


class PeriodApproximation:
    """Two Laurent approximations of the (q-1)-th power of the period.

    ``quotient`` is the exact finite-stage quotient -L_(2d+1) / L_(2d)^q;
    ``product`` is the bracket product form
    -bracket(1)^(1-q) * bracket(2) * T^((q-1)(sigma-1)) * (alpha_d beta_d)^(q-1).
    ``agreement_order`` is the smallest exponent where their expansions
    differ (None when they agree on the whole common window).
    """

    def __init__(self, d: int, quotient: LaurentSeries, product: LaurentSeries):
        self.d = d
        self.quotient = quotient
        self.product = product
        self.agreement_order = quotient.first_difference(product)

    @property
    def valuation(self) -> int:
        return self.quotient.val

    def to_json(self):
        return {
            "d": self.d,
            "valuation": self.valuation,
            "coeffs": self.quotient.to_json()["coeffs"],
            "agreement_order": self.agreement_order,
        }

    def __repr__(self):
        return (
            f"PeriodApproximation(d={self.d}, valuation={self.valuation}, "
            f"agreement_order={self.agreement_order})"
        )


class AnalyticTower:
    """Exponential/logarithm data for the rank-one standard model at a fixed q.

    Holds the rational-function field of t over F_(q^2) and computes the
    denominator sequences, bracket elements, truncated exponential and
    logarithm, the kernel polynomials of the pole-bounded function spaces,
    and partial-product approximations of the period.
    """

    def __init__(self, q: int):
        dom = get_domain(q)
        self.q = q
        self.dom = dom
        self.H = dom.H
        std = dom.std
        self.t = std["t"]
        self.T = std["T"]
        self.Tsigma = std["Tsigma"]
        # linear denominators: u = t - zeta^q (= 1/T) and t - zeta (= 1/T^sigma)
        self._u = self.T.inverse()
        self._us = self.Tsigma.inverse()
        self.zeta_f = dom.zeta
        self.zeta_q_f = dom.zeta ** q
        self._lock = threading.Lock()
        self._D = [self.H.one()]
        self._L = [self.H.one()]
        self._brackets: dict[int, RatFunc] = {}

    # -- bracket elements ---------------------------------------------------

    def bracket(self, k: int) -> RatFunc:
        """bracket(2k) = T^(q^(2k)) - T, bracket(2k-1) = T^(q^(2k-1)) - T^sigma."""
        if k < 0:
            raise ValueError("bracket index must be >= 0")
        b = self._brackets.get(k)
        if b is None:
            with self._lock:
                b = self._brackets.get(k)
                if b is None:
                    if k == 0:
                        b = self.H.zero()
                    elif k % 2 == 0:
                        b = self.T.qpow(k) - self.T
                    else:
                        b = self.T.qpow(k) - self.Tsigma
                    self._brackets[k] = b
        return b

    # -- denominator sequences ----------------------------------------------

    def _zeta_linear(self, e: int) -> RatFunc:
        """t - zeta^(q^e): the Frobenius square fixes zeta, so only the
        parity of e matters."""
        return self._us if e % 2 == 0 else self._u

    def _next_D(self, j: int) -> RatFunc:
        prev = self._D[j - 1]
        num = self.t - self.t.qpow(j)
        den = self._zeta_linear(j - 1).qpow(j) * self._u
        return prev.qpow(1) * num / den

    def _next_L(self, j: int) -> RatFunc:
        prev = self._L[j - 1]
        num = self.t - self.t.qpow(j)
        den = (
            self._zeta_linear(j + 1)
            * self._us.qpow(j - 1) ** (self.q - 1)
            * self._u.qpow(j - 1)
        )
        return prev * num / den

    def D(self, j: int) -> RatFunc:
        """Denominator of the X^(q^j) coefficient of the exponential."""
        if j < 0:
            raise ValueError("index must be >= 0")
        cache = self._D
        if j < len(cache):
            return cache[j]
        with self._lock:
            while len(cache) <= j:
                cache.append(self._next_D(len(cache)))
        return cache[j]

    def L(self, j: int) -> RatFunc:
        """Denominator of the X^(q^j) coefficient of the logarithm."""
        if j < 0:
            raise ValueError("index must be >= 0")
        cache = self._L
        if j < len(cache):
            return cache[j]
        with self._lock:
            while len(cache) <= j:
                cache.append(self._next_L(len(cache)))
        return cache[j]

    def closed_form_L(self, j: int) -> RatFunc:
        """bracket(1)...bracket(j) * T^((sigma-1)(q^j - 1)), which equals L(j)."""
        out = self.H.one()
        for i in range(1, j + 1):
            out = out * self.bracket(i)
        ratio = self.Tsigma / self.T
        # T^((sigma-1)(q^j - 1)) = (T^sigma/T)^(q^j) * (T/T^sigma)
        return out * ratio.qpow(j) / ratio

    # -- exponential / logarithm ---------------------------------------------

    def exp_trunc(self, N: int) -> LinearizedSeries:
        """The lattice exponential modulo X^(q^N): coefficients 1/D_j."""
        return LinearizedSeries(
            self.H, [self.D(j).inverse() for j in range(N)], N
        )

    def log_trunc(self, N: int) -> LinearizedSeries:
        """The lattice logarithm modulo X^(q^N): coefficients (-1)^j / L_j."""
        out = []
        for j in range(N):
            c = self.L(j).inverse()
            if j % 2:
                c = -c
            out.append(c)
        return LinearizedSeries(self.H, out, N)

    # -- binomial coefficients -----------------------------------------------

    def binom(self, a, r: int) -> RatFunc:
        """The tau^r coefficient of the image of a under the standard model:
        sum_(j<=r) (-1)^(r-j) a^(q^j) / (D_j * L_(r-j)^(q^j))."""
        if r < 0:
            raise ValueError("index must be >= 0")
        af = to_ratfunc(a) if isinstance(a, DomainElem) else a
        total = self.H.zero()
        for j in range(r + 1):
            term = af.qpow(j) / (self.D(j) * self.L(r - j).qpow(j))
            if (r - j) % 2:
                term = -term
            total = total + term
        return total

    def image_coeffs(self, a: DomainElem) -> list:
        """All tau-coefficients [binom(a, 0), ..., binom(a, deg a)] of the
        image of a; matches the standard model's skew polynomial."""
        n = deg(a)
        return [self.binom(a, r) for r in range(n + 1)]

    # -- kernel polynomials ---------------------------------------------------

    def E_k(self, k: int) -> LinearizedSeries:
        """The monic-in-roots kernel polynomial of the span of the functions
        with pole order at most k, via -L_(2k+1) * binom(z, 2k+1):
        coefficient j is (-1)^j L_(2k+1) / (D_j * L_(2k+1-j)^(q^j))."""
        if k < 0:
            raise ValueError("index must be >= 0")
        n = 2 * k + 1
        top = self.L(n)
        cs = []
        for j in range(n + 1):
            c = top / (self.D(j) * self.L(n - j).qpow(j))
            if j % 2:
                c = -c
            cs.append(c)
        return LinearizedSeries(self.H, cs, n + 1)

    def brute_E_k(self, k: int) -> LinearizedSeries:
        """Oracle for E_k: the product X * prod(1 - X/a) over all nonzero a
        in the F_q-span of the pole-order-k basis.  Bounded to spans of size
        q^(2k+1) <= 4096."""
        if k < 0:
            raise ValueError("index must be >= 0")
        q = self.q
        size = q ** (2 * k + 1)
        if size > 4096:
            raise ValueError(f"span of size {size} exceeds the brute-force bound 4096")
        F2 = self.dom.Fq2
        # product of (num_a - den_a X) over the span, tracked as dense
        # polynomial-in-X with F_(q^2)[t] coefficients; the denominator
        # prod num_a is divided back out at the end
        poly = [[1]]
        den_total = [1]
        for codes in itertools.product(range(q), repeat=2 * k + 1):
            if not any(codes):
                continue
            a = self.dom.elem(list(codes[: k + 1]), list(codes[k + 1 :]))
            af = to_ratfunc(a)
            na, da = af.num, af.den
            neg_da = _ff.pscale(F2, F2.negi(1), da)
            new = [_ff.pmul(F2, c, na) for c in poly] + [[]]
            for i, c in enumerate(poly):
                new[i + 1] = _ff.padd(F2, new[i + 1], _ff.pmul(F2, c, neg_da))
            poly = new
            den_total = _ff.pmul(F2, den_total, na)
        poly = [[]] + poly  # multiply by X
        qpowers = {q ** j: j for j in range(2 * k + 2)}
        out = [self.H.zero() for _ in range(2 * k + 2)]
        for i, c in enumerate(poly):
            c = _ff.ptrim(c)
            if not c:
                continue
            j = qpowers.get(i)
            if j is None:
                raise ArithmeticError(
                    f"product has a coefficient at X^{i}, which is not a q-power"
                )
            out[j] = RatFunc(self.H, c, den_total)
        return LinearizedSeries(self.H, out, 2 * k + 2)

    # -- period approximations -------------------------------------------------

    def alpha(self, d: int) -> RatFunc:
        """Partial product prod_(j=2..d) (1 - bracket(2(j-1))/bracket(2j))."""
        if d < 1:
            raise ValueError("index must be >= 1")
        one = self.H.one()
        out = one
        for j in range(2, d + 1):
            out = out * (one - self.bracket(2 * (j - 1)) / self.bracket(2 * j))
        return out

    def beta(self, d: int) -> RatFunc:
        """Partial product prod_(j=1..d) (1 - bracket(2j-1)/bracket(2j+1))."""
        if d < 0:
            raise ValueError("index must be >= 0")
        one = self.H.one()
        out = one
        for j in range(1, d + 1):
            out = out * (one - self.bracket(2 * j - 1) / self.bracket(2 * j + 1))
        return out

    def alpha_closed(self, d: int) -> RatFunc:
        """bracket(2)^((q^(2d)-1)/(q^2-1)) / prod_(j=1..d) bracket(2j)."""
        if d < 1:
            raise ValueError("index must be >= 1")
        b2 = self.bracket(2)
        num = self.H.one()
        for i in range(d):
            num = num * b2.qpow(2 * i)  # exponent sum_(i<d) q^(2i)
        den = self.H.one()
        for j in range(1, d + 1):
            den = den * self.bracket(2 * j)
        return num / den

    def beta_closed(self, d: int) -> RatFunc:
        """bracket(1) * bracket(2)^((q^(2d+1)-q)/(q^2-1)) / prod_(j=0..d) bracket(2j+1)."""
        if d < 0:
            raise ValueError("index must be >= 0")
        b2 = self.bracket(2)
        num = self.bracket(1)
        for i in range(d):
            num = num * b2.qpow(2 * i + 1)  # exponent sum_(i<d) q^(2i+1)
        den = self.H.one()
        for j in range(d + 1):
            den = den * self.bracket(2 * j + 1)
        return num / den

    def _period_pow_quotient(self, d: int) -> RatFunc:
        """-L_(2d+1) / L_(2d)^q: the finite-stage quotient whose limit is the
        (q-1)-th power of the period."""
        return -(self.L(2 * d + 1) / self.L(2 * d).qpow(1))

    def _period_pow_product(self, d: int) -> RatFunc:
        """-bracket(1)^(1-q) bracket(2) T^((q-1)(sigma-1)) (alpha_d beta_d)^(q-1)."""
        qm1 = self.q - 1
        tpow = (self.Tsigma / self.T) ** qm1
        return -(
            self.bracket(1).inverse() ** qm1
            * self.bracket(2)
            * tpow
            * (self.alpha(d) * self.beta(d)) ** qm1
        )

    def xi_pow(self, d: int, N: int = 40) -> PeriodApproximation:
        """Laurent data for the (q-1)-th power of the period at stage d.

        Expands the finite-stage quotient and the bracket-product form at the
        distinguished place (coefficients of u^k for k < N) and records where
        they first differ.  The valuation is -1 at every stage.
        """
        if d < 1:
            raise ValueError("index must be >= 1")
        qa = expand_at_infinity(self._period_pow_quotient(d), N)
        pa = expand_at_infinity(self._period_pow_product(d), N)
        return PeriodApproximation(d, qa, pa)

    def lattice_data(self, d: int, N: int = 40) -> dict:
        """Generator data for the period lattices of the two standard models,
        at the (q-1)-th-power level where root-of-unity choices vanish.

        The conjugate model's lattice generator has two descriptions: the
        period scaled by T and by the (q-1)-th root of T^(sigma-1), or
        directly via a (q-1)-th root of -bracket(2) T^(sigma-1).  Their
        (q-1)-th powers are expanded and compared; equality (up to the root
        of unity, invisible at this level) is expected and recorded, not
        asserted.
        """
        qm1 = self.q - 1
        xi_q = self._period_pow_quotient(d)
        gen_a = self.T ** qm1 * (self.Tsigma / self.T) * xi_q
        gen_b = (
            -self.bracket(2)
            * (self.Tsigma / self.T)
            * self.Tsigma ** qm1
            * self.bracket(1).inverse() ** qm1
            * (self.alpha(d) * self.beta(d)) ** qm1
        )
        ea = expand_at_infinity(gen_a, N)
        eb = expand_at_infinity(gen_b, N)
        return {
            "d": d,
            "standard": {
                "generator_pow": expand_at_infinity(xi_q, N).to_json(),
                "module": "the full coordinate ring",
            },
            "conjugate": {
                "generator_pow_scaled_period": ea.to_json(),
                "generator_pow_root_form": eb.to_json(),
                "agreement_order": ea.first_difference(eb),
                "module": "inverse of the degree-one ideal (x, y), spanned by 1 and t",
                "note": (
                    "the two generator forms differ by at most a (q-1)-th "
                    "root of unity; their (q-1)-th powers are compared here "
                    "and expected to agree, but this is recorded rather than "
                    "asserted"
                ),
            },
        }


_TOWER_CACHE: dict[int, AnalyticTower] = {}
_TOWER_LOCK = threading.Lock()


def get_tower(q: int) -> AnalyticTower:
    tower = _TOWER_CACHE.get(q)
    if tower is None:
        with _TOWER_LOCK:
            tower = _TOWER_CACHE.get(q)
            if tower is None:
                tower = AnalyticTower(q)
                _TOWER_CACHE[q] = tower
    return tower

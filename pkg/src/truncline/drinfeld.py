"""Explicit Drinfeld modules over the truncated-line coordinate ring.

A module is a pair of twisted polynomials (phi_x, phi_y) over a coefficient
ring together with the structure map iota sending the ring generators x, y to
the constant terms.  Constructors cover the two standard rank-one models, the
Hayes modules psi^u attached to a root u of the sign-normalization relation,
the two-parameter rank-one family psi^(zeta*, a), the rank-two family in
(lambda, nu) coordinates and its single-invariant J-form, exterior squares
of the rank-two modules, and the worked q = 2 example over F_4(s) with
t = s^2.

Coefficient rings are anything satisfying the shared descriptor protocol:
the rational-function field over F_{q^2}, radical extensions of it, a
univariate symbolic layer on top (variable mapping to its own q-th power
under the twist), or a finite field adapter.  All arithmetic is exact; every
identity check is literal equality of twisted-polynomial coefficients.
"""

from __future__ import annotations

from .domain import DomainElem, Ideal, get_domain
from .ffield import FieldElem, embed, make_field, nth_roots, trace_norm, unembed, with_twist
from .funcfield import FuncField, SymbolicRing, radical_extend
from .skew import SkewPoly, right_divmod, right_gcd


# ---------------------------------------------------------------------------
# structure maps (A-fields)
# ---------------------------------------------------------------------------


class AFieldSpec:
    """A coefficient ring together with the images of t (hence x, y).

    Derived attributes: T = 1/(t - zeta^q), Tsigma = 1/(t - zeta),
    iota_x = T * Tsigma, iota_y = t * iota_x, and the F_{q^2}-constants
    zeta, zeta^q coerced into the ring.
    """

    ring = None
    q: int
    is_finite = False

    def _init_common(self, ring, q: int, zeta_f: FieldElem, t_elem):
        self.ring = ring
        self.q = q
        self.zeta_f = zeta_f
        self.zeta_q_f = zeta_f ** q
        fq2 = zeta_f.field
        self.Fq2 = fq2
        self.t = t_elem
        self.zeta = ring.coerce(zeta_f)
        self.zeta_q = ring.coerce(self.zeta_q_f)
        self.T = ring.inv(t_elem - self.zeta_q)
        self.Tsigma = ring.inv(t_elem - self.zeta)
        self.iota_x = self.T * self.Tsigma
        self.iota_y = t_elem * self.iota_x
        tr, nm = trace_norm(zeta_f, _fq_of(fq2))
        self.tr_f = tr
        self.nm_f = nm
        rel = (self.iota_y * self.iota_y - ring.coerce(tr) * self.iota_x * self.iota_y
               + ring.coerce(nm) * self.iota_x * self.iota_x - self.iota_x)
        if rel:
            raise ValueError("structure map violates the defining curve relation")

    def scalar(self, c) -> object:
        """Coerce an F_q or F_{q^2} constant (or int) into the ring."""
        return self.ring.coerce(c)

    @property
    def one(self):
        return self.ring.one()

    @property
    def zero(self):
        return self.ring.zero()


def _fq_of(fq2):
    return make_field(fq2.char, fq2.degree // 2)


class GenericSpec(AFieldSpec):
    """Structure map into a ring where t stays transcendental: the
    rational-function field itself, a radical extension, or a symbolic layer."""

    def __init__(self, ring, t_elem=None):
        base = _base_funcfield(ring)
        if t_elem is None:
            t_elem = ring.coerce(base.t)
        self._init_common(ring, base.q, base.zeta, t_elem)

    def to_json(self):
        return {"variant": "generic", "q": self.q, "ring": repr(self.ring)}

    def __repr__(self):
        return f"GenericSpec(q={self.q}, ring={self.ring!r})"


def _base_funcfield(ring) -> FuncField:
    seen = ring
    while not isinstance(seen, FuncField):
        base = getattr(seen, "base", None)
        if base is None:
            raise ValueError(f"{ring!r} is not built over a rational-function field")
        seen = base
    return seen


class FiniteSpec(AFieldSpec):
    """Structure map into a finite field: theta in F_{q^m} with pi(theta) != 0
    plays the role of t, so iota(x) = 1/pi(theta) and iota(y) = theta/pi(theta).

    Coefficients live in F_{q^m} when m is even (so that zeta is present) and
    in F_{q^{2m}} otherwise.
    """

    is_finite = True

    def __init__(self, q: int, m: int, theta):
        dom = get_domain(q)
        p, dq = dom.p, dom.Fq.degree
        self.m = m
        self.K = make_field(p, dq * m)
        if isinstance(theta, int):
            theta = self.K.from_code(theta)
        if theta.field is not self.K:
            raise ValueError(f"theta must be an element of F_{q}^{m}")
        self.theta = theta
        tr_k = embed(dom.tr, self.K)
        nm_k = embed(dom.nm, self.K)
        pi_theta = theta * theta - tr_k * theta + nm_k
        if not pi_theta:
            raise ValueError(
                "theta is a root of the distinguished quadratic: the structure map "
                "would have bad reduction (iota(x) undefined)"
            )
        big = self.K if m % 2 == 0 else make_field(p, 2 * dq * m)
        ring = with_twist(big, q)
        t_elem = ring.coerce(theta)
        self._init_common(ring, q, dom.zeta, t_elem)

    def to_json(self):
        return {"variant": "finite", "q": self.q, "m": self.m, "theta": self.theta.to_json()}

    def __repr__(self):
        return f"FiniteSpec(q={self.q}, m={self.m}, theta={self.theta!r})"


def valid_thetas(q: int, m: int) -> list[FieldElem]:
    """All theta in F_{q^m} with pi(theta) != 0, in code-ascending order.
    The CLI's theta selector indexes into this list."""
    dom = get_domain(q)
    K = make_field(dom.p, dom.Fq.degree * m)
    tr_k = embed(dom.tr, K)
    nm_k = embed(dom.nm, K)
    out = []
    for th in K.elements():
        if th * th - tr_k * th + nm_k:
            out.append(th)
    return out


_H_SPEC_CACHE: dict[int, GenericSpec] = {}


def h_spec(q: int) -> GenericSpec:
    """The plain generic structure map over the rational-function field."""
    spec = _H_SPEC_CACHE.get(q)
    if spec is None:
        spec = GenericSpec(get_domain(q).H)
        _H_SPEC_CACHE[q] = spec
    return spec


_ELL_SPEC_CACHE: dict[int, GenericSpec] = {}


def ell_spec(q: int) -> GenericSpec:
    """Generic spec over the radical extension adjoining ell with
    ell^(q-1) = Tsigma/T (the scalar part of the standard isogeny)."""
    spec = _ELL_SPEC_CACHE.get(q)
    if spec is None:
        base = h_spec(q)
        c = base.Tsigma / base.T
        ring = radical_extend(base.ring, q - 1, c, "l")
        spec = GenericSpec(ring)
        _ELL_SPEC_CACHE[q] = spec
    return spec


_NU_SPEC_CACHE: dict[int, GenericSpec] = {}


def nu_spec(q: int) -> GenericSpec:
    """Generic spec over the radical extension adjoining nu with
    nu^(q+1) = -(Tsigma * T^q), the scalar entering the rank-two family."""
    spec = _NU_SPEC_CACHE.get(q)
    if spec is None:
        base = h_spec(q)
        c = -(base.Tsigma * base.ring.qpow(base.T, 1))
        ring = radical_extend(base.ring, q + 1, c, "nu")
        spec = GenericSpec(ring)
        _NU_SPEC_CACHE[q] = spec
    return spec


def symbolic_J_spec(q: int) -> tuple[GenericSpec, object, object]:
    """(spec, nu, J) with J a symbolic transcendental over the nu-field:
    the ground ring for verifying the rank-two J-family as a polynomial
    identity in J."""
    base = nu_spec(q)
    ring = SymbolicRing(base.ring, "J")
    spec = GenericSpec(ring)
    nu = ring.coerce(base.ring.root)
    return spec, nu, ring.var


def symbolic_lambda_spec(q: int) -> tuple[GenericSpec, object, object]:
    """(spec, lam, nu) with lambda a symbolic transcendental over the nu-field."""
    base = nu_spec(q)
    ring = SymbolicRing(base.ring, "lam")
    spec = GenericSpec(ring)
    nu = ring.coerce(base.ring.root)
    return spec, ring.var, nu


# ---------------------------------------------------------------------------
# the module type
# ---------------------------------------------------------------------------

_CHECK_NAMES = (
    "tau_degree_x",
    "tau_degree_y",
    "constant_term_x",
    "constant_term_y",
    "commutation",
    "curve_relation",
    "leading_type",
)


class DrinfeldModule:
    """An exact Drinfeld module: twisted polynomials phi_x, phi_y of
    tau-degree 2r over spec.ring, with constant terms iota(x), iota(y)."""

    def __init__(self, spec: AFieldSpec, phi_x: SkewPoly, phi_y: SkewPoly,
                 rank: int, kind: str | None = None, params: dict | None = None):
        self.spec = spec
        self.ring = spec.ring
        self.phi_x = phi_x
        self.phi_y = phi_y
        self.rank = rank
        self.kind = kind
        self.params = params or {}
        self._report = None
        self._xpow = None

    @property
    def type_flag(self) -> str | None:
        """'zeta' or 'zeta_q' according to LT(phi_y)/LT(phi_x); None if neither."""
        try:
            ratio = self.phi_y.lead * self.ring.inv(self.phi_x.lead)
        except (ValueError, ZeroDivisionError):
            return None
        if ratio == self.spec.zeta:
            return "zeta"
        if ratio == self.spec.zeta_q:
            return "zeta_q"
        return None

    def validate(self) -> dict:
        if self._report is None:
            self._report = validate(self)
        return self._report

    def ensure_valid(self):
        report = self.validate()
        if not report["ok"]:
            raise ValueError(f"module failed validation: {report['failures']}")

    def xpow(self, i: int) -> SkewPoly:
        """Cached composition powers of phi_x."""
        if self._xpow is None:
            self._xpow = [SkewPoly(self.ring, [self.ring.one()])]
        while len(self._xpow) <= i:
            self._xpow.append(self._xpow[-1] * self.phi_x)
        return self._xpow[i]

    def __eq__(self, other):
        if not isinstance(other, DrinfeldModule):
            return NotImplemented
        return (self.ring is other.ring and self.rank == other.rank
                and self.phi_x == other.phi_x and self.phi_y == other.phi_y)

    def __hash__(self):
        return hash((id(self.ring), self.rank, self.phi_x, self.phi_y))

    def to_json(self):
        return {
            "field": self.spec.to_json(),
            "rank": self.rank,
            "phi_x": self.phi_x.to_json(),
            "phi_y": self.phi_y.to_json(),
        }

    def __repr__(self):
        return (f"DrinfeldModule(rank={self.rank}, kind={self.kind},"
                f" phi_x={self.phi_x!r}, phi_y={self.phi_y!r})")


def validate(m: DrinfeldModule) -> dict:
    """Exact check of the five defining constraints; report-based (never raises).

    Checks: tau-degrees equal 2*rank, constant terms are iota(x) and iota(y),
    the images commute, they satisfy the defining curve relation, and the
    ratio of leading terms is zeta or zeta^q.
    """
    spec, ring = m.spec, m.ring
    checks = {}
    checks["tau_degree_x"] = m.phi_x.deg == 2 * m.rank
    checks["tau_degree_y"] = m.phi_y.deg == 2 * m.rank
    checks["constant_term_x"] = m.phi_x.constant == spec.iota_x
    checks["constant_term_y"] = m.phi_y.constant == spec.iota_y
    checks["commutation"] = m.phi_x * m.phi_y == m.phi_y * m.phi_x
    tr_r = ring.coerce(spec.tr_f)
    nm_r = ring.coerce(spec.nm_f)
    rel = (m.phi_y * m.phi_y - tr_r * (m.phi_x * m.phi_y)
           + nm_r * (m.phi_x * m.phi_x) - m.phi_x)
    checks["curve_relation"] = not rel
    checks["leading_type"] = m.type_flag is not None
    failures = [name for name in _CHECK_NAMES if not checks[name]]
    return {"ok": not failures, "failures": failures, "checks": checks}


def phi_of(m: DrinfeldModule, a: DomainElem) -> SkewPoly:
    """The image of a coordinate-ring element: substitute phi_x, phi_y into
    the canonical form p(x) + s(x) y.  Requires a validated module."""
    m.ensure_valid()
    dom = a.dom
    if dom.q != m.spec.q:
        raise ValueError("element and module live over different base fields")
    ring = m.ring
    out = SkewPoly(ring, [])
    for i, code in enumerate(a.p_part):
        if code:
            out = out + m.spec.scalar(FieldElem(dom.Fq, code)) * m.xpow(i)
    for j, code in enumerate(a.s_part):
        if code:
            out = out + m.spec.scalar(FieldElem(dom.Fq, code)) * (m.xpow(j) * m.phi_y)
    return out


def annihilator(m: DrinfeldModule, ideal: Ideal) -> SkewPoly:
    """The monic maximal common right-divisor of the images of the ideal's
    generators; its tau-degree is rank * dim of the quotient by the ideal."""
    gens = [g for g in ideal.generators() if g]
    if not gens:
        raise ValueError("ideal has no nonzero generators")
    images = [phi_of(m, g) for g in gens]
    g = images[0]
    for h in images[1:]:
        g = right_gcd(g, h)
    return g.monic()


def quotient_module(m: DrinfeldModule, g: SkewPoly) -> DrinfeldModule:
    """The target of the isogeny with kernel divisor g: the module m' with
    g phi_a = phi'_a g.  Errors if g does not right-divide g * phi_a."""
    new = []
    for f in (m.phi_x, m.phi_y):
        quot, rem = right_divmod(g * f, g)
        if rem:
            raise ValueError("the twisted polynomial does not define an isogeny from this module")
        new.append(quot)
    return DrinfeldModule(m.spec, new[0], new[1], m.rank, kind="quotient")


# ---------------------------------------------------------------------------
# rank-one constructors
# ---------------------------------------------------------------------------


def _resolve_zeta_star(spec: AFieldSpec, zeta_star):
    """Accepts 'zeta' / 'zeta_q', the F_{q^2} element, or a ring element."""
    if zeta_star == "zeta" or zeta_star == spec.zeta_f:
        return spec.zeta, spec.zeta_q, "zeta"
    if zeta_star == "zeta_q" or zeta_star == spec.zeta_q_f:
        return spec.zeta_q, spec.zeta, "zeta_q"
    if zeta_star == spec.zeta:
        return spec.zeta, spec.zeta_q, "zeta"
    if zeta_star == spec.zeta_q:
        return spec.zeta_q, spec.zeta, "zeta_q"
    raise ValueError("zeta_star must be the quadratic generator or its conjugate")


def hayes(spec: AFieldSpec, u) -> DrinfeldModule:
    """The rank-one module psi^u for a sign-normalization root u:
    u^(q+1) must equal 1/((t - zeta*)(t^q - zeta*)) for one of the two
    conjugates zeta*; the constructor detects which and errors otherwise."""
    ring = spec.ring
    q = spec.q
    upow = u ** (q + 1)
    zeta_type = spec.Tsigma * ring.qpow(spec.T, 1)      # 1/((t-zeta)(t^q-zeta))
    zeta_q_type = spec.T * ring.qpow(spec.Tsigma, 1)    # 1/((t-zeta^q)(t^q-zeta^q))
    if upow == zeta_type:
        zs, flag = spec.zeta, "zeta"
    elif upow == zeta_q_type:
        zs, flag = spec.zeta_q, "zeta_q"
    else:
        raise ValueError(
            "root relation violated: u^(q+1) matches neither sign-normalization value"
        )
    u_inv = ring.inv(u)
    phi_x = SkewPoly(ring, [spec.iota_x, -(spec.iota_x + upow) * u_inv, ring.one()])
    phi_y = SkewPoly(ring, [spec.iota_y, -(spec.iota_y + zs * upow) * u_inv, zs])
    return DrinfeldModule(spec, phi_x, phi_y, 1, kind="hayes",
                          params={"u": u, "zeta_star": flag})


def psi_family(spec: AFieldSpec, zeta_star, a) -> DrinfeldModule:
    """The rank-one family psi^(zeta*, a) for a unit a:

      psi_x = [(t - zeta*^q)/(t - zeta*)] a^-(q+1) tau^2
              + [(t^q + t - tr)/((t - zeta*)(t^q - zeta*))] a^-1 tau + iota(x)
      psi_y = zeta* [(t - zeta*^q)/(t - zeta*)] a^-(q+1) tau^2
              + [(t^(q+1) - zeta*^(q+1))/((t - zeta*)(t^q - zeta*))] a^-1 tau + iota(y)
    """
    ring = spec.ring
    q = spec.q
    zs, zs_conj, flag = _resolve_zeta_star(spec, zeta_star)
    if not ring.is_unit(a):
        raise ValueError("the family parameter must be a unit")
    t = spec.t
    tq = ring.qpow(t, 1)
    denom_inv = ring.inv((t - zs) * (tq - zs))
    lead = (t - zs_conj) * ring.inv(t - zs)
    a_inv = ring.inv(a)
    a_pow_inv = ring.inv(a ** (q + 1))
    tr_r = ring.coerce(spec.tr_f)
    zs_norm = zs * zs_conj  # zeta*^(q+1) = zeta^(q+1) either way
    phi_x = SkewPoly(ring, [
        spec.iota_x,
        (tq + t - tr_r) * denom_inv * a_inv,
        lead * a_pow_inv,
    ])
    phi_y = SkewPoly(ring, [
        spec.iota_y,
        (t * tq - zs_norm) * denom_inv * a_inv,
        zs * lead * a_pow_inv,
    ])
    return DrinfeldModule(spec, phi_x, phi_y, 1, kind="psi_family",
                          params={"zeta_star": flag, "a": a})


def standard(spec: AFieldSpec) -> DrinfeldModule:
    """The standard rank-one model: phi_x = T^(sigma-1) tau^2 +
    (T^sigma + T^(q-1+sigma)) tau + iota(x), and its y-counterpart."""
    ring = spec.ring
    T, Ts = spec.T, spec.Tsigma
    t = spec.t
    T_inv = ring.inv(T)
    lead = Ts * T_inv                      # T^(sigma - 1)
    tq_part = ring.qpow(T, 1) * T_inv * Ts  # T^(q - 1 + sigma)
    phi_x = SkewPoly(ring, [spec.iota_x, Ts + tq_part, lead])
    phi_y = SkewPoly(ring, [spec.iota_y, t * Ts + spec.zeta * tq_part, spec.zeta * lead])
    return DrinfeldModule(spec, phi_x, phi_y, 1, kind="standard")


def standard_sigma(spec: AFieldSpec) -> DrinfeldModule:
    """The conjugate standard model: phi_x = T^(1-sigma) tau^2 +
    (T + T^((q-1)sigma + 1)) tau + iota(x), and its y-counterpart."""
    ring = spec.ring
    T, Ts = spec.T, spec.Tsigma
    t = spec.t
    Ts_inv = ring.inv(Ts)
    lead = T * Ts_inv                           # T^(1 - sigma)
    tq_part = ring.qpow(Ts, 1) * Ts_inv * T     # T^((q-1)sigma + 1)
    phi_x = SkewPoly(ring, [spec.iota_x, T + tq_part, lead])
    phi_y = SkewPoly(ring, [spec.iota_y, t * T + spec.zeta_q * tq_part, spec.zeta_q * lead])
    return DrinfeldModule(spec, phi_x, phi_y, 1, kind="standard_sigma")


def standard_isogeny(q: int) -> SkewPoly:
    """ell * (tau + T) over the radical ring of ell_spec(q), where
    ell^(q-1) = Tsigma/T; conjugates the standard model into its
    sigma-counterpart.  Its derivative (constant term) ell*T is nonzero."""
    spec = ell_spec(q)
    ring = spec.ring
    ell = ring.root
    lam = SkewPoly(ring, [ell * spec.T, ell])
    if not lam.constant:
        raise RuntimeError("degenerate isogeny: vanishing derivative")  # pragma: no cover
    return lam


def isogeny_check(g: SkewPoly, m: DrinfeldModule, m2: DrinfeldModule) -> bool:
    """Whether g phi_a = phi'_a g for the generators a in {x, y} (sufficient,
    since they generate the coordinate ring)."""
    if g.ring is not m.ring or m.ring is not m2.ring:
        raise ValueError("isogeny and modules must share one coefficient ring")
    return (g * m.phi_x == m2.phi_x * g) and (g * m.phi_y == m2.phi_y * g)


def verify_motive_rank1(m: DrinfeldModule, a, b, c) -> bool:
    """Whether -c + a phi_y - b phi_x = tau as twisted polynomials."""
    ring = m.ring
    expr = a * m.phi_y - b * m.phi_x - SkewPoly(ring, [c])
    return expr == SkewPoly(ring, [ring.zero(), ring.one()])


# ---------------------------------------------------------------------------
# rank-two constructors
# ---------------------------------------------------------------------------


def _check_nu(spec: AFieldSpec, nu):
    ring = spec.ring
    want = -(spec.Tsigma * ring.qpow(spec.T, 1))
    if nu ** (spec.q + 1) != want:
        raise ValueError("relation violated: nu^(q+1) must equal -(Tsigma * T^q)")


def rank2_lambda_nu(spec: AFieldSpec, lam, nu) -> DrinfeldModule:
    """The rank-two family in (lambda, nu) coordinates, built from its
    factored form:

      phi_x = (tau^2 + atilde tau + iota(x)/delta) (tau^2 + alpha tau + delta)
      phi_y = zeta^q (tau^2 + btilde tau + iota(y)/(zeta^q delta)) (tau^2 + alpha tau + delta)

    with delta = nu lambda^(q-1), and the displayed atilde, btilde, alpha.
    """
    ring = spec.ring
    q = spec.q
    _check_nu(spec, nu)
    if not ring.is_unit(lam):
        raise ValueError("lambda must be a unit")
    z, zq = spec.zeta, spec.zeta_q
    T, Ts = spec.T, spec.Tsigma
    lam_q = ring.qpow(lam, 1)
    lam_q2 = ring.qpow(lam, 2)
    delta = nu * lam_q * ring.inv(lam)      # nu * lambda^(q-1)
    # T^(sigma q - (q + sigma)) = Tsigma^q / (T^q * Tsigma)
    t_mix = ring.qpow(Ts, 1) * ring.inv(ring.qpow(T, 1) * Ts)
    z_mi_zq = ring.inv(z - zq)
    shared = -(nu * t_mix * ring.inv(z * lam_q2))
    atilde = shared + zq * lam * z_mi_zq
    btilde = shared + z * lam * z_mi_zq
    one_m = ring.inv(spec.one - z * ring.inv(zq))   # 1/(1 - zeta^(1-q))
    alpha = lam_q2 * one_m + nu * ring.inv(z * T * lam)
    right = SkewPoly(ring, [delta, alpha, ring.one()])
    left_x = SkewPoly(ring, [spec.iota_x * ring.inv(delta), atilde, ring.one()])
    left_y = SkewPoly(ring, [spec.iota_y * ring.inv(zq * delta), btilde, ring.one()])
    phi_x = left_x * right
    phi_y = zq * (left_y * right)
    return DrinfeldModule(spec, phi_x, phi_y, 2, kind="rank2_lambda_nu",
                          params={"lam": lam, "nu": nu, "delta": delta,
                                  "alpha": alpha, "atilde": atilde, "btilde": btilde})


def expanded_rank2_x(spec: AFieldSpec, lam, nu) -> SkewPoly:
    """The expanded tau-coefficients of the rank-two phi_x, used as an
    independent cross-check of the factored construction:

      tau^4 + [lam^(q^4)/(1-zeta^(1-q)) + zeta^(q-1) lam/(1-zeta^(q-1))] tau^3 + ...
    """
    ring = spec.ring
    z, zq = spec.zeta, spec.zeta_q
    T, Ts = spec.T, spec.Tsigma
    inv = ring.inv
    qp = ring.qpow
    one = spec.one
    z1mq = z * inv(zq)            # zeta^(1-q)
    zqm1 = zq * inv(z)            # zeta^(q-1)
    c_a = inv(one - z1mq)         # 1/(1 - zeta^(1-q))
    c_b = inv(one - zqm1)         # 1/(1 - zeta^(q-1))
    zq_mi_z = inv(zq - z)
    # T^(q(q-1)(1-sigma) - sigma) = T^(q^2-q) * Tsigma^(-(q^2-q+1)); this single
    # power absorbs the delta^(q^2) contribution via (T/Tsigma)^(q^2) = 1 + (zeta^q-zeta)T^(q^2)
    t_big = (qp(T, 2) * inv(qp(T, 1))
             * qp(Ts, 1) * inv(qp(Ts, 2) * Ts))
    t_sq = qp(Ts, 1) * inv(qp(T, 1))             # T^(sigma q - q)
    z_norm = z * zq                               # zeta^(q+1)
    lam_q = qp(lam, 1)
    lam_q2 = qp(lam, 2)
    lam_q3 = qp(lam, 3)
    lam_q4 = qp(lam, 4)
    c3 = lam_q4 * c_a + zqm1 * lam * c_b
    # the T lam^(1-q) term carries a plus sign: it is the telescoped sum
    # Tsigma/(zeta^q-zeta) + x = T/(zeta^q-zeta), divided by nu lam^(q-1)
    c2 = (nu * t_big * lam_q3 * inv(lam_q2) * zq_mi_z
          + T * lam * inv(lam_q) * zq_mi_z * inv(nu)
          + t_sq * inv(z_norm * lam_q2 * lam_q)
          + zqm1 * lam_q3 * lam * c_b * c_b)
    c1 = ((qp(Ts, 1) + Ts) * inv(z * lam_q)
          + (Ts * qp(T, 1) + spec.iota_x) * lam_q2 * inv(lam_q) * lam * c_a * inv(nu))
    return SkewPoly(ring, [spec.iota_x, c1, c2, c3, ring.one()])


def rank2_J(spec: AFieldSpec, nu, J=None) -> DrinfeldModule:
    """The rank-two family in its single-invariant form: every coefficient is
    polynomial in J (J symbolic by default over a symbolic ring)."""
    ring = spec.ring
    q = spec.q
    _check_nu(spec, nu)
    if J is None:
        if not isinstance(ring, SymbolicRing):
            raise ValueError("J defaults to the symbolic variable only over a symbolic ring")
        J = ring.var
    if not ring.is_unit(J):
        raise ValueError("J must be a unit")
    z, zq = spec.zeta, spec.zeta_q
    T, Ts = spec.T, spec.Tsigma
    inv = ring.inv
    qp = ring.qpow
    one = spec.one
    z1mq = z * inv(zq)
    zqm1 = zq * inv(z)
    c_a = inv(one - z1mq)
    c_b = inv(one - zqm1)
    zq_mi_z = inv(zq - z)
    z_norm_inv = inv(z * zq)
    J_q = qp(J, 1)
    J_q2q = qp(J, 2) * J_q       # J^(q^2 + q)
    J_q1 = J_q * J               # J^(q + 1)
    # T^(q(q-1)(1-sigma) - sigma) = T^(q^2-q) * Tsigma^(-(q^2-q+1))
    t_big = (qp(T, 2) * inv(qp(T, 1))
             * qp(Ts, 1) * inv(qp(Ts, 2) * Ts))
    t_sq = qp(Ts, 1) * inv(qp(T, 1))             # T^(sigma q - q)
    T_s_plus_q = Ts * qp(T, 1)                    # T^(sigma + q)
    mid = (nu * t_big * J_q * zq_mi_z
           + T * J * zq_mi_z * inv(nu)
           + t_sq * z_norm_inv)
    x3 = (J_q2q - J_q1) * c_a
    x2 = zqm1 * J_q1 * c_b * c_b + mid
    x1 = (qp(Ts, 1) + Ts) * inv(z) + (T_s_plus_q + spec.iota_x) * J * c_a * inv(nu)
    phi_x = SkewPoly(ring, [spec.iota_x, x1, x2, x3, J_q2q])
    y3 = zq * (J_q2q - z1mq * J_q1) * c_a
    y2 = zq * (J_q1 * c_b * c_b + mid)
    y1 = zq * ((zq * qp(Ts, 1) + spec.t * Ts) * z_norm_inv
               + (z * T_s_plus_q + spec.iota_y) * J * zq_mi_z * inv(nu))
    phi_y = SkewPoly(ring, [spec.iota_y, y1, y2, y3, zq * J_q2q])
    return DrinfeldModule(spec, phi_x, phi_y, 2, kind="rank2_J",
                          params={"J": J, "nu": nu})


def wedge(m: DrinfeldModule) -> DrinfeldModule:
    """The exterior square of a rank-two module from this library's families:
    a rank-one module whose annihilators receive the pairing values."""
    spec, ring = m.spec, m.ring
    q = spec.q
    if m.kind == "rank2_J":
        J, nu = m.params["J"], m.params["nu"]
        J_q1 = ring.qpow(J, 1) * J
        nu_inv = ring.inv(nu)
        T_s_plus_q = spec.Tsigma * ring.qpow(spec.T, 1)
        psi_x = SkewPoly(ring, [
            spec.iota_x,
            -((spec.iota_x + T_s_plus_q) * nu_inv) * J,
            -J_q1,
        ])
        psi_y = SkewPoly(ring, [
            spec.iota_y,
            -((spec.iota_y + spec.zeta * T_s_plus_q) * nu_inv) * J,
            -(spec.zeta * J_q1),
        ])
        return DrinfeldModule(spec, psi_x, psi_y, 1, kind="wedge_J",
                              params=dict(m.params))
    if m.kind in ("rank2_lambda_nu", "example_q2"):
        lam, nu = m.params["lam"], m.params["nu"]
        delta = m.params["delta"]
        lam_fac = lam * ring.inv(ring.qpow(lam, 2))   # lambda^(1 - q^2)
        dq_t = ring.qpow(delta, 1) * spec.T * ring.inv(ring.qpow(spec.T, 1))
        right = SkewPoly(ring, [-delta, ring.one()])
        left_x = SkewPoly(ring, [-dq_t, ring.one()])
        left_y = SkewPoly(ring, [-(spec.t * dq_t * ring.inv(spec.zeta)), ring.one()])
        psi_x = (-lam_fac) * (left_x * right)
        psi_y = (-(spec.zeta * lam_fac)) * (left_y * right)
        return DrinfeldModule(spec, psi_x, psi_y, 1, kind="wedge_lambda_nu",
                              params=dict(m.params))
    raise ValueError(f"no exterior-square formula for kind {m.kind!r}")


def verify_rank2_relation(m: DrinfeldModule, A, B, C, alpha, delta) -> bool:
    """Whether (tau + A) phi_y - (zeta tau + B) phi_x = C (tau^2 + alpha tau + delta)."""
    ring = m.ring
    lhs = (SkewPoly(ring, [A, ring.one()]) * m.phi_y
           - SkewPoly(ring, [B, m.spec.zeta]) * m.phi_x)
    rhs = C * SkewPoly(ring, [delta, alpha, ring.one()])
    return lhs == rhs


def rank2_relation_constants(m: DrinfeldModule):
    """The displayed (A, B, C, alpha, delta) for a rank2_lambda_nu module:
    A = zeta lambda^q/(zeta - zeta^q), B = zeta A,
    C = T lambda/((1 - zeta^(q-1)) nu)."""
    if "lam" not in m.params or "nu" not in m.params:
        raise ValueError("constants are displayed only for the (lambda, nu) family")
    spec, ring = m.spec, m.ring
    lam, nu = m.params["lam"], m.params["nu"]
    z, zq = spec.zeta, spec.zeta_q
    A = z * ring.qpow(lam, 1) * ring.inv(z - zq)
    B = z * A
    C = spec.T * lam * ring.inv((spec.one - zq * ring.inv(z)) * nu)
    return A, B, C, m.params["alpha"], m.params["delta"]


def j_invariant(spec: AFieldSpec, lam):
    """J = lambda^(q^2 + 1)."""
    return spec.ring.qpow(lam, 2) * lam


def is_isomorphic(spec: AFieldSpec, pair, pair2) -> bool:
    """Whether (lambda, nu) and (lambda', nu') give isomorphic rank-two
    modules: lambda^(q^3+q^2+q+1) and nu/lambda^(q^2+1) must both agree."""
    ring = spec.ring
    lam, nu = pair
    lam2, nu2 = pair2

    def big(l):
        return ring.qpow(l, 3) * ring.qpow(l, 2) * ring.qpow(l, 1) * l

    if big(lam) != big(lam2):
        return False
    return nu * ring.inv(j_invariant(spec, lam)) == nu2 * ring.inv(j_invariant(spec, lam2))


# ---------------------------------------------------------------------------
# finite rank-two specialization
# ---------------------------------------------------------------------------


def finite_rank2(q: int, m: int, theta, w=1, cap: int = 6):
    """A concrete rank-two module over a finite structure map, plus its
    exterior square and a data dictionary.

    nu is found as the designated (q+1)-th root of -(Tsigma T^q) in the
    smallest extension F_{q^(m s)}, s <= cap; J defaults to w * nu for a
    scalar w from F_{q^m}*.  If every coefficient of the J-family lies in
    F_{q^m} the returned modules are compressed down to it, which is what
    makes exhaustive torsion work practical.
    """
    if m % 2 != 0:
        raise ValueError("finite rank-two specialization needs an even extension degree")
    spec0 = FiniteSpec(q, m, theta)
    K = spec0.K
    c = -(spec0.Tsigma * spec0.ring.qpow(spec0.T, 1))
    dom = get_domain(q)
    nu = None
    for s in range(1, cap + 1):
        Ls = make_field(dom.p, K.degree * s)
        cs = embed(c, Ls) if Ls is not K else c
        roots = [r for r in nth_roots(cs, q + 1) if r]
        if roots:
            nu = roots[0]
            break
    if nu is None:
        raise ValueError(f"no (q+1)-th root of -(Tsigma T^q) within extension cap {cap}")
    theta_s = embed(spec0.theta, Ls) if Ls is not K else spec0.theta
    spec_s = FiniteSpec(q, m * s, theta_s)
    if isinstance(w, int):
        w = K(w)
    J = embed(w, Ls) * nu if Ls is not K else w * nu
    if not J:
        raise ValueError("J must be a unit")
    mJ = rank2_J(spec_s, spec_s.ring.coerce(nu), spec_s.ring.coerce(J))
    wJ = wedge(mJ)
    info = {"s": s, "nu": nu, "J": J, "compressed": False}

    def try_compress(f: SkewPoly):
        out = []
        for cc in f.coeffs:
            out.append(unembed(cc, K))
        return out

    try:
        coeffs = [try_compress(g) for g in (mJ.phi_x, mJ.phi_y, wJ.phi_x, wJ.phi_y)]
    except ValueError:
        return mJ, wJ, info
    ring0 = spec0.ring
    # J and nu themselves live in the larger field even when every module
    # coefficient compresses, so they are kept uncompressed in params.
    mJ0 = DrinfeldModule(spec0, SkewPoly(ring0, coeffs[0]), SkewPoly(ring0, coeffs[1]),
                         2, kind="rank2_J",
                         params={"J": J, "nu": nu})
    wJ0 = DrinfeldModule(spec0, SkewPoly(ring0, coeffs[2]), SkewPoly(ring0, coeffs[3]),
                         1, kind="wedge_J", params=dict(mJ0.params))
    info["compressed"] = True
    return mJ0, wJ0, info


# ---------------------------------------------------------------------------
# the worked q = 2 example
# ---------------------------------------------------------------------------


def example_q2() -> dict:
    """The worked special module at q = 2 over F_4(s) with t = s^2.

    Both generators are squares of the corresponding s-line rank-one images:
    phi_x = psi_a^2 for psi the s-line Hayes module of the designated root u
    with u^3 = 1/((s + zeta)(s + zeta^2)^2).  The report records the exact
    identities satisfied by the extracted (lambda, nu, J).
    """
    F4 = make_field(2, 2)
    z = F4.gen
    Hs = FuncField(F4, 2, var="s")
    s = Hs.t
    c = ((s - Hs.coerce(z)) * (s - Hs.coerce(z * z)) ** 2).inverse()
    ring = radical_extend(Hs, 3, c, "u")
    spec_s = GenericSpec(ring, t_elem=ring.coerce(s))
    spec_t = GenericSpec(ring, t_elem=ring.coerce(s * s))
    u = ring.root
    psi = hayes(spec_s, u)
    phi_x = psi.phi_x * psi.phi_x
    phi_y = psi.phi_y * psi.phi_y
    checks: dict[str, bool] = {}
    # extract the factored data: right factor is psi_x itself
    alpha = psi.phi_x.coeff(1)
    delta = psi.phi_x.constant
    quot, rem = right_divmod(phi_y, psi.phi_x)
    checks["y_image_right_divisible"] = not rem
    zq_inv = ring.inv(spec_t.zeta_q)
    phi_tilde = zq_inv * quot
    btilde = phi_tilde.coeff(1)
    atilde = alpha
    lam = btilde - atilde
    nu = delta * lam * ring.inv(ring.qpow(lam, 1))   # delta / lambda^(q-1)
    sqrt_t = ring.coerce(s)
    checks["lambda_closed_form"] = lam == spec_t.zeta * ring.inv(u * (sqrt_t - spec_t.zeta_q))
    checks["nu_closed_form"] = nu == u * ring.inv(spec_t.zeta * (sqrt_t - spec_t.zeta))
    checks["nu_relation"] = nu ** 3 == -(spec_t.Tsigma * ring.qpow(spec_t.T, 1))
    checks["delta_is_sqrt_x"] = delta == spec_s.iota_x
    mod = DrinfeldModule(spec_t, phi_x, phi_y, 2, kind="example_q2",
                         params={"lam": lam, "nu": nu, "delta": delta,
                                 "alpha": alpha, "atilde": atilde, "btilde": btilde})
    checks["module_valid"] = mod.validate()["ok"]
    dom = get_domain(2)
    from .domain import SpecialIdeal
    ann_inf = annihilator(mod, SpecialIdeal(dom, "infinity"))
    checks["annihilator_at_infinity_is_sqrt_module"] = ann_inf == psi.phi_x
    checks["family_reproduces_module"] = rank2_lambda_nu(spec_t, lam, nu) == mod
    J = j_invariant(spec_t, lam)
    checks["J_is_lambda_fifth"] = J == lam ** 5
    checks["J_closed_form"] = J == nu * (sqrt_t - spec_t.zeta) ** 3 * ring.inv(sqrt_t - spec_t.zeta_q)
    # conjugating by ell with ell^(q-1) = lambda^q carries phi to the J-family
    ell = ring.qpow(lam, 1)
    mJ = rank2_J(spec_t, nu, J)

    def conjugate(f: SkewPoly) -> SkewPoly:
        out = []
        for i, cc in enumerate(f.coeffs):
            out.append(cc * ring.qpow(ell, i) * ring.inv(ell) if i else cc)
        return SkewPoly(ring, out)

    checks["J_family_matches_conjugation"] = (
        mJ.phi_x == conjugate(phi_x) and mJ.phi_y == conjugate(phi_y)
    )
    checks["wedge_valid"] = wedge(mod).validate()["ok"]
    return {
        "ok": all(checks.values()),
        "checks": checks,
        "data": {
            "lambda": repr(lam),
            "nu": repr(nu),
            "J": repr(J),
            "module": mod.to_json(),
        },
        "_module": mod,
        "_spec": spec_t,
    }

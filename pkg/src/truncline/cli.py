"""Command-line interface: exact constructions, named verification suites,
exhaustive pairing reports, and period expansions, with reproducible JSON
output.

Every subcommand prints one JSON document (or an equivalent indented text
rendering) assembled from the exact serializations of the library types.
Identical configuration and seed always produce byte-identical output: all
randomness flows through one seeded generator that is echoed back in the
``config`` block.  Exit codes: 0 on success, 1 when a requested check fails,
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .analytic import LinearizedSeries, get_tower
from .domain import PrincipalIdeal, SpecialIdeal, get_domain, rr_basis, to_ratfunc
from .drinfeld import (
    DrinfeldModule,
    ell_spec,
    example_q2,
    finite_rank2,
    h_spec,
    isogeny_check,
    phi_of,
    psi_family,
    rank2_J,
    rank2_lambda_nu,
    rank2_relation_constants,
    standard,
    standard_isogeny,
    standard_sigma,
    symbolic_J_spec,
    symbolic_lambda_spec,
    valid_thetas,
    validate,
    verify_rank2_relation,
    wedge,
)
from .skew import SkewPoly, right_gcd
from .weil import (
    QuotientBasis,
    dual_v,
    dual_w,
    property_suite,
    rank2_operator,
    residue_pairing,
    weil_operator_construction,
)

SUITES = ("rank1", "rank2", "analytic", "weil", "all")


class ConfigError(Exception):
    """An invalid run configuration; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _render_text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key in sorted(value, key=str):
            sub = value[key]
            if isinstance(sub, (dict, list)) and sub:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(sub, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(sub, sort_keys=True)}")
        return lines
    if isinstance(value, list):
        lines = []
        for sub in value:
            if isinstance(sub, (dict, list)) and sub:
                lines.append(f"{pad}-")
                lines.extend(_render_text(sub, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(sub, sort_keys=True)}")
        return lines
    return [f"{pad}{json.dumps(value, sort_keys=True)}"]


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(_render_text(payload)))


# ---------------------------------------------------------------------------
# configuration parsing
# ---------------------------------------------------------------------------


def _get_domain(q: int):
    try:
        return get_domain(q)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"invalid field size {q}: {exc}") from exc


def _parse_theta(q: int, ext: int, selector: str):
    """Resolve a --theta selector: either an index into the deterministic
    enumeration of valid structure constants, or ``code:N`` for a raw field
    element (which must avoid the distinguished quadratic's roots)."""
    dom = _get_domain(q)
    if ext < 1:
        raise ConfigError("--ext must be a positive extension degree")
    if selector.startswith("code:"):
        try:
            code = int(selector[5:])
        except ValueError as exc:
            raise ConfigError(f"bad raw theta code {selector!r}") from exc
        from .ffield import make_field

        K = make_field(dom.p, dom.Fq.degree * ext)
        if not 0 <= code < dom.p ** K.degree:
            raise ConfigError(f"theta code {code} outside the field of {dom.p ** K.degree} elements")
        return K.from_code(code)
    try:
        index = int(selector)
    except ValueError as exc:
        raise ConfigError(f"--theta expects an index or code:N, got {selector!r}") from exc
    thetas = valid_thetas(q, ext)
    if not 0 <= index < len(thetas):
        raise ConfigError(f"theta index {index} out of range (0..{len(thetas) - 1})")
    return thetas[index]


def _parse_ideal(dom, text: str):
    """Parse an --ideal specifier: the shorthands x / y / zero / infinity, or
    the coefficient scheme ``alpha=a0,..;beta=b0,..;alphad=c``."""
    short = text.strip().lower()
    if short == "x":
        return PrincipalIdeal.from_elem(dom.x)
    if short == "y":
        return PrincipalIdeal.from_elem(dom.y)
    if short in ("zero", "infinity"):
        return SpecialIdeal(dom, short)
    fields: dict[str, str] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"bad ideal component {part!r}")
        key, _, val = part.partition("=")
        fields[key.strip().lower()] = val.strip()
    try:
        alpha = [int(c) for c in fields.get("alpha", "").split(",") if c.strip() != ""]
        beta = [int(c) for c in fields.get("beta", "").split(",") if c.strip() != ""]
        alpha_d = int(fields.get("alphad", "0"))
    except ValueError as exc:
        raise ConfigError(f"bad ideal coefficients in {text!r}") from exc
    unknown = set(fields) - {"alpha", "beta", "alphad"}
    if unknown:
        raise ConfigError(f"unknown ideal fields {sorted(unknown)}")
    try:
        return PrincipalIdeal(dom, alpha, beta, alpha_d)
    except ValueError as exc:
        raise ConfigError(f"bad ideal {text!r}: {exc}") from exc


def _parse_w_scalar(value: str):
    if value == "symbolic":
        raise ConfigError("a finite specialization takes an integer code for --J, not 'symbolic'")
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"--J expects 'symbolic' or an integer code, got {value!r}") from exc


def _finite_pair(q: int, ext: int, theta, w):
    try:
        return finite_rank2(q, ext, theta, w=w)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _display(m: DrinfeldModule) -> dict[str, str]:
    return {"phi_x": repr(m.phi_x), "phi_y": repr(m.phi_y)}


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _tampered(m: DrinfeldModule) -> DrinfeldModule:
    """The same module with one coefficient bumped: the debug fault handle."""
    coeffs = list(m.phi_x.coeffs)
    coeffs[1] = coeffs[1] + m.ring.one()
    return DrinfeldModule(m.spec, SkewPoly(m.ring, coeffs), m.phi_y, m.rank,
                          kind="tampered", params=dict(m.params))


def _suite_rank1(q: int, tamper: bool = False):
    spec = h_spec(q)
    cases: dict[str, bool] = {}
    failures: dict[str, list[str]] = {}
    m = standard(spec)
    if tamper:
        m = _tampered(m)
    report = validate(m)
    cases["standard_validate"] = report["ok"]
    if not report["ok"]:
        failures["standard_validate"] = report["failures"]
    report = validate(standard_sigma(spec))
    cases["conjugate_validate"] = report["ok"]
    if not report["ok"]:
        failures["conjugate_validate"] = report["failures"]
    cases["family_matches_standard"] = psi_family(spec, "zeta", spec.one) == standard(spec)
    cases["conjugate_family_matches"] = (
        psi_family(spec, "zeta_q", spec.one) == standard_sigma(spec))
    fresh = standard(spec)
    cases["common_right_divisor"] = (
        right_gcd(fresh.phi_x, fresh.phi_y) == SkewPoly(spec.ring, [spec.T, spec.ring.one()]))
    espec = ell_spec(q)
    cases["isogeny_intertwines"] = isogeny_check(
        standard_isogeny(q), standard(espec), standard_sigma(espec))
    return cases, failures


def _suite_rank2(q: int, tamper: bool = False):
    cases: dict[str, bool] = {}
    failures: dict[str, list[str]] = {}
    spec, nu, J = symbolic_J_spec(q)
    m = rank2_J(spec, nu, J)
    if tamper:
        m = _tampered(m)
    report = validate(m)
    cases["symbolic_family_validate"] = report["ok"]
    if not report["ok"]:
        failures["symbolic_family_validate"] = report["failures"]
    report = validate(wedge(rank2_J(spec, nu, J)))
    cases["wedge_validate"] = report["ok"]
    if not report["ok"]:
        failures["wedge_validate"] = report["failures"]
    lspec, lam, lnu = symbolic_lambda_spec(q)
    m2 = rank2_lambda_nu(lspec, lam, lnu)
    a, b, c, alpha, delta = rank2_relation_constants(m2)
    cases["motive_relation"] = verify_rank2_relation(m2, a, b, c, alpha, delta)
    theta = valid_thetas(q, 2)[0]
    mj, wj, _info = finite_rank2(q, 2, theta)
    cases["finite_specialization_validate"] = (
        validate(mj)["ok"] and validate(wj)["ok"])
    return cases, failures


def _suite_analytic(q: int, trunc: int):
    tower = get_tower(q)
    dom = get_domain(q)
    cases: dict[str, bool] = {}
    jmax = 4 if q == 2 else 3
    cases["product_formula"] = all(
        tower.L(j) == tower.closed_form_L(j) for j in range(1, jmax + 1))
    exp = tower.exp_trunc(trunc)
    log = tower.log_trunc(trunc)
    both = log.compose(exp)
    cases["log_exp_identity"] = (
        both.coeff(0) == tower.H.one()
        and not any(both.coeff(j) for j in range(1, trunc)))
    ok = True
    for a in (dom.x, dom.y):
        coeffs = tower.image_coeffs(a)
        series = LinearizedSeries(tower.H, coeffs, trunc)
        ok = ok and series.compose(exp) == exp.scale_input(coeffs[0])
    cases["exp_intertwines"] = ok
    m1 = standard(h_spec(q))
    ok = True
    for a in rr_basis(dom, 2):
        image = phi_of(m1, a)
        ok = ok and all(
            tower.binom(a, j) == image.coeff(j) for j in range(image.deg + 1))
    cases["torsion_coefficients"] = ok
    cases["kernel_polynomial"] = tower.E_k(1) == tower.brute_E_k(1)
    dmax = 3 if q == 2 else 2
    cases["period_closed_forms"] = all(
        tower.alpha(d) == tower.alpha_closed(d) and tower.beta(d) == tower.beta_closed(d)
        for d in range(1, dmax + 1))
    cases["period_valuation"] = all(
        tower.xi_pow(d, 25).valuation == -1 for d in (1, 2))
    return cases, {}


def _draw_ideal(dom, rng: random.Random, version: str) -> PrincipalIdeal:
    q = dom.q
    while True:
        d = rng.randrange(1, 4)
        alpha = [rng.randrange(q) for _ in range(d)]
        beta = [rng.randrange(q) for _ in range(d)]
        alpha_d = rng.randrange(q)
        if version == "w" and not alpha[0]:
            continue
        if version == "v" and not beta[0]:
            continue
        try:
            return PrincipalIdeal(dom, alpha, beta, alpha_d)
        except ValueError:
            continue


def _identity_matrix(dom, ideal: PrincipalIdeal, version: str) -> bool:
    basis = QuotientBasis(ideal, version)
    duals = dual_w(ideal) if version == "w" else dual_v(ideal)
    inv_gen = to_ratfunc(ideal.elem).inverse()
    one, zero = dom.Fq(1), dom.Fq(0)
    for i, (a, b) in enumerate(basis.monomials):
        elem = dom.monomial(a, bool(b))
        for j, mono in enumerate(basis.monomials):
            want = one if i == j else zero
            if residue_pairing(elem, to_ratfunc(duals[mono]) * inv_gen) != want:
                return False
    return True


def _suite_weil(q: int, seed: int):
    dom = get_domain(q)
    rng = random.Random(seed)
    cases: dict[str, bool] = {}
    one = dom.Fq(1)
    cases["residue_normalization"] = (
        residue_pairing(dom.one, dom.H.t) == one
        and residue_pairing(dom.one, dom.H.t.inverse()) == one
        and not residue_pairing(dom.one, dom.H.one()))
    cases["duality_w"] = all(
        _identity_matrix(dom, _draw_ideal(dom, rng, "w"), "w") for _ in range(4))
    cases["duality_v"] = all(
        _identity_matrix(dom, _draw_ideal(dom, rng, "v"), "v") for _ in range(4))
    ok = True
    for _ in range(4):
        ideal = _draw_ideal(dom, rng, "w" if rng.randrange(2) else "v")
        ok = ok and rank2_operator(ideal) == weil_operator_construction(ideal, 2)
    cases["operator_agreement"] = ok
    if q == 2:
        # index 1 is the smallest structure constant with iota(y) != 0, which
        # keeps the action of (y) separable so both kernels exist
        mj, wj, _info = finite_rank2(2, 2, valid_thetas(2, 2)[1])
        ok = True
        for gen in (dom.x, dom.y):
            report = property_suite(mj, PrincipalIdeal.from_elem(gen), psi=wj,
                                    include_table=False)
            ok = ok and all(
                flag for flag in report["properties"].values() if flag is not None)
        cases["kernel_properties"] = ok
    return cases, {}


def _run_suites(q: int, suite: str, trunc: int, seed: int, tamper: bool):
    if tamper and suite in ("analytic", "weil"):
        raise ConfigError(
            "the debug fault targets module validation; pick suite rank1, rank2, or all")
    runners = {
        "rank1": lambda: _suite_rank1(q, tamper),
        "rank2": lambda: _suite_rank2(q, tamper),
        "analytic": lambda: _suite_analytic(q, trunc),
        "weil": lambda: _suite_weil(q, seed),
    }
    if suite != "all":
        return runners[suite]()
    cases: dict[str, bool] = {}
    failures: dict[str, list[str]] = {}
    for name in ("rank1", "rank2", "analytic", "weil"):
        sub_cases, sub_failures = runners[name]()
        for key, val in sub_cases.items():
            cases[f"{name}.{key}"] = val
        for key, val in sub_failures.items():
            failures[f"{name}.{key}"] = val
    return cases, failures


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_emit_module(args) -> int:
    q = args.q
    _get_domain(q)
    config = {"q": q, "ext": args.ext, "theta": args.theta, "J": args.J}
    if args.theta is not None:
        ext = args.ext if args.ext is not None else 2
        config["ext"] = ext
        theta = _parse_theta(q, ext, args.theta)
        w = _parse_w_scalar(args.J) if args.J is not None else 1
        mj, wj, info = _finite_pair(q, ext, theta, w)
        payload = {
            "command": "emit-module",
            "config": config,
            "module": mj.to_json(),
            "wedge": wj.to_json(),
            "display": {"module": _display(mj), "wedge": _display(wj)},
            "params": {
                "s": info["s"],
                "nu": info["nu"].to_json(),
                "J": info["J"].to_json(),
                "compressed": info["compressed"],
            },
            "ok": True,
        }
    elif args.J == "symbolic":
        spec, nu, J = symbolic_J_spec(q)
        m = rank2_J(spec, nu, J)
        w = wedge(m)
        payload = {
            "command": "emit-module",
            "config": config,
            "module": m.to_json(),
            "wedge": w.to_json(),
            "display": {"module": _display(m), "wedge": _display(w)},
            "ok": True,
        }
    elif args.J is not None:
        raise ConfigError("--J needs --theta for a finite specialization, or the value 'symbolic'")
    else:
        m = standard(h_spec(q))
        payload = {
            "command": "emit-module",
            "config": config,
            "module": m.to_json(),
            "display": {"module": _display(m)},
            "ok": True,
        }
    _emit(payload, args.format)
    return 0


def _cmd_verify(args) -> int:
    q = args.q
    _get_domain(q)
    trunc = args.trunc if args.trunc is not None else (5 if q == 2 else 4)
    if trunc < 2:
        raise ConfigError("--trunc must be at least 2")
    cases, failures = _run_suites(q, args.suite, trunc, args.seed, args.tamper)
    ok = all(cases.values())
    payload = {
        "command": "verify",
        "config": {"q": q, "suite": args.suite, "trunc": trunc,
                   "seed": args.seed, "tamper": args.tamper},
        "cases": cases,
        "ok": ok,
    }
    if failures:
        payload["failures"] = failures
    _emit(payload, args.format)
    return 0 if ok else 1


def _cmd_pairing(args) -> int:
    q = args.q
    dom = _get_domain(q)
    ext = args.ext
    theta = _parse_theta(q, ext, args.theta)
    w = _parse_w_scalar(args.J) if args.J is not None else 1
    mj, wj, info = _finite_pair(q, ext, theta, w)
    ideal = _parse_ideal(dom, args.ideal)
    try:
        report = property_suite(mj, ideal, psi=wj)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ok = all(flag for flag in report["properties"].values() if flag is not None)
    payload = {
        "command": "pairing",
        "config": {"q": q, "ext": ext, "theta": args.theta,
                   "J": args.J, "ideal": args.ideal},
        "module": mj.to_json(),
        "display": {"module": _display(mj)},
        "report": report,
        "ok": ok,
    }
    _emit(payload, args.format)
    return 0 if ok else 1


def _cmd_period(args) -> int:
    q = args.q
    _get_domain(q)
    if args.d < 1:
        raise ConfigError("--d must be at least 1")
    if args.trunc < 2:
        raise ConfigError("--trunc must be at least 2")
    tower = get_tower(q)
    approx = tower.xi_pow(args.d, args.trunc)
    lattice = tower.lattice_data(args.d, args.trunc)
    checks = {"valuation_minus_one": approx.valuation == -1}
    ok = all(checks.values())
    payload = {
        "command": "period",
        "config": {"q": q, "d": args.d, "trunc": args.trunc},
        "xi": approx.to_json(),
        "lattice": lattice,
        "checks": checks,
        "ok": ok,
    }
    _emit(payload, args.format)
    return 0 if ok else 1


def _cmd_example_q2(args) -> int:
    result = example_q2()
    payload = {
        "command": "example-q2",
        "config": {},
        "checks": result["checks"],
        "data": result["data"],
        "ok": result["ok"],
    }
    _emit(payload, args.format)
    return 0 if result["ok"] else 1


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------


def _add_format(sub) -> None:
    sub.add_argument("--format", choices=("json", "text"), default="json",
                     help="output rendering (default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncline",
        description=__doc__.splitlines()[0],
    )
    subs = parser.add_subparsers(dest="command", required=True)

    emit = subs.add_parser(
        "emit-module",
        help="print the coefficients of a module (and its exterior square)")
    emit.add_argument("--q", type=int, required=True, help="base field size")
    emit.add_argument("--ext", type=int, default=None,
                      help="extension degree for finite specializations (default 2)")
    emit.add_argument("--theta", default=None,
                      help="structure constant: an index into the valid enumeration, or code:N")
    emit.add_argument("--J", default=None,
                      help="'symbolic' for the generic family, or an integer scalar code with --theta")
    _add_format(emit)
    emit.set_defaults(func=_cmd_emit_module)

    verify = subs.add_parser("verify", help="run a named exact verification suite")
    verify.add_argument("--q", type=int, required=True, help="base field size")
    verify.add_argument("--suite", choices=SUITES, required=True,
                        help="which identity suite to run")
    verify.add_argument("--trunc", type=int, default=None,
                        help="series truncation for the analytic suite")
    verify.add_argument("--seed", type=int, default=0,
                        help="seed for the randomized checks (echoed in the output)")
    verify.add_argument("--tamper", action="store_true",
                        help="debug fault: bump one module coefficient and report the broken identity")
    _add_format(verify)
    verify.set_defaults(func=_cmd_verify)

    pairing = subs.add_parser(
        "pairing",
        help="exhaustive pairing property report on one division kernel")
    pairing.add_argument("--q", type=int, required=True, help="base field size")
    pairing.add_argument("--ext", type=int, default=2,
                         help="extension degree of the structure field (default 2)")
    pairing.add_argument("--theta", default="0",
                         help="structure constant selector (default index 0)")
    pairing.add_argument("--J", default=None,
                         help="integer scalar code for the family parameter")
    pairing.add_argument("--ideal", required=True,
                         help="x, y, zero, infinity, or alpha=..;beta=..;alphad=..")
    _add_format(pairing)
    pairing.set_defaults(func=_cmd_pairing)

    period = subs.add_parser(
        "period", help="Laurent data for the period lattice generators")
    period.add_argument("--q", type=int, required=True, help="base field size")
    period.add_argument("--d", type=int, default=3, help="approximation stage (default 3)")
    period.add_argument("--trunc", type=int, default=40,
                        help="expansion window size (default 40)")
    _add_format(period)
    period.set_defaults(func=_cmd_period)

    example = subs.add_parser(
        "example-q2", help="the worked rank-two module over the square-root line")
    _add_format(example)
    example.set_defaults(func=_cmd_example_q2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

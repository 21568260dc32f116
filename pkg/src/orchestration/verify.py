"""Acceptance suites behind `copcalc verify <suite>`."""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from engines.blaschke import boundary_derivative_sums, construct_two_point
from engines.boundary import BoundaryProfile, phi_family, rotate_source, tangency_set
from engines.config import Settings
from engines.errors import CopcalcError, InternalConsistencyError
from engines.membership import (
    Condition,
    coset_decompose,
    linfrac_membership,
    make_context,
    necessity_check,
)
from engines.moebius import Mobius, compose, krein_adjoint, parabolic, projective_eq
from engines.numerics import composition_matrix, kernel_gram, lb1, lb3_limit_check, lb3_rhs, lbext, tail_norm
from engines.symbols import (
    AlgebraElement,
    ParabolicCombination,
    PowerSum,
    SymbolMatrix,
    Table2Row,
    essential_norm,
    essential_spectrum,
    gelfand,
    joint_essential_spectrum,
    lambda_auto,
    psi_of_element,
    psi_of_word,
    table2_symbol,
    word_to_element,
)

logger = logging.getLogger(__name__)

# φ = −(7z + 3)/(2z + 8): ζ = 1, η = −1, s = 2, b = 1/5, c = 1/10
RUNNING_PHI = Mobius(-7, -3, 2, 8)


@dataclass
class SuiteResult:
    suite: str
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: Any = "") -> None:
        self.checks.append((name, bool(ok), str(detail)))
        if not ok:
            logger.warning("verify %s: %s failed (%s)", self.suite, name, detail)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
        }


def _unit(rng: np.random.Generator) -> complex:
    return cmath.exp(1j * rng.uniform(0, 2 * math.pi))


def _right_half(rng: np.random.Generator, scale: float = 2.0) -> complex:
    return complex(rng.uniform(0.05, scale), rng.uniform(-scale, scale))


def suite_semigroup(settings: Settings, r: SuiteResult) -> None:
    rng = np.random.default_rng(settings.seed)
    semigroup = krein = True
    for _ in range(100):
        gamma, a, b = _unit(rng), _right_half(rng), _right_half(rng)
        semigroup &= projective_eq(compose(parabolic(gamma, a), parabolic(gamma, b)), parabolic(gamma, a + b), settings.tolerance)
        krein &= projective_eq(krein_adjoint(parabolic(gamma, a)), parabolic(gamma, a.conjugate()), settings.tolerance)
    r.check("rho_a∘rho_b = rho_(a+b)", semigroup)
    r.check("Krein adjoint of rho_a is rho_conj(a)", krein)


def suite_context(settings: Settings, r: SuiteResult) -> None:
    ctx = make_context(RUNNING_PHI)
    r.check("zeta = 1", abs(ctx.zeta - 1) < 1e-10, ctx.zeta)
    r.check("eta = -1", abs(ctx.eta + 1) < 1e-10, ctx.eta)
    r.check("s = 2", abs(ctx.s - 2) < 1e-10, ctx.s)
    r.check("b = 0.2", abs(ctx.b - 0.2) < 1e-10, ctx.b)
    r.check("c = 0.1", abs(ctx.c - 0.1) < 1e-10, ctx.c)
    r.check("phi∘sigma = (4z-1)/(z+6)", projective_eq(compose(ctx.phi, ctx.sigma), Mobius(4, -1, 1, 6), 1e-10))
    r.check("sigma∘phi = (9z+1)/(11-z)", projective_eq(compose(ctx.sigma, ctx.phi), Mobius(9, 1, -1, 11), 1e-10))

    rng = np.random.default_rng(settings.seed)
    worst = 0.0
    for _ in range(50):
        eta = cmath.exp(1j * rng.uniform(0.3, 2 * math.pi - 0.3))
        sp = rng.uniform(0.1, 0.9)
        w = complex(rng.uniform(sp + 0.05 * (1 - sp), 1 - 0.05 * (1 - sp)), rng.uniform(-1, 1))
        d = (1 + w) / (1 - w)
        c = make_context(phi_family(eta, sp, d))
        worst = max(worst, abs(c.zeta - 1), abs(c.eta - eta), abs(c.s - 1 / sp), abs(c.c * c.s - c.b))
    r.check("random phi_family contexts", worst < 1e-9, worst)


def suite_symbols(settings: Settings, r: SuiteResult) -> None:
    F = psi_of_word("x", 2.0)
    norm = essential_norm(F, settings.grid_n)
    r.check("‖Psi(C_phi)‖ = sqrt(2)", abs(norm - math.sqrt(2)) <= 1e-10, norm)
    sigma = essential_spectrum(F, settings.grid_n)
    r.check("sigma_e(Psi(C_phi)) = {0}", float(np.max(np.abs(sigma.points))) <= 1e-12)
    row_d = table2_symbol(Table2Row.D, 1, s=2.0, b=0.2, c=0.1)
    sigma = essential_spectrum(row_d, settings.grid_n)
    target = np.linspace(0.0, 1.0, 1001)
    gap = max(float(np.max(sigma.distance(target))), float(np.max(np.abs(sigma.points.imag))),
              float(np.max(np.clip(sigma.points.real - 1, 0, None))), float(np.max(np.clip(-sigma.points.real, 0, None))))
    r.check("row (d), a = 1 samples [0, 1]", gap <= 2e-3, gap)


def _random_word(rng: np.random.Generator) -> List[str]:
    return [("x", "x*")[int(i)] for i in rng.integers(0, 2, size=int(rng.integers(1, 7)))]


def suite_multiplicativity(settings: Settings, r: SuiteResult) -> None:
    rng = np.random.default_rng(settings.seed)
    ok_mul = ok_canon = True
    for _ in range(200):
        w1, w2 = _random_word(rng), _random_word(rng)
        ok_mul &= psi_of_word(w1 + w2, 2.0).allclose(psi_of_word(w1, 2.0) * psi_of_word(w2, 2.0), 1e-10)
        ok_canon &= psi_of_word(w1, 2.0).allclose(psi_of_element(word_to_element(w1), 2.0), 1e-10)
    r.check("Psi(w1·w2) = Psi(w1)·Psi(w2)", ok_mul)
    r.check("Psi(word) = Psi(canonical form)", ok_canon)


def suite_lambda(settings: Settings, r: SuiteResult) -> None:
    s, b, c = 2.0, 0.2, 0.1
    ok = True
    for n in (1, 2, 3):
        A = table2_symbol(Table2Row.A, 2 * b * n, s=s, b=b, c=c)
        for m in range(4):
            lhs = lambda_auto(psi_of_word(["x"] + ["x*", "x"] * m, s), n)
            rhs = A
            for _ in range(m):
                rhs = rhs * A.adjoint() * A
            expected = PowerSum.monomial(s ** (-(2 * m + 1) * n), 0.5 + (2 * n + 1) * m + n)
            ok &= lhs.allclose(rhs, 1e-12) and lhs.e12.allclose(expected, 1e-12)
    r.check("Lambda intertwines the two symbol maps", ok)


def suite_membership(settings: Settings, r: SuiteResult) -> None:
    ctx = make_context(RUNNING_PHI)
    for a in (0.3, -0.1):
        v = linfrac_membership(ctx, compose(parabolic(ctx.eta, a, allow_negative=True), ctx.phi))
        r.check(f"rho(eta, {a})∘phi is in row (a)", v.member and v.condition is Condition.A
                and abs(v.family_parameter - a) < 1e-8, v.to_json()["family_parameter"])
    v = linfrac_membership(ctx, compose(parabolic(ctx.eta, -0.25, allow_negative=True), ctx.phi))
    r.check("rho(eta, -0.25)∘phi is outside the range", not v.member and "outside admissible" in (v.reason or ""), v.reason)
    v = linfrac_membership(ctx, parabolic(ctx.zeta, 1j))
    r.check("rho(zeta, i) is not a member", not v.member, v.reason)
    tag = necessity_check(ctx, BoundaryProfile(whole_circle=True, is_identity=True))
    r.check("identity profile", tag is Condition.IDENTITY, tag.value)
    off = rotate_source(phi_family(1j, 0.5), 1j)
    tag = necessity_check(ctx, tangency_set(off))
    r.check("angular derivative off {zeta, eta}", tag is Condition.NONE, tag.value)


def _random_element(rng: np.random.Generator) -> AlgebraElement:
    def poly(zero_constant: bool) -> Tuple[complex, ...]:
        k = int(rng.integers(0, 3))
        coeffs = [complex(*rng.normal(size=2)) / 2 for _ in range(k)]
        return tuple(([0j] + coeffs) if zero_constant and coeffs else coeffs)

    return AlgebraElement(c=complex(*rng.normal(size=2)) / 2, f=poly(True), g=poly(True), p=poly(False), q=poly(False))


def suite_lowerbounds(settings: Settings, r: SuiteResult) -> None:
    ctx = make_context(RUNNING_PHI)
    rng = np.random.default_rng(settings.seed)
    worst = -math.inf
    for _ in range(50):
        elem = _random_element(rng)
        combo = coset_decompose(ctx, elem)
        ess2 = essential_norm(psi_of_element(elem, ctx.s), settings.grid_n) ** 2
        bounds = [lb1(combo, ctx.zeta), lb1(combo, ctx.eta), lbext(combo)]
        bounds += [lb3_rhs(combo, ctx.zeta, D) for D in (0.1, 1.0, 10.0)]
        worst = max(worst, max(bounds) - ess2)
    r.check("lower bounds <= ‖Psi(A)‖²", worst <= 1e-9, worst)


def suite_kernel_limit(settings: Settings, r: SuiteResult) -> None:
    rep = lb3_limit_check([(1, parabolic(1, 1))], 1, 1.0)
    r.check("rho_1,1: RHS = 1/5", abs(rep.rhs - 0.2) < 1e-12, rep.rhs)
    r.check("rho_1,1: kernel limit", rep.errors[-1] < 1e-4 and rep.converged, rep.errors)
    ctx = make_context(RUNNING_PHI)
    rep = lb3_limit_check([(1, ctx.phi)], ctx.zeta, 1.0)
    r.check("phi: kernel limit", rep.errors[-1] < 1e-4 and rep.converged, rep.errors)


def suite_julia(settings: Settings, r: SuiteResult) -> None:
    value = kernel_gram([(1, RUNNING_PHI)], 1 - 1e-6)
    r.check("Julia-Caratheodory ratio 1/|phi'(zeta)|", abs(value - 2) <= 1e-3, value)


def suite_blaschke(settings: Settings, r: SuiteResult) -> None:
    for t, degree in ((2, 2), (4, 4)):
        B = construct_two_point(-1, 1, t, t).blaschke
        num = B.numerator().coef
        ok = B.zeros == ((0j, degree),) and np.allclose(num, np.eye(degree + 1)[degree], atol=1e-14)
        r.check(f"({t}, {t}) gives z^{degree}", ok, B.zeros)
    B = construct_two_point(-1, 1, 1, 1).blaschke
    num, den = B.numerator().coef, B.denominator().coef
    scale = den[0]
    ok = np.allclose(num / scale, [1 / 3, 0, 1], atol=1e-12) and np.allclose(den / scale, [1, 0, 1 / 3], atol=1e-12)
    r.check("(1, 1) gives (3z²+1)/(z²+3)", ok)
    r.check("boundary derivative sums", abs(boundary_derivative_sums(B, 1) - 1) < 1e-12)

    rng = np.random.default_rng(settings.seed)
    values = derivatives = 0.0
    for _ in range(200):
        t1, t2 = rng.uniform(0.1, 10, size=2)
        eta = _unit(rng)
        zeta = eta * cmath.exp(1j * rng.uniform(0.2, 2 * math.pi - 0.2))
        B = construct_two_point(zeta, eta, t1, t2).blaschke
        b_eta, b1_eta = B.jet(eta, 1)
        b_zeta, b1_zeta = B.jet(zeta, 1)
        values = max(values, abs(b_eta - eta), abs(b_zeta - eta))
        derivatives = max(derivatives, abs(b1_eta - t1), abs(b1_zeta - eta * zeta.conjugate() * t2))
    r.check("random two-point values", values <= 1e-10, values)
    r.check("random two-point derivatives", derivatives <= 1e-9, derivatives)


def suite_compactness(settings: Settings, r: SuiteResult) -> None:
    square = compose(RUNNING_PHI, RUNNING_PHI)
    tails = [tail_norm(composition_matrix(square, n), n // 2) for n in (64, 128, 256)]
    r.check("tail norms of C_(phi∘phi) decrease", tails[0] > tails[1] > tails[2], tails)
    r.check("tail norm at N = 256", tails[-1] < 1e-6, tails[-1])


def suite_jointspec(settings: Settings, r: SuiteResult) -> None:
    curve = joint_essential_spectrum([1, 2], settings.grid_n)
    x, y = curve.points[:, 0], curve.points[:, 1]
    r.check("y = x²", float(np.max(np.abs(y - x * x))) <= 1e-12)
    g1 = gelfand(ParabolicCombination(1, ((1, 1),)))
    g2 = gelfand(ParabolicCombination(1, ((2, 1),)))
    idx = np.linspace(0, curve.t.size - 1, 20).astype(int)
    t = curve.t[idx]
    err = max(float(np.max(np.abs(g1(t) - x[idx]))), float(np.max(np.abs(g2(t) - y[idx]))))
    r.check("Gelfand transform matches the curve", err <= 1e-12, err)


def suite_independence(settings: Settings, r: SuiteResult) -> None:
    rng = np.random.default_rng(settings.seed)
    s, b, c = 2.0, 0.2, 0.1
    worst = math.inf
    for _ in range(50):
        picks = {}
        while len(picks) < int(rng.integers(2, 5)):
            row = Table2Row(("a", "b", "c", "d")[int(rng.integers(0, 4))])
            a = round(float(rng.uniform(0.1, 2.0)), 3)
            picks[(row, a)] = complex(*rng.normal(size=2))
        total = SymbolMatrix.zero(s)
        for (row, a), coeff in picks.items():
            total = total + table2_symbol(row, a, s=s, b=b, c=c).scale(coeff)
        worst = min(worst, essential_norm(total, settings.grid_n))
    r.check("distinct row symbols are independent", worst > 1e-8, worst)


SUITES: Dict[str, Callable[[Settings, SuiteResult], None]] = {
    "semigroup": suite_semigroup,
    "context": suite_context,
    "symbols": suite_symbols,
    "multiplicativity": suite_multiplicativity,
    "lambda": suite_lambda,
    "membership": suite_membership,
    "lowerbounds": suite_lowerbounds,
    "kernel-limit": suite_kernel_limit,
    "julia": suite_julia,
    "blaschke": suite_blaschke,
    "compactness": suite_compactness,
    "jointspec": suite_jointspec,
    "independence": suite_independence,
}


def run_suite(name: str, settings: Settings) -> List[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    results = []
    for n in names:
        result = SuiteResult(n)
        try:
            SUITES[n](settings, result)
        except (CopcalcError, InternalConsistencyError) as e:
            # la suite queda fallida; las demás siguen
            result.check(f"{n} raised {type(e).__name__}", False, e)
        logger.info("verify %s: %s", n, "ok" if result.passed else "FAILED")
        results.append(result)
    return results

"""Membership of composition operators in C*(C_φ, K).

A `PhiContext` fixes the inducing map φ; the decision functions compare boundary data
of ψ against the four one-point conditions at ζ, η and the two-point conditions (e), (f).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .blaschke import two_point_profile
from .boundary import (
    BoundaryProfile,
    DataVector,
    lft_from_jet2,
    tangency_set,
)
from .codec import complex_to_pair
from .config import DEFAULT_MATCH_TOL
from .errors import (
    InadmissibleSymbolError,
    InternalConsistencyError,
    MalformedProfileError,
    NotInImageAlgebraError,
    OutsideTranslationRangeError,
    PreconditionError,
    SchemaError,
)
from .moebius import (
    Mobius,
    classify,
    compose,
    curvature_at,
    halfplane_chart,
    is_identity,
    iterate,
    jet,
    krein_adjoint,
    parabolic,
    projective_eq,
)
from .symbols import (
    AlgebraElement,
    SymbolMatrix,
    Table2Row,
    table2_representative,
    table2_symbol,
)

logger = logging.getLogger(__name__)

CONTEXT_TOL = 1e-9
NEAR_IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class PhiContext:
    """φ, its Krein adjoint σ, the tangency data ζ ↦ η, s = 1/|φ'(ζ)| and b, c."""

    phi: Mobius
    sigma: Mobius
    zeta: complex
    eta: complex
    s: float
    b: float
    c: float

    @property
    def phi_prime(self) -> complex:
        return jet(self.phi, self.zeta, 1)[1]

    @property
    def sigma_prime(self) -> complex:
        return jet(self.sigma, self.eta, 1)[1]

    def to_json(self) -> Dict[str, Any]:
        return {
            "phi": self.phi.to_json(),
            "sigma": self.sigma.to_json(),
            "zeta": complex_to_pair(self.zeta),
            "eta": complex_to_pair(self.eta),
            "s": self.s,
            "b": self.b,
            "c": self.c,
        }

    @classmethod
    def from_json(cls, data: Any) -> "PhiContext":
        """Rebuilds the context from its φ; the derived fields are recomputed."""
        if not isinstance(data, dict) or "phi" not in data:
            raise SchemaError(f'context: expected an object with "phi", got {data!r}')
        return make_context(Mobius.from_json(data["phi"]))


def make_context(phi: Mobius) -> PhiContext:
    cls = classify(phi)
    if not cls.is_disk_self_map:
        raise InadmissibleSymbolError(f"phi not admissible: {phi.describe()} is not a self-map of the disk")
    if cls.is_disk_automorphism:
        raise InadmissibleSymbolError(f"phi not admissible: {phi.describe()} is an automorphism")
    if not cls.sup_norm_one:
        raise InadmissibleSymbolError(f"phi not admissible: ‖phi‖∞ < 1 for {phi.describe()}")
    (dv,) = tangency_set(phi).entries
    zeta = dv.alpha
    eta, d1 = dv.first_order
    eta = eta / abs(eta)
    if abs(zeta - eta) <= DEFAULT_MATCH_TOL:
        raise InadmissibleSymbolError(f"phi not admissible: boundary fixed point at {zeta}")
    s = 1 / abs(d1)
    b = curvature_at(phi, zeta) - 1
    c = b / s
    sigma = krein_adjoint(phi)

    if not projective_eq(compose(phi, sigma), parabolic(eta, 2 * b), CONTEXT_TOL):
        raise InternalConsistencyError(f"phi∘sigma differs from rho(eta, 2b) for b = {b}")
    if not projective_eq(compose(sigma, phi), parabolic(zeta, 2 * c), CONTEXT_TOL):
        raise InternalConsistencyError(f"sigma∘phi differs from rho(zeta, 2c) for c = {c}")
    logger.debug("context: zeta=%s eta=%s s=%.15g b=%.15g c=%.15g", zeta, eta, s, b, c)
    return PhiContext(phi=phi, sigma=sigma, zeta=zeta, eta=eta, s=s, b=b, c=c)


class Condition(str, enum.Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"
    IDENTITY = "identity"
    NONE = "none"
    COMPACT = "compact"


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    condition: Condition
    family_parameter: Optional[complex] = None
    table2_row: Optional[Table2Row] = None
    symbol: Optional[SymbolMatrix] = None
    representative: Optional[str] = None
    decomposition: Tuple[Tuple[complex, Mobius], ...] = ()
    reason: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "member": self.member,
            "condition": self.condition.value,
            "family_parameter": None if self.family_parameter is None else complex_to_pair(self.family_parameter),
            "table2_row": None if self.table2_row is None else self.table2_row.value,
            "symbol": None if self.symbol is None else self.symbol.to_json(),
            "representative": self.representative,
            "decomposition": [
                {"coeff": complex_to_pair(c), "map": m.to_json()} for c, m in self.decomposition
            ],
            "reason": self.reason,
        }


def _close(x: complex, y: complex, tol: float) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(y))


def _one_point_targets(ctx: PhiContext) -> List[Tuple[Table2Row, complex, complex, complex]]:
    """(row, α, ψ(α), ψ'(α)) for the four one-point conditions."""
    return [
        (Table2Row.A, ctx.zeta, ctx.eta, ctx.phi_prime),
        (Table2Row.B, ctx.zeta, ctx.zeta, 1 + 0j),
        (Table2Row.C, ctx.eta, ctx.zeta, ctx.sigma_prime),
        (Table2Row.D, ctx.eta, ctx.eta, 1 + 0j),
    ]


def _match_first_order(ctx: PhiContext, dv: DataVector, tol: float) -> Optional[Table2Row]:
    v0, v1 = dv.first_order
    for row, alpha, value, deriv in _one_point_targets(ctx):
        if _close(dv.alpha, alpha, tol) and _close(v0, value, tol) and _close(v1, deriv, tol):
            return row
    return None


def _match_linfrac(ctx: PhiContext, psi: Mobius, tol: float) -> Optional[Table2Row]:
    for row, alpha, value, deriv in _one_point_targets(ctx):
        try:
            v0, v1 = jet(psi, alpha, 1)
        except PreconditionError:
            continue
        if _close(v0, value, tol) and _close(v1, deriv, tol):
            return row
    return None


def _translation_at(chi: Mobius, gamma: complex) -> complex:
    """a with chi = ρ_{γ,a}; 0 for the identity."""
    if is_identity(chi, NEAR_IDENTITY_TOL):
        return 0j
    chart = halfplane_chart(gamma)
    u = compose(chart, compose(chi, chart.inverse()))
    return jet(u, 0j, 2)[2] / 2j


def _family_parameter(ctx: PhiContext, psi: Mobius, row: Table2Row) -> complex:
    if row is Table2Row.A:
        return _translation_at(compose(psi, ctx.phi.inverse()), ctx.eta)
    if row is Table2Row.C:
        return _translation_at(compose(psi, ctx.sigma.inverse()), ctx.zeta)
    if row is Table2Row.B:
        return _translation_at(psi, ctx.zeta)
    return _translation_at(psi, ctx.eta)


def linfrac_membership(ctx: PhiContext, psi: Mobius, *, tol: float = DEFAULT_MATCH_TOL) -> MembershipVerdict:
    if is_identity(psi):
        return MembershipVerdict(
            member=True,
            condition=Condition.IDENTITY,
            symbol=SymbolMatrix.identity(ctx.s),
            representative="I",
            decomposition=((1 + 0j, psi),),
        )
    cls = classify(psi)
    if cls.is_disk_automorphism:
        return MembershipVerdict(member=False, condition=Condition.NONE, reason="automorphism of the disk")
    if cls.is_disk_self_map and not cls.sup_norm_one:
        return MembershipVerdict(
            member=True,
            condition=Condition.COMPACT,
            symbol=SymbolMatrix.zero(ctx.s),
            representative="0",
            decomposition=((1 + 0j, psi),),
        )

    row = _match_linfrac(ctx, psi, tol)
    if row is None:
        reason = "no condition (a)-(d) holds" if cls.is_disk_self_map else "not a self-map of the disk"
        return MembershipVerdict(member=False, condition=Condition.NONE, reason=reason)
    a = _family_parameter(ctx, psi, row)
    if not cls.is_disk_self_map:
        return MembershipVerdict(
            member=False,
            condition=Condition.NONE,
            family_parameter=a,
            reason=f"outside admissible translation range: a = {a} for row ({row.value})",
        )
    try:
        symbol = table2_symbol(row, a, s=ctx.s, b=ctx.b, c=ctx.c)
    except OutsideTranslationRangeError as e:
        return MembershipVerdict(member=False, condition=Condition.NONE, family_parameter=a, reason=str(e))
    return MembershipVerdict(
        member=True,
        condition=Condition(row.value),
        family_parameter=a,
        table2_row=row,
        symbol=symbol,
        representative=table2_representative(row, a, b=ctx.b, c=ctx.c),
        decomposition=((1 + 0j, psi),),
    )


_TWO_POINT = {
    frozenset((Table2Row.A, Table2Row.D)): Condition.E,
    frozenset((Table2Row.C, Table2Row.B)): Condition.F,
}


def necessity_check(ctx: PhiContext, profile: BoundaryProfile, *, tol: float = DEFAULT_MATCH_TOL) -> Condition:
    """Which of the necessary conditions (a)-(f) the boundary data of ψ satisfies."""
    if profile.is_identity:
        return Condition.IDENTITY
    if profile.whole_circle:
        return Condition.NONE
    if profile.is_empty:
        return Condition.COMPACT
    rows = [_match_first_order(ctx, dv, tol) for dv in profile.entries]
    if any(r is None for r in rows):
        return Condition.NONE
    if len(rows) == 1:
        return Condition(rows[0].value)  # type: ignore[union-attr]
    if len(rows) == 2:
        return _TWO_POINT.get(frozenset(rows), Condition.NONE)  # type: ignore[arg-type]
    return Condition.NONE


def general_membership(ctx: PhiContext, profile: BoundaryProfile, *, tol: float = DEFAULT_MATCH_TOL) -> MembershipVerdict:
    """Membership for ψ with finite F(ψ), analytic at each point of F(ψ).

    C_ψ ≡ Σ C_{β_i} modulo compacts, β_i the linear-fractional map with the same
    second-order data as ψ at the i-th point.
    """
    tag = necessity_check(ctx, profile, tol=tol)
    if tag is Condition.IDENTITY:
        return MembershipVerdict(
            member=True, condition=tag, symbol=SymbolMatrix.identity(ctx.s), representative="I",
            decomposition=((1 + 0j, Mobius.identity()),),
        )
    if tag is Condition.COMPACT:
        return MembershipVerdict(member=True, condition=tag, symbol=SymbolMatrix.zero(ctx.s), representative="0")
    if tag is Condition.NONE:
        reason = "automorphism of the disk" if profile.whole_circle else "no condition (a)-(f) holds"
        return MembershipVerdict(member=False, condition=tag, reason=reason)
    if any(m > 2 for m in profile.contact_orders):
        return MembershipVerdict(member=False, condition=tag, reason="order of contact exceeds two")

    symbol = SymbolMatrix.zero(ctx.s)
    parts: List[Tuple[complex, Mobius]] = []
    verdicts: List[MembershipVerdict] = []
    for dv in profile.entries:
        if dv.order < 2:
            raise MalformedProfileError(f"general_membership needs second-order data at {dv.alpha}")
        beta = lft_from_jet2(dv.alpha, dv.values)
        verdict = linfrac_membership(ctx, beta, tol=tol)
        if not verdict.member:
            return MembershipVerdict(
                member=False, condition=tag,
                reason=f"jet at {dv.alpha} gives {beta.describe()}: {verdict.reason}",
            )
        verdicts.append(verdict)
        symbol = symbol + verdict.symbol  # type: ignore[operator]
        parts.append((1 + 0j, beta))

    if len(verdicts) == 1:
        (only,) = verdicts
        return MembershipVerdict(
            member=True, condition=tag, family_parameter=only.family_parameter,
            table2_row=only.table2_row, symbol=symbol, representative=only.representative,
            decomposition=tuple(parts),
        )
    return MembershipVerdict(
        member=True, condition=tag, symbol=symbol,
        representative=" + ".join(v.representative or "?" for v in verdicts),
        decomposition=tuple(parts),
    )


def coset_decompose(ctx: PhiContext, elem: AlgebraElement) -> List[Tuple[complex, Mobius]]:
    """cI + f(C*C) + g(CC*) + Cp(C*C) + C*q(CC*) as Σ coeff·C_map modulo compacts.

    C*C ≡ s·C_{φ∘σ} and CC* ≡ s·C_{σ∘φ}, so t^k in f (resp. g) becomes s^k·C_{(φ∘σ)_k}
    (resp. (σ∘φ)_k); p_k and q_k pick up s^k and s^(k+1).
    """
    s = ctx.s
    phi_sigma = compose(ctx.phi, ctx.sigma)
    sigma_phi = compose(ctx.sigma, ctx.phi)
    out: List[Tuple[complex, Mobius]] = []
    if elem.c != 0:
        out.append((elem.c, Mobius.identity()))
    for k, coeff in enumerate(elem.f):
        if coeff != 0:
            out.append((coeff * s ** k, iterate(phi_sigma, k)))
    for k, coeff in enumerate(elem.g):
        if coeff != 0:
            out.append((coeff * s ** k, iterate(sigma_phi, k)))
    for k, coeff in enumerate(elem.p):
        if coeff != 0:
            out.append((coeff * s ** k, compose(iterate(phi_sigma, k), ctx.phi)))
    for k, coeff in enumerate(elem.q):
        if coeff != 0:
            out.append((coeff * s ** (k + 1), compose(iterate(sigma_phi, k), ctx.sigma)))
    return out


def combination_symbol(ctx: PhiContext, combination: Sequence[Tuple[complex, Mobius]]) -> SymbolMatrix:
    """Ψ(Σ c_i C_{ψ_i}) from the row symbols of the ψ_i."""
    total = SymbolMatrix.zero(ctx.s)
    for coeff, psi in combination:
        verdict = linfrac_membership(ctx, psi)
        if not verdict.member:
            raise NotInImageAlgebraError(
                f"C_psi is not in the algebra for psi = {psi.describe()}: {verdict.reason}"
            )
        total = total + verdict.symbol.scale(coeff)  # type: ignore[union-attr]
    return total


def case_profile(ctx: PhiContext, case: str) -> BoundaryProfile:
    """Jets of a self-map realising the two-point condition (e) or (f)."""
    if case == "e":
        return two_point_profile(ctx.zeta, ctx.eta, 1 / ctx.s)
    if case == "f":
        return two_point_profile(ctx.eta, ctx.zeta, ctx.s)
    raise SchemaError(f"case must be 'e' or 'f', got {case!r}")

"""Finite Blaschke products with two prescribed boundary values and derivative moduli."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

from numpy.polynomial import Polynomial

from .boundary import BoundaryProfile, DataVector, compose_jets
from .codec import complex_to_pair, pair_to_complex
from .config import DEFAULT_MATCH_TOL
from .errors import (
    ConstructionOverflowError,
    PoleError,
    PreconditionError,
    SchemaError,
)
from .moebius import Mobius, jet, parabolic

logger = logging.getLogger(__name__)

MAX_DEPTH = 64
POLE_PROXIMITY = 1e-12
# los círculos tangentes se cortan en un solo punto cuando el discriminante es ~0
DISC_CLAMP = 1e-14


def _unimodular(z: complex, name: str) -> complex:
    z = complex(z)
    if abs(abs(z) - 1) > DEFAULT_MATCH_TOL:
        raise PreconditionError(f"{name} must lie on the unit circle, got |{name}| = {abs(z)}")
    return z / abs(z)


def _factor_polys(a: complex) -> Tuple[Polynomial, Polynomial]:
    """Numerator and denominator of (|a|/a)(a − z)/(1 − āz); z for a = 0."""
    if a == 0:
        return Polynomial([0, 1]), Polynomial([1])
    u = abs(a) / a
    return Polynomial([u * a, -u]), Polynomial([1, -a.conjugate()])


def _factor_value(a: complex, z: complex) -> complex:
    if a == 0:
        return z
    return (abs(a) / a) * (a - z) / (1 - a.conjugate() * z)


@dataclass(frozen=True)
class BlaschkeProduct:
    """front·Π [(|a|/a)(a − z)/(1 − āz)]^m over (a, m) in zeros."""

    zeros: Tuple[Tuple[complex, int], ...]
    front: complex = 1 + 0j

    def __post_init__(self) -> None:
        zeros = tuple((complex(a), int(m)) for a, m in self.zeros)
        for a, m in zeros:
            if abs(a) >= 1:
                raise PreconditionError(f"Blaschke zero {a} is not inside the disk")
            if m < 1:
                raise PreconditionError(f"zero multiplicity must be positive, got {m}")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "front", _unimodular(self.front, "front"))

    @classmethod
    def with_value(cls, zeros: Sequence[Tuple[complex, int]], point: complex, value: complex) -> "BlaschkeProduct":
        """The product with these zeros whose value at the boundary point is `value`."""
        raw = 1 + 0j
        for a, m in zeros:
            raw *= _factor_value(complex(a), complex(point)) ** int(m)
        return cls(tuple(zeros), complex(value) / raw)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def numerator(self) -> Polynomial:
        out = Polynomial([self.front])
        for a, m in self.zeros:
            num, _ = _factor_polys(a)
            out = out * num ** m
        return out

    def denominator(self) -> Polynomial:
        out = Polynomial([1 + 0j])
        for a, m in self.zeros:
            _, den = _factor_polys(a)
            out = out * den ** m
        return out

    def _check_pole(self, z: complex) -> None:
        for a, _ in self.zeros:
            if a != 0 and abs(1 - a.conjugate() * z) < POLE_PROXIMITY:
                raise PoleError(f"evaluation at pole z = {z} (zero {a})")

    def __call__(self, z: complex) -> complex:
        return self.evaluate(z)[0]

    def evaluate(self, z: complex, with_derivative: bool = False) -> Tuple[complex, ...]:
        """(B(z),) or (B(z), B'(z)); B' by logarithmic derivative away from the zeros."""
        z = complex(z)
        self._check_pole(z)
        value = self.front
        for a, m in self.zeros:
            value *= _factor_value(a, z) ** m
        if not with_derivative:
            return (value,)
        if any(abs(z - a) < POLE_PROXIMITY for a, _ in self.zeros):
            return (value, self.jet(z, 1)[1])
        log_der = 0j
        for a, m in self.zeros:
            if a == 0:
                log_der += m / z
            else:
                log_der += m * (1 / (z - a) + a.conjugate() / (1 - a.conjugate() * z))
        return (value, value * log_der)

    def jet(self, z: complex, k: int = 2) -> List[complex]:
        """(B(z), B'(z), B''(z)) up to order k <= 2 from the expanded quotient."""
        if not 0 <= k <= 2:
            raise PreconditionError(f"Blaschke jets are available up to order 2, got {k}")
        z = complex(z)
        self._check_pole(z)
        n, d = self.numerator(), self.denominator()
        n0, n1, n2 = n(z), n.deriv(1)(z), n.deriv(2)(z)
        d0, d1, d2 = d(z), d.deriv(1)(z), d.deriv(2)(z)
        out = [n0 / d0]
        if k >= 1:
            q = n1 * d0 - n0 * d1
            out.append(q / d0 ** 2)
            if k >= 2:
                out.append((n2 * d0 - n0 * d2) / d0 ** 2 - 2 * d1 * q / d0 ** 3)
        return out

    def to_json(self) -> Dict[str, Any]:
        return {
            "zeros": [{"a": complex_to_pair(a), "multiplicity": m} for a, m in self.zeros],
            "front": complex_to_pair(self.front),
            "numerator": [complex_to_pair(c) for c in self.numerator().coef],
            "denominator": [complex_to_pair(c) for c in self.denominator().coef],
        }

    @classmethod
    def from_json(cls, data: Any) -> "BlaschkeProduct":
        if not isinstance(data, dict) or not isinstance(data.get("zeros"), list):
            raise SchemaError(f'blaschke: expected {{"zeros": [...], "front"}}, got {data!r}')
        zeros = []
        for i, z in enumerate(data["zeros"]):
            if not isinstance(z, dict) or "a" not in z:
                raise SchemaError(f'zeros[{i}]: expected {{"a", "multiplicity"}}, got {z!r}')
            zeros.append((pair_to_complex(z["a"], field=f"zeros[{i}].a"), int(z.get("multiplicity", 1))))
        return cls(tuple(zeros), pair_to_complex(data.get("front", 1), field="front"))


@dataclass(frozen=True)
class TwoPointConstruction:
    blaschke: BlaschkeProduct
    zeta: complex
    eta: complex
    t1: float
    t2: float
    depth: int
    tau: Mobius  # automorfismo parabólico en coordenadas normalizadas (η = 1)

    def to_json(self) -> Dict[str, Any]:
        return {
            "blaschke": self.blaschke.to_json(),
            "zeta": complex_to_pair(self.zeta),
            "eta": complex_to_pair(self.eta),
            "t1": self.t1,
            "t2": self.t2,
            "depth": self.depth,
            "tau": self.tau.to_json(),
        }


def _normalized_zeros(t1: float, t2: float) -> Tuple[Tuple[Tuple[complex, int], ...], int]:
    """Zeros of B with B(±1) = 1, B'(1) = t1, |B'(−1)| = t2.

    Each zero a satisfies (1 − |a|²)/|1 ∓ a|² = t_i/2^m: a lies on the circle centred
    (t/(t+1)) (resp. −t/(t+1)) with radius 1/(t+1); the two meet once t1·t2 <= 4^m.
    """
    m = 1
    while t1 * t2 > 4.0 ** m:
        m += 1
        if m > MAX_DEPTH:
            raise ConstructionOverflowError(f"construction overflow: t1 = {t1}, t2 = {t2}")
    tau1, tau2 = t1 / 2 ** m, t2 / 2 ** m
    p1, p2 = tau1 / (tau1 + 1), -tau2 / (tau2 + 1)
    r1 = 1 / (tau1 + 1)
    x = ((tau1 - 1) / (tau1 + 1) - (tau2 - 1) / (tau2 + 1)) / (2 * (p1 - p2))
    y2 = r1 * r1 - (x - p1) ** 2
    logger.debug("two-point Blaschke: depth m=%d, x=%.15g, y^2=%.3g", m, x, y2)
    if y2 <= DISC_CLAMP:
        return ((complex(x), 2 ** m),), m
    y = math.sqrt(y2)
    half = 2 ** (m - 1)
    return ((complex(x, y), half), (complex(x, -y), half)), m


def construct_two_point(zeta: complex, eta: complex, t1: float, t2: float) -> TwoPointConstruction:
    """B(η) = B(ζ) = η, B'(η) = t1, |B'(ζ)| = t2 (so B'(ζ) = η·conj(ζ)·t2)."""
    zeta, eta = _unimodular(zeta, "zeta"), _unimodular(eta, "eta")
    t1, t2 = float(t1), float(t2)
    if not (t1 > 0 and t2 > 0):
        raise PreconditionError(f"t1, t2 must be positive, got {t1}, {t2}")
    zeta0 = zeta * eta.conjugate()
    if abs(zeta0 - 1) <= DEFAULT_MATCH_TOL:
        raise PreconditionError("construct_two_point needs zeta != eta")

    if abs(zeta0 + 1) <= DEFAULT_MATCH_TOL:
        tau = Mobius.identity()
        target = t2
    else:
        # traslación imaginaria en el semiplano derecho: τ(1) = 1, τ'(1) = 1, τ(ζ₀) = −1
        tau = parabolic(1, -(1 + zeta0) / (1 - zeta0))
        target = t2 / abs(jet(tau, zeta0, 1)[1])
    zeros1, m = _normalized_zeros(t1, target)

    zeros0 = tuple((tau.inverse().value(a), k) for a, k in zeros1)
    rotated = tuple((eta * a, k) for a, k in zeros0)
    product = BlaschkeProduct.with_value(rotated, eta, eta)
    return TwoPointConstruction(
        blaschke=product, zeta=zeta, eta=eta, t1=t1, t2=t2, depth=m, tau=tau
    )


def boundary_derivative_sums(B: BlaschkeProduct, point: complex) -> float:
    """Σ m·(1 − |a|²)/|point − a|² over the zeros, point = ±1."""
    point = complex(point)
    if abs(point - 1) > DEFAULT_MATCH_TOL and abs(point + 1) > DEFAULT_MATCH_TOL:
        raise PreconditionError(f"boundary_derivative_sums is defined at 1 and -1, got {point}")
    return float(sum(m * (1 - abs(a) ** 2) / abs(point - a) ** 2 for a, m in B.zeros))


# ---------------------------------------------------------------------------
# Auto-mapas con dos puntos de contacto
# ---------------------------------------------------------------------------

RHO_DERIVATIVE = 0.5
DEFAULT_ARC_CURVATURE = 4.0


def _rho_jet(point: float, curvature: float) -> List[complex]:
    """Jet of the conformal map ρ at ±1, where ρ(∂D) is an arc of curvature κ."""
    second = curvature / 4 - 0.5
    return [complex(point), complex(RHO_DERIVATIVE), complex(point * second)]


def two_point_profile(
    source: complex,
    target: complex,
    derivative_modulus: float,
    *,
    curvature: float = DEFAULT_ARC_CURVATURE,
) -> BoundaryProfile:
    """Second-order profile of a self-map ψ with F(ψ) = {source, target},
    ψ(source) = ψ(target) = target, |ψ'(source)| = derivative_modulus, ψ'(target) = 1.

    ψ = B∘ρ∘τ in coordinates where target = 1: τ is the parabolic automorphism sending
    source to −1, ρ maps D onto a domain meeting ∂D only at ±1 with ρ'(±1) = 1/2, and B
    is the two-point Blaschke product with B'(1) = 2.
    """
    source, target = _unimodular(source, "source"), _unimodular(target, "target")
    if not derivative_modulus > 0:
        raise PreconditionError(f"derivative modulus must be positive, got {derivative_modulus}")
    if not curvature > 1:
        raise PreconditionError(f"arc curvature must exceed 1, got {curvature}")
    zeta0 = source * target.conjugate()
    if abs(zeta0 - 1) <= DEFAULT_MATCH_TOL:
        raise PreconditionError("two_point_profile needs distinct source and target")
    if abs(zeta0 + 1) <= DEFAULT_MATCH_TOL:
        tau = Mobius.identity()
    else:
        tau = parabolic(1, -(1 + zeta0) / (1 - zeta0))
    tau_at_1 = jet(tau, 1, 2)
    tau_at_src = jet(tau, zeta0, 2)
    t2 = derivative_modulus / (RHO_DERIVATIVE * abs(tau_at_src[1]))
    B = construct_two_point(-1, 1, 1 / RHO_DERIVATIVE, t2).blaschke

    jets = {}
    for point, tau_jet in ((1.0, tau_at_1), (-1.0, tau_at_src)):
        inner = compose_jets(_rho_jet(point, curvature), tau_jet)
        jets[point] = compose_jets(B.jet(point, 2), inner)

    def lift(normalized: List[complex]) -> Tuple[complex, ...]:
        # ψ(z) = q·ψ₁(q̄z)  ⇒  ψ^(k)(z) = q^(1−k)·ψ₁^(k)(q̄z)
        return tuple(target ** (1 - k) * v for k, v in enumerate(normalized))

    return BoundaryProfile(
        entries=(DataVector(source, lift(jets[-1.0])), DataVector(target, lift(jets[1.0]))),
        contact_orders=(2, 2),
    )

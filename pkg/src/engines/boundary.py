"""Boundary behaviour of self-maps: angular-derivative sets, data vectors, contact order.

Non-Möbius maps only enter through their jets (`DataVector`, `BoundaryProfile`).
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .codec import complex_list_from_json, complex_list_to_json, complex_to_pair, pair_to_complex
from .config import DEFAULT_MATCH_TOL
from .errors import (
    DegenerateJetError,
    MalformedProfileError,
    NotASelfMapError,
    NotInAngularDerivativeSetError,
    PreconditionError,
    SchemaError,
)
from .moebius import MapKind, Mobius, classify, compose, halfplane_chart, jet

logger = logging.getLogger(__name__)

# "higher" order of contact: at least four (orders are even)
HIGHER_CONTACT = 4
CONTACT_TOL = 1e-9

_SEEDS = 16


@dataclass(frozen=True)
class DataVector:
    """D_k(ψ, α) = (ψ(α), ψ'(α), ..., ψ^(k)(α))."""

    alpha: complex
    values: Tuple[complex, ...]

    def __post_init__(self) -> None:
        alpha = complex(self.alpha)
        values = tuple(complex(v) for v in self.values)
        if abs(abs(alpha) - 1) > DEFAULT_MATCH_TOL:
            raise MalformedProfileError(f"data vector point must be unimodular, got |alpha| = {abs(alpha)}")
        if len(values) < 2:
            raise MalformedProfileError(f"data vector needs order >= 1, got {len(values) - 1}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    @property
    def first_order(self) -> Tuple[complex, complex]:
        return self.values[0], self.values[1]

    def truncated(self, k: int) -> "DataVector":
        if k > self.order:
            raise MalformedProfileError(f"data vector of order {self.order} has no order-{k} data")
        return DataVector(self.alpha, self.values[: k + 1])

    def derivative_phase_ok(self, tol: float = DEFAULT_MATCH_TOL) -> bool:
        """ψ'(α) = ψ(α)·ᾱ·|ψ'(α)| for boundary-to-boundary data of a self-map."""
        v0, v1 = self.first_order
        return abs(v1 - v0 * self.alpha.conjugate() * abs(v1)) <= tol * max(1.0, abs(v1))

    def to_json(self) -> Dict[str, Any]:
        return {"alpha": complex_to_pair(self.alpha), "values": complex_list_to_json(self.values)}

    @classmethod
    def from_json(cls, data: Any) -> "DataVector":
        if not isinstance(data, dict) or "alpha" not in data or "values" not in data:
            raise SchemaError(f'data vector: expected {{"alpha", "values"}}, got {data!r}')
        return cls(
            alpha=pair_to_complex(data["alpha"], field="alpha"),
            values=tuple(complex_list_from_json(data["values"])),
        )


@dataclass(frozen=True)
class BoundaryProfile:
    """F(ψ) with one data vector and one (even) order of contact per point."""

    entries: Tuple[DataVector, ...] = ()
    contact_orders: Tuple[int, ...] = ()
    whole_circle: bool = False
    is_identity: bool = False

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        orders = tuple(int(m) for m in self.contact_orders)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "contact_orders", orders)
        if len(entries) != len(orders):
            raise MalformedProfileError(
                f"profile has {len(entries)} entries but {len(orders)} contact orders"
            )
        if any(m < 2 or m % 2 for m in orders):
            raise MalformedProfileError(f"contact orders must be even and >= 2, got {orders}")
        if self.whole_circle and entries:
            raise MalformedProfileError("whole-circle profiles carry no data vectors")
        if self.is_identity and not self.whole_circle:
            raise MalformedProfileError("the identity has F = whole circle")
        for i, e in enumerate(entries):
            for other in entries[i + 1 :]:
                if abs(e.alpha - other.alpha) <= DEFAULT_MATCH_TOL:
                    raise MalformedProfileError(f"repeated boundary point {e.alpha}")

    @property
    def is_empty(self) -> bool:
        return not self.entries and not self.whole_circle

    def to_json(self) -> Dict[str, Any]:
        return {
            "entries": [e.to_json() for e in self.entries],
            "contact_orders": list(self.contact_orders),
            "whole_circle": self.whole_circle,
            "is_identity": self.is_identity,
        }

    @classmethod
    def from_json(cls, data: Any) -> "BoundaryProfile":
        if not isinstance(data, dict):
            raise SchemaError(f"profile: expected an object, got {data!r}")
        entries = tuple(DataVector.from_json(e) for e in data.get("entries", []))
        orders = data.get("contact_orders")
        if orders is None:
            orders = [2] * len(entries)
        if not isinstance(orders, list) or not all(isinstance(m, int) for m in orders):
            raise SchemaError(f"contact_orders: expected a list of integers, got {orders!r}")
        return cls(
            entries=entries,
            contact_orders=tuple(orders),
            whole_circle=bool(data.get("whole_circle", False)),
            is_identity=bool(data.get("is_identity", False)),
        )


def _modulus_squared(f: Mobius, theta: float) -> float:
    z = cmath.exp(1j * theta)
    return abs((f.a * z + f.b) / (f.c * z + f.d)) ** 2


def _max_modulus_angle(f: Mobius) -> float:
    """Argmax of |f(e^{iθ})|²: best coarse seed, bounded Brent, then Newton on g'."""
    thetas = 2 * np.pi * np.arange(_SEEDS) / _SEEDS
    z = np.exp(1j * thetas)
    g = np.abs((f.a * z + f.b) / (f.c * z + f.d)) ** 2
    best = float(thetas[int(np.argmax(g))])
    h = 2 * np.pi / _SEEDS
    res = minimize_scalar(
        lambda t: -_modulus_squared(f, t), bounds=(best - h, best + h), method="bounded",
        options={"xatol": 1e-10},
    )
    theta = float(res.x)
    for _ in range(20):
        zz = cmath.exp(1j * theta)
        v0, v1, v2 = jet(f, zz, 2)
        f_t = 1j * zz * v1
        f_tt = -zz * v1 - zz * zz * v2
        g1 = 2 * (v0.conjugate() * f_t).real
        g2 = 2 * (abs(f_t) ** 2 + (v0.conjugate() * f_tt).real)
        if g2 >= 0:
            break
        step = -g1 / g2
        if abs(step) > h:
            break
        theta += step
        if abs(step) < 1e-13:
            break
    logger.debug("tangency angle %.15g for %s", theta, f.describe())
    return theta


def data_vector(f: Mobius, alpha: complex, k: int = 1, *, tol: float = DEFAULT_MATCH_TOL) -> DataVector:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1) > tol:
        raise NotInAngularDerivativeSetError(f"α not in F: |alpha| = {abs(alpha)} is not 1")
    values = jet(f, alpha / abs(alpha), k)
    if abs(abs(values[0]) - 1) > tol:
        raise NotInAngularDerivativeSetError(f"α not in F: |f(alpha)| = {abs(values[0])} < 1")
    return DataVector(alpha / abs(alpha), tuple(values))


def tangency_set(f: Mobius) -> BoundaryProfile:
    cls = classify(f)
    if not cls.is_disk_self_map:
        raise NotASelfMapError(f"tangency_set needs a self-map of the disk, got {f.describe()}")
    if cls.is_disk_automorphism:
        return BoundaryProfile(whole_circle=True, is_identity=cls.kind is MapKind.IDENTITY)
    if not cls.sup_norm_one:
        return BoundaryProfile()
    alpha = cmath.exp(1j * _max_modulus_angle(f))
    return BoundaryProfile(entries=(data_vector(f, alpha, 2),), contact_orders=(2,))


def jet_curvature(alpha: complex, values: Sequence[complex]) -> float:
    """Curvature at ψ(α) of the image of ∂D, from second-order data."""
    v1, v2 = values[1], values[2]
    return (1 + alpha * v2 / v1).real / abs(v1)


def contact_order_from_jet(dv: DataVector, *, tol: float = CONTACT_TOL) -> int:
    """2 when the image curve bends strictly inside ∂D, HIGHER_CONTACT when it osculates."""
    if dv.order < 2:
        raise MalformedProfileError(f"contact order needs second-order data, got order {dv.order}")
    if abs(abs(dv.values[0]) - 1) > DEFAULT_MATCH_TOL:
        raise NotInAngularDerivativeSetError(f"α not in F: |psi(alpha)| = {abs(dv.values[0])}")
    kappa = jet_curvature(dv.alpha, dv.values)
    if kappa > 1 + tol:
        return 2
    if kappa >= 1 - tol:
        return HIGHER_CONTACT
    raise NotASelfMapError(f"not a self-map jet: curvature {kappa} < 1")


def lft_from_jet2(alpha: complex, values: Sequence[complex]) -> Mobius:
    """The Möbius map β with D_2(β, α) = (v0, v1, v2).

    β(z) = v0 + v1·h/(1 − k·h), h = z − α, k = v2/(2 v1).
    """
    v0, v1, v2 = (complex(v) for v in values[:3])
    alpha = complex(alpha)
    if abs(v1) <= 1e-14:
        raise DegenerateJetError(f"degenerate jet: first derivative {v1}")
    k = v2 / (2 * v1)
    return Mobius(v1 - v0 * k, v0 * (1 + k * alpha) - v1 * alpha, -k, 1 + k * alpha)


def compose_jets(outer: Sequence[complex], inner: Sequence[complex]) -> List[complex]:
    """Jet of F∘g at z0 from the jet of g at z0 and the jet of F at g(z0) (order ≤ 3)."""
    n = min(len(outer), len(inner), 4) - 1
    f0 = outer[0]
    out = [f0]
    if n >= 1:
        out.append(outer[1] * inner[1])
    if n >= 2:
        out.append(outer[2] * inner[1] ** 2 + outer[1] * inner[2])
    if n >= 3:
        out.append(
            outer[3] * inner[1] ** 3 + 3 * outer[2] * inner[1] * inner[2] + outer[1] * inner[3]
        )
    return out


def halfplane_jet(alpha: complex, values: Sequence[complex]) -> List[complex]:
    """Jet at 0 of u = τ_β∘ψ∘τ_α⁻¹ (β = ψ(α)) from D_k(ψ, α)."""
    k = min(len(values) - 1, 3)
    beta = values[0]
    inner = jet(halfplane_chart(alpha).inverse(), 0j, k)
    mid = compose_jets(values, inner)
    outer = jet(halfplane_chart(beta), beta, k)
    return compose_jets(outer, mid)


def phi_family(eta: complex, s_prime: float, d: Optional[complex] = None, *, tol: float = 1e-12) -> Mobius:
    """φ(z) = η[(1 + s + sd)z + (d − s − sd)]/(z + d), s = s_prime; φ(1) = η, |φ'(1)| = s.

    d = None gives the affine member η(sz + 1 − s).
    """
    eta = complex(eta)
    if abs(abs(eta) - 1) > DEFAULT_MATCH_TOL:
        raise PreconditionError(f"eta must be unimodular, got |eta| = {abs(eta)}")
    eta = eta / abs(eta)
    s = float(s_prime)
    if not 0 < s < 1:
        raise NotASelfMapError(f"not a self-map of the disk: s' = {s} outside (0, 1)")
    if d is None:
        return Mobius(eta * s, eta * (1 - s), 0, 1)
    d = complex(d)
    if d == -1:
        raise NotASelfMapError("not a self-map of the disk: d = -1")
    margin = ((d - 1) / (d + 1)).real - s
    if margin < -tol:
        raise NotASelfMapError(
            f"not a self-map of the disk: Re((d-1)/(d+1)) = {margin + s:.6g} < s' = {s}"
        )
    if abs(margin) <= tol:
        logger.warning("phi_family: Re((d-1)/(d+1)) = s'; the map is an automorphism")
    return Mobius(eta * (1 + s + s * d), eta * (d - s - s * d), 1, d)


def rotate_source(f: Mobius, zeta: complex) -> Mobius:
    """z ↦ f(ζ̄z): moves a tangency point from 1 to ζ."""
    zeta = complex(zeta)
    return compose(f, Mobius.rotation(zeta.conjugate() / abs(zeta)))

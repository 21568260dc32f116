"""Linear-fractional maps of the Riemann sphere, as self-maps of the unit disk.

A `Mobius` value is a projective class: the four coefficients are scaled so the one
of largest modulus equals exactly 1. Every operation is a pure function.
"""

from __future__ import annotations

import cmath
import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from .codec import Infinity, SpherePoint, complex_to_pair, pair_to_complex, point_to_json, real_to_json
from .config import DEFAULT_MATCH_TOL, DEFAULT_TOLERANCE
from .errors import (
    BoundaryMismatchError,
    DegenerateMapError,
    NotASelfMapError,
    NotParabolicError,
    PoleError,
    PreconditionError,
    SchemaError,
)

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14
POLE_TOL = 1e-14
# trace²/det tiene error de redondeo; 1e-9 separa parabólicos de hiperbólicos cercanos
CLASSIFY_TOL = 1e-9
SELF_MAP_TOL = 1e-12
TANGENCY_TOL = 1e-10
LINE_TOL = 1e-13

_TIE = 1.0 - 1e-12


def _canonical(coeffs: Tuple[complex, complex, complex, complex]) -> Tuple[complex, ...]:
    mods = [abs(x) for x in coeffs]
    top = max(mods)
    if top == 0.0 or not all(math.isfinite(m) for m in mods):
        raise DegenerateMapError(f"degenerate map: coefficients {coeffs}")
    pivot_index = next(i for i, m in enumerate(mods) if m >= top * _TIE)
    pivot = coeffs[pivot_index]
    if pivot == 1:
        return tuple(coeffs)
    out = [x / pivot for x in coeffs]
    out[pivot_index] = 1 + 0j
    return tuple(out)


@dataclass(frozen=True)
class Mobius:
    """z ↦ (az + b)/(cz + d), stored in canonical projective scaling."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        coeffs = tuple(complex(x) for x in (self.a, self.b, self.c, self.d))
        a, b, c, d = _canonical(coeffs)  # type: ignore[misc]
        if abs(a * d - b * c) <= DEGENERACY_TOL:
            raise DegenerateMapError(f"degenerate map: ad - bc = {a * d - b * c}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, lam: complex) -> "Mobius":
        return cls(lam, 0, 0, 1)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def coefficients(self) -> Tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __call__(self, z: SpherePoint) -> SpherePoint:
        if isinstance(z, Infinity):
            if self.c == 0:
                return Infinity.POINT
            return self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return Infinity.POINT
        return (self.a * z + self.b) / den

    def value(self, z: complex) -> complex:
        """Finite value f(z); raises at a pole."""
        return jet(self, z, 0)[0]

    def describe(self) -> str:
        def fmt(w: complex) -> str:
            w = complex(w)
            if abs(w.imag) < 1e-15:
                return f"{w.real:.12g}"
            return f"({w.real:.12g}{w.imag:+.12g}i)"

        return f"({fmt(self.a)}·z + {fmt(self.b)})/({fmt(self.c)}·z + {fmt(self.d)})"

    def to_json(self) -> Dict[str, List[float]]:
        return {k: complex_to_pair(v) for k, v in zip("abcd", self.coefficients)}

    @classmethod
    def from_json(cls, data: Any) -> "Mobius":
        if not isinstance(data, dict) or not all(k in data for k in "abcd"):
            raise SchemaError(f'map: expected {{"a","b","c","d"}} as [re, im] pairs, got {data!r}')
        return cls(*(pair_to_complex(data[k], field=k) for k in "abcd"))


class MapKind(str, enum.Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class Circle:
    """A circle in the plane; a line is flagged by radius = inf (center = foot from 0)."""

    center: complex
    radius: float

    @property
    def is_line(self) -> bool:
        return math.isinf(self.radius)

    def to_json(self) -> Dict[str, Any]:
        return {"center": complex_to_pair(self.center), "radius": real_to_json(self.radius)}


@dataclass(frozen=True)
class MapClassification:
    fixed_points: Tuple[SpherePoint, ...]
    kind: MapKind
    is_disk_automorphism: bool
    is_disk_self_map: bool
    sup_norm_one: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "fixed_points": [point_to_json(p) for p in self.fixed_points],
            "kind": self.kind.value,
            "is_disk_automorphism": self.is_disk_automorphism,
            "is_disk_self_map": self.is_disk_self_map,
            "sup_norm_one": self.sup_norm_one,
        }


def compose(f: Mobius, g: Mobius) -> Mobius:
    """f∘g."""
    m = f.to_matrix() @ g.to_matrix()
    try:
        return Mobius(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    except DegenerateMapError as e:
        raise DegenerateMapError(f"degenerate composition of {f} and {g}") from e


def iterate(f: Mobius, n: int) -> Mobius:
    """The n-th iterate (f)_n; negative n iterates the inverse."""
    result = Mobius.identity()
    power = f if n >= 0 else f.inverse()
    k = abs(int(n))
    while k:
        if k & 1:
            result = compose(result, power)
        k >>= 1
        if k:
            power = compose(power, power)
    return result


def jet(f: Mobius, z0: complex, k: int = 1) -> List[complex]:
    """(f(z0), f'(z0), ..., f^(k)(z0)).

    f^(n)(z) = (-1)^(n+1) n! c^(n-1) (ad - bc) / (cz + d)^(n+1).
    """
    if k < 0:
        raise ValueError(f"jet order must be >= 0, got {k}")
    z0 = complex(z0)
    w = f.c * z0 + f.d
    if abs(w) <= POLE_TOL:
        raise PoleError(f"evaluation at pole z0={z0}")
    det = f.det
    out = [(f.a * z0 + f.b) / w]
    for n in range(1, k + 1):
        out.append((-1) ** (n + 1) * math.factorial(n) * f.c ** (n - 1) * det / w ** (n + 1))
    return out


def is_identity(f: Mobius, tol: float = DEFAULT_TOLERANCE) -> bool:
    return abs(f.b) <= tol and abs(f.c) <= tol and abs(f.a - f.d) <= tol


def _kind(f: Mobius) -> MapKind:
    if is_identity(f):
        return MapKind.IDENTITY
    t2 = (f.a + f.d) ** 2 / f.det
    if abs(t2 - 4) <= CLASSIFY_TOL:
        return MapKind.PARABOLIC
    if abs(t2.imag) <= CLASSIFY_TOL:
        if 0 <= t2.real < 4:
            return MapKind.ELLIPTIC
        if t2.real > 4:
            return MapKind.HYPERBOLIC
    return MapKind.LOXODROMIC


def fixed_points(f: Mobius) -> Tuple[SpherePoint, ...]:
    """Roots of cz² + (d − a)z − b = 0 on the sphere; empty for the identity."""
    kind = _kind(f)
    if kind is MapKind.IDENTITY:
        return ()
    a, b, c, d = f.coefficients
    if kind is MapKind.PARABOLIC:
        if abs(c) <= DEGENERACY_TOL:
            return (Infinity.POINT,)
        return ((a - d) / (2 * c),)
    if abs(c) <= DEGENERACY_TOL:
        return (b / (d - a), Infinity.POINT)
    bq, cq = d - a, -b
    root = cmath.sqrt(bq * bq - 4 * c * cq)
    s = root if abs(bq + root) >= abs(bq - root) else -root
    q = -(bq + s) / 2
    return (q / c, cq / q)


def image_circle(f: Mobius) -> Circle:
    """The image of the unit circle.

    w = f(z) lies on it iff |dw − b| = |a − cw|, i.e.
    (|d|² − |c|²)|w|² − 2 Re(w·(d b̄ − ā c)) + |b|² − |a|² = 0.
    """
    a, b, c, d = f.coefficients
    big_a = abs(d) ** 2 - abs(c) ** 2
    k = d * b.conjugate() - a.conjugate() * c
    rhs = abs(b) ** 2 - abs(a) ** 2
    if abs(big_a) <= LINE_TOL:
        foot = rhs * k.conjugate() / (2 * abs(k) ** 2) if abs(k) > 0 else 0j
        return Circle(center=foot, radius=math.inf)
    center = k.conjugate() / big_a
    r2 = abs(center) ** 2 - rhs / big_a
    return Circle(center=center, radius=math.sqrt(max(r2, 0.0)))


def _is_self_map(f: Mobius, circle: Circle) -> bool:
    if circle.is_line:
        return False
    if abs(circle.center) + circle.radius > 1 + SELF_MAP_TOL:
        return False
    w0 = f(0j)
    if isinstance(w0, Infinity):
        return False
    return abs(w0 - circle.center) < circle.radius


def classify(f: Mobius) -> MapClassification:
    kind = _kind(f)
    circle = image_circle(f)
    self_map = _is_self_map(f, circle)
    sup_one = self_map and abs(circle.center) + circle.radius >= 1 - TANGENCY_TOL
    automorphism = False
    if self_map:
        images = [f(p) for p in (1 + 0j, 1j, -1 + 0j)]
        automorphism = all(
            not isinstance(w, Infinity) and abs(abs(w) - 1) <= DEFAULT_MATCH_TOL for w in images
        )
    return MapClassification(
        fixed_points=fixed_points(f),
        kind=kind,
        is_disk_automorphism=automorphism,
        is_disk_self_map=self_map,
        sup_norm_one=sup_one or automorphism,
    )


def krein_adjoint(f: Mobius) -> Mobius:
    """σ_f(z) = (āz − c̄)/(−b̄z + d̄)."""
    a, b, c, d = f.coefficients
    return Mobius(a.conjugate(), -c.conjugate(), -b.conjugate(), d.conjugate())


def _check_unimodular(z: complex, name: str) -> complex:
    z = complex(z)
    if abs(abs(z) - 1) > DEFAULT_MATCH_TOL:
        raise PreconditionError(f"{name} must lie on the unit circle, got |{name}| = {abs(z)}")
    return z / abs(z)


def parabolic(gamma: complex, a: complex, *, allow_negative: bool = False) -> Mobius:
    """ρ_{γ,a}(z) = γ·ρ_{1,a}(z/γ), with ρ_{1,a}(z) = ((2 − a)z + a)/(−az + 2 + a)."""
    gamma = _check_unimodular(gamma, "gamma")
    a = complex(a)
    if a.real < -DEFAULT_TOLERANCE and not allow_negative:
        raise NotASelfMapError(f"not a self-map: parabolic translation Re a = {a.real} < 0")
    return Mobius(2 - a, gamma * a, -a * gamma.conjugate(), 2 + a)


def halfplane_chart(gamma: complex) -> Mobius:
    """τ_γ(z) = i(γ − z)/(γ + z): disk onto upper half-plane, γ ↦ 0."""
    gamma = complex(gamma)
    return Mobius(-1j, 1j * gamma, 1, gamma)


def translation_number(f: Mobius) -> Tuple[complex, complex]:
    """(γ, a) with f = ρ_{γ,a}; a = u''(0)/(2i) for u = τ_γ∘f∘τ_γ⁻¹."""
    kind = _kind(f)
    if kind is not MapKind.PARABOLIC:
        raise NotParabolicError(f"not parabolic: {f.describe()} is {kind.value}")
    (gamma,) = fixed_points(f)
    if isinstance(gamma, Infinity) or abs(abs(gamma) - 1) > DEFAULT_MATCH_TOL:
        raise NotParabolicError(f"not parabolic on the circle: fixed point {gamma} off the unit circle")
    gamma = gamma / abs(gamma)
    chart = halfplane_chart(gamma)
    u = compose(chart, compose(f, chart.inverse()))
    _, _, u2 = jet(u, 0j, 2)
    return gamma, u2 / 2j


def conjugate_to_halfplane(
    f: Mobius, alpha: complex, beta: complex, *, tol: float = DEFAULT_MATCH_TOL
) -> Tuple[Mobius, Tuple[complex, complex, complex]]:
    """u = τ_β∘f∘τ_α⁻¹ and its jet (u(0), u'(0), u''(0))."""
    value = jet(f, alpha, 0)[0]
    if abs(value - complex(beta)) > tol:
        raise BoundaryMismatchError(f"boundary value mismatch: f(alpha) = {value}, beta = {beta}")
    u = compose(halfplane_chart(beta), compose(f, halfplane_chart(alpha).inverse()))
    u0, u1, u2 = jet(u, 0j, 2)
    return u, (u0, u1, u2)


def curvature_at(f: Mobius, alpha: complex) -> float:
    """Curvature of f(∂D) at f(α): Re(1 + α f''(α)/f'(α)) / |f'(α)|."""
    alpha = complex(alpha)
    if abs(abs(alpha) - 1) > DEFAULT_MATCH_TOL:
        raise BoundaryMismatchError(f"curvature_at needs |alpha| = 1, got {abs(alpha)}")
    if image_circle(f).is_line:
        return 0.0
    v0, v1, v2 = jet(f, alpha, 2)
    if abs(abs(v0) - 1) > DEFAULT_MATCH_TOL:
        raise BoundaryMismatchError(f"f(alpha) = {v0} is not on the unit circle")
    return (1 + alpha * v2 / v1).real / abs(v1)


def projective_eq(f: Mobius, g: Mobius, tol: float = DEFAULT_TOLERANCE) -> bool:
    """All 2×2 minors of the stacked coefficient rows vanish within tol."""
    p, q = f.coefficients, g.coefficients
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(p[i] * q[j] - p[j] * q[i]) > tol:
                return False
    return True

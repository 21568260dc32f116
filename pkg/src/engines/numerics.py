"""Numeric oracles on H²: finite sections of composition operators, kernel Gram values
and the lower bounds for essential norms of combinations of composition operators.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.signal import lfilter

from .blaschke import BlaschkeProduct
from .boundary import BoundaryProfile, data_vector, halfplane_jet
from .config import DEFAULT_MATCH_TOL, DEFAULT_N
from .errors import (
    InternalConsistencyError,
    MalformedProfileError,
    NotInAngularDerivativeSetError,
    PoleInsideDiskError,
    PreconditionError,
    SchemaError,
)
from .moebius import Mobius, classify, conjugate_to_halfplane, parabolic, projective_eq

logger = logging.getLogger(__name__)

MAX_N = 4096
POWER_ITER_TOL = 1e-10
POWER_ITER_MAX = 10_000
POLE_MARGIN = 1e-12
DEFAULT_DISTANCES = (1e-2, 1e-3, 1e-4, 1e-5)

AnalyticMap = Union[Mobius, BlaschkeProduct, Sequence[Union[Mobius, BlaschkeProduct]]]
Combination = Sequence[Tuple[complex, Union[Mobius, BoundaryProfile]]]


# ---------------------------------------------------------------------------
# Series de Taylor y secciones finitas
# ---------------------------------------------------------------------------


def _rational(f: Union[Mobius, BlaschkeProduct]) -> Tuple[Polynomial, Polynomial]:
    if isinstance(f, Mobius):
        return Polynomial([f.b, f.a]).trim(), Polynomial([f.d, f.c]).trim()
    if isinstance(f, BlaschkeProduct):
        return f.numerator(), f.denominator()
    raise SchemaError(f"expected a Mobius map or a Blaschke product, got {type(f).__name__}")


def _compose_rational(
    outer: Tuple[Polynomial, Polynomial], inner: Tuple[Polynomial, Polynomial]
) -> Tuple[Polynomial, Polynomial]:
    """N(P/Q)/D(P/Q) with the common Q^n cleared."""
    num, den = outer
    p, q = inner
    n = max(num.degree(), den.degree())
    powers_p = [Polynomial([1])]
    powers_q = [Polynomial([1])]
    for _ in range(n):
        powers_p.append(powers_p[-1] * p)
        powers_q.append(powers_q[-1] * q)

    def homogenize(poly: Polynomial) -> Polynomial:
        coef = np.pad(poly.coef, (0, n + 1 - poly.coef.size))
        out = Polynomial([0])
        for k, ck in enumerate(coef):
            if ck != 0:
                out = out + ck * powers_p[k] * powers_q[n - k]
        return out

    return homogenize(num), homogenize(den)


def as_rational(f: AnalyticMap) -> Tuple[Polynomial, Polynomial]:
    """Numerator and denominator of a map or of a chain f_1∘f_2∘...∘f_n."""
    if isinstance(f, (Mobius, BlaschkeProduct)):
        return _rational(f)
    chain = list(f)
    if not chain:
        raise SchemaError("empty composition chain")
    out = _rational(chain[-1])
    for g in reversed(chain[:-1]):
        out = _compose_rational(_rational(g), out)
    return out


def describe_map(f: AnalyticMap) -> str:
    if isinstance(f, Mobius):
        return f.describe()
    if isinstance(f, BlaschkeProduct):
        return f"blaschke(degree {f.degree})"
    return " ∘ ".join(describe_map(g) for g in f)


def taylor_coeffs(f: AnalyticMap, N: int) -> np.ndarray:
    """The first N Taylor coefficients at 0."""
    if N < 1:
        raise PreconditionError(f"N must be >= 1, got {N}")
    num, den = as_rational(f)
    roots = den.roots() if den.degree() > 0 else np.array([])
    inside = roots[np.abs(roots) <= 1 + POLE_MARGIN]
    if inside.size:
        raise PoleInsideDiskError(f"pole inside disk at {inside[0]} for {describe_map(f)}")
    impulse = np.zeros(N, dtype=complex)
    impulse[0] = 1
    return lfilter(num.coef.astype(complex), den.coef.astype(complex), impulse)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Upper-left N×N section of C_ψ on the monomial basis; column n holds ψ^n."""

    entries: np.ndarray
    source: str = ""

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def export(self, path: Union[str, Path], fmt: str = "json") -> List[Path]:
        """Writes the matrix; the binary format is row-major little-endian complex128
        with a JSON sidecar header next to it."""
        path = Path(path)
        header = {"n": self.n, "map": self.source}
        if fmt == "json":
            payload = dict(header)
            payload["entries"] = [[[z.real, z.imag] for z in row] for row in self.entries]
            path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")
            return [path]
        if fmt == "binary":
            np.ascontiguousarray(self.entries, dtype="<c16").tofile(path)
            sidecar = path.with_name(path.name + ".json")
            header.update({"dtype": "complex128", "byteorder": "little", "order": "row-major"})
            sidecar.write_text(json.dumps(header, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")
            return [path, sidecar]
        raise SchemaError(f"unknown export format {fmt!r} (json or binary)")


def composition_matrix(f: AnalyticMap, N: int = DEFAULT_N) -> TruncatedOperator:
    if not 1 <= N <= MAX_N:
        raise PreconditionError(f"N must be in [1, {MAX_N}], got {N}")
    base = taylor_coeffs(f, N)
    M = np.zeros((N, N), dtype=complex)
    M[0, 0] = 1
    col = M[:, 0]
    for n in range(1, N):
        col = np.convolve(col, base)[:N]
        M[:, n] = col
    return TruncatedOperator(entries=M, source=describe_map(f))


def _matrix(T: Union[TruncatedOperator, np.ndarray]) -> np.ndarray:
    return T.entries if isinstance(T, TruncatedOperator) else np.asarray(T, dtype=complex)


def operator_norm(T: Union[TruncatedOperator, np.ndarray]) -> float:
    """Largest singular value by power iteration on T*T."""
    M = _matrix(T)
    if M.size == 0:
        return 0.0
    v = np.ones(M.shape[1], dtype=complex) / math.sqrt(M.shape[1])
    lam = 0.0
    for step in range(POWER_ITER_MAX):
        w = M.conj().T @ (M @ v)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        new_lam = float(np.vdot(v, w).real)
        v = w / norm_w
        if abs(new_lam - lam) <= POWER_ITER_TOL * max(1.0, new_lam):
            lam = new_lam
            logger.debug("power iteration converged after %d steps", step + 1)
            break
        lam = new_lam
    else:
        logger.warning("power iteration hit %d steps without converging", POWER_ITER_MAX)
    return math.sqrt(max(lam, 0.0))


def tail_norm(T: Union[TruncatedOperator, np.ndarray], N0: int) -> float:
    """Norm of rows >= N0, i.e. of Q_{N0}·T."""
    M = _matrix(T)
    if not 0 <= N0 < M.shape[0]:
        raise PreconditionError(f"tail_norm needs 0 <= N0 < {M.shape[0]}, got {N0}")
    return operator_norm(M[N0:, :])


# ---------------------------------------------------------------------------
# Núcleo de Szegő
# ---------------------------------------------------------------------------


def kernel_gram(combination: Sequence[Tuple[complex, Mobius]], z: complex) -> float:
    """‖Σ c̄_i C*_{ψ_i} k_z/‖k_z‖‖² = (1 − |z|²) Σ c̄_i c_j / (1 − conj(ψ_i(z)) ψ_j(z))."""
    z = complex(z)
    if abs(z) >= 1:
        raise PreconditionError(f"kernel_gram needs |z| < 1, got {abs(z)}")
    coeffs = np.array([complex(c) for c, _ in combination], dtype=complex)
    values = np.array([psi.value(z) for _, psi in combination], dtype=complex)
    if np.any(np.abs(values) >= 1):
        raise PreconditionError(f"psi(z) on the unit circle or outside the disk at z = {z}")
    gram = 1 / (1 - np.conj(values)[:, None] * values[None, :])
    return float((1 - abs(z) ** 2) * (coeffs.conj() @ gram @ coeffs).real)


def _gamma_geometry(D: float) -> Tuple[float, float]:
    if not D > 0:
        raise PreconditionError(f"D must be positive, got {D}")
    return 1 / (1 + 4 * D), 4 * D / (1 + 4 * D)


def gamma_circle(alpha: complex, D: float, theta: float) -> complex:
    """Point of Γ_{α,D}: (1 − |z|²)/|α − z|² = 1/(4D); θ = 0 is the tangency point α."""
    center, radius = _gamma_geometry(D)
    return complex(alpha) * (center + radius * complex(math.cos(theta), math.sin(theta)))


def gamma_point_at_distance(alpha: complex, D: float, delta: float) -> complex:
    """The point of Γ_{α,D} with |z| = 1 − δ (upper branch)."""
    center, radius = _gamma_geometry(D)
    if not 0 < delta < 1 - abs(center - radius):
        raise PreconditionError(f"no point of Gamma at boundary distance {delta}")
    cos_t = ((1 - delta) ** 2 - center ** 2 - radius ** 2) / (2 * center * radius)
    return gamma_circle(alpha, D, math.acos(max(-1.0, min(1.0, cos_t))))


# ---------------------------------------------------------------------------
# Cotas inferiores
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Term:
    coeff: complex
    values: Tuple[complex, ...]
    contact: Optional[int]  # None: automorfismo


def _terms_at(combination: Combination, alpha: complex, order: int, *, tol: float) -> List[_Term]:
    """Boundary data at α of every map with α in its angular-derivative set."""
    out: List[_Term] = []
    for coeff, psi in combination:
        if isinstance(psi, BoundaryProfile):
            for dv, m in zip(psi.entries, psi.contact_orders):
                if abs(dv.alpha - alpha) <= tol:
                    if dv.order < order:
                        raise MalformedProfileError(f"profile at {alpha} has order {dv.order} < {order}")
                    out.append(_Term(complex(coeff), dv.values[: order + 1], m))
            continue
        try:
            dv = data_vector(psi, alpha, order, tol=tol)
        except NotInAngularDerivativeSetError:
            continue
        cls = classify(psi)
        if not cls.is_disk_self_map:
            continue
        contact = None if cls.is_disk_automorphism else 2
        out.append(_Term(complex(coeff), dv.values, contact))
    return out


def _group(terms: Sequence[_Term], k: int, tol: float) -> List[List[_Term]]:
    groups: List[List[_Term]] = []
    for term in terms:
        key = term.values[:k]
        for g in groups:
            if all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(key, g[0].values[:k])):
                g.append(term)
                break
        else:
            groups.append([term])
    return groups


def _group_bound(groups: Sequence[Sequence[_Term]]) -> float:
    return float(sum(abs(sum(t.coeff for t in g)) ** 2 / abs(g[0].values[1]) for g in groups))


def lb1(combination: Combination, alpha: complex, *, tol: float = DEFAULT_MATCH_TOL) -> float:
    """Σ over first-order data vectors d at α of |Σ c_j|²/|d_1|."""
    terms = _terms_at(combination, complex(alpha), 1, tol=tol)
    if not terms:
        logger.warning("lb1: alpha = %s is in no angular-derivative set; bound is 0", alpha)
        return 0.0
    return _group_bound(_group(terms, 2, tol))


def lb2(combination: Combination, alpha: complex, k: int, *, tol: float = DEFAULT_MATCH_TOL) -> float:
    """Maps with contact order >= k at α, grouped by D_{k−1}; automorphisms excluded."""
    if k not in (2, 3):
        raise PreconditionError(f"lb2 is implemented for k in {{2, 3}}, got {k}")
    terms = [
        t for t in _terms_at(combination, complex(alpha), k - 1, tol=tol)
        if t.contact is not None and t.contact >= k
    ]
    return _group_bound(_group(terms, k, tol))


def lbext(combination: Combination) -> float:
    """(1/2π) Σ |c_j|²|J(ψ_j)| over distinct maps; |J| = 2π exactly for automorphisms."""
    merged: List[Tuple[complex, Mobius]] = []
    for coeff, psi in combination:
        if not isinstance(psi, Mobius):
            continue
        for i, (c0, m0) in enumerate(merged):
            if projective_eq(psi, m0, 1e-12):
                merged[i] = (c0 + complex(coeff), m0)
                break
        else:
            merged.append((complex(coeff), psi))
    return float(sum(abs(c) ** 2 for c, psi in merged if classify(psi).is_disk_automorphism))


def _halfplane_jets(
    psi: Union[Mobius, BoundaryProfile], alpha: complex, tol: float
) -> Optional[Tuple[Tuple[complex, complex], Tuple[complex, complex, complex]]]:
    if isinstance(psi, BoundaryProfile):
        for dv, m in zip(psi.entries, psi.contact_orders):
            if abs(dv.alpha - alpha) <= tol:
                if m > 2:
                    raise PreconditionError(f"lb3 needs contact order 2 at {alpha}, got {m}")
                if dv.order < 2:
                    raise MalformedProfileError(f"lb3 needs second-order data at {alpha}")
                u0, u1, u2 = halfplane_jet(dv.alpha, dv.values[:3])[:3]
                return dv.first_order, (u0, u1, u2)
        return None
    try:
        dv = data_vector(psi, alpha, 1, tol=tol)
    except NotInAngularDerivativeSetError:
        return None
    if not classify(psi).is_disk_self_map:
        return None
    _, jets = conjugate_to_halfplane(psi, dv.alpha, dv.values[0] / abs(dv.values[0]), tol=tol)
    return dv.first_order, jets


def lb3_rhs(combination: Combination, alpha: complex, D: float, *, tol: float = DEFAULT_MATCH_TOL) -> float:
    """Σ over first-order classes of Σ c̄_i c_j/(conj(w_i) + w_j), w = u'(0)/2 − iD·u''(0)."""
    if not D > 0:
        raise PreconditionError(f"D must be positive, got {D}")
    alpha = complex(alpha)
    classes: List[Tuple[Tuple[complex, complex], List[Tuple[complex, complex]]]] = []
    for coeff, psi in combination:
        found = _halfplane_jets(psi, alpha, tol)
        if found is None:
            continue
        key, (_, u1, u2) = found
        w = u1 / 2 - 1j * D * u2
        if w.real <= 0:
            raise InternalConsistencyError(f"half-plane parameter w = {w} is not in the right half-plane")
        for k0, members in classes:
            if all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(key, k0)):
                members.append((complex(coeff), w))
                break
        else:
            classes.append((key, [(complex(coeff), w)]))
    total = 0.0
    for _, members in classes:
        c = np.array([m[0] for m in members])
        w = np.array([m[1] for m in members])
        gram = 1 / (np.conj(w)[:, None] + w[None, :])
        total += float((c.conj() @ gram @ c).real)
    return total


@dataclass(frozen=True)
class LimitReport:
    rhs: float
    distances: Tuple[float, ...]
    lhs: Tuple[float, ...]
    errors: Tuple[float, ...]

    @property
    def converged(self) -> bool:
        """Last two errors shrink by a factor >= 2 (or the last one is negligible)."""
        if len(self.errors) < 2:
            return bool(self.errors) and self.errors[-1] <= 1e-12
        return self.errors[-1] <= 1e-12 or self.errors[-2] >= 2 * self.errors[-1]

    def to_json(self) -> Dict[str, Any]:
        return {
            "rhs": self.rhs,
            "distances": list(self.distances),
            "lhs": list(self.lhs),
            "errors": list(self.errors),
            "converged": self.converged,
        }


def lb3_limit_check(
    combination: Sequence[Tuple[complex, Mobius]],
    alpha: complex,
    D: float,
    distances: Sequence[float] = DEFAULT_DISTANCES,
) -> LimitReport:
    """kernel_gram along Γ_{α,D} at shrinking boundary distances against lb3_rhs."""
    rhs = lb3_rhs(combination, alpha, D)
    lhs = tuple(kernel_gram(combination, gamma_point_at_distance(alpha, D, d)) for d in distances)
    errors = tuple(abs(v - rhs) for v in lhs)
    logger.debug("lb3 limit: rhs=%.15g errors=%s", rhs, errors)
    return LimitReport(rhs=rhs, distances=tuple(distances), lhs=lhs, errors=errors)


@dataclass(frozen=True)
class DecayReport:
    a: float
    N: int
    cutoffs: Tuple[int, ...]
    tails: Tuple[float, ...]

    @property
    def decreasing(self) -> bool:
        return all(t1 > t2 or t1 <= 1e-14 for t1, t2 in zip(self.tails, self.tails[1:]))

    def to_json(self) -> Dict[str, Any]:
        return {
            "a": self.a,
            "N": self.N,
            "cutoffs": list(self.cutoffs),
            "tails": list(self.tails),
            "decreasing": self.decreasing,
        }


def mod_compact_selfadjoint_check(a: float, gamma: complex = 1, N: int = DEFAULT_N) -> DecayReport:
    """Tails of M* − M for M the section of C_{ρ_{γ,a}}, a >= 0 real.

    The tails must decrease strictly (or vanish); a report that does not is
    logged as a warning and returned with ``decreasing`` false.
    """
    a = float(a)
    if a < 0:
        raise PreconditionError(f"mod_compact_selfadjoint_check needs a >= 0, got {a}")
    M = composition_matrix(parabolic(gamma, a), N).entries
    diff = M.conj().T - M
    cutoffs = (N // 8, N // 4, N // 2)
    tails = tuple(tail_norm(diff, n0) for n0 in cutoffs)
    report = DecayReport(a=a, N=N, cutoffs=cutoffs, tails=tails)
    if not report.decreasing:
        logger.warning("mod_compact_selfadjoint_check: tails %s at cutoffs %s do not decrease", tails, cutoffs)
    return report

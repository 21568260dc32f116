"""Symbol calculus of C*(C_φ, K) modulo compacts.

Elements are represented by their images under Ψ: 2×2 matrices of finite power sums
Σ c_k t^{β_k} on [0, s], with F(0) a scalar multiple of the identity. With
Ψ(C_φ) = [[0, √t], [0, 0]] the word C_φ*C_φ lands in the (2,2) slot and C_φC_φ* in
the (1,1) slot.
"""

from __future__ import annotations

import cmath
import enum
import logging
import math
import re
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .codec import complex_list_from_json, complex_to_pair, pair_to_complex
from .config import DEFAULT_GRID_N
from .errors import (
    NotCanonicalError,
    NotInImageAlgebraError,
    OutsideTranslationRangeError,
    PreconditionError,
    SchemaError,
)
from .moebius import Mobius, parabolic

logger = logging.getLogger(__name__)

EXPONENT_MERGE_TOL = 1e-12
COEFF_EPS = 1e-14
MEMBERSHIP_TOL = 1e-10

Number = Union[int, float, complex]


def _snap_exponent(beta: complex) -> complex:
    beta = complex(beta)
    if abs(beta.real) <= EXPONENT_MERGE_TOL:
        if abs(beta.imag) <= EXPONENT_MERGE_TOL:
            return 0j
        raise NotInImageAlgebraError(f"exponent {beta} is not defined at t = 0")
    if beta.real < 0:
        raise NotInImageAlgebraError(f"exponent {beta} has negative real part")
    return beta


def _positive_power(base: float, beta: complex) -> complex:
    return cmath.exp(beta * math.log(base))


@dataclass(frozen=True)
class PowerSum:
    """Σ c·t^β in canonical form: sorted by exponent, like exponents merged."""

    terms: Tuple[Tuple[complex, complex], ...] = ()

    def __post_init__(self) -> None:
        raw = sorted(
            ((complex(c), _snap_exponent(beta)) for c, beta in self.terms),
            key=lambda cb: (cb[1].real, cb[1].imag),
        )
        merged: List[List[complex]] = []
        for c, beta in raw:
            if merged and abs(merged[-1][1] - beta) <= EXPONENT_MERGE_TOL:
                merged[-1][0] += c
            else:
                merged.append([c, beta])
        object.__setattr__(
            self, "terms", tuple((c, beta) for c, beta in merged if abs(c) > COEFF_EPS)
        )

    @classmethod
    def constant(cls, c: Number) -> "PowerSum":
        return cls(((complex(c), 0j),))

    @classmethod
    def monomial(cls, c: Number, beta: Number) -> "PowerSum":
        return cls(((complex(c), complex(beta)),))

    @classmethod
    def from_polynomial(cls, coeffs: Sequence[Number], shift: float = 0.0) -> "PowerSum":
        """Σ coeffs[k]·t^(k + shift)."""
        return cls(tuple((complex(c), complex(k + shift)) for k, c in enumerate(coeffs)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def value_at_zero(self) -> complex:
        return sum((c for c, beta in self.terms if beta == 0), 0j)

    def __call__(self, t: Any) -> Any:
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros(t_arr.shape, dtype=complex)
        pos = t_arr > 0
        log_t = np.log(np.where(pos, t_arr, 1.0))
        for c, beta in self.terms:
            if beta == 0:
                out = out + c
            else:
                out = out + c * np.where(pos, np.exp(beta * log_t), 0.0)
        if out.ndim == 0:
            return complex(out)
        return out

    def __add__(self, other: "PowerSum") -> "PowerSum":
        return PowerSum(self.terms + other.terms)

    def __neg__(self) -> "PowerSum":
        return PowerSum(tuple((-c, beta) for c, beta in self.terms))

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + (-other)

    def __mul__(self, other: Union["PowerSum", Number]) -> "PowerSum":
        if not isinstance(other, PowerSum):
            return self.scale(other)
        return PowerSum(
            tuple((c1 * c2, b1 + b2) for c1, b1 in self.terms for c2, b2 in other.terms)
        )

    __rmul__ = __mul__

    def scale(self, k: Number) -> "PowerSum":
        k = complex(k)
        return PowerSum(tuple((k * c, beta) for c, beta in self.terms))

    def conj(self) -> "PowerSum":
        """conj(c t^β) = c̄ t^β̄ for real t > 0."""
        return PowerSum(tuple((c.conjugate(), beta.conjugate()) for c, beta in self.terms))

    def substitute(self, power: float, factor: float) -> "PowerSum":
        """t ↦ factor·t^power: c t^β ↦ c factor^β t^(power β)."""
        if power <= 0 or factor <= 0:
            raise PreconditionError(f"substitution needs power, factor > 0, got {power}, {factor}")
        return PowerSum(
            tuple((c * _positive_power(factor, beta), power * beta) for c, beta in self.terms)
        )

    def allclose(self, other: "PowerSum", tol: float = 1e-10) -> bool:
        return all(abs(c) <= tol for c, _ in (self - other).terms)

    def to_json(self) -> Dict[str, Any]:
        return {"terms": [{"c": complex_to_pair(c), "beta": complex_to_pair(b)} for c, b in self.terms]}

    @classmethod
    def from_json(cls, data: Any) -> "PowerSum":
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
            raise SchemaError(f'power sum: expected {{"terms": [...]}}, got {data!r}')
        terms = []
        for i, term in enumerate(data["terms"]):
            if not isinstance(term, dict) or "c" not in term or "beta" not in term:
                raise SchemaError(f'terms[{i}]: expected {{"c", "beta"}}, got {term!r}')
            terms.append(
                (pair_to_complex(term["c"], field=f"terms[{i}].c"),
                 pair_to_complex(term["beta"], field=f"terms[{i}].beta"))
            )
        return cls(tuple(terms))


ZERO = PowerSum()


@dataclass(frozen=True)
class SymbolMatrix:
    """[[e11, e12], [e21, e22]] on [0, s_end], an element of the image algebra D."""

    e11: PowerSum
    e12: PowerSum
    e21: PowerSum
    e22: PowerSum
    s_end: float

    def __post_init__(self) -> None:
        if not self.s_end > 0:
            raise PreconditionError(f"s_end must be positive, got {self.s_end}")
        if (
            abs(self.e12.value_at_zero()) > MEMBERSHIP_TOL
            or abs(self.e21.value_at_zero()) > MEMBERSHIP_TOL
            or abs(self.e11.value_at_zero() - self.e22.value_at_zero()) > MEMBERSHIP_TOL
        ):
            raise NotInImageAlgebraError("symbol value at t = 0 is not a scalar matrix")

    @classmethod
    def zero(cls, s_end: float) -> "SymbolMatrix":
        return cls(ZERO, ZERO, ZERO, ZERO, s_end)

    @classmethod
    def identity(cls, s_end: float, c: Number = 1) -> "SymbolMatrix":
        one = PowerSum.constant(c)
        return cls(one, ZERO, ZERO, one, s_end)

    @property
    def entries(self) -> Tuple[PowerSum, PowerSum, PowerSum, PowerSum]:
        return (self.e11, self.e12, self.e21, self.e22)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.entries)

    def nonzero_positions(self) -> List[Tuple[int, int]]:
        slots = [(1, 1), (1, 2), (2, 1), (2, 2)]
        return [pos for pos, e in zip(slots, self.entries) if not e.is_zero]

    def _check_same_domain(self, other: "SymbolMatrix") -> None:
        if abs(self.s_end - other.s_end) > 1e-12 * max(1.0, self.s_end):
            raise PreconditionError(f"mismatched s_end: {self.s_end} vs {other.s_end}")

    def __add__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        self._check_same_domain(other)
        return SymbolMatrix(*(x + y for x, y in zip(self.entries, other.entries)), s_end=self.s_end)

    def __sub__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        self._check_same_domain(other)
        return SymbolMatrix(*(x - y for x, y in zip(self.entries, other.entries)), s_end=self.s_end)

    def __mul__(self, other: Union["SymbolMatrix", Number]) -> "SymbolMatrix":
        if not isinstance(other, SymbolMatrix):
            return self.scale(other)
        self._check_same_domain(other)
        a, b = self, other
        return SymbolMatrix(
            a.e11 * b.e11 + a.e12 * b.e21,
            a.e11 * b.e12 + a.e12 * b.e22,
            a.e21 * b.e11 + a.e22 * b.e21,
            a.e21 * b.e12 + a.e22 * b.e22,
            s_end=self.s_end,
        )

    def __rmul__(self, k: Number) -> "SymbolMatrix":
        return self.scale(k)

    def scale(self, k: Number) -> "SymbolMatrix":
        return SymbolMatrix(*(e.scale(k) for e in self.entries), s_end=self.s_end)

    def adjoint(self) -> "SymbolMatrix":
        return SymbolMatrix(
            self.e11.conj(), self.e21.conj(), self.e12.conj(), self.e22.conj(), s_end=self.s_end
        )

    def evaluate(self, t: Any) -> np.ndarray:
        """Array of shape t.shape + (2, 2)."""
        t_arr = np.asarray(t, dtype=float)
        out = np.empty(t_arr.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = self.e11(t_arr)
        out[..., 0, 1] = self.e12(t_arr)
        out[..., 1, 0] = self.e21(t_arr)
        out[..., 1, 1] = self.e22(t_arr)
        return out

    def allclose(self, other: "SymbolMatrix", tol: float = 1e-10) -> bool:
        self._check_same_domain(other)
        return all(x.allclose(y, tol) for x, y in zip(self.entries, other.entries))

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {k: e.to_json() for k, e in zip(("e11", "e12", "e21", "e22"), self.entries)}
        data["s_end"] = self.s_end
        return data

    @classmethod
    def from_json(cls, data: Any) -> "SymbolMatrix":
        if not isinstance(data, dict) or "s_end" not in data:
            raise SchemaError(f'symbol: expected entries e11..e22 and "s_end", got {data!r}')
        entries = [PowerSum.from_json(data.get(k, {"terms": []})) for k in ("e11", "e12", "e21", "e22")]
        return cls(*entries, s_end=float(data["s_end"]))


@dataclass(frozen=True)
class AlgebraElement:
    """cI + f(C*C) + g(CC*) + C p(C*C) + C* q(CC*) (+ compact), coefficient lists in t."""

    c: complex = 0j
    f: Tuple[complex, ...] = ()
    g: Tuple[complex, ...] = ()
    p: Tuple[complex, ...] = ()
    q: Tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", complex(self.c))
        for name in "fgpq":
            object.__setattr__(self, name, tuple(complex(x) for x in getattr(self, name)))
        for name in "fg":
            poly = getattr(self, name)
            if poly and abs(poly[0]) > 0:
                raise NotCanonicalError(f"not in canonical form: {name}(0) = {poly[0]} must vanish")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"c": complex_to_pair(self.c)}
        for name in "fgpq":
            data[name] = [complex_to_pair(x) for x in getattr(self, name)]
        return data

    @classmethod
    def from_json(cls, data: Any) -> "AlgebraElement":
        if not isinstance(data, dict):
            raise SchemaError(f"element: expected an object, got {data!r}")
        unknown = set(data) - set("cfgpq")
        if unknown:
            raise SchemaError(f"element: unknown fields {sorted(unknown)}")
        kwargs: Dict[str, Any] = {"c": pair_to_complex(data.get("c", 0), field="c")}
        for name in "fgpq":
            kwargs[name] = tuple(complex_list_from_json(data.get(name, []), field=name))
        return cls(**kwargs)


def psi_of_element(elem: AlgebraElement, s: float) -> SymbolMatrix:
    """Ψ(B) = [[c + g, √t·p], [√t·q, c + f]] on [0, s]."""
    if not s > 0:
        raise PreconditionError(f"s must be positive, got {s}")
    c = PowerSum.constant(elem.c)
    return SymbolMatrix(
        e11=c + PowerSum.from_polynomial(elem.g),
        e12=PowerSum.from_polynomial(elem.p, shift=0.5),
        e21=PowerSum.from_polynomial(elem.q, shift=0.5),
        e22=c + PowerSum.from_polynomial(elem.f),
        s_end=s,
    )


_WORD_TOKEN = re.compile(r"\s*(x\*?)")


def parse_word(word: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    """'x*x' or ['x*', 'x'] -> ('x*', 'x')."""
    if isinstance(word, str):
        tokens: List[str] = []
        pos = 0
        text = word.rstrip()
        while pos < len(text):
            m = _WORD_TOKEN.match(text, pos)
            if not m:
                raise SchemaError(f"word: unexpected {text[pos:]!r} in {word!r}")
            tokens.append(m.group(1))
            pos = m.end()
    else:
        tokens = list(word)
    if not tokens or any(tok not in ("x", "x*") for tok in tokens):
        raise SchemaError(f"word: expected a nonempty sequence over {{x, x*}}, got {word!r}")
    return tuple(tokens)


def generator_symbol(token: str, s: float) -> SymbolMatrix:
    root = PowerSum.monomial(1, 0.5)
    if token == "x":
        return SymbolMatrix(ZERO, root, ZERO, ZERO, s_end=s)
    if token == "x*":
        return SymbolMatrix(ZERO, ZERO, root, ZERO, s_end=s)
    raise SchemaError(f"unknown generator {token!r}")


def psi_of_word(word: Union[str, Sequence[str]], s: float) -> SymbolMatrix:
    tokens = parse_word(word)
    out = generator_symbol(tokens[0], s)
    for tok in tokens[1:]:
        out = out * generator_symbol(tok, s)
    return out


def word_to_element(word: Union[str, Sequence[str]]) -> AlgebraElement:
    """Canonical (c, f, g, p, q) form; words with a repeated letter are compact."""
    tokens = parse_word(word)
    if any(x == y for x, y in zip(tokens, tokens[1:])):
        return AlgebraElement()
    n = len(tokens)
    mono = lambda k: (0,) * k + (1,)  # noqa: E731
    if tokens[0] == "x":
        return AlgebraElement(p=mono((n - 1) // 2)) if n % 2 else AlgebraElement(g=mono(n // 2))
    return AlgebraElement(q=mono((n - 1) // 2)) if n % 2 else AlgebraElement(f=mono(n // 2))


def symbol_arith(op: str, *args: Any) -> SymbolMatrix:
    if op == "add":
        return args[0] + args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "adjoint":
        return args[0].adjoint()
    if op == "scalar":
        k, sym = args
        return sym.scale(k)
    raise SchemaError(f"unknown symbol operation {op!r}")


# ---------------------------------------------------------------------------
# Norma y espectro esencial
# ---------------------------------------------------------------------------


def _sigma_max(m: np.ndarray) -> np.ndarray:
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    rad = np.clip(fro2 ** 2 - 4 * np.abs(det) ** 2, 0.0, None)
    return np.sqrt((fro2 + np.sqrt(rad)) / 2)


def _grid_sup(fn: Callable[[np.ndarray], np.ndarray], hi: float, grid_n: int) -> float:
    """sup of fn on [0, hi]: grid maximum refined by bounded Brent search."""
    t = np.linspace(0.0, hi, grid_n)
    vals = fn(t)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo_t, hi_t = t[max(i - 1, 0)], t[min(i + 1, grid_n - 1)]
    if hi_t > lo_t:
        res = minimize_scalar(
            lambda x: -float(fn(np.array([x]))[0]),
            bounds=(lo_t, hi_t),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return best


def essential_norm(F: SymbolMatrix, grid_n: int = DEFAULT_GRID_N) -> float:
    """sup over [0, s] of the largest singular value of F(t)."""
    if grid_n < 2:
        raise PreconditionError(f"grid_n must be >= 2, got {grid_n}")
    return _grid_sup(lambda t: _sigma_max(F.evaluate(t)), F.s_end, grid_n)


@dataclass(frozen=True, eq=False)
class SampledSpectrum:
    """Sampled subset of the plane: all eigenvalues over the t grid."""

    t: np.ndarray
    points: np.ndarray

    def distance(self, z: Any) -> Any:
        z_arr = np.asarray(z, dtype=complex)
        d = np.min(np.abs(z_arr[..., None] - self.points[None, :] if z_arr.ndim else z_arr - self.points), axis=-1)
        return float(d) if np.ndim(d) == 0 else d

    def unique_points(self, decimals: int = 12) -> np.ndarray:
        rounded = np.round(self.points, decimals) + 0.0
        return np.unique(rounded)

    def to_json(self) -> Dict[str, Any]:
        return {
            "grid_n": int(self.t.size),
            "points": [complex_to_pair(z) for z in self.unique_points()],
        }


def _eigenvalues(m: np.ndarray) -> np.ndarray:
    tr = m[..., 0, 0] + m[..., 1, 1]
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    disc = np.sqrt(tr * tr / 4 - det + 0j)
    return np.stack([tr / 2 + disc, tr / 2 - disc], axis=-1)


def _refine_grid(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Insert samples where an eigenvalue branch jumps (near collisions)."""
    gaps = np.max(np.abs(np.diff(values, axis=0)), axis=-1)
    if gaps.size == 0:
        return t
    scale = max(float(np.median(gaps)), 1e-12)
    bad = np.nonzero(gaps > 4 * scale)[0]
    if bad.size == 0:
        return t
    extra = [np.linspace(t[i], t[i + 1], 10)[1:-1] for i in bad]
    logger.debug("essential_spectrum: refining %d intervals", bad.size)
    return np.sort(np.concatenate([t] + extra))


def essential_spectrum(F: SymbolMatrix, grid_n: int = DEFAULT_GRID_N) -> SampledSpectrum:
    if grid_n < 2:
        raise PreconditionError(f"grid_n must be >= 2, got {grid_n}")
    t = np.linspace(0.0, F.s_end, grid_n)
    t = _refine_grid(t, _eigenvalues(F.evaluate(t)))
    eig = _eigenvalues(F.evaluate(t))
    return SampledSpectrum(t=t, points=eig.reshape(-1))


# ---------------------------------------------------------------------------
# Símbolos de las cuatro filas (a)-(d)
# ---------------------------------------------------------------------------


class Table2Row(str, enum.Enum):
    """Which condition a linear-fractional ψ satisfies: ψ = ρ_{η,a}∘φ (a), ρ_{ζ,a} (b),
    ρ_{ζ,a}∘σ (c), ρ_{η,a} (d)."""

    A = "a"
    B = "b"
    C = "c"
    D = "d"


def _check_row_range(row: Table2Row, a: complex, b: float, c: float) -> None:
    if row is Table2Row.A:
        ok, bound = a.real > -b, f"Re a > -b = {-b}"
    elif row is Table2Row.C:
        ok, bound = a.real > -c, f"Re a > -c = {-c}"
    else:
        ok, bound = a.real > 0, "Re a > 0"
    if not ok:
        raise OutsideTranslationRangeError(
            f"outside admissible translation range: row ({row.value}) needs {bound}, got a = {a}"
        )


def table2_symbol(row: Union[Table2Row, str], a: Number, *, s: float, b: float, c: float) -> SymbolMatrix:
    row = Table2Row(row)
    a = complex(a)
    _check_row_range(row, a, b, c)
    if row is Table2Row.D:
        e = a / (2 * b)
        return SymbolMatrix(ZERO, ZERO, ZERO, PowerSum.monomial(_positive_power(s, -e), e), s_end=s)
    if row is Table2Row.B:
        e = a / (2 * c)
        return SymbolMatrix(PowerSum.monomial(_positive_power(s, -e), e), ZERO, ZERO, ZERO, s_end=s)
    if row is Table2Row.A:
        e = a / (2 * b)
        return SymbolMatrix(ZERO, PowerSum.monomial(_positive_power(s, -e), 0.5 + e), ZERO, ZERO, s_end=s)
    e = a / (2 * c)
    return SymbolMatrix(ZERO, ZERO, PowerSum.monomial(_positive_power(s, -e - 1), 0.5 + e), ZERO, s_end=s)


def _fmt(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.10g}"
    return f"({z.real:.10g}{z.imag:+.10g}i)"


def table2_representative(row: Union[Table2Row, str], a: Number, *, b: float, c: float) -> str:
    """Distinguished representative of [C_ψ], with U the polar factor of C_φ."""
    row = Table2Row(row)
    a = complex(a)
    if row is Table2Row.D:
        e = _fmt(a / (2 * b))
        return f"s^(-{e})·(C*C)^({e})"
    if row is Table2Row.B:
        e = _fmt(a / (2 * c))
        return f"s^(-{e})·(CC*)^({e})"
    if row is Table2Row.A:
        e = _fmt(a / (2 * b))
        return f"s^(-{e})·U·(C*C)^(1/2+{e})"
    e = _fmt(a / (2 * c))
    return f"s^(-{e}-1)·U*·(CC*)^(1/2+{e})"


def lambda_auto(F: SymbolMatrix, n: int) -> SymbolMatrix:
    """(ΛF)(t) = F(t^(2n+1)/s^(2n))."""
    if n < 1:
        raise PreconditionError(f"lambda_auto needs n >= 1, got {n}")
    s = F.s_end
    factor = s ** (-2 * n)
    return SymbolMatrix(*(e.substitute(2 * n + 1, factor) for e in F.entries), s_end=s)


# ---------------------------------------------------------------------------
# Álgebra parabólica
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParabolicCombination:
    """unit·I + Σ c_i C_{ρ_{γ,a_i}} with Re a_i > 0."""

    gamma: complex = 1 + 0j
    terms: Tuple[Tuple[complex, complex], ...] = ()  # (a_i, c_i)
    unit: complex = 0j

    def __post_init__(self) -> None:
        merged: Dict[complex, complex] = {}
        for a, c in self.terms:
            a, c = complex(a), complex(c)
            if not a.real > 0:
                raise OutsideTranslationRangeError(f"parabolic term needs Re a > 0, got a = {a}")
            key = next((k for k in merged if abs(k - a) <= EXPONENT_MERGE_TOL), a)
            merged[key] = merged.get(key, 0j) + c
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "unit", complex(self.unit))
        object.__setattr__(
            self, "terms", tuple(sorted(merged.items(), key=lambda ac: (ac[0].real, ac[0].imag)))
        )

    def __mul__(self, other: "ParabolicCombination") -> "ParabolicCombination":
        mine = [(0j, self.unit)] + list(self.terms)
        theirs = [(0j, other.unit)] + list(other.terms)
        unit = self.unit * other.unit
        terms = [(a1 + a2, c1 * c2) for a1, c1 in mine for a2, c2 in theirs if (a1 + a2) != 0]
        return ParabolicCombination(self.gamma, tuple(terms), unit)

    def adjoint(self) -> "ParabolicCombination":
        """C_{ρ_a}* ≡ C_{ρ_ā} modulo compacts."""
        return ParabolicCombination(
            self.gamma, tuple((a.conjugate(), c.conjugate()) for a, c in self.terms), self.unit.conjugate()
        )

    def mobius_terms(self) -> List[Tuple[complex, Mobius]]:
        out: List[Tuple[complex, Mobius]] = []
        if self.unit != 0:
            out.append((self.unit, Mobius.identity()))
        out.extend((c, parabolic(self.gamma, a)) for a, c in self.terms)
        return out

    def to_json(self) -> Dict[str, Any]:
        return {
            "gamma": complex_to_pair(self.gamma),
            "terms": [{"a": complex_to_pair(a), "c": complex_to_pair(c)} for a, c in self.terms],
            "unit": complex_to_pair(self.unit),
        }

    @classmethod
    def from_json(cls, data: Any) -> "ParabolicCombination":
        if not isinstance(data, dict):
            raise SchemaError(f"parabolic combination: expected an object, got {data!r}")
        terms = []
        for i, term in enumerate(data.get("terms", [])):
            if not isinstance(term, dict) or "a" not in term or "c" not in term:
                raise SchemaError(f'terms[{i}]: expected {{"a", "c"}}, got {term!r}')
            terms.append((pair_to_complex(term["a"], field="a"), pair_to_complex(term["c"], field="c")))
        return cls(
            gamma=pair_to_complex(data.get("gamma", 1), field="gamma"),
            terms=tuple(terms),
            unit=pair_to_complex(data.get("unit", 0), field="unit"),
        )


def gelfand(P: ParabolicCombination) -> PowerSum:
    """Γ⁻¹[P]: unit + Σ c_i t^{a_i} on [0, 1]; independent of γ."""
    return PowerSum(((P.unit, 0j),) + tuple((c, a) for a, c in P.terms))


def parabolic_ess_norm(P: ParabolicCombination, grid_n: int = DEFAULT_GRID_N) -> float:
    g = gelfand(P)
    return _grid_sup(lambda t: np.abs(g(t)), 1.0, grid_n)


def parabolic_ess_spectrum(P: ParabolicCombination, grid_n: int = DEFAULT_GRID_N) -> SampledSpectrum:
    t = np.linspace(0.0, 1.0, grid_n)
    return SampledSpectrum(t=t, points=np.asarray(gelfand(P)(t), dtype=complex))


@dataclass(frozen=True, eq=False)
class JointSpectrumCurve:
    """{(t^{a_1}, ..., t^{a_n}) : 0 <= t <= 1}, sampled."""

    exponents: Tuple[complex, ...]
    t: np.ndarray
    points: np.ndarray  # shape (grid_n, n)

    def to_json(self) -> Dict[str, Any]:
        return {
            "exponents": [complex_to_pair(a) for a in self.exponents],
            "t": [float(x) for x in self.t],
            "points": [[complex_to_pair(z) for z in row] for row in self.points],
        }


def joint_essential_spectrum(a_list: Sequence[Number], grid_n: int = DEFAULT_GRID_N) -> JointSpectrumCurve:
    exponents = tuple(complex(a) for a in a_list)
    if not exponents:
        raise PreconditionError("joint spectrum needs at least one exponent")
    for a in exponents:
        if not a.real > 0:
            raise OutsideTranslationRangeError(f"joint spectrum needs Re a > 0, got a = {a}")
    t = np.linspace(0.0, 1.0, grid_n)
    points = np.stack([PowerSum.monomial(1, a)(t) for a in exponents], axis=-1)
    return JointSpectrumCurve(exponents=exponents, t=t, points=points)

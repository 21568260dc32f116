import math
import unittest

import numpy as np
import pytest

from engines.errors import (
    NotCanonicalError,
    NotInImageAlgebraError,
    OutsideTranslationRangeError,
    PreconditionError,
    SchemaError,
)
from engines.symbols import (
    ZERO,
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
    parabolic_ess_norm,
    parabolic_ess_spectrum,
    parse_word,
    psi_of_element,
    psi_of_word,
    symbol_arith,
    table2_representative,
    table2_symbol,
    word_to_element,
)

GRID = np.linspace(0.0, 2.0, 33)


class TestPowerSum(unittest.TestCase):
    def test_like_exponents_merge(self):
        ps = PowerSum(((1, 0.5), (2, 0.5 + 1e-13)))
        self.assertEqual(len(ps.terms), 1)
        self.assertAlmostEqual(ps.terms[0][0], 3)

    def test_cancelled_terms_vanish(self):
        ps = PowerSum.monomial(1, 1.5) - PowerSum.monomial(1, 1.5)
        self.assertTrue(ps.is_zero)

    def test_value_at_zero(self):
        ps = PowerSum.constant(2) + PowerSum.monomial(5, 0.5)
        self.assertEqual(ps.value_at_zero(), 2)
        self.assertEqual(ps(0.0), 2)
        self.assertAlmostEqual(ps(4.0), 12)

    def test_vectorized_evaluation(self):
        ps = PowerSum.from_polynomial([0, 1, 1])
        np.testing.assert_allclose(ps(np.array([0.0, 1.0, 2.0])), [0, 2, 6])

    def test_invalid_exponents(self):
        # exponentes imaginarios puros no tienen límite en t = 0
        with self.assertRaises(NotInImageAlgebraError):
            PowerSum.monomial(1, 1j)
        with self.assertRaises(NotInImageAlgebraError):
            PowerSum.monomial(1, -0.5)

    def test_conj_and_substitute(self):
        ps = PowerSum.monomial(1j, 1 + 1j)
        t = 0.7
        self.assertAlmostEqual(ps.conj()(t), ps(t).conjugate())
        sub = ps.substitute(3, 0.25)
        self.assertAlmostEqual(sub(t), ps(0.25 * t ** 3))


def test_symbol_matrix_requires_scalar_value_at_zero():
    with pytest.raises(NotInImageAlgebraError):
        SymbolMatrix(PowerSum.constant(1), ZERO, ZERO, ZERO, 2)
    with pytest.raises(NotInImageAlgebraError):
        SymbolMatrix(ZERO, PowerSum.constant(1), ZERO, ZERO, 2)
    SymbolMatrix.identity(2)


def test_mismatched_domains_are_rejected():
    with pytest.raises(PreconditionError, match="mismatched s_end"):
        SymbolMatrix.identity(2) * SymbolMatrix.identity(3)


def test_words_and_elements_agree():
    x_star_x = psi_of_word("x*x", 2)
    assert x_star_x.allclose(SymbolMatrix(ZERO, ZERO, ZERO, PowerSum.monomial(1, 1), 2))
    assert word_to_element("x*x") == AlgebraElement(f=(0, 1))
    for word in ("x", "x*", "xx*", "x*x", "xx*x", "x*xx*", "xx*xx*"):
        assert psi_of_element(word_to_element(word), 2).allclose(psi_of_word(word, 2)), word


def test_words_with_repeated_letters_are_compact():
    assert psi_of_word("xx", 2).is_zero
    assert word_to_element("x x* x*") == AlgebraElement()


def test_parse_word():
    assert parse_word("x*x") == ("x*", "x")
    assert parse_word(["x", "x*"]) == ("x", "x*")
    with pytest.raises(SchemaError):
        parse_word("xy")
    with pytest.raises(SchemaError):
        parse_word("")


def test_algebra_element_canonical_form():
    with pytest.raises(NotCanonicalError, match="not in canonical form"):
        AlgebraElement(f=(1,))
    with pytest.raises(SchemaError):
        AlgebraElement.from_json({"c": 1, "h": []})
    elem = AlgebraElement.from_json({"c": [1, 0], "p": [[0, 0], [1, 0]]})
    assert elem == AlgebraElement(c=1, p=(0, 1))


def test_essential_norm_known_values():
    assert essential_norm(psi_of_word("x", 2)) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert essential_norm(SymbolMatrix.identity(2)) == pytest.approx(1)
    assert essential_norm(psi_of_word("x*x", 2)) == pytest.approx(2, abs=1e-12)
    # C + C*: autovalores ±√t
    assert essential_norm(psi_of_element(AlgebraElement(p=(1,), q=(1,)), 2)) == pytest.approx(
        math.sqrt(2), abs=1e-12
    )


def test_essential_norm_of_adjoint():
    F = psi_of_element(AlgebraElement(c=0.5, f=(0, 1j), p=(1, -2), q=(0.3,)), 2)
    assert essential_norm(F.adjoint()) == pytest.approx(essential_norm(F), abs=1e-10)
    assert F.adjoint().adjoint().allclose(F)


def test_symbol_arith_is_multiplicative():
    F = psi_of_element(AlgebraElement(c=1, p=(1,), g=(0, 2)), 2)
    G = psi_of_element(AlgebraElement(q=(0, 1j), f=(0, 1)), 2)
    product = symbol_arith("mul", F, G)
    np.testing.assert_allclose(product.evaluate(GRID), F.evaluate(GRID) @ G.evaluate(GRID), atol=1e-12)
    total = symbol_arith("add", F, symbol_arith("scalar", -1, F))
    assert total.is_zero
    with pytest.raises(SchemaError):
        symbol_arith("div", F, G)


def test_essential_spectrum_of_nilpotent_symbol():
    sigma = essential_spectrum(psi_of_word("x", 2), grid_n=65)
    assert np.max(np.abs(sigma.points)) <= 1e-12
    assert sigma.distance(0) <= 1e-12


def test_essential_spectrum_of_diagonal_symbol():
    sigma = essential_spectrum(psi_of_word("x*x", 2), grid_n=65)
    # el espectro contiene 0 y el segmento [0, 2]
    assert sigma.distance(0) <= 1e-12
    assert sigma.distance(1.0) <= 2.0 / 64
    assert sigma.distance(2.0) <= 1e-12


def test_table2_symbol_slots():
    b, c, s = 0.2, 0.1, 2.0
    assert table2_symbol("a", 0, s=s, b=b, c=c).allclose(psi_of_word("x", s))
    row_d = table2_symbol(Table2Row.D, 2 * b, s=s, b=b, c=c)
    assert row_d.nonzero_positions() == [(2, 2)]
    np.testing.assert_allclose(row_d.evaluate(GRID)[:, 1, 1], GRID / s, atol=1e-14)
    row_b = table2_symbol("b", 0.3, s=s, b=b, c=c)
    assert row_b.nonzero_positions() == [(1, 1)]
    row_c = table2_symbol("c", 2 * c, s=s, b=b, c=c)
    assert row_c.allclose(SymbolMatrix(ZERO, ZERO, PowerSum.monomial(0.25, 1.5), ZERO, s))


def test_table2_symbol_at_eta():
    # ρ_{η,0.3} con b = 0.2: diag(0, (t/2)^0.75)
    sym = table2_symbol("d", 0.3, s=2, b=0.2, c=0.1)
    np.testing.assert_allclose(sym.evaluate(GRID)[:, 1, 1], (GRID / 2) ** 0.75, atol=1e-14)


def test_table2_symbol_range():
    with pytest.raises(OutsideTranslationRangeError, match="outside admissible translation range"):
        table2_symbol("a", -0.25, s=2, b=0.2, c=0.1)
    with pytest.raises(OutsideTranslationRangeError):
        table2_symbol("d", 0, s=2, b=0.2, c=0.1)
    table2_symbol("a", -0.1, s=2, b=0.2, c=0.1)


def test_table2_representative():
    assert table2_representative("d", 0.4, b=0.2, c=0.1) == "s^(-1)·(C*C)^(1)"
    assert "U*" in table2_representative("c", 0.2, b=0.2, c=0.1)


def test_lambda_auto_example():
    lam = lambda_auto(psi_of_word("x", 2), 1)
    assert lam.allclose(SymbolMatrix(ZERO, PowerSum.monomial(0.5, 1.5), ZERO, ZERO, 2))
    with pytest.raises(PreconditionError):
        lambda_auto(psi_of_word("x", 2), 0)


def test_lambda_auto_is_multiplicative_and_preserves_norm():
    F = psi_of_element(AlgebraElement(c=0.5, p=(1, 1j), f=(0, -1)), 2)
    G = psi_of_element(AlgebraElement(q=(2,), g=(0, 0, 1)), 2)
    for n in (1, 2, 3):
        lhs = lambda_auto(F * G, n)
        rhs = lambda_auto(F, n) * lambda_auto(G, n)
        np.testing.assert_allclose(lhs.evaluate(GRID), rhs.evaluate(GRID), atol=1e-10)
        assert essential_norm(lambda_auto(F, n)) == pytest.approx(essential_norm(F), abs=1e-9)


def test_symbol_json_round_trip():
    F = psi_of_element(AlgebraElement(c=1j, p=(1, 2), g=(0, 0.5)), 2)
    assert SymbolMatrix.from_json(F.to_json()).allclose(F)
    with pytest.raises(SchemaError):
        SymbolMatrix.from_json({"e11": {"terms": []}})


def test_gelfand_transform():
    P = ParabolicCombination(1, ((1, 2), (2, -1)))
    assert parabolic_ess_norm(P) == pytest.approx(1.0, abs=1e-10)
    assert gelfand(P).allclose(PowerSum(((2, 1), (-1, 2))))
    Q = ParabolicCombination(1j, ((0.5 + 1j, 1),), unit=3)
    assert gelfand(P * Q).allclose(gelfand(P) * gelfand(Q))
    assert gelfand(Q.adjoint()).allclose(gelfand(Q).conj())


def test_parabolic_combination_merges_and_validates():
    P = ParabolicCombination(1, ((1, 2), (1, 3)))
    assert P.terms == ((1, 5),)
    with pytest.raises(OutsideTranslationRangeError):
        ParabolicCombination(1, ((0, 1),))
    assert ParabolicCombination.from_json(P.to_json()) == P


def test_parabolic_ess_spectrum_is_the_gelfand_curve():
    sigma = parabolic_ess_spectrum(ParabolicCombination(1, ((1, 1),)), grid_n=11)
    np.testing.assert_allclose(sigma.points.real, np.linspace(0, 1, 11))


def test_joint_spectrum_example():
    curve = joint_essential_spectrum([1, 1 + 1j], grid_n=101)
    np.testing.assert_allclose(np.abs(curve.points[:, 1]), np.abs(curve.points[:, 0]), atol=1e-14)
    assert curve.points[0, 0] == 0
    with pytest.raises(OutsideTranslationRangeError):
        joint_essential_spectrum([1j])

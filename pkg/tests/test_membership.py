import numpy as np
import pytest

from engines.boundary import BoundaryProfile, DataVector, tangency_set
from engines.errors import InadmissibleSymbolError, MalformedProfileError, NotInImageAlgebraError, SchemaError
from engines.membership import (
    Condition,
    PhiContext,
    case_profile,
    coset_decompose,
    combination_symbol,
    general_membership,
    linfrac_membership,
    make_context,
    necessity_check,
)
from engines.moebius import Mobius, compose, parabolic, projective_eq
from engines.symbols import AlgebraElement, Table2Row, psi_of_element, psi_of_word

PHI = Mobius(-7, -3, 2, 8)
GRID = np.linspace(0.0, 2.0, 41)


@pytest.fixture(scope="module")
def ctx():
    return make_context(PHI)


def test_context_of_running_example(ctx):
    assert ctx.zeta == pytest.approx(1, abs=1e-10)
    assert ctx.eta == pytest.approx(-1, abs=1e-10)
    assert ctx.s == pytest.approx(2)
    assert ctx.b == pytest.approx(0.2)
    assert ctx.c == pytest.approx(0.1)
    assert projective_eq(ctx.sigma, Mobius(-7, -2, 3, 8))
    assert PhiContext.from_json(ctx.to_json()).s == pytest.approx(ctx.s)


@pytest.mark.parametrize(
    "phi",
    [parabolic(1, 1), Mobius.rotation(1j), Mobius(0.5, 0, 0, 1), Mobius(2, 0, 0, 1)],
    ids=["boundary-fixed-point", "automorphism", "compact", "not-a-self-map"],
)
def test_context_rejects_inadmissible_maps(phi):
    with pytest.raises(InadmissibleSymbolError, match="phi not admissible"):
        make_context(phi)


def test_phi_itself_is_row_a(ctx):
    verdict = linfrac_membership(ctx, PHI)
    assert verdict.member and verdict.condition is Condition.A
    assert abs(verdict.family_parameter) <= 1e-9
    assert verdict.symbol.allclose(psi_of_word("x", ctx.s))


def test_parabolic_at_eta_is_row_d(ctx):
    verdict = linfrac_membership(ctx, parabolic(-1, 0.3))
    assert verdict.condition is Condition.D
    assert verdict.family_parameter == pytest.approx(0.3)
    assert verdict.symbol.nonzero_positions() == [(2, 2)]
    np.testing.assert_allclose(verdict.symbol.evaluate(GRID)[:, 1, 1], (GRID / 2) ** 0.75, atol=1e-9)


def test_parabolic_at_zeta_is_row_b(ctx):
    verdict = linfrac_membership(ctx, parabolic(1, 0.5))
    assert verdict.condition is Condition.B
    assert verdict.symbol.nonzero_positions() == [(1, 1)]


def test_translate_of_sigma_is_row_c(ctx):
    verdict = linfrac_membership(ctx, compose(parabolic(1, 0.3), ctx.sigma))
    assert verdict.condition is Condition.C
    assert verdict.family_parameter == pytest.approx(0.3)
    assert verdict.symbol.nonzero_positions() == [(2, 1)]


def test_translation_range_for_row_a(ctx):
    inside = linfrac_membership(ctx, compose(parabolic(-1, -0.1, allow_negative=True), PHI))
    assert inside.member and inside.condition is Condition.A
    assert inside.family_parameter == pytest.approx(-0.1)

    outside = linfrac_membership(ctx, compose(parabolic(-1, -0.25, allow_negative=True), PHI))
    assert not outside.member
    assert "outside admissible translation range" in outside.reason


def test_identity_compact_and_automorphisms(ctx):
    ident = linfrac_membership(ctx, Mobius.identity())
    assert ident.member and ident.condition is Condition.IDENTITY
    assert ident.symbol.allclose(psi_of_element(AlgebraElement(c=1), ctx.s))

    compact = linfrac_membership(ctx, Mobius(0.5, 0, 0, 1))
    assert compact.member and compact.condition is Condition.COMPACT
    assert compact.symbol.is_zero

    # ρ_{ζ,i} es un automorfismo parabólico
    assert not linfrac_membership(ctx, parabolic(1, 1j)).member
    assert not linfrac_membership(ctx, parabolic(1j, 0.5)).member


def test_necessity_check(ctx):
    row_a = BoundaryProfile(entries=(DataVector(1, (-1, -0.5)),), contact_orders=(2,))
    assert necessity_check(ctx, row_a) is Condition.A

    case_e = BoundaryProfile(
        entries=(DataVector(1, (-1, -0.5)), DataVector(-1, (-1, 1))), contact_orders=(2, 2)
    )
    assert necessity_check(ctx, case_e) is Condition.E

    case_f = BoundaryProfile(
        entries=(DataVector(-1, (1, -2)), DataVector(1, (1, 1))), contact_orders=(2, 2)
    )
    assert necessity_check(ctx, case_f) is Condition.F

    off = BoundaryProfile(entries=(DataVector(1j, (1j, 1)),), contact_orders=(2,))
    assert necessity_check(ctx, off) is Condition.NONE
    assert necessity_check(ctx, BoundaryProfile()) is Condition.COMPACT


def test_cases_e_and_f_exclude_each_other(ctx):
    e_entries = (DataVector(1, (-1, -0.5)), DataVector(-1, (-1, 1)))
    f_entries = (DataVector(-1, (1, -2)), DataVector(1, (1, 1)))
    # un perfil con (e) y (f) a la vez repite ζ y η
    both = {
        "entries": [dv.to_json() for dv in e_entries + f_entries],
        "contact_orders": [2, 2, 2, 2],
    }
    with pytest.raises(MalformedProfileError, match="repeated boundary point"):
        BoundaryProfile.from_json(both)

    # ζ ↦ η y η ↦ ζ: ψ∘ψ tendría que ser la identidad
    swap = BoundaryProfile(entries=(e_entries[0], f_entries[0]), contact_orders=(2, 2))
    assert necessity_check(ctx, swap) is Condition.NONE
    fixes_both = BoundaryProfile(entries=(f_entries[1], e_entries[1]), contact_orders=(2, 2))
    assert necessity_check(ctx, fixes_both) is Condition.NONE
    assert not general_membership(ctx, swap).member


def test_general_membership_of_linear_fractional_profile(ctx):
    verdict = general_membership(ctx, tangency_set(PHI))
    assert verdict.member and verdict.condition is Condition.A
    ((coeff, beta),) = verdict.decomposition
    assert coeff == 1
    assert projective_eq(beta, PHI, 1e-9)


def test_case_e_profile_is_a_member(ctx):
    verdict = general_membership(ctx, case_profile(ctx, "e"))
    assert verdict.member and verdict.condition is Condition.E
    assert sorted(verdict.symbol.nonzero_positions()) == [(1, 2), (2, 2)]
    assert len(verdict.decomposition) == 2


def test_case_f_profile_is_a_member(ctx):
    verdict = general_membership(ctx, case_profile(ctx, "f"))
    assert verdict.member and verdict.condition is Condition.F
    assert sorted(verdict.symbol.nonzero_positions()) == [(1, 1), (2, 1)]


def test_higher_contact_is_not_a_member(ctx):
    profile = case_profile(ctx, "e")
    osculating = BoundaryProfile(entries=profile.entries, contact_orders=(4, 2))
    verdict = general_membership(ctx, osculating)
    assert not verdict.member
    assert verdict.reason == "order of contact exceeds two"


def test_case_profile_rejects_unknown_case(ctx):
    with pytest.raises(SchemaError):
        case_profile(ctx, "g")


def test_coset_decompose_known_values(ctx):
    ((coeff, psi),) = coset_decompose(ctx, AlgebraElement(p=(1,)))
    assert coeff == 1 and projective_eq(psi, PHI, 1e-12)

    ((coeff, psi),) = coset_decompose(ctx, AlgebraElement(f=(0, 1)))
    assert coeff == pytest.approx(2)
    assert projective_eq(psi, compose(PHI, ctx.sigma), 1e-12)

    assert coset_decompose(ctx, AlgebraElement()) == []


@pytest.mark.parametrize(
    "elem",
    [
        AlgebraElement(c=1, p=(1,)),
        AlgebraElement(f=(0, 1), g=(0, 2j)),
        AlgebraElement(c=0.5, p=(1, -1), q=(0.3, 0, 1)),
        AlgebraElement(f=(0, 0, 1), q=(1j,)),
    ],
)
def test_coset_decomposition_reproduces_the_symbol(ctx, elem):
    symbol = combination_symbol(ctx, coset_decompose(ctx, elem))
    np.testing.assert_allclose(
        symbol.evaluate(GRID), psi_of_element(elem, ctx.s).evaluate(GRID), atol=1e-8
    )


def test_combination_symbol_rejects_non_members(ctx):
    with pytest.raises(NotInImageAlgebraError):
        combination_symbol(ctx, [(1, parabolic(1, 1j))])


def test_membership_positions_follow_the_row(ctx):
    expected = {Table2Row.A: (1, 2), Table2Row.B: (1, 1), Table2Row.C: (2, 1), Table2Row.D: (2, 2)}
    maps = {
        Table2Row.A: compose(parabolic(-1, 0.2), PHI),
        Table2Row.B: parabolic(1, 0.4),
        Table2Row.C: compose(parabolic(1, 0.1), ctx.sigma),
        Table2Row.D: parabolic(-1, 0.7),
    }
    for row, psi in maps.items():
        verdict = linfrac_membership(ctx, psi)
        assert verdict.table2_row is row
        assert verdict.symbol.nonzero_positions() == [expected[row]]

import json
import logging
import math

import numpy as np
import pytest

from engines.blaschke import BlaschkeProduct
from engines.boundary import BoundaryProfile, DataVector
from engines.errors import PoleInsideDiskError, PreconditionError, SchemaError
from engines.moebius import Mobius, compose, parabolic
from engines.numerics import (
    composition_matrix,
    gamma_circle,
    gamma_point_at_distance,
    kernel_gram,
    lb1,
    lb2,
    lb3_limit_check,
    lb3_rhs,
    lbext,
    mod_compact_selfadjoint_check,
    operator_norm,
    tail_norm,
    taylor_coeffs,
)

PHI = Mobius(-7, -3, 2, 8)


def test_taylor_coeffs_known_values():
    np.testing.assert_allclose(taylor_coeffs(Mobius(1, 0, -1, 2), 4), [0, 0.5, 0.25, 0.125], atol=1e-15)
    np.testing.assert_allclose(taylor_coeffs(Mobius.identity(), 3), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(taylor_coeffs(PHI, 2), [-3 / 8, -25 / 32], atol=1e-15)


def test_taylor_coeffs_of_blaschke_and_chains():
    np.testing.assert_allclose(taylor_coeffs(BlaschkeProduct(((0, 2),)), 4), [0, 0, 1, 0], atol=1e-15)
    f, g = Mobius(1, 0.2, 0.1, 3), Mobius(0.5, 0.1j, 0.2, 1)
    np.testing.assert_allclose(taylor_coeffs([f, g], 12), taylor_coeffs(compose(f, g), 12), atol=1e-13)


def test_taylor_coeffs_pole_inside_disk():
    with pytest.raises(PoleInsideDiskError, match="pole inside disk"):
        taylor_coeffs(Mobius(1, 0, 1, -0.5), 4)


def test_composition_matrix_columns():
    np.testing.assert_allclose(composition_matrix(Mobius.identity(), 5).entries, np.eye(5))
    M = composition_matrix(Mobius(1, 0, -1, 2), 3).entries
    np.testing.assert_allclose(M[:, 2], [0, 0, 0.25], atol=1e-15)
    np.testing.assert_allclose(composition_matrix(Mobius(0.5, 0, 0, 1), 4).entries, np.diag([1, 0.5, 0.25, 0.125]))


def test_composition_matrix_is_anti_multiplicative():
    # con ψ(0) = χ(0) = 0 las secciones son triangulares y el producto es exacto
    psi = Mobius(1, 0, -0.3, 2)
    chi = Mobius(0.5, 0, 0.2j, 1)
    lhs = composition_matrix(compose(psi, chi), 16).entries
    rhs = composition_matrix(chi, 16).entries @ composition_matrix(psi, 16).entries
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def _random_contraction(rng):
    # q + r·λ(z − p)/(1 − p̄z): |·| <= 0.6 en el disco cerrado
    p = 0.3 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    q = 0.2 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    lam = np.exp(2j * np.pi * rng.uniform())
    r = rng.uniform(0.2, 0.4)
    return Mobius(r * lam - q * np.conj(p), q - r * lam * p, -np.conj(p), 1)


def test_composition_matrix_product_on_random_contractions():
    rng = np.random.default_rng(11)
    N, keep = 48, 36
    for _ in range(20):
        psi, chi = _random_contraction(rng), _random_contraction(rng)
        lhs = composition_matrix(compose(psi, chi), N).entries
        rhs = composition_matrix(chi, N).entries @ composition_matrix(psi, N).entries
        np.testing.assert_allclose(lhs[:keep, :keep], rhs[:keep, :keep], atol=1e-8)


def test_composition_matrix_bounds():
    with pytest.raises(PreconditionError):
        composition_matrix(PHI, 0)
    with pytest.raises(PreconditionError):
        composition_matrix(PHI, 5000)


def test_operator_and_tail_norms():
    assert operator_norm(np.eye(3)) == pytest.approx(1)
    D = np.diag([2.0 ** -k for k in range(8)])
    assert operator_norm(D) == pytest.approx(1)
    assert tail_norm(D, 3) == pytest.approx(1 / 8)
    assert operator_norm(np.zeros((2, 2))) == 0
    with pytest.raises(PreconditionError):
        tail_norm(D, 8)


def test_export_formats(tmp_path):
    T = composition_matrix(Mobius(0.5, 0, 0, 1), 3)
    (path,) = T.export(tmp_path / "m.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["n"] == 3
    assert data["entries"][1][1] == [0.5, 0.0]

    binary, sidecar = T.export(tmp_path / "m.bin", fmt="binary")
    assert binary.stat().st_size == 16 * 9
    assert json.loads(sidecar.read_text(encoding="utf-8"))["dtype"] == "complex128"
    np.testing.assert_allclose(np.fromfile(binary, dtype="<c16").reshape(3, 3), T.entries)
    with pytest.raises(SchemaError):
        T.export(tmp_path / "m.txt", fmt="csv")


def test_kernel_gram_values():
    assert kernel_gram([(1, Mobius.identity())], 0.3 + 0.2j) == pytest.approx(1)
    # Julia–Carathéodory: el cociente tiende a 1/|φ'(ζ)| = 2
    assert kernel_gram([(1, PHI)], 1 - 1e-6) == pytest.approx(2, abs=1e-4)
    assert kernel_gram([(1, Mobius(0.5, 0, 0, 1))], 1 - 1e-6) < 1e-5
    with pytest.raises(PreconditionError):
        kernel_gram([(1, PHI)], 1.0)


def test_gamma_circle_known_values():
    assert gamma_circle(1, 0.25, math.pi) == pytest.approx(0, abs=1e-15)
    assert gamma_circle(1j, 1, math.pi) == pytest.approx(-0.6j)
    assert gamma_circle(1j, 1, 0) == pytest.approx(1j)


@pytest.mark.parametrize("alpha, D", [(1, 1), (1j, 0.3), (np.exp(2j), 2.5)])
def test_gamma_circle_locus(alpha, D):
    for theta in np.linspace(0.3, 2 * np.pi - 0.3, 9):
        z = gamma_circle(alpha, D, theta)
        assert (1 - abs(z) ** 2) / abs(alpha - z) ** 2 == pytest.approx(1 / (4 * D), rel=1e-10)


def test_gamma_point_at_distance():
    z = gamma_point_at_distance(1, 1, 1e-3)
    assert abs(z) == pytest.approx(1 - 1e-3, rel=1e-12)
    assert z.imag > 0
    with pytest.raises(PreconditionError):
        gamma_point_at_distance(1, 1, 0)


def test_lb1_known_values(caplog):
    assert lb1([(1, PHI)], 1) == pytest.approx(2)
    assert lb1([(1, PHI), (-1, PHI)], 1) == pytest.approx(0, abs=1e-12)
    assert lb1([(1, PHI), (1, PHI)], 1) == pytest.approx(8)
    with caplog.at_level(logging.WARNING, logger="engines.numerics"):
        assert lb1([(1, PHI)], 1j) == 0
    assert "no angular-derivative set" in caplog.text


def test_lb1_separates_first_order_classes():
    rho = parabolic(1, 0.5)
    # ρ y la identidad comparten D_1 en 1; ρ_{-1,0.3} no tiene derivada angular en 1
    assert lb1([(1, rho), (-1, Mobius.identity()), (3, parabolic(-1, 0.3))], 1) == pytest.approx(0, abs=1e-12)
    assert lb1([(1, rho), (3, PHI)], 1) == pytest.approx(1 + 18)
    assert lb1([(1, PHI), (1, compose(parabolic(-1, 0.3), PHI))], 1) == pytest.approx(8)


def test_lb2_uses_higher_contact_only():
    osculating = BoundaryProfile(entries=(DataVector(1, (1, 1, 0)),), contact_orders=(4,))
    assert lb2([(1, osculating), (-1, parabolic(1, 0.5))], 1, 3) == pytest.approx(1)
    assert lb2([(1, parabolic(1, 0.5)), (2, parabolic(1, 0.7))], 1, 2) == pytest.approx(9)
    with pytest.raises(PreconditionError):
        lb2([(1, PHI)], 1, 4)


def test_lbext():
    assert lbext([(1, Mobius.identity())]) == pytest.approx(1)
    assert lbext([(1, Mobius.identity()), (1, Mobius(2, 0, 0, 2))]) == pytest.approx(4)
    assert lbext([(1, PHI)]) == 0
    assert lbext([(1j, Mobius.rotation(1j)), (1, Mobius.identity())]) == pytest.approx(2)


def test_lb3_rhs_known_values():
    assert lb3_rhs([(1, parabolic(1, 1))], 1, 1) == pytest.approx(0.2)
    assert lb3_rhs([(1, Mobius.identity())], 1, 1) == pytest.approx(1)
    assert lb3_rhs([(1, PHI)], 1j, 1) == 0
    with pytest.raises(PreconditionError):
        lb3_rhs([(1, PHI)], 1, 0)


def test_lb3_limit_along_gamma():
    report = lb3_limit_check([(1, parabolic(1, 1)), (-0.5, parabolic(1, 2))], 1, 1)
    assert report.errors[-1] < 1e-3
    assert report.converged


def test_mod_compact_check_for_identity():
    report = mod_compact_selfadjoint_check(0, N=32)
    assert report.tails == (0.0, 0.0, 0.0)
    assert report.decreasing
    with pytest.raises(PreconditionError):
        mod_compact_selfadjoint_check(-1)


def test_mod_compact_check_for_real_translation(caplog):
    with caplog.at_level(logging.WARNING, logger="engines.numerics"):
        report = mod_compact_selfadjoint_check(1, N=256)
    assert report.cutoffs == (32, 64, 128)
    assert report.decreasing
    assert report.tails == pytest.approx((0.0804, 0.0594, 0.0436), rel=2e-2)
    assert "do not decrease" not in caplog.text


def test_mod_compact_tail_is_stable_in_the_section_size():
    def tail(N, n0=2):
        M = composition_matrix(parabolic(1, 1), N).entries
        return tail_norm(M.conj().T - M, n0)

    small, large = tail(32), tail(64)
    # la sección de 32 es un bloque de la de 64
    assert small <= large * (1 + 1e-6)
    assert large == pytest.approx(small, rel=0.1)


def test_mod_compact_check_warns_when_tails_stall(monkeypatch, caplog):
    monkeypatch.setattr("engines.numerics.tail_norm", lambda M, n0: 0.5)
    with caplog.at_level(logging.WARNING, logger="engines.numerics"):
        report = mod_compact_selfadjoint_check(1, N=16)
    assert not report.decreasing
    assert "do not decrease" in caplog.text

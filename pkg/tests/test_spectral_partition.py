from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from conic_xi.char_algebra import TorusElement
from conic_xi.model_cones import ConeModel, xi_tilde
from conic_xi.spectral_partition import (
    GRSectorError,
    LinkMode,
    Sector,
    Slot,
    THRESHOLD_HALF,
    THRESHOLD_VOLUME,
    beta_shift,
    circle_link_spectrum,
    classify,
    harmonic_extension,
    kernel_ode_residual,
    spectral_witt_holds,
    xi_spectral,
)


# ---------------------------------------------------------------------------
# spectrum enumeration
# ---------------------------------------------------------------------------


def test_spectrum_integer_eigenvalues_at_alpha_one():
    modes = circle_link_spectrum(1, 3, rotation=0.5)
    eigs = sorted(m.eigenvalue for m in modes)
    assert eigs == [Fraction(k) for k in range(-3, 4)]


def test_spectral_witt_fails_for_wide_cone():
    assert not spectral_witt_holds(3)
    modes = circle_link_spectrum(3, 2, rotation=0.0)
    in_window = [m for m in modes
                 if m.eigenvalue != 0 and abs(m.eigenvalue) < Fraction(1, 2)]
    assert {m.eigenvalue for m in in_window} == {Fraction(1, 3), Fraction(-1, 3)}


def test_spectral_witt_holds_with_gap_two():
    assert spectral_witt_holds(Fraction(1, 2))
    modes = circle_link_spectrum(Fraction(1, 2), 3, rotation=0.0)
    nonzero = sorted(abs(m.eigenvalue) for m in modes if m.eigenvalue != 0)
    assert nonzero[0] == 2


def test_character_coefficients():
    phi = 0.8
    modes = {m.angular_index: m for m in circle_link_spectrum(2, 3, rotation=phi)}
    for k in range(-3, 4):
        assert modes[k].char_coeff == pytest.approx(np.exp(1j * k * phi / 2))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def test_positive_mode_extends_holomorphically():
    mode = circle_link_spectrum(1, 3, 0.0)[5]  # k = +2
    out = classify(mode, 1)
    assert out.sector == Sector.H1
    assert out.slot == Slot.G_PLUS
    assert out.radial_exponent == 2


def test_negative_mode_extends_on_adjoint_side():
    mode = [m for m in circle_link_spectrum(1, 3, 0.0) if m.angular_index == -2][0]
    out = classify(mode, 1)
    assert out.sector == Sector.H2
    assert out.slot == Slot.BETA_G_PLUS
    assert out.radial_exponent == 1  # the conormal form with one power of z-bar


def test_third_sector_empty_for_circle_links():
    modes = [classify(m, 1) for m in circle_link_spectrum(1, 50, 0.3)]
    assert all(m.sector != Sector.H3 for m in modes)


def test_window_mode_flagged_for_boundary_pairing():
    mode = [m for m in circle_link_spectrum(3, 3, 0.0) if m.angular_index == -1][0]
    out = classify(mode, 3, THRESHOLD_HALF)
    assert out.sector == Sector.GR
    # volume-form convention widens the flagged window to the whole block
    out2 = classify([m for m in circle_link_spectrum(3, 3, 0.0) if m.angular_index == -2][0],
                    3, THRESHOLD_VOLUME)
    assert out2.sector == Sector.GR
    # under the stricter threshold the -2 mode is a regular adjoint-side mode
    out3 = classify([m for m in circle_link_spectrum(3, 3, 0.0) if m.angular_index == -2][0],
                    3, THRESHOLD_HALF)
    assert out3.sector == Sector.H2


def test_every_mode_gets_exactly_one_sector(rng):
    for alpha in (1, Fraction(1, 2), Fraction(5, 2)):
        modes = [classify(m, alpha) for m in circle_link_spectrum(alpha, 200, 1.1)]
        assert all(m.sector is not None for m in modes)
        h1 = [m for m in modes if m.sector == Sector.H1]
        h2 = [m for m in modes if m.sector == Sector.H2]
        gr = [m for m in modes if m.sector == Sector.GR]
        assert len(h1) + len(h2) + len(gr) == len(modes)
        # slot/boundary correspondence
        assert all(m.slot == Slot.G_PLUS for m in h1)
        assert all(m.slot == Slot.BETA_G_PLUS for m in h2)


def test_beta_shift_flips_eigenvalue_sign():
    mode = classify(circle_link_spectrum(1, 3, 0.0)[6], 1)  # k = +3
    flipped = beta_shift(mode)
    assert flipped.eigenvalue == -mode.eigenvalue
    assert flipped.slot == Slot.BETA_G_PLUS
    assert beta_shift(flipped).eigenvalue == mode.eigenvalue


# ---------------------------------------------------------------------------
# harmonic extensions and the kernel equation
# ---------------------------------------------------------------------------


def test_extension_of_eigenvalue_minus_two():
    # kernel coefficient -2 -> u = x^2
    mode = classify([m for m in circle_link_spectrum(1, 3, 0.0) if m.angular_index == 2][0], 1)
    mu = harmonic_extension(mode)
    assert mu == 2
    assert mode.kernel_lambda == -2


def test_window_extension_flagged():
    mode = classify([m for m in circle_link_spectrum(3, 2, 0.0) if m.angular_index == -1][0], 3)
    assert mode.radial_exponent == Fraction(-1, 3)
    with pytest.raises(GRSectorError):
        harmonic_extension(mode)


def test_zero_mode_is_constant():
    mode = classify([m for m in circle_link_spectrum(1, 2, 0.0) if m.angular_index == 0][0], 1)
    assert harmonic_extension(mode) == 0
    assert mode.sector == Sector.H1


def test_kernel_residual_exactly_zero_rational():
    for alpha in (1, Fraction(1, 2), Fraction(5, 2)):
        for m in circle_link_spectrum(alpha, 500, 0.7):
            cm = classify(m, alpha)
            if cm.sector in (Sector.H1, Sector.H2):
                r = kernel_ode_residual(cm, alpha)
                assert isinstance(r, Fraction)
                assert r == 0


# ---------------------------------------------------------------------------
# the spectral xi function
# ---------------------------------------------------------------------------


def test_xi_spectral_matches_cohomological_route():
    phi = 2 * math.pi / 7
    modes = circle_link_spectrum(1, 3000, phi)
    rep = xi_spectral(modes, alpha=1)
    target = 1 / (1 - np.exp(1j * phi))
    assert abs(rep.xi_zero - target) < 1e-6
    assert rep.xi3_zero.value == 0


def test_xi_spectral_half_alpha_matches_xi_tilde():
    phi = 1.7
    alpha = Fraction(1, 2)
    rep = xi_spectral(circle_link_spectrum(alpha, 3000, phi), alpha=alpha)
    est = xi_tilde(ConeModel.circle(alpha), TorusElement([phi]))
    assert abs(rep.xi_zero - est.value) < 1e-6


def test_trivial_action_eta_vanishes_for_all_s():
    # trivial character, symmetric spectrum: the eta part cancels exactly
    modes = [LinkMode(eigenvalue=m.eigenvalue, angular_index=m.angular_index,
                      char_coeff=1.0 + 0j)
             for m in circle_link_spectrum(1, 500, 0.0)]
    rep = xi_spectral(modes, alpha=1)
    h_total = rep.h_total
    for v1, v2, v3 in zip(rep.xi1, rep.xi2, rep.xi3):
        assert v1 + v2 + v3 - 0.5 * h_total == 0.0


def test_pointwise_sector_split_is_exact():
    rep = xi_spectral(circle_link_spectrum(1, 800, 0.9), alpha=1)
    for total, v1, v2, v3 in zip(rep.xi_total, rep.xi1, rep.xi2, rep.xi3):
        assert total - (v1 + v2 + v3) == 0.0
    # independent recomputation from the full unpartitioned stream
    s = rep.s_grid[2]
    k = np.arange(1, 801)
    lamk = np.exp(1j * k * 0.9)
    eta = np.sum(np.exp(-s * k) * (lamk - np.conj(lamk)))
    assert abs(rep.xi_total[2] - 0.5 * (eta + 1)) < 1e-12


def test_kernel_contribution_split():
    rep = xi_spectral(circle_link_spectrum(1, 100, 0.4), alpha=1)
    assert rep.h == (1.0 + 0j, 0j, 0j)


def test_xi_spectral_rejects_window_modes():
    with pytest.raises(GRSectorError, match="predomain"):
        xi_spectral(circle_link_spectrum(3, 100, 0.9), alpha=3)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        circle_link_spectrum(0, 10, 0.0)
    with pytest.raises(ValueError):
        circle_link_spectrum(1, 0, 0.0)

"""Link eigenmodes of circle cones and the threefold splitting of xi.

The even-degree spinors on the circle link are the angular modes
e^{i k theta / alpha}, k integer.  Each mode either extends holomorphically
to the cone (k > 0, first sector), extends on the adjoint side after the
degree shift by the conormal form (k < 0, second sector), or would lie in
the transversal complement -- which is empty for circle links, so the third
sector carries no modes and its partial xi function vanishes identically.

Radial exponents of the extensions follow the cone kernel equation for a
mode of eigenvalue ell:  u' + (ell / x) u = 0, so u = x^{-ell}.  The sign
bookkeeping between the link operator eigenvalue and the kernel-equation
coefficient is fixed here once: holomorphic modes carry positive operator
eigenvalue k/alpha and radial exponent k/alpha, adjoint-side modes carry
eigenvalue k/alpha < 0 and radial exponent |k|/alpha - 1.

Modes whose extension exponent falls below the square-integrability
threshold are flagged for the boundary-pairing treatment instead of a
sector tag (their self-adjoint extension is not unique).
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from conic_xi.regularize import (
    DEFAULT_S_GRID,
    LimitEstimate,
    extrapolate_zero,
)

__all__ = [
    "Sector",
    "Slot",
    "LinkMode",
    "PartitionReport",
    "GRSectorError",
    "THRESHOLD_HALF",
    "THRESHOLD_VOLUME",
    "spectral_witt_holds",
    "circle_link_spectrum",
    "classify",
    "beta_shift",
    "harmonic_extension",
    "kernel_ode_residual",
    "xi_spectral",
]

#: Square-integrability thresholds for the radial exponent: the measure-dx
#: convention requires mu > -1/2, the cone-volume convention mu > -1.
THRESHOLD_HALF = Fraction(-1, 2)
THRESHOLD_VOLUME = Fraction(-1)


class Sector(enum.Enum):
    H1 = "H1"
    H2 = "H2"
    H3 = "H3"
    GR = "gr"  # flagged: ambiguous extension, route through gelfand_robbin


class Slot(enum.Enum):
    G_PLUS = "G+"
    G_MINUS = "G-"
    BETA_G_PLUS = "beta^G+"
    BETA_G_MINUS = "beta^G-"


class GRSectorError(ValueError):
    """A flagged boundary-pairing mode reached a computation that excludes them."""


@dataclass(frozen=True)
class LinkMode:
    """One link eigenmode with its classification data.

    ``eigenvalue`` is the link operator eigenvalue on the even-degree mode;
    ``radial_exponent`` the exponent of its harmonic extension (None until
    classified, and None for third-sector modes).
    """

    eigenvalue: Fraction
    angular_index: int
    char_coeff: complex
    slot: Slot = Slot.G_PLUS
    sector: Sector | None = None
    radial_exponent: Fraction | None = None

    @property
    def kernel_lambda(self) -> Fraction:
        """Coefficient of the cone kernel equation solved by the extension."""
        if self.radial_exponent is None:
            raise ValueError("mode has no extension")
        return -self.radial_exponent


def spectral_witt_holds(alpha: Fraction | int | float) -> bool:
    """No nonzero link eigenvalue in the open window (-1/2, 1/2)."""
    a = Fraction(alpha)
    return Fraction(1) / a >= Fraction(1, 2)


def circle_link_spectrum(alpha: Fraction | int | float, cutoff: int,
                         rotation: float) -> list[LinkMode]:
    """All even-degree modes with |angular index| <= cutoff.

    Eigenvalues are k/alpha and the action multiplies the mode by
    e^{i k rotation / alpha}.
    """
    a = Fraction(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    out = []
    for k in range(-cutoff, cutoff + 1):
        out.append(LinkMode(
            eigenvalue=Fraction(k) / a,
            angular_index=k,
            char_coeff=cmath.exp(1j * k * rotation / float(a)),
        ))
    return out


def classify(mode: LinkMode, alpha: Fraction | int | float,
             threshold: Fraction = THRESHOLD_HALF) -> LinkMode:
    """Fill in sector, slot, and radial exponent of a circle-link mode.

    Positive modes extend holomorphically (first sector); negative modes
    extend on the adjoint side after the conormal degree shift (second
    sector) provided the shifted exponent clears the declared threshold,
    otherwise they are flagged for boundary-pairing analysis.  The zero
    mode extends as the constant and is booked in the kernel contribution
    of the first sector.
    """
    a = Fraction(alpha)
    k = mode.angular_index
    if k >= 0:
        return replace(mode, sector=Sector.H1, slot=Slot.G_PLUS,
                       radial_exponent=Fraction(k) / a)
    mu_hol = Fraction(k) / a          # negative-power holomorphic extension
    mu_adj = Fraction(-k) / a - 1     # adjoint-side exponent after the degree shift
    if mu_hol > threshold:
        # the holomorphic extension is also admissible: the self-adjoint
        # extension is not unique and the mode needs a boundary pairing
        return replace(mode, sector=Sector.GR, slot=Slot.G_PLUS,
                       radial_exponent=mu_hol)
    if mu_adj > threshold:
        return replace(mode, sector=Sector.H2, slot=Slot.BETA_G_PLUS,
                       radial_exponent=mu_adj)
    # borderline eigenvalue exactly on the admissibility threshold
    return replace(mode, sector=Sector.GR, slot=Slot.G_PLUS,
                   radial_exponent=mu_hol)


def beta_shift(mode: LinkMode) -> LinkMode:
    """Swap the conormal wedge slot; the operator eigenvalue changes sign."""
    swap = {
        Slot.G_PLUS: Slot.BETA_G_PLUS,
        Slot.BETA_G_PLUS: Slot.G_PLUS,
        Slot.G_MINUS: Slot.BETA_G_MINUS,
        Slot.BETA_G_MINUS: Slot.G_MINUS,
    }
    return replace(mode, slot=swap[mode.slot], eigenvalue=-mode.eigenvalue)


def harmonic_extension(mode: LinkMode) -> Fraction:
    """Radial exponent mu of the extension u = x^mu solving u' + (ell/x) u = 0.

    Requires a classified first- or second-sector mode (flagged modes have
    no preferred extension and belong to the boundary-pairing analysis).
    """
    if mode.sector == Sector.GR:
        raise GRSectorError("not square-integrable on a preferred side; "
                            "belongs to the boundary-pairing analysis")
    if mode.sector not in (Sector.H1, Sector.H2):
        raise ValueError("mode is unclassified or third-sector")
    assert mode.radial_exponent is not None
    return -mode.kernel_lambda


def kernel_ode_residual(mode: LinkMode, alpha: Fraction | int | float) -> Fraction:
    """Exact residual of u' + (ell/x) u at the stored extension u = x^mu.

    The coefficient ell is recomputed from the slot and angular index (the
    adjoint-side slot carries the +1 conormal degree shift), so a wrong
    radial exponent in the classification shows up as a nonzero residual.
    Everything is rational arithmetic; the result must be exactly 0.
    """
    a = Fraction(alpha)
    k = Fraction(mode.angular_index)
    if mode.radial_exponent is None:
        raise ValueError("mode has no extension")
    if mode.slot in (Slot.BETA_G_PLUS, Slot.BETA_G_MINUS):
        ell = 1 + k / a
    else:
        ell = -k / a
    # residual of d/dx x^mu + (ell/x) x^mu, as the coefficient of x^{mu-1}
    return mode.radial_exponent + ell


@dataclass(frozen=True)
class PartitionReport:
    """Sampled sector xi functions and their extrapolated values.

    The pointwise identity xi_1 + xi_2 + xi_3 = xi holds exactly: the total
    is defined as the sum of the sector streams, each mode contributing to
    exactly one sector.
    """

    s_grid: tuple[float, ...]
    xi1: tuple[complex, ...]
    xi2: tuple[complex, ...]
    xi3: tuple[complex, ...]
    h: tuple[complex, complex, complex]
    xi1_zero: LimitEstimate
    xi2_zero: LimitEstimate
    xi3_zero: LimitEstimate

    @property
    def xi_total(self) -> tuple[complex, ...]:
        return tuple(a + b + c for a, b, c in zip(self.xi1, self.xi2, self.xi3))

    @property
    def h_total(self) -> complex:
        return sum(self.h)

    @property
    def xi_zero(self) -> complex:
        return self.xi1_zero.value + self.xi2_zero.value + self.xi3_zero.value

    @property
    def error_bound(self) -> float:
        return (self.xi1_zero.error_bound + self.xi2_zero.error_bound
                + self.xi3_zero.error_bound)

    def rows(self) -> list[tuple[str, float, float, float]]:
        """(sector, s, re, im) rows for CSV emission."""
        out = []
        for name, col in (("xi1", self.xi1), ("xi2", self.xi2), ("xi3", self.xi3),
                          ("xi_total", self.xi_total)):
            for s, v in zip(self.s_grid, col):
                out.append((name, s, v.real, v.imag))
        return out


def _eta_samples(modes: Sequence[LinkMode], s_grid: Sequence[float]) -> np.ndarray:
    """Heat-damped signed character sums, one value per grid point.

    Terms are summed in increasing-weight order so sector streams that
    mirror each other cancel exactly in the total.
    """
    if not modes:
        return np.zeros(len(s_grid), dtype=complex)
    ordered = sorted(modes, key=lambda m: abs(m.eigenvalue))
    w = np.array([abs(float(m.eigenvalue)) for m in ordered])
    c = np.array([(1.0 if m.eigenvalue > 0 else -1.0) * m.char_coeff for m in ordered])
    sg = np.asarray(s_grid, dtype=float)
    return (c[None, :] * np.exp(-sg[:, None] * w[None, :])).sum(axis=1)


def xi_spectral(modes: Iterable[LinkMode], s_grid: Sequence[float] = DEFAULT_S_GRID,
                alpha: Fraction | int | float = 1,
                threshold: Fraction = THRESHOLD_HALF,
                tol: float = 1e-6) -> PartitionReport:
    """Spectral-side xi function, split by sector, with s -> 0 values.

    Classifies the modes, builds the signed character sums per sector,
    adds the kernel supertraces of the zero modes, and extrapolates each
    sector to s = 0.  Flagged boundary-pairing modes are rejected: for
    those cones the defect needs an explicit predomain.
    """
    a = Fraction(alpha)
    by_sector: dict[Sector, list[LinkMode]] = {Sector.H1: [], Sector.H2: [], Sector.H3: []}
    h = {Sector.H1: 0j, Sector.H2: 0j, Sector.H3: 0j}
    for m in modes:
        cm = classify(m, a, threshold) if m.sector is None else m
        if cm.sector == Sector.GR:
            raise GRSectorError(
                f"mode k={cm.angular_index} sits in the boundary-pairing window; "
                "route through gelfand_robbin.xi_with_predomain"
            )
        if cm.eigenvalue == 0:
            h[cm.sector] += cm.char_coeff  # even-degree kernel mode, sign +1
        else:
            by_sector[cm.sector].append(cm)

    eta = {sec: _eta_samples(ms, s_grid) for sec, ms in by_sector.items()}
    xi = {sec: 0.5 * (eta[sec] + h[sec]) for sec in eta}
    scale = float(1 / a)
    zeros = {
        sec: extrapolate_zero(xi[sec], s_grid, tol=tol, t_scales=(scale,))
        for sec in xi
    }
    return PartitionReport(
        s_grid=tuple(float(s) for s in s_grid),
        xi1=tuple(xi[Sector.H1]),
        xi2=tuple(xi[Sector.H2]),
        xi3=tuple(xi[Sector.H3]),
        h=(h[Sector.H1], h[Sector.H2], h[Sector.H3]),
        xi1_zero=zeros[Sector.H1],
        xi2_zero=zeros[Sector.H2],
        xi3_zero=zeros[Sector.H3],
    )

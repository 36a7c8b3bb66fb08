"""Smooth fixed-point contributions, sphere eta series, global assembly.

Global invariants of a compact model with a torus action decompose into
local contributions: at a smooth isolated fixed point the standard product
over tangent characters, at a conic point the local index defect of the
cone model (optionally with a predomain selecting the extension).  The
sphere eta series give the spectral-side route to the flat-cone defect:
two zeta-weighted symmetric-function series whose s -> 0 values combine to
the closed determinant form, plus a third, shifted-spectrum family that
cancels in the limit and is exposed here as a pluggable evaluator reduced
to Hurwitz zeta combinations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from conic_xi.char_algebra import (
    HalfIntMonomial,
    TorusElement,
    complete_homogeneous_sequence,
    eval_monomial,
)
from conic_xi.gelfand_robbin import Predomain, xi_with_predomain
from conic_xi.model_cones import ConeModel, xi_tilde_closed
from conic_xi.regularize import (
    DEFAULT_S_GRID,
    LimitEstimate,
    SpectralSeries,
    extrapolate_zero,
    hurwitz_zeta,
    zeta_sum_report,
)

__all__ = [
    "FixedPointDatum",
    "GlobalModel",
    "AssemblyResult",
    "UnitWeightError",
    "smooth_contribution",
    "assemble",
    "quadric_model",
    "eta12_series",
    "eta12_extrapolated",
    "eta1_closed",
    "eta2_closed",
    "eta3_pluggable",
    "teardrop_local_index",
]

_SQRT8 = 2.0 * math.sqrt(2.0)


class UnitWeightError(ValueError):
    """A tangent weight evaluates to 1; the fixed point is not isolated."""


@dataclass(frozen=True)
class FixedPointDatum:
    """Isolated smooth fixed point: tangent characters and bundle twist."""

    weights: tuple[HalfIntMonomial, ...]
    twist: str = "dolbeault"
    label: str = "fixed point"

    def __post_init__(self):
        if self.twist not in ("dolbeault", "spin"):
            raise ValueError(f"unknown twist {self.twist!r}")


@dataclass(frozen=True)
class GlobalModel:
    """Fixed-point data of a global space: smooth points and conic points."""

    smooth_points: tuple[FixedPointDatum, ...] = ()
    singular_points: tuple[tuple[ConeModel, Predomain | None], ...] = ()
    expected_total: complex | None = None


def smooth_contribution(fp: FixedPointDatum, g: TorusElement,
                        tol: float = 1e-9) -> complex:
    """Local contribution of a smooth isolated fixed point.

    Untwisted: prod_i 1/(1 - chi_i(g)).  Spin: prod_i
    sqrt(chi_i(g))/(1 - chi_i(g)), square roots taken by exponent halving
    so all branches are coherent with the global det^{1/2} convention.
    """
    val = 1.0 + 0j
    for chi in fp.weights:
        c = eval_monomial(chi, g)
        if abs(1.0 - c) < tol:
            raise UnitWeightError(f"{fp.label}: tangent weight is 1 at this g")
        if fp.twist == "spin":
            val *= eval_monomial(chi.sqrt(), g) / (1.0 - c)
        else:
            val *= 1.0 / (1.0 - c)
    return val


@dataclass(frozen=True)
class AssemblyResult:
    total: complex
    breakdown: tuple[tuple[str, complex], ...]


def assemble(model: GlobalModel, g: TorusElement) -> AssemblyResult:
    """Sum of all local contributions, with a per-point breakdown."""
    parts: list[tuple[str, complex]] = []
    for fp in model.smooth_points:
        parts.append((fp.label, smooth_contribution(fp, g)))
    for cone, predomain in model.singular_points:
        if predomain is None:
            parts.append((cone.label, xi_tilde_closed(cone, g)))
        else:
            parts.append((cone.label, xi_with_predomain(cone, predomain, g.angles[0])))
    total = sum(v for _, v in parts)
    return AssemblyResult(total=complex(total), breakdown=tuple(parts))


def quadric_model(twist: str = "dolbeault") -> GlobalModel:
    """The projective quadric cone: two smooth fixed points plus the vertex.

    The smooth tangent weights at the two points are (mu/lam, lam^-2) and
    (lam/mu, mu^-2); the untwisted local sums add to 1, the spin-twisted
    ones to 0.
    """
    m = HalfIntMonomial.from_exponents
    a1 = FixedPointDatum((m(1.0, [-1, 1]), m(1.0, [-2, 0])), twist=twist, label="a1")
    a2 = FixedPointDatum((m(1.0, [1, -1]), m(1.0, [0, -2])), twist=twist, label="a2")
    return GlobalModel(
        smooth_points=(a1, a2),
        singular_points=((ConeModel.quadric_vertex(twist), None),),
        expected_total=1.0 + 0j if twist == "dolbeault" else 0.0 + 0j,
    )


# ---------------------------------------------------------------------------
# sphere eta series
# ---------------------------------------------------------------------------


def _det_half(g: TorusElement) -> complex:
    return cmath.exp(0.5j * sum(g.angles))


def eta1_closed(g: TorusElement) -> complex:
    """Holomorphic-branch limit det(g)^{1/2} / prod(1 - lam_k).

    Sign convention: the sum over the holomorphic monomial family is a
    plain product of geometric series, so no parity sign appears here; the
    parity sign lives on the mirrored branch, making the two limits equal.
    """
    lams = g.eigenvalues()
    return _det_half(g) / complex(np.prod(1.0 - lams))


def eta2_closed(g: TorusElement) -> complex:
    """Mirrored-branch limit (-1)^n det(g)^{-1/2} / prod(1 - 1/lam_k)."""
    lams = g.eigenvalues()
    return (-1.0) ** g.n * (1.0 / _det_half(g)) / complex(np.prod(1.0 - 1.0 / lams))


def _eta_series(prefactor: complex, g: TorusElement, n_terms: int) -> SpectralSeries:
    n = g.n
    h = complete_homogeneous_sequence(n_terms, g)
    a = np.arange(n_terms + 1, dtype=float)
    w = (2 * n - 1 + 2 * a) / _SQRT8
    return SpectralSeries.from_arrays(w, prefactor * h, growth_degree=max(n - 1, 0))


def eta12_series(n: int, g: TorusElement, s: float,
                 n_terms: int = 2000) -> tuple[complex, complex]:
    """The two zeta-weighted sphere eta series at one value of s.

    Both are built from complete homogeneous symmetric functions of g and
    g^{-1}, weighted by the half-spectrum (2n - 1 + 2a)/(2 sqrt 2); the
    truncated sums are tail-accelerated.
    """
    if n != g.n:
        raise ValueError("n must equal the torus dimension of g")
    s1 = _eta_series(_det_half(g), g, n_terms)
    s2 = _eta_series((-1.0) ** n / _det_half(g), g.inverse(), n_terms)
    v1, _ = zeta_sum_report(s1, s)
    v2, _ = zeta_sum_report(s2, s)
    return v1, v2


def eta12_extrapolated(n: int, g: TorusElement,
                       s_grid: Sequence[float] = DEFAULT_S_GRID,
                       n_terms: int = 2000,
                       tol: float = 1e-6) -> tuple[LimitEstimate, LimitEstimate]:
    """s -> 0 values of the two sphere eta series."""
    vals = [eta12_series(n, g, s, n_terms) for s in s_grid]
    e1 = extrapolate_zero([v[0] for v in vals], s_grid, tol=tol)
    e2 = extrapolate_zero([v[1] for v in vals], s_grid, tol=tol)
    return e1, e2


# ---------------------------------------------------------------------------
# pluggable third-sector evaluator
# ---------------------------------------------------------------------------


def _collapse_diagonal(traces: Callable[[int, int, int], complex], r: int,
                       cutoff: int) -> np.ndarray:
    """c_r(t) = sum over a+b = t of the supplied trace coefficients."""
    c = np.zeros(cutoff + 1, dtype=complex)
    for t in range(cutoff + 1):
        c[t] = sum(traces(a, r, t - a) for a in range(t + 1))
    return c


def _polynomial_fit(c: np.ndarray, degree: int) -> np.ndarray | None:
    """Coefficients of c(t) if it is a polynomial of the given degree, else None."""
    if len(c) < degree + 3:
        return None
    d = c.copy()
    for _ in range(degree + 1):
        d = np.diff(d)
    scale = float(np.max(np.abs(c))) or 1.0
    if np.max(np.abs(d)) > 1e-9 * scale:
        return None
    # exact fit through the first degree+1 points
    t = np.arange(degree + 1, dtype=float)
    V = np.vander(t, degree + 1, increasing=True)
    return np.linalg.solve(V, c[: degree + 1])


def _hurwitz_polynomial_sum(poly: np.ndarray, q: float, s: float, t0: int) -> complex:
    """sum_{t >= t0} p(t) (t + q)^{-s} by reduction to Hurwitz zeta values.

    Substituting t = t0 + m and expanding p in powers of (m + q + t0) turns
    the sum into a finite combination sum_j beta_j zeta(s - j, q + t0),
    valid at every s where the individual continuations are (s != j + 1).
    """
    d = len(poly) - 1
    # p(t0 + m) as coefficients in m
    pm = np.zeros(d + 1, dtype=complex)
    for j, cj in enumerate(poly):
        for i in range(j + 1):
            pm[i] += cj * math.comb(j, i) * (t0 ** (j - i))
    # m^j in powers of (m + c)
    cshift = q + t0
    beta = np.zeros(d + 1, dtype=complex)
    for j, cj in enumerate(pm):
        for i in range(j + 1):
            beta[i] += cj * math.comb(j, i) * ((-cshift) ** (j - i))
    total = 0.0 + 0j
    for i, b in enumerate(beta):
        if b != 0:
            total += b * hurwitz_zeta(s - i, cshift)
    return total


def eta3_pluggable(traces: Callable[[int, int, int], complex], n: int, s: float, *,
                   cutoff: int = 400, growth_degree: int | None = None) -> complex:
    """Difference of the two shifted-spectrum zeta sums with supplied traces.

    ``traces(a, r, b)`` gives the character trace on the (a, r, b) family,
    r = 0..n-1.  The two spectra are (±1)^{n+r} + 2n + 2(a+b) and its
    shifted partner; nonpositive eigenvalues enter through sign factors on
    absolute values, zero eigenvalues are rejected.  When the diagonal
    collapse of the traces is polynomial (degree <= growth_degree) the sums
    are continued exactly through Hurwitz zeta values, so any s including 0
    is fine; otherwise plain truncation is used, which needs s large enough
    for the declared growth.
    """
    if growth_degree is None:
        raise ValueError("a coefficient growth bound (growth_degree) is required")
    if growth_degree < 0:
        raise ValueError("growth_degree must be nonnegative")
    total = 0.0 + 0j
    for r in range(n):
        c = _collapse_diagonal(traces, r, cutoff)
        if not np.any(c):
            continue
        off1 = (-1) ** (n + r) + 2 * n
        off2 = (-1) ** (n + r - 1) + 2 * (n - 2 * r - 2)
        for offset, sign_total in ((off1, +1.0), (off2, -1.0)):
            if offset % 2 == 0:
                raise ArithmeticError("zero eigenvalue in the shifted spectrum")
            # explicit terms while the eigenvalue offset + 2t is nonpositive
            t0 = 0
            while offset + 2 * t0 < 0:
                e = offset + 2 * t0
                total += sign_total * math.copysign(1.0, e) * c[t0] * (abs(e) / _SQRT8) ** (-s)
                t0 += 1
            poly = _polynomial_fit(c, growth_degree + 1)
            q = offset / 2.0
            if poly is not None:
                # (e/(2 sqrt 2))^{-s} = (sqrt 2)^s (t + q)^{-s}
                total += (sign_total * math.sqrt(2.0) ** s
                          * _hurwitz_polynomial_sum(poly, q, s, t0))
            else:
                t = np.arange(t0, cutoff + 1, dtype=float)
                w = (offset + 2 * t) / _SQRT8
                series = SpectralSeries.from_arrays(w, c[t0:], growth_degree=growth_degree + 1)
                v, err = zeta_sum_report(series, s)
                if not np.isfinite(err) or err > 1e-6 * max(1.0, abs(v)):
                    raise ArithmeticError(
                        "trace stream is not polynomial-reducible and the "
                        "truncated tail does not converge at this s"
                    )
                total += sign_total * v
    return total


def teardrop_local_index(k: int, phi: float) -> complex:
    """Local index at the teardrop orbifold point, as a k-fold cover average.

    Averages the smooth contributions of the covering rotation over the
    deck group; simplifying the average collapses it to 1/(1 - e^{i phi}).
    The deck character and the cover rotation are oriented so that the
    average represents the action z -> e^{i phi} z downstairs.
    """
    if k < 1:
        raise ValueError("cover order must be >= 1")
    root = cmath.exp(-2j * math.pi / k)
    total = 0.0 + 0j
    for el in range(k):
        d = 1.0 - root ** el * cmath.exp(1j * phi / k)
        if abs(d) < 1e-12:
            raise ArithmeticError("degenerate rotation for this cover order")
        total += 1.0 / d
    return total / k

"""Boundary-pairing sections of circle cones and predomain corrections.

When the circle-cone link operator has eigenvalues inside the
self-adjointness window, the cone operator admits a family of self-adjoint
extensions.  The ambiguous directions are spanned by explicit sections: the
holomorphic negative powers z^{-j/alpha} with exponent in (-1, 0) and the
mirrored antiholomorphic one-forms.  A choice of predomain W (a subspace of
the holomorphic block) selects an extension; its adjoint block W* is the
annihilator of W under the boundary pairing, computed here by quadrature
over the link.

The index defect of the selected extension equals the minimal-domain value
plus a finite supertrace correction over W and W*.  Both the exact closed
form and a quadrature route through L^2 inner products are provided; they
must agree to the stated tolerances in the test suite.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from conic_xi.model_cones import ConeModel

__all__ = [
    "GRSection",
    "Predomain",
    "gr_basis",
    "l2_normalize",
    "boundary_pairing",
    "pairing_matrix",
    "adjoint_predomain",
    "xi_with_predomain",
    "neumann_side_value",
    "dirichlet_side_value",
    "gauss_legendre",
]


@dataclass(frozen=True)
class GRSection:
    """One ambiguous boundary section of the circle cone.

    ``degree`` 0 means a holomorphic monomial z^e, degree 1 the mirrored
    antiholomorphic one-form with the same angular mode; ``angular_index``
    is the (negative) mode number shared by the matched pair.
    """

    radial_exponent: Fraction
    angular_index: int
    degree: int
    norm_const: float

    def __post_init__(self):
        if not (-1 < self.radial_exponent < 0):
            raise ValueError("ambiguous sections have radial exponent in (-1, 0)")
        if self.degree not in (0, 1):
            raise ValueError("degree must be 0 or 1")

    def angular_frequency(self, alpha: Fraction) -> Fraction:
        """Angular exponent of the section's value at x = 1, in z-powers."""
        if self.degree == 0:
            return self.radial_exponent
        # the one-form z_bar^e dz_bar carries an extra -1 from the form part
        return -(self.radial_exponent + 1)


def gr_basis(alpha: Fraction | int | float, normalized: bool = True) -> list[GRSection]:
    """All ambiguous sections of the circle cone of circumference 2*pi*alpha.

    Holomorphic block z^{-j/alpha} for 0 < j < alpha, then the dual block
    ordered so that the boundary pairing is diagonal: the j-th dual form
    shares the angular mode of the j-th holomorphic section.  Empty when
    the self-adjointness window is clear (alpha <= 1).
    """
    a = Fraction(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    hol, dual = [], []
    j = 1
    while Fraction(j) / a < 1:
        e_hol = -Fraction(j) / a
        e_dual = Fraction(j) / a - 1
        c_hol = l2_normalize_value(e_hol, a) if normalized else 1.0
        c_dual = l2_normalize_value(e_dual, a) if normalized else 1.0
        hol.append(GRSection(e_hol, -j, 0, c_hol))
        dual.append(GRSection(e_dual, -j, 1, c_dual))
        j += 1
    return hol + dual


def l2_normalize_value(e: Fraction | float, alpha: Fraction | int | float) -> float:
    """Closed-form unit-norm constant (2*pi*alpha / (2e + 2))^{-1/2}."""
    ef = float(e)
    if ef <= -1:
        raise ValueError("exponent must exceed -1 for square-integrability")
    a = float(Fraction(alpha))
    return (2.0 * math.pi * a / (2.0 * ef + 2.0)) ** -0.5


def l2_normalize(sec: GRSection, alpha: Fraction | int | float) -> float:
    """Unit-norm constant of a section, confirmed by radial quadrature."""
    a = Fraction(alpha)
    closed = l2_normalize_value(sec.radial_exponent, a)
    p = 2 * sec.radial_exponent + 1
    radial = _radial_integral(p)
    quad = (2.0 * math.pi * float(a) * radial) ** -0.5
    if abs(quad - closed) > 1e-9 * abs(closed):
        raise ArithmeticError("quadrature failed to confirm the norm constant")
    return closed


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def gauss_legendre(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                   n_nodes: int = 64, rel_tol: float = 1e-10,
                   max_doublings: int = 8) -> complex:
    """Composite Gauss-Legendre with panel doubling until relative settling."""
    prev = None
    panels = 1
    for _ in range(max_doublings + 1):
        edges = np.linspace(a, b, panels + 1)
        x0, w0 = np.polynomial.legendre.leggauss(n_nodes)
        total = 0.0 + 0j
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            total += half * np.sum(w0 * fn(mid + half * x0))
        if prev is not None and abs(total - prev) <= rel_tol * max(abs(total), 1.0):
            return complex(total)
        prev = total
        panels *= 2
    return complex(prev)


def _radial_integral(p: Fraction) -> float:
    """integral_0^1 x^p dx for rational p > -1, via a smoothing substitution.

    x = u^q with q the denominator of p+1 turns the integrand into a
    polynomial, which the Gauss rule integrates exactly.
    """
    pf = Fraction(p)
    if pf <= -1:
        raise ValueError("integral diverges")
    q = (pf + 1).denominator
    expo = float(q * (pf + 1) - 1)
    val = gauss_legendre(lambda u: q * u ** expo, 0.0, 1.0)
    return float(val.real)


def boundary_pairing(dual: GRSection, hol: GRSection,
                     alpha: Fraction | int | float) -> complex:
    """Boundary pairing of a dual form against a holomorphic section.

    Quadrature over the link of the symbol-contracted dual against the
    conjugated holomorphic value at x = 1.  Matched angular modes give
    2*pi*alpha times the two norm constants; mismatched modes integrate to
    zero over the full circle.
    """
    if dual.degree != 1 or hol.degree != 0:
        raise ValueError("pairing takes (dual one-form, holomorphic section)")
    a = float(Fraction(alpha))
    freq = -(float(dual.radial_exponent) + float(hol.radial_exponent) + 1.0)
    c = dual.norm_const * hol.norm_const

    def integrand(theta: np.ndarray) -> np.ndarray:
        return c * np.exp(1j * freq * theta)

    return gauss_legendre(integrand, 0.0, 2.0 * math.pi * a)


def pairing_matrix(alpha: Fraction | int | float, normalized: bool = False) -> np.ndarray:
    """Full (dual x holomorphic) pairing matrix by quadrature."""
    basis = gr_basis(alpha, normalized=normalized)
    hol = [b for b in basis if b.degree == 0]
    dual = [b for b in basis if b.degree == 1]
    out = np.empty((len(dual), len(hol)), dtype=complex)
    for i, d in enumerate(dual):
        for j, h in enumerate(hol):
            out[i, j] = boundary_pairing(d, h, alpha)
    return out


# ---------------------------------------------------------------------------
# predomains
# ---------------------------------------------------------------------------


@dataclass
class Predomain:
    """A subspace W of the holomorphic ambiguous block, with its adjoint W*.

    ``coeffs`` rows span W in the unit-norm holomorphic basis; the adjoint
    block annihilates W under the boundary pairing.  Only finite-dimensional
    subspaces exist here by construction, so supertraces over W and W* need
    no regularization.
    """

    alpha: Fraction
    coeffs: np.ndarray
    adjoint_coeffs: np.ndarray | None = None

    def __init__(self, alpha: Fraction | int | float,
                 coeffs: Sequence[Sequence[complex]] | np.ndarray,
                 adjoint_coeffs: np.ndarray | None = None):
        self.alpha = Fraction(alpha)
        C = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        K = len([b for b in gr_basis(self.alpha) if b.degree == 0])
        if C.size == 0:
            C = C.reshape(0, K)
        if C.shape[1] != K:
            raise ValueError(f"coefficient rows must have length {K} for alpha={self.alpha}")
        if C.shape[0] > K:
            raise ValueError("predomain dimension exceeds the ambiguous block")
        self.coeffs = _orthonormal_rows(C)
        self.adjoint_coeffs = adjoint_coeffs

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def block_dim(self) -> int:
        return self.coeffs.shape[1]


def _orthonormal_rows(C: np.ndarray) -> np.ndarray:
    if C.shape[0] == 0:
        return C
    G = C @ C.conj().T
    if np.allclose(G, np.eye(C.shape[0]), atol=1e-12):
        return C
    warnings.warn("predomain coefficients were not orthonormal; renormalizing",
                  stacklevel=3)
    q, _ = np.linalg.qr(C.conj().T)
    return q.conj().T[: C.shape[0]]


def adjoint_predomain(W: Predomain) -> Predomain:
    """Fill in W*: the annihilator of W in the dual block under the pairing."""
    P = pairing_matrix(W.alpha, normalized=True)
    K = W.block_dim
    if W.dim == 0:
        adj = np.eye(K, dtype=complex)
    else:
        # pairing of dual vector d against W row c:  sum_i d_i conj(c_i) P_ii
        A = W.coeffs.conj() * np.diag(P)[None, :]
        _, sv, vh = np.linalg.svd(A)
        rank = int(np.sum(sv > 1e-12 * (sv[0] if len(sv) else 1.0)))
        adj = vh[rank:].conj()
        if np.any(np.abs(np.diag(P)) < 1e-12):
            raise ArithmeticError("degenerate pairing matrix")
    return Predomain(W.alpha, W.coeffs, adjoint_coeffs=_orthonormal_rows(adj))


# ---------------------------------------------------------------------------
# index defect with a predomain
# ---------------------------------------------------------------------------


def _block_trace_closed(rows: np.ndarray, lam: complex) -> complex:
    """Trace of the rotation action on an orthonormal-row span; the j-th
    basis section transforms by lam^{-(j+1)}."""
    if rows.shape[0] == 0:
        return 0.0 + 0j
    chars = lam ** -(np.arange(1, rows.shape[1] + 1, dtype=float))
    return complex(np.sum((np.abs(rows) ** 2) @ chars))


def _basis_gram_quadrature(sections: list[GRSection], alpha: Fraction) -> np.ndarray:
    """Gram matrix of unit-norm sections via radial x angular quadrature."""
    a = float(alpha)
    K = len(sections)
    G = np.zeros((K, K), dtype=complex)
    for i, si in enumerate(sections):
        for j, sj in enumerate(sections):
            radial = _radial_integral(si.radial_exponent + sj.radial_exponent + 1)
            freq = float(si.angular_frequency(Fraction(alpha)) - sj.angular_frequency(Fraction(alpha)))
            ang = gauss_legendre(lambda th: np.exp(1j * freq * th), 0.0, 2 * math.pi * a)
            G[i, j] = si.norm_const * sj.norm_const * radial * ang
    return G


def _block_trace_quadrature(rows: np.ndarray, sections: list[GRSection],
                            alpha: Fraction, rotation: float) -> complex:
    """Same trace through numerically integrated inner products."""
    if rows.shape[0] == 0:
        return 0.0 + 0j
    a = float(alpha)
    G = _basis_gram_quadrature(sections, alpha)
    chars = np.array([cmath.exp(1j * s.angular_index * rotation / a) for s in sections])
    # M[r,s] = <T w_s, w_r>,  GW[r,s] = <w_s, w_r>,  w_r = sum_i rows[r,i] b_i
    M = rows.conj() @ (G.T * chars[None, :]) @ rows.T
    GW = rows.conj() @ G.T @ rows.T
    return complex(np.trace(np.linalg.solve(GW, M)))


def neumann_side_value(W: Predomain, rotation: float, s: float = 0.0) -> complex:
    """Damped supertrace of the holomorphic side with the W block attached."""
    a = float(W.alpha)
    lam = cmath.exp(1j * rotation / a)
    u = math.exp(-s / a)
    tower = 1.0 / (1.0 - lam * u)
    if W.dim == 0:
        return tower
    j = np.arange(1, W.block_dim + 1, dtype=float)
    chars = lam ** -j * u ** j
    return tower + complex(np.sum((np.abs(W.coeffs) ** 2) @ chars))


def dirichlet_side_value(W: Predomain, rotation: float, s: float = 0.0) -> complex:
    """Damped supertrace of the adjoint side with the W* block attached."""
    if W.adjoint_coeffs is None:
        W = adjoint_predomain(W)
    a = float(W.alpha)
    K = W.block_dim
    lam = cmath.exp(1j * rotation / a)
    u = math.exp(-s / a)
    tower = -(lam ** -(K + 1) * u ** (K + 1)) / (1.0 - u / lam)
    adj = W.adjoint_coeffs
    if adj is None or adj.shape[0] == 0:
        return tower
    j = np.arange(1, K + 1, dtype=float)
    chars = lam ** -j * u ** j
    return tower - complex(np.sum((np.abs(adj) ** 2) @ chars))


def xi_with_predomain(model: ConeModel, W: Predomain, g_rotation: float,
                      trace_method: str = "closed") -> complex:
    """Index defect of the rolled-up extension selected by the predomain W.

    Equals the minimal-domain defect 1/(1 - lam) plus the half-difference of
    the finite supertraces over W and W*.  ``trace_method`` selects the
    exact closed form or the quadrature route through L^2 inner products.
    """
    if model.variant != "circle_cone":
        raise ValueError("predomain corrections apply to circle cones")
    if Fraction(model.alpha) != Fraction(W.alpha):
        raise ValueError("predomain alpha does not match the model")
    if W.adjoint_coeffs is None:
        W = adjoint_predomain(W)
    a = float(W.alpha)
    lam = cmath.exp(1j * g_rotation / a)
    if abs(1.0 - lam) < 1e-12:
        raise ArithmeticError("unit eigenvalue; defect undefined")
    K = W.block_dim
    if trace_method == "closed":
        tr_w = _block_trace_closed(W.coeffs, lam)
        tr_wstar = _block_trace_closed(W.adjoint_coeffs, lam)
    elif trace_method == "quadrature":
        basis = gr_basis(W.alpha)
        hol = [b for b in basis if b.degree == 0]
        dual = [b for b in basis if b.degree == 1]
        tr_w = _block_trace_quadrature(W.coeffs, hol, W.alpha, g_rotation)
        tr_wstar = _block_trace_quadrature(W.adjoint_coeffs, dual, W.alpha, g_rotation)
    else:
        raise ValueError("trace_method must be 'closed' or 'quadrature'")
    tower_n = 1.0 / (1.0 - lam)
    tower_d = -(lam ** -(K + 1)) / (1.0 - 1.0 / lam)
    return 0.5 * (tower_n + tr_w + tower_d - tr_wstar)

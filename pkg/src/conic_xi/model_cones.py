"""Catalog of model cones and their local-cohomology character enumerators.

Each model describes an isolated conic singularity with a complex structure
whose local del-bar cohomology has an explicit monomial basis:

* ``flat_cn``        -- flat C^n as a cone over the odd sphere, untwisted
                        (dolbeault) or twisted by a canonical square root
                        (spin);
* ``circle_cone``    -- the cone over a circle of circumference 2*pi*alpha;
* ``quadric_vertex`` -- the vertex of the projective quadric cone, with
                        coordinate-ring basis {x^a y^b, z x^a y^b};
* ``cyclic_quotient``-- C^n / Z_k with integer weights, via a finite
                        character average over the covering torus.

For every model there are two boundary conditions: the del-bar-Neumann side
(holomorphic basis) and its adjoint (del-bar-Dirichlet, antiholomorphic
top-degree basis, entering the supertrace with the parity sign).  The
half-sum of the two damped supertraces extrapolated to s = 0 is the local
index defect ``xi_tilde``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from conic_xi.char_algebra import (
    CharFactor,
    FactoredCharacter,
    HalfIntMonomial,
    TorusElement,
    eval_factored,
    expand_ladder,
    _fraction_gcd,
)
from conic_xi.regularize import (
    DEFAULT_S_GRID,
    LimitEstimate,
    SpectralSeries,
    extrapolate_zero,
    zeta_sum_report,
)

__all__ = [
    "ConeModel",
    "CohomologyCharacter",
    "SeriesCrosscheck",
    "NonIsolatedFixedPointError",
    "neumann_character",
    "dirichlet_character",
    "xi_tilde",
    "xi_tilde_closed",
    "HEAT_S_GRID",
    "series_crosscheck",
    "isolation_margin",
    "catalog",
]


class NonIsolatedFixedPointError(ValueError):
    """The group element fixes more than the cone tip."""


_TWISTS = ("dolbeault", "spin")


@dataclass(frozen=True)
class ConeModel:
    """A catalog entry: cone variant, parameters, and bundle twist."""

    variant: str
    twist: str = "dolbeault"
    n: int = 1
    alpha: Fraction = Fraction(1)
    order: int = 1
    weights: tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.twist not in _TWISTS:
            raise ValueError(f"unknown twist {self.twist!r}")
        if self.variant in ("circle_cone", "cyclic_quotient") and self.twist == "spin":
            raise ValueError("spin twist needs a declared canonical square root; "
                             "only flat_cn and quadric_vertex carry one")
        if self.variant == "circle_cone" and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.variant == "cyclic_quotient" and self.order < 1:
            raise ValueError("cyclic order must be >= 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def flat(cls, n: int, twist: str = "dolbeault") -> "ConeModel":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(variant="flat_cn", twist=twist, n=n)

    @classmethod
    def circle(cls, alpha: Fraction | int | float | str) -> "ConeModel":
        a = Fraction(alpha)
        return cls(variant="circle_cone", alpha=a, n=1)

    @classmethod
    def quadric_vertex(cls, twist: str = "dolbeault") -> "ConeModel":
        return cls(variant="quadric_vertex", twist=twist, n=2)

    @classmethod
    def cyclic(cls, order: int, weights: Sequence[int] = (1,)) -> "ConeModel":
        return cls(variant="cyclic_quotient", order=order,
                   weights=tuple(int(w) for w in weights), n=len(weights))

    @property
    def dim(self) -> int:
        return self.n

    @property
    def label(self) -> str:
        if self.variant == "flat_cn":
            return f"flat_cn(n={self.n},{self.twist})"
        if self.variant == "circle_cone":
            return f"circle_cone(alpha={self.alpha})"
        if self.variant == "quadric_vertex":
            return f"quadric_vertex({self.twist})"
        return f"cyclic_quotient(k={self.order},weights={self.weights})"


@dataclass(frozen=True)
class CohomologyCharacter:
    """Closed-form supertrace character of one boundary condition.

    ``components`` is a list of (coefficient, factored form) whose weighted
    sum is the supertrace; most models need a single component, the cyclic
    quotient averages one per covering-group element (a Molien-type
    average).  The parity sign of the basis degree is already folded into
    the closed forms; ``parity_sign`` records it.  ``angle_scale`` rescales
    the incoming angles before evaluation (the circle cone's character lives
    in e^{i*phi/alpha}).
    """

    components: tuple[tuple[complex, FactoredCharacter], ...]
    basis_note: str
    boundary: str
    parity_sign: int
    angle_scale: tuple[Fraction, ...] = ()

    def _scaled(self, g: TorusElement) -> TorusElement:
        if not self.angle_scale:
            return g
        if len(self.angle_scale) != g.n:
            raise ValueError("angle scale does not match torus dimension")
        return TorusElement([a * float(s) for a, s in zip(g.angles, self.angle_scale)])

    def value(self, g: TorusElement, s: float = 0.0) -> complex:
        gs = self._scaled(g)
        return sum(w * eval_factored(c, gs, s) for w, c in self.components)

    def ladder(self, g: TorusElement, n_steps: int) -> tuple[Fraction, np.ndarray]:
        """Weight-ladder coefficients of the damped supertrace (common grid)."""
        gs = self._scaled(g)
        parts = [(w, *expand_ladder(c, gs, n_steps)) for w, c in self.components]
        delta = reduce(_fraction_gcd, [p[1] for p in parts])
        out = np.zeros(n_steps + 1, dtype=complex)
        for w, d, coeffs in parts:
            stride = int(Fraction(d) / delta)
            take = min(len(coeffs), 1 + n_steps // max(stride, 1))
            out[: take * stride : stride] += w * coeffs[:take]
        return delta, out

    def zeta_weighted_value(self, g: TorusElement, s: float, n_steps: int = 2000) -> complex:
        """Same supertrace with zeta weights w^{-s} instead of e^{-s w}.

        The weight-0 rung enters undamped; positive rungs go through the
        accelerated zeta summation.
        """
        delta, coeffs = self.ladder(g, n_steps)
        head = complex(coeffs[0])
        w = np.arange(1, len(coeffs), dtype=float) * float(delta)
        series = SpectralSeries.from_arrays(w, coeffs[1:], growth_degree=max(g.n, 1))
        val, _ = zeta_sum_report(series, s)
        return head + val


# ---------------------------------------------------------------------------
# character constructors
# ---------------------------------------------------------------------------


def _mono(coeff: complex, exps: Sequence[Fraction | int | float]) -> HalfIntMonomial:
    return HalfIntMonomial.from_exponents(coeff, exps)


def _check_isolated(model: ConeModel, g: TorusElement, tol: float = 1e-9) -> None:
    if g.n != model.n:
        raise ValueError(f"model {model.label} expects {model.n} angles, got {g.n}")
    lams = g.eigenvalues()
    bad = False
    if model.variant == "flat_cn":
        bad = np.any(np.abs(1 - lams) < tol)
    elif model.variant == "circle_cone":
        lam = cmath.exp(1j * g.angles[0] / float(model.alpha))
        bad = abs(1 - lam) < tol
    elif model.variant == "quadric_vertex":
        lam, mu = lams
        bad = min(abs(1 - lam ** 2), abs(1 - mu ** 2), abs(1 - lam * mu)) < tol
    elif model.variant == "cyclic_quotient":
        root = cmath.exp(-2j * math.pi / model.order)
        for el in range(model.order):
            for w, lam in zip(model.weights, lams):
                if abs(1 - root ** (el * w) * lam) < tol:
                    bad = True
    if bad:
        raise NonIsolatedFixedPointError(
            f"{model.label}: unit eigenvalue; non-isolated fixed locus is out of scope"
        )


def isolation_margin(model: ConeModel, g: TorusElement) -> float:
    """Distance of the model's character data from degeneracy at g.

    The minimum over the distances of all denominator monomial values from
    1 (poles of the closed forms) and of the pole separations that control
    the conditioning of the series routes.  Test grids and samplers keep
    this margin bounded below.
    """
    lams = g.eigenvalues()
    vals: list[float] = []
    if model.variant == "flat_cn":
        vals += [abs(1 - lam) for lam in lams]
        vals += [abs(lams[i] - lams[j]) for i in range(model.n) for j in range(i + 1, model.n)]
    elif model.variant == "circle_cone":
        vals.append(abs(1 - cmath.exp(1j * g.angles[0] / float(model.alpha))))
    elif model.variant == "quadric_vertex":
        lam, mu = lams
        vals += [abs(1 - lam ** 2), abs(1 - mu ** 2), abs(1 - lam * mu),
                 abs(lam ** 2 - mu ** 2), abs(lam * mu - lam ** 2), abs(lam * mu - mu ** 2)]
    elif model.variant == "cyclic_quotient":
        root = cmath.exp(-2j * math.pi / model.order)
        for el in range(model.order):
            for w, lam in zip(model.weights, lams):
                vals.append(abs(1 - root ** (el * w) * lam))
        # collapsed invariant ladder oscillates with the k-th powers
        for w, lam in zip(model.weights, lams):
            vals.append(abs(1 - lam ** (model.order * abs(w))) if w != 0 else 2.0)
    return min(vals) if vals else 2.0


def neumann_character(model: ConeModel, g: TorusElement) -> CohomologyCharacter:
    """Supertrace character of the del-bar-Neumann local cohomology.

    The damping grading of a basis monomial is its total degree (the
    circle cone counts degree in units of 1/alpha, its link spectral
    spacing).
    """
    _check_isolated(model, g)
    n = model.n
    one = Fraction(1)
    if model.variant == "flat_cn":
        pref = _mono(1.0, [Fraction(1, 2)] * n) if model.twist == "spin" else HalfIntMonomial.one(n)
        dens = tuple(
            CharFactor(_mono(1.0, [1 if k == j else 0 for j in range(n)]), grading=one)
            for k in range(n)
        )
        note = ("monomials z^m" + (" twisted by the canonical square root" if model.twist == "spin" else ""))
        return CohomologyCharacter(((1.0 + 0j, FactoredCharacter(pref, (), dens)),),
                                   basis_note=note, boundary="N", parity_sign=+1)
    if model.variant == "circle_cone":
        dens = (CharFactor(_mono(1.0, [1]), grading=one / model.alpha),)
        return CohomologyCharacter(
            ((1.0 + 0j, FactoredCharacter(HalfIntMonomial.one(1), (), dens)),),
            basis_note="holomorphic powers of the cone coordinate",
            boundary="N", parity_sign=+1,
            angle_scale=(one / model.alpha,),
        )
    if model.variant == "quadric_vertex":
        pref = _mono(1.0, [Fraction(1, 2), Fraction(1, 2)]) if model.twist == "spin" else HalfIntMonomial.one(2)
        nums = (CharFactor(_mono(1.0, [1, 1]), grading=one, sign=+1),)
        dens = (
            CharFactor(_mono(1.0, [2, 0]), grading=Fraction(2)),
            CharFactor(_mono(1.0, [0, 2]), grading=Fraction(2)),
        )
        return CohomologyCharacter(((1.0 + 0j, FactoredCharacter(pref, nums, dens)),),
                                   basis_note="coordinate ring basis {x^a y^b, z x^a y^b}",
                                   boundary="N", parity_sign=+1)
    if model.variant == "cyclic_quotient":
        k = model.order
        root = cmath.exp(-2j * math.pi / k)
        comps = []
        for el in range(k):
            dens = tuple(
                CharFactor(_mono(root ** (el * w), [1 if j == i else 0 for j in range(n)]), grading=one)
                for i, w in enumerate(model.weights)
            )
            comps.append((1.0 / k + 0j, FactoredCharacter(HalfIntMonomial.one(n), (), dens)))
        return CohomologyCharacter(tuple(comps),
                                   basis_note="invariant monomials via covering-group average",
                                   boundary="N", parity_sign=+1)
    raise ValueError(f"unknown variant {model.variant!r}")


def dirichlet_character(model: ConeModel, g: TorusElement) -> CohomologyCharacter:
    """Supertrace character of the adjoint (del-bar-Dirichlet) cohomology.

    Bases are the mirrored antiholomorphic forms in top transverse degree;
    the parity sign of that degree is folded into the closed form.
    """
    _check_isolated(model, g)
    n = model.n
    one = Fraction(1)
    if model.variant == "flat_cn":
        sign = (-1.0) ** n
        exps = [Fraction(-1, 2)] * n if model.twist == "spin" else [-1] * n
        pref = _mono(sign, exps)
        dens = tuple(
            CharFactor(_mono(1.0, [-1 if k == j else 0 for j in range(n)]), grading=one)
            for k in range(n)
        )
        return CohomologyCharacter(((1.0 + 0j, FactoredCharacter(pref, (), dens)),),
                                   basis_note="antiholomorphic top-degree forms",
                                   boundary="D", parity_sign=int(sign))
    if model.variant == "circle_cone":
        # dual tower starts at weight 1/alpha; equals the holomorphic side at s=0
        pref = _mono(-1.0, [-1])
        dens = (CharFactor(_mono(1.0, [-1]), grading=one / model.alpha),)
        return CohomologyCharacter(
            ((1.0 + 0j, FactoredCharacter(pref, (), dens, prefactor_grading=one / model.alpha)),),
            basis_note="antiholomorphic one-forms on the cone",
            boundary="D", parity_sign=-1,
            angle_scale=(one / model.alpha,),
        )
    if model.variant == "quadric_vertex":
        # mirrored dualizing form carries (lam*mu)^{-1}; the square-root twist
        # cancels half of it
        exps = [Fraction(-1, 2), Fraction(-1, 2)] if model.twist == "spin" else [-1, -1]
        pref = _mono(1.0, exps)
        nums = (CharFactor(_mono(1.0, [-1, -1]), grading=one, sign=+1),)
        dens = (
            CharFactor(_mono(1.0, [-2, 0]), grading=Fraction(2)),
            CharFactor(_mono(1.0, [0, -2]), grading=Fraction(2)),
        )
        return CohomologyCharacter(((1.0 + 0j, FactoredCharacter(pref, nums, dens)),),
                                   basis_note="mirrored quadric basis in degree 2",
                                   boundary="D", parity_sign=+1)
    if model.variant == "cyclic_quotient":
        k = model.order
        root = cmath.exp(-2j * math.pi / k)
        sign = (-1.0) ** n
        comps = []
        for el in range(k):
            pref_coeff = sign * np.prod([root ** (-el * w) for w in model.weights])
            pref = _mono(complex(pref_coeff), [-1] * n)
            dens = tuple(
                CharFactor(_mono(root ** (-el * w), [-1 if j == i else 0 for j in range(n)]), grading=one)
                for i, w in enumerate(model.weights)
            )
            comps.append((1.0 / k + 0j, FactoredCharacter(pref, (), dens)))
        return CohomologyCharacter(tuple(comps),
                                   basis_note="mirrored invariant forms via covering-group average",
                                   boundary="D", parity_sign=int(sign))
    raise ValueError(f"unknown variant {model.variant!r}")


# ---------------------------------------------------------------------------
# xi_tilde and the series crosscheck
# ---------------------------------------------------------------------------


def _t_scales(nch: CohomologyCharacter, dch: CohomologyCharacter,
              g: TorusElement) -> tuple[float, ...]:
    scales = set()
    for ch in (nch, dch):
        gs = [x for _, c in ch.components for x in c.gradings() if x > 0]
        if gs:
            scales.add(float(reduce(_fraction_gcd, gs)))
    return tuple(sorted(scales)) or (1.0,)


def xi_tilde_closed(model: ConeModel, g: TorusElement) -> complex:
    """Direct s = 0 value of the half-sum of the two supertraces."""
    nch = neumann_character(model, g)
    dch = dirichlet_character(model, g)
    return 0.5 * (nch.value(g, 0.0) + dch.value(g, 0.0))


#: Denser grid for closed-form sampling; rational extrapolation of the
#: cheap heat route benefits from the extra halvings near poles.
HEAT_S_GRID: tuple[float, ...] = tuple(0.4 / 2 ** i for i in range(10))


def xi_tilde(model: ConeModel, g: TorusElement,
             s_grid: Sequence[float] | None = None,
             weighting: str = "heat",
             n_terms: int = 2000,
             tol: float = 1e-6) -> LimitEstimate:
    """Local index defect: half-sum of the damped supertraces, at s -> 0.

    ``weighting`` selects the regularization: ``"heat"`` damps each basis
    element by e^{-s * weight}, ``"zeta"`` by weight^{-s}.  The extrapolated
    limit is independent of that choice; the sampled values at s > 0 are
    not.
    """
    nch = neumann_character(model, g)
    dch = dirichlet_character(model, g)
    if weighting == "heat":
        grid = tuple(s_grid) if s_grid is not None else HEAT_S_GRID
        samples = [0.5 * (nch.value(g, s) + dch.value(g, s)) for s in grid]
    elif weighting == "zeta":
        grid = tuple(s_grid) if s_grid is not None else DEFAULT_S_GRID
        samples = [
            0.5 * (nch.zeta_weighted_value(g, s, n_terms) + dch.zeta_weighted_value(g, s, n_terms))
            for s in grid
        ]
    else:
        raise ValueError("weighting must be 'heat' or 'zeta'")
    return extrapolate_zero(samples, grid, tol=tol, t_scales=_t_scales(nch, dch, g))


@dataclass(frozen=True)
class SeriesCrosscheck:
    """Agreement report between truncated basis sums and closed forms."""

    model: str
    s: float
    n_terms: int
    neumann_closed: complex
    neumann_series: complex
    neumann_tail_bound: float
    dirichlet_closed: complex
    dirichlet_series: complex
    dirichlet_tail_bound: float

    @property
    def neumann_difference(self) -> float:
        return abs(self.neumann_closed - self.neumann_series)

    @property
    def dirichlet_difference(self) -> float:
        return abs(self.dirichlet_closed - self.dirichlet_series)

    @property
    def ok(self) -> bool:
        return (self.neumann_difference <= self.neumann_tail_bound * (1 + 1e-9) + 1e-12
                and self.dirichlet_difference <= self.dirichlet_tail_bound * (1 + 1e-9) + 1e-12)


def _geometric_product_sum(prefactor: complex, ratios: Sequence[complex],
                           extra: complex, n_terms: int,
                           damps: Sequence[float]) -> tuple[complex, float]:
    """prefactor * extra * prod_k sum_{m<=N} ratio_k^m with a tail bound.

    ``damps`` are the damped magnitudes |ratio_k|; the bound combines the
    exact 1-D geometric tails of each factor.
    """
    partials, tails = [], []
    for r, t in zip(ratios, damps):
        m = np.arange(n_terms + 1)
        partials.append(complex(np.sum(r ** m)))
        tails.append(t ** (n_terms + 1) / (1.0 - t) if t < 1 else math.inf)
    value = prefactor * extra * complex(np.prod(partials))
    bound = 0.0
    mag = abs(prefactor * extra)
    for k, tk in enumerate(tails):
        others = np.prod([abs(partials[j]) + tails[j] for j in range(len(partials)) if j != k]) if len(partials) > 1 else 1.0
        bound += mag * tk * float(others)
    return value, bound


def _basis_sum(model: ConeModel, ch: CohomologyCharacter, g: TorusElement,
               s: float, n_terms: int) -> tuple[complex, float]:
    """Damped truncated monomial-basis sum, per model, per boundary side."""
    n = model.n
    u = math.exp(-s)
    if model.variant == "flat_cn":
        lams = g.eigenvalues() if ch.boundary == "N" else 1.0 / g.eigenvalues()
        if model.twist == "spin":
            pref = np.prod(np.exp(0.5j * np.asarray(g.angles)))
            pref = pref if ch.boundary == "N" else (-1.0) ** n / pref
        else:
            pref = 1.0 if ch.boundary == "N" else (-1.0) ** n * complex(np.prod(1.0 / g.eigenvalues()))
        return _geometric_product_sum(complex(pref), [lam * u for lam in lams], 1.0,
                                      n_terms, [u] * n)
    if model.variant == "circle_cone":
        lam = cmath.exp(1j * g.angles[0] / float(model.alpha))
        ua = math.exp(-s / float(model.alpha))
        if ch.boundary == "N":
            return _geometric_product_sum(1.0, [lam * ua], 1.0, n_terms, [ua])
        v, b = _geometric_product_sum(-lam ** -1 * ua, [ua / lam], 1.0, n_terms, [ua])
        return v, b
    if model.variant == "quadric_vertex":
        lam, mu = g.eigenvalues()
        if ch.boundary == "D":
            lam, mu = 1.0 / lam, 1.0 / mu
        angle_sum = g.angles[0] + g.angles[1]
        if model.twist == "spin":
            pref = cmath.exp(0.5j * angle_sum) if ch.boundary == "N" else cmath.exp(-0.5j * angle_sum)
        else:
            pref = 1.0 + 0j if ch.boundary == "N" else cmath.exp(-1j * angle_sum)
        extra = 1.0 + lam * mu * u
        return _geometric_product_sum(complex(pref), [lam ** 2 * u ** 2, mu ** 2 * u ** 2],
                                      complex(extra), n_terms, [u ** 2, u ** 2])
    if model.variant == "cyclic_quotient":
        k = model.order
        root = cmath.exp(-2j * math.pi / k)
        lams = g.eigenvalues()
        total = 0.0 + 0j
        bound = 0.0
        for el in range(k):
            if ch.boundary == "N":
                ratios = [root ** (el * w) * lam * u for w, lam in zip(model.weights, lams)]
                pref = 1.0 + 0j
            else:
                ratios = [root ** (-el * w) / lam * u for w, lam in zip(model.weights, lams)]
                pref = (-1.0) ** n * complex(np.prod([root ** (-el * w) / lam
                                                      for w, lam in zip(model.weights, lams)]))
            v, b = _geometric_product_sum(pref, ratios, 1.0, n_terms, [u] * n)
            total += v / k
            bound += b / k
        return total, bound
    raise ValueError(f"unknown variant {model.variant!r}")


def series_crosscheck(model: ConeModel, g: TorusElement, s: float,
                      n_terms: int = 300) -> SeriesCrosscheck:
    """Compare the truncated damped basis sums against the closed forms.

    Used by the test suite on every catalog entry; the difference must stay
    within the reported geometric tail bound.
    """
    if s <= 0:
        raise ValueError("crosscheck needs s > 0")
    nch = neumann_character(model, g)
    dch = dirichlet_character(model, g)
    ncl = nch.value(g, s)
    dcl = dch.value(g, s)
    nse, nb = _basis_sum(model, nch, g, s, n_terms)
    dse, db = _basis_sum(model, dch, g, s, n_terms)
    return SeriesCrosscheck(model.label, s, n_terms, ncl, nse, nb, dcl, dse, db)


def catalog() -> list[ConeModel]:
    """Representative models for property sweeps."""
    models = [ConeModel.flat(n, t) for n in (1, 2, 3) for t in _TWISTS]
    models += [ConeModel.circle(a) for a in (Fraction(1), Fraction(1, 2), Fraction(3),
                                             Fraction(5, 2))]
    models += [ConeModel.quadric_vertex(t) for t in _TWISTS]
    models += [ConeModel.cyclic(k, (1,)) for k in (2, 3, 5)]
    return models

"""Equivariant eta/xi invariants of Dirac-type operators on model cones.

The package evaluates the fixed-point contribution of an isometric torus
action at an isolated conic singularity along two independent routes:

* a spectral route, summing signed character-weighted eigenvalue series of
  the boundary Dirac operator with zeta or heat regularization, and
* a cohomological route, taking damped supertraces of the action over the
  local cohomology of the del-bar complexes on the cone.

The two routes agree at the regularized limit s -> 0; the test suite checks
that agreement, the vanishing of the third spectral sector, boundary-pairing
corrections for non-self-adjoint models, and global fixed-point sums.
"""

from conic_xi.char_algebra import (
    FactoredCharacter,
    HalfIntMonomial,
    TorusElement,
    complete_homogeneous,
    eval_factored,
    eval_monomial,
    schur_bialternant,
)
from conic_xi.regularize import (
    LimitEstimate,
    SpectralSeries,
    abel_sum,
    extrapolate_zero,
    hurwitz_zeta,
    zeta_sum,
)
from conic_xi.model_cones import ConeModel, dirichlet_character, neumann_character, xi_tilde
from conic_xi.spectral_partition import circle_link_spectrum, classify, xi_spectral
from conic_xi.gelfand_robbin import Predomain, gr_basis, xi_with_predomain
from conic_xi.lefschetz import FixedPointDatum, GlobalModel, assemble, smooth_contribution

__version__ = "0.1.0"

__all__ = [
    "TorusElement",
    "HalfIntMonomial",
    "FactoredCharacter",
    "eval_monomial",
    "complete_homogeneous",
    "schur_bialternant",
    "eval_factored",
    "SpectralSeries",
    "LimitEstimate",
    "abel_sum",
    "zeta_sum",
    "hurwitz_zeta",
    "extrapolate_zero",
    "ConeModel",
    "neumann_character",
    "dirichlet_character",
    "xi_tilde",
    "circle_link_spectrum",
    "classify",
    "xi_spectral",
    "gr_basis",
    "Predomain",
    "xi_with_predomain",
    "FixedPointDatum",
    "GlobalModel",
    "smooth_contribution",
    "assemble",
    "__version__",
]

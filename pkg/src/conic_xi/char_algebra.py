"""Exact torus characters: half-integer monomials and factored rational forms.

Group elements are diagonal torus matrices g = diag(e^{i th_1}, ..., e^{i th_n}).
All character data is kept exact at the level of exponents (half-integers,
stored doubled) so that square roots such as det(g)^{1/2} have one coherent
branch: lambda_k^{1/2} := e^{i th_k / 2} with the *stored* angle, not its
principal reduction.  Numerical evaluation is plain double-precision complex
arithmetic on top of that bookkeeping.

A ``FactoredCharacter`` is a closed form

    prefactor * prod_i (1 +/- m_i) / prod_j (1 - m_j)

over half-integer monomials, where every factor carries a nonnegative
spectral grading.  Heat-damped evaluation at s > 0 substitutes
``m -> m * e^{-s * grading}`` factor by factor, which is how the damped
supertraces of the cone models are evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TorusElement",
    "HalfIntMonomial",
    "CharFactor",
    "FactoredCharacter",
    "DimensionMismatchError",
    "ConfluentElementError",
    "PoleError",
    "eval_monomial",
    "complete_homogeneous",
    "complete_homogeneous_sequence",
    "schur_bialternant",
    "eval_factored",
    "expand_ladder",
]


class DimensionMismatchError(ValueError):
    """Monomial exponent vector and torus element have different lengths."""


class ConfluentElementError(ValueError):
    """Angles coincide mod 2*pi; the bialternant quotient degenerates."""


class PoleError(ArithmeticError):
    """A damped denominator factor vanishes at the requested (g, s)."""


@dataclass(frozen=True)
class TorusElement:
    """Element of the n-torus, given by an angle vector in radians.

    Angles are deliberately *not* reduced mod 2*pi: half-integer powers read
    the stored angle to fix the branch, so shifting an angle by 2*pi flips
    the sign of the corresponding square root.
    """

    angles: tuple[float, ...]

    def __init__(self, angles: Iterable[float]):
        object.__setattr__(self, "angles", tuple(float(a) for a in angles))
        if len(self.angles) < 1:
            raise ValueError("torus element needs at least one angle")

    @property
    def n(self) -> int:
        return len(self.angles)

    def eigenvalues(self) -> np.ndarray:
        """The unit-circle eigenvalues e^{i th_k}."""
        return np.exp(1j * np.asarray(self.angles))

    def inverse(self) -> "TorusElement":
        return TorusElement(tuple(-a for a in self.angles))

    def has_unit_eigenvalue(self, tol: float = 1e-9) -> bool:
        return bool(np.any(np.abs(1.0 - self.eigenvalues()) < tol))


def _as_doubled(exps: Sequence[Fraction | int | float]) -> tuple[int, ...]:
    out = []
    for e in exps:
        f = Fraction(e).limit_denominator(10**9) if isinstance(e, float) else Fraction(e)
        d = f * 2
        if d.denominator != 1:
            raise ValueError(f"exponent {e} is not a half-integer")
        out.append(int(d))
    return tuple(out)


@dataclass(frozen=True)
class HalfIntMonomial:
    """Monomial c * lambda_1^{e_1} ... lambda_n^{e_n} with half-integer e_k.

    Exponents are stored doubled (``exps2``), so e_k = exps2[k] / 2 exactly.
    """

    coeff: complex
    exps2: tuple[int, ...]

    @classmethod
    def from_exponents(cls, coeff: complex, exps: Sequence[Fraction | int | float]) -> "HalfIntMonomial":
        return cls(complex(coeff), _as_doubled(exps))

    @classmethod
    def one(cls, n: int) -> "HalfIntMonomial":
        return cls(1.0 + 0j, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.exps2)

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(e, 2) for e in self.exps2)

    def __mul__(self, other: "HalfIntMonomial") -> "HalfIntMonomial":
        if len(self.exps2) != len(other.exps2):
            raise DimensionMismatchError("monomial dimensions differ")
        return HalfIntMonomial(
            self.coeff * other.coeff,
            tuple(a + b for a, b in zip(self.exps2, other.exps2)),
        )

    def inverse(self) -> "HalfIntMonomial":
        return HalfIntMonomial(1.0 / self.coeff, tuple(-e for e in self.exps2))

    def sqrt(self) -> "HalfIntMonomial":
        """Square root by exponent halving; needs integer exponents and coeff 1."""
        if any(e % 2 for e in self.exps2):
            raise ValueError("cannot halve a half-integer exponent again")
        if abs(self.coeff - 1.0) > 1e-12:
            raise ValueError("square root only defined for coefficient 1 monomials")
        return HalfIntMonomial(1.0 + 0j, tuple(e // 2 for e in self.exps2))


def eval_monomial(m: HalfIntMonomial, g: TorusElement) -> complex:
    """Evaluate c * prod_k e^{i th_k e_k}; multiplicative in m."""
    if m.n != g.n:
        raise DimensionMismatchError(
            f"monomial has {m.n} exponents but torus element has {g.n} angles"
        )
    phase = 0.5 * sum(d * th for d, th in zip(m.exps2, g.angles))
    return m.coeff * complex(math.cos(phase), math.sin(phase))


def _elementary_symmetric(lams: np.ndarray) -> np.ndarray:
    """e_0..e_n of the given values, by incremental multiplication."""
    n = len(lams)
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for lam in lams:
        e[1:] = e[1:] + lam * e[:-1].copy()
    return e


def complete_homogeneous_sequence(n_terms: int, g: TorusElement) -> np.ndarray:
    """H_0, ..., H_{n_terms} at the eigenvalues of g.

    Uses the linear recurrence dual to prod_k (1 - lambda_k t), which costs
    O(n) per term and is stable for unit-circle eigenvalues.
    """
    lams = g.eigenvalues()
    n = g.n
    e = _elementary_symmetric(lams)
    h = np.zeros(n_terms + 1, dtype=complex)
    h[0] = 1.0
    for a in range(1, n_terms + 1):
        acc = 0.0 + 0j
        for j in range(1, min(a, n) + 1):
            acc += (-1) ** (j - 1) * e[j] * h[a - j]
        h[a] = acc
    return h


def complete_homogeneous(a: int, g: TorusElement) -> complex:
    """Complete homogeneous symmetric polynomial H_a at the eigenvalues of g."""
    if a < 0:
        raise ValueError("degree must be nonnegative")
    return complex(complete_homogeneous_sequence(a, g)[a])


def schur_bialternant(weight: Sequence[Fraction | int | float], g: TorusElement) -> complex:
    """Bialternant character det(lam_i^{w_j + n - j}) / det(lam_i^{n - j}).

    ``weight`` is a weakly decreasing vector of half-integers of length n.
    Half-integer powers use the branch e^{i th e}.  Degenerate angle vectors
    (coinciding mod 2*pi) make the denominator vanish and are rejected.
    """
    n = g.n
    w = [Fraction(x).limit_denominator(10**9) if isinstance(x, float) else Fraction(x) for x in weight]
    if len(w) != n:
        raise DimensionMismatchError("weight length must equal torus dimension")
    if any(w[i] < w[i + 1] for i in range(n - 1)):
        raise ValueError("weight must be weakly decreasing")
    th = np.asarray(g.angles)
    lams = np.exp(1j * th)
    vand = np.prod([lams[i] - lams[j] for i in range(n) for j in range(i + 1, n)]) if n > 1 else 1.0
    if n > 1 and abs(vand) < 1e-9:
        raise ConfluentElementError(
            "confluent element; perturb the angles or use a limit formula"
        )
    num = np.empty((n, n), dtype=complex)
    den = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            num[i, j] = np.exp(1j * th[i] * float(w[j] + n - (j + 1)))
            den[i, j] = lams[i] ** (n - (j + 1))
    return complex(np.linalg.det(num) / np.linalg.det(den))


@dataclass(frozen=True)
class CharFactor:
    """One multiplicative factor ``(1 + sign * monomial)`` with a damping grading."""

    monomial: HalfIntMonomial
    grading: Fraction = Fraction(0)
    sign: int = -1  # -1 reads as (1 - m), +1 as (1 + m)

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign flag must be +1 or -1")
        if self.grading < 0:
            raise ValueError("grading must be nonnegative")


@dataclass(frozen=True)
class FactoredCharacter:
    """Closed form prefactor * prod_num (1 +/- m_i) / prod_den (1 - m_j).

    The prefactor carries its own grading (its weight in the damped series);
    numerator and denominator factors carry per-factor gradings.  Evaluation
    at s > 0 damps each monomial by e^{-s * grading}.
    """

    prefactor: HalfIntMonomial
    numerator: tuple[CharFactor, ...] = ()
    denominator: tuple[CharFactor, ...] = ()
    prefactor_grading: Fraction = Fraction(0)

    def __post_init__(self):
        if any(f.sign != -1 for f in self.denominator):
            raise ValueError("denominator factors are always of the form (1 - m)")

    @property
    def n(self) -> int:
        return self.prefactor.n

    def gradings(self) -> list[Fraction]:
        gs = [Fraction(self.prefactor_grading)]
        gs += [Fraction(f.grading) for f in self.numerator]
        gs += [Fraction(f.grading) for f in self.denominator]
        return gs


def eval_factored(c: FactoredCharacter, g: TorusElement, s: float = 0.0) -> complex:
    """Evaluate a factored character at g with heat damping e^{-s * grading}.

    For s = 0 the denominator factors must stay away from zero; a vanishing
    damped factor raises :class:`PoleError`.
    """
    if s < 0:
        raise ValueError("damping parameter s must be nonnegative")
    val = eval_monomial(c.prefactor, g) * math.exp(-s * float(c.prefactor_grading))
    for f in c.numerator:
        val *= 1.0 + f.sign * eval_monomial(f.monomial, g) * math.exp(-s * float(f.grading))
    for f in c.denominator:
        d = 1.0 - eval_monomial(f.monomial, g) * math.exp(-s * float(f.grading))
        if abs(d) < 1e-12:
            raise PoleError(f"pole at this (g, s): denominator factor vanished (s={s})")
        val /= d
    return val


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                    a.denominator * b.denominator)


def expand_ladder(c: FactoredCharacter, g: TorusElement, n_steps: int) -> tuple[Fraction, np.ndarray]:
    """Power-series coefficients of the damped closed form on its weight ladder.

    Returns ``(delta, coeffs)`` where delta is the positive gcd of all the
    gradings and ``coeffs[w]`` is the coefficient of weight ``w * delta``,
    i.e. the closed form evaluated with damping variable u satisfies

        eval_factored(c, g, s) = sum_w coeffs[w] * e^{-s * w * delta}

    up to the truncation.  This is the raw material for zeta-weighted
    (Dirichlet-series) regularization of the same supertrace.
    """
    gradings = [x for x in c.gradings() if x > 0]
    if not gradings:
        # purely weight-0 closed form: a single ladder rung
        return Fraction(1), np.array([eval_factored(c, g, 0.0)], dtype=complex)
    delta = reduce(_fraction_gcd, gradings)
    coeffs = np.zeros(n_steps + 1, dtype=complex)
    shift = int(Fraction(c.prefactor_grading) / delta)
    if shift <= n_steps:
        coeffs[shift] = eval_monomial(c.prefactor, g)
    for f in c.numerator:
        d = int(Fraction(f.grading) / delta)
        z = f.sign * eval_monomial(f.monomial, g)
        nxt = coeffs.copy()
        if d == 0:
            nxt += z * coeffs
        else:
            nxt[d:] += z * coeffs[: n_steps + 1 - d]
        coeffs = nxt
    for f in c.denominator:
        d = int(Fraction(f.grading) / delta)
        z = eval_monomial(f.monomial, g)
        if d == 0:
            den = 1.0 - z
            if abs(den) < 1e-12:
                raise PoleError("undamped denominator factor vanishes at g")
            coeffs = coeffs / den
        else:
            # feedback recurrence: multiply by the geometric series of z u^d
            for w in range(d, n_steps + 1):
                coeffs[w] += z * coeffs[w - d]
    return delta, coeffs

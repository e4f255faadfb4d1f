"""Model parameters and closed-form scalar functions of the lattice model.

One particle hops on Z^d with amplitude ``lam`` and feels an on-site
potential ``mu`` at the origin.  Two particles hop with ``lam1`` and ``lam2``
and interact with strength ``mu`` when they coincide; after separating the
centre of mass, each total quasi-momentum ``phi`` gives a fiber operator
whose hopping along axis k has modulus ``(lam1 + lam2) * r(phi_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, UndefinedPhaseError

__all__ = [
    "OneParticleParams",
    "TwoParticleParams",
    "QuasiMomentum",
    "BandEdges",
    "gamma",
    "r_of",
    "eta_of",
    "support_set",
    "band_edges",
    "axis_weights",
]


def _check_dim(d) -> int:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
        raise ParameterError(f"dimension d must be a positive integer, got {d!r}", field="d")
    return int(d)


def _check_real(value, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}", field=name)
    return value


@dataclass(frozen=True)
class OneParticleParams:
    """Hopping ``lam > 0``, on-site strength ``mu`` and dimension ``d``."""

    lam: float
    mu: float
    d: int

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_real(self.lam, "lambda"))
        object.__setattr__(self, "mu", _check_real(self.mu, "mu"))
        object.__setattr__(self, "d", _check_dim(self.d))
        if self.lam <= 0.0:
            raise ParameterError(f"lambda must be positive, got {self.lam}", field="lambda")

    @property
    def band(self) -> tuple[float, float]:
        """Essential spectrum ``[0, 4 lam d]``."""
        return 0.0, 4.0 * self.lam * self.d


@dataclass(frozen=True)
class TwoParticleParams:
    """Hoppings ``lam1, lam2 > 0``, interaction ``mu`` and dimension ``d``."""

    lam1: float
    lam2: float
    mu: float
    d: int

    def __post_init__(self):
        object.__setattr__(self, "lam1", _check_real(self.lam1, "lambda1"))
        object.__setattr__(self, "lam2", _check_real(self.lam2, "lambda2"))
        object.__setattr__(self, "mu", _check_real(self.mu, "mu"))
        object.__setattr__(self, "d", _check_dim(self.d))
        if self.lam1 <= 0.0:
            raise ParameterError(f"lambda1 must be positive, got {self.lam1}", field="lambda1")
        if self.lam2 <= 0.0:
            raise ParameterError(f"lambda2 must be positive, got {self.lam2}", field="lambda2")

    @property
    def total_hopping(self) -> float:
        """``lam1 + lam2``, the hopping of the equivalent single particle at phi = 0."""
        return self.lam1 + self.lam2

    @property
    def equal_hoppings(self) -> bool:
        return self.lam1 == self.lam2

    def one_particle(self) -> OneParticleParams:
        """Single-particle model that coincides with the fiber at phi = 0."""
        return OneParticleParams(self.total_hopping, self.mu, self.d)


def _canonical_angle(a: float) -> float:
    """Map a real angle into (-pi, pi]."""
    a = math.remainder(float(a), 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class QuasiMomentum:
    """Point of the torus with components in ``(-pi, pi]``.

    Use :meth:`from_pi_units` to build exact multiples of pi such as
    ``phi_k = pi``; the zero set of ``r`` is detected by exact comparison.
    """

    phi: tuple

    def __post_init__(self):
        comps = tuple(_canonical_angle(a) for a in np.atleast_1d(self.phi))
        if not comps:
            raise ParameterError("quasi-momentum needs at least one component", field="phi")
        if not all(math.isfinite(a) for a in comps):
            raise ParameterError("quasi-momentum components must be finite", field="phi")
        object.__setattr__(self, "phi", comps)

    @classmethod
    def from_pi_units(cls, units: Sequence[float]) -> "QuasiMomentum":
        """Components given as multiples of pi; odd integers map exactly to pi."""
        comps = []
        for u in np.atleast_1d(units):
            u = float(u)
            if u.is_integer():
                comps.append(math.pi if int(u) % 2 else 0.0)
            else:
                comps.append(u * math.pi)
        return cls(tuple(comps))

    @classmethod
    def zero(cls, d: int) -> "QuasiMomentum":
        return cls((0.0,) * d)

    @property
    def d(self) -> int:
        return len(self.phi)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.phi, dtype=float)

    def in_pi_units(self) -> tuple:
        return tuple(a / math.pi for a in self.phi)


@dataclass(frozen=True)
class BandEdges:
    """Bottom ``beta1`` and top ``beta2`` of a fiber band."""

    beta1: float
    beta2: float

    @property
    def width(self) -> float:
        return self.beta2 - self.beta1


def _as_phi(phi, d: int | None = None) -> QuasiMomentum:
    if not isinstance(phi, QuasiMomentum):
        phi = QuasiMomentum(tuple(np.atleast_1d(phi)))
    if d is not None and phi.d != d:
        raise ParameterError(f"phi has {phi.d} components but d = {d}", field="phi")
    return phi


def gamma(phi) -> float:
    """Sum of the cosines of the components of ``phi``."""
    return float(np.sum(np.cos(_as_phi(phi).as_array())))


def r_of(alpha: float, p: TwoParticleParams) -> float:
    """Normalized modulus ``|lam1 e^{i alpha} + lam2| / (lam1 + lam2)``.

    Evaluated as ``sqrt(1 - 4 lam1 lam2 sin^2(alpha/2) / (lam1+lam2)^2)`` so
    that ``r(0) = 1`` and, for equal hoppings, ``r(pi) = 0`` hold exactly.
    """
    total = p.total_hopping
    s = math.sin(0.5 * alpha)
    val = 1.0 - 4.0 * p.lam1 * p.lam2 * s * s / (total * total)
    return math.sqrt(max(0.0, val))


def _r_is_zero(alpha: float, p: TwoParticleParams) -> bool:
    return p.lam1 == p.lam2 and _canonical_angle(alpha) == math.pi


def eta_of(alpha: float, p: TwoParticleParams) -> float:
    """Phase of the complex hopping ``lam1 e^{i alpha} + lam2``.

    Raises
    ------
    UndefinedPhaseError
        If the amplitude vanishes (equal hoppings and ``alpha = pi``).
    """
    if _r_is_zero(alpha, p):
        raise UndefinedPhaseError(
            "hopping amplitude vanishes (lambda1 = lambda2, alpha = pi); the phase is undefined"
        )
    return math.atan2(p.lam1 * math.sin(alpha), p.lam1 * math.cos(alpha) + p.lam2)


def support_set(phi, p: TwoParticleParams) -> tuple[int, list]:
    """Count and 1-based indices of axes with nonvanishing effective hopping."""
    phi = _as_phi(phi, p.d)
    active = [k + 1 for k, a in enumerate(phi.phi) if not _r_is_zero(a, p)]
    return len(active), active


def axis_weights(phi, p: TwoParticleParams) -> np.ndarray:
    """Per-axis weights ``r(phi_k)``, exactly zero on inert axes."""
    phi = _as_phi(phi, p.d)
    return np.array([0.0 if _r_is_zero(a, p) else r_of(a, p) for a in phi.phi])


def band_edges(phi, p: TwoParticleParams) -> BandEdges:
    """Edges ``2 (lam1+lam2) (d -+ sum_k r(phi_k))`` of the fiber band."""
    total = p.total_hopping
    rsum = float(np.sum(axis_weights(phi, p)))
    beta1 = 2.0 * total * (p.d - rsum)
    beta2 = 2.0 * total * (p.d + rsum)
    # Guard against rounding pushing the edges outside [0, 4 (lam1+lam2) d].
    return BandEdges(max(0.0, beta1), min(4.0 * total * p.d, beta2))

"""Dispersion equations, spectral classification and the dispersion surface.

The bound state of the fiber operator at quasi-momentum ``phi`` is the root
of ``q(nu, phi) = 2 (lam1 + lam2) / mu``.  Since ``q`` decreases strictly on
each side of the band and tends to zero at infinity, a root exists exactly
when the target does not exceed the edge value ``c(d, phi)`` in modulus,
and it is unique.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import NoSolutionError, ParameterError
from .green import c_d_phi, p_of_nu, q_of_nu, watson_c
from .model import (
    OneParticleParams,
    QuasiMomentum,
    TwoParticleParams,
    _as_phi,
    band_edges,
    support_set,
)

__all__ = [
    "Side",
    "VerdictKind",
    "PointSpectrumVerdict",
    "SpectrumReport",
    "SubspaceVerdict",
    "DispersionSurface",
    "THRESHOLD_BAND",
    "default_solver_tol",
    "solve_dispersion",
    "classify_one_particle",
    "classify_fiber",
    "subspace_exists",
    "dispersion_surface",
    "surface_grid",
    "surface_grid_units",
]

# Relative band around an edge constant inside which |2 Lambda / mu| counts as equal to it.
THRESHOLD_BAND = 1e-9


class Side(str, Enum):
    ABOVE = "Above"
    BELOW = "Below"


class VerdictKind(str, Enum):
    EXISTS = "Exists"
    THRESHOLD_UPPER = "ThresholdUpper"
    THRESHOLD_LOWER = "ThresholdLower"
    ABSENT = "Absent"


class SubspaceVerdict(str, Enum):
    EXISTS_UNIQUE = "ExistsUnique"
    NONE = "None"


@dataclass(frozen=True)
class PointSpectrumVerdict:
    """Point spectrum of a one-particle or fiber operator.

    Attributes
    ----------
    kind : VerdictKind
    nu : float or None
        The eigenvalue for ``Exists`` and threshold verdicts.
    regime : str
        The classification branch that decided the verdict.
    near_threshold : bool
        The coupling was within :data:`THRESHOLD_BAND` of the edge constant,
        so the verdict rests on the equality branch.
    edge_constant : float or None
        The edge value the coupling was compared with, if any.
    residual : float or None
        ``|q(nu) - target| / |target|`` at the returned root.
    resolved : bool
        False when the root lies closer to the band edge than floating
        point can represent, so ``nu`` is the nearest float outside the
        band and ``residual`` is not small.
    """

    kind: VerdictKind
    nu: float | None
    regime: str
    near_threshold: bool = False
    edge_constant: float | None = None
    residual: float | None = None
    resolved: bool = True

    @property
    def has_eigenvalue(self) -> bool:
        return self.kind is not VerdictKind.ABSENT

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.nu is not None:
            out["nu"] = self.nu
        out["regime"] = self.regime
        if self.near_threshold:
            out["near_threshold"] = True
        if self.edge_constant is not None:
            out["edge_constant"] = self.edge_constant
        if not self.resolved:
            out["resolved"] = False
        return out


@dataclass(frozen=True)
class SpectrumReport:
    """Essential spectrum ``[beta1, beta2]`` and the point-spectrum verdict."""

    essential: tuple
    point: PointSpectrumVerdict

    def to_dict(self) -> dict:
        return {"essential": list(self.essential), "point": self.point.to_dict()}


def default_solver_tol(d: int) -> float:
    """Relative residual tolerance for the dispersion root."""
    return 1e-12 if d <= 2 else 1e-9


def _quad_tol(tol: float) -> float:
    return min(1e-9, max(tol / 10.0, 1e-13))


def solve_dispersion(
    q_fn: Callable[[float], float],
    bracket_edge: float,
    side: Side,
    target: float,
    tol: float = 1e-12,
    *,
    edge_value: float = math.inf,
    scale: float = 1.0,
) -> float:
    """Unique root of a monotone dispersion function outside the band.

    Parameters
    ----------
    q_fn : callable
        Strictly decreasing on the chosen side of the band, tending to zero
        at infinity.
    bracket_edge : float
        The band edge the root lies beyond.
    side : Side
        ``ABOVE`` (``q > 0``, root above the edge) or ``BELOW``.
    target : float
        Value to solve for.
    tol : float
        Relative residual target ``|q(nu) - target| <= tol |target|``.
    edge_value : float
        ``|q|`` at the edge (infinite when the edge integral diverges).
    scale : float
        Typical distance from the edge; the bracket search starts there and
        expands or contracts geometrically.

    Raises
    ------
    NoSolutionError
        For ``target = 0``, a target of the wrong sign, or ``|target|``
        beyond a finite edge value.
    """
    side = Side(side)
    if target == 0.0:
        raise NoSolutionError("q takes every nonzero value but never zero")
    sgn = 1.0 if side is Side.ABOVE else -1.0
    if sgn * target < 0.0:
        raise NoSolutionError(f"target {target} has the wrong sign for the {side.value.lower()} side")
    if abs(target) > edge_value:
        raise NoSolutionError(f"|target| = {abs(target)} exceeds the edge value {edge_value}")
    if abs(target) == edge_value:
        return float(bracket_edge)

    def h(delta: float) -> float:
        # Decreasing in delta on both sides: positive near the edge, negative far out.
        return sgn * (q_fn(bracket_edge + sgn * delta) - target)

    lo = hi = float(scale)
    if h(hi) > 0.0:
        while True:
            lo, hi = hi, 2.0 * hi
            if h(hi) < 0.0:
                break
    else:
        floor = 4.0 * np.finfo(float).eps * max(abs(bracket_edge), scale)
        while True:
            hi, lo = lo, 0.5 * lo
            if lo < floor:
                # The root sits within rounding distance of the edge.
                return float(np.nextafter(bracket_edge, bracket_edge + sgn))
            if h(lo) > 0.0:
                break
    delta = optimize.brentq(h, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    return float(bracket_edge + sgn * delta)


def _root_verdict(q_fn, edge, side, target, tol, edge_value, scale, regime):
    nu = solve_dispersion(q_fn, edge, side, target, tol, edge_value=edge_value, scale=scale)
    residual = abs(q_fn(nu) - target) / abs(target)
    return PointSpectrumVerdict(
        VerdictKind.EXISTS,
        nu,
        regime,
        edge_constant=None if math.isinf(edge_value) else edge_value,
        residual=residual,
        resolved=residual <= 10.0 * tol,
    )


def _compare(coupling: float, c: float) -> int:
    """-1 if coupling < c, 0 if within the threshold band, +1 if above."""
    if abs(coupling - c) <= THRESHOLD_BAND * c:
        return 0
    return -1 if coupling < c else 1


def classify_one_particle(p: OneParticleParams, *, tol: float | None = None) -> SpectrumReport:
    """Essential spectrum and bound state of ``-lam Laplacian + mu delta_0``.

    Branches: no bound state for ``mu = 0``; always one for ``d <= 2``;
    for ``d = 3, 4`` one iff ``|2 lam / mu| < c(d)``; for ``d >= 5`` also a
    threshold eigenvalue at the band edge when ``|2 lam / mu| = c(d)``.
    """
    if not isinstance(p, OneParticleParams):
        raise ParameterError("expected OneParticleParams")
    lo, hi = p.band
    tol = tol or default_solver_tol(p.d)
    essential = (lo, hi)
    if p.mu == 0.0:
        return SpectrumReport(essential, PointSpectrumVerdict(VerdictKind.ABSENT, None, "mu=0"))
    target = 2.0 * p.lam / p.mu
    side = Side.ABOVE if p.mu > 0 else Side.BELOW
    edge = hi if p.mu > 0 else lo
    qt = _quad_tol(tol)

    def q_fn(nu):
        return p_of_nu(nu, p, rel_tol=qt)

    scale = 2.0 * p.lam
    if p.d <= 2:
        verdict = _root_verdict(q_fn, edge, side, target, tol, math.inf, scale, "d<=2: always bound")
        return SpectrumReport(essential, verdict)
    c = watson_c(p.d).value
    cmp = _compare(abs(target), c)
    if p.d <= 4:
        regime = "d=3,4: bound iff |2lambda/mu| < c(d)"
        if cmp < 0:
            return SpectrumReport(essential, _root_verdict(q_fn, edge, side, target, tol, c, scale, regime))
        return SpectrumReport(
            essential,
            PointSpectrumVerdict(VerdictKind.ABSENT, None, regime, near_threshold=cmp == 0, edge_constant=c),
        )
    regime = "d>=5: bound iff |2lambda/mu| <= c(d), threshold at equality"
    if cmp < 0:
        return SpectrumReport(essential, _root_verdict(q_fn, edge, side, target, tol, c, scale, regime))
    if cmp == 0:
        kind = VerdictKind.THRESHOLD_UPPER if p.mu > 0 else VerdictKind.THRESHOLD_LOWER
        return SpectrumReport(
            essential, PointSpectrumVerdict(kind, edge, regime, near_threshold=True, edge_constant=c)
        )
    return SpectrumReport(
        essential, PointSpectrumVerdict(VerdictKind.ABSENT, None, regime, edge_constant=c)
    )


def classify_fiber(phi, p: TwoParticleParams, *, tol: float | None = None) -> SpectrumReport:
    """Essential spectrum and bound state of the fiber operator at ``phi``.

    The branch is selected by the dimension, whether the hoppings are
    equal, and the number ``s(phi)`` of axes with nonvanishing hopping.  For
    ``mu > 0`` the eigenvalue lies at or above ``beta2``, for ``mu < 0`` at or
    below ``beta1``.
    """
    if not isinstance(p, TwoParticleParams):
        raise ParameterError("expected TwoParticleParams")
    phi = _as_phi(phi, p.d)
    edges = band_edges(phi, p)
    essential = (edges.beta1, edges.beta2)
    if p.mu == 0.0:
        return SpectrumReport(essential, PointSpectrumVerdict(VerdictKind.ABSENT, None, "mu=0"))
    total = p.total_hopping
    tol = tol or default_solver_tol(p.d)
    target = 2.0 * total / p.mu
    side = Side.ABOVE if p.mu > 0 else Side.BELOW
    edge = edges.beta2 if p.mu > 0 else edges.beta1
    s, _ = support_set(phi, p)
    qt = _quad_tol(tol)

    if s == 0:
        # Constant integrand: q = 2 Lambda / (nu - beta) on both sides.
        nu = edge + p.mu
        return SpectrumReport(
            essential, PointSpectrumVerdict(VerdictKind.EXISTS, nu, "s=0: closed form", residual=0.0)
        )

    def q_fn(nu):
        return q_of_nu(nu, phi, p, rel_tol=qt)

    scale = 2.0 * total
    equal_small = p.equal_hoppings and s <= 2
    if p.d <= 2 or equal_small:
        regime = "d<=2: always bound" if p.d <= 2 else "lambda1=lambda2 and s<=2: always bound"
        return SpectrumReport(essential, _root_verdict(q_fn, edge, side, target, tol, math.inf, scale, regime))
    c = c_d_phi(phi, p).value
    cmp = _compare(abs(target), c)
    strict = p.d <= 4 or (p.equal_hoppings and s in (3, 4))
    if strict:
        regime = (
            "d=3,4: bound iff |2(lambda1+lambda2)/mu| < c(d,phi)"
            if p.d <= 4
            else "d>=5, lambda1=lambda2, s=3,4: bound iff |2(lambda1+lambda2)/mu| < c(d,phi)"
        )
        if cmp < 0:
            return SpectrumReport(essential, _root_verdict(q_fn, edge, side, target, tol, c, scale, regime))
        return SpectrumReport(
            essential,
            PointSpectrumVerdict(VerdictKind.ABSENT, None, regime, near_threshold=cmp == 0, edge_constant=c),
        )
    regime = "d>=5, lambda1!=lambda2 or s>=5: threshold at equality"
    if cmp < 0:
        return SpectrumReport(essential, _root_verdict(q_fn, edge, side, target, tol, c, scale, regime))
    if cmp == 0:
        kind = VerdictKind.THRESHOLD_UPPER if p.mu > 0 else VerdictKind.THRESHOLD_LOWER
        return SpectrumReport(
            essential, PointSpectrumVerdict(kind, edge, regime, near_threshold=True, edge_constant=c)
        )
    return SpectrumReport(essential, PointSpectrumVerdict(VerdictKind.ABSENT, None, regime, edge_constant=c))


def subspace_exists(p: TwoParticleParams) -> SubspaceVerdict:
    """Whether a bound pair exists at every quasi-momentum.

    That happens for every ``mu != 0`` when ``d <= 2``; otherwise it is
    decided by comparing ``|2 (lam1 + lam2) / mu|`` with ``c(d)``, the minimum
    of ``c(d, phi)`` over the torus (strictly for ``d = 3, 4``).
    """
    if p.mu == 0.0:
        return SubspaceVerdict.NONE
    if p.d <= 2:
        return SubspaceVerdict.EXISTS_UNIQUE
    coupling = abs(2.0 * p.total_hopping / p.mu)
    cmp = _compare(coupling, watson_c(p.d).value)
    if cmp < 0 or (cmp == 0 and p.d >= 5):
        return SubspaceVerdict.EXISTS_UNIQUE
    return SubspaceVerdict.NONE


@dataclass(frozen=True)
class DispersionSurface:
    """Verdicts sampled on a tensor grid of quasi-momenta.

    Attributes
    ----------
    grid : list of QuasiMomentum
        Points in lexicographic order of their per-axis indices.
    values : list of PointSpectrumVerdict
    params : TwoParticleParams
    shape : tuple of int
        Samples per axis.
    max_adjacent_jump : float
        Largest ``|nu|`` difference between grid neighbours (periodic
        along each axis) where both carry an eigenvalue.
    mesh : float
        Largest grid spacing ``2 pi / n_k``; the jump is to be read
        against this modulus.
    """

    grid: list
    values: list
    params: TwoParticleParams
    shape: tuple = ()
    max_adjacent_jump: float = 0.0
    mesh: float = 0.0

    def __len__(self) -> int:
        return len(self.grid)


def surface_grid_units(counts: Sequence[int]) -> list:
    """Grid points in units of pi: ``2 j / n`` with ``j`` from ``-ceil(n/2)+1`` to ``floor(n/2)``."""
    axes = []
    for n in counts:
        if n < 0:
            raise ParameterError(f"grid counts must be nonnegative, got {n}", field="grid")
        axes.append([2.0 * j / n for j in range(-((n - 1) // 2), n // 2 + 1)] if n else [])
    return list(product(*axes))


def surface_grid(counts: Sequence[int]) -> list:
    """Quasi-momenta ``2 pi j / n`` in lexicographic order of the per-axis index."""
    return [QuasiMomentum.from_pi_units(u) for u in surface_grid_units(counts)]


def dispersion_surface(
    grid_spec: Sequence[int],
    p: TwoParticleParams,
    *,
    threads: int = 1,
    tol: float | None = None,
) -> DispersionSurface:
    """Classify the fiber at every point of a tensor grid.

    Parameters
    ----------
    grid_spec : sequence of int
        Samples per axis; its length must equal ``p.d``.
    p : TwoParticleParams
        Must have ``mu != 0``.
    threads : int
        Worker threads; 0 picks a default.  Output order and values do not
        depend on it.
    """
    if p.mu == 0.0:
        raise ParameterError("the dispersion surface needs mu != 0", field="mu")
    counts = tuple(int(n) for n in grid_spec)
    if len(counts) != p.d:
        raise ParameterError(f"grid has {len(counts)} axes but d = {p.d}", field="grid")
    grid = surface_grid(counts)
    if not grid:
        return DispersionSurface([], [], p, counts)
    workers = threads if threads > 0 else None

    def point(phi):
        return classify_fiber(phi, p, tol=tol).point

    if workers == 1:
        values = [point(phi) for phi in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(point, grid))
    nus = np.array([v.nu if v.nu is not None else np.nan for v in values]).reshape(counts)
    jump = 0.0
    for k in range(p.d):
        diff = np.abs(nus - np.roll(nus, 1, axis=k))
        if np.any(np.isfinite(diff)):
            jump = max(jump, float(np.nanmax(diff)))
    mesh = max(2.0 * math.pi / n for n in counts)
    return DispersionSurface(grid, values, p, counts, jump, mesh)

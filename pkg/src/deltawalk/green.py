"""Resolvent-type torus integrals and their finiteness classification.

Every quantity here reduces to one normalized integral over the active
axes,

.. math::

    R(g; v) = \\frac{1}{(2\\pi)^s}\\int_{T^s}
              \\frac{d\\psi}{g + \\sum_k v_k (1 - \\cos\\psi_k)},

with weights ``v_k = r(phi_k) > 0`` and a gap ``g >= 0`` measured from the
nearer band edge in units of ``2 (lam1 + lam2)``.  Above the band ``q = R``,
below it ``q = -R`` (after the shift ``psi -> psi + pi``), and the edge
constants ``c(d)`` and ``c(d, phi)`` are ``R(0)``.  The one-particle ``p`` is
the same function with unit weights.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .model import OneParticleParams, QuasiMomentum, TwoParticleParams, axis_weights, band_edges
from .model import _as_phi, eta_of, support_set
from .quadrature import (
    QuadratureResult,
    QuadratureSpec,
    Status,
    TWO_PI,
    bessel_horizon_probe,
    default_rel_tol,
    integrate_bessel_path,
    integrate_mesh_family,
    integrate_periodic,
)

__all__ = [
    "ClosedFormDivergent",
    "GreenValue",
    "edge_resolvent",
    "watson_c",
    "watson_c1",
    "watson_w",
    "watson_asymptotic",
    "c_d_phi",
    "p_of_nu",
    "q_of_nu",
    "q_of_nu_unreduced",
    "edge_square_integrable",
    "b_probe",
]

# Largest grid level (samples) the off-edge evaluator plans for.
_GRID_BUDGET = 1 << 24
# Active dimensions above which the grid is never used off the edge.
_GRID_MAX_DIM = 4
# Active dimensions above which the grid is not used for edge constants.
_EDGE_GRID_MAX_DIM = 5


@dataclass(frozen=True)
class ClosedFormDivergent:
    """Marker for a value decided infinite by a closed-form criterion."""

    reason: str


@dataclass(frozen=True)
class GreenValue:
    """A possibly infinite integral value with its provenance.

    Attributes
    ----------
    value : float
        Finite value, or ``+inf`` / ``-inf`` when the classifier says the
        integral diverges.
    result : QuadratureResult or ClosedFormDivergent
        Diagnostics of the evaluator that produced ``value``.
    cross_check : QuadratureResult, optional
        Result of the second, independent evaluator when it was run.
    """

    value: float
    result: QuadratureResult | ClosedFormDivergent
    cross_check: QuadratureResult | None = None

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def abs_error(self) -> float:
        if isinstance(self.result, ClosedFormDivergent):
            return 0.0
        return self.result.abs_error_estimate

    @property
    def method(self) -> str:
        if isinstance(self.result, ClosedFormDivergent):
            return "classifier"
        return self.result.method

    @property
    def status(self) -> Status:
        if isinstance(self.result, ClosedFormDivergent) or not self.is_finite:
            return Status.DIVERGENT
        return self.result.status

    def cross_check_agrees(self) -> bool | None:
        """Whether both evaluators agree within their combined error estimates."""
        if self.cross_check is None or isinstance(self.result, ClosedFormDivergent):
            return None
        other = self.cross_check
        slack = self.abs_error + other.abs_error_estimate + 1e-14 * abs(self.value)
        return abs(self.value - other.value) <= slack


def _closed(value: float, method: str = "closed-form") -> GreenValue:
    return GreenValue(value, QuadratureResult(value, 0.0, Status.CONVERGED, 0, method=method))


def _edge_integrand(v: np.ndarray, gap: float):
    # 1 - cos(psi) written as 2 sin^2(psi/2) keeps the denominator exact near psi = 0.
    def f(*axes):
        den = gap
        for w, a in zip(v, axes):
            den = den + 2.0 * w * np.sin(0.5 * a) ** 2
        return 1.0 / den

    return f


def _grid_is_affordable(v: np.ndarray, gap: float, rel_tol: float) -> bool:
    """Predict whether the midpoint rule reaches ``rel_tol`` within budget.

    The integrand is analytic in a strip of half-width
    ``acosh(1 + g / max v)``, which sets the exponential convergence rate.
    """
    s = v.size
    if s > _GRID_MAX_DIM:
        return False
    strip = math.acosh(1.0 + gap / float(v.max()))
    needed = math.log(100.0 / rel_tol) / strip
    final = 16
    while final < 2.0 * needed:
        final *= 2
    return (final // 2) ** s <= _GRID_BUDGET


@functools.lru_cache(maxsize=256)
def _edge_constant(weights: tuple, rel_tol: float) -> GreenValue:
    v = np.asarray(weights)
    s = v.size
    bessel = integrate_bessel_path(v, float(v.sum()), gap=0.0, rel_tol=max(rel_tol, 1e-13))
    grid = None
    if s <= _EDGE_GRID_MAX_DIM:
        spec = QuadratureSpec.default(s, rel_tol=max(rel_tol, default_rel_tol(s)))
        exps = tuple(float(s - 2 + 2 * j) for j in range(4))
        res = integrate_periodic(_edge_integrand(v, 0.0), spec, even=True, extrapolation=exps)
        norm = TWO_PI**s
        grid = QuadratureResult(
            res.value / norm,
            res.abs_error_estimate / norm,
            res.status,
            res.evaluations,
            res.history,
            method="grid",
        )
    # Report the sharper of the two evaluators; keep the other as the cross-check.
    if grid is not None and grid.converged and (
        not bessel.converged or grid.abs_error_estimate < bessel.abs_error_estimate
    ):
        return GreenValue(float(grid.value), grid, bessel)
    return GreenValue(float(bessel.value), bessel, grid)


@functools.lru_cache(maxsize=8192)
def _off_edge(weights: tuple, gap: float, rel_tol: float) -> GreenValue:
    v = np.asarray(weights)
    s = v.size
    if _grid_is_affordable(v, gap, rel_tol):
        spec = QuadratureSpec(dims=s, rel_tol=rel_tol, max_evaluations=_GRID_BUDGET)
        res = integrate_periodic(_edge_integrand(v, gap), spec, even=True)
        if res.converged:
            norm = TWO_PI**s
            return GreenValue(
                float(res.value) / norm,
                QuadratureResult(
                    float(res.value) / norm,
                    res.abs_error_estimate / norm,
                    res.status,
                    res.evaluations,
                    method="grid",
                ),
            )
    res = integrate_bessel_path(v, float(v.sum()) + gap, gap=gap, rel_tol=rel_tol)
    return GreenValue(float(res.value), res)


def edge_resolvent(weights: Sequence[float], gap: float, *, rel_tol: float | None = None) -> GreenValue:
    """Normalized integral of ``1 / (g + sum_k v_k (1 - cos psi_k))``.

    Zero weights mark inert axes, which integrate to a factor of one.

    Parameters
    ----------
    weights : sequence of float
        Nonnegative axis weights.
    gap : float
        Nonnegative gap ``g``.
    rel_tol : float, optional
        Requested relative accuracy; defaults to the dimension default.

    Returns
    -------
    GreenValue
        ``+inf`` (by classification, without quadrature) when ``g = 0`` and
        fewer than three weights are nonzero.
    """
    if gap < 0.0 or not math.isfinite(gap):
        raise DomainError(f"gap must be a nonnegative finite number, got {gap}")
    v = tuple(float(w) for w in weights if w != 0.0)
    if any(w < 0.0 for w in v):
        raise DomainError("weights must be nonnegative")
    s = len(v)
    if rel_tol is None:
        rel_tol = default_rel_tol(max(s, 1))
    if s == 0:
        if gap == 0.0:
            return GreenValue(math.inf, ClosedFormDivergent("denominator vanishes identically"))
        return _closed(1.0 / gap)
    if gap == 0.0:
        if s <= 2:
            return GreenValue(
                math.inf, ClosedFormDivergent(f"edge singularity not integrable for s = {s} <= 2")
            )
        return _edge_constant(v, rel_tol)
    return _off_edge(v, float(gap), float(rel_tol))


# ---------------------------------------------------------------------------
# Watson constants


def watson_c(d: int) -> GreenValue:
    """Band-edge lattice Green's function ``c(d)`` of the simple walk on Z^d.

    Infinite for ``d <= 2``.  For ``d >= 3`` both evaluators run where the
    grid is affordable and the sharper one is reported.
    """
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if d <= 2:
        return GreenValue(math.inf, ClosedFormDivergent(f"c(d) diverges for d = {d} <= 2"))
    return edge_resolvent([1.0] * d, 0.0, rel_tol=1e-12)


def watson_c1(d: int) -> GreenValue:
    """Lower-edge constant ``c1(d) = (2 pi)^{-d} int dphi / (gamma(phi) - d)``.

    Evaluated from its own integrand, ``-1 / sum_k 2 sin^2(phi_k/2)``, which
    is singular at phi = 0 rather than at phi = pi; the identity
    ``c1(d) = -c(d)`` is therefore a genuine check.  For ``d > 5`` the grid is
    out of reach and the Laplace route on the same integrand is used.
    """
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if d <= 2:
        return GreenValue(-math.inf, ClosedFormDivergent(f"c1(d) diverges for d = {d} <= 2"))
    if d > _EDGE_GRID_MAX_DIM:
        res = integrate_bessel_path([1.0] * d, float(d), gap=0.0, rel_tol=1e-12)
        neg = QuadratureResult(-res.value, res.abs_error_estimate, res.status, res.evaluations, method="bessel")
        return GreenValue(-float(res.value), neg)

    def f(*axes):
        den = 0.0
        for a in axes:
            den = den - 2.0 * np.sin(0.5 * a) ** 2
        return 1.0 / den

    spec = QuadratureSpec.default(d)
    exps = tuple(float(d - 2 + 2 * j) for j in range(4))
    res = integrate_periodic(f, spec, even=True, extrapolation=exps)
    norm = TWO_PI**d
    out = QuadratureResult(
        res.value / norm, res.abs_error_estimate / norm, res.status, res.evaluations, res.history
    )
    return GreenValue(float(out.value), out)


def watson_w(d: int) -> GreenValue:
    """``pi^{-d}`` times the integral of ``1/(gamma + d)`` over ``[0, pi]^d``.

    Equal to ``c(d)`` because the integrand is even in every coordinate;
    computed on the positive orthant only so that the identity is tested.
    """
    if d <= 2:
        return GreenValue(math.inf, ClosedFormDivergent(f"w(d) diverges for d = {d} <= 2"))
    spec = QuadratureSpec.default(d)

    def f(*axes):
        den = 0.0
        for a in axes:
            den = den + 2.0 * np.cos(0.5 * a) ** 2
        return 1.0 / den

    # The orthant [0, pi]^d is mapped onto the even grid's positive half axes.
    exps = tuple(float(d - 2 + 2 * j) for j in range(4))
    res = integrate_periodic(f, spec, even=True, extrapolation=exps)
    scale = 2.0**d * math.pi**d
    out = QuadratureResult(res.value / scale, res.abs_error_estimate / scale, res.status, res.evaluations)
    return GreenValue(float(out.value), out)


def watson_asymptotic(d: int) -> float:
    """Three-term large-d expansion ``1/d + 1/(2 d^2) + 3/(4 d^3)``."""
    return 1.0 / d + 1.0 / (2.0 * d * d) + 3.0 / (4.0 * d**3)


def c_d_phi(phi, p: TwoParticleParams) -> GreenValue:
    """Fiber edge constant ``c(d, phi)``.

    The classifier runs first: the value is ``+inf`` when fewer than three
    axes carry a nonzero weight (this covers ``d <= 2``).  Otherwise the
    integral over the active axes is evaluated; inert axes contribute one.
    """
    phi = _as_phi(phi, p.d)
    s, _ = support_set(phi, p)
    if s <= 2:
        return GreenValue(math.inf, ClosedFormDivergent(f"s(phi) = {s} <= 2"))
    return edge_resolvent(axis_weights(phi, p), 0.0, rel_tol=1e-12)


# ---------------------------------------------------------------------------
# Dispersion functions


def _q_generic(
    nu: float,
    weights: np.ndarray,
    total: float,
    beta1: float,
    beta2: float,
    rel_tol: float | None,
) -> GreenValue:
    """Signed resolvent outside the band ``[beta1, beta2]``."""
    if not math.isfinite(nu):
        raise DomainError(f"nu must be finite, got {nu}")
    if beta1 < nu < beta2:
        raise DomainError(f"nu = {nu} lies inside the band ({beta1}, {beta2})")
    if beta1 == beta2 == nu:
        raise DomainError(f"nu = {nu} coincides with the degenerate band; the value is unsigned infinity")
    if nu >= beta2:
        return edge_resolvent(weights, (nu - beta2) / (2.0 * total), rel_tol=rel_tol)
    res = edge_resolvent(weights, (beta1 - nu) / (2.0 * total), rel_tol=rel_tol)
    if isinstance(res.result, ClosedFormDivergent):
        return GreenValue(-res.value, res.result)
    r = res.result
    neg = QuadratureResult(-r.value, r.abs_error_estimate, r.status, r.evaluations, r.history, r.method)
    return GreenValue(-res.value, neg)


def p_of_nu(nu: float, p: OneParticleParams, *, rel_tol: float | None = None) -> float:
    """One-particle dispersion function ``(2 pi)^{-d} int dphi / (gamma - d + nu/(2 lam))``.

    Raises
    ------
    DomainError
        If ``nu`` lies strictly inside ``(0, 4 lam d)``.
    """
    lo, hi = p.band
    return _q_generic(float(nu), np.ones(p.d), p.lam, lo, hi, rel_tol).value


def q_value(nu: float, phi, p: TwoParticleParams, *, rel_tol: float | None = None) -> GreenValue:
    """:func:`q_of_nu` with provenance."""
    phi = _as_phi(phi, p.d)
    edges = band_edges(phi, p)
    return _q_generic(float(nu), axis_weights(phi, p), p.total_hopping, edges.beta1, edges.beta2, rel_tol)


def q_of_nu(nu: float, phi, p: TwoParticleParams, *, rel_tol: float | None = None) -> float:
    """Fiber dispersion function ``q(nu, phi)``.

    Positive above ``beta2(phi)``, negative below ``beta1(phi)``, strictly
    decreasing on both sides, and equal to ``+-c(d, phi)`` at the edges.
    """
    return q_value(nu, phi, p, rel_tol=rel_tol).value


def q_of_nu_unreduced(
    nu: float, phi, p: TwoParticleParams, spec: QuadratureSpec | None = None
) -> QuadratureResult:
    """``q`` from the unshifted fiber integrand on the full torus.

    Integrates ``1 / (sum_k r_k cos(psi_k - eta_k) - d + nu / (2 (lam1+lam2)))``
    over all d axes with no symmetry reduction or change of variables.  It
    is a slow, independent check of :func:`q_of_nu` for ``nu`` away from the
    band edges.
    """
    phi = _as_phi(phi, p.d)
    edges = band_edges(phi, p)
    if edges.beta1 <= nu <= edges.beta2:
        raise DomainError(f"nu = {nu} is not strictly outside the band")
    r = axis_weights(phi, p)
    eta = np.array([0.0 if w == 0.0 else eta_of(a, p) for w, a in zip(r, phi.phi)])
    shift = nu / (2.0 * p.total_hopping) - p.d
    spec = spec or QuadratureSpec.default(p.d)

    def f(*axes):
        den = shift
        for w, e, a in zip(r, eta, axes):
            den = den + w * np.cos(a - e)
        return 1.0 / den

    res = integrate_periodic(f, spec)
    norm = TWO_PI**p.d
    return QuadratureResult(res.value / norm, res.abs_error_estimate / norm, res.status, res.evaluations)


# ---------------------------------------------------------------------------
# Square integrability at the band edge


def edge_square_integrable(m: int) -> bool:
    """Whether ``(sum_k v_k (1 - cos phi_k))^{-2}`` is integrable over T^m."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    return m >= 5


def b_probe(
    weights: Sequence[float], y: float, spec: QuadratureSpec | None = None
) -> QuadratureResult:
    """Numerical probe of ``b(y) = int_{T^m} (sum_k v_k cos phi_k - y)^{-2} dphi``.

    At ``|y| = D = sum v_k`` the integral is evaluated through the Laplace
    representation truncated at growing horizons, which scans the same
    scales as grid doubling without sampling the singular point.  For
    ``|y| < D`` the singular set is a hypersurface; the probe samples the
    regularized integrand ``1/(g^2 + (2 D h)^2)`` with the grid spacing
    ``h``, which grows without limit exactly when ``b(y)`` is infinite.

    Returns
    -------
    QuadratureResult
        Unnormalized value; ``status`` is the divergence verdict.

    Raises
    ------
    DomainError
        If ``|y| > D``: the integrand is then smooth and the probe carries
        no information.
    """
    v = np.asarray(weights, dtype=float)
    if v.ndim != 1 or v.size == 0 or np.any(v <= 0.0):
        raise DomainError("b_probe needs a nonempty list of positive weights")
    m = v.size
    total = float(v.sum())
    spec = spec or QuadratureSpec.default(m)
    if abs(y) > total * (1.0 + 1e-14):
        raise DomainError(f"|y| = {abs(y)} exceeds D = {total}; the integrand is nonsingular")
    if abs(abs(y) - total) <= 1e-14 * total:
        res = bessel_horizon_probe(v, spec, power=2)
        norm = TWO_PI**m
        return QuadratureResult(
            res.value * norm,
            res.abs_error_estimate * norm,
            res.status,
            res.evaluations,
            tuple(h * norm for h in res.history),
            method=res.method,
        )

    def family(h):
        eps2 = (2.0 * total * h) ** 2

        def f(*axes):
            g = -y
            for w, a in zip(v, axes):
                g = g + w * np.cos(a)
            return 1.0 / (g * g + eps2)

        return f

    return integrate_mesh_family(family, spec, even=True)

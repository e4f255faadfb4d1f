"""Quadrature on the torus T^d with refinement diagnostics.

Two independent evaluators live here.

* :func:`integrate_periodic` applies the midpoint rule on uniform periodic
  grids, doubling the resolution until successive estimates agree.  For
  integrands with a known power-law edge singularity a Richardson table can
  be layered on top of the refinement sequence.
* :func:`integrate_bessel_path` and :func:`bessel_path_coefficients` use the
  Laplace representation

  .. math::

      \\frac{1}{(2\\pi)^m}\\int_{T^m}\\frac{e^{-i x\\cdot\\psi}\\,d\\psi}
      {(g + \\sum_k v_k (1-\\cos\\psi_k))^n}
      = \\frac{1}{(n-1)!}\\int_0^\\infty t^{n-1} e^{-g t}
        \\prod_k I_{x_k}(v_k t) e^{-v_k t}\\,dt ,

  which turns an m-dimensional edge-singular integral into a one-dimensional
  one.  The head of the t-integral is done with composite Gauss-Legendre on
  geometric panels and the tail with the large-argument expansion of the
  scaled Bessel functions, integrated term by term.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import special

from .errors import ConfigurationError, DomainError, IntegrandEvaluationError, ResourceError

__all__ = [
    "Status",
    "QuadratureSpec",
    "QuadratureResult",
    "default_rel_tol",
    "integrate_periodic",
    "integrate_mesh_family",
    "fourier_coefficients",
    "integrate_bessel_path",
    "bessel_path_coefficients",
    "bessel_horizon_probe",
    "richardson_table",
]

TWO_PI = 2.0 * np.pi

# Elements evaluated per vectorized integrand call.
_CHUNK = 1 << 20
# Number of expansion terms kept in the Bessel tail.
_TAIL_TERMS = 10
# e^{-_CUTOFF} is treated as zero in the Laplace head.
_CUTOFF = 60.0


class Status(str, Enum):
    """Outcome of a refinement sequence."""

    CONVERGED = "Converged"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


def default_rel_tol(dims: int) -> float:
    """Relative tolerance matched to the cost of a d-dimensional grid."""
    if dims <= 2:
        return 1e-9
    if dims <= 4:
        return 1e-7
    return 1e-5


@dataclass(frozen=True)
class QuadratureSpec:
    """Refinement schedule for :func:`integrate_periodic`.

    Parameters
    ----------
    dims : int
        Torus dimension d.
    initial_points_per_axis : int
        Points per axis on the coarsest grid; a power of two, at least 4.
    max_doublings : int
        Number of refinements after the coarsest grid.
    rel_tol : float
        Convergence threshold relative to ``max(1, |value|)``.
    divergence_growth_factor : float
        A monotonically growing sequence is called divergent when its
        increments shrink by less than this factor per doubling.
    max_evaluations : int
        Budget of integrand samples for a single grid level.  Levels that
        would exceed it are skipped and the result is judged on the levels
        already computed.
    """

    dims: int
    initial_points_per_axis: int = 16
    max_doublings: int = 8
    rel_tol: float = 1e-9
    divergence_growth_factor: float = 1.5
    max_evaluations: int = 1 << 26

    def __post_init__(self):
        n = self.initial_points_per_axis
        if not isinstance(self.dims, (int, np.integer)) or self.dims < 1:
            raise ConfigurationError(f"dims must be a positive integer, got {self.dims!r}")
        if not isinstance(n, (int, np.integer)) or n < 4 or n & (n - 1):
            raise ConfigurationError(
                f"initial_points_per_axis must be a power of two >= 4, got {n!r}"
            )
        if self.max_doublings < 3:
            raise ConfigurationError(f"max_doublings must be >= 3, got {self.max_doublings}")
        if not 0.0 < self.rel_tol < 1.0:
            raise ConfigurationError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not self.divergence_growth_factor > 1.0:
            raise ConfigurationError(
                f"divergence_growth_factor must exceed 1, got {self.divergence_growth_factor}"
            )
        if self.max_evaluations < n:
            raise ConfigurationError("max_evaluations is below a single grid line")

    @classmethod
    def default(cls, dims: int, **overrides) -> "QuadratureSpec":
        """Spec with the dimension-dependent default tolerance."""
        overrides.setdefault("rel_tol", default_rel_tol(dims))
        return cls(dims=dims, **overrides)


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral together with its convergence diagnostics.

    Consumers must branch on ``status``; the value of a divergent result is
    the last partial estimate and has no meaning as a number.
    """

    value: float | complex
    abs_error_estimate: float
    status: Status
    evaluations: int
    history: tuple = field(default=(), repr=False)
    method: str = "grid"

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


# ---------------------------------------------------------------------------
# Refinement bookkeeping


def richardson_table(raw: Sequence, exponents: Sequence[float], ratio: float = 2.0) -> list:
    """Richardson extrapolation table for a refinement sequence.

    Row ``k`` holds the raw value at level ``k`` followed by successive
    eliminations of the error terms ``h^p`` for ``p`` in ``exponents``,
    where ``h`` shrinks by ``ratio`` per level.
    """
    rows: list = []
    for k, v in enumerate(raw):
        row = [v]
        for j in range(1, min(k, len(exponents)) + 1):
            f = ratio ** exponents[j - 1]
            row.append((f * row[j - 1] - rows[k - 1][j - 1]) / (f - 1.0))
        rows.append(row)
    return rows


def _auto_exponents(raw: Sequence) -> tuple:
    """Leading error exponent estimated from the last three raw values."""
    if len(raw) < 3:
        return ()
    d1 = abs(raw[-2] - raw[-3])
    d2 = abs(raw[-1] - raw[-2])
    if d1 == 0.0 or d2 == 0.0:
        return ()
    p = math.log2(d1 / d2)
    if p < 0.25:
        return ()
    # Round to the nearest half integer: edge expansions come in powers of h^(1/2).
    p = max(0.5, round(2.0 * p) / 2.0)
    return (p, p + 2.0, p + 4.0)


def _grows(raw: Sequence, factor: float) -> bool:
    """Monotone growth whose increments fail to contract by ``factor``."""
    if len(raw) < 3:
        return False
    a, b, c = (complex(v) for v in raw[-3:])
    if not (abs(a) < abs(b) < abs(c)):
        return False
    d1, d2 = abs(b - a), abs(c - b)
    return d2 > 0.0 and d1 / d2 < factor


def _assess(raw: Sequence, spec: QuadratureSpec, exponents) -> tuple:
    """Return ``(value, abs_error, status)`` for a refinement sequence."""
    if len(raw) < 2:
        return raw[-1], math.inf, Status.INCONCLUSIVE
    if exponents == "auto":
        exponents = _auto_exponents(raw)
    if exponents:
        row = richardson_table(raw, exponents)[-1]
        value = row[-1]
        err = abs(row[-1] - row[-2])
    else:
        value = raw[-1]
        err = abs(raw[-1] - raw[-2])
    if err <= spec.rel_tol * max(1.0, abs(value)):
        return value, float(err), Status.CONVERGED
    if _grows(raw, spec.divergence_growth_factor):
        return value, math.inf, Status.DIVERGENT
    return value, float(err), Status.INCONCLUSIVE


# ---------------------------------------------------------------------------
# Grid evaluator


def _axis_nodes(n: int, even: bool) -> np.ndarray:
    h = TWO_PI / n
    if even:
        return (np.arange(n // 2) + 0.5) * h
    return -np.pi + (np.arange(n) + 0.5) * h


def _shaped(axes: Sequence[np.ndarray]) -> list:
    d = len(axes)
    out = []
    for k, a in enumerate(axes):
        shape = [1] * d
        shape[k] = a.size
        out.append(a.reshape(shape))
    return out


def _evaluate_block(f, axes: Sequence[np.ndarray]) -> np.ndarray:
    shaped = _shaped(axes)
    shape = tuple(a.size for a in axes)
    vals = np.broadcast_to(np.asarray(f(*shaped)), shape)
    finite = np.isfinite(vals)
    if not finite.all():
        idx = tuple(int(i) for i in np.argwhere(~finite)[0])
        node = tuple(float(axes[k][i]) for k, i in enumerate(idx))
        raise IntegrandEvaluationError(
            f"integrand is not finite at node {node}: {vals[idx]!r}", node=node
        )
    return vals


def _grid_sum(f, nodes: Sequence[np.ndarray], prefix: tuple = ()):
    """Sum of ``f`` over the tensor grid in a fixed, chunked order."""
    depth = len(prefix)
    rest = nodes[depth:]
    inner = math.prod(a.size for a in rest[1:])
    partials = []
    if inner <= _CHUNK:
        rows = max(1, _CHUNK // max(inner, 1))
        lead = rest[0]
        for start in range(0, lead.size, rows):
            block = list(prefix) + [lead[start : start + rows]] + list(rest[1:])
            partials.append(_evaluate_block(f, block).sum())
    else:
        lead = rest[0]
        for i in range(lead.size):
            partials.append(_grid_sum(f, nodes, prefix + (lead[i : i + 1],)))
    return np.sum(np.asarray(partials))


def _grid_estimate(f, dims: int, n: int, even: bool):
    ax = _axis_nodes(n, even)
    total = _grid_sum(f, [ax] * dims)
    weight = (TWO_PI / n) ** dims * (2.0**dims if even else 1.0)
    value = total * weight
    if np.iscomplexobj(value):
        return complex(value)
    return float(value)


def integrate_periodic(
    f: Callable[..., np.ndarray],
    spec: QuadratureSpec,
    *,
    even: bool = False,
    extrapolation=None,
) -> QuadratureResult:
    """Integrate ``f`` over ``[-pi, pi)^d`` with successive grid doubling.

    Parameters
    ----------
    f : callable
        Called as ``f(phi_1, ..., phi_d)`` with mutually broadcastable
        arrays, one per axis; must return the integrand on the broadcast grid.
    spec : QuadratureSpec
        Refinement schedule and tolerances.
    even : bool
        Declare ``f`` even in every coordinate separately.  Only the
        positive half of each axis is sampled and weighted by two, which
        is exact for such integrands.
    extrapolation : sequence of float, "auto" or None
        Error exponents ``p`` (error ~ h^p) to eliminate by a Richardson
        table.  Use for integrands with an algebraic point singularity,
        where the midpoint rule converges only algebraically.

    Returns
    -------
    QuadratureResult
        The unnormalized integral; divide by ``(2 pi)^d`` for the average.

    Raises
    ------
    IntegrandEvaluationError
        If a grid node yields a non-finite sample.
    """
    d = spec.dims
    raw: list = []
    evaluations = 0
    n = spec.initial_points_per_axis
    for _ in range(spec.max_doublings + 1):
        count = (n // 2 if even else n) ** d
        if count > spec.max_evaluations:
            break
        raw.append(_grid_estimate(f, d, n, even))
        evaluations += count
        value, err, status = _assess(raw, spec, extrapolation)
        if status is Status.CONVERGED:
            return QuadratureResult(value, err, status, evaluations, tuple(raw))
        n *= 2
    if not raw:
        raise ResourceError(
            f"the coarsest grid needs more than max_evaluations={spec.max_evaluations} samples"
        )
    value, err, status = _assess(raw, spec, extrapolation)
    return QuadratureResult(value, err, status, evaluations, tuple(raw))


def integrate_mesh_family(
    family: Callable[[float], Callable[..., np.ndarray]],
    spec: QuadratureSpec,
    *,
    even: bool = False,
) -> QuadratureResult:
    """Refine a grid while the integrand itself depends on the mesh width.

    ``family(h)`` returns the integrand used on the grid with spacing ``h``.
    This serves regularized probes such as ``1/(g^2 + (c h)^2)``, whose grid
    sums stay bounded at each level but grow without limit as ``h -> 0``
    exactly when the unregularized integral diverges.
    """
    d = spec.dims
    raw: list = []
    evaluations = 0
    n = spec.initial_points_per_axis
    status = Status.INCONCLUSIVE
    for _ in range(spec.max_doublings + 1):
        count = (n // 2 if even else n) ** d
        if count > spec.max_evaluations:
            break
        raw.append(_grid_estimate(family(TWO_PI / n), d, n, even))
        evaluations += count
        value, err, status = _assess(raw, spec, None)
        if status is not Status.INCONCLUSIVE:
            break
        n *= 2
    if not raw:
        raise ResourceError(
            f"the coarsest grid needs more than max_evaluations={spec.max_evaluations} samples"
        )
    value, err, status = _assess(raw, spec, None)
    return QuadratureResult(value, err, status, evaluations, tuple(raw), method="grid-regularized")


def fourier_coefficients(
    f: Callable[..., np.ndarray],
    spec: QuadratureSpec,
    radius: int,
) -> tuple[np.ndarray, QuadratureResult]:
    """Normalized Fourier coefficients of a smooth periodic function.

    Computes ``(2 pi)^{-d} * integral f(phi) exp(-i x.phi) dphi`` for every
    ``x`` in the box ``[-radius, radius]^d`` from one FFT per grid level.

    Returns
    -------
    coeffs : ndarray, shape (2R+1,)*d
        Entry ``[x_1 + R, ..., x_d + R]`` is the coefficient at ``x``.
    result : QuadratureResult
        Diagnostics; ``value`` holds the coefficient at ``x = 0`` and the
        error estimate is the largest change over the box at the last
        doubling.
    """
    if radius < 0:
        raise ConfigurationError(f"radius must be >= 0, got {radius}")
    d = spec.dims
    width = 2 * radius + 1
    n = spec.initial_points_per_axis
    while n < 2 * width:
        n *= 2
    prev = None
    evaluations = 0
    history = []
    coeffs = None
    err = math.inf
    status = Status.INCONCLUSIVE
    for _ in range(spec.max_doublings + 1):
        if n**d > spec.max_evaluations:
            break
        ax = _axis_nodes(n, even=False)
        vals = _evaluate_block(f, [ax] * d)
        evaluations += n**d
        spectrum = np.fft.fftn(vals) / n**d
        idx = np.arange(-radius, radius + 1)
        coeffs = spectrum[np.ix_(*([idx % n] * d))]
        phase = np.exp(1j * idx * (np.pi - np.pi / n))
        for k in range(d):
            shape = [1] * d
            shape[k] = width
            coeffs = coeffs * phase.reshape(shape)
        if not np.iscomplexobj(vals):
            coeffs = coeffs.real.copy()
        history.append(coeffs[(radius,) * d])
        if prev is not None:
            err = float(np.max(np.abs(coeffs - prev)))
            scale = max(1.0, float(np.max(np.abs(coeffs))))
            if err <= spec.rel_tol * scale:
                status = Status.CONVERGED
                break
        prev = coeffs
        n *= 2
    if coeffs is None:
        raise ResourceError(
            f"a {2 * width}-point grid in {d} dimensions exceeds max_evaluations={spec.max_evaluations}"
        )
    centre = coeffs[(radius,) * d]
    return coeffs, QuadratureResult(
        centre, err, status, evaluations, tuple(history), method="fft"
    )


# ---------------------------------------------------------------------------
# Laplace (Bessel) evaluator


def _gauss_panels(t_end: float, t_first: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes on [0, t_first, 2 t_first, 4 t_first, ..., t_end]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = [0.0]
    t = t_first
    while t < t_end:
        edges.append(t)
        t *= 2.0
    edges.append(t_end)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(a + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _expansion_coeffs(orders: np.ndarray, terms: int) -> np.ndarray:
    """Coefficients c_j(n) with ive(n, z) ~ (2 pi z)^{-1/2} sum_j c_j(n) z^{-j}."""
    mu = 4.0 * np.asarray(orders, dtype=float) ** 2
    out = np.empty(mu.shape + (terms,))
    out[..., 0] = 1.0
    for j in range(1, terms):
        out[..., j] = -out[..., j - 1] * (mu - (2 * j - 1) ** 2) / (j * 8.0)
    return out


def _tail_moment(sigma: float, gap: float, t0: float) -> float:
    """Integral of t^{sigma-1} e^{-gap t} over [t0, inf)."""
    if gap == 0.0:
        if sigma >= 0.0:
            return math.inf
        return -(t0**sigma) / sigma
    return float(mpmath.gammainc(sigma, a=gap * t0) * mpmath.mpf(gap) ** (-sigma))


def _laplace_box(weights, gap, offsets, power, order, horizon_scale):
    """Head plus asymptotic tail for every offset; returns (values, tail_err, nodes)."""
    v = np.asarray(weights, dtype=float)
    offsets = np.asarray(offsets, dtype=int).reshape(-1, v.size)
    active = v > 0.0
    # Inert axes contribute a Kronecker delta in their offset.
    mask = np.all(offsets[:, ~active] == 0, axis=1)
    xs = np.abs(offsets[:, active])
    va = v[active]
    m = va.size
    values = np.zeros(len(offsets))
    if not mask.any():
        return values, 0.0, 0
    xs_live = xs[mask]
    nmax = int(xs_live.max()) if xs_live.size else 0
    vmin = float(va.min()) if m else 1.0
    vmax = float(va.max()) if m else 1.0
    # Horizon where the expansion is accurate for every order in the box.
    t_asym = horizon_scale * (1.0 + nmax**2) / vmin if m else 0.0
    if gap > 0.0 and gap * t_asym >= _CUTOFF or m == 0:
        if gap == 0.0:
            raise DomainError("zero gap with no active axis: the integral is infinite")
        t_end, use_tail = _CUTOFF / gap, False
    else:
        t_end, use_tail = t_asym, True
    t_first = min(0.5 / vmax, t_end)
    nodes, wts = _gauss_panels(t_end, t_first, order)
    kernel = wts * nodes ** (power - 1) * np.exp(-gap * nodes)
    prod = np.ones((xs_live.shape[0], nodes.size))
    for k in range(m):
        prod *= special.ive(xs_live[:, k : k + 1], va[k] * nodes[None, :])
    head = prod @ kernel
    tail = np.zeros_like(head)
    tail_err = 0.0
    if use_tail:
        coeff = np.ones((xs_live.shape[0], 1))
        for k in range(m):
            ck = _expansion_coeffs(xs_live[:, k], _TAIL_TERMS) * va[k] ** -np.arange(_TAIL_TERMS)
            new = np.zeros((coeff.shape[0], min(coeff.shape[1] + _TAIL_TERMS - 1, _TAIL_TERMS)))
            for j in range(ck.shape[1]):
                span = min(coeff.shape[1], new.shape[1] - j)
                if span > 0:
                    new[:, j : j + span] += ck[:, j : j + 1] * coeff[:, :span]
            coeff = new
        pref = np.prod((TWO_PI * va) ** -0.5)
        moments = np.array(
            [_tail_moment(power - 0.5 * m - J, gap, t_end) for J in range(coeff.shape[1])]
        )
        if not np.isfinite(moments[0]):
            return np.full(len(offsets), math.inf), math.inf, nodes.size
        terms = pref * coeff * moments[None, :]
        tail = terms.sum(axis=1)
        tail_err = float(np.max(np.abs(terms[:, -1])))
    values[mask] = (head + tail) / math.factorial(power - 1)
    return values, tail_err / math.factorial(power - 1), nodes.size * int(mask.sum())


def bessel_path_coefficients(
    weights: Sequence[float],
    gap: float,
    offsets: np.ndarray,
    *,
    power: int = 1,
    rel_tol: float = 1e-12,
    horizon_scale: float = 40.0,
) -> tuple[np.ndarray, QuadratureResult]:
    """Lattice Green's function of ``g + sum_k v_k (1 - cos psi_k)`` by the Laplace route.

    Parameters
    ----------
    weights : sequence of float
        Nonnegative axis weights ``v_k``; zero weights mark inert axes.
    gap : float
        Nonnegative spectral gap ``g``.
    offsets : array of int, shape (n, d)
        Lattice offsets ``x`` at which the Fourier coefficient is wanted.
    power : int
        Power ``n`` of the denominator.
    rel_tol : float
        Target relative accuracy used to judge convergence.

    Returns
    -------
    values : ndarray, shape (n,)
        Normalized coefficients ``(2 pi)^{-d} int e^{-i x.psi} / (...)^n``.
    result : QuadratureResult
        Diagnostics; ``value`` is the first entry.
    """
    if gap < 0.0:
        raise DomainError(f"gap must be nonnegative, got {gap}")
    v = np.asarray(weights, dtype=float)
    if np.any(v < 0.0):
        raise DomainError("weights must be nonnegative")
    offsets = np.atleast_2d(np.asarray(offsets, dtype=int))
    m = int(np.count_nonzero(v))
    if gap == 0.0 and power - 0.5 * m >= 0.0:
        # Edge singularity is not integrable.
        vals = np.full(len(offsets), math.inf)
        return vals, QuadratureResult(math.inf, math.inf, Status.DIVERGENT, 0, method="bessel")
    coarse, _, _ = _laplace_box(v, gap, offsets, power, 24, horizon_scale)
    fine, tail_err, evals = _laplace_box(v, gap, offsets, power, 40, horizon_scale)
    scale = max(1.0, float(np.max(np.abs(fine))))
    err = float(np.max(np.abs(fine - coarse))) + tail_err + 4e-16 * scale
    status = Status.CONVERGED if err <= rel_tol * scale else Status.INCONCLUSIVE
    return fine, QuadratureResult(
        float(fine[0]), err, status, evals, method="bessel"
    )


def integrate_bessel_path(
    weights: Sequence[float],
    shift: float,
    *,
    power: int = 1,
    gap: float | None = None,
    rel_tol: float = 1e-12,
) -> QuadratureResult:
    """Average of ``(a - sum_k v_k cos psi_k)^{-n}`` over the torus.

    Uses ``(2 pi)^{-d} int dpsi / (a - sum v cos psi) =
    int_0^inf e^{-a t} prod_k I_0(v_k t) dt``.

    Parameters
    ----------
    weights : sequence of float
        Nonnegative weights ``v_k``.
    shift : float
        The constant ``a``; must satisfy ``a >= sum v_k``.
    power : int
        Power ``n`` of the denominator.
    gap : float, optional
        ``a - sum v_k`` supplied directly.  Pass it when it is tiny, since
        forming it from ``shift`` loses all its digits.
    rel_tol : float
        Target relative accuracy.

    Raises
    ------
    DomainError
        If ``a < sum v_k``: the denominator changes sign on the torus.
    """
    v = np.asarray(weights, dtype=float)
    total = float(np.sum(v))
    if gap is None:
        if shift < total:
            raise DomainError(
                f"shift {shift} is below sum of weights {total}; the denominator changes sign"
            )
        gap = shift - total
    elif gap < 0.0:
        raise DomainError(f"gap must be nonnegative, got {gap}")
    zero = np.zeros((1, v.size), dtype=int)
    _, result = bessel_path_coefficients(v, gap, zero, power=power, rel_tol=rel_tol)
    return result


def bessel_horizon_probe(
    weights: Sequence[float],
    spec: QuadratureSpec,
    *,
    power: int = 2,
    initial_horizon: float = 16.0,
) -> QuadratureResult:
    """Decide finiteness of an edge integral from truncated Laplace integrals.

    Evaluates ``int_0^T t^{n-1} prod_k ive(0, v_k t) dt / (n-1)!`` for horizons
    ``T_j = T_0 4^j``.  Quadrupling the horizon probes the same scales as
    halving the grid spacing of a torus grid (the singular region has
    radius ~ T^{-1/2}), so the sequence is judged exactly like a grid
    refinement sequence.  The returned value is normalized by ``(2 pi)^m``.
    """
    v = np.asarray(weights, dtype=float)
    if np.any(v <= 0.0):
        raise DomainError("probe weights must be positive")
    t0 = initial_horizon / v.min()
    t_max = t0 * 4.0**spec.max_doublings
    # Anchor the panels so that every horizon is a panel edge.
    first = t0 / 2.0 ** math.ceil(math.log2(t0 * 2.0 * v.max()))
    nodes, wts = _gauss_panels(t_max, first, 40)
    integrand = wts * nodes ** (power - 1) * np.prod(special.ive(0, np.outer(v, nodes)), axis=0)
    cumulative = np.cumsum(integrand) / math.factorial(power - 1)
    raw: list = []
    evaluations = 0
    for j in range(spec.max_doublings + 1):
        horizon = t0 * 4.0**j
        upto = int(np.searchsorted(nodes, horizon))
        raw.append(float(cumulative[upto - 1]))
        evaluations = upto
        value, err, status = _assess(raw, spec, "auto")
        if status is Status.CONVERGED:
            return QuadratureResult(value, err, status, evaluations, tuple(raw), method="horizon")
    value, err, status = _assess(raw, spec, "auto")
    return QuadratureResult(value, err, status, evaluations, tuple(raw), method="horizon")

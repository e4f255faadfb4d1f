"""Bound-state eigenfunctions and the one-particle subspace generator.

The fiber bound state at ``phi`` is, up to a constant, the lattice Fourier
transform of ``1 / (sum_k r_k cos(psi_k - eta_k) - d + nu / (2 Lambda))``
with ``Lambda = lam1 + lam2``.  Shifting ``psi`` by ``eta`` splits it into a
gauge phase ``exp(-i eta . x)`` times the real kernel

.. math::

    K(\\phi, x) = \\frac{\\mu}{2\\Lambda}\\frac{1}{(2\\pi)^d}\\int_{T^d}
        \\frac{\\prod_k \\cos(x_k \\psi_k)\\,d\\psi}
             {\\sum_k r_k \\cos\\psi_k - d + \\nu / (2\\Lambda)} ,

which equals one at ``x = 0`` exactly when ``nu`` solves the dispersion
equation.  The kernel is computed from the sign-definite edge form: above
the band ``K(x) = (mu / 2 Lambda) (-1)^{|x|_1} G_g(x)`` and below it
``K(x) = -(mu / 2 Lambda) G_g(x)``, where ``G_g`` is the lattice Green's
function of ``g + sum_k r_k (1 - cos psi_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Sequence

import numpy as np

from .errors import DomainError, NoEigenfunctionError, NotSquareIntegrableError
from .green import edge_square_integrable
from .model import (
    OneParticleParams,
    QuasiMomentum,
    TwoParticleParams,
    _as_phi,
    axis_weights,
    band_edges,
    eta_of,
)
from .quadrature import (
    QuadratureResult,
    QuadratureSpec,
    Status,
    bessel_path_coefficients,
    fourier_coefficients,
)
from .spectral import VerdictKind, classify_fiber, classify_one_particle, subspace_exists, SubspaceVerdict

__all__ = [
    "Gauge",
    "LatticeVector",
    "KernelSample",
    "G0Result",
    "DecayFit",
    "kernel_K",
    "one_particle_eigenfunction",
    "fiber_eigenvector",
    "subspace_generator_g0",
    "fit_decay",
]

# Samples per FFT level the kernel evaluator plans for.
_FFT_BUDGET = 1 << 22


class Gauge(str, Enum):
    """Phase convention for fiber eigenvectors.

    ``FIBER`` includes the factor ``exp(-i eta . x)`` and gives the exact
    eigenvector of the fiber operator.  ``COSINE`` drops it and returns the
    real kernel ``K`` itself, which is an eigenvector only where ``eta = 0``.
    """

    FIBER = "fiber"
    COSINE = "cosine"


@dataclass(frozen=True)
class LatticeVector:
    """Function on the box ``[-R, R]^d`` stored as an array of shape ``(2R+1,)*d``."""

    radius: int
    values: np.ndarray = field(repr=False)
    norm_sq: float = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        width = 2 * self.radius + 1
        if any(n != width for n in vals.shape):
            raise DomainError(f"values of shape {vals.shape} do not fit radius {self.radius}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "norm_sq", float(np.sum(np.abs(vals) ** 2)))

    @property
    def d(self) -> int:
        return self.values.ndim

    def at(self, x: Sequence[int]):
        """Value at lattice point ``x``; zero outside the box."""
        if any(abs(c) > self.radius for c in x):
            return 0.0
        return self.values[tuple(c + self.radius for c in x)]

    def points(self):
        """Lattice points in C order of the storage array."""
        r = range(-self.radius, self.radius + 1)
        return product(r, repeat=self.d)

    def truncated(self, radius: int) -> "LatticeVector":
        """Restriction to a smaller box."""
        if radius > self.radius:
            raise DomainError("cannot enlarge a lattice vector")
        cut = slice(self.radius - radius, self.radius + radius + 1)
        return LatticeVector(radius, self.values[(cut,) * self.d])

    def embed(self, shape: tuple, origin: tuple) -> np.ndarray:
        """Place the values into a zero array of ``shape`` centred at ``origin``."""
        out = np.zeros(shape, dtype=self.values.dtype)
        src, dst = [], []
        for n, o in zip(shape, origin):
            lo = max(-self.radius, -o)
            hi = min(self.radius, n - 1 - o)
            src.append(slice(lo + self.radius, hi + self.radius + 1))
            dst.append(slice(lo + o, hi + o + 1))
        out[tuple(dst)] = self.values[tuple(src)]
        return out


@dataclass(frozen=True)
class KernelSample:
    """Kernel ``K(phi, .)`` on a box at energy ``nu``."""

    phi: QuasiMomentum
    nu: float
    values: LatticeVector
    result: QuadratureResult = field(repr=False, default=None)

    @property
    def at_origin(self) -> float:
        return float(np.real(self.values.at((0,) * self.values.d)))


@dataclass(frozen=True)
class DecayFit:
    """Envelope ``|f(x)| <= C t^{|x|_1}`` fitted over a box."""

    C: float
    t: float


def fit_decay(vec: LatticeVector, *, floor: float = 1e-13) -> DecayFit:
    """Least-squares fit of ``log |f|`` against ``|x|_1``, then the tightest ``C``.

    Entries below ``floor`` relative to the largest are ignored, since they
    are at the level of quadrature noise.
    """
    mags = np.abs(vec.values)
    idx = np.indices(mags.shape) - vec.radius
    dist = np.abs(idx).sum(axis=0)
    keep = mags > floor * mags.max()
    if keep.sum() < 2 or np.ptp(dist[keep]) == 0:
        return DecayFit(float(mags.max()), 0.0)
    slope, _ = np.polyfit(dist[keep], np.log(mags[keep]), 1)
    t = float(math.exp(slope))
    C = float(np.max(mags[keep] / t ** dist[keep]))
    return DecayFit(C, t)


# ---------------------------------------------------------------------------
# Lattice Green's function of the edge form


def _fft_points(v: np.ndarray, gap: float, radius: int, rel_tol: float) -> int | None:
    """Grid size that resolves the integrand, or None when over budget."""
    s = v.size
    if gap <= 0.0:
        return None
    strip = math.acosh(1.0 + gap / float(v.max()))
    needed = max(2 * (2 * radius + 1), 2.0 * math.log(100.0 / rel_tol) / strip)
    n = 16
    while n < needed:
        n *= 2
    return n if n**s <= _FFT_BUDGET else None


def _green_box(v: np.ndarray, gap: float, radius: int, rel_tol: float):
    """``G_g(x)`` for ``x`` in ``[-R, R]^s`` over the active axes."""
    s = v.size
    width = 2 * radius + 1
    if s == 0:
        return np.array(1.0 / gap), QuadratureResult(1.0 / gap, 0.0, Status.CONVERGED, 0, method="closed-form")
    n = _fft_points(v, gap, radius, rel_tol)
    if n is not None:

        def f(*axes):
            den = gap
            for w, a in zip(v, axes):
                den = den + 2.0 * w * np.sin(0.5 * a) ** 2
            return 1.0 / den

        spec = QuadratureSpec(
            dims=s, initial_points_per_axis=n // 2 if n >= 8 else 4, rel_tol=rel_tol, max_evaluations=_FFT_BUDGET * 2**s
        )
        vals, res = fourier_coefficients(f, spec, radius)
        if res.converged:
            return vals, res
    # The Green's function depends on |x_k| only: compute one orthant and mirror.
    quarter = np.array(list(product(range(radius + 1), repeat=s)), dtype=int)
    vals_q, res = bessel_path_coefficients(v, gap, quarter, rel_tol=rel_tol)
    orth = vals_q.reshape((radius + 1,) * s)
    full = orth
    for k in range(s):
        mirrored = np.flip(np.take(full, np.arange(1, radius + 1), axis=k), axis=k)
        full = np.concatenate([mirrored, full], axis=k)
    return full.reshape((width,) * s), res


def _kernel_values(phi: QuasiMomentum, nu: float, p: TwoParticleParams, radius: int, rel_tol: float):
    edges = band_edges(phi, p)
    total = p.total_hopping
    r = axis_weights(phi, p)
    active = r > 0.0
    s = int(active.sum())
    if edges.beta1 < nu < edges.beta2:
        raise DomainError(f"nu = {nu} lies inside the band ({edges.beta1}, {edges.beta2})")
    if edges.beta1 == edges.beta2 == nu:
        raise DomainError("nu coincides with a degenerate band; the kernel is undefined")
    above = nu >= edges.beta2
    gap = (nu - edges.beta2) / (2.0 * total) if above else (edges.beta1 - nu) / (2.0 * total)
    if gap == 0.0 and not edge_square_integrable(s):
        raise NotSquareIntegrableError(
            f"band-edge kernel with s = {s} active axes is not square summable (needs s >= 5)"
        )
    g_active, res = _green_box(r[active], gap, radius, rel_tol)
    width = 2 * radius + 1
    shape = [width if a else 1 for a in active]
    full = np.zeros((width,) * p.d)
    centre = tuple(slice(None) if a else slice(radius, radius + 1) for a in active)
    full[centre] = np.asarray(g_active).reshape(shape)
    pref = p.mu / (2.0 * total)
    if above:
        idx = np.indices(full.shape) - radius
        parity = np.where(np.abs(idx).sum(axis=0) % 2 == 0, 1.0, -1.0)
        return pref * parity * full, res
    return -pref * full, res


def _default_tol(d: int) -> float:
    return 1e-12 if d <= 2 else 1e-10


def kernel_K(
    phi, nu: float, p: TwoParticleParams, radius: int, *, rel_tol: float | None = None
) -> KernelSample:
    """Real kernel ``K(phi, x)`` on ``[-radius, radius]^d``.

    Raises
    ------
    DomainError
        If ``nu`` lies inside the band.
    NotSquareIntegrableError
        If ``nu`` is a band edge and fewer than five axes are active.
    """
    if radius < 0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    phi = _as_phi(phi, p.d)
    vals, res = _kernel_values(phi, float(nu), p, radius, rel_tol or _default_tol(p.d))
    return KernelSample(phi, float(nu), LatticeVector(radius, vals), res)


def _gauge_phase(phi: QuasiMomentum, p: TwoParticleParams, radius: int) -> np.ndarray:
    r = axis_weights(phi, p)
    eta = np.array([0.0 if w == 0.0 else eta_of(a, p) for w, a in zip(r, phi.phi)])
    idx = np.indices((2 * radius + 1,) * p.d) - radius
    return np.exp(-1j * np.tensordot(eta, idx, axes=1))


def one_particle_eigenfunction(
    p: OneParticleParams, nu: float | None = None, radius: int = 10, *, rel_tol: float | None = None
) -> LatticeVector:
    """Bound state of ``-lam Laplacian + mu delta_0``, scaled so that ``f(0) = 1``.

    Parameters
    ----------
    nu : float, optional
        Eigenvalue; taken from :func:`classify_one_particle` when omitted.

    Raises
    ------
    NotSquareIntegrableError
        If ``nu`` is a band edge in ``d <= 4``.
    NoEigenfunctionError
        If no bound state exists.
    """
    lo, hi = p.band
    if nu is not None and nu in (lo, hi) and not edge_square_integrable(p.d):
        raise NotSquareIntegrableError(f"band-edge eigenfunction is not square summable in d = {p.d}")
    verdict = classify_one_particle(p).point
    if verdict.kind is VerdictKind.ABSENT:
        raise NoEigenfunctionError(f"no bound state ({verdict.regime})")
    nu = verdict.nu if nu is None else float(nu)
    fiber = TwoParticleParams(0.5 * p.lam, 0.5 * p.lam, p.mu, p.d)
    vals, _ = _kernel_values(QuasiMomentum.zero(p.d), nu, fiber, radius, rel_tol or _default_tol(p.d))
    return LatticeVector(radius, vals / vals[(radius,) * p.d])


def fiber_eigenvector(
    phi, p: TwoParticleParams, radius: int, *, gauge: Gauge = Gauge.FIBER, rel_tol: float | None = None
) -> tuple[float, LatticeVector]:
    """Eigenvalue and eigenvector of the fiber operator with ``F0(phi, 0) = K(phi, 0)``.

    The eigenvector is ``exp(-i eta . x) K(phi, x)`` in the fiber gauge and
    ``K(phi, x)`` in the cosine gauge.

    Raises
    ------
    NoEigenfunctionError
        If the fiber has no bound state.
    """
    phi = _as_phi(phi, p.d)
    verdict = classify_fiber(phi, p).point
    if verdict.kind is VerdictKind.ABSENT:
        raise NoEigenfunctionError(f"no bound state at phi = {phi.phi} ({verdict.regime})")
    sample = kernel_K(phi, verdict.nu, p, radius, rel_tol=rel_tol)
    vals = sample.values.values
    if Gauge(gauge) is Gauge.FIBER:
        vals = vals * _gauge_phase(phi, p, radius)
    return verdict.nu, LatticeVector(radius, vals)


# ---------------------------------------------------------------------------
# Subspace generator


@dataclass(frozen=True)
class G0Result:
    """Generator ``g0(x1, x)`` on ``[-R1, R1]^d x [-R, R]^d``.

    ``values[i, j]`` is indexed by the flattened C-order positions of ``x1``
    in its box and ``x`` in its box; :meth:`at` accepts lattice points.
    """

    radius_pair: tuple
    values: np.ndarray = field(repr=False)
    gauge: Gauge
    phi_points: int
    abs_error_estimate: float
    status: Status

    def at(self, x1: Sequence[int], x: Sequence[int]):
        r1, r = self.radius_pair
        d = len(x)
        i = np.ravel_multi_index(tuple(c + r1 for c in x1), (2 * r1 + 1,) * d)
        j = np.ravel_multi_index(tuple(c + r for c in x), (2 * r + 1,) * d)
        return self.values[i, j]

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def _phi_nodes(n: int, d: int):
    """Nested periodic nodes ``2 pi j / n`` per axis, as index tuples and angles."""
    return list(product(range(n), repeat=d))


def subspace_generator_g0(
    p: TwoParticleParams,
    radius_pair: tuple,
    *,
    gauge: Gauge = Gauge.FIBER,
    energy_weighted: bool = False,
    initial_points: int = 16,
    max_points: int | None = None,
    rel_tol: float = 1e-8,
) -> G0Result:
    """Generator of the one-particle subspace.

    .. math::

        g_0(x_1, x) = (2\\pi)^{-d/2}\\int_{T^d} F_0(\\phi, x)
                      e^{-i x_1\\cdot\\phi}\\,d\\phi ,

    with ``F0`` from :func:`fiber_eigenvector` in the chosen gauge.  The
    phi-integral uses nested periodic trapezoid grids; ``nu(phi)`` and the
    kernel are computed once per node and reused for every ``(x1, x)``.

    Parameters
    ----------
    radius_pair : (int, int)
        Box radii ``R1`` for ``x1`` and ``R`` for ``x``.
    gauge : Gauge
        ``FIBER`` (default) includes the gauge phase; its translates span a
        subspace on which the two-particle Hamiltonian acts as
        multiplication by ``nu(phi)``, and the result is real and symmetric
        under ``(x1, x) -> (-x1, -x)``.  ``COSINE`` integrates ``K`` alone;
        it is real and symmetric under each reflection separately but is
        not invariant under the Hamiltonian unless ``eta`` vanishes.
    energy_weighted : bool
        Multiply the integrand by ``nu(phi)``; in the fiber gauge this
        yields the image of ``g0`` under the two-particle Hamiltonian.
    max_points : int, optional
        Largest number of phi nodes per axis (default 1024 for d = 1,
        64 for d = 2, 16 beyond).

    Raises
    ------
    NoEigenfunctionError
        If no one-particle subspace exists.
    """
    if subspace_exists(p) is not SubspaceVerdict.EXISTS_UNIQUE:
        raise NoEigenfunctionError("no one-particle subspace for these parameters")
    gauge = Gauge(gauge)
    r1, r = (int(v) for v in radius_pair)
    if r1 < 0 or r < 0:
        raise DomainError("radii must be nonnegative")
    d = p.d
    if max_points is None:
        max_points = {1: 1024, 2: 64}.get(d, 16)
    cache: dict = {}

    def node_data(j: tuple, n: int):
        # Key by the exact angle in units of pi so nested grids share nodes.
        key = tuple(2 * jj * (max_points // n) for jj in j)
        if key not in cache:
            phi = QuasiMomentum.from_pi_units([2.0 * jj / n for jj in j])
            nu, vec = fiber_eigenvector(phi, p, r, gauge=gauge)
            vals = vec.values.ravel()
            if energy_weighted:
                vals = nu * vals
            cache[key] = (phi.as_array(), vals)
        return cache[key]

    x1_pts = np.array(list(product(range(-r1, r1 + 1), repeat=d)), dtype=float).reshape(-1, d)
    prev = None
    n = initial_points
    err = math.inf
    status = Status.INCONCLUSIVE
    values = None
    while n <= max_points:
        acc = 0.0
        for j in _phi_nodes(n, d):
            angles, vals = node_data(j, n)
            phase = np.exp(-1j * (x1_pts @ angles))
            acc = acc + np.outer(phase, vals)
        values = acc * (2.0 * math.pi / n) ** d / (2.0 * math.pi) ** (d / 2.0)
        if prev is not None:
            err = float(np.max(np.abs(values - prev)))
            if err <= rel_tol * max(1.0, float(np.max(np.abs(values)))):
                status = Status.CONVERGED
                break
        prev = values
        n *= 2
    n = min(n, max_points)
    if np.max(np.abs(values.imag)) <= 1e-12 * max(1.0, float(np.max(np.abs(values)))):
        values = values.real.copy()
    return G0Result((r1, r), values, gauge, n, err, status)

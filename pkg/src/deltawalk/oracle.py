"""Finite-lattice operators and eigensolvers for brute-force validation.

Operators are applied matrix-free on arrays shaped like the lattice box.
Open boundaries use the box ``[-L, L]^d`` with the origin at index ``L``;
periodic boundaries (tori) use ``n`` sites per axis with the origin at
index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import ConfigurationError, ConvergenceError, ResourceError
from .model import OneParticleParams, TwoParticleParams, _as_phi

__all__ = [
    "Boundary",
    "Which",
    "SparseOperator",
    "EigResult",
    "DEFAULT_SEED",
    "DENSE_LIMIT",
    "build_one_particle",
    "build_fiber",
    "build_two_particle_torus",
    "extremal_eigen",
    "full_spectrum",
    "hermiticity_defect",
]

# Seed for Krylov starting vectors and Hermiticity probes.
DEFAULT_SEED = 20240607
# Largest dimension for which dense matrices are formed.
DENSE_LIMIT = 4096
# Default memory budget for the two-particle torus (bytes).
DEFAULT_MEMORY_BUDGET = 2 << 30


class Boundary(str, Enum):
    OPEN = "Open"
    PERIODIC = "Periodic"


class Which(str, Enum):
    LARGEST = "Largest"
    SMALLEST = "Smallest"


@dataclass(frozen=True)
class SparseOperator:
    """Matrix-free linear operator on a lattice box.

    Attributes
    ----------
    shape : tuple of int
        Lattice box shape; vectors are flattened in C order.
    action : callable
        Maps an array of ``shape`` to an array of ``shape``.
    hermitian : bool
    norm_bound : float
        Upper bound on the operator norm (Gershgorin).
    origin : tuple of int
        Index of the lattice origin inside the box.
    """

    shape: tuple
    action: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    hermitian: bool = True
    norm_bound: float = 0.0
    origin: tuple = ()

    @property
    def dimension(self) -> int:
        return math.prod(self.shape)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        return self.action(v.reshape(self.shape)).reshape(v.shape)

    def to_dense(self) -> np.ndarray:
        """Dense matrix; only for dimensions up to :data:`DENSE_LIMIT`."""
        n = self.dimension
        if n > DENSE_LIMIT:
            raise ResourceError(f"dense matrix of dimension {n} exceeds the limit {DENSE_LIMIT}")
        eye = np.eye(n, dtype=complex)
        cols = [self.matvec(eye[:, j]) for j in range(n)]
        return np.stack(cols, axis=1)

    def as_linear_operator(self) -> LinearOperator:
        n = self.dimension
        return LinearOperator((n, n), matvec=lambda v: self.matvec(np.asarray(v).ravel()), dtype=complex)


@dataclass(frozen=True)
class EigResult:
    """Extremal eigenpair with its post-hoc residual ``||Av - value v|| / ||v||``."""

    value: float
    vector: np.ndarray = field(repr=False)
    residual: float
    iterations: int


def _hop_action(amplitudes, diagonal: float, shape, origin, mu: float, bc: Boundary):
    """``(Au)(x) = sum_k -a_k u(x - e_k) - conj(a_k) u(x + e_k) + diag u(x) + mu delta u``."""
    amps = [complex(a) for a in amplitudes]

    def act(u):
        u = np.asarray(u, dtype=complex)
        out = diagonal * u
        for k, a in enumerate(amps):
            if a == 0.0:
                continue
            if bc is Boundary.PERIODIC:
                out = out - a * np.roll(u, 1, axis=k) - np.conj(a) * np.roll(u, -1, axis=k)
            else:
                lead = [slice(None)] * u.ndim
                tail = [slice(None)] * u.ndim
                lead[k], tail[k] = slice(1, None), slice(None, -1)
                out[tuple(lead)] -= a * u[tuple(tail)]
                out[tuple(tail)] -= np.conj(a) * u[tuple(lead)]
        out[origin] += mu * u[origin]
        return out

    return act


def _box(d: int, L: int | None, n_sites: int | None, bc: Boundary):
    if n_sites is not None:
        if n_sites < 1:
            raise ConfigurationError(f"n_sites must be >= 1, got {n_sites}")
        return (n_sites,) * d, (0,) * d
    if L is None or L < 1:
        raise ConfigurationError(f"box radius L must be >= 1, got {L}")
    return (2 * L + 1,) * d, (L,) * d


def build_one_particle(
    p: OneParticleParams, L: int, bc: Boundary = Boundary.OPEN, *, n_sites: int | None = None
) -> SparseOperator:
    """``-lam Laplacian + mu delta_0`` on a finite box or torus.

    Parameters
    ----------
    L : int
        Box radius; the box holds ``(2L+1)^d`` sites.  Ignored when
        ``n_sites`` is given.
    bc : Boundary
        Open (hard wall) or periodic.
    n_sites : int, optional
        Build a torus with this many sites per axis instead of a box.
    """
    bc = Boundary(bc)
    shape, origin = _box(p.d, L, n_sites, bc)
    diag = 2.0 * p.lam * p.d
    act = _hop_action([p.lam] * p.d, diag, shape, origin, p.mu, bc)
    return SparseOperator(shape, act, True, diag + 2.0 * p.lam * p.d + abs(p.mu), origin)


def build_fiber(
    phi, p: TwoParticleParams, L: int | None, bc: Boundary = Boundary.OPEN, *, n_sites: int | None = None
) -> SparseOperator:
    """Fiber operator at quasi-momentum ``phi`` on a finite box or torus.

    Hopping to ``x - e_k`` has amplitude ``-(lam1 e^{-i phi_k} + lam2)`` and
    to ``x + e_k`` its conjugate; the diagonal is
    ``2 d (lam1 + lam2) + mu delta_{x,0}``.
    """
    bc = Boundary(bc)
    phi = _as_phi(phi, p.d)
    shape, origin = _box(p.d, L, n_sites, bc)
    amps = [p.lam1 * np.exp(-1j * a) + p.lam2 for a in phi.phi]
    # exp(-i pi) is not exactly -1; restore the exact cancellation.
    amps = [0.0 if (p.lam1 == p.lam2 and a == math.pi) else amp for a, amp in zip(phi.phi, amps)]
    diag = 2.0 * p.d * p.total_hopping
    act = _hop_action(amps, diag, shape, origin, p.mu, bc)
    bound = diag + 2.0 * sum(abs(a) for a in amps) + abs(p.mu)
    return SparseOperator(shape, act, True, bound, origin)


def build_two_particle_torus(
    p: TwoParticleParams, N: int, *, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> SparseOperator:
    """Two-particle Hamiltonian on the torus ``(Z/N)^d x (Z/N)^d``.

    Axes ``0..d-1`` carry particle one (hopping ``lam1``), axes ``d..2d-1``
    particle two (hopping ``lam2``); the interaction ``mu`` acts where the
    two positions coincide.

    Raises
    ------
    ResourceError
        If the working set of a Krylov solve (about 32 complex vectors)
        exceeds ``memory_budget`` bytes.
    """
    if N < 3:
        raise ConfigurationError(f"N must be >= 3, got {N}")
    d = p.d
    dim = N ** (2 * d)
    need = dim * 16 * 32
    if need > memory_budget:
        raise ResourceError(
            f"two-particle torus with N={N}, d={d} needs about {need} bytes; budget is {memory_budget} bytes"
        )
    shape = (N,) * (2 * d)
    diag = 2.0 * d * p.total_hopping
    grids = np.indices(shape, sparse=True)
    coincide = np.ones(shape, dtype=bool)
    for k in range(d):
        coincide = coincide & (grids[k] == grids[d + k])
    hops = [p.lam1] * d + [p.lam2] * d

    def act(u):
        u = np.asarray(u, dtype=complex)
        out = diag * u + p.mu * coincide * u
        for k, a in enumerate(hops):
            out = out - a * (np.roll(u, 1, axis=k) + np.roll(u, -1, axis=k))
        return out

    bound = 2.0 * diag + abs(p.mu)
    return SparseOperator(shape, act, True, bound, (0,) * (2 * d))


def hermiticity_defect(A: SparseOperator, *, seed: int = DEFAULT_SEED, probes: int = 3) -> float:
    """Largest ``|<Av, w> - <v, Aw>|`` over random unit probes, relative to ``norm_bound``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = A.dimension
    for _ in range(probes):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        w /= np.linalg.norm(w)
        lhs = np.vdot(w, A.matvec(v))
        rhs = np.vdot(A.matvec(w), v)
        worst = max(worst, abs(lhs - rhs) / max(A.norm_bound, 1.0))
    return worst


def _residual(A: SparseOperator, value: float, vec: np.ndarray) -> float:
    return float(np.linalg.norm(A.matvec(vec) - value * vec) / np.linalg.norm(vec))


def extremal_eigen(
    A: SparseOperator,
    which: Which,
    tol: float = 1e-10,
    *,
    max_iter: int | None = None,
    seed: int = DEFAULT_SEED,
) -> EigResult:
    """Largest or smallest eigenpair of a Hermitian operator.

    Uses implicitly restarted Lanczos (ARPACK) from a seeded random start;
    dimensions up to 64 are diagonalized densely.

    Raises
    ------
    ConvergenceError
        If the residual target is not met within ``max_iter`` restarts; the
        error carries the best residual seen.
    """
    which = Which(which)
    if not A.hermitian:
        raise ConfigurationError("extremal_eigen needs a Hermitian operator")
    n = A.dimension
    if n <= 64:
        vals, vecs = np.linalg.eigh(A.to_dense())
        j = -1 if which is Which.LARGEST else 0
        vec = vecs[:, j]
        return EigResult(float(vals[j]), vec, _residual(A, float(vals[j]), vec), 1)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    scale = max(A.norm_bound, 1.0)
    max_iter = max_iter or max(1000, 10 * n)
    count = [0]

    def mv(v):
        count[0] += 1
        return A.matvec(np.asarray(v).ravel())

    op = LinearOperator((n, n), matvec=mv, dtype=complex)
    key = "LA" if which is Which.LARGEST else "SA"
    ncv = min(n - 1, 40)
    try:
        vals, vecs = eigsh(op, k=1, which=key, tol=tol / scale, v0=v0, ncv=ncv, maxiter=max_iter)
    except ArpackNoConvergence as exc:
        best = math.inf
        for val, vec in zip(exc.eigenvalues, exc.eigenvectors.T):
            best = min(best, _residual(A, float(np.real(val)), vec))
        raise ConvergenceError(f"Lanczos did not converge in {max_iter} iterations", best) from exc
    value = float(np.real(vals[0]))
    vec = vecs[:, 0]
    res = _residual(A, value, vec)
    if res > tol:
        # One more pass seeded with the current vector tightens the residual.
        vals, vecs = eigsh(op, k=1, which=key, tol=tol / scale / 100.0, v0=vec, ncv=ncv, maxiter=max_iter)
        value = float(np.real(vals[0]))
        vec = vecs[:, 0]
        res = _residual(A, value, vec)
        if res > tol:
            raise ConvergenceError(f"residual {res:.3e} above tolerance {tol:.3e}", res)
    return EigResult(value, vec, res, count[0])


def full_spectrum(A: SparseOperator) -> np.ndarray:
    """All eigenvalues, ascending, by dense diagonalization."""
    return np.linalg.eigvalsh(A.to_dense())

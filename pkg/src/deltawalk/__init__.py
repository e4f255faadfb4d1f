"""Bound states of ultralocal interactions on the lattice Z^d.

One particle with Hamiltonian ``-lam Laplacian + mu delta_0`` and two
particles with a contact interaction, reduced to fiber operators at fixed
total quasi-momentum.  The package computes lattice Green's functions,
solves the dispersion equation, builds eigenvectors, and checks all of it
against brute-force finite-lattice diagonalization.
"""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DeltaWalkError,
    DomainError,
    IntegrandEvaluationError,
    NoEigenfunctionError,
    NoSolutionError,
    NotSquareIntegrableError,
    ParameterError,
    ResourceError,
    UndefinedPhaseError,
)
from .green import (
    GreenValue,
    b_probe,
    c_d_phi,
    edge_resolvent,
    edge_square_integrable,
    p_of_nu,
    q_of_nu,
    q_of_nu_unreduced,
    watson_asymptotic,
    watson_c,
    watson_c1,
    watson_w,
)
from .model import (
    BandEdges,
    OneParticleParams,
    QuasiMomentum,
    TwoParticleParams,
    axis_weights,
    band_edges,
    eta_of,
    gamma,
    r_of,
    support_set,
)
from .oracle import (
    Boundary,
    SparseOperator,
    Which,
    build_fiber,
    build_one_particle,
    build_two_particle_torus,
    extremal_eigen,
    full_spectrum,
    hermiticity_defect,
)
from .quadrature import (
    QuadratureResult,
    QuadratureSpec,
    Status,
    bessel_horizon_probe,
    fourier_coefficients,
    integrate_bessel_path,
    integrate_mesh_family,
    integrate_periodic,
)
from .spectral import (
    DispersionSurface,
    PointSpectrumVerdict,
    SpectrumReport,
    SubspaceVerdict,
    VerdictKind,
    classify_fiber,
    classify_one_particle,
    dispersion_surface,
    solve_dispersion,
    subspace_exists,
)
from .wavefunction import (
    Gauge,
    LatticeVector,
    fiber_eigenvector,
    fit_decay,
    kernel_K,
    one_particle_eigenfunction,
    subspace_generator_g0,
)

__version__ = "0.1.0"

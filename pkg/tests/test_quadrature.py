import math

import numpy as np
import pytest

from deltawalk.errors import ConfigurationError, IntegrandEvaluationError, ResourceError
from deltawalk.quadrature import (
    QuadratureSpec,
    Status,
    bessel_horizon_probe,
    bessel_path_coefficients,
    default_rel_tol,
    fourier_coefficients,
    integrate_bessel_path,
    integrate_mesh_family,
    integrate_periodic,
    richardson_table,
)

TWO_PI = 2 * math.pi


def test_default_tolerances():
    assert default_rel_tol(1) == 1e-9
    assert default_rel_tol(4) == 1e-7
    assert default_rel_tol(6) == 1e-5


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dims": 0},
        {"dims": 2, "initial_points_per_axis": 0},
        {"dims": 2, "rel_tol": 0.0},
        {"dims": 2, "divergence_growth_factor": 1.0},
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ConfigurationError):
        QuadratureSpec(**kwargs)


def test_constant_integrand():
    res = integrate_periodic(lambda a, b: np.ones(np.broadcast(a, b).shape), QuadratureSpec.default(2))
    assert res.status is Status.CONVERGED
    assert res.value == pytest.approx(TWO_PI**2, rel=1e-12)


def test_smooth_periodic_integrand():
    res = integrate_periodic(lambda a: 1.0 / (2.0 + np.cos(a)), QuadratureSpec.default(1))
    assert res.converged
    assert abs(res.value - TWO_PI / math.sqrt(3.0)) < 1e-9 * TWO_PI


def test_even_half_grid_matches_full_grid():
    f = lambda a, b: 1.0 / (3.0 - np.cos(a) - np.cos(b))
    full = integrate_periodic(f, QuadratureSpec.default(2))
    half = integrate_periodic(f, QuadratureSpec.default(2), even=True)
    assert abs(full.value - half.value) < 1e-9 * abs(full.value)


def test_nonfinite_integrand_reports_node():
    with pytest.raises(IntegrandEvaluationError) as info:
        integrate_periodic(lambda a: 1.0 / np.where(np.abs(a) < 10, np.nan, 1.0), QuadratureSpec.default(1))
    assert info.value.node is not None


def test_budget_exhaustion():
    spec = QuadratureSpec(3, initial_points_per_axis=64, max_evaluations=1000)
    with pytest.raises(ResourceError):
        integrate_periodic(lambda a, b, c: a * 0 + 1.0, spec)


def test_divergent_integrand_is_classified():
    # 1/|a| type singularity in one dimension: log divergence of the midpoint sums.
    spec = QuadratureSpec(1, initial_points_per_axis=8)
    res = integrate_mesh_family(lambda h: (lambda a: 1.0 / (2 * np.sin(a / 2) ** 2)), spec, even=True)
    assert res.status is Status.DIVERGENT


def test_richardson_removes_known_error():
    exact = 1.0
    raw = [exact + 3.0 * h**2 + 5.0 * h**4 for h in (1.0, 0.5, 0.25)]
    table = richardson_table(raw, [2, 4])
    assert table[-1][-1] == pytest.approx(exact, abs=1e-14)


def test_fourier_coefficients_of_known_kernel():
    # Coefficients of 1/(a - cos t) decay like t^|n| with t = a - sqrt(a^2 - 1).
    a = 1.5
    coeffs, res = fourier_coefficients(lambda x: 1.0 / (a - np.cos(x)), QuadratureSpec.default(1), 6)
    t = a - math.sqrt(a * a - 1)
    n = np.arange(-6, 7)
    np.testing.assert_allclose(coeffs.real, t ** np.abs(n) / math.sqrt(a * a - 1), rtol=1e-10, atol=1e-14)
    assert res.method == "fft"


def test_bessel_path_matches_grid_in_two_dimensions():
    g = 0.3
    grid = integrate_periodic(
        lambda a, b: 1.0 / (g + 2 * np.sin(a / 2) ** 2 + 2 * np.sin(b / 2) ** 2), QuadratureSpec.default(2)
    )
    bes = integrate_bessel_path([1.0, 1.0], 2.0 + g, gap=g)
    assert abs(grid.value / TWO_PI**2 - bes.value) < 1e-9 * bes.value


def test_bessel_coefficients_match_fft():
    weights = [1.0, 0.6]
    gap = 0.2
    offsets = np.array([[0, 0], [1, 0], [2, 3], [-1, 2]])
    vals, _ = bessel_path_coefficients(weights, gap, offsets)
    f = lambda a, b: 1.0 / (gap + 2 * np.sin(a / 2) ** 2 + 0.6 * 2 * np.sin(b / 2) ** 2)
    coeffs, _ = fourier_coefficients(f, QuadratureSpec.default(2), 3)
    ref = [coeffs[3 + x, 3 + y].real for x, y in offsets]
    np.testing.assert_allclose(vals, ref, rtol=1e-8)


def test_horizon_probe_classifies_edge_square():
    assert bessel_horizon_probe([1.0] * 3, QuadratureSpec.default(3)).status is Status.DIVERGENT
    assert bessel_horizon_probe([1.0] * 5, QuadratureSpec.default(5)).status is Status.CONVERGED

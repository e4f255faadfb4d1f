import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltawalk.errors import NoSolutionError, ParameterError
from deltawalk.green import q_of_nu, watson_c
from deltawalk.model import OneParticleParams, QuasiMomentum, TwoParticleParams, band_edges
from deltawalk.spectral import (
    Side,
    SubspaceVerdict,
    VerdictKind,
    classify_fiber,
    classify_one_particle,
    dispersion_surface,
    solve_dispersion,
    subspace_exists,
    surface_grid,
)


def closed_form_1d(lam, mu):
    return 2 * lam * (1 + math.copysign(math.sqrt(1 + (mu / (2 * lam)) ** 2), mu))


@pytest.mark.parametrize("mu", [-10.0, -2.0, -0.5, 0.5, 2.0, 10.0])
def test_one_dimensional_bound_state(mu):
    point = classify_one_particle(OneParticleParams(1.0, mu, 1)).point
    assert point.kind is VerdictKind.EXISTS
    assert point.nu == pytest.approx(closed_form_1d(1.0, mu), rel=1e-10)


def test_no_bound_state_without_interaction():
    rep = classify_one_particle(OneParticleParams(1.0, 0.0, 2))
    assert rep.point.kind is VerdictKind.ABSENT
    assert rep.essential == (0.0, 8.0)


def test_solver_rejects_impossible_targets():
    q = lambda nu: 1.0 / (nu - 1.0)
    with pytest.raises(NoSolutionError):
        solve_dispersion(q, 1.0, Side.ABOVE, 0.0)
    with pytest.raises(NoSolutionError):
        solve_dispersion(q, 1.0, Side.ABOVE, -1.0)
    with pytest.raises(NoSolutionError):
        solve_dispersion(q, 1.0, Side.ABOVE, 3.0, edge_value=2.0)


def test_solver_finds_simple_root():
    nu = solve_dispersion(lambda nu: 1.0 / (nu - 1.0), 1.0, Side.ABOVE, 0.25, scale=100.0)
    assert nu == pytest.approx(5.0, rel=1e-14)


def test_three_dimensional_gate():
    c = watson_c(3).value
    star = 2.0 / c
    assert classify_one_particle(OneParticleParams(1.0, 1.1 * star, 3)).point.kind is VerdictKind.EXISTS
    at = classify_one_particle(OneParticleParams(1.0, star, 3)).point
    assert at.kind is VerdictKind.ABSENT and at.near_threshold
    assert classify_one_particle(OneParticleParams(1.0, -0.9 * star, 3)).point.kind is VerdictKind.ABSENT


def test_five_dimensional_threshold_eigenvalue():
    c = watson_c(5).value
    up = classify_one_particle(OneParticleParams(1.0, 2.0 / c, 5)).point
    down = classify_one_particle(OneParticleParams(1.0, -2.0 / c, 5)).point
    assert (up.kind, up.nu) == (VerdictKind.THRESHOLD_UPPER, 20.0)
    assert (down.kind, down.nu) == (VerdictKind.THRESHOLD_LOWER, 0.0)


def test_inert_fiber_closed_form():
    rep = classify_fiber(QuasiMomentum.from_pi_units([1]), TwoParticleParams(1.0, 1.0, 2.0, 1))
    assert rep.essential == (4.0, 4.0)
    assert rep.point.nu == 6.0


def test_equal_hoppings_with_two_active_axes_always_bind():
    # d=4 with two inert axes behaves like d=2.
    p = TwoParticleParams(1.0, 1.0, 0.01, 4)
    point = classify_fiber(QuasiMomentum.from_pi_units([1, 1, 0.3, 0]), p).point
    assert point.kind is VerdictKind.EXISTS


def test_fiber_bound_state_lies_outside_band(pair):
    for units in (0.0, 0.4, 1.0):
        phi = QuasiMomentum.from_pi_units([units])
        rep = classify_fiber(phi, pair)
        assert rep.point.nu > rep.essential[1]


def test_subspace_verdict():
    assert subspace_exists(TwoParticleParams(1.0, 2.0, 3.0, 1)) is SubspaceVerdict.EXISTS_UNIQUE
    assert subspace_exists(TwoParticleParams(1.0, 2.0, 0.0, 1)) is SubspaceVerdict.NONE
    assert subspace_exists(TwoParticleParams(1.0, 1.0, 0.5, 3)) is SubspaceVerdict.NONE


def test_surface_grid_order_and_endpoints():
    grid = surface_grid([4, 2])
    units = [g.in_pi_units() for g in grid]
    assert units[0] == (-0.5, 0.0) and units[-1] == (1.0, 1.0)
    assert units == sorted(units)
    assert surface_grid([0]) == []


def test_dispersion_surface_endpoints_and_continuity():
    p = TwoParticleParams(1.0, 1.0, 2.0, 1)
    surf = dispersion_surface([64], p)
    nus = {g.in_pi_units()[0]: v.nu for g, v in zip(surf.grid, surf.values)}
    assert len(surf) == 64
    assert nus[0.0] == pytest.approx(4 + 2 * math.sqrt(5), rel=1e-12)
    assert nus[1.0] == 6.0
    assert surf.max_adjacent_jump < 4 * 2.0 * surf.mesh


def test_dispersion_surface_independent_of_threads():
    p = TwoParticleParams(0.8, 1.3, -2.5, 2)
    a = dispersion_surface([4, 3], p, threads=1)
    b = dispersion_surface([4, 3], p, threads=4)
    assert [v.nu for v in a.values] == [v.nu for v in b.values]


def test_dispersion_surface_needs_interaction():
    with pytest.raises(ParameterError):
        dispersion_surface([4], TwoParticleParams(1.0, 1.0, 0.0, 1))


def test_mixed_verdicts_in_three_dimensions():
    # Coupling just above c(3) fails at phi = 0 but binds where c(3, phi) is larger.
    c = watson_c(3).value
    p = TwoParticleParams(1.0, 1.0, 4.0 / (1.05 * c), 3)
    kinds = {v.kind for v in dispersion_surface([2, 2, 2], p).values}
    assert kinds == {VerdictKind.EXISTS, VerdictKind.ABSENT}


@settings(max_examples=15, deadline=None)
@given(
    st.floats(0.2, 3.0),
    st.floats(0.2, 3.0),
    st.floats(0.3, 30.0),
    st.sampled_from([-1.0, 1.0]),
    st.lists(st.floats(-0.99, 1.0), min_size=2, max_size=2),
)
def test_q_strictly_decreasing_outside_band(l1, l2, mu, sign, units):
    p = TwoParticleParams(l1, l2, sign * mu, 2)
    phi = QuasiMomentum.from_pi_units(units)
    e = band_edges(phi, p)
    width = 4 * (l1 + l2) * 2
    offsets = np.geomspace(1e-3, 10.0, 8) * width
    if sign > 0:
        vals = [q_of_nu(e.beta2 + o, phi, p) for o in offsets]
    else:
        vals = [q_of_nu(e.beta1 - o, phi, p) for o in offsets[::-1]]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("mu", [4.0, -4.0])
def test_root_independent_of_bracket_start(mu):
    # Brackets grown outward from near the edge and shrunk inward from far away meet at one root.
    p = TwoParticleParams(1.0, 2.0, mu, 2)
    phi = QuasiMomentum.from_pi_units([0.3, -0.4])
    e = band_edges(phi, p)
    side, edge = (Side.ABOVE, e.beta2) if mu > 0 else (Side.BELOW, e.beta1)
    q = lambda nu: q_of_nu(nu, phi, p, rel_tol=1e-13)
    target = 2 * p.total_hopping / mu
    near = solve_dispersion(q, edge, side, target, scale=1e-6)
    far = solve_dispersion(q, edge, side, target, scale=1e3)
    assert abs(near - far) <= 10 * 1e-12 * abs(near)

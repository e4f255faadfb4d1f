import math

import numpy as np
import pytest

from deltawalk.errors import DomainError
from deltawalk.green import (
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
from deltawalk.model import OneParticleParams, QuasiMomentum, TwoParticleParams
from deltawalk.quadrature import QuadratureSpec, Status

# Independent high-resolution value of c(3) (mpmath quadrature of the
# one-dimensional Bessel representation, 30 digits).
C3 = 0.505462019717326


def test_one_dimensional_resolvent_closed_form():
    for g in (1e-3, 0.5, 4.0):
        val = edge_resolvent([1.0], g)
        assert val.value == pytest.approx(1.0 / math.sqrt(g * (g + 2.0)), rel=1e-11)


def test_inert_axes_give_closed_form():
    assert edge_resolvent([0.0, 0.0], 0.25).value == 4.0


def test_edge_resolvent_diverges_in_low_dimension():
    assert edge_resolvent([1.0, 0.3], 0.0).value == math.inf
    assert watson_c(2).value == math.inf
    assert watson_c1(1).value == -math.inf


def test_watson_three():
    c = watson_c(3)
    assert c.status is Status.CONVERGED
    assert abs(c.value - C3) < 1e-12
    assert c.cross_check is not None and abs(c.cross_check.value - C3) < 2e-7


@pytest.mark.parametrize("d", [3, 4, 5])
def test_watson_pair_symmetry(d):
    c, c1 = watson_c(d), watson_c1(d)
    assert abs(c.value + c1.value) <= 2 * QuadratureSpec.default(d).rel_tol * c.value


def test_watson_w_equals_c():
    assert watson_w(3).value == pytest.approx(watson_c(3).value, rel=1e-8)


def test_watson_large_dimension():
    assert abs(watson_c(10).value - watson_asymptotic(10)) < 5e-4
    assert watson_asymptotic(10) == pytest.approx(0.10575)


def test_watson_decreases_with_dimension():
    vals = [watson_c(d).value for d in range(3, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_edge_constant_grows_off_zero_momentum():
    p = TwoParticleParams(1.0, 1.0, 1.0, 3)
    base = c_d_phi(QuasiMomentum.zero(3), p).value
    assert base == pytest.approx(watson_c(3).value, rel=1e-9)
    assert c_d_phi(QuasiMomentum.from_pi_units([0.5, 0.0, 0.0]), p).value > base
    # Two inert axes leave one active axis and an infinite edge constant.
    assert c_d_phi(QuasiMomentum.from_pi_units([1, 1, 0]), p).value == math.inf


def test_one_particle_dispersion_at_closed_form_root():
    lam, mu = 1.0, 2.0
    nu = 2 * lam * (1 + math.sqrt(1 + (mu / (2 * lam)) ** 2))
    assert p_of_nu(nu, OneParticleParams(lam, mu, 1)) == pytest.approx(2 * lam / mu, rel=1e-12)


def test_p_of_nu_rejects_band_interior():
    with pytest.raises(DomainError):
        p_of_nu(2.0, OneParticleParams(1.0, 1.0, 1))


@pytest.mark.parametrize("units", [[0.0], [0.5], [0.8]])
def test_reduced_and_unreduced_dispersion_agree(units):
    p = TwoParticleParams(1.0, 2.0, 3.0, 1)
    phi = QuasiMomentum.from_pi_units(units)
    for nu in (13.5, -1.0):
        a = q_of_nu(nu, phi, p)
        b = q_of_nu_unreduced(nu, phi, p, QuadratureSpec.default(1)).value
        assert a == pytest.approx(b, rel=1e-9)


def test_reduced_and_unreduced_dispersion_agree_2d():
    p = TwoParticleParams(0.7, 1.3, 3.0, 2)
    phi = QuasiMomentum.from_pi_units([0.3, -0.6])
    a = q_of_nu(17.0, phi, p)
    b = q_of_nu_unreduced(17.0, phi, p, QuadratureSpec.default(2)).value
    assert a == pytest.approx(b, rel=1e-8)


def test_edge_square_integrability_threshold():
    assert [edge_square_integrable(m) for m in range(1, 8)] == [False] * 4 + [True] * 3


@pytest.mark.parametrize(
    "m, y, status",
    [(3, 3.0, Status.DIVERGENT), (4, 4.0, Status.DIVERGENT), (3, 0.0, Status.DIVERGENT), (5, 5.0, Status.CONVERGED)],
)
def test_b_probe(m, y, status):
    res = b_probe([1.0] * m, y)
    assert res.status is status
    assert len(res.history) <= 9


def test_b_probe_outside_band():
    with pytest.raises(DomainError):
        b_probe([1.0] * 3, 3.5)

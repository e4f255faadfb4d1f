import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltawalk.errors import ParameterError, UndefinedPhaseError
from deltawalk.model import (
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

hop = st.floats(0.05, 5.0)
angle = st.floats(-10.0, 10.0)


@pytest.mark.parametrize(
    "args, field",
    [((0.0, 1.0, 1), "lambda"), ((1.0, math.nan, 1), "mu"), ((1.0, 1.0, 0), "d")],
)
def test_one_particle_validation(args, field):
    with pytest.raises(ParameterError) as info:
        OneParticleParams(*args)
    assert info.value.field == field


def test_two_particle_validation_names_field():
    with pytest.raises(ParameterError) as info:
        TwoParticleParams(1.0, -1.0, 1.0, 2)
    assert info.value.field == "lambda2"


def test_band():
    assert OneParticleParams(1.5, 0.0, 2).band == (0.0, 12.0)


def test_canonical_angles():
    assert QuasiMomentum((3 * math.pi,)).phi == (math.pi,)
    assert QuasiMomentum((-math.pi,)).phi == (math.pi,)
    assert QuasiMomentum.from_pi_units([-1, 0.5]).phi == (math.pi, 0.5 * math.pi)


def test_r_exact_values():
    p = TwoParticleParams(1.0, 1.0, 1.0, 1)
    assert r_of(0.0, p) == 1.0
    assert r_of(math.pi, p) == 0.0
    assert support_set(QuasiMomentum.from_pi_units([1, 0, 1]), TwoParticleParams(1, 1, 1, 3)) == (1, [2])


def test_eta_undefined_at_zero_amplitude():
    with pytest.raises(UndefinedPhaseError):
        eta_of(math.pi, TwoParticleParams(2.0, 2.0, 1.0, 1))


@given(hop, hop, angle)
def test_r_is_modulus_of_hopping(l1, l2, a):
    p = TwoParticleParams(l1, l2, 1.0, 1)
    assert 0.0 <= r_of(a, p) <= 1.0
    assert r_of(a, p) == pytest.approx(abs(l1 * np.exp(1j * a) + l2) / (l1 + l2), abs=1e-7)


@given(hop, hop, angle)
def test_eta_is_phase_of_hopping(l1, l2, a):
    p = TwoParticleParams(l1, l2, 1.0, 1)
    z = l1 * np.exp(1j * a) + l2
    if abs(z) > 1e-6 * (l1 + l2):
        assert np.exp(1j * eta_of(a, p)) == pytest.approx(z / abs(z), abs=1e-8)


@given(hop, hop, st.lists(angle, min_size=1, max_size=4))
def test_band_edges_inside_full_band(l1, l2, phis):
    d = len(phis)
    p = TwoParticleParams(l1, l2, 0.0, d)
    e = band_edges(phis, p)
    assert 0.0 <= e.beta1 <= e.beta2 <= 4 * (l1 + l2) * d * (1 + 1e-15)
    assert e.width == pytest.approx(4 * (l1 + l2) * float(np.sum(axis_weights(phis, p))))


def test_zero_momentum_edges_are_full_band():
    p = TwoParticleParams(1.0, 2.0, 1.0, 3)
    e = band_edges(QuasiMomentum.zero(3), p)
    assert (e.beta1, e.beta2) == (0.0, 36.0)
    assert gamma(QuasiMomentum.zero(3)) == 3.0

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parsicq.errors import ConfigurationError, NumericalError
from parsicq.generators import BDF2, GENERATORS, IMPLICIT_EULER, TRAPEZOIDAL, delta, get_generator


def test_euler_at_zero():
    assert delta(IMPLICIT_EULER, 0) == 1


def test_bdf2_values():
    assert delta(BDF2, 1) == 0
    assert delta(BDF2, 0) == 1.5


def test_trapezoidal_value():
    assert delta(TRAPEZOIDAL, 0) == 2


@pytest.mark.parametrize("gen", list(GENERATORS.values()), ids=list(GENERATORS))
def test_consistency_at_one(gen):
    assert gen(1.0) == 0


def test_classical_orders():
    assert (IMPLICIT_EULER.classical_order, BDF2.classical_order, TRAPEZOIDAL.classical_order) == (1, 2, 2)


@pytest.mark.parametrize("gen", [IMPLICIT_EULER, BDF2, TRAPEZOIDAL], ids=["euler", "bdf2", "trap"])
def test_a_stable_inside_unit_disc(gen):
    rng = np.random.default_rng(7)
    zeta = 0.99 * np.exp(2j * np.pi * rng.random(1000))
    assert np.all(gen(zeta).real > 0)


@given(st.floats(0.0, 2 * np.pi))
def test_bdf2_real_part_positive(angle):
    assert BDF2(0.99 * np.exp(1j * angle)).real > 0


@pytest.mark.parametrize("gen", [IMPLICIT_EULER, BDF2], ids=["euler", "bdf2"])
def test_consistent_with_derivative(gen):
    # delta(exp(-h)) = h + O(h^{q+1})
    h = np.array([1e-2, 5e-3])
    err = np.abs(gen(np.exp(-h)) - h)
    order = np.log(err[0] / err[1]) / np.log(2) - 1
    assert order == pytest.approx(gen.classical_order, abs=0.05)


def test_trapezoidal_pole():
    with pytest.raises(NumericalError, match="pole of generating function"):
        TRAPEZOIDAL(-1.0)


def test_lookup():
    assert get_generator("BDF2") is BDF2
    with pytest.raises(ConfigurationError):
        get_generator("rk3")

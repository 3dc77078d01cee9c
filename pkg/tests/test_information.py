import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_homodyne.ensemble import builtin, from_amplitudes, make_psk, mean_photon_number
from adaptive_homodyne.information import (
    capacity_heterodyne,
    capacity_holevo_bound,
    capacity_homodyne_squeezed,
    coherent_fock_vector,
    density_matrix,
    holevo_information,
    shannon_entropy,
)

from .conftest import random_ensemble


def h2(q):
    return -(q * math.log2(q) + (1 - q) * math.log2(1 - q))


def test_shannon_examples():
    assert shannon_entropy(np.full(8, 1 / 8)) == pytest.approx(3.0)
    assert shannon_entropy([1, 0, 0]) == 0.0
    assert shannon_entropy([0.25, 0.75]) == pytest.approx(0.811278, abs=1e-6)
    assert shannon_entropy([0.25, 0.75]) == pytest.approx(h2(0.25), abs=1e-15)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=20).filter(lambda w: sum(w) > 1e-3))
def test_shannon_bounds(w):
    p = np.array(w) / sum(w)
    h = shannon_entropy(p)
    assert -1e-12 <= h <= math.log2(len(p)) + 1e-12


def test_capacity_examples():
    assert capacity_heterodyne(2) == pytest.approx(1.585, abs=5e-4)
    assert capacity_heterodyne(0) == 0
    assert capacity_heterodyne(4.2) == pytest.approx(2.379, abs=5e-4)
    assert capacity_homodyne_squeezed(0) == 0
    assert capacity_homodyne_squeezed(2) == pytest.approx(math.log2(5), abs=1e-12)
    assert capacity_homodyne_squeezed(1e6) == pytest.approx(math.log2(1e6) + 1, abs=1e-5)
    assert capacity_holevo_bound(0) == 0
    assert capacity_holevo_bound(1) == pytest.approx(2.0, abs=1e-12)
    assert capacity_holevo_bound(1e6) == pytest.approx(math.log2(1e6) + math.log2(math.e), abs=1e-5)


@pytest.mark.parametrize("f", [capacity_heterodyne, capacity_homodyne_squeezed, capacity_holevo_bound])
def test_capacity_rejects_negative(f):
    with pytest.raises(ValueError):
        f(-0.1)


@given(st.floats(1e-6, 1e6))
def test_capacity_ordering(n):
    assert capacity_heterodyne(n) < capacity_homodyne_squeezed(n) < capacity_holevo_bound(n)


def test_fock_vector():
    v = coherent_fock_vector(0, 5)
    assert np.array_equal(v, [1, 0, 0, 0, 0, 0])
    v = coherent_fock_vector(1, 100)
    assert np.sum(np.abs(v) ** 2) == pytest.approx(1.0, abs=1e-12)
    v = coherent_fock_vector(2, 10)
    assert abs(v[4]) ** 2 / abs(v[0]) ** 2 == pytest.approx(32 / 3, rel=1e-12)
    # Poisson weights e^{-|a|^2} |a|^{2n} / n!
    a = 1.3 - 0.4j
    v = coherent_fock_vector(a, 30)
    pois = [math.exp(-abs(a) ** 2) * abs(a) ** (2 * n) / math.factorial(n) for n in range(31)]
    assert np.allclose(np.abs(v) ** 2, pois, rtol=1e-12, atol=0)


def test_holevo_single_state_is_zero():
    assert holevo_information(from_amplitudes([1.5 - 0.5j])) == pytest.approx(0, abs=1e-9)


def test_holevo_two_state_closed_form():
    e = from_amplitudes([1, -1])
    s = math.exp(-2)
    assert holevo_information(e) == pytest.approx(h2((1 + s) / 2), abs=1e-10)
    assert holevo_information(e) == pytest.approx(0.9868, abs=1e-4)


@pytest.mark.parametrize("name, chi", [("8psk", 2.449), ("16qam", 2.859), ("star", 2.751)])
def test_holevo_table_values(name, chi):
    e = builtin(name)
    val = holevo_information(e)
    assert val == pytest.approx(chi, abs=5e-4)
    assert abs(holevo_information(e, 200) - val) < 1e-9
    assert val <= capacity_holevo_bound(mean_photon_number(e)) + 1e-6


def test_holevo_truncation_check():
    with pytest.raises(ValueError):
        holevo_information(make_psk(2, 5.0), n_max=10)


def test_density_matrix_trace_and_hermitian():
    rho = density_matrix(builtin("star"))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-8)
    assert np.array_equal(rho, rho.conj().T)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_holevo_bounded_by_prior_entropy_and_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    e = random_ensemble(rng, k_max=8, scale=1.0)
    chi = holevo_information(e, n_max=60)
    assert chi <= shannon_entropy(e.priors) + 1e-6
    theta = rng.uniform(0, 2 * np.pi)
    assert holevo_information(e.rotated(theta), n_max=60) == pytest.approx(chi, abs=1e-9)

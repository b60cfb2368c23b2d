import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardening.geometry import (
    ArrayTopology,
    array_factor,
    make_array,
    make_uca,
    make_ula,
    make_upa,
    pair_correlations,
    steering_correlation,
    steering_vector,
    steering_vectors,
)


def _neighbour_distances(pos):
    return np.linalg.norm(np.diff(pos, axis=0), axis=1)


def test_ula_single_antenna_at_origin():
    arr = make_ula(1, 0.5)
    np.testing.assert_array_equal(arr.positions, [[0.0, 0.0, 0.0]])


def test_ula_two_antennas_symmetric():
    arr = make_ula(2, 0.5, 1.0)
    np.testing.assert_allclose(arr.positions, [[-0.25, 0, 0], [0.25, 0, 0]], atol=1e-15)


def test_ula_spacing():
    arr = make_ula(4, 0.5)
    np.testing.assert_allclose(_neighbour_distances(arr.positions), 0.5, atol=1e-12)
    np.testing.assert_allclose(arr.positions.mean(axis=0), 0.0, atol=1e-15)


@pytest.mark.parametrize("bad", [dict(n=0, spacing=0.5), dict(n=3, spacing=0.0), dict(n=3, spacing=0.5, wavelength=-1)])
def test_ula_rejects_bad_arguments(bad):
    with pytest.raises(ValueError):
        make_ula(**bad)


def test_uca_square_chord():
    r = 1.3
    arr = make_uca(4, math.sqrt(2) * r)
    pos = arr.positions
    np.testing.assert_allclose(np.linalg.norm(pos - np.roll(pos, 1, axis=0), axis=1), math.sqrt(2) * r, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(pos, axis=1), r, atol=1e-12)


def test_uca_equilateral():
    d = make_uca(3, 0.5).pairwise_distances()
    np.testing.assert_allclose(d[~np.eye(3, dtype=bool)], 0.5, atol=1e-12)


def test_uca_radius_n8():
    arr = make_uca(8, 0.5)
    radius = np.linalg.norm(arr.positions, axis=1)
    np.testing.assert_allclose(radius, 0.5 / (2 * math.sin(math.pi / 8)), atol=1e-12)
    assert radius[0] == pytest.approx(0.6533, abs=1e-4)
    np.testing.assert_allclose(arr.positions.mean(axis=0), 0.0, atol=1e-14)


def test_uca_needs_two():
    with pytest.raises(ValueError):
        make_uca(1, 0.5)


@pytest.mark.parametrize("n, shape", [(4, (2, 2)), (6, (2, 3)), (7, (1, 7)), (16, (4, 4)), (12, (3, 4))])
def test_upa_factorisation(n, shape):
    arr = make_upa(n, 0.5)
    xs = np.unique(np.round(arr.positions[:, 0], 12))
    ys = np.unique(np.round(arr.positions[:, 1], 12))
    assert (len(ys), len(xs)) == shape
    d = arr.pairwise_distances()
    np.fill_diagonal(d, np.inf)
    np.testing.assert_allclose(d.min(axis=1), 0.5, atol=1e-12)
    np.testing.assert_allclose(arr.positions.mean(axis=0), 0.0, atol=1e-14)


def test_topology_rejects_duplicates():
    with pytest.raises(ValueError):
        ArrayTopology(np.zeros((2, 3)), 1.0)


def test_steering_single_antenna():
    e = steering_vector(make_ula(1, 0.5), [0.0, 0.6, 0.8])
    np.testing.assert_allclose(e, [1.0], atol=1e-15)


def test_steering_broadside_equal_entries():
    e = steering_vector(make_ula(5, 0.5), [0.0, 0.0, 1.0])
    np.testing.assert_allclose(e, np.full(5, 1 / math.sqrt(5)), atol=1e-15)


def test_steering_endfire_two_elements():
    # positions -0.25, +0.25 with lambda = 1: phases -pi/2, +pi/2
    e = steering_vector(make_ula(2, 0.5, 1.0), [1.0, 0.0, 0.0])
    expected = np.array([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]) / math.sqrt(2)
    np.testing.assert_allclose(e, expected, atol=1e-15)


def test_steering_rejects_non_unit():
    with pytest.raises(ValueError):
        steering_vector(make_ula(3, 0.5), [1.0, 1.0, 0.0])


def test_correlation_self_and_siso():
    arr = make_upa(6, 0.4)
    d = np.array([0.48, 0.6, 0.64])
    assert steering_correlation(arr, d, d) == pytest.approx(1.0, abs=1e-12)
    assert steering_correlation(make_ula(1, 0.5), d, [1.0, 0, 0]) == pytest.approx(1.0, abs=1e-12)


def test_correlation_endfire_antiparallel():
    # <e(x), e(-x)> = (1/2)(e^{j pi/2} e^{j pi/2} + e^{-j pi/2} e^{-j pi/2}) = -1
    arr = make_ula(2, 0.5, 1.0)
    assert steering_correlation(arr, [1.0, 0, 0], [-1.0, 0, 0]) == pytest.approx(1.0, abs=1e-12)


unit_vectors = (
    st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3)
    .filter(lambda v: 0.1 < np.linalg.norm(v))
    .map(lambda v: np.asarray(v) / np.linalg.norm(v))
)
arrays = st.builds(
    make_array,
    st.sampled_from(["ula", "uca", "upa"]),
    st.integers(2, 12),
    st.floats(0.05, 2.0),
    st.floats(0.3, 3.0),
)


@settings(max_examples=60, deadline=None)
@given(arrays, unit_vectors)
def test_steering_unit_norm(arr, d):
    e = steering_vector(arr, d)
    assert np.linalg.norm(e) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(e), 1 / math.sqrt(arr.n), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays, unit_vectors, unit_vectors, st.tuples(*[st.floats(-10, 10)] * 3))
def test_correlation_symmetric_and_translation_invariant(arr, d1, d2, offset):
    g = steering_correlation(arr, d1, d2)
    assert 0.0 <= g <= 1.0 + 1e-12
    assert steering_correlation(arr, d2, d1) == pytest.approx(g, abs=1e-10)
    assert steering_correlation(arr.translated(offset), d1, d2) == pytest.approx(g, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays, unit_vectors, unit_vectors, st.integers(0, 2**32 - 1))
def test_correlation_rotation_invariant(arr, d1, d2, seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((3, 3)))
    rot = q * np.sign(np.diag(r))
    g = steering_correlation(arr, d1, d2)
    assert steering_correlation(arr.rotated(rot), rot @ d1, rot @ d2) == pytest.approx(g, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(unit_vectors, unit_vectors, unit_vectors, unit_vectors)
def test_ula_depends_only_on_axis_projection(d1, d2, d3, d4):
    arr = make_ula(6, 0.5)
    dx = (d1 - d2)[0]
    # Any pair with the same x-difference gives the same correlation.
    other = pair_correlations(arr, np.array([[d3[0] + dx, 0, 0]]), np.array([[d3[0], 0, 0]]))[0]
    assert steering_correlation(arr, d1, d2) == pytest.approx(other, abs=1e-10)


@pytest.mark.parametrize("kind", ["ula", "upa"])
@pytest.mark.parametrize("spacing", [0.01, 0.5, 1.7])
def test_grid_array_factor_matches_element_sum(kind, spacing):
    arr = make_array(kind, 12, spacing, 0.8)
    rng = np.random.default_rng(3)
    delta = rng.uniform(-2, 2, size=(500, 3))
    # include exact grating-lobe points where the kernel is singular
    delta[:3] = [[0, 0, 0], [0.8 / spacing, 0, 0], [0, 2 * 0.8 / spacing, 0]]
    fast = array_factor(arr, delta)
    slow = array_factor(arr.generic(), delta)
    np.testing.assert_allclose(fast, slow.real, atol=1e-9)
    np.testing.assert_allclose(slow.imag, 0.0, atol=1e-9)


def test_pair_correlations_match_scalar():
    arr = make_uca(7, 0.45)
    rng = np.random.default_rng(1)
    v = rng.standard_normal((20, 2, 3))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    batch = pair_correlations(arr, v[:, 0], v[:, 1])
    scalar = [steering_correlation(arr, a, b) for a, b in v]
    np.testing.assert_allclose(batch, scalar, atol=1e-12)


def test_steering_vectors_batch_shape():
    arr = make_upa(6, 0.5)
    d = np.tile([0.0, 0.0, 1.0], (4, 3, 1))
    assert steering_vectors(arr, d).shape == (4, 3, 6)

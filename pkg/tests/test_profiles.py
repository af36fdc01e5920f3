import itertools
import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_monotone
from fhslab.params import make_params
from fhslab.profiles import (
    PROFILE_SCHEMA,
    Grid,
    ProfileError,
    RadialProfile,
    candidate_extremal,
    default_truncation,
    dilate_scale,
    dyadic_grid,
    layer_cake_decompose,
    monotone_projection,
)


def test_grid_nodes():
    g = Grid(1e-3, 1e4, 512)
    x = g.nodes
    assert x[0] == 0 and x[1] == 1e-3 and x[-1] == 1e4 and len(x) == 513
    assert np.allclose(np.diff(np.log(x[1:])), g.log_step, rtol=1e-9)


def test_dyadic_grid_has_powers_of_two():
    x = dyadic_grid().nodes
    for i in range(-5, 12):
        assert np.min(np.abs(x[1:] / 2.0**i - 1)) < 1e-12


def test_candidate_extremal_examples(grid):
    U = candidate_extremal(make_params(3, 2, 0.5, 0), grid)
    assert U.values[0] == 1.0
    assert U.evaluate(np.array([1.0]))[0] == pytest.approx(0.5, abs=1e-12)
    V = candidate_extremal(make_params(3, 2, 0.5, 0.5), grid)
    r = grid.nodes
    assert np.allclose(V.values, (1 + r) ** -2.0, rtol=1e-13)
    assert V.evaluate(np.array([1.0]))[0] == pytest.approx(0.25, abs=1e-12)
    assert U.tail_exponent == 2.0


@given(N=st.integers(1, 4), p=st.floats(1.2, 4), s=st.floats(0.05, 0.95), t=st.floats(0, 0.95))
def test_candidate_strictly_decreasing(N, p, s, t):
    if not N > p * s * 1.01:
        return
    U = candidate_extremal(make_params(N, p, s, t * p * s), Grid(M=128))
    assert U.values[0] == 1.0
    d = np.diff(U.values)
    assert np.all(d <= 0)
    # strict wherever the values are resolvable in double precision
    resolved = (U.values[1:] < 1 - 1e-9) & (U.values[1:] > 1e-300)
    assert np.all(d[resolved] < 0)


def test_dilate_identity(U3):
    v = dilate_scale(U3, 1.0, 1.0)
    assert np.array_equal(v.values, U3.values)


@pytest.mark.parametrize("a,b,c,d", [(2.0, 0.5, 0.3, 3.0), (1.5, 2.0, 2.0, 0.25), (0.7, 1.3, 1.1, 0.9)])
def test_dilate_composition(U3, a, b, c, d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        two = dilate_scale(dilate_scale(U3, a, b), c, d)
        one = dilate_scale(U3, a * c, b * d)
    k = min(len(two.values), len(one.values))
    assert np.allclose(two.values[-k:], one.values[-k:], rtol=1e-4, atol=1e-12)


def test_dilate_refines_grid_for_strong_concentration(U3):
    with pytest.warns(RuntimeWarning, match="refined"):
        v = dilate_scale(U3, 1.0, 1e4)
    assert v.grid.r_min < U3.grid.r_min
    assert v.evaluate(np.array([1e-4]))[0] == pytest.approx(0.5, rel=1e-3)


def test_tail_is_power_law(U3):
    r = np.array([2e4, 1e5])
    assert np.allclose(U3.evaluate(r), U3.tail_value * (r / U3.r_max) ** -2.0, rtol=1e-14)
    assert U3.tail_coefficient == pytest.approx(U3.tail_value * 1e8)


def test_continuity_at_nodes(U3):
    x = U3.nodes[1:-1]
    assert np.allclose(U3.evaluate(x * (1 + 1e-12)), U3.evaluate(x * (1 - 1e-12)), rtol=1e-9)


def test_profile_validation(grid):
    with pytest.raises(ProfileError):
        RadialProfile(grid, -np.ones(grid.M + 1), 1.0, 3)
    with pytest.raises(ProfileError):
        RadialProfile(grid, np.ones(grid.M), 1.0, 3)
    with pytest.raises(ProfileError):
        RadialProfile(grid, np.ones(grid.M + 1), -1.0, 3)
    with pytest.raises(ProfileError):
        RadialProfile(grid, np.linspace(2.0, 1.0, grid.M + 1), 0.0, 3)
    # a flat continuation is only allowed for a profile that is constant everywhere
    assert RadialProfile(grid, np.ones(grid.M + 1), 0.0, 3).tail_value == 1.0


def test_json_round_trip(U3):
    text = U3.to_json()
    d = json.loads(text)
    assert d["schema"] == PROFILE_SCHEMA and d["mode"] == "linear"
    assert {"params", "nodes", "values", "tail_exponent"} <= set(d)
    v = RadialProfile.from_json(text)
    assert v.grid == U3.grid and np.array_equal(v.values, U3.values)
    assert (v.tail_exponent, v.dim, v.mode, v.params) == (U3.tail_exponent, U3.dim, U3.mode, U3.params)


def test_json_schema_mismatch(U3):
    d = json.loads(U3.to_json())
    d["schema"] = "fhs-profile/99"
    with pytest.raises(ProfileError):
        RadialProfile.from_json(json.dumps(d))


# -- layer cake -----------------------------------------------------------------------------

def test_layer_cake_telescoping(U3):
    dec = layer_cake_decompose(U3)
    K = dec.truncation_index
    # capped at the grid extent: u(2^K) < 1e-10 u(0) is out of reach for r_max = 1e4
    assert K == int(math.log2(U3.r_max))
    err = np.max(np.abs(U3.values - dec.partial_sum()))
    assert err <= dec.remainder * (1 + 1e-12) + 1e-15


def test_layer_properties(U3):
    dec = layer_cake_decompose(U3, K=10)
    r = U3.nodes
    for i, (lay, h) in enumerate(zip(dec.layers, dec.base_heights)):
        assert np.all(lay.values[r >= 2.0**i] == 0)
        assert np.max(lay.values) <= h
        if i >= 1:
            lower = U3.evaluate(np.array([2.0**i]))[0]
            assert np.max(lay.values) <= h - lower + 1e-15
    sup = np.array([np.max(lay.values) for lay in dec.layers[1:]])
    i = np.arange(1, 11)
    assert np.all(sup <= 4.0 * 2.0 ** (-2 * (i - 1)))


def test_layer_cake_zero_profile(grid):
    z = RadialProfile(grid, np.zeros(grid.M + 1), 2.0, 3)
    dec = layer_cake_decompose(z, K=5)
    assert all(np.all(lay.values == 0) for lay in dec.layers)


def test_layer_cake_rejects_non_monotone(grid):
    v = np.ones(grid.M + 1)
    v[10] = 2.0
    with pytest.raises(ProfileError):
        layer_cake_decompose(RadialProfile(grid, v, 2.0, 3))


def test_default_truncation(U3):
    # smallest i with u(2^i) < rel * u(0), capped at the grid extent
    K = default_truncation(U3, rel=1e-6)
    assert U3.evaluate(np.array([2.0**K]))[0] < 1e-6
    assert U3.evaluate(np.array([2.0 ** (K - 1)]))[0] >= 1e-6
    assert default_truncation(U3) == int(math.log2(U3.r_max))


@given(seed=st.integers(0, 10**6))
def test_layer_partial_sums_random(seed):
    g = Grid(M=96)
    u = random_monotone(np.random.default_rng(seed), g, 2, 1.5)
    dec = layer_cake_decompose(u, K=8)
    assert np.max(np.abs(u.values - dec.partial_sum())) <= dec.remainder + 1e-14


# -- monotone projection --------------------------------------------------------------------

def _brute_projection(v, w):
    n = len(v)
    best, best_x = math.inf, None
    for cuts in itertools.product([0, 1], repeat=n - 1):
        blocks, start = [], 0
        for i, c in enumerate(cuts, 1):
            if c:
                blocks.append((start, i))
                start = i
        blocks.append((start, n))
        means = [np.dot(w[a:b], v[a:b]) / np.sum(w[a:b]) for a, b in blocks]
        if any(m2 > m1 + 1e-15 for m1, m2 in zip(means, means[1:])):
            continue
        x = np.concatenate([np.full(b - a, m) for (a, b), m in zip(blocks, means)])
        d = np.dot(w, (x - v) ** 2)
        if d < best:
            best, best_x = d, x
    return best_x


def test_projection_examples():
    assert np.allclose(monotone_projection([1.0, 3.0], [1.0, 1.0]), [2.0, 2.0])
    v = np.array([5.0, 4.0, 4.0, 1.0])
    assert np.array_equal(monotone_projection(v, np.ones(4)), v)


@given(v=st.lists(st.floats(-10, 10), min_size=1, max_size=6), seed=st.integers(0, 1000))
def test_projection_matches_brute_force(v, seed):
    v = np.array(v)
    w = np.random.default_rng(seed).uniform(0.1, 3.0, v.size)
    x = monotone_projection(v, w)
    assert np.all(np.diff(x) <= 1e-12)
    assert np.allclose(x, _brute_projection(v, w), atol=1e-9)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 60))
def test_projection_idempotent_and_nonexpansive(seed, n):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=n), rng.normal(size=n)
    w = rng.uniform(0.1, 5, n)
    pa, pb = monotone_projection(a, w), monotone_projection(b, w)
    assert np.allclose(monotone_projection(pa, w), pa, atol=1e-12)
    norm = lambda z: math.sqrt(np.dot(w, z * z))
    assert norm(pa - pb) <= norm(a - b) * (1 + 1e-12) + 1e-12

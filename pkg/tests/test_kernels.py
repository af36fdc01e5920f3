import math
import time

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import k1_oracle, k3_oracle
from fhslab.kernels import (
    KernelError,
    KernelTable,
    angular_kernel,
    angular_kernel_adaptive,
    build_kernel_table,
    kernel_matrix,
)
from fhslab.profiles import Grid


def k_mpmath(N, beta, r, rho):
    nu = (N + beta) / 2
    area = 2 * mpmath.pi ** ((N - 1) / 2) / mpmath.gamma((N - 1) / 2)
    f = lambda th: (r * r + rho * rho - 2 * r * rho * mpmath.cos(th)) ** (-nu) * mpmath.sin(th) ** (N - 2)
    a = abs(r - rho) / max(r, rho)
    pts = [0] + [min(a * 4**k, 1.0) for k in range(0, 12) if a * 4**k < 1.0] + [mpmath.pi]
    return float(area * mpmath.quad(f, pts))


pairs = st.tuples(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3)).filter(lambda t: abs(t[0] - t[1]) > 1e-3 * max(t))


@given(rr=pairs, beta=st.floats(0.05, 1.95))
def test_n1_closed_form(rr, beta):
    r, rho = rr
    assert angular_kernel(1, beta, r, rho) == pytest.approx(k1_oracle(beta, r, rho), rel=1e-12)


@given(rr=pairs, beta=st.floats(0.05, 1.95))
def test_n3_closed_form_vs_adaptive(rr, beta):
    r, rho = rr
    ref = angular_kernel_adaptive(3, beta, r, rho)
    assert k3_oracle(beta, r, rho) == pytest.approx(ref, rel=1e-10)
    assert angular_kernel(3, beta, r, rho) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("sep", [1e-4, 1e-5, 1e-6])
def test_n3_near_diagonal(sep):
    r, rho, beta = 1.0, 1.0 + sep, 0.8
    assert angular_kernel(3, beta, r, rho) == pytest.approx(angular_kernel_adaptive(3, beta, r, rho), rel=1e-6)


@pytest.mark.parametrize("N", [2, 4])
@pytest.mark.parametrize("r,rho", [(1.0, 2.0), (1.0, 1.01), (3.0, 0.01), (1.0, 1.0 + 1e-5), (50.0, 7.0)])
@pytest.mark.parametrize("beta", [0.3, 1.0, 1.7])
def test_even_dimensions(N, r, rho, beta):
    ref = k_mpmath(N, beta, r, rho)
    tol = 1e-9 if abs(r - rho) > 1e-3 * max(r, rho) else 1e-6
    assert angular_kernel(N, beta, r, rho) == pytest.approx(ref, rel=tol)
    assert angular_kernel_adaptive(N, beta, r, rho) == pytest.approx(ref, rel=tol)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_symmetry_exact(N):
    assert angular_kernel(N, 0.7, 2.0, 5.0) == angular_kernel(N, 0.7, 5.0, 2.0)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_homogeneity(N):
    beta, t = 0.9, 3.7
    r, rho = np.array([0.3, 2.0]), np.array([1.1, 0.05])
    lhs = angular_kernel(N, beta, t * r, t * rho)
    assert np.allclose(lhs, t ** (-N - beta) * angular_kernel(N, beta, r, rho), rtol=1e-11)


def test_diagonal_rejected():
    with pytest.raises(KernelError):
        angular_kernel(3, 0.5, 1.0, 1.0)
    with pytest.raises(KernelError):
        angular_kernel(3, 2.0, 1.0, 2.0)


@pytest.mark.parametrize("N", [1, 3])
def test_table_speed_and_accuracy(N):
    radii = Grid(M=512).nodes[1:]
    build_kernel_table(N, radii[:8], 1.0)
    t0 = time.perf_counter()
    table = build_kernel_table(N, radii, 1.0)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    i, j = np.triu_indices(512, 1)
    oracle = k1_oracle if N == 1 else k3_oracle
    ref = np.array([oracle(1.0, radii[a], radii[b]) for a, b in zip(i[::97], j[::97])])
    assert np.max(np.abs(table.entries[i[::97], j[::97]] / ref - 1)) < 1e-10
    assert np.array_equal(table.entries, table.entries.T)
    assert np.all(table.entries > 0)


def test_table_matches_pointwise_calls():
    radii = np.array([0.1, 0.5, 2.0, 7.0])
    table = build_kernel_table(2, radii, 0.6)
    for a in range(4):
        for b in range(4):
            if a != b:
                assert table.entries[a, b] == pytest.approx(angular_kernel(2, 0.6, radii[a], radii[b]), rel=1e-14)


def test_tables_independent():
    radii = np.array([0.5, 1.0, 2.0])
    t1 = build_kernel_table(3, radii, 0.5)
    t2 = build_kernel_table(3, radii, 1.5)
    before = t1.entries.copy()
    assert not np.shares_memory(t1.entries, t2.entries)
    with pytest.raises(ValueError):
        t2.entries[0, 1] = 0.0
    assert np.array_equal(t1.entries, before)


def test_save_load_round_trip(tmp_path):
    table = build_kernel_table(3, Grid(M=64).nodes[1:], 1.0)
    path = tmp_path / "k.bin"
    table.save(path)
    raw = path.read_bytes()
    assert len(raw) == 16 + 8 * (64 + 64 * 64)
    back = KernelTable.load(path, N=3, beta=1.0, M=64)
    assert back.digest() == table.digest()
    assert np.array_equal(back.entries, table.entries)
    with pytest.raises(KernelError, match="dimension"):
        KernelTable.load(path, N=1)
    path.write_bytes(raw[:-8])
    with pytest.raises(KernelError):
        KernelTable.load(path)


def test_memory_budget():
    with pytest.raises(KernelError, match="use M <="):
        build_kernel_table(1, np.geomspace(1e-3, 1e3, 20000), 1.0)


def test_kernel_matrix_diagonal_model():
    x = np.array([0.5, 1.0])
    m = kernel_matrix(3, 0.5, x, x)
    assert np.all(np.isfinite(m)) and m[0, 1] == pytest.approx(angular_kernel(3, 0.5, 0.5, 1.0))

import numpy as np
import pytest
from scipy import integrate

from fhslab.kernels import angular_kernel
from fhslab.profiles import Grid, RadialProfile, candidate_extremal
from fhslab.params import make_params
from fhslab.quadrature import (
    adjacent_rule,
    gauss_jacobi01,
    interp_matrix,
    near_diagonal_weights,
    unified_cells,
)


def cell_energy(cell, beta, gamma, slope=1.0, N=1):
    r, rho, w = near_diagonal_weights(cell, beta, gamma, N)
    return 2.0 * np.sum(w * np.abs(slope * (r - rho)) ** gamma)


def test_gauss_jacobi_moments():
    t, w = gauss_jacobi01(10, -0.6)
    for k in range(6):
        assert np.sum(w * t**k) == pytest.approx(1.0 / (k + 0.4), rel=1e-12)


def test_zero_slope():
    assert cell_energy((1.0, 1.5), 0.6, 2.0, slope=0.0) == 0.0


@pytest.mark.parametrize("s,gamma", [(0.3, 2.0), (0.5, 1.5), (0.8, 3.0), (0.4, 0.8)])
@pytest.mark.parametrize("x1,tol", [(1.03, 1e-7), (1.4, 2e-6)])
def test_n1_unit_slope_analytic(s, gamma, x1, tol):
    # the |t|^{gamma-1-gamma s} part is integrated exactly; the (d/(r+rho))^{1+beta}
    # correction of the kernel is not polynomial in d and limits coarse cells
    beta = gamma * s
    x0 = 1.0
    L = x1 - x0
    a = gamma - 1 - beta
    sing = 2 * L ** (a + 2) / ((a + 1) * (a + 2))  # int int |r - rho|^a over the square
    # (r + rho)^{-1-beta} part: with d = r - rho > 0 the inner rho-integral is elementary
    inner = lambda d: ((2 * x0 + d) ** -beta - (2 * x1 - d) ** -beta) / (2 * beta)
    smooth = 2 * integrate.quad(inner, 0, L, weight="alg", wvar=(gamma, 0), epsabs=0, epsrel=1e-13)[0]
    assert cell_energy((x0, x1), beta, gamma) == pytest.approx(sing + smooth, rel=tol)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_refinement_additivity(N):
    beta, gamma = 0.8, 2.0
    x0, x1 = 0.7, 0.9
    xm = 0.5 * (x0 + x1)
    parent = cell_energy((x0, x1), beta, gamma, N=N)
    r, rho, w = adjacent_rule(N, beta, gamma, x0, xm, x1)
    cross = 2.0 * np.sum(w * np.abs(r - rho) ** gamma)
    children = cell_energy((x0, xm), beta, gamma, N=N) + cell_energy((xm, x1), beta, gamma, N=N) + cross
    assert children == pytest.approx(parent, rel=1e-8)


def test_near_diagonal_rejects_nonintegrable():
    with pytest.raises(ValueError):
        near_diagonal_weights((1.0, 2.0), 1.0, 0.9)


def test_adjacent_rule_vs_dblquad():
    N, beta, gamma = 3, 0.6, 2.0
    xa, xb, xc = 1.0, 1.2, 1.5
    r, rho, w = adjacent_rule(N, beta, gamma, xa, xb, xc)
    got = np.sum(w * np.abs(r - rho) ** gamma)
    ref = integrate.dblquad(lambda y, x: abs(x - y) ** gamma * angular_kernel(3, beta, x, y) * (x * y) ** 2,
                            xb, xc, xa, xb, epsabs=0, epsrel=1e-10)[0]
    assert got == pytest.approx(ref, rel=1e-7)


def test_interp_matrix_reproduces_evaluate():
    P = make_params(3, 2, 0.5, 0)
    U = candidate_extremal(P, Grid(M=128))
    x = np.concatenate([np.geomspace(1e-5, 1e6, 300), [0.0]])
    A = interp_matrix(U.grid, x, U.tail_exponent)
    assert np.allclose(A @ U.values, U.evaluate(x), rtol=1e-13, atol=0)


def test_unified_cells_cover_grid():
    g = Grid(M=128)
    c = unified_cells(g)
    e = c.edges
    assert e[0] == 0 and np.all(np.diff(e) > 0)
    assert np.isclose(e[c.n_core], g.r_max)
    assert set(g.nodes).issubset(set(e))
    assert e[-1] == pytest.approx(g.r_max * 2.0**20)


def test_constant_mode_matches_jump_formula():
    # N=1 piecewise-constant indicator: closed form 2^{3-ps}/(ps(1-ps)) at ps = 0.5
    from fhslab.functionals import seminorm_power
    from fhslab.profiles import indicator

    u = indicator(Grid(M=512), 1, 1.0, 1.0)
    assert seminorm_power(u, 0.25, 2.0) == pytest.approx(2 ** 2.5 / 0.25, rel=1e-2)

"""Quadrature for radial double integrals against |x - y|^{-(N+beta)}.

Every double integral is reduced to

    |S^{N-1}| int int F(u(r), u(rho)) V(r, rho) |r - rho|^{-1-beta} dr drho

over [0, inf)^2 and split into

* a dense block: Gauss-Legendre points of cells that are more than
  ``band`` cells apart (smooth integrand);
* near pairs (same cell, adjacent cells, small gaps): the integrand is
  written as (F / d^order) * V * d^(order - 1 - beta) with d = |r - rho|, where
  ``order`` is how fast F vanishes on the diagonal (gamma for |a-b|^gamma with
  piecewise-linear u, 0 for piecewise-constant u).  Same-cell triangles use
  Gauss-Jacobi in d; adjacent cells use a Duffy split at the shared corner;
* a far strip rho <= r_M < R_far < r where K(r, rho) = |S| r^{-(N+beta)} to
  O((r_M/R_far)^2) and the power-law tail is integrated by Gauss-Jacobi in
  y = (R_far/r)^kappa;
* the tail-tail block (r, rho >= r_M) which, for F homogeneous of degree m,
  collapses by homogeneity to the 1-D integral

      r_M^{N-beta} u_M^m / (kappa m + beta - N)
          * int_1^inf [F(1, t^-kappa) + F(t^-kappa, 1)] V(1, t) (t-1)^{-1-beta} dt,

  finite iff kappa m + beta > N (the divergence criterion for the tail).

All weights include the |S^{N-1}| factor and both orderings of a pair are
accounted for: pair sums are  sum_k w_k [F(a_k, b_k) + F(b_k, a_k)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, sparse, special

from .kernels import kernel_matrix, kernel_regular_part
from .params import sphere_area
from .profiles import Grid

N_REG = 4  # Gauss-Legendre points per cell in the dense block
N_NEAR = 8  # per direction in near-pair rules
N_JAC = 10  # Gauss-Jacobi points for singular directions
BAND = 3  # cells closer than this (in index) are near pairs
FAR_OCTAVES = 20  # R_far = r_M * 2^FAR_OCTAVES
N_FAR = 16


@lru_cache(maxsize=None)
def gauss_legendre01(n: int):
    x, w = special.roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi01(n: int, expo: float):
    """Nodes/weights for int_0^1 f(t) t^expo dt."""
    if not expo > -1:
        raise ValueError(f"Gauss-Jacobi exponent must exceed -1, got {expo}")
    x, w = special.roots_jacobi(n, 0.0, expo)
    return 0.5 * (x + 1.0), w * 2.0 ** (-(expo + 1.0))


# -- cells -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cells:
    """Cells covering [0, R_far]: graded subcells of [0, r_1], grid cells, graded tail cells."""

    grid: Grid
    edges: np.ndarray
    n_core: int  # cells with index < n_core lie in [0, r_M]
    first_grid_cell: int  # index of [r_1, r_2]

    @property
    def n(self) -> int:
        return len(self.edges) - 1

    @property
    def R_far(self) -> float:
        return float(self.edges[-1])

    @property
    def lo(self):
        return self.edges[:-1]

    @property
    def hi(self):
        return self.edges[1:]

    def locate(self, x) -> np.ndarray:
        """Index of the cell containing x (right-closed at the last cell)."""
        k = np.searchsorted(self.edges, x, side="right") - 1
        return np.clip(k, 0, self.n - 1)


@lru_cache(maxsize=32)
def unified_cells(grid: Grid, inner_decades: float = 4.0, far_octaves: int = FAR_OCTAVES,
                  growth: float = 1.15) -> Cells:
    h0 = grid.log_step
    cap = max(h0, 0.5 * math.log(2.0))
    inner = []
    dist, h = 0.0, h0
    target = inner_decades * math.log(10.0)
    while dist < target:
        h = min(h * growth, cap)
        dist += h
        inner.append(grid.r_min * math.exp(-dist))
    inner = [0.0] + inner[::-1]
    tail = []
    dist, h = 0.0, h0
    target = far_octaves * math.log(2.0)
    while dist < target - 1e-12:
        h = min(h * growth, cap, target - dist)
        dist += h
        tail.append(grid.r_max * math.exp(dist))
    tail[-1] = grid.r_max * 2.0**far_octaves
    edges = np.concatenate([inner, grid.nodes[1:], tail])
    n_core = len(inner) + grid.M - 1
    edges.setflags(write=False)
    return Cells(grid, edges, n_core, len(inner))


def interp_matrix(grid: Grid, x, kappa: float, mode: str = "linear") -> sparse.csr_matrix:
    """Sparse map from node values to u(x) (linear/constant inside, power-law tail)."""
    x = np.asarray(x, dtype=float)
    r = grid.nodes
    M = grid.M
    n = len(x)
    inside = x < r[-1]
    rows, cols, vals = [], [], []
    idx = np.nonzero(inside)[0]
    xi = x[idx]
    k = np.clip(np.searchsorted(r, xi, side="right") - 1, 0, M - 1)
    if mode == "linear":
        t = (xi - r[k]) / (r[k + 1] - r[k])
        rows += [idx, idx]
        cols += [k, k + 1]
        vals += [1.0 - t, t]
    else:
        rows.append(idx)
        cols.append(k)
        vals.append(np.ones_like(xi))
    idx = np.nonzero(~inside)[0]
    rows.append(idx)
    cols.append(np.full(idx.size, M))
    vals.append((x[idx] / r[-1]) ** (-kappa))
    mat = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                            shape=(n, M + 1))
    return mat


# -- elementary rules -----------------------------------------------------------

def same_cell_rule(N, beta, order, x0, x1, n_jac=N_JAC, n_leg=N_NEAR):
    """Triangle rho < r inside [x0, x1]; returns (r, rho, w) with w absorbing 1/d^order."""
    h = x1 - x0
    e = order - 1.0 - beta
    td, wd = gauss_jacobi01(n_jac, e)
    tv, wv = gauss_legendre01(n_leg)
    d = h * td[:, None]
    rho = x0 + (h - d) * tv[None, :]
    r = rho + d
    w = (h ** (e + 1.0) * wd[:, None]) * ((h - d) * wv[None, :])
    V = kernel_regular_part(N, beta, r, rho)
    w = w * V / d**order
    return r.ravel(), rho.ravel(), w.ravel()


def adjacent_rule(N, beta, order, xa, xb, xc, n_jac=N_JAC, n_leg=N_NEAR):
    """rho in [xa, xb], r in [xb, xc]; Duffy split at the shared corner xb."""
    A = xb - xa
    B = xc - xb
    e = order - 1.0 - beta
    tt, wt = gauss_jacobi01(n_jac, e + 1.0)
    tv, wv = gauss_legendre01(n_leg)
    out_r, out_rho, out_w = [], [], []
    t = tt[:, None]
    v = tv[None, :]
    base = wt[:, None] * wv[None, :] * A * B
    # triangle 1: sigma1 = A t, sigma2 = B t v ; triangle 2: sigma2 = B t, sigma1 = A t v
    for s1, s2, lin in ((A * t, B * t * v, A + B * v), (A * t * v, B * t, A * v + B)):
        rho = xb - s1
        r = xb + s2
        d = r - rho
        w = base * lin**e * kernel_regular_part(N, beta, r, rho) / d**order
        r, rho, w = np.broadcast_arrays(r, rho, w)
        out_r.append(r.ravel())
        out_rho.append(rho.ravel())
        out_w.append(w.ravel())
    return np.concatenate(out_r), np.concatenate(out_rho), np.concatenate(out_w)


def tensor_rule(N, beta, ra, rb, pa, pb, n_leg=N_NEAR):
    """Plain tensor Gauss rule for rho in [pa, pb], r in [ra, rb] (disjoint cells)."""
    t, w = gauss_legendre01(n_leg)
    r = (ra + (rb - ra) * t)[:, None]
    rho = (pa + (pb - pa) * t)[None, :]
    ww = ((rb - ra) * w)[:, None] * ((pb - pa) * w)[None, :]
    d = np.abs(r - rho)
    val = ww * kernel_regular_part(N, beta, r, rho) * d ** (-1.0 - beta)
    r, rho = np.broadcast_arrays(r, rho)
    return r.ravel(), rho.ravel(), val.ravel()


def near_diagonal_weights(cell, beta: float, gamma: float, N: int = 1, *, n_jac=N_JAC, n_leg=N_NEAR):
    """Frozen-slope rule for one diagonal cell.

    Returns points (r, rho) and weights w such that, for u linear on the cell,
    ``2 * sum(w * |u(r) - u(rho)|**gamma)`` equals
    int int_{cell^2} |u(r) - u(rho)|^gamma K(r, rho) (r rho)^{N-1} dr drho.
    Exact when V is constant on the cell (always the leading behaviour).
    """
    if not gamma > beta:
        raise ValueError("need gamma*(1-s) > 0, i.e. gamma > beta")
    x0, x1 = cell
    return same_cell_rule(N, beta, gamma, float(x0), float(x1), n_jac, n_leg)


# -- pair rules ----------------------------------------------------------------

@dataclass(eq=False)
class PairRule:
    """Discretization of the full-quadrant double integral for fixed (grid, N, beta, order, kappa, mode)."""

    grid: Grid
    cells: Cells
    N: int
    beta: float
    order: float
    kappa: float
    mode: str
    x_reg: np.ndarray
    w_reg: np.ndarray
    cell_reg: np.ndarray
    P_reg: sparse.csr_matrix
    W: np.ndarray  # dense symmetric pair weights over regular points (both orderings)
    P_a: sparse.csr_matrix
    P_b: sparse.csr_matrix
    w_pair: np.ndarray  # sum w [F(a,b) + F(b,a)]
    a_pts: np.ndarray  # radii of the sparse pairs (inf for virtual far points)
    b_pts: np.ndarray
    _tail_cache: dict = field(default_factory=dict)
    _stiffness: object = None

    @property
    def sphere(self) -> float:
        return sphere_area(self.N)

    def point_values(self, node_values):
        u = np.asarray(node_values, dtype=float)
        return self.P_reg @ u, self.P_a @ u, self.P_b @ u

    def pair_sum(self, F, vals, radius: float | None = None) -> float:
        """sum over the quadrant of F(u(r), u(rho)) * kernel, excluding the tail-tail block.

        With ``radius`` only pairs with both radii <= radius are kept (radius must be a cell edge).
        """
        U, A, B = vals
        W, wp = self.W, self.w_pair
        if radius is not None:
            inside = self.x_reg <= radius
            W = W[np.ix_(inside, inside)]
            U = U[inside]
            keep = (self.a_pts <= radius) & (self.b_pts <= radius)
            wp, A, B = wp[keep], A[keep], B[keep]
        D = F(U[:, None], U[None, :])
        dense = math.fsum(np.sum(W * D, axis=1))
        sp = math.fsum(wp * (F(A, B) + F(B, A)))
        return dense + sp

    # tail-tail block ------------------------------------------------------
    def tail_integral(self, F, degree: float, order: float, key=None) -> float:
        """C(F) with tail-tail block = C(F) * u_M^degree (inf if divergent, 0 if F vanishes).

        F must be homogeneous of the given degree and vanish like |a - b|^order.
        """
        ck = (key, degree, order) if key is not None else None
        if ck is not None and ck in self._tail_cache:
            return self._tail_cache[ck]
        val = tail_tail_constant(self.N, self.beta, self.kappa, order, self.grid.r_max, F, degree)
        if ck is not None:
            self._tail_cache[ck] = val
        return val


def tail_tail_constant(N, beta, kappa, order, r_M, F, degree) -> float:
    kap = kappa

    def G(t):
        z = t ** (-kap)
        return F(np.ones_like(z), z) + F(z, np.ones_like(z))

    # decide vanishing quickly
    probe = np.array([1.5, 3.0, 10.0])
    if np.all(G(probe) == 0):
        return 0.0
    rate = kap * degree + beta - N
    if rate <= 0:
        return math.inf
    e = order - 1.0 - beta
    # near t = 1: G ~ (t-1)^order ; integrate G V (t-1)^{-order} against weight (t-1)^e
    def smooth(t):
        # the 'alg' rule samples t = 1 itself, where the ratio is 0/0
        t = np.maximum(np.asarray(t, float), 1.0 + 1e-9)
        return G(t) * kernel_regular_part(N, beta, np.ones_like(t), t) / (t - 1.0) ** order

    if e > -1:
        i1, _ = integrate.quad(lambda t: smooth(t), 1.0, 2.0, weight="alg", wvar=(e, 0.0),
                               epsabs=0, epsrel=1e-12, limit=400)
    else:
        raise ValueError("tail integral needs order > beta")
    i2, _ = integrate.quad(lambda t: G(np.array([t]))[0] * kernel_regular_part(N, beta, 1.0, t) * (t - 1.0) ** (-1.0 - beta),
                           2.0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    return sphere_area(N) * r_M ** (N - beta) * (i1 + i2) / rate


@lru_cache(maxsize=24)
def pair_rule(grid: Grid, N: int, beta: float, order: float, kappa: float, mode: str = "linear",
              band: int = BAND, n_reg: int = N_REG) -> PairRule:
    cells = unified_cells(grid)
    S = sphere_area(N)
    lo, hi = cells.lo, cells.hi
    nc = cells.n
    tg, tw = gauss_legendre01(n_reg)
    x_reg = (lo[:, None] + (hi - lo)[:, None] * tg[None, :]).ravel()
    w_reg = ((hi - lo)[:, None] * tw[None, :]).ravel()
    cell_reg = np.repeat(np.arange(nc), n_reg)
    P_reg = interp_matrix(grid, x_reg, kappa, mode)

    # dense block
    K = kernel_matrix(N, beta, x_reg, x_reg)
    W = S * (w_reg * x_reg ** (N - 1))[:, None] * K * (w_reg * x_reg ** (N - 1))[None, :]
    ci = cell_reg[:, None]
    cj = cell_reg[None, :]
    mask = np.abs(ci - cj) <= band
    tail_i = cell_reg >= cells.n_core
    mask |= tail_i[:, None] & tail_i[None, :]
    W[mask] = 0.0
    del K, mask

    # near pairs (one ordering each)
    ra, rb, ww = [], [], []
    for a in range(nc):
        for b in range(max(0, a - band), a + 1):
            if a >= cells.n_core and b >= cells.n_core:
                continue
            if a == b:
                if mode == "constant":
                    continue
                r, rho, w = same_cell_rule(N, beta, order, lo[a], hi[a])
            elif a == b + 1:
                r, rho, w = adjacent_rule(N, beta, order, lo[b], hi[b], hi[a])
            else:
                r, rho, w = tensor_rule(N, beta, lo[a], hi[a], lo[b], hi[b])
            ra.append(r)
            rb.append(rho)
            ww.append(S * w)
    # far strip: core regular points against r > R_far
    R = cells.R_far
    yi, yw = gauss_jacobi01(N_FAR, beta / kappa - 1.0)
    core = cell_reg < cells.n_core
    xc = x_reg[core]
    wc = w_reg[core] * xc ** (N - 1)
    far_w = (S * S * R ** (-beta) / kappa) * wc[:, None] * yw[None, :]
    ra_far = np.repeat(xc, N_FAR)
    w_far = far_w.ravel()
    yfac = (R / grid.r_max) ** (-kappa) * np.tile(yi, xc.size)

    A_pts = np.concatenate(ra + [ra_far])
    B_pts = np.concatenate(rb)
    w_pair = np.concatenate(ww + [w_far])
    P_a = interp_matrix(grid, A_pts, kappa, mode)
    P_b_near = interp_matrix(grid, B_pts, kappa, mode)
    P_b_far = sparse.csr_matrix((yfac, (np.arange(yfac.size), np.full(yfac.size, grid.M))),
                                shape=(yfac.size, grid.M + 1))
    P_b = sparse.vstack([P_b_near, P_b_far]).tocsr()
    b_far = np.full(yfac.size, np.inf)
    return PairRule(grid, cells, N, float(beta), float(order), float(kappa), mode, x_reg, w_reg, cell_reg,
                    P_reg, W, P_a, P_b, w_pair, A_pts, np.concatenate([B_pts, b_far]))


# -- 1-D rules -------------------------------------------------------------------

@lru_cache(maxsize=32)
def radial_rule(grid: Grid, weight_exp: float, n: int = N_REG):
    """Points/weights for int_0^{r_M} f(r) r^weight_exp dr (Gauss-Jacobi on the innermost cell)."""
    cells = unified_cells(grid)
    lo = cells.lo[: cells.n_core]
    hi = cells.hi[: cells.n_core]
    t, w = gauss_legendre01(n)
    x = lo[1:, None] + (hi - lo)[1:, None] * t[None, :]
    ww = (hi - lo)[1:, None] * w[None, :] * x**weight_exp
    tj, wj = gauss_jacobi01(n + 4, weight_exp)
    h = hi[0]
    x = np.concatenate([h * tj, x.ravel()])
    ww = np.concatenate([h ** (weight_exp + 1.0) * wj, ww.ravel()])
    return x, ww


def graded_interval(dist: float, length: float, n: int = N_NEAR):
    """Nodes tau in [0, length] and weights, graded toward tau = -dist (dist > 0)."""
    cuts = [0.0]
    c = dist
    while cuts[-1] + c < length:
        cuts.append(cuts[-1] + c)
        c *= 2.0
    cuts.append(length)
    t, w = gauss_legendre01(n)
    a = np.asarray(cuts[:-1])[:, None]
    b = np.asarray(cuts[1:])[:, None]
    return (a + (b - a) * t).ravel(), ((b - a) * w).ravel()


@dataclass(eq=False)
class PointwiseRule:
    """Rules for int_0^inf F(u(x_i), u(rho)) K(x_i, rho) rho^{N-1} drho at targets x_i.

    Sum = dense @ F(u(x), u(x_reg)) + sparse rows (target, rho, w)
          + sum_far w_far F(u(x), u_R y) + kink_weight * (window term).
    """

    targets: np.ndarray
    dense: np.ndarray  # (n_targets, n_reg)
    x_reg: np.ndarray
    row: np.ndarray
    rho: np.ndarray
    w: np.ndarray
    far_y: np.ndarray
    far_w: np.ndarray
    kink_weight: np.ndarray  # nan where no frozen-slope window at a kink
    kink_left: np.ndarray  # rho just left/right of a kink node (slopes read from the cells)
    kink_right: np.ndarray
    infinite: np.ndarray  # bool: jump of a piecewise-constant profile at the target


def pointwise_rule(grid: Grid, N: int, beta: float, kappa: float, x, order: float, *,
                   pv: bool = False, region: str = "all", mode: str = "linear",
                   band: int = BAND) -> PointwiseRule:
    """Build per-target 1-D rules.

    ``order``: vanishing order of rho -> F(u(x), u(rho)) at rho = x on either side
    (gamma for |a-b|^gamma).  With ``pv`` the integrand is odd to leading order
    (Phi(a-b)) and the cell around x uses a symmetric window with t^(pv_order - 1 - beta)
    where pv_order = order + 1 (frozen-slope cancellation).
    """
    cells = unified_cells(grid)
    S = sphere_area(N)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0) or np.any(x > grid.r_max * 2.0**10):
        raise ValueError("pointwise targets must lie in [0, 2^10 r_max]")
    if mode == "constant" and (pv or np.any(x >= grid.r_max)):
        raise ValueError("piecewise-constant profiles support energy densities inside r_max only")
    lo, hi = cells.lo, cells.hi
    nodes = grid.nodes
    nt = x.size
    tg, tw = gauss_legendre01(N_REG)
    x_reg = (lo[:, None] + (hi - lo)[:, None] * tg[None, :]).ravel()
    w_reg = ((hi - lo)[:, None] * tw[None, :]).ravel()
    cell_reg = np.repeat(np.arange(cells.n), N_REG)
    keep = np.ones(cells.n, bool)
    if region == "interior":
        keep[cells.n_core:] = False
    elif region == "exterior":
        keep[: cells.n_core] = False
    elif region != "all":
        raise ValueError(f"unknown region {region!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = x > 0
        dense = np.zeros((nt, x_reg.size))
        if np.any(pos):
            dense[pos] = kernel_matrix(N, beta, x[pos], x_reg) * (w_reg * x_reg ** (N - 1))[None, :]
        dense[~pos] = S * w_reg * x_reg ** (-1.0 - beta)
    own = cells.locate(x)
    at_edge = (x == lo[own]) & (own > 0)
    is_node = np.isin(x, nodes)
    c_lo = np.where(at_edge, own - 1 - band, own - band)
    c_hi = own + band
    near_mask = (cell_reg[None, :] >= c_lo[:, None]) & (cell_reg[None, :] <= c_hi[:, None])
    dense[near_mask] = 0.0
    dense[:, ~keep[cell_reg]] = 0.0

    rows, rhos, ws = [], [], []
    kink_w = np.full(nt, np.nan)
    kl = np.zeros(nt)
    kr = np.zeros(nt)
    infinite = np.zeros(nt, bool)
    e = order - 1.0 - beta

    def add(i, rho, w):
        rows.append(np.full(rho.size, i))
        rhos.append(rho)
        ws.append(w)

    def vfac(xi, rho):
        if xi == 0:
            return S * np.ones_like(rho)
        return kernel_regular_part(N, beta, xi, rho) / xi ** (N - 1)

    def singular_side(i, xi, a, b):
        # interval [a, b] with x at one endpoint; integrand ~ d^(order-1-beta)
        L = b - a
        if L <= 0:
            return
        td, wd = gauss_jacobi01(N_JAC, e)
        d = L * td
        rho = xi + d if a == xi else xi - d
        add(i, rho, L ** (e + 1.0) * wd * vfac(xi, rho) / d**order)

    def regular_side(i, xi, a, b):
        # interval [a, b] not containing x
        if b <= a:
            return
        if a >= xi:
            tau, w = graded_interval(a - xi, b - a)
            rho = a + tau
        else:
            tau, w = graded_interval(xi - b, b - a)
            rho = b - tau
        d = np.abs(rho - xi)
        add(i, rho, w * vfac(xi, rho) * d ** (-1.0 - beta))

    for i in range(nt):
        xi = x[i]
        c = own[i]
        if at_edge[i] or xi == 0:
            left = c - 1 if xi > 0 else -1
            right = c
        else:
            left = right = c
        node_kink = pv and (is_node[i] or xi == 0)
        # own cell(s)
        if pv:
            if node_kink:
                if xi == 0:
                    delta = hi[0]
                    kink_w[i] = 0.0
                    kl[i] = kr[i] = 0.0
                else:
                    delta = min(hi[left] - lo[left], hi[right] - lo[right])
                    tt, wt = gauss_jacobi01(N_JAC, order - beta)  # weight t^(p-1-beta)
                    t = delta * tt
                    dv = (vfac(xi, xi - t) - vfac(xi, xi + t)) / t
                    kink_w[i] = delta ** (order - beta + 1.0) * np.sum(wt * dv)
                    kl[i] = lo[left]
                    kr[i] = hi[right]
                if keep[right]:
                    regular_side(i, xi, xi + delta, hi[right])
                if xi > 0 and keep[left]:
                    regular_side(i, xi, lo[left], xi - delta)
            else:
                delta = min(xi - lo[c], hi[c] - xi)
                tt, wt = gauss_jacobi01(N_JAC, order - beta)
                t = delta * tt
                for sgn in (-1.0, 1.0):
                    rho = xi + sgn * t
                    add(i, rho, delta ** (order - beta + 1.0) * wt * vfac(xi, rho) / t ** (order + 1.0))
                if hi[c] - xi > delta:
                    regular_side(i, xi, xi + delta, hi[c])
                if xi - lo[c] > delta:
                    regular_side(i, xi, lo[c], xi - delta)
        elif mode == "constant":
            # u is constant on the own cell, so F vanishes there; a target sitting on
            # a cell edge sees the jump at distance 0 (the caller checks its size)
            infinite[i] = bool(at_edge[i])
        else:
            if left >= 0 and keep[left]:
                singular_side(i, xi, lo[left], xi)
            if keep[right]:
                singular_side(i, xi, xi, hi[right])
        # neighbours within the band
        for cc in range(max(0, c_lo[i]), min(cells.n - 1, c_hi[i]) + 1):
            if cc in (left, right) or not keep[cc]:
                continue
            regular_side(i, xi, lo[cc], hi[cc])

    if rows:
        row = np.concatenate(rows)
        rho = np.concatenate(rhos)
        w = np.concatenate(ws)
    else:
        row = np.zeros(0, int)
        rho = w = np.zeros(0)
    R = cells.R_far
    if region == "interior":
        far_y = far_w = np.zeros(0)
    else:
        yi, yw = gauss_jacobi01(N_FAR, beta / kappa - 1.0)
        far_y = (R / grid.r_max) ** (-kappa) * yi
        far_w = S * R ** (-beta) / kappa * yw
    return PointwiseRule(x, dense, x_reg, row, rho, w, far_y, far_w, kink_w, kl, kr, infinite)

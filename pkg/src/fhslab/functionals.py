"""Seminorms, weighted norms, energy densities and the fractional p-Laplacian of radial profiles."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .params import ProblemParams, sphere_area
from .profiles import Grid, ProfileError, RadialProfile
from .quadrature import (
    gauss_legendre01,
    interp_matrix,
    pair_rule,
    pointwise_rule,
    radial_rule,
    unified_cells,
)


class FunctionalError(ValueError):
    pass


def phi(t, p):
    """|t|^{p-2} t."""
    return np.sign(t) * np.abs(t) ** (p - 1.0)


def _params_of(u: RadialProfile, params: ProblemParams | None) -> ProblemParams:
    params = params or u.params
    if params is None:
        raise FunctionalError("problem parameters are required (none attached to the profile)")
    return params


def _is_zero_tail(u: RadialProfile) -> bool:
    return u.tail_value == 0.0


def _is_constant(u: RadialProfile) -> bool:
    return bool(np.ptp(u.values) == 0 and (_is_zero_tail(u) or u.tail_exponent == 0))


def rule_for(u: RadialProfile, beta: float, order: float):
    return pair_rule(u.grid, u.dim, float(beta), float(order), float(u.tail_exponent), u.mode)


def _pair_order(u: RadialProfile, order: float) -> float:
    return order if u.mode == "linear" else 0.0


# -- Gagliardo seminorms --------------------------------------------------------------

def seminorm_power(u: RadialProfile, s: float, gamma: float, *, domain_radius: float | None = None) -> float:
    """[u]_{s,gamma}^gamma = int int |u(x) - u(y)|^gamma |x - y|^{-(N + gamma s)} dx dy.

    ``domain_radius`` restricts both variables to the ball of that radius (a grid node).
    Returns +inf when the power-law tail makes the integral diverge.
    """
    if not gamma > 0:
        raise FunctionalError(f"gamma must be positive, got {gamma}")
    if not 0 < s < 1:
        raise FunctionalError(f"s must lie in ]0,1[, got {s}")
    if not (u.tail_exponent > 0 or _is_constant(u)):
        raise FunctionalError("invalid tail exponent")
    if domain_radius is not None:
        k = np.searchsorted(u.nodes, domain_radius)
        if k >= len(u.nodes) or not math.isclose(u.nodes[k], domain_radius, rel_tol=1e-12):
            raise FunctionalError(f"domain radius {domain_radius} must be a grid node")
        domain_radius = float(u.nodes[k])
    if _is_constant(u):
        return 0.0
    beta = s * gamma
    if u.mode == "constant" and beta >= 1.0 and np.any(np.diff(u.values) != 0):
        return math.inf  # jumps have infinite energy once s*gamma >= 1
    rule = rule_for(u, beta, _pair_order(u, gamma))

    def F(a, b):
        return np.abs(a - b) ** gamma

    total = rule.pair_sum(F, rule.point_values(u.values), radius=domain_radius)
    if domain_radius is None and u.tail_value > 0:
        C = rule.tail_integral(F, gamma, gamma, key=("abs",))
        total += C * u.tail_value**gamma
    return total


def gagliardo_seminorm(u: RadialProfile, s: float, gamma: float) -> float:
    """[u]_{s,gamma}; a quasi-norm when gamma < 1.  +inf if the tail diverges."""
    val = seminorm_power(u, s, gamma)
    return val ** (1.0 / gamma) if math.isfinite(val) else math.inf


def seminorm_power_grad(u: RadialProfile, s: float, p: float, values=None):
    """[u]_{s,p}^p of the discretized profile and its exact gradient in the node values."""
    values = u.values if values is None else np.asarray(values, float)
    if np.ptp(values) == 0 and (values[-1] == 0 or u.tail_exponent == 0):
        return 0.0, np.zeros_like(values)
    beta = s * p
    rule = rule_for(u, beta, _pair_order(u, p))
    if p == 2.0:
        A, c_tail = quadratic_form(rule)
        Au = A @ values
        J = float(values @ Au) + c_tail * values[-1] ** 2
        grad = 2.0 * Au
        grad[-1] += 2.0 * c_tail * values[-1]
        return J, grad
    U, A, B = rule.point_values(values)
    D = U[:, None] - U[None, :]
    absD = np.abs(D)
    J = math.fsum(np.sum(rule.W * absD**p, axis=1))
    g_reg = 2.0 * p * np.sum(rule.W * np.sign(D) * absD ** (p - 1.0), axis=1)
    dAB = A - B
    J += 2.0 * math.fsum(rule.w_pair * np.abs(dAB) ** p)
    gab = 2.0 * p * rule.w_pair * phi(dAB, p) * 1.0
    grad = rule.P_reg.T @ g_reg + rule.P_a.T @ gab - rule.P_b.T @ gab
    uM = values[-1]
    if uM > 0:
        C = rule.tail_integral(lambda a, b: np.abs(a - b) ** p, p, p, key=("abs",))
        J += C * uM**p
        grad[-1] += p * C * uM ** (p - 1.0)
    return J, np.asarray(grad, float)


def quadratic_form(rule):
    """Matrix A and tail constant with [u]_{s,2}^2 = u.A.u + c u_M^2 (cached on the rule)."""
    if rule._stiffness is None:
        W = rule.W
        P = rule.P_reg
        Lap = np.diag(W.sum(axis=1)) - W
        A = 2.0 * (P.T @ (P.T @ Lap).T)
        D = rule.P_a - rule.P_b
        A = A + 2.0 * (D.T @ (D.multiply(rule.w_pair[:, None]))).toarray()
        A = 0.5 * (A + A.T)
        c = rule.tail_integral(lambda a, b: np.abs(a - b) ** 2, 2.0, 2.0, key=("abs",))
        rule._stiffness = (np.asarray(A), c)
    return rule._stiffness


# -- weighted norms -------------------------------------------------------------------

def weighted_power(u: RadialProfile, alpha: float, q: float, values=None) -> float:
    """int |u|^q |x|^{-alpha} dx (radial quadrature plus exact power-law tail)."""
    return _weighted_power(u, alpha, q, values)[0]


def _weighted_power(u, alpha, q, values=None, grad=False):
    N = u.dim
    if not 0 <= alpha < N:
        raise FunctionalError(f"alpha must lie in [0, N), got {alpha}")
    if not q > 0:
        raise FunctionalError(f"q must be positive, got {q}")
    values = u.values if values is None else np.asarray(values, float)
    S = sphere_area(N)
    x, w, P = _norm_rule(u.grid, float(N - 1 - alpha), u.mode, float(u.tail_exponent))
    U = P @ values
    total = S * math.fsum(w * np.abs(U) ** q)
    g = None
    if grad:
        g = S * (P.T @ (w * q * np.sign(U) * np.abs(U) ** (q - 1.0)))
    uM = values[-1]
    if uM != 0:
        rate = u.tail_exponent * q - (N - alpha)
        if rate <= 0:
            return math.inf, g
        c = S * u.r_max ** (N - alpha) / rate
        total += c * abs(uM) ** q
        if grad:
            g[-1] += c * q * abs(uM) ** (q - 1.0) * np.sign(uM)
    return total, g


_NORM_CACHE: dict = {}


def _norm_rule(grid: Grid, wexp: float, mode: str, kappa: float):
    key = (grid, wexp, mode, kappa)
    if key not in _NORM_CACHE:
        x, w = radial_rule(grid, wexp)
        _NORM_CACHE[key] = (x, w, interp_matrix(grid, x, kappa, mode))
    return _NORM_CACHE[key]


def weighted_norm(u: RadialProfile, alpha: float, q: float) -> float:
    """||u||_{alpha,q} = (int |u|^q |x|^{-alpha} dx)^{1/q}; +inf if the tail diverges."""
    val = weighted_power(u, alpha, q)
    return val ** (1.0 / q) if math.isfinite(val) else math.inf


def rayleigh_quotient(u: RadialProfile, params: ProblemParams | None = None) -> float:
    """[u]_{s,p}^p / ||u||_{alpha,q}^p."""
    params = _params_of(u, params)
    J = seminorm_power(u, params.s, params.p)
    H = weighted_power(u, params.alpha, params.q)
    if H == 0:
        raise FunctionalError("zero profile: the weighted norm vanishes")
    if not (math.isfinite(J) and math.isfinite(H)):
        raise FunctionalError("Rayleigh quotient needs a finite seminorm and weighted norm")
    return J / H ** (params.p / params.q)


def weak_norm(u: RadialProfile, t: float) -> float:
    """Weak L^t quasi-norm sup_lam lam |{u > lam}|^{1/t} of a non-increasing radial profile."""
    if not u.is_monotone:
        raise FunctionalError("weak norm formula needs a non-increasing profile")
    N = u.dim
    omega = sphere_area(N) / N
    r = u.nodes
    e = N / t
    if u.mode == "constant":
        # u jumps down at r_{k+1}: lam -> u_k from below gives the ball of radius r_{k+1}
        inner = np.max(u.values[:-1] * (omega * r[1:] ** N) ** (1.0 / t))
    else:
        # {u > u(rho)} is the ball of radius rho, so maximize (a + b rho) rho^e on each cell
        a_, b_ = r[:-1], r[1:]
        va, vb = u.values[:-1], u.values[1:]
        slope = (vb - va) / (b_ - a_)
        cand = [va * a_**e, vb * b_**e]
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = -e * (va - slope * a_) / (slope * (1.0 + e))
        inside = (slope < 0) & (rho > a_) & (rho < b_)
        rho = np.where(inside, rho, a_)
        cand.append(np.where(inside, (va + slope * (rho - a_)) * rho**e, 0.0))
        inner = np.max(np.maximum.reduce(cand)) * omega ** (1.0 / t)
    if u.tail_value > 0:
        if N / t > u.tail_exponent:
            return math.inf
        inner = max(inner, u.tail_value * (omega * u.r_max**N) ** (1.0 / t))
    return float(inner)


# -- pointwise operators ------------------------------------------------------------------

def _line_sum(u: RadialProfile, rule, F, vals_at_targets):
    """Evaluate a pointwise rule on profile u for the integrand F(u(x), u(rho))."""
    kappa = u.tail_exponent
    grid = u.grid
    Ureg = interp_matrix(grid, rule.x_reg, kappa, u.mode) @ u.values
    ux = vals_at_targets
    out = np.array([math.fsum(row) for row in rule.dense * F(ux[:, None], Ureg[None, :])])
    if rule.row.size:
        Urho = interp_matrix(grid, rule.rho, kappa, u.mode) @ u.values
        contrib = rule.w * F(ux[rule.row], Urho)
        order = np.argsort(rule.row, kind="stable")
        counts = np.bincount(rule.row, minlength=ux.size)
        splits = np.split(contrib[order], np.cumsum(counts)[:-1])
        out = out + np.array([math.fsum(c) for c in splits])
    if rule.far_y.size and u.tail_value > 0:
        out = out + F(ux[:, None], u.tail_value * rule.far_y[None, :]) @ rule.far_w
    elif rule.far_y.size:
        out = out + F(ux[:, None], np.zeros((1, rule.far_y.size))) @ rule.far_w
    return out


def _targets(u, r):
    r = np.atleast_1d(np.asarray(r, float))
    if np.any(r < 0):
        raise FunctionalError("radii must be nonnegative")
    return r


def energy_density(u: RadialProfile, r, params: ProblemParams | None = None, *, gamma: float | None = None,
                   s: float | None = None, region: str = "all") -> np.ndarray:
    """|D^s u|^gamma(x) = int |u(x) - u(y)|^gamma |x - y|^{-(N + gamma s)} dy at |x| = r.

    gamma and s default to p and s of the attached parameters.  ``region`` restricts
    y to |y| <= r_max ("interior") or |y| >= r_max ("exterior").
    """
    if gamma is None or s is None:
        params = _params_of(u, params)
        gamma = params.p if gamma is None else gamma
        s = params.s if s is None else s
    r = _targets(u, r)
    if _is_constant(u):
        return np.zeros_like(r)
    beta = s * gamma
    rule = pointwise_rule(u.grid, u.dim, beta, u.tail_exponent, r, gamma if u.mode == "linear" else 0.0,
                          region=region, mode=u.mode)
    ux = u.evaluate(r)
    out = _line_sum(u, rule, lambda a, b: np.abs(a - b) ** gamma, ux)
    if np.any(rule.infinite):
        k = np.searchsorted(u.nodes, r[rule.infinite])
        jump = u.values[k] != u.values[np.maximum(k - 1, 0)]
        idx = np.nonzero(rule.infinite)[0][jump]
        out[idx] = math.inf
    return out


def frac_p_laplacian_at(u: RadialProfile, r, params: ProblemParams | None = None):
    """(-Delta_p)^s u at radii r; returns (values, kink_flags).

    Off the nodes the principal value comes from the symmetric window inside the
    cell (frozen slope).  At nodes (kinks of the piecewise-linear u) and at r = 0 the
    window is evaluated with the average of the two one-sided slope terms and flagged.
    """
    params = _params_of(u, params)
    if u.mode != "linear":
        raise FunctionalError("the fractional p-Laplacian needs a piecewise-linear profile")
    p, s = params.p, params.s
    r = _targets(u, r)
    if _is_constant(u):
        return np.zeros_like(r), np.zeros(r.size, bool)
    beta = p * s
    rule = pointwise_rule(u.grid, u.dim, beta, u.tail_exponent, r, p - 1.0, pv=True)
    ux = u.evaluate(r)
    out = _line_sum(u, rule, lambda a, b: phi(a - b, p), ux)
    kink = ~np.isnan(rule.kink_weight)
    flags = np.zeros(r.size, bool)
    if np.any(kink):
        i = np.nonzero(kink)[0]
        xi = r[i]
        pos = xi > 0
        sl = np.zeros(i.size)
        sr = np.zeros(i.size)
        ul = u.evaluate(rule.kink_left[i])
        ur = u.evaluate(rule.kink_right[i])
        sl[pos] = (ux[i][pos] - ul[pos]) / (xi[pos] - rule.kink_left[i][pos])
        sr[pos] = (ur[pos] - ux[i][pos]) / (rule.kink_right[i][pos] - xi[pos])
        out[i] += 0.5 * (phi(sl, p) + phi(sr, p)) * rule.kink_weight[i]
        scale = np.maximum(np.abs(sl), np.abs(sr))
        flags[i] = (np.abs(sl - sr) > 1e-8 * scale) | ~pos
    return 2.0 * out, flags


def frac_p_laplacian(u: RadialProfile, params: ProblemParams | None = None) -> RadialProfile:
    """(-Delta_p)^s u sampled at the grid nodes (signed profile; kink nodes listed in meta)."""
    params = _params_of(u, params)
    vals, flags = frac_p_laplacian_at(u, u.nodes, params)
    meta = {"kink_nodes": np.nonzero(flags)[0].tolist(), "kink_rule": "one-sided average"}
    return RadialProfile(u.grid, vals, params.N + params.ps, u.dim, "linear", params, signed=True, meta=meta)


# -- outer radial integration ------------------------------------------------------------

def tanh_sinh01(level_h: float = 0.3, kmax: int = 8):
    """Double-exponential nodes on (0, 1) (endpoint singularities allowed)."""
    t = level_h * np.arange(-kmax, kmax + 1)
    u = 0.5 * math.pi * np.sinh(t)
    x = 0.5 * (1.0 + np.tanh(u))
    w = 0.5 * level_h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return x, w


def outer_points(grid: Grid, *, extend: bool = True):
    """Points and weights for int_0^R g(r) dr with double-exponential rules per cell.

    Cells are the unified cells inside r_max, plus tail cells up to 2^10 r_max if ``extend``.
    """
    cells = unified_cells(grid)
    limit = grid.r_max * 2.0**10 if extend else grid.r_max
    lo, hi = cells.lo, cells.hi
    sel = hi <= limit * (1 + 1e-12)
    lo, hi = lo[sel], hi[sel]
    t, w = tanh_sinh01()
    x = (lo[:, None] + (hi - lo)[:, None] * t[None, :]).ravel()
    ww = ((hi - lo)[:, None] * w[None, :]).ravel()
    return x, ww


def integrate_radial(u_dim: int, x, w, values) -> float:
    return sphere_area(u_dim) * math.fsum(w * values * x ** (u_dim - 1))


def pairing_integral(u: RadialProfile, phi_func, params: ProblemParams | None = None, *, block: int = 400) -> float:
    """int f(x) phi_func(|x|) dx with f = (-Delta_p)^s u evaluated pointwise (outer DE rule)."""
    params = _params_of(u, params)
    x, w = outer_points(u.grid)
    vals = np.empty_like(x)
    for i0 in range(0, x.size, block):
        vals[i0:i0 + block] = frac_p_laplacian_at(u, x[i0:i0 + block], params)[0]
    return integrate_radial(u.dim, x, w, vals * phi_func(x))


def integrated_energy(u: RadialProfile, s: float, gamma: float, *, block: int = 400) -> float:
    """int |D^s u|^gamma dx by integrating the pointwise density (independent of the pair rule).

    Split as int_{|x|<r_max} (e + e_ext) dx + tail-tail block, which covers every pair once.
    """
    x, w = outer_points(u.grid, extend=False)
    vals = np.empty_like(x)
    for i0 in range(0, x.size, block):
        xs = x[i0:i0 + block]
        vals[i0:i0 + block] = (energy_density(u, xs, gamma=gamma, s=s)
                               + energy_density(u, xs, gamma=gamma, s=s, region="exterior"))
    total = integrate_radial(u.dim, x, w, vals)
    if u.tail_value > 0:
        rule = rule_for(u, s * gamma, _pair_order(u, gamma))
        total += rule.tail_integral(lambda a, b: np.abs(a - b) ** gamma, gamma, gamma, key=("abs",)) * u.tail_value**gamma
    return total


# -- Besov seminorm ---------------------------------------------------------------------

def second_difference_norm(u: RadialProfile, h: float, p: float, *, n_r: int = 6, n_theta: int = 32) -> float:
    """||u(. + h e) + u(. - h e) - 2 u||_{L^p(R^N)} by a radial-angular product rule."""
    N = u.dim
    cells = unified_cells(u.grid)
    edges = np.unique(np.concatenate([cells.edges, [h, 2 * h]]))
    edges = edges[edges <= cells.R_far]
    if N == 1:
        # kinks of u(. +- h) sit at the shifted nodes
        shifted = np.concatenate([cells.edges + h, cells.edges - h])
        edges = np.unique(np.concatenate([edges, shifted[(shifted > 0) & (shifted < cells.R_far)]]))
    tr, wr = gauss_legendre01(n_r)
    lo, hi = edges[:-1], edges[1:]
    r = (lo[:, None] + (hi - lo)[:, None] * tr[None, :]).ravel()
    wr = ((hi - lo)[:, None] * wr[None, :]).ravel()
    if N == 1:
        d = u.evaluate(r + h) + u.evaluate(np.abs(r - h)) - 2.0 * u.evaluate(r)
        return (2.0 * math.fsum(wr * np.abs(d) ** p)) ** (1.0 / p)
    tt, wt = gauss_legendre01(n_theta)
    theta = np.concatenate([0.5 * math.pi * tt, 0.5 * math.pi * (1 + tt)])
    wth = np.concatenate([0.5 * math.pi * wt] * 2) * np.sin(theta) ** (N - 2)
    R = r[:, None]
    c = np.cos(theta)[None, :]
    plus = np.sqrt(np.maximum(R**2 + h**2 + 2 * R * h * c, 0.0))
    minus = np.sqrt(np.maximum(R**2 + h**2 - 2 * R * h * c, 0.0))
    d = u.evaluate(plus) + u.evaluate(minus) - 2.0 * u.evaluate(np.broadcast_to(R, plus.shape))
    inner = np.abs(d) ** p @ wth
    return (sphere_area(N - 1) * math.fsum(wr * r ** (N - 1) * inner)) ** (1.0 / p)


def besov_curve(u: RadialProfile, sigma: float, p: float, h_set) -> np.ndarray:
    h_set = np.asarray(list(h_set), float)
    if h_set.size == 0:
        raise FunctionalError("empty h set")
    if not 0 < sigma < 2:
        raise FunctionalError(f"sigma must lie in ]0,2[, got {sigma}")
    if _is_constant(u):
        return np.zeros(h_set.size)
    return np.array([second_difference_norm(u, h, p) / h**sigma for h in h_set])


def besov_seminorm(u: RadialProfile, sigma: float, p: float, h_set) -> float:
    """max over h in h_set of ||delta^2_h u||_p / |h|^sigma."""
    return float(np.max(besov_curve(u, sigma, p, h_set)))


# -- G-transform pairing ----------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneMap:
    """Non-decreasing g from a closed catalogue, with G(t) = int_0^t g'(tau)^{1/p} dtau.

    kind "identity": g(t) = t.
    kind "power": g(t) = t min(t, k)^{beta - 1}  (beta >= 1, k > 0).
    kind "clamp": g(t) = min((t - lo)_+, hi - lo).
    """

    kind: str
    beta: float = 1.0
    k: float = 1.0
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "power", "clamp"):
            raise FunctionalError(f"g must be one of identity/power/clamp, got {self.kind!r}")
        if self.kind == "power" and not (self.beta >= 1 and self.k > 0):
            raise FunctionalError("power truncation needs beta >= 1 and k > 0")
        if self.kind == "clamp" and not (0 <= self.lo < self.hi):
            raise FunctionalError("clamp needs 0 <= lo < hi")

    def g(self, t):
        t = np.asarray(t, float)
        if self.kind == "identity":
            return t
        if self.kind == "power":
            return t * np.minimum(t, self.k) ** (self.beta - 1.0)
        return np.minimum(np.clip(t - self.lo, 0.0, None), self.hi - self.lo)

    def G(self, t, p):
        t = np.asarray(t, float)
        if self.kind == "identity":
            return t
        if self.kind == "power":
            b = self.beta
            c = b ** (1.0 / p) * p / (b + p - 1.0)
            e = (b + p - 1.0) / p
            tk = np.minimum(t, self.k)
            return c * tk**e + self.k ** ((b - 1.0) / p) * np.clip(t - self.k, 0.0, None)
        return self.g(t)

    def tail_degree(self, p) -> float | None:
        """Homogeneity degree of g on [0, u_M]; None when g vanishes there."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "power":
            return self.beta
        return None

    def check_tail(self, u_M: float):
        if self.kind == "power" and u_M > self.k:
            raise FunctionalError("power truncation level k must be >= the tail value u(r_max)")
        if self.kind == "clamp" and u_M > self.lo:
            raise FunctionalError("clamp lower level must be >= the tail value u(r_max)")


def g_transform_pairing(u: RadialProfile, g: MonotoneMap, params: ProblemParams | None = None):
    """(lhs, rhs) = ([G(u)]_{s,p}^p, <(-Delta_p)^s u, g(u)>), both on the same pair rule.

    The pairing is the weak form int int Phi(u(x)-u(y)) (g(u(x)) - g(u(y))) |x-y|^{-N-ps}.
    """
    params = _params_of(u, params)
    if not isinstance(g, MonotoneMap):
        raise FunctionalError("g must be a MonotoneMap from the catalogue")
    p, s = params.p, params.s
    g.check_tail(u.tail_value)
    rule = rule_for(u, p * s, _pair_order(u, p))
    vals = rule.point_values(u.values)

    def lhs_F(a, b):
        return np.abs(g.G(a, p) - g.G(b, p)) ** p

    def rhs_F(a, b):
        return phi(a - b, p) * (g.g(a) - g.g(b))

    lhs = rule.pair_sum(lhs_F, vals)
    rhs = rule.pair_sum(rhs_F, vals)
    m = g.tail_degree(p)
    if u.tail_value > 0 and m is not None:
        deg = p - 1.0 + m
        if g.kind == "identity":
            Gh = gh = lambda t: t
        else:
            c = g.beta ** (1.0 / p) * p / (g.beta + p - 1.0)
            Gh = lambda t: c * t ** ((g.beta + p - 1.0) / p)
            gh = lambda t: t**g.beta
        kl = ("G", g.kind, g.beta)
        cl = rule.tail_integral(lambda a, b: np.abs(Gh(a) - Gh(b)) ** p, deg, p, key=kl)
        cr = rule.tail_integral(lambda a, b: phi(a - b, p) * (gh(a) - gh(b)), deg, p, key=("g",) + kl[1:])
        lhs += cl * u.tail_value**deg
        rhs += cr * u.tail_value**deg
    return lhs, rhs


def product_rule_sides(v: RadialProfile, w: RadialProfile, s: float, p: float):
    """([vw]_{s,p}^p, 2^{p-1} int (|v|^p |D^s w|^p + |w|^p |D^s v|^p) dx) for profiles vanishing at r_max."""
    if v.grid != w.grid or v.dim != w.dim:
        raise FunctionalError("profiles must share grid and dimension")
    if v.tail_value != 0 or w.tail_value != 0:
        raise FunctionalError("product rule check needs profiles vanishing at r_max")
    vw = v.with_values(v.values * w.values)
    lhs = seminorm_power(vw, s, p)
    rule = rule_for(v, s * p, _pair_order(v, p))
    V = rule.point_values(v.values)
    Wv = rule.point_values(w.values)

    U = (V[0], Wv[0])
    D = np.abs(U[0][:, None]) ** p * np.abs(U[1][:, None] - U[1][None, :]) ** p \
        + np.abs(U[1][:, None]) ** p * np.abs(U[0][:, None] - U[0][None, :]) ** p
    dense = math.fsum(np.sum(rule.W * D, axis=1))

    def F(a0, a1, b0, b1):
        return np.abs(a0) ** p * np.abs(a1 - b1) ** p + np.abs(a1) ** p * np.abs(a0 - b0) ** p

    sp = math.fsum(rule.w_pair * (F(V[1], Wv[1], V[2], Wv[2]) + F(V[2], Wv[2], V[1], Wv[1])))
    return lhs, 2.0 ** (p - 1.0) * (dense + sp)


# -- report ---------------------------------------------------------------------------------------

@dataclass
class FunctionalReport:
    seminorm_s_p: float
    weighted_norm_alpha_q: float
    rayleigh: float
    refinement_delta: float
    deltas: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("seminorm_s_p", "weighted_norm_alpha_q", "rayleigh"):
            d[key] = {"value": _jsonable(d[key]), "refinement_delta": _jsonable(self.deltas.get(key, math.nan))}
        d["refinement_delta"] = _jsonable(self.refinement_delta)
        d.pop("deltas")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _values(u, params):
    J = seminorm_power(u, params.s, params.p)
    H = weighted_power(u, params.alpha, params.q)
    sem = J ** (1 / params.p) if math.isfinite(J) else math.inf
    nrm = H ** (1 / params.q) if math.isfinite(H) else math.inf
    ray = J / H ** (params.p / params.q) if (math.isfinite(J) and math.isfinite(H) and H > 0) else math.nan
    return {"seminorm_s_p": sem, "weighted_norm_alpha_q": nrm, "rayleigh": ray}


def functional_report(u: RadialProfile, params: ProblemParams | None = None, *, refine: bool = True) -> FunctionalReport:
    """All headline functionals of u, each with its relative change under grid doubling."""
    params = _params_of(u, params)
    base = _values(u, params)
    deltas = {k: math.nan for k in base}
    if refine:
        fine_grid = u.grid.refined(2)
        fine = RadialProfile(fine_grid, u.evaluate_smooth(fine_grid.nodes), u.tail_exponent, u.dim, u.mode, params)
        other = _values(fine, params)
        for k in base:
            a, b = base[k], other[k]
            deltas[k] = abs(b - a) / abs(a) if (math.isfinite(a) and math.isfinite(b) and a != 0) else math.nan
    finite = [d for d in deltas.values() if math.isfinite(d)]
    return FunctionalReport(base["seminorm_s_p"], base["weighted_norm_alpha_q"], base["rayleigh"],
                            max(finite) if finite else math.nan, deltas, params.to_dict())


# -- cell averages ----------------------------------------------------------------------------

def cell_points(grid: Grid, n: int = 4, cells=None):
    """Gauss-Legendre points (K, n) and weights (n,) inside grid cells [r_k, r_{k+1}]."""
    x = grid.nodes
    k = np.arange(grid.M) if cells is None else np.asarray(cells)
    t, w = gauss_legendre01(n)
    pts = x[k][:, None] + (x[k + 1] - x[k])[:, None] * t[None, :]
    return k, pts, w


def frac_p_laplacian_cell_means(u: RadialProfile, params: ProblemParams | None = None, *, n: int = 4,
                                cells=None, block: int = 1000):
    """Averages of (-Delta_p)^s u over grid cells.

    Pointwise values of the operator applied to a piecewise-linear profile carry an
    O(h^{p(1-s)})-type oscillation between nodes; cell averages cancel it, leaving the
    O(h^2) interpolation error.  Returns (cell indices, points (K, n), weights (n,), means).
    """
    params = _params_of(u, params)
    k, pts, w = cell_points(u.grid, n, cells)
    flat = pts.ravel()
    vals = np.empty_like(flat)
    for i0 in range(0, flat.size, block):
        vals[i0:i0 + block] = frac_p_laplacian_at(u, flat[i0:i0 + block], params)[0]
    return k, pts, w, vals.reshape(pts.shape) @ w


def euler_lagrange_residual(u: RadialProfile, I1: float, params: ProblemParams | None = None) -> float:
    """||f - I1 u^{q-1} |x|^{-alpha}||_2 / ||f||_2 over the grid cells, using cell means.

    f = (-Delta_p)^s u; the L^2 norm weights each cell by its measure in R^N.
    """
    params = _params_of(u, params)
    k, pts, w, fmean = frac_p_laplacian_cell_means(u, params)
    src = I1 * u.evaluate(pts) ** (params.q - 1.0) * pts ** (-params.alpha)
    smean = src @ w
    x = u.nodes
    vol = sphere_area(u.dim) / u.dim * (x[k + 1] ** u.dim - x[k] ** u.dim)
    num = math.sqrt(math.fsum(vol * (fmean - smean) ** 2))
    den = math.sqrt(math.fsum(vol * fmean**2))
    return num / den

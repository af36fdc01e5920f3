"""Constant-free numerical checks: exponents, slopes, ratio invariances and one-sided inequalities."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import functionals as fn
from .params import sphere_area
from .profiles import (
    Grid,
    RadialProfile,
    dilate_scale,
    dyadic_grid,
    layer_cake_decompose,
)


class VerificationError(ValueError):
    pass


@dataclass
class VerificationReport:
    check: str
    inputs_digest: str
    measured: dict
    target: dict
    tolerance: float
    verdict: str  # "pass", "fail" or "informational"
    refinement_delta: float = 0.0
    rows: list = field(default_factory=list)  # sweep rows: parameter, measured, target, margin
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["parameter", "measured", "target", "margin"])
        for r in self.rows:
            w.writerow([_fmt(r.get("parameter")), _fmt(r.get("measured")), _fmt(r.get("target")), _fmt(r.get("margin"))])
        return buf.getvalue()


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def profile_digest(u: RadialProfile, *extra) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([u.grid.to_dict(), u.tail_exponent, u.dim, u.mode, [repr(e) for e in extra]]).encode())
    h.update(np.ascontiguousarray(u.values, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


def _verdict(ok: bool, refinement_delta: float, tol: float) -> str:
    return "pass" if ok and (not math.isfinite(refinement_delta) or refinement_delta < tol / 2) else "fail"


def _refined(u: RadialProfile) -> RadialProfile:
    g = u.grid.refined(2)
    return RadialProfile(g, u.evaluate_smooth(g.nodes), u.tail_exponent, u.dim, u.mode, u.params)


def _params(u, params):
    params = params or u.params
    if params is None:
        raise VerificationError("problem parameters are required")
    return params


# -- decay --------------------------------------------------------------------------------------

def fit_decay_exponent(u: RadialProfile, window=(1e2, 1e4), n: int = 200) -> float:
    """Least-squares decay exponent k in u ~ r^{-k} over the window.

    Samples are the grid nodes inside the window, plus ``n`` log-spaced points on
    the analytic tail when the window reaches past r_max.
    """
    lo, hi = map(float, window)
    if not (0 < lo < hi) or math.log10(hi / lo) < 2 - 1e-12:
        raise VerificationError("fit window must span at least two decades")
    x = u.nodes
    r = x[(x >= lo * (1 - 1e-12)) & (x <= hi * (1 + 1e-12))]
    if hi > u.r_max * (1 + 1e-12):
        r = np.union1d(r, np.geomspace(max(lo, u.r_max), hi, n))
    if r.size < 3:
        raise VerificationError("fewer than 3 samples inside the fit window")
    v = u.evaluate(r)
    if np.any(v <= 0):
        raise VerificationError("profile vanishes inside the fit window")
    slope = np.polyfit(np.log(r), np.log(v), 1)[0]
    return float(-slope)


def decay_check(u: RadialProfile, params=None, window=(1e2, 1e4), rel_tol: float = 0.02) -> VerificationReport:
    params = _params(u, params)
    k = fit_decay_exponent(u, window)
    target = params.decay_exp
    k_ref = fit_decay_exponent(_refined(u), window)
    tol = rel_tol * target
    ok = abs(k - target) <= tol
    rep = VerificationReport("decay", profile_digest(u, window), {"exponent": k}, {"exponent": target}, tol,
                             _verdict(ok, abs(k_ref - k), tol), abs(k_ref - k),
                             [{"parameter": "decay_exponent", "measured": k, "target": target, "margin": tol - abs(k - target)}])
    if k > target + 0.1:
        rep.notes.append("fitted decay faster than the lower-bound exponent allows")
    return rep


# -- gamma sweep ---------------------------------------------------------------------------------

def snap_to_nodes(grid: Grid, radii) -> np.ndarray:
    x = grid.nodes
    idx = np.unique([int(np.argmin(np.abs(np.log(x[1:]) - math.log(r)))) + 1 for r in radii])
    return x[idx]


def _growth_fit(radii, values):
    """Slope of log(increment) against log(radius) for a cumulative sequence."""
    R = np.asarray(radii)
    I = np.asarray(values)
    inc = np.diff(I)
    mid = np.sqrt(R[1:] * R[:-1])
    good = inc > 0
    if good.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(mid[good]), np.log(inc[good]), 1)[0])


def gamma_sweep(u: RadialProfile, params=None, gammas=(1.0, 2.0), radii=None, *, growth_tol: float = 0.10,
                saturation: float = 0.01) -> VerificationReport:
    """Truncated seminorms [u]_{s,gamma}^gamma over B_R x B_R as R grows.

    Below the threshold N(p-1)/(N-s) the increments grow like R^e with
    e = N - gamma (N-s)/(p-1) > 0 (fitted, relative tolerance ``growth_tol``);
    above it the truncated values saturate (< ``saturation`` relative growth over
    the last decade) and the full seminorm is finite.
    """
    params = _params(u, params)
    N, p, s = params.N, params.p, params.s
    gammas = [float(g) for g in gammas]
    if any(not 0 < g <= p for g in gammas):
        raise VerificationError("gammas must lie in ]0, p]")
    if radii is None:
        radii = np.geomspace(10.0, u.r_max, 13)
    radii = snap_to_nodes(u.grid, radii)
    thr = params.gamma_threshold
    rows, measured, target = [], {}, {}
    all_ok = True
    for g in gammas:
        e = N - g * (N - s) / (p - 1.0)
        vals = [fn.seminorm_power(u, s, g, domain_radius=R) for R in radii]
        full = fn.seminorm_power(u, s, g)
        if g < thr:
            slope = _growth_fit(radii, vals)
            margin = growth_tol * abs(e) - abs(slope - e)
            ok = margin >= 0 and not math.isfinite(full)
            verdict = "divergent"
            rows.append({"parameter": g, "measured": slope, "target": e, "margin": margin})
            measured[f"gamma={g:g}"] = {"growth_exponent": slope, "full_seminorm": full, "verdict": verdict}
        else:
            last = radii[-1]
            j = int(np.argmin(np.abs(np.log(radii) - math.log(last / 10.0))))
            rel = (vals[-1] - vals[j]) / vals[-1]
            ok = rel < saturation and math.isfinite(full)
            verdict = "finite"
            rows.append({"parameter": g, "measured": rel, "target": saturation, "margin": saturation - rel})
            measured[f"gamma={g:g}"] = {"growth_per_decade": rel, "full_seminorm": full, "verdict": verdict,
                                        "increment_slope": _growth_fit(radii, vals)}
        target[f"gamma={g:g}"] = {"exponent": e, "threshold": thr}
        all_ok &= bool(ok)
    return VerificationReport("gamma_sweep", profile_digest(u, gammas, list(radii)), measured, target, growth_tol,
                              "pass" if all_ok else "fail", 0.0, rows)


# -- dyadic layers -----------------------------------------------------------------------------

def dyadic_resample(u: RadialProfile, grid: Grid | None = None) -> RadialProfile:
    grid = grid or dyadic_grid()
    if u.grid == grid:
        return u
    return RadialProfile(grid, u.evaluate_smooth(grid.nodes), u.tail_exponent, u.dim, u.mode, u.params)


def dyadic_layer_check(u: RadialProfile, gamma: float, params=None, *, first_layer: int = 3,
                       tol: float = 0.1, K: int | None = None) -> VerificationReport:
    """log2-slope of [u_i]_{s,gamma}^gamma over the horizontal dyadic layers vs N - gamma (N-s)/(p-1)."""
    params = _params(u, params)
    N, p, s = params.N, params.p, params.s
    if gamma < params.gamma_threshold * (1 - 1e-9) or gamma > p:
        raise VerificationError("gamma must lie in [N(p-1)/(N-s), p]")
    v = dyadic_resample(u)
    dec = layer_cake_decompose(v, K)
    energies = np.array([fn.seminorm_power(layer, s, gamma) for layer in dec.layers])
    sup_ok = all(float(np.max(layer.values)) <= h * (1 + 1e-12) for layer, h in zip(dec.layers, dec.base_heights))
    idx = np.arange(len(energies))
    use = (idx >= first_layer) & (idx < len(energies) - 1) & (energies > 0)
    if use.sum() < 4:
        raise VerificationError("fewer than 4 usable layers")
    slope = float(np.polyfit(idx[use], np.log2(energies[use]), 1)[0])
    target = N - gamma * (N - s) / (p - 1.0)
    rows = [{"parameter": int(i), "measured": float(e), "target": math.nan, "margin": math.nan}
            for i, e in zip(idx, energies)]
    rows.append({"parameter": "slope", "measured": slope, "target": target, "margin": tol - abs(slope - target)})
    ok = abs(slope - target) <= tol and sup_ok
    measured = {"slope": slope, "layer_energies": energies.tolist(), "sup_bound_holds": sup_ok,
                "sum_energies": float(energies.sum())}
    return VerificationReport("dyadic_layers", profile_digest(u, gamma), measured,
                              {"slope": target, "gamma": gamma}, tol, "pass" if ok else "fail", 0.0, rows)


# -- interpolation scaling ---------------------------------------------------------------------

def support_radius(u: RadialProfile) -> float:
    if u.tail_value != 0:
        raise VerificationError("profile is not compactly supported")
    nz = np.nonzero(u.values > 0)[0]
    if nz.size == 0:
        raise VerificationError("zero profile")
    return float(u.nodes[nz[-1] + 1])


def interpolation_quotient(u: RadialProfile, params, tau, mu, gamma, *, h_rel=None) -> float:
    N, p, s = params.N, params.p, params.s
    R = support_radius(u)
    h_rel = np.geomspace(1e-3, 10.0, 65) if h_rel is None else h_rel
    bes = fn.besov_seminorm(u, tau, p, R * h_rel)
    e = N / gamma - N / p + mu * (tau - s)
    num = fn.gagliardo_seminorm(u, s, gamma)
    return num / (R**e * bes**mu * fn.gagliardo_seminorm(u, s, p) ** (1 - mu))


def interpolation_scaling_check(u: RadialProfile, tau: float, mu: float, gamma: float, params=None,
                                dilations=(0.25, 0.5, 1.0, 2.0, 4.0), tol: float = 0.1) -> VerificationReport:
    params = _params(u, params)
    if not (params.s < tau < 1 and 0 < mu < 1 and 0 < gamma < params.p):
        raise VerificationError("need s < tau < 1, 0 < mu < 1, 0 < gamma < p")
    support_radius(u)
    qs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for m in dilations:
            v = dilate_scale(u, 1.0, m) if m != 1.0 else u
            v = v.with_values(np.where(v.nodes >= support_radius(u) / m * (1 + 1e-12), 0.0, v.values))
            qs.append(interpolation_quotient(v, params, tau, mu, gamma))
    qs = np.array(qs)
    spread = float(qs.max() / qs.min() - 1.0)
    e = params.N / gamma - params.N / params.p + mu * (tau - params.s)
    rows = [{"parameter": m, "measured": q, "target": qs[len(qs) // 2], "margin": math.nan} for m, q in zip(dilations, qs)]
    ok = bool(np.all(np.isfinite(qs)) and np.all(qs > 0) and spread < tol)
    return VerificationReport("interpolation_scaling", profile_digest(u, tau, mu, gamma),
                              {"Q": qs.tolist(), "spread": spread, "radius_exponent": e},
                              {"spread": 0.0}, tol, "pass" if ok else "fail", 0.0, rows)


# -- cutoff bounds -------------------------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """eta(r) = A (1 - (r/R)^2)_+^k, k >= 2."""

    radius: float = 1.0
    amplitude: float = 1.0
    power: int = 2

    def __call__(self, r):
        t = np.clip(1.0 - (np.asarray(r, float) / self.radius) ** 2, 0.0, None)
        return self.amplitude * t**self.power

    @property
    def sup(self) -> float:
        return abs(self.amplitude)

    @property
    def lipschitz(self) -> float:
        k = self.power
        t = 1.0 / math.sqrt(2 * k - 1)
        return abs(self.amplitude) * 2 * k * t * (1 - t * t) ** (k - 1) / self.radius

    def profile(self, N: int, grid: Grid | None = None) -> RadialProfile:
        grid = grid or Grid()
        return RadialProfile(grid, self(grid.nodes), 1.0, N)


def _cutoff_rhs(b: Bump, gamma, s):
    return (1 / (1 - s) + 1 / s) * b.lipschitz ** (gamma * s) * b.sup ** (gamma * (1 - s))


def _sup_density(b: Bump, N, gamma, s, grid):
    u = b.profile(N, grid)
    r = np.linspace(0.0, 1.5 * b.radius, 151)
    return float(np.max(fn.energy_density(u, r, gamma=gamma, s=s)))


def cutoff_bound_check(eta: Bump, gamma: float, s: float, N: int, *, reference: Bump = Bump(),
                       theta: float = 0.5, grid: Grid | None = None, tol: float = 0.05) -> VerificationReport:
    """Calibrate C(N, gamma) on ``reference``, test the sup bound on ``eta``; fit the far-field decay."""
    grid = grid or Grid()
    if not math.isfinite(eta.radius) or eta.amplitude == 0:
        return VerificationReport("cutoff_bound", "", {}, {}, tol, "informational",
                                  notes=["skipped: bump is constant (no compact support)"])
    C = _sup_density(reference, N, gamma, s, grid) / _cutoff_rhs(reference, gamma, s)
    sup = _sup_density(eta, N, gamma, s, grid)
    bound = C * _cutoff_rhs(eta, gamma, s)
    ratio = sup / bound
    u = eta.profile(N, grid)
    r = np.geomspace(max(4 * (1 + theta) * eta.radius, 10 * eta.radius), 1e3 * eta.radius, 40)
    e = fn.energy_density(u, r, gamma=gamma, s=s)
    slope = float(np.polyfit(np.log(r), np.log(e), 1)[0])
    target = -(N + gamma * s)
    far_ok = abs(slope - target) <= tol * abs(target)
    weighted = e * r ** (N + gamma * s)
    rows = [{"parameter": "sup_ratio", "measured": ratio, "target": 1.0, "margin": 1.0 + 1e-3 - ratio},
            {"parameter": "far_slope", "measured": slope, "target": target, "margin": tol * abs(target) - abs(slope - target)}]
    ok = ratio <= 1.0 + 1e-3 and far_ok
    return VerificationReport("cutoff_bound", hashlib.sha256(repr((eta, gamma, s, N)).encode()).hexdigest()[:16],
                              {"calibrated_C": C, "sup_ratio": ratio, "far_slope": slope,
                               "far_weighted_max": float(weighted.max()), "far_weighted_min": float(weighted.min())},
                              {"sup_ratio_max": 1.0, "far_slope": target}, tol, "pass" if ok else "fail", 0.0, rows)


# -- Hardy chain ---------------------------------------------------------------------------------

def hardy_chain_sides(u: RadialProfile, params) -> tuple:
    N, p, s, alpha, q = params.N, params.p, params.s, params.alpha, params.q
    lhs = fn.weighted_power(u, p * s, p)
    pref = (sphere_area(N) / (N - p * s)) ** (-(alpha - p * s) / (N - alpha))
    rhs = pref * fn.weighted_power(u, alpha, q) ** (p / q)
    return lhs, rhs, pref


def hardy_chain_check(u: RadialProfile, params=None, rtol: float = 1e-9) -> VerificationReport:
    params = _params(u, params)
    if not u.is_monotone:
        raise VerificationError("Hardy chain needs a non-increasing profile")
    lhs, rhs, pref = hardy_chain_sides(u, params)
    dig = profile_digest(u, "hardy")
    if not math.isfinite(lhs):
        return VerificationReport("hardy_chain", dig, {"lhs": lhs, "rhs": rhs}, {}, rtol, "informational",
                                  notes=["divergent left side"])
    margin = lhs / rhs - 1.0 if rhs > 0 else math.inf
    ok = lhs >= rhs * (1 - rtol)
    return VerificationReport("hardy_chain", dig, {"lhs": lhs, "rhs": rhs, "prefactor": pref, "margin": margin},
                              {"lhs_minus_rhs": ">= 0"}, rtol, "pass" if ok else "fail", 0.0,
                              [{"parameter": "hardy", "measured": lhs, "target": rhs, "margin": margin}])


# -- summability scaling ---------------------------------------------------------------------------

def summability_exponent(params, r: float) -> float:
    N, p, s = params.N, params.p, params.s
    return N * (p - 1) * r / (N - p * s * r)


def lebesgue_norm_of_operator(u: RadialProfile, params, r: float, *, block: int = 800) -> float:
    """||(-Delta_p)^s u||_{L^r} by pointwise evaluation on double-exponential cell rules."""
    x, w = fn.outer_points(u.grid)
    vals = np.empty_like(x)
    for i0 in range(0, x.size, block):
        vals[i0:i0 + block] = fn.frac_p_laplacian_at(u, x[i0:i0 + block], params)[0]
    if not np.all(np.isfinite(vals)):
        raise fn.FunctionalError("fractional p-Laplacian is not finite on the outer quadrature points")
    return fn.integrate_radial(u.dim, x, w, np.abs(vals) ** r) ** (1.0 / r)


def summability_ratio(u: RadialProfile, params, r: float) -> float:
    t = summability_exponent(params, r)
    return fn.weighted_norm(u, 0.0, t) / lebesgue_norm_of_operator(u, params, r) ** (1.0 / (params.p - 1.0))


def summability_scale_check(u: RadialProfile, params=None, r: float = 1.2, *,
                            scalings=((2.0, 1.0), (1.0, 2.0), (3.0, 0.5)), tol: float = 0.02) -> VerificationReport:
    params = _params(u, params)
    if not 1 < r < params.N / params.ps:
        raise VerificationError("need 1 < r < N/(ps)")
    t = summability_exponent(params, r)
    try:
        base = summability_ratio(u, params, r)
    except fn.FunctionalError as exc:
        return VerificationReport("summability_scale", profile_digest(u, r), {}, {}, tol, "informational",
                                  notes=[str(exc)])
    rows, ratios = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for lam, mu in scalings:
            v = dilate_scale(u, lam, mu)
            try:
                rho = summability_ratio(v, params, r)
            except fn.FunctionalError as exc:
                return VerificationReport("summability_scale", profile_digest(u, r), {"base_ratio": base}, {}, tol,
                                          "informational", notes=[str(exc)])
            ratios.append(rho)
            rows.append({"parameter": f"({lam:g},{mu:g})", "measured": rho, "target": base,
                         "margin": tol - abs(rho / base - 1)})
    dev = max(abs(x / base - 1) for x in ratios)
    return VerificationReport("summability_scale", profile_digest(u, r, scalings),
                              {"t": t, "base_ratio": base, "ratios": ratios, "max_deviation": dev},
                              {"deviation": 0.0}, tol, "pass" if dev <= tol else "fail", 0.0, rows)


# -- Besov regularity ------------------------------------------------------------------------------

def besov_exponents(params, r: float | None = None) -> tuple:
    """(theta, sigma) with t = inf and r = (p*)' by default."""
    p, s = params.p, params.s
    if not p > 1:
        raise VerificationError("p must exceed 1")
    r = params.pstar / (params.pstar - 1.0) if r is None else r
    r_conj = r / (r - 1.0)
    theta = p / r_conj
    sigma = s * p / (p - theta) if p >= 2 else 2 * s / (2 - theta)
    return theta, sigma


def besov_regularity_check(u: RadialProfile, params=None, *, h_range=(1e-3, 1.0), per_decade: int = 8,
                           factor: float = 10.0) -> VerificationReport:
    """sup_h ||delta_h^2 u||_p / h^sigma over decades of h: bounded growth toward small h."""
    params = _params(u, params)
    theta, sigma = besov_exponents(params)
    lo, hi = h_range
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    h = np.geomspace(lo, hi, n)
    curve = fn.besov_curve(u, sigma, params.p, h)
    top = float(np.max(curve[h >= hi / 10])) if np.any(curve) else 0.0
    growth = float(np.max(curve) / top) if top > 0 else 1.0
    rows = [{"parameter": float(a), "measured": float(c), "target": math.nan, "margin": math.nan} for a, c in zip(h, curve)]
    ok = growth < factor
    return VerificationReport("besov_regularity", profile_digest(u, "besov"),
                              {"theta": theta, "sigma": sigma, "sup": float(np.max(curve)), "growth": growth},
                              {"growth_max": factor}, factor, "pass" if ok else "fail", 0.0, rows)


# -- extremal equation ---------------------------------------------------------------------------

def extremal_ratio(u: RadialProfile, params=None, window=(0.1, 10.0), *, n: int = 4):
    """Cell means of (-Delta_p)^s u over cell means of u^{p*-1} for the cells inside the window.

    Returns (cell mid-radii, ratios); a constant ratio means u solves the critical equation.
    """
    params = _params(u, params)
    x = u.nodes
    lo, hi = window
    cells = np.nonzero((x[:-1] >= lo) & (x[1:] <= hi))[0]
    if cells.size == 0:
        raise VerificationError("no grid cell inside the window")
    k, pts, w, fmean = fn.frac_p_laplacian_cell_means(u, params, n=n, cells=cells)
    gmean = (u.evaluate(pts) ** (params.pstar - 1.0)) @ w
    return np.sqrt(x[k] * x[k + 1]), fmean / gmean


def ratio_spread(ratios) -> float:
    ratios = np.asarray(ratios)
    return float(ratios.max() / ratios.min() - 1.0)


# -- monotonicity -----------------------------------------------------------------------------------

def monotonicity_check(u: RadialProfile, params=None) -> VerificationReport:
    inc = np.diff(u.values)
    worst = float(inc.max()) if inc.size else 0.0
    ok = worst <= 0 and np.all(u.values >= 0)
    return VerificationReport("monotonicity", profile_digest(u, "mono"), {"max_increase": worst},
                              {"max_increase": 0.0}, 0.0, "pass" if ok else "fail")


# -- product rule --------------------------------------------------------------------------------------

def product_rule_check(v: RadialProfile, w: RadialProfile, s: float, p: float) -> VerificationReport:
    lhs, rhs = fn.product_rule_sides(v, w, s, p)
    ok = lhs <= rhs * (1 + 1e-9)
    return VerificationReport("product_rule", profile_digest(v, profile_digest(w)), {"lhs": lhs, "rhs": rhs},
                              {"lhs_le_rhs": True}, 1e-9, "pass" if ok else "fail")


# -- registry ------------------------------------------------------------------------------------------

def _gamma_sweep_default(u, params, **kw):
    # one exponent below the threshold (which is always < p) and gamma = p
    gammas = kw.pop("gammas", None) or [round(params.gamma_threshold * 5 / 6, 6), params.p]
    return gamma_sweep(u, params, gammas, **kw)


def _dyadic_default(u, params, **kw):
    gamma = kw.pop("gamma", params.p)
    return dyadic_layer_check(u, gamma, params, **kw)


CHECKS = {
    "monotonicity": lambda u, params, **kw: monotonicity_check(u, params),
    "decay": lambda u, params, **kw: decay_check(u, params, **kw),
    "gamma_sweep": _gamma_sweep_default,
    "dyadic_layers": _dyadic_default,
    "hardy_chain": lambda u, params, **kw: hardy_chain_check(u, params, **kw),
    "summability_scale": lambda u, params, **kw: summability_scale_check(u, params, **kw),
    "besov_regularity": lambda u, params, **kw: besov_regularity_check(u, params, **kw),
}

DEFAULT_CHECKS = ("monotonicity", "decay", "gamma_sweep", "dyadic_layers", "hardy_chain",
                  "summability_scale", "besov_regularity")


def run_checks(u: RadialProfile, params, names=DEFAULT_CHECKS, overrides: dict | None = None) -> list:
    overrides = overrides or {}
    reports = []
    for name in names:
        if name not in CHECKS:
            raise VerificationError(f"unknown check {name!r}")
        kw = dict(overrides.get(name, {}))
        if name != "monotonicity" and not u.is_monotone:
            reports.append(VerificationReport(name, profile_digest(u), {}, {}, 0.0, "informational",
                                              notes=["skipped: profile is not non-increasing"]))
            continue
        reports.append(CHECKS[name](u, params, **kw))
    return reports

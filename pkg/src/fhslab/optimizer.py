"""Projected-gradient minimization of the Rayleigh quotient over radial non-increasing profiles."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import _weighted_power, seminorm_power_grad
from .params import ProblemParams
from .profiles import (
    Grid,
    ProfileError,
    RadialProfile,
    candidate_extremal,
    cell_measures,
    dilate_scale,
    monotone_projection,
)


class OptimizerError(ValueError):
    pass


@dataclass
class MinimizeOptions:
    max_iter: int = 3000
    tol: float = 1e-8
    window: int = 50
    pin_every: int = 25
    armijo: float = 1e-4
    max_backtrack: int = 40
    level: float = 1.0  # constraint ||u||_{alpha,q}^q = level
    seed: int = 0


@dataclass
class TraceRow:
    iteration: int
    rayleigh: float
    step: float
    projection_distance: float
    event: str = "step"  # "step" or "pin"


@dataclass
class MinimizerResult:
    profile: RadialProfile
    I1_estimate: float
    rayleigh: float
    trace: list
    normalization: dict
    converged: bool
    iterations: int
    params: ProblemParams
    level: float = 1.0
    messages: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "I1_estimate": self.I1_estimate,
            "rayleigh": self.rayleigh,
            "level": self.level,
            "converged": self.converged,
            "iterations": self.iterations,
            "normalization": self.normalization,
            "messages": self.messages,
            "profile": self.profile.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "R", "step", "projection_distance", "event"])
        for row in self.trace:
            w.writerow([row.iteration, repr(row.rayleigh), repr(row.step), repr(row.projection_distance), row.event])
        return buf.getvalue()


# -- objective ------------------------------------------------------------------------

def discrete_gradient(u: RadialProfile, params: ProblemParams | None = None, values=None) -> np.ndarray:
    """Exact gradient of the discretized [u]_{s,p}^p in the node values (tail block included)."""
    params = params or u.params
    return seminorm_power_grad(u, params.s, params.p, values)[1]


def constraint_gradient(u: RadialProfile, params: ProblemParams | None = None, values=None) -> np.ndarray:
    """Exact gradient of the discretized int |u|^q |x|^{-alpha} dx."""
    params = params or u.params
    return _weighted_power(u, params.alpha, params.q, values, grad=True)[1]


def _objective(u, params, v):
    J, gJ = seminorm_power_grad(u, params.s, params.p, v)
    H, gH = _weighted_power(u, params.alpha, params.q, v, grad=True)
    e = params.p / params.q
    R = J / H**e
    gR = (gJ - e * (J / H) * gH) / H**e
    return R, gR, J, H


def _rescale(v, u, params, level):
    H = _weighted_power(u, params.alpha, params.q, v)[0]
    return v * (level / H) ** (1.0 / params.q)


def normalize(u: RadialProfile, params: ProblemParams | None = None, *, level: float = 1.0) -> RadialProfile:
    """Dilate so that u(1) = u(0)/2, then scale so that ||u||_{alpha,q}^q = level."""
    params = params or u.params
    if params is None:
        raise OptimizerError("parameters required")
    try:
        rh = u.half_height_radius()
    except ProfileError as exc:
        raise OptimizerError(f"cannot normalize: {exc}") from exc
    v = u if math.isclose(rh, 1.0, rel_tol=1e-13) else dilate_scale(u, 1.0, rh)
    # the dilated profile's half-height radius is 1 up to the resampling; pin it exactly
    v = _pin_half(v)
    vals = _rescale(v.values, v, params, level)
    return v.with_values(vals)


def _pin_half(u: RadialProfile) -> RadialProfile:
    """Adjust the node values bracketing r = 1 so that the interpolant takes u(0)/2 there."""
    x = u.nodes
    vals = np.array(u.values)
    k = int(np.searchsorted(x, 1.0))
    target = 0.5 * vals[0]
    if math.isclose(x[k], 1.0, rel_tol=1e-12):
        vals[k] = target
        vals[:k] = np.maximum(vals[:k], target)
        vals[k + 1:] = np.minimum(vals[k + 1:], target)
    else:
        a, b = x[k - 1], x[k]
        t = (1.0 - a) / (b - a)
        cur = (1 - t) * vals[k - 1] + t * vals[k]
        shift = target - cur
        vals[k - 1] += shift
        vals[k] += shift
        vals[: k - 1] = np.maximum(vals[: k - 1], vals[k - 1])
        vals[k + 1:] = np.minimum(vals[k + 1:], vals[k])
    return u.with_values(np.clip(vals, 0.0, None))


# -- initial guesses ------------------------------------------------------------------------

def initial_profile(params: ProblemParams, grid: Grid, init="extremal-guess", seed: int = 0) -> RadialProfile:
    if isinstance(init, RadialProfile):
        if init.grid != grid:
            return RadialProfile(grid, init.evaluate_smooth(grid.nodes), params.decay_exp, params.N, "linear", params)
        return init.with_values(init.values, params=params, tail_exponent=params.decay_exp)
    r = grid.nodes
    if init == "extremal-guess":
        return candidate_extremal(params, grid)
    if init == "gaussian-like":
        vals = np.exp(-0.5 * r**2) + 1e-3 * (1.0 + r) ** (-params.decay_exp)
    elif init == "random":
        rng = np.random.default_rng(seed)
        # positive noise modulating a decaying envelope, then made monotone
        env = (1.0 + r) ** (-params.decay_exp)
        vals = env * (0.5 + rng.random(r.size))
        vals = np.maximum.accumulate(vals[::-1])[::-1]
    else:
        raise OptimizerError(f"unknown init {init!r}")
    return RadialProfile(grid, vals, params.decay_exp, params.N, "linear", params)


# -- main loop ---------------------------------------------------------------------------------

def minimize(params: ProblemParams, init="extremal-guess", opts: MinimizeOptions | None = None,
             grid: Grid | None = None, callback=None) -> MinimizerResult:
    """Projected gradient descent on the Rayleigh quotient.

    Each step: preconditioned gradient step (Barzilai-Borwein length, Armijo
    backtracking), clamp to >= 0, weighted monotone projection, rescale to the
    constraint level.  Every ``pin_every`` steps the profile is dilated so that
    u(1) = u(0)/2.  The metric weights node k by its cell measure times r_k^{-ps},
    which puts all length scales of the geometric grid on the same footing.
    """
    opts = opts or MinimizeOptions()
    if not params.minimization_mode:
        raise OptimizerError("parameters are not in minimization mode (need alpha < p*s, q > p)")
    grid = grid or (init.grid if isinstance(init, RadialProfile) else Grid())
    u = initial_profile(params, grid, init, opts.seed)
    x = grid.nodes
    mass = cell_measures(grid, params.N)
    rbar = np.maximum(x, x[1])
    metric = mass * rbar ** (-params.ps)
    metric = metric / metric.max()
    precond = 1.0 / metric

    def project(v):
        v = np.clip(v, 0.0, None)
        v = monotone_projection(v, metric)
        return v

    def finish(v):
        return _rescale(v, u, params, opts.level)

    v = finish(project(u.values))
    R, g, J, H = _objective(u, params, v)
    trace = [TraceRow(0, R, 0.0, 0.0, "init")]
    messages = []
    step = None
    v_prev = g_prev = None
    history = [R]
    converged = False
    pins = 0
    it = 0
    for it in range(1, opts.max_iter + 1):
        d = -precond * g
        if step is None:
            step = 1e-2 * np.sqrt(np.sum(metric * v**2) / max(np.sum(metric * d**2), 1e-300))
        elif v_prev is not None:
            sv = v - v_prev
            yv = g - g_prev
            sy = float(sv @ yv)
            if sy > 0:
                step = float(np.sum(metric * sv**2) / sy)
        accepted = False
        trial_step = step
        for _ in range(opts.max_backtrack):
            raw = v + trial_step * d
            proj = project(raw)
            w = finish(proj)
            R_new, g_new, J_new, H_new = _objective(u, params, w)
            slope = float(g @ (w - v))
            if slope < 0 and R_new <= R + opts.armijo * slope:
                accepted = True
                break
            trial_step *= 0.5
        if not accepted:
            # no feasible descent left at the resolution of the line search
            messages.append(f"line search stalled at iteration {it}")
            converged = True
            break
        pdist = float(np.sqrt(np.sum(metric * (raw - proj) ** 2)))
        v_prev, g_prev = v, g
        v, g, R, J, H = w, g_new, R_new, J_new, H_new
        step = trial_step
        trace.append(TraceRow(it, R, trial_step, pdist))
        history.append(R)
        if callback is not None:
            callback(it, R)
        if opts.pin_every and it % opts.pin_every == 0:
            pinned = _pin_dilation(u.with_values(v), params, opts.level)
            if pinned is not None:
                v = pinned
                R, g, J, H = _objective(u, params, v)
                v_prev = g_prev = None
                pins += 1
                trace.append(TraceRow(it, R, 0.0, 0.0, "pin"))
        if _window_converged(history, opts):
            converged = True
            break
    if not converged:
        messages.append(f"no convergence after {opts.max_iter} iterations")
    prof = u.with_values(v)
    half = prof.half_height_radius() if prof.values[0] > 0 else math.nan
    norm = {
        "constraint": "||u||_{alpha,q}^q",
        "level": opts.level,
        "achieved": float(H),
        "dilation_pin": {"radius": 1.0, "every": opts.pin_every, "applied": pins, "half_height_radius": half},
    }
    return MinimizerResult(prof, float(J), float(R), trace, norm, converged, it, params, opts.level, messages)


def _window_converged(history, opts) -> bool:
    if len(history) <= opts.window:
        return False
    old, new = history[-opts.window - 1], history[-1]
    return abs(old - new) <= opts.tol * abs(new)


def _pin_dilation(u: RadialProfile, params, level):
    try:
        rh = u.half_height_radius()
    except ProfileError:
        return None
    if math.isclose(rh, 1.0, rel_tol=1e-6):
        return None
    if not (u.grid.r_min * 10 < rh < u.r_max / 10):
        return None
    v = dilate_scale(u, 1.0, rh)
    if v.grid != u.grid:
        return None
    v = _pin_half(v)
    vals = np.maximum.accumulate(np.clip(v.values, 0, None)[::-1])[::-1]
    return _rescale(vals, u, params, level)

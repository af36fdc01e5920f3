"""Radial profiles on geometric grids, plus the constructors used throughout.

A profile stores node values u_0..u_M on r_0 = 0 < r_1 < ... < r_M and extends
beyond r_M by the power law u_M (r/r_M)^(-kappa).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import isotonic_regression

from .params import ProblemParams, make_params

PROFILE_SCHEMA = "fhs-profile/1"
MODES = ("linear", "constant")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Nodes r_0 = 0 and r_k = r_min (r_max/r_min)^((k-1)/(M-1)), k = 1..M."""

    r_min: float = 1e-3
    r_max: float = 1e4
    M: int = 512

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ProfileError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.M < 8:
            raise ProfileError(f"M too small: {self.M}")

    @cached_property
    def nodes(self) -> np.ndarray:
        k = np.arange(self.M, dtype=float)
        r = np.empty(self.M + 1)
        r[0] = 0.0
        r[1:] = self.r_min * (self.r_max / self.r_min) ** (k / (self.M - 1))
        r[1] = self.r_min
        r[-1] = self.r_max
        r.setflags(write=False)
        return r

    @property
    def log_step(self) -> float:
        return math.log(self.r_max / self.r_min) / (self.M - 1)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_step)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.r_min, self.r_max, (self.M - 1) * factor + 1)

    def to_dict(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "M": self.M}


def dyadic_grid(lo_exp: int = -10, hi_exp: int = 14, per_octave: int = 22) -> Grid:
    """Geometric grid on which every power of two in [2^lo, 2^hi] is a node."""
    return Grid(2.0**lo_exp, 2.0**hi_exp, (hi_exp - lo_exp) * per_octave + 1)


def cell_measures(grid: Grid, N: int) -> np.ndarray:
    """Measure in R^N of the dual cell around each node (hat-function mass)."""
    r = grid.nodes
    edges = np.concatenate([[0.0], 0.5 * (r[1:] + r[:-1]), [r[-1]]])
    vol = edges[1:] ** N - edges[:-1] ** N
    from .params import sphere_area

    return sphere_area(N) / N * vol


@dataclass(frozen=True, eq=False)
class RadialProfile:
    grid: Grid
    values: np.ndarray
    tail_exponent: float
    dim: int
    mode: str = "linear"
    params: ProblemParams | None = field(default=None, compare=False)
    signed: bool = False  # sampled operator outputs may change sign
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.M + 1,):
            raise ProfileError(f"expected {self.grid.M + 1} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ProfileError("profile values must be finite")
        if not self.signed and np.any(v < 0):
            raise ProfileError("profile values must be nonnegative")
        # kappa = 0 is the flat continuation, allowed only for functions constant on all space
        if not (self.tail_exponent > 0 or (self.tail_exponent == 0 and np.ptp(v) == 0)):
            raise ProfileError(f"tail exponent must be positive, got {self.tail_exponent}")
        if self.mode not in MODES:
            raise ProfileError(f"mode must be one of {MODES}, got {self.mode!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def r_max(self) -> float:
        return self.grid.r_max

    @property
    def tail_value(self) -> float:
        return float(self.values[-1])

    @property
    def tail_coefficient(self) -> float:
        return self.tail_value * self.r_max**self.tail_exponent

    @property
    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def with_values(self, values, **changes) -> "RadialProfile":
        kw = dict(grid=self.grid, values=values, tail_exponent=self.tail_exponent,
                  dim=self.dim, mode=self.mode, params=self.params, signed=self.signed)
        kw.update(changes)
        return RadialProfile(**kw)

    def evaluate(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ProfileError("radii must be nonnegative")
        x = self.nodes
        out = np.empty_like(r)
        inside = r <= x[-1]
        if self.mode == "linear":
            out[inside] = np.interp(r[inside], x, self.values)
        else:
            k = np.clip(np.searchsorted(x, r[inside], side="right") - 1, 0, len(x) - 1)
            out[inside] = self.values[k]
        rt = r[~inside]
        out[~inside] = self.tail_value * (rt / x[-1]) ** (-self.tail_exponent)
        return out

    def __call__(self, r):
        return self.evaluate(r)

    def evaluate_smooth(self, r) -> np.ndarray:
        """Shape-preserving cubic (in log r) reconstruction; used for resampling."""
        if self.mode == "constant":
            return self.evaluate(r)
        r = np.asarray(r, dtype=float)
        x = self.nodes
        out = self.evaluate(r)
        mid = (r > x[1]) & (r < x[-1])
        if np.any(mid):
            f = PchipInterpolator(np.log(x[1:]), self.values[1:])
            out[mid] = f(np.log(r[mid]))
        return out

    def half_height_radius(self) -> float:
        """Smallest radius where the profile falls to half its value at 0."""
        target = 0.5 * self.values[0]
        v = self.values
        below = np.nonzero(v <= target)[0]
        if v[0] <= 0:
            raise ProfileError("profile vanishes at the origin")
        if below.size == 0:
            if self.tail_value <= 0 or self.tail_exponent == 0:
                raise ProfileError("profile has no half-height crossing")
            return float(self.r_max * (target / self.tail_value) ** (-1.0 / self.tail_exponent))
        k = int(below[0])
        x = self.nodes
        if self.mode == "constant" or v[k - 1] == v[k]:
            return float(x[k])
        t = (v[k - 1] - target) / (v[k - 1] - v[k])
        return float(x[k - 1] + t * (x[k] - x[k - 1]))

    # -- persistence -------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema": PROFILE_SCHEMA,
            "params": self.params.to_dict() if self.params is not None else None,
            "dim": self.dim,
            "grid": self.grid.to_dict(),
            "nodes": self.nodes.tolist(),
            "values": self.values.tolist(),
            "tail_exponent": self.tail_exponent,
            "mode": self.mode,
            "signed": self.signed,
            "meta": self.meta,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_dict(cls, d: dict) -> "RadialProfile":
        if d.get("schema") != PROFILE_SCHEMA:
            raise ProfileError(f"unsupported profile schema {d.get('schema')!r}")
        params = ProblemParams.from_dict(d["params"]) if d.get("params") else None
        g = d.get("grid")
        nodes = np.asarray(d["nodes"], dtype=float)
        grid = Grid(float(g["r_min"]), float(g["r_max"]), int(g["M"])) if g else Grid(nodes[1], nodes[-1], len(nodes) - 1)
        if grid.nodes.shape != nodes.shape or not np.allclose(grid.nodes, nodes, rtol=1e-12, atol=0):
            raise ProfileError("nodes do not match a geometric grid")
        mode = {"linear": "linear", "piecewise-linear": "linear", "constant": "constant",
                "piecewise-constant": "constant"}[d.get("mode", "linear")]
        dim = int(d.get("dim") or (params.N if params else 0))
        if dim < 1:
            raise ProfileError("profile dimension missing")
        return cls(grid, np.asarray(d["values"], float), float(d["tail_exponent"]), dim, mode, params,
                   bool(d.get("signed", False)), dict(d.get("meta") or {}))

    @classmethod
    def from_json(cls, path_or_text) -> "RadialProfile":
        text = str(path_or_text)
        if not text.lstrip().startswith("{"):
            text = Path(path_or_text).read_text()
        return cls.from_dict(json.loads(text))


# -- constructors ------------------------------------------------------------

def from_function(func, grid: Grid, dim: int, tail_exponent: float, *, params=None,
                  mode: str = "linear") -> RadialProfile:
    return RadialProfile(grid, func(grid.nodes), tail_exponent, dim, mode, params)


def candidate_extremal(params: ProblemParams, grid: Grid | None = None) -> RadialProfile:
    """Sample U(r) = (1 + r^a)^(-b), a = (p - alpha/s)/(p-1), b = (N - sp)/(p - alpha/s)."""
    grid = grid or Grid()
    N, p, s, alpha = params.N, params.p, params.s, params.alpha
    if not alpha < p * s:
        raise ProfileError("candidate extremal needs alpha < p*s")
    c = p - alpha / s
    a = c / (p - 1)
    b = (N - s * p) / c
    r = grid.nodes
    vals = np.exp(-b * np.log1p(r**a))
    return RadialProfile(grid, vals, params.decay_exp, N, "linear", params)


def extremal_function(params: ProblemParams):
    c = params.p - params.alpha / params.s
    a = c / (params.p - 1)
    b = (params.N - params.s * params.p) / c
    return lambda r: np.exp(-b * np.log1p(np.asarray(r, float) ** a))


def indicator(grid: Grid, dim: int, radius: float = 1.0, tail_exponent: float = 1.0) -> RadialProfile:
    """Piecewise-constant indicator of the ball B_radius (radius must be a node)."""
    x = grid.nodes
    k = int(np.argmin(np.abs(x - radius)))
    if not math.isclose(x[k], radius, rel_tol=1e-9):
        raise ProfileError(f"radius {radius} is not a grid node")
    vals = (np.arange(len(x)) < k).astype(float)
    return RadialProfile(grid, vals, tail_exponent, dim, "constant")


def tent(grid: Grid, dim: int, radius: float = 1.0, tail_exponent: float = 1.0) -> RadialProfile:
    """(1 - r/radius)_+ sampled at the nodes; exact when radius is a node."""
    vals = np.clip(1.0 - grid.nodes / radius, 0.0, None)
    return RadialProfile(grid, vals, tail_exponent, dim, "linear")


def dilate_scale(u: RadialProfile, lam: float, mu: float) -> RadialProfile:
    """v(r) = lam * u(mu * r), resampled on the grid of u (tail exponent kept)."""
    if not (lam > 0 and mu > 0):
        raise ProfileError("lambda and mu must be positive")
    grid = u.grid
    if u.values[0] > 0 and u.mode == "linear":
        try:
            rh = u.half_height_radius() / mu
        except ProfileError:
            rh = None
        if rh is not None and rh < 10 * grid.r_min:
            new_min = rh / 10
            extra = math.ceil(math.log(grid.r_min / new_min) / grid.log_step)
            grid = Grid(grid.r_min * grid.ratio ** (-extra), grid.r_max, grid.M + extra)
            warnings.warn(f"dilation by mu={mu:g} resolves below r_min; grid refined to r_min={grid.r_min:.3g}",
                          RuntimeWarning, stacklevel=2)
    if mu == 1.0 and grid is u.grid:
        vals = lam * u.values
    else:
        vals = lam * u.evaluate_smooth(mu * grid.nodes)
    return RadialProfile(grid, vals, u.tail_exponent, u.dim, u.mode, u.params)


def monotone_projection(values, weights) -> np.ndarray:
    """Weighted least-squares projection onto non-increasing sequences (PAVA)."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0:
        return values.copy()
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    res = isotonic_regression(values, weights=weights, increasing=False)
    return np.asarray(res.x, dtype=float)


@dataclass(frozen=True)
class LayerDecomposition:
    layers: tuple
    base_heights: np.ndarray
    truncation_index: int
    remainder: float

    def partial_sum(self, upto: int | None = None) -> np.ndarray:
        upto = self.truncation_index if upto is None else upto
        return np.sum([lay.values for lay in self.layers[: upto + 1]], axis=0)


def default_truncation(u: RadialProfile, rel: float = 1e-10) -> int:
    imax = int(math.floor(math.log2(u.r_max) + 1e-12))
    u0 = u.values[0]
    for i in range(0, imax + 1):
        if u.evaluate(np.array([2.0**i]))[0] < rel * u0:
            return i
    return imax


def layer_cake_decompose(u: RadialProfile, K: int | None = None) -> LayerDecomposition:
    """Horizontal dyadic slices u_0 = (u - u(1))_+, u_i = min(u(2^{i-1}) - u(2^i), (u - u(2^i))_+)."""
    if not u.is_monotone:
        raise ProfileError("layer-cake decomposition needs a non-increasing profile")
    if K is None:
        K = default_truncation(u)
    K = int(K)
    if K < 0:
        raise ProfileError("K must be nonnegative")
    if 2.0**K > u.r_max * (1 + 1e-12):
        raise ProfileError(f"2^K = {2.0 ** K:g} exceeds the grid extent r_max = {u.r_max:g}")
    heights = u.evaluate(2.0 ** np.arange(-1, K + 1))  # u(2^{-1}), u(1), ..., u(2^K)
    v = u.values
    layers = []
    for i in range(K + 1):
        lower = heights[i + 1]
        slab = np.clip(v - lower, 0.0, None)
        if i > 0:
            slab = np.minimum(heights[i] - lower, slab)
        layers.append(u.with_values(slab))
    return LayerDecomposition(tuple(layers), heights[:-1].copy(), K, float(heights[-1]))

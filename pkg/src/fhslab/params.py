"""Problem parameters (N, p, s, alpha) and the exponents derived from them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

SUPPORTED_DIMS = (1, 2, 3, 4)


class ParameterError(ValueError):
    """Raised when (N, p, s, alpha) violate the admissibility constraints."""


@dataclass(frozen=True)
class ProblemParams:
    N: int
    p: float
    s: float
    alpha: float
    q: float = field(init=False)
    pstar: float = field(init=False)
    decay_exp: float = field(init=False)
    gamma_threshold: float = field(init=False)
    evaluation_only: bool = field(init=False)

    def __post_init__(self):
        N, p, s, alpha = self.N, self.p, self.s, self.alpha
        set_ = object.__setattr__
        set_(self, "q", p * (N - alpha) / (N - p * s))
        set_(self, "pstar", N * p / (N - p * s))
        set_(self, "decay_exp", (N - p * s) / (p - 1))
        set_(self, "gamma_threshold", N * (p - 1) / (N - s))
        set_(self, "evaluation_only", bool(math.isclose(alpha, p * s, rel_tol=0, abs_tol=1e-14)))

    @property
    def ps(self) -> float:
        return self.p * self.s

    @property
    def sphere_area(self) -> float:
        return sphere_area(self.N)

    @property
    def minimization_mode(self) -> bool:
        return not self.evaluation_only and self.q > self.p

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemParams":
        return make_params(int(d["N"]), float(d["p"]), float(d["s"]), float(d["alpha"]))


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^{N-1} in R^N (|S^0| = 2)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def make_params(N: int, p: float, s: float, alpha: float = 0.0) -> ProblemParams:
    """Validate (N, p, s, alpha) and build the derived exponents.

    ``alpha == p*s`` is accepted but flagged ``evaluation_only``: then q = p and
    the minimization problem has no optimizer.
    """
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if N not in SUPPORTED_DIMS:
        raise ParameterError(f"only N in {SUPPORTED_DIMS} is supported, got {N}")
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")
    if not 0 < s < 1:
        raise ParameterError(f"s must lie in ]0,1[, got {s}")
    if not N > p * s:
        raise ParameterError(f"need N > p*s, got N={N}, p*s={p * s:g}")
    tol = 1e-14
    if alpha < 0 or alpha > p * s + tol:
        raise ParameterError(f"alpha must lie in [0, p*s] = [0, {p * s:g}], got {alpha}")
    if abs(alpha - p * s) <= tol:
        alpha = p * s
    return ProblemParams(N, float(p), float(s), float(alpha))

"""Angular kernel for the radial reduction of |x - y|^{-(N+beta)}.

For radial functions,

    int_{R^N} int_{R^N} F(u(|x|), u(|y|)) |x-y|^{-(N+beta)} dx dy
        = |S^{N-1}| int_0^inf int_0^inf F(u(r), u(rho)) K(r, rho) (r rho)^{N-1} dr drho

with K(r, rho) = int_{S^{N-1}} |r e - rho w|^{-(N+beta)} dsigma(w).  Near the
diagonal K ~ |r - rho|^{-(1+beta)}, so the code works with the regular part

    V(r, rho) = K(r, rho) |r - rho|^{1+beta} (r rho)^{N-1},

which is bounded and smooth up to r = rho.  For N >= 2 the Euler integral
representation plus a Pfaff transformation gives

    V = C_N (r rho / (r + rho))^{N-1} 2F1(N-1-nu, (N-1)/2; N-1; 4 r rho/(r+rho)^2),

nu = (N+beta)/2, C_N = |S^{N-2}| 2^{N-2} B((N-1)/2, (N-1)/2).  The series
argument stays in [0, 1] and c - a - b = (1+beta)/2 > 0, so 2F1 is finite on
the diagonal.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate, special

from .params import sphere_area

TABLE_HEADER = struct.Struct("<idi")  # N, beta, M -> 16 bytes
MAX_TABLE_BYTES = 2 * 1024**3


class KernelError(ValueError):
    pass


def _check_beta(beta: float):
    if not 0 < beta < 2:
        raise KernelError(f"beta must lie in ]0,2[, got {beta}")


def _hyp_const(N: int) -> float:
    return sphere_area(N - 1) * 2.0 ** (N - 2) * special.beta((N - 1) / 2, (N - 1) / 2)


def _series(a, b, c, z, terms=None):
    if terms is None:
        # enough terms for z_max^n < 1e-17, plus slack for the early coefficient growth
        zmax = float(np.max(z)) if np.size(z) else 0.0
        terms = 8 if zmax < 1e-17 else min(90, int(math.ceil(-39.2 / math.log(zmax))) + 8)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        total = total + term
    return total


def _hyp(a, b, c, w):
    """2F1(a, b; c; w) on [0, 1]; near w = 1 the 1 - w connection formula is summed directly."""
    w_in = np.asarray(w, dtype=float)
    w = np.atleast_1d(w_in)
    out = np.empty_like(w)
    g = c - a - b
    near = w > 0.64
    if abs(g - round(g)) < 0.02:  # logarithmic case: leave it to scipy
        near[:] = False
    far = ~near
    if np.any(far):
        out[far] = special.hyp2f1(a, b, c, w[far])
    if np.any(near):
        z = 1.0 - w[near]
        gm = special.gamma
        c1 = gm(c) * gm(g) / (gm(c - a) * gm(c - b))
        c2 = gm(c) * gm(-g) / (gm(a) * gm(b))
        out[near] = c1 * _series(a, b, 1.0 - g, z) + c2 * z**g * _series(c - a, c - b, 1.0 + g, z)
    return out.reshape(w_in.shape)


def kernel_regular_part(N: int, beta: float, r, rho) -> np.ndarray:
    """V(r, rho) = K |r - rho|^{1+beta} (r rho)^{N-1}; finite at r = rho."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    ssum = r + rho
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(r - rho) / ssum
        if N == 1:
            out = 1.0 + ratio ** (1.0 + beta)
        elif N == 3:
            # 1 - ratio^(1+beta) without cancellation when one radius is much smaller
            m = np.minimum(r, rho) / np.maximum(r, rho)
            one_minus = -np.expm1((1.0 + beta) * (np.log1p(-m) - np.log1p(m)))
            out = 2.0 * math.pi * (r * rho) * one_minus / (1.0 + beta)
        else:
            nu = 0.5 * (N + beta)
            w = 1.0 - ratio**2  # = 4 r rho / (r + rho)^2, accurate near the diagonal
            w = np.clip(w, 0.0, 1.0)
            hyp = _hyp(N - 1 - nu, 0.5 * (N - 1), N - 1.0, w)
            out = _hyp_const(N) * (r * rho / ssum) ** (N - 1) * hyp
    return out


def angular_kernel(N: int, beta: float, r, rho):
    """K(r, rho) = int over the unit sphere of |r e - rho w|^{-(N+beta)}."""
    _check_beta(beta)
    r_a = np.asarray(r, dtype=float)
    rho_a = np.asarray(rho, dtype=float)
    if np.any(r_a <= 0) or np.any(rho_a <= 0):
        raise KernelError("radii must be positive")
    if np.any(r_a == rho_a):
        raise KernelError("K is singular on the diagonal r = rho; use the near-diagonal rules")
    return _kernel(N, beta, r_a, rho_a)


def _kernel(N, beta, r, rho):
    d = np.abs(r - rho)
    if N == 1:
        return d ** (-1.0 - beta) + (r + rho) ** (-1.0 - beta)
    return kernel_regular_part(N, beta, r, rho) * d ** (-1.0 - beta) / (r * rho) ** (N - 1)


def angular_kernel_adaptive(N: int, beta: float, r: float, rho: float) -> float:
    """Same quantity by adaptive quadrature in the polar angle (slow reference route).

    Uses u = (1 - cos theta)/2, so the integrand is ((r-rho)^2 + 4 r rho u)^{-nu}
    (4u(1-u))^{(N-3)/2}; the algebraic endpoint factors go to QUADPACK's 'alg'
    weight and the near-diagonal peak at u = 0 is split off geometrically.
    """
    _check_beta(beta)
    if r <= 0 or rho <= 0 or r == rho:
        raise KernelError("need positive, distinct radii")
    if N == 1:
        return float(abs(r - rho) ** (-1 - beta) + (r + rho) ** (-1 - beta))
    nu = 0.5 * (N + beta)
    lam = 0.5 * (N - 3)
    a = (r - rho) ** 2
    b = 4.0 * r * rho
    scale = max(a, b)

    def f(u):
        return ((a + b * u) / scale) ** (-nu)

    eps = a / b
    cuts = [0.0]
    c = eps
    while c < 0.5:
        cuts.append(c)
        c *= 8.0
    cuts += [0.5, 1.0]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if lo == 0.0:
            val, _ = integrate.quad(lambda u: f(u) * (1 - u) ** lam, lo, hi, weight="alg",
                                    wvar=(lam, 0.0), epsabs=0, epsrel=1e-13, limit=200)
        elif hi == 1.0:
            val, _ = integrate.quad(lambda u: f(u) * u**lam, lo, hi, weight="alg",
                                    wvar=(0.0, lam), epsabs=0, epsrel=1e-13, limit=200)
        else:
            val, _ = integrate.quad(lambda u: f(u) * (u * (1 - u)) ** lam, lo, hi,
                                    epsabs=0, epsrel=1e-13, limit=200)
        total += val
    return float(sphere_area(N - 1) * 2.0 * 4.0**lam * scale ** (-nu) * total)


@dataclass(frozen=True, eq=False)
class KernelTable:
    """K(r_i, r_j) on a set of radii; the diagonal holds V(r_i, r_i)."""

    N: int
    beta: float
    radii: np.ndarray
    entries: np.ndarray

    @property
    def M(self) -> int:
        return len(self.radii)

    @property
    def diagonal_model(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    def digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(TABLE_HEADER.pack(self.N, self.beta, self.M))
        h.update(np.ascontiguousarray(self.entries, dtype="<f8").tobytes())
        return h.hexdigest()

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(TABLE_HEADER.pack(self.N, float(self.beta), self.M))
            fh.write(np.ascontiguousarray(self.radii, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.entries, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path, *, N: int | None = None, beta: float | None = None, M: int | None = None) -> "KernelTable":
        raw = Path(path).read_bytes()
        if len(raw) < TABLE_HEADER.size:
            raise KernelError("truncated kernel table header")
        n, b, m = TABLE_HEADER.unpack_from(raw, 0)
        if N is not None and n != N:
            raise KernelError(f"kernel table dimension mismatch: file has N={n}, expected {N}")
        if beta is not None and b != beta:
            raise KernelError(f"kernel table beta mismatch: file has {b}, expected {beta}")
        if M is not None and m != M:
            raise KernelError(f"kernel table size mismatch: file has M={m}, expected {M}")
        expected = TABLE_HEADER.size + 8 * (m + m * m)
        if len(raw) != expected:
            raise KernelError(f"kernel table has {len(raw)} bytes, expected {expected}")
        radii = np.frombuffer(raw, dtype="<f8", count=m, offset=TABLE_HEADER.size).astype(float)
        entries = np.frombuffer(raw, dtype="<f8", count=m * m, offset=TABLE_HEADER.size + 8 * m)
        return cls(n, b, radii, entries.reshape(m, m).astype(float))


def kernel_matrix(N: int, beta: float, x, y) -> np.ndarray:
    """K(x_i, y_j) for all pairs; diagonal coincidences get V(x, x) instead."""
    x = np.asarray(x, float)[:, None]
    y = np.asarray(y, float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _kernel(N, beta, x, y)
    same = np.broadcast_to(x == y, out.shape)
    if np.any(same):
        xx = np.broadcast_to(x, out.shape)[same]
        out[same] = kernel_regular_part(N, beta, xx, xx)
    return out


def build_kernel_table(N: int, radii, beta: float, *, block: int = 256) -> KernelTable:
    """Dense table over the given (positive) radii, built in row blocks."""
    _check_beta(beta)
    radii = np.asarray(radii, dtype=float)
    radii = radii[radii > 0]
    m = len(radii)
    if 8 * m * m > MAX_TABLE_BYTES:
        suggested = int(math.sqrt(MAX_TABLE_BYTES / 8))
        raise KernelError(f"table with M={m} needs {8 * m * m / 2**30:.1f} GiB; use M <= {suggested}")
    entries = np.empty((m, m))
    for i0 in range(0, m, block):
        entries[i0:i0 + block] = kernel_matrix(N, beta, radii[i0:i0 + block], radii)
    entries.setflags(write=False)
    radii.setflags(write=False)
    return KernelTable(N, float(beta), radii, entries)

"""Independent closed-form references used across the test-suite."""

import math

import mpmath

from scipy import integrate, special

from fhslab.params import sphere_area


def frac_laplacian_constant(N, s):
    """C_{N,s} with (-Delta)^s u(x) = C_{N,s} p.v. int (u(x) - u(y)) |x - y|^{-N-2s} dy."""
    return 4**s * math.gamma(N / 2 + s) / (math.pi ** (N / 2) * abs(math.gamma(-s)))


def extremal_seminorm_p2(N, s):
    """[U]_{s,2}^2 for U = (1 + r^2)^{-(N-2s)/2}.

    (-Delta)^s U = c U^{(N+2s)/(N-2s)} with c = 2^{2s} Gamma((N+2s)/2)/Gamma((N-2s)/2), and
    int U (-Delta)^s U = (C_{N,s}/2) [U]^2.
    """
    c = 2 ** (2 * s) * math.gamma((N + 2 * s) / 2) / math.gamma((N - 2 * s) / 2)
    integral = c * sphere_area(N) * special.beta(N / 2, N / 2) / 2
    return 2 * integral / frac_laplacian_constant(N, s)


def extremal_ratio_p2(N, s):
    return 2 ** (2 * s) * math.gamma((N + 2 * s) / 2) / math.gamma((N - 2 * s) / 2)


def tent_seminorm_1d(s):
    """[(1 - |x|)_+]_{s,2}^2 on R via Plancherel: hat u(xi) = (sin(xi/2)/(xi/2))^2."""
    f = lambda xi: xi ** (2 * s) * (math.sin(xi / 2) / (xi / 2)) ** 4
    edges = [0.0] + [2 * math.pi * k for k in range(1, 400)]
    total = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12)[0] for a, b in zip(edges[:-1], edges[1:]))
    # beyond the last edge sin^4 is replaced by its mean 3/8 (relative error far below 1e-6)
    total += 16 * 0.375 * edges[-1] ** (2 * s - 3) / (3 - 2 * s)
    return 2 * (2 * total) / (2 * math.pi) / frac_laplacian_constant(1, s)


def indicator_seminorm_1d(ps):
    """[chi_(-1,1)]_{s,p}^p in 1-D: 2^{3-ps}/(ps(1-ps))."""
    return 2 ** (3 - ps) / (ps * (1 - ps))


def k1_oracle(beta, r, rho):
    # S^0 = {+1, -1}: |r - rho w|^{-(1+beta)} summed over both points
    return sum(abs(r - rho * w) ** (-1 - beta) for w in (1.0, -1.0))


def k3_oracle(beta, r, rho):
    # t = cos(theta): 2 pi int_{-1}^{1} (r^2 + rho^2 - 2 r rho t)^{-(3+beta)/2} dt, evaluated in
    # 40-digit arithmetic because the two terms cancel when r and rho are far apart
    with mpmath.workdps(40):
        r, rho, b = mpmath.mpf(r), mpmath.mpf(rho), mpmath.mpf(beta)
        val = 2 * mpmath.pi * (abs(r - rho) ** (-1 - b) - (r + rho) ** (-1 - b)) / ((1 + b) * r * rho)
    return float(val)

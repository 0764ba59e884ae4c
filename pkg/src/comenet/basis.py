"""Spherical Bessel / spherical harmonic basis expansions of the edge tuples.

TBF embeds (d, theta, phi): entry (l, m, n) = j_l(beta_ln * d / c) * Y_l^m(theta, phi).
SBF embeds (d, tau):        entry (l, n)    = j_l(beta_ln * d / c) * Y_l^0(tau).

beta_ln is the n-th positive root of the spherical Bessel function j_l, so
every radial factor vanishes at the cutoff c.  Harmonics are the real
orthonormal form with Condon-Shortley phase.  Y_l^0 depends on its argument
only through the cosine, which makes the SBF well defined (and even) for the
signed tau in (-pi, pi].
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, InvalidDegree, OutOfCutoff


def spherical_bessel_j(l, x):
    """j_l(x) for l >= 0, x >= 0; closed forms for l <= 2, recurrences above.

    Upward recurrence for x > l, downward (Miller) otherwise; j_l(0) = [l == 0].
    """
    if l < 0:
        raise InvalidDegree("order must be non-negative")
    x = float(x)
    if x < 1e-8:
        # leading series term x^l / (2l+1)!!
        if l == 0:
            return 1.0 - x * x / 6.0
        val = 1.0
        for s in range(1, l + 1):
            val *= x / (2 * s + 1)
        return val
    j0 = math.sin(x) / x
    if l == 0:
        return j0
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    if l == 1:
        return j1
    if l == 2:
        return (3.0 / (x * x) - 1.0) * j0 - 3.0 * math.cos(x) / (x * x)
    if x > l:
        prev, curr = j0, j1
        for order in range(1, l):
            prev, curr = curr, (2 * order + 1) / x * curr - prev
        return curr
    # downward (Miller) recurrence, normalized against the closed forms
    top = l + max(20, int(1.5 * l))
    arr = np.zeros(top + 2)
    arr[top + 1] = 0.0
    arr[top] = 1e-30
    for order in range(top, 0, -1):
        arr[order - 1] = (2 * order + 1) / x * arr[order] - arr[order + 1]
        if abs(arr[order - 1]) > 1e250:
            arr *= 1e-250
    # anchor on whichever closed form is better conditioned (never both ~0)
    if abs(j0) >= abs(j1):
        scale = j0 / arr[0]
    else:
        scale = j1 / arr[1]
    return float(arr[l] * scale)


def _bessel_derivative(l, x):
    """d/dx j_l(x) = j_{l-1}(x) - (l+1)/x * j_l(x)."""
    if l == 0:
        return -spherical_bessel_j(1, x)
    return spherical_bessel_j(l - 1, x) - (l + 1) / x * spherical_bessel_j(l, x)


def _refine_root(l, lo, hi, tol=1e-13, max_iter=200):
    """Bisection with Newton polish inside a sign-changing bracket."""
    flo = spherical_bessel_j(l, lo)
    fhi = spherical_bessel_j(l, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ConvergenceFailure(
            f"no sign change for j_{l} in bracket ({lo}, {hi})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = spherical_bessel_j(l, mid)
        if fmid == 0.0 or hi - lo < tol:
            lo = hi = mid
            break
        if flo * fmid < 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    root = 0.5 * (lo + hi)
    for _ in range(4):
        f = spherical_bessel_j(l, root)
        df = _bessel_derivative(l, root)
        if df == 0.0:
            break
        step = f / df
        root -= step
        if abs(step) < 1e-15 * root:
            break
    return root


@functools.lru_cache(maxsize=None)
def bessel_roots(L, N):
    """Table beta[l][n-1] of the first N positive roots of j_l for l < L.

    Roots of consecutive orders interlace, which supplies guaranteed brackets:
    beta_{l-1,n} < beta_{l,n} < beta_{l-1,n+1}.  j_0 roots are n*pi exactly.
    """
    if L < 1 or N < 1:
        raise ValueError("L and N must be >= 1")
    count0 = N + L  # extra roots at low orders feed the interlacing brackets
    rows = [[n * math.pi for n in range(1, count0 + 1)]]
    for l in range(1, L):
        prev = rows[l - 1]
        row = [
            _refine_root(l, prev[n], prev[n + 1]) for n in range(len(prev) - 1)
        ]
        rows.append(row)
    return tuple(tuple(row[:N]) for row in rows)


def _associated_legendre(l, m, x):
    """P_l^m(x) with Condon-Shortley phase, stable upward recurrence; 0 <= m <= l."""
    somx2 = math.sqrt(max(0.0, 1.0 - x * x))
    pmm = 1.0
    for s in range(1, m + 1):
        pmm *= -(2 * s - 1) * somx2
    if l == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pmmp1
    for ll in range(m + 2, l + 1):
        pmm, pmmp1 = pmmp1, ((2 * ll - 1) * x * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
    return pmmp1


def real_spherical_harmonic(l, m, theta, phi):
    """Real orthonormal spherical harmonic Y_l^m(theta, phi)."""
    if l < 0 or abs(m) > l:
        raise InvalidDegree(f"invalid (l, m) = ({l}, {m})")
    am = abs(m)
    norm = math.sqrt(
        (2 * l + 1) / (4 * math.pi) * math.factorial(l - am) / math.factorial(l + am)
    )
    plm = _associated_legendre(l, am, math.cos(theta))
    if m == 0:
        return norm * plm
    if m > 0:
        return math.sqrt(2.0) * norm * plm * math.cos(am * phi)
    return math.sqrt(2.0) * norm * plm * math.sin(am * phi)


@dataclass(frozen=True)
class BasisConfig:
    """Cutoff plus radial/spherical resolution of the basis expansions."""

    cutoff: float
    num_radial: int = 12
    num_spherical: int = 3

    def __post_init__(self):
        if self.cutoff <= 0 or self.num_radial < 1 or self.num_spherical < 1:
            raise ValueError("cutoff must be positive and N, L >= 1")

    @property
    def roots(self):
        return bessel_roots(self.num_spherical, self.num_radial)

    @property
    def tbf_size(self):
        return self.num_spherical**2 * self.num_radial

    @property
    def sbf_size(self):
        return self.num_spherical * self.num_radial


def _radial_factors(d, cfg: BasisConfig):
    if d > cfg.cutoff:
        raise OutOfCutoff(f"d = {d} exceeds cutoff {cfg.cutoff}")
    if d <= 0:
        raise ValueError("d must be positive")
    scaled = d / cfg.cutoff
    return [
        [spherical_bessel_j(l, beta * scaled) for beta in cfg.roots[l]]
        for l in range(cfg.num_spherical)
    ]


def tbf(d, theta, phi, cfg: BasisConfig):
    """TBF vector indexed (l, m, n), l-major, m in -l..l, n in 1..N."""
    radial = _radial_factors(d, cfg)
    out = np.empty(cfg.tbf_size)
    idx = 0
    for l in range(cfg.num_spherical):
        for m in range(-l, l + 1):
            y = real_spherical_harmonic(l, m, theta, phi)
            for n in range(cfg.num_radial):
                out[idx] = radial[l][n] * y
                idx += 1
    return out


def sbf(d, tau, cfg: BasisConfig):
    """SBF vector indexed (l, n); tau enters through Y_l^0, i.e. through cos(tau)."""
    radial = _radial_factors(d, cfg)
    out = np.empty(cfg.sbf_size)
    idx = 0
    for l in range(cfg.num_spherical):
        y = real_spherical_harmonic(l, 0, tau, 0.0)
        for n in range(cfg.num_radial):
            out[idx] = radial[l][n] * y
            idx += 1
    return out

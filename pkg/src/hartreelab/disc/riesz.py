"""Riesz-potential quadrature matrices on a radial grid.

Two kernels are built together:

* the scalar kernel, (I_alpha * g)(r_i) ~ sum_j K[i,j] g_j, from the angular
  average A(r, rho) of c_alpha |x - y|^{alpha-n} over the sphere;
* the vector-weighted kernel for the x.(x-y) |x-y|^{alpha-n-2} multiplier
  that appears in the dilation term of the virial identity.

The two angular profiles satisfy S(r, rho) + S(rho, r) = A(r, rho) exactly
(symmetrizing x.(x-y) gives |x-y|^2 / 2), and the matrices are linked the
same way under the quadrature weights:

    w_i A[i,j] = w_i S[i,j] + w_j S[j,i]   for all i, j.

That identity is what collapses the three nonlinear virial terms to exactly
-4 P[u] for the quadratic multiplier, so A is *constructed* from S rather
than assembled independently.

For n = 3 both profiles are closed-form for every alpha in (0, 3) and the
self-cell integral of the scalar profile is evaluated analytically.  For
other n the profiles come from panel Gauss-Legendre in cos(theta) with
geometric refinement toward the endpoints; near-diagonal entries are
cell-integrated with split panels around the kink.  The diagonal of the
vector kernel is A[i,i] / 2, the principal value of its odd singularity.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .grid import RadialGrid

_GL_CACHE: dict = {}
_KERNEL_MEMO: dict = {}

BAND = 2          # |i-j| <= BAND entries are cell-integrated
SUB_PANELS = 12   # geometric sub-panels per side of a near-diagonal cell


def riesz_normalization(n: int, alpha: float) -> float:
    """Constant in I_alpha = c |x|^{alpha-n}."""
    return math.gamma((n - alpha) / 2.0) / (
        math.gamma(alpha / 2.0) * math.pi ** (n / 2.0) * 2.0 ** alpha)


def _gl(npts: int):
    if npts not in _GL_CACHE:
        _GL_CACHE[npts] = np.polynomial.legendre.leggauss(npts)
    return _GL_CACHE[npts]


# ---------------------------------------------------------------------------
# Angular profiles
# ---------------------------------------------------------------------------

def _profiles_n3(alpha: float, c: float, r, rho):
    """Closed-form (A, S) for n = 3; r, rho broadcastable arrays."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    a = np.abs(r - rho)
    b = r + rho
    rr = r * rho
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha == 1.0:
            ln = np.log(b / a)
            A = (2.0 * c * math.pi / rr) * ln
            S = (c * math.pi / (2.0 * rr)) * (
                (r * r - rho * rho) * (1.0 / (a * a) - 1.0 / (b * b)) + 2.0 * ln)
        else:
            s1 = alpha - 1.0
            s3 = alpha - 3.0
            pow1 = (b ** s1 - a ** s1) / s1
            A = (2.0 * c * math.pi / rr) * pow1
            S = (c * math.pi / rr) * (
                (r * r - rho * rho) * (b ** s3 - a ** s3) / s3 + pow1)
    return A, S


def _t_panels() -> np.ndarray:
    """Panel edges on [-1, 1], geometrically refined toward both endpoints."""
    ks = 2.0 ** -np.arange(1, 46)
    return np.concatenate(([-1.0], -1.0 + ks[::-1], [0.0], 1.0 - ks, [1.0]))


def _profiles_general(n: int, alpha: float, c: float, r, rho):
    """(A, S) by panel Gauss-Legendre in t = cos(theta)."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    shape = np.broadcast_shapes(r.shape, rho.shape)
    A = np.zeros(shape)
    S = np.zeros(shape)
    om = 2.0 * math.pi ** ((n - 1) / 2.0) / math.gamma((n - 1) / 2.0)
    x, wq = _gl(12)
    edges = _t_panels()
    e_alpha = (alpha - n) / 2.0
    half_pow = (n - 3) / 2.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for xi, wi in zip(x, wq):
            t = mid + half * xi
            ang = (1.0 - t * t) ** half_pow
            d2 = r * r + rho * rho - 2.0 * r * rho * t
            core = d2 ** e_alpha * (ang * wi * half)
            A += core
            S += (r * r - r * rho * t) * core / d2
    return c * om * A, c * om * S


def _profiles(n: int, alpha: float, c: float, r, rho):
    if n == 3:
        return _profiles_n3(alpha, c, r, rho)
    return _profiles_general(n, alpha, c, r, rho)


# ---------------------------------------------------------------------------
# Cell integrals (near-diagonal band)
# ---------------------------------------------------------------------------

def _n3_cell_integral_A(alpha: float, c: float, r, lo, hi):
    """Exact integral of A(r, rho) rho^2 over [lo, hi] for n = 3.

    Vectorized over broadcastable arrays; valid whether or not r lies inside
    the cell (the |r - rho| piece is split at the crossing).
    """
    r = np.asarray(r, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid_hi = np.minimum(hi, r)     # rho < r branch upper limit
    mid_lo = np.maximum(lo, r)     # rho > r branch lower limit
    below = lo < r                 # cell part with rho < r exists
    above = hi > r                 # cell part with rho > r exists
    if alpha == 1.0:
        def hplus(x):
            return ((x * x - r * r) / 2.0) * np.log(r + x) \
                - x * x / 4.0 + r * x / 2.0

        def hminus(x):
            d = np.abs(r - x)
            lg = np.where(d > 0.0, np.log(np.where(d > 0.0, d, 1.0)), 0.0)
            return ((x * x - r * r) / 2.0) * lg - x * x / 4.0 - r * x / 2.0

        val = (hplus(hi) - hplus(lo)) - (hminus(hi) - hminus(lo))
        return (2.0 * c * math.pi / r) * val

    s = alpha - 1.0

    def iplus(x):
        u = r + x
        return u ** (s + 2) / (s + 2) - r * u ** (s + 1) / (s + 1)

    def fdown(u):   # rho < r branch, u = r - rho
        return r * u ** (s + 1) / (s + 1) - u ** (s + 2) / (s + 2)

    def gup(u):     # rho > r branch, u = rho - r
        return u ** (s + 2) / (s + 2) + r * u ** (s + 1) / (s + 1)

    plus = iplus(hi) - iplus(lo)
    minus = np.where(below, fdown(np.abs(r - lo)) - fdown(np.abs(r - mid_hi)), 0.0)
    minus = minus + np.where(above, gup(np.abs(hi - r)) - gup(np.abs(mid_lo - r)), 0.0)
    return (2.0 * c * math.pi / r) * (plus - minus) / s


def _split_panel_points(r: float, lo: float, hi: float):
    """Quadrature nodes/weights on [lo, hi], refined toward clip(r, lo, hi)."""
    c0 = min(max(r, lo), hi)
    x, wq = _gl(10)
    pts, wts = [], []
    for a, b, toward_hi in ((lo, c0, True), (c0, hi, False)):
        width = b - a
        if width <= 0.0:
            continue
        fr = width * 2.0 ** -np.arange(SUB_PANELS, dtype=float)
        if toward_hi:      # panels accumulate at b; b - fr ascends from a
            edges = np.concatenate((b - fr, [b]))
        else:              # panels accumulate at a; a + fr[::-1] ascends to b
            edges = np.concatenate(([a], a + fr[::-1]))
        for pa, pb in zip(edges[:-1], edges[1:]):
            if pb <= pa:
                continue
            mid, half = 0.5 * (pa + pb), 0.5 * (pb - pa)
            pts.append(mid + half * x)
            wts.append(half * wq)
    if not pts:
        return np.empty(0), np.empty(0)
    return np.concatenate(pts), np.concatenate(wts)


def _cell_integrals_band(n: int, alpha: float, c: float, grid: RadialGrid,
                         i: int, j: int):
    """(A_cell, S_cell): integrals of profile * rho^{n-1} over cell j, at r_i."""
    r = float(grid.nodes[i])
    lo, hi = float(grid.edges[j]), float(grid.edges[j + 1])
    pts, wts = _split_panel_points(r, lo, hi)
    Av, Sv = _profiles(n, alpha, c, r, pts)
    meas = pts ** (n - 1) * wts
    a_cell = float(np.sum(Av * meas))
    s_cell = float(np.sum(Sv * meas))
    if n == 3:
        a_cell = float(_n3_cell_integral_A(alpha, c, r, lo, hi))
    return a_cell, s_cell


# ---------------------------------------------------------------------------
# Kernel assembly
# ---------------------------------------------------------------------------

@dataclass
class RieszKernel:
    """Quadrature matrices for the scalar and vector-weighted Riesz kernels."""

    alpha: float
    normalization: float
    matrix: np.ndarray        # scalar kernel: (I_alpha * g)_i = matrix @ g
    vec_matrix: np.ndarray    # x.(x-y)-weighted kernel (virial dilation term)
    grid_hash: str

    def conv(self, g: np.ndarray) -> np.ndarray:
        return self.matrix @ g

    def vec_conv(self, g: np.ndarray) -> np.ndarray:
        return self.vec_matrix @ g


def _assemble(grid: RadialGrid, alpha: float) -> RieszKernel:
    n = grid.n
    c = riesz_normalization(n, alpha)
    r = grid.nodes
    m = grid.cell_masses
    w = grid.weights
    J = grid.J
    _, S_prof = _profiles(n, alpha, c, r[:, None], r[None, :])
    S = S_prof * m[None, :]
    # near-diagonal band: cell integration; diagonal: principal value A/2
    for i in range(J):
        for j in range(max(0, i - BAND), min(J, i + BAND + 1)):
            a_cell, s_cell = _cell_integrals_band(n, alpha, c, grid, i, j)
            S[i, j] = 0.5 * a_cell if i == j else s_cell
    wr = w[None, :] / w[:, None]
    A = S + wr * S.T
    if n == 3:
        # Upgrade the scalar kernel to Galerkin (double-cell) accuracy: inner
        # rho-integral analytic, outer r-integral by Gauss-Legendre per cell.
        # The vector kernel is shifted by half the W-symmetric difference so
        # the exact link  w_i A_ij = w_i S_ij + w_j S_ji  is preserved.
        lo, hi = grid.edges[:-1], grid.edges[1:]
        x6, w6 = _gl(6)
        AG = np.zeros((J, J))
        for xq, wq in zip(x6, w6):
            rq = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xq
            cell = _n3_cell_integral_A(alpha, c, rq[:, None], lo[None, :], hi[None, :])
            AG += (wq * 0.5 * (hi - lo) * rq ** 2)[:, None] * cell
        AG /= m[:, None]
        AG = 0.5 * (AG + wr * AG.T)
        S = S + 0.5 * (AG - A)
        A = AG
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(S)):
        raise DomainError("kernel assembly produced non-finite entries")
    return RieszKernel(alpha=alpha, normalization=c, matrix=A, vec_matrix=S,
                       grid_hash=grid.content_hash())


def _cache_key(grid: RadialGrid, alpha: float) -> str:
    h = hashlib.sha256(f"{grid.content_hash()}|{alpha!r}|v1".encode())
    return h.hexdigest()[:24]


def build_riesz_kernel(grid: RadialGrid, alpha: float,
                       cache_dir: str | None = None) -> RieszKernel:
    """Build (or fetch) the kernel pair for (grid, alpha).

    Results are memoized in-process; with ``cache_dir`` (or the
    HARTREELAB_CACHE environment variable) matrices are also cached on disk,
    keyed by (n, alpha, grid hash).
    """
    if not (0.0 < alpha < grid.n):
        raise DomainError(f"alpha must lie in (0, n) = (0, {grid.n}), got {alpha}")
    key = _cache_key(grid, alpha)
    if key in _KERNEL_MEMO:
        return _KERNEL_MEMO[key]
    cache_dir = cache_dir or os.environ.get("HARTREELAB_CACHE")
    path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"riesz_{key}.npz")
        if os.path.exists(path):
            data = np.load(path)
            kern = RieszKernel(alpha=alpha,
                               normalization=riesz_normalization(grid.n, alpha),
                               matrix=data["A"], vec_matrix=data["S"],
                               grid_hash=grid.content_hash())
            _KERNEL_MEMO[key] = kern
            return kern
    kern = _assemble(grid, alpha)
    if path:
        np.savez_compressed(path, A=kern.matrix, S=kern.vec_matrix)
    _KERNEL_MEMO[key] = kern
    return kern

"""Ground states of the stationary equation and the sharp constant.

The minimized quantity is the scale-invariant quotient

    J(u) = |sqrt(K_lambda) u|^(2p) / P[u],

whose infimum is 1/C with C the sharp constant of the nonlinear estimate.
The scheme is a normalized semi-implicit descent (imaginary-time flavoured):
each step solves the tridiagonal system

    (W + s A) v = W (u + s (Q/P) N[u]),

where A is the stiffness matrix, Q = |sqrt(K) u|^2 and N[u] the nonlinearity,
then clips negatives (the solve is positivity-preserving, the clip documents
the projection) and renormalizes to Q = 1.  A fixed point solves the
normalized stationary equation K u = (Q/P) N[u]; rescaling u by
beta = P[u]^{-1/(2p-2)} then satisfies the unnormalized equation exactly.
Steps are accepted only when J does not increase (backtracking halves the
step otherwise), making J monotone along accepted iterates.

The sharp constant follows from the stationary identity P[phi] = Q[phi]:
C = P[phi] / Q[phi]^p and C = P[phi]^{1-p} are computed independently and
cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.linalg import solveh_banded

from .disc.grid import RadialField, RadialGrid, bubble_field
from .disc.norms import nonlinear_density, potential_energy
from .disc.operator import KLambdaOperator
from .disc.riesz import RieszKernel
from .errors import InfeasibleParams, NoConvergence, PreconditionError
from .params import ModelParams


@dataclass
class SolverOptions:
    """Knobs for the two solver modes.

    mode="variational": pure monotone descent of the quotient.  The critical
    quotient is scale-invariant and its discrete tilt points toward small
    scales, so the minimizer parks its core against the inner regularity
    closure; residuals there are tiny and the constant is the quotient's
    plateau value.  Used for the sharp constant and the identity checks.

    mode="anchored": after a short unanchored warm-up the core-scale
    observable is frozen and every accepted step is followed by an exact
    rescale-resample back to it.  Converges to a desk-scale quasi-soliton at
    a resolved scale whose stationarity defect is the orbit tilt (about 1e-2
    here); that is what the dichotomy experiment needs as initial data,
    where the defect must only be small against the 10..20 percent threshold
    perturbations.
    """

    tol_J: float = 1e-10          # relative J stall
    tol_el: float = 1e-3          # Euler-Lagrange residual gate
    max_iters: int = 20000
    step: float = 1.0
    min_step: float = 1e-8
    multistart: int = 1
    seed: int = 0
    basin_spread_tol: float = 1e-3
    mode: str = "variational"
    anchor_warmup: int = 30
    anchor_iters: int = 250
    anchor_log_tol: float = 0.003
    anchor_step_cap: float = 0.5


@dataclass
class GroundStateResult:
    phi: RadialField              # solves the stationary equation
    C: float                      # sharp constant
    J_value: float                # quotient at the normalized minimizer
    pohozaev_residual: float
    el_residual: float
    iterations: int
    J_history: list = field(default_factory=list, repr=False)
    multiple_basins: bool = False
    basin_spread: float = 0.0

    # cached functionals of phi (quadrature values, focusing-sign energy)
    form_phi: float = 0.0         # |sqrt(K) phi|^2
    P_phi: float = 0.0
    energy_phi: float = 0.0       # Q - P/p


def check_groundstate_constraints(params: ModelParams) -> None:
    """Existence window of the minimizer: 0 < alpha < n, 0 < tau < 1 + alpha/n.

    tau = 0 is refused outright: with a positive coupling the infimum is not
    attained there, so chasing it is meaningless.
    """
    n, alpha, tau = params.n, params.alpha, params.tau
    if not (0.0 < alpha < n):
        raise InfeasibleParams(f"alpha = {alpha} outside (0, {n})")
    if not (0.0 < tau < 1.0 + alpha / n):
        raise InfeasibleParams(
            f"tau = {tau} outside (0, 1 + alpha/n) = (0, {1.0 + alpha / n})")
    if params.p <= 2.0:
        raise InfeasibleParams(f"p = {params.p} <= 2; nonlinearity not supported")


def _banded(op: KLambdaOperator, s: float) -> np.ndarray:
    """(W + s A) in solveh_banded upper form."""
    ab = np.zeros((2, op.grid.J))
    ab[1] = op.grid.weights + s * op.diag
    ab[0, 1:] = s * op.off
    return ab


def _normalize(op: KLambdaOperator, v: np.ndarray) -> np.ndarray:
    q = op.quadratic_form(v)
    if q <= 0.0:
        raise NoConvergence("iterate lost positivity of the quadratic form")
    return v / np.sqrt(q)


REGULARITY_NODES = 2   # innermost nodes slaved to the regular local branch


def regularity_closure(values: np.ndarray, grid, kappa: float,
                       m: int = REGULARITY_NODES) -> np.ndarray:
    """Slave the innermost m nodes to u ~ r^{-kappa} (a + b r^2).

    The scale-invariant quotient is minimized at grid scale by a spurious
    profile whose core hides below the first node (its gradient cost vanishes
    with the r^{n-1} flux weight).  Matching the regular local branch of
    K_lambda-harmonic fields removes that mode; for regular fields the
    closure is an O(r^4) identity.
    """
    r = grid.nodes
    v = values.copy()
    i, j = m, m + 1
    vi = values[i] * r[i] ** kappa
    vj = values[j] * r[j] ** kappa
    b = (vj - vi) / (r[j] ** 2 - r[i] ** 2)
    a = vi - b * r[i] ** 2
    v[:m] = np.maximum(r[:m] ** (-kappa) * (a + b * r[:m] ** 2), 0.0)
    return v


def el_residual(phi: RadialField, params: ModelParams, kernel: RieszKernel,
                op: KLambdaOperator, interior: float = 0.9,
                skip_inner: int = REGULARITY_NODES) -> float:
    """Relative L2 residual of K phi = N[phi] over the interior nodes.

    Interior excludes the Dirichlet-dominated outer shell (r > interior*R)
    and the regularity-closed innermost nodes.
    """
    vals = phi.values.real
    g = nonlinear_density(phi, params)
    rhs = phi.grid.nodes ** (-params.tau) * np.abs(vals) ** (params.p - 2) \
        * kernel.conv(g) * vals
    res = op.apply(vals) - rhs
    mask = phi.grid.nodes <= interior * phi.grid.R_max
    mask[:skip_inner] = False
    w = phi.grid.weights
    num = float(np.sum(w[mask] * res[mask] ** 2))
    den = float(np.sum(w[mask] * op.apply(vals)[mask] ** 2))
    return np.sqrt(num / den) if den > 0 else np.inf


def _p_median(grid, g: np.ndarray, conv: np.ndarray) -> float:
    """Median radius of the interaction density w g (Kg) (a scale observable).

    Concentrated at the profile core and insensitive to the box, unlike mass
    or gradient medians.
    """
    rho = grid.weights * g * conv
    cum = np.cumsum(rho)
    return float(grid.nodes[int(np.searchsorted(cum, 0.5 * cum[-1]))])


def _resample(grid, values: np.ndarray, mu: float) -> np.ndarray:
    """values(mu * r) by cubic spline; zero beyond the box."""
    from scipy.interpolate import CubicSpline
    cs = CubicSpline(grid.nodes, values, bc_type="natural", extrapolate=False)
    out = cs(np.clip(grid.nodes * mu, grid.nodes[0], grid.nodes[-1]))
    out[grid.nodes * mu > grid.nodes[-1]] = 0.0
    return np.maximum(np.nan_to_num(out), 0.0)


def _descend(params: ModelParams, op: KLambdaOperator, kernel: RieszKernel,
             u0: np.ndarray, opts: SolverOptions):
    """Monotone anchored descent from u0; returns (psi, J_history, iterations).

    The critical quotient is scale-invariant, so the discrete landscape has a
    nearly flat orbit direction whose residual tilt (wall and resolution
    effects) would let iterates creep toward the grid floor.  Each trial step
    therefore re-anchors the scale observable to its initial value by an
    exact rescale-resample before the acceptance test; backtracking keeps J
    non-increasing over the accepted combined steps.
    """
    grid = op.grid
    w = grid.weights
    p = params.p

    def quotient_and_density(v):
        f = RadialField(grid, v)
        g = nonlinear_density(f, params)
        conv = kernel.conv(g)
        P = float(np.sum(w * g * conv))
        Q = op.quadratic_form(v)
        return Q ** p / P, Q, P, g, conv

    anchored = opts.mode == "anchored"

    def closed(v):
        # the inner regularity closure guards the anchored mode's resolved
        # core; the variational mode runs free to its discrete fixed point
        return regularity_closure(v, grid, params.kappa) if anchored else v

    u = _normalize(op, closed(np.maximum(u0.real, 0.0)))
    J, Q, P, g, conv = quotient_and_density(u)
    anchor = None
    hist = [J]
    s = opts.step
    it = 0
    max_iters = opts.anchor_warmup + opts.anchor_iters if anchored else opts.max_iters
    while it < max_iters:
        it += 1
        N = grid.nodes ** (-params.tau) * u ** (p - 1) * conv
        accepted = False
        while s >= opts.min_step:
            rhs = w * (u + s * (Q / P) * N)
            v = solveh_banded(_banded(op, s), rhs)
            v = _normalize(op, closed(np.maximum(v, 0.0)))
            Jn, Qn, Pn, gn, convn = quotient_and_density(v)
            if Jn <= J * (1.0 + 1e-12):
                u, J, Q, P, g, conv = v, Jn, Qn, Pn, gn, convn
                accepted = True
                break
            s *= 0.5
        hist.append(J)
        if not accepted:
            break
        if anchor is not None:
            # project the accepted iterate back to the frozen scale
            mu = _p_median(grid, g, conv) / anchor
            if abs(math.log(mu)) > opts.anchor_log_tol:
                u = _normalize(op, closed(_resample(grid, u, mu)))
                J, Q, P, g, conv = quotient_and_density(u)
        s = min(s * 1.2, opts.anchor_step_cap if anchor is not None
                else opts.step * 4.0)
        if anchored and it == opts.anchor_warmup:
            anchor = _p_median(grid, g, conv)
        dJ = abs(hist[-2] - hist[-1]) / max(hist[-1], 1e-300)
        if not anchored and dJ < opts.tol_J and it > 5:
            break
    return u, hist, it


def minimize_weinstein(params: ModelParams, grid: RadialGrid,
                       kernel: RieszKernel, op: KLambdaOperator | None = None,
                       init: RadialField | None = None,
                       opts: SolverOptions | None = None) -> GroundStateResult:
    """Minimize the quotient and return the stationary profile and constant.

    The operator defaults to the harmonic-exterior wall closure; see
    SolverOptions for the two solver modes.
    """
    check_groundstate_constraints(params)
    opts = opts or SolverOptions()
    op = op or KLambdaOperator(grid, params.lam, wall="harmonic")
    p = params.p

    starts: list[np.ndarray] = []
    if init is not None:
        if np.all(init.values == 0) or np.any(init.values.real < -1e-14):
            raise PreconditionError("init must be nonzero and nonnegative")
        starts.append(init.values.real.copy())
    else:
        starts.append(bubble_field(grid).values.real)
    rng = np.random.default_rng(opts.seed)
    while len(starts) < max(1, opts.multistart):
        scale = float(rng.uniform(0.6, 1.8))
        bump = 1.0 + 0.2 * float(rng.standard_normal()) * np.exp(-grid.nodes ** 2)
        starts.append(np.maximum(bubble_field(grid, scale=scale).values.real * bump, 0.0))

    best = None
    J_values = []
    for u0 in starts:
        psi, hist, it = _descend(params, op, kernel, u0, opts)
        J_values.append(hist[-1])
        if best is None or hist[-1] < best[1][-1]:
            best = (psi, hist, it)
    psi, hist, iterations = best
    spread = (max(J_values) - min(J_values)) / min(J_values) if len(J_values) > 1 else 0.0

    psi_f = RadialField(grid, psi)
    P_psi = potential_energy(psi_f, params, kernel)
    J_value = op.quadratic_form(psi) ** p / P_psi
    # rescale so the unnormalized stationary equation holds
    beta = P_psi ** (-1.0 / (2.0 * p - 2.0))
    phi = RadialField(grid, beta * psi)
    Q_phi = op.quadratic_form(phi.values)
    P_phi = potential_energy(phi, params, kernel)
    poho = abs(P_phi - Q_phi) / Q_phi
    elres = el_residual(phi, params, kernel, op)
    if elres > opts.tol_el:
        raise NoConvergence(
            f"descent stalled with Euler-Lagrange residual {elres:.3e} "
            f"> {opts.tol_el:.1e} after {iterations} iterations")
    return GroundStateResult(
        phi=phi, C=P_psi, J_value=J_value,
        pohozaev_residual=poho, el_residual=elres, iterations=iterations,
        J_history=hist, multiple_basins=spread > opts.basin_spread_tol,
        basin_spread=spread, form_phi=Q_phi, P_phi=P_phi,
        energy_phi=Q_phi - P_phi / p)


def sharp_constant(result: GroundStateResult, params: ModelParams,
                   kernel: RieszKernel, op: KLambdaOperator) -> float:
    """C evaluated two ways (quotient at phi, and P[phi]^{1-p}); cross-checked."""
    p = params.p
    Q = op.quadratic_form(result.phi.values)
    P = potential_energy(result.phi, params, kernel)
    c_quotient = P / Q ** p
    c_pohozaev = P ** (1.0 - p)
    if abs(c_quotient - c_pohozaev) > 1e-6 * abs(c_quotient):
        raise NoConvergence(
            f"sharp-constant formulas disagree: {c_quotient} vs {c_pohozaev}")
    return c_quotient


def gn_verify(u: RadialField, params: ModelParams, kernel: RieszKernel,
              op: KLambdaOperator, C: float) -> tuple:
    """ratio = P[u] / (C |sqrt(K) u|^{2p}); pass iff ratio <= 1 + 1e-6."""
    P = potential_energy(u, params, kernel)
    Q = op.quadratic_form(u.values)
    ratio = P / (C * Q ** params.p)
    return ratio, ratio <= 1.0 + 1e-6


def coercivity_check(u: RadialField, result: GroundStateResult,
                     params: ModelParams, kernel: RieszKernel,
                     op: KLambdaOperator, c: float) -> bool:
    """Energy-trapping bound below a fraction of the ground-state potential.

    Requires P[u] < c P[phi] with c in (0, 1); asserts the focusing energy
    controls the quadratic form:  Q <= E / (1 - c^{(p-1)/p} / p).
    """
    if not (0.0 < c < 1.0):
        raise PreconditionError(f"c must lie in (0, 1), got {c}")
    p = params.p
    P_u = potential_energy(u, params, kernel)
    if not P_u < c * result.P_phi:
        raise PreconditionError(
            f"P[u] = {P_u} not below c * P[phi] = {c * result.P_phi}")
    Q = op.quadratic_form(u.values)
    E = Q - P_u / p
    factor = 1.0 - c ** ((p - 1.0) / p) / p
    return Q <= E / factor * (1.0 + 1e-8) + 1e-300

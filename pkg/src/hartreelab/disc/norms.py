"""Masses, weighted norms, energies and the Hardy spot check."""

from __future__ import annotations

import numpy as np

from ..errors import NonFinite
from ..params import ModelParams
from .grid import RadialField
from .operator import KLambdaOperator
from .riesz import RieszKernel

# Overflow guard for |u|^p (blow-up in progress is reported, not propagated).
AMPLITUDE_GUARD = 1e60


def mass(u: RadialField) -> float:
    return float(np.sum(u.grid.weights * np.abs(u.values) ** 2))


def grad_norm_sq(u: RadialField, op: KLambdaOperator) -> float:
    return op.grad_norm_sq(u.values)


def hardy_term(u: RadialField) -> float:
    return float(np.sum(u.grid.hardy_weights * np.abs(u.values) ** 2))


def weighted_Lq_norm(u: RadialField, q: float, b: float = 0.0) -> float:
    """|| r^b u ||_{L^q} by quadrature."""
    r = u.grid.nodes
    return float(np.sum(u.grid.weights * (r ** b * np.abs(u.values)) ** q) ** (1.0 / q))


def hardy_check(u: RadialField, op: KLambdaOperator) -> tuple:
    """(lhs, rhs, pass) for ((n-2)^2/4) int |u|^2/r^2 <= int |grad u|^2."""
    n = u.grid.n
    lhs = ((n - 2) ** 2 / 4.0) * hardy_term(u)
    rhs = op.grad_norm_sq(u.values)
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-8) + 1e-300


def nonlinear_density(u: RadialField, params: ModelParams) -> np.ndarray:
    """g = r^{-tau} |u|^p; |u| = 0 maps to 0 for non-integer p."""
    amp = np.abs(u.values)
    peak = amp.max(initial=0.0)
    if not np.isfinite(peak) or peak > AMPLITUDE_GUARD:
        raise NonFinite(f"amplitude {peak} beyond overflow guard")
    return u.grid.nodes ** (-params.tau) * amp ** params.p


def potential_energy(u: RadialField, params: ModelParams,
                     kernel: RieszKernel) -> float:
    """P[u] = int r^{-tau} |u|^p (I_alpha * r^{-tau} |u|^p)."""
    g = nonlinear_density(u, params)
    val = float(np.sum(u.grid.weights * g * kernel.conv(g)))
    if not np.isfinite(val):
        raise NonFinite("potential energy overflowed")
    return val


def energy(u: RadialField, params: ModelParams, kernel: RieszKernel,
           op: KLambdaOperator) -> float:
    """E[u] = |sqrt(K_lambda) u|^2 + (eps/p) P[u]."""
    return op.quadratic_form(u.values) + \
        (params.epsilon / params.p) * potential_energy(u, params, kernel)


def functional_I(u: RadialField, params: ModelParams, kernel: RieszKernel,
                 op: KLambdaOperator) -> float:
    """I[u] = |sqrt(K_lambda) u|^2 - P[u]; its sign drives the blow-up test."""
    return op.quadratic_form(u.values) - potential_energy(u, params, kernel)

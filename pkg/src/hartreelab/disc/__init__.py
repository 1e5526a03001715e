"""Radial discretization: grids, fields, the K_lambda operator, Riesz kernels."""

from .grid import (
    RadialGrid, RadialField, build_grid, surface_area,
    gaussian_field, bubble_field, write_field_csv, read_field_csv,
)
from .operator import KLambdaOperator, apply_K_lambda, quadratic_form_sqrtK
from .riesz import RieszKernel, build_riesz_kernel, riesz_normalization
from .norms import (
    mass, weighted_Lq_norm, hardy_check, potential_energy, energy,
    functional_I, grad_norm_sq, hardy_term, nonlinear_density,
)

__all__ = [
    "RadialGrid", "RadialField", "build_grid", "surface_area",
    "gaussian_field", "bubble_field", "write_field_csv", "read_field_csv",
    "KLambdaOperator", "apply_K_lambda", "quadratic_form_sqrtK",
    "RieszKernel", "build_riesz_kernel", "riesz_normalization",
    "mass", "weighted_Lq_norm", "hardy_check", "potential_energy", "energy",
    "functional_I", "grad_norm_sq", "hardy_term", "nonlinear_density",
]

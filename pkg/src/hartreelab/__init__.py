"""hartreelab: a numerical laboratory for the energy-critical inhomogeneous
Hartree equation with an inverse-square potential.

Modules: params (exponent calculus and admissible ranges), disc (radial
grids, the K_lambda operator, Riesz kernels, norms), groundstate (stationary
profiles and the sharp constant), evolve (split-step dynamics, conservation
diagnostics, blow-up detection), virial (localized virial identities),
harness (config, experiment pipelines, CLI).
"""

__version__ = "0.1.0"

from . import errors, params  # noqa: F401  (lightweight, always available)

__all__ = ["errors", "params", "__version__"]

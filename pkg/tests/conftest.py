import numpy as np
import pytest

from hartreelab import disc, groundstate as gs, params as pm


class Lab:
    """Session-wide cache of grids, operators, kernels and ground states."""

    def __init__(self):
        self._grids = {}
        self._ops = {}
        self._gs = {}

    def grid(self, n=3, R=15.0, J=1024, mapping="uniform", r_min=None):
        key = (n, R, J, mapping, r_min)
        if key not in self._grids:
            self._grids[key] = disc.build_grid(n, R, J, mapping, r_min=r_min)
        return self._grids[key]

    def kernel(self, grid, alpha=2.0):
        return disc.build_riesz_kernel(grid, alpha)   # memoized internally

    def op(self, grid, lam=0.0, wall="dirichlet"):
        key = (grid.content_hash(), lam, wall)
        if key not in self._ops:
            self._ops[key] = disc.KLambdaOperator(grid, lam, wall=wall)
        return self._ops[key]

    def params(self, n=3, lam=0.0, alpha=2.0, tau=0.5, eps=-1):
        return pm.derive(n, lam, alpha, tau, eps)

    def ground_state(self, lam=0.0, J=1024, R=15.0, mode="variational",
                     tol_el=None):
        key = (lam, J, R, mode)
        if key not in self._gs:
            prm = self.params(lam=lam)
            grid = self.grid(R=R, J=J)
            kern = self.kernel(grid)
            op = self.op(grid, lam, wall="harmonic")
            opts = gs.SolverOptions(mode=mode)
            if tol_el is not None:
                opts.tol_el = tol_el
            elif mode == "anchored":
                opts.tol_el = 0.05
            self._gs[key] = gs.minimize_weinstein(prm, grid, kern, op, opts=opts)
        return self._gs[key]


@pytest.fixture(scope="session")
def lab():
    return Lab()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)

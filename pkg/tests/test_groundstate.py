import math

import numpy as np
import pytest

from hartreelab import disc, groundstate as gs
from hartreelab.errors import InfeasibleParams, PreconditionError

from oracles import energy_ratio_of_scaled_state


def test_reference_cell_identities(lab):
    res = lab.ground_state(lam=0.0, J=1024)
    assert res.pohozaev_residual < 1e-3
    assert res.el_residual < 1e-3
    assert res.C * res.J_value == pytest.approx(1.0, abs=1e-6)
    assert np.all(res.phi.values.real >= 0.0)


def test_sharp_constant_two_formulas_agree(lab):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    C = gs.sharp_constant(res, prm, kern, op)
    P = disc.potential_energy(res.phi, prm, kern)
    assert C == pytest.approx(P ** (1.0 - prm.p), rel=1e-6)
    assert C == pytest.approx(res.C, rel=1e-6)


def test_grid_refinement_stability_of_constant(lab):
    c512 = lab.ground_state(lam=0.0, J=512).C
    c1024 = lab.ground_state(lam=0.0, J=1024).C
    assert abs(c512 - c1024) / c1024 < 1e-2


def test_monotone_descent_history(lab):
    res = lab.ground_state(lam=0.0, J=512)
    h = np.array(res.J_history)
    assert np.all(np.diff(h) <= h[:-1] * 1e-12 + 1e-300)


def test_energy_identity_at_ground_state(lab):
    # p E[phi] = (p-1) |sqrt(K) phi|^2 via P[phi] = Q[phi]
    prm = lab.params()
    res = lab.ground_state(lam=0.0, J=1024)
    assert prm.p * res.energy_phi == pytest.approx(
        (prm.p - 1.0) * res.form_phi, rel=1e-10)


def test_fixed_point_one_step(lab):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    res2 = gs.minimize_weinstein(prm, g, kern, op, init=res.phi,
                                 opts=gs.SolverOptions(max_iters=1))
    assert abs(res2.J_value - res.J_value) / res.J_value < 1e-10


def test_gn_verify_extremizer_and_strict_interior(lab, rng):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    ratio, ok = gs.gn_verify(res.phi, prm, kern, op, res.C)
    assert ok and ratio == pytest.approx(1.0, abs=1e-3)
    u = disc.gaussian_field(g, 0.8, 1.1)
    ratio_g, ok_g = gs.gn_verify(u, prm, kern, op, res.C)
    assert ok_g and ratio_g < 1.0


def test_quotient_scale_invariance_on_resamples(lab):
    # J(delta u(mu .)) = J(u) for analytic resamples at quadrature accuracy
    prm = lab.params()
    g = lab.grid(n=3, R=20.0, J=2048)
    kern = lab.kernel(g)
    op = disc.KLambdaOperator(g, 0.0)

    def quotient(field):
        q = disc.quadratic_form_sqrtK(field, op)
        return q ** prm.p / disc.potential_energy(field, prm, kern)

    base = disc.gaussian_field(g, 1.0, 1.0)
    j0 = quotient(base)
    for delta, mu in ((2.0, 1.0), (1.0, 1.25), (0.7, 0.8)):
        u = disc.RadialField(g, delta * np.exp(-(mu * g.nodes) ** 2 / 2.0))
        assert quotient(u) == pytest.approx(j0, rel=1e-3)


def test_gn_ratio_invariant_under_scaling(lab):
    prm = lab.params()
    g = lab.grid(n=3, R=20.0, J=2048)
    kern = lab.kernel(g)
    op = disc.KLambdaOperator(g, 0.0)
    res = lab.ground_state(lam=0.0, J=1024)
    r0 = gs.gn_verify(disc.gaussian_field(g, 1.0, 1.0), prm, kern, op, res.C)[0]
    r1 = gs.gn_verify(
        disc.RadialField(g, 1.4 * np.exp(-(1.3 * g.nodes) ** 2 / 2.0)),
        prm, kern, op, res.C)[0]
    assert r1 == pytest.approx(r0, rel=1e-3)


def test_el_residual_detects_non_solutions(lab):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    doubled = disc.RadialField(g, 2.0 * res.phi.values)
    assert gs.el_residual(doubled, prm, kern, op) > 0.5


def test_el_residual_decreases_on_refinement(lab):
    # the converged stationary residual improves with grid resolution
    r512 = lab.ground_state(lam=0.0, J=512).el_residual
    r1024 = lab.ground_state(lam=0.0, J=1024).el_residual
    assert r1024 < r512 < 1e-3


def test_multistart_single_basin(lab):
    prm = lab.params()
    g = lab.grid(n=3, R=15.0, J=512)
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = gs.minimize_weinstein(prm, g, kern, op,
                                opts=gs.SolverOptions(multistart=3, seed=5))
    assert not res.multiple_basins
    assert res.basin_spread < 1e-3


def test_lambda_cells_converge(lab):
    for lam in (-0.2, 0.5):
        res = lab.ground_state(lam=lam, J=512)
        assert res.pohozaev_residual < 1e-3
        assert res.el_residual < 1e-3


def test_anchored_mode_resolved_scale(lab):
    res = lab.ground_state(lam=0.0, J=1024, mode="anchored")
    phi = res.phi.values.real
    g = res.phi.grid
    # core at a resolved scale: half-max radius well above the grid spacing
    half = g.nodes[int(np.searchsorted(-phi, -phi.max() / 2.0))]
    assert half > 20.0 * (g.nodes[1] - g.nodes[0])
    assert res.el_residual < 0.05


def test_coercivity_energy_trapping(lab):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    for s in (0.2, 0.5, 0.9):
        u = disc.RadialField(g, s * res.phi.values)
        c = min(s ** (2 * prm.p) + 0.01, 0.99)
        assert gs.coercivity_check(u, res, prm, kern, op, c)
    z = disc.RadialField.zeros(g)
    assert gs.coercivity_check(z, res, prm, kern, op, 0.5)


def test_coercivity_precondition_errors(lab):
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    with pytest.raises(PreconditionError):
        gs.coercivity_check(res.phi, res, prm, kern, op, 0.5)   # P[u] too big
    with pytest.raises(PreconditionError):
        gs.coercivity_check(disc.RadialField.zeros(g), res, prm, kern, op, 1.5)


def test_energy_ratio_formula_for_scaled_states(lab):
    # ME[c phi] from the stationary identity, cross-checked numerically
    prm = lab.params()
    g = lab.grid()
    kern = lab.kernel(g)
    op = lab.op(g, 0.0, wall="harmonic")
    res = lab.ground_state(lam=0.0, J=1024)
    for c in (0.9, 1.1):
        u = disc.RadialField(g, c * res.phi.values)
        me = disc.energy(u, prm, kern, op) / res.energy_phi
        assert me == pytest.approx(energy_ratio_of_scaled_state(c, prm.p),
                                   rel=1e-10)
        assert me < 1.0


def test_infeasible_params_refused(lab):
    g = lab.grid(n=3, R=15.0, J=512)
    kern = lab.kernel(g)
    # tau above the existence window 0 < tau < 1 + alpha/n
    import hartreelab.params as pm
    bad = pm.ModelParams(n=3, lam=0.0, alpha=2.0, tau=1.7, epsilon=-1,
                         kappa=0.0, p=pm.critical_p(3, 2.0, 1.7))
    with pytest.raises(InfeasibleParams):
        gs.minimize_weinstein(bad, g, kern)


def test_init_must_be_nonnegative(lab):
    prm = lab.params()
    g = lab.grid(n=3, R=15.0, J=512)
    kern = lab.kernel(g)
    bad = disc.RadialField(g, -np.ones(g.J))
    with pytest.raises(PreconditionError):
        gs.minimize_weinstein(prm, g, kern, init=bad)

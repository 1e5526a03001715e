"""Time integration with conserved-quantity tracking and blow-up detection.

Strang splitting: a half-step of the nonlinear phase (the nonlocal term acts
as a real local multiplier W = r^{-tau} |u|^{p-2} (I_alpha * r^{-tau}|u|^p),
so its flow is an exact phase rotation preserving |u| pointwise), a full
linear step through the eigendecomposition of the discrete operator (exactly
unitary in the quadrature inner product), then another nonlinear half-step.
Mass is therefore conserved to round-off; energy drift is the usual
second-order splitting error.

The time-step controller only ever shrinks dt (halving whenever the per-step
energy jump exceeds a tolerance); hitting the floor dt_min doubles as the
blow-up sentinel.  Thresholds are configuration defaults, documented
heuristics rather than theorem statements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disc.grid import RadialField, RadialGrid
from .disc.norms import mass, nonlinear_density
from .disc.operator import KLambdaOperator
from .disc.riesz import RieszKernel
from .errors import PreconditionError
from .groundstate import GroundStateResult
from .params import ModelParams

OVERFLOW_GUARD = 1e30


@dataclass
class EvolutionState:
    u: RadialField
    t: float
    step_count: int
    diverged: bool = False


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    energy: float
    potential: float
    functional_i: float      # |sqrt(K) u|^2 - P[u]
    me: float                # E[u]/E[phi]
    mg: float                # |sqrt(K) u| / |sqrt(K) phi|
    mp: float                # P[u]/P[phi]
    gradnorm: float          # |sqrt(K) u|

    CSV_COLUMNS = ("t", "M", "E", "P", "I", "ME", "MG", "MP", "gradnorm")

    def row(self):
        return (self.t, self.mass, self.energy, self.potential,
                self.functional_i, self.me, self.mg, self.mp, self.gradnorm)


@dataclass
class Propagator:
    """exp(-i t K_lambda) through the (cached) eigendecomposition."""

    op: KLambdaOperator
    dt: float

    def __post_init__(self):
        self._matrices: dict = {}
        mu, Q = self.op.eig()
        self._mu = mu
        self._Q = Q
        self._QtW = Q.T * self.op.grid.weights[None, :]

    def matrix(self, dt: float) -> np.ndarray:
        key = float(dt)
        if key not in self._matrices:
            phase = np.exp(-1j * dt * self._mu)
            self._matrices[key] = (self._Q * phase[None, :]) @ self._QtW
            if len(self._matrices) > 2:
                self._matrices.pop(next(iter(self._matrices)))
        return self._matrices[key]

    def apply(self, values: np.ndarray, dt: float | None = None) -> np.ndarray:
        dt = self.dt if dt is None else dt
        if float(dt) in self._matrices or dt == self.dt:
            return self.matrix(dt) @ values
        # off-nominal steps (controller halvings) use the factored form to
        # avoid a dense matrix rebuild per new dt
        return self._Q @ (np.exp(-1j * dt * self._mu) * (self._QtW @ values))

    def propagate(self, u: RadialField, t: float) -> RadialField:
        """exp(-i t K) u for arbitrary t (exact in the discrete system)."""
        coef = self._QtW @ u.values
        return RadialField(u.grid, self._Q @ (np.exp(-1j * t * self._mu) * coef))


def build_propagator(grid: RadialGrid, params: ModelParams, dt: float,
                     op: KLambdaOperator | None = None) -> Propagator:
    op = op or KLambdaOperator(grid, params.lam)
    return Propagator(op=op, dt=dt)


def nonlinear_multiplier(u: RadialField, params: ModelParams,
                         kernel: RieszKernel) -> np.ndarray:
    """W = r^{-tau} |u|^{p-2} (I_alpha * r^{-tau} |u|^p), a real multiplier."""
    g = nonlinear_density(u, params)
    amp = np.abs(u.values)
    return u.grid.nodes ** (-params.tau) * amp ** (params.p - 2.0) * kernel.conv(g)


def step(state: EvolutionState, dt: float, params: ModelParams,
         kernel: RieszKernel, propagator: Propagator,
         nonlinearity_scale: float = 1.0) -> EvolutionState:
    """One Strang step; the nonlinear substeps preserve |u| exactly.

    ``nonlinearity_scale = 0`` reduces to the pure linear propagator (a
    diagnostic knob, not a model parameter).
    """
    if dt == 0.0:
        raise PreconditionError("dt must be nonzero")
    u = state.u.values
    eps = params.epsilon * nonlinearity_scale
    if eps != 0.0:
        w1 = nonlinear_multiplier(state.u, params, kernel)
        u = u * np.exp(-0.5j * eps * dt * w1)
    u = propagator.apply(u, dt)
    f = RadialField(state.u.grid, u)
    if eps != 0.0:
        w2 = nonlinear_multiplier(f, params, kernel)
        f = RadialField(state.u.grid, u * np.exp(-0.5j * eps * dt * w2))
    peak = float(np.abs(f.values).max(initial=0.0))
    diverged = not np.isfinite(peak) or peak > OVERFLOW_GUARD
    return EvolutionState(u=f, t=state.t + dt, step_count=state.step_count + 1,
                          diverged=diverged)


@dataclass
class RunResult:
    records: list
    final: EvolutionState
    verdict: str                  # completed | blowup-detected | diverged |
    #                               boundary-contaminated
    t_star: float | None = None
    dt_final: float = 0.0
    dt_collapsed: bool = False
    snapshots: list = field(default_factory=list, repr=False)


def _diagnostics(u: RadialField, t: float, params: ModelParams,
                 kernel: RieszKernel, op: KLambdaOperator,
                 gs: GroundStateResult | None) -> DiagnosticsRecord:
    g = nonlinear_density(u, params)
    P = float(np.sum(u.grid.weights * g * kernel.conv(g)))
    Q = op.quadratic_form(u.values)
    E = Q + (params.epsilon / params.p) * P
    if gs is not None:
        me = E / gs.energy_phi
        mg = math.sqrt(Q / gs.form_phi)
        mp = P / gs.P_phi
    else:
        me = mg = mp = float("nan")
    return DiagnosticsRecord(t=t, mass=mass(u), energy=E, potential=P,
                             functional_i=Q - P, me=me, mg=mg, mp=mp,
                             gradnorm=math.sqrt(Q))


def run(u0: RadialField, params: ModelParams, T: float, dt: float,
        cadence: float, kernel: RieszKernel,
        op: KLambdaOperator | None = None,
        ground_state: GroundStateResult | None = None,
        adaptive: bool = True, dt_min: float = 1e-9,
        energy_jump_tol: float = 1e-5,
        boundary_guard: float | None = None,
        store_fields: bool = False,
        nonlinearity_scale: float = 1.0) -> RunResult:
    """Integrate to T (or detection), recording diagnostics every ``cadence``.

    ``cadence`` is a time interval (aligned to step boundaries).  With
    ``adaptive`` the step is halved whenever one step moves the energy by
    more than energy_jump_tol * scale; dt never grows back, and shrinking
    past dt_min stops the run (blow-up sentinel).  ``boundary_guard``, when
    set, aborts once the mass fraction beyond 0.9 R_max grows by more than
    the given amount over its initial value (Dirichlet-reflection monitor;
    meaningful only for data that starts well inside the box).
    """
    if not u0.is_finite():
        raise PreconditionError("initial data must be finite")
    grid = u0.grid
    op = op or KLambdaOperator(grid, params.lam)
    prop = build_propagator(grid, params, dt, op)
    state = EvolutionState(u=u0.copy(), t=0.0, step_count=0)

    rec0 = _diagnostics(u0, 0.0, params, kernel, op, ground_state)
    records = [rec0]
    snapshots = [(0.0, u0.copy())] if store_fields else []
    e_scale = max(abs(rec0.energy), 1e-2 * (rec0.gradnorm ** 2 + abs(rec0.potential)
                                            / params.p), 1e-12)
    grad0 = rec0.gradnorm
    outer = grid.nodes > 0.9 * grid.R_max
    outer_mass0 = float(np.sum(grid.weights[outer] * np.abs(u0.values[outer]) ** 2))
    m0 = max(rec0.mass, 1e-300)

    verdict = "completed"
    t_star = None
    dt_collapsed = False
    e_prev = rec0.energy
    next_record = cadence
    dt0 = dt
    quiet = 0
    # direction of time: negative dt integrates backward to -T
    horizon = abs(T)
    while abs(state.t) < horizon * (1.0 - 1e-12):
        trial = step(state, dt, params, kernel, prop, nonlinearity_scale)
        if trial.diverged:
            verdict, t_star = "diverged", state.t
            state = trial
            break
        g = nonlinear_density(trial.u, params)
        P = float(np.sum(grid.weights * g * kernel.conv(g)))
        Q = op.quadratic_form(trial.u.values)
        E = Q + (params.epsilon / params.p) * P
        jump = abs(E - e_prev)
        # The acceptance threshold scales with dt: time-smooth error shrinks
        # like dt^3 and passes, while a spatial-resolution floor (incipient
        # collapse below grid scale) violates every smaller dt as well, so
        # the controller cascades to dt_min - the blow-up sentinel.
        threshold = energy_jump_tol * e_scale * (abs(dt) / abs(dt0))
        if adaptive and not dt_collapsed and jump > threshold:
            dt *= 0.5
            quiet = 0
            if abs(dt) < dt_min:
                # resolution exhausted: clamp at the floor and keep going
                # until the gradient escape confirms (or the horizon ends)
                dt_collapsed = True
                t_star = state.t
                dt = math.copysign(dt_min, dt)
            continue
        state = trial
        e_prev = E
        if dt_collapsed:
            if math.sqrt(Q) >= 10.0 * grad0:
                verdict = "blowup-detected"
                break
        elif adaptive and abs(dt) < abs(dt0):
            # recover toward the nominal step after sustained quiet steps
            quiet = quiet + 1 if jump < 0.25 * threshold else 0
            if quiet >= 4:
                dt *= 2.0
                quiet = 0
        if boundary_guard is not None:
            om = float(np.sum(grid.weights[outer] * np.abs(state.u.values[outer]) ** 2))
            if om - outer_mass0 > boundary_guard * m0:
                verdict, t_star = "boundary-contaminated", state.t
                break
        if abs(state.t) >= next_record * (1.0 - 1e-9):
            records.append(_diagnostics(state.u, state.t, params, kernel, op,
                                        ground_state))
            if store_fields:
                snapshots.append((state.t, state.u.copy()))
            next_record += cadence
    if state.u.is_finite() and (not records or abs(records[-1].t - state.t) > 1e-12):
        records.append(_diagnostics(state.u, state.t, params, kernel, op,
                                    ground_state))
        if store_fields:
            snapshots.append((state.t, state.u.copy()))
    return RunResult(records=records, final=state, verdict=verdict,
                     t_star=t_star, dt_final=dt, dt_collapsed=dt_collapsed,
                     snapshots=snapshots)


def blowup_detector(records: list, dt_collapsed: bool) -> str:
    """Rule-based verdict on a recorded trajectory.

    blowup-detected: grad norm exceeded 10x its initial value AND the step
    controller collapsed below its floor.  bounded: grad norm stayed within
    2x over the whole horizon.  Otherwise indeterminate.
    """
    if not records:
        raise PreconditionError("empty trajectory")
    g0 = records[0].gradnorm
    gmax = max(r.gradnorm for r in records)
    if gmax >= 10.0 * g0 and dt_collapsed:
        return "blowup-detected"
    if gmax <= 2.0 * g0 and not dt_collapsed:
        return "bounded"
    return "indeterminate"


def scattering_diagnostic(state1: EvolutionState, state2: EvolutionState,
                          prop: Propagator, op: KLambdaOperator) -> float:
    """H^1_lambda distance of the back-propagated states.

    || exp(i t2 K) u(t2) - exp(i t1 K) u(t1) ||_{H^1_lambda}; a decreasing
    sequence over dyadic times supports small-data scattering.
    """
    v2 = prop.propagate(state2.u, -state2.t)
    v1 = prop.propagate(state1.u, -state1.t)
    d = v2.values - v1.values
    df = RadialField(state1.u.grid, d)
    return math.sqrt(mass(df) + op.quadratic_form(d))


def classify(u0: RadialField, ground_state: GroundStateResult,
             params: ModelParams, kernel: RieszKernel,
             op: KLambdaOperator) -> dict:
    """Threshold classification of focusing data against the ground state.

    blowup-predicted when ME < 1 and MG > 1; bounded-predicted when ME < 1
    and MG < 1; outside-theory otherwise.  Also reports the peak location
    t1 = C^{-1/(p-1)} and value of the comparison function
    f(t) = t - (C/p) t^p.
    """
    if params.epsilon != -1:
        raise PreconditionError("classification applies to the focusing sign only")
    rec = _diagnostics(u0, 0.0, params, kernel, op, ground_state)
    me, mg = rec.me, rec.mg
    if me < 1.0 and mg > 1.0:
        verdict = "blowup-predicted"
    elif me < 1.0 and mg < 1.0:
        verdict = "bounded-predicted"
    else:
        verdict = "outside-theory"
    p, C = params.p, ground_state.C
    t1 = C ** (-1.0 / (p - 1.0))
    return {"verdict": verdict, "ME": me, "MG": mg, "MP": rec.mp,
            "t1": t1, "f_t1": (p - 1.0) / p * t1}

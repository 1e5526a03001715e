"""Model parameters and the exponent calculus.

Everything here is plain arithmetic on the tuple (n, lambda, alpha, tau, eps)
and the derived quantities kappa and the critical power p.  The admissible
ranges come in two flavours (a coarser one attached to the well-posedness
theorem and a tighter one attached to the nonlinear-estimate lemma); both are
reported and the downstream feasibility gate takes their conjunction.

Strict inequalities are compared with a slack of ``STRICT_SLACK``: a strict
bound satisfied by less than the slack is reported as *marginal* and does not
count as a pass.  The witness checker is the lenient mirror image (a violation
must exceed the slack to count), which keeps the two decision procedures in
agreement away from constraint boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleError

# Comparison slack for strict/open inequalities (see module docstring).
STRICT_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Core value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """The standing parameter tuple plus derived kappa and critical p."""

    n: int
    lam: float
    alpha: float
    tau: float
    epsilon: int      # +1 defocusing, -1 focusing
    kappa: float
    p: float

    def recompute_ok(self, tol: float = 1e-10) -> bool:
        """Check kappa and p against their defining formulas."""
        kap = kappa_of(self.n, self.lam)
        p = critical_p(self.n, self.alpha, self.tau)
        return abs(kap - self.kappa) <= tol * max(1.0, abs(kap)) and \
            abs(p - self.p) <= tol * max(1.0, abs(p))


@dataclass(frozen=True)
class AdmissiblePair:
    """Strichartz pair (q, r); q may be math.inf with 1/q == 0."""

    q: float
    r: float

    def inv_q(self) -> float:
        return 0.0 if math.isinf(self.q) else 1.0 / self.q

    def scaling_defect(self, n: int) -> float:
        return 2.0 * self.inv_q() + n / self.r - n / 2.0

    def is_admissible(self, n: int, tol: float = 1e-12) -> bool:
        q_ok = math.isinf(self.q) or self.q >= 2.0 - tol
        r_ok = 2.0 - tol <= self.r <= 2.0 * n / (n - 2) + tol
        return q_ok and r_ok and abs(self.scaling_defect(n)) <= tol


@dataclass(frozen=True)
class ExponentWitness:
    """The Strichartz pair plus the auxiliary Hoelder/HLS exponents.

    Reciprocals are the primary representation; the exponents themselves are
    exposed as properties (inf when a reciprocal vanishes).
    """

    q: float
    r: float
    inv_a1: float
    inv_b1: float
    inv_a2: float
    inv_b2: float
    inv_a3: float
    inv_b4: float

    def exponent(self, name: str) -> float:
        inv = getattr(self, "inv_" + name)
        return math.inf if inv == 0.0 else 1.0 / inv

    @property
    def a1(self) -> float: return self.exponent("a1")
    @property
    def b1(self) -> float: return self.exponent("b1")
    @property
    def a2(self) -> float: return self.exponent("a2")
    @property
    def b2(self) -> float: return self.exponent("b2")
    @property
    def a3(self) -> float: return self.exponent("a3")
    @property
    def b4(self) -> float: return self.exponent("b4")


@dataclass(frozen=True)
class Infeasible:
    """Named first violated constraint, e.g. ``rr: tau <= p-2``."""

    constraint: str
    slack: float


@dataclass(frozen=True)
class RangeCheck:
    name: str
    slack: float          # >0 satisfied, <=0 violated (strict reading)
    passed: bool
    marginal: bool


@dataclass(frozen=True)
class RangeReport:
    source: str                       # "theorem" or "lemma"
    checks: tuple
    tau_window: tuple                 # (lower, upper) as displayed
    passed: bool
    disagrees_with_theorem: bool = False

    def check(self, name: str) -> RangeCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def min_margin(self) -> float:
        return min(c.slack for c in self.checks)


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

def kappa_of(n: int, lam: float) -> float:
    return (n - 2 - math.sqrt((n - 2) ** 2 + 4.0 * lam)) / 2.0


def critical_p(n: int, alpha: float, tau: float) -> float:
    return 1.0 + (2.0 - 2.0 * tau + alpha) / (n - 2)


def derive(n: int, lam: float, alpha: float, tau: float, epsilon: int) -> ModelParams:
    """Validate the raw tuple and derive kappa and the critical power."""
    if int(n) != n or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n}")
    n = int(n)
    hardy = -((n - 2) ** 2) / 4.0
    if not lam > hardy:
        raise DomainError(f"lambda must exceed -(n-2)^2/4 = {hardy}, got {lam}")
    if not (0.0 < alpha < n):
        raise DomainError(f"alpha must lie in (0, n) = (0, {n}), got {alpha}")
    if not tau > 0.0:
        raise DomainError(f"tau must be > 0, got {tau}")
    if epsilon not in (+1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    return ModelParams(n=n, lam=float(lam), alpha=float(alpha), tau=float(tau),
                       epsilon=int(epsilon),
                       kappa=kappa_of(n, lam), p=critical_p(n, alpha, tau))


def _strict(name: str, slack: float) -> RangeCheck:
    return RangeCheck(name=name, slack=slack,
                      passed=slack > STRICT_SLACK,
                      marginal=abs(slack) <= STRICT_SLACK)


def _disc(n: int) -> float:
    return math.sqrt(9.0 * n * n + 8.0 * n - 16.0)


def tau_upper_max_term(n: int, kappa: float) -> float:
    """max{(n-4)/2, (n-4)/n, k/(n-2-2k) - n/4} in the tau upper bound."""
    return max((n - 4) / 2.0, (n - 4) / n, kappa / (n - 2 - 2 * kappa) - n / 4.0)


def theorem_kappa_bound(n: int) -> float:
    """Upper bound on 2*kappa in the well-posedness theorem hypothesis."""
    return (n - 2) - 2.0 * (n - 2) / (3 * n - 2 + 2.0 * _disc(n))


def lemma_kappa_bound(n: int) -> float:
    """Upper bound on 2*kappa in the nonlinear-estimate lemma hypothesis."""
    return (5 * n - 4 - _disc(n)) / 2.0


def check_theorem_ranges(params: ModelParams) -> RangeReport:
    """Pass/fail of the theorem-level kappa bound and tau window, with slack.

    The tau window is reported verbatim; positivity of tau is a standing
    assumption and is included as its own check.
    """
    n, kap, tau, alpha = params.n, params.kappa, params.tau, params.alpha
    kb = theorem_kappa_bound(n)
    lo = alpha / 2.0 - (n + 2 + _disc(n)) / 2.0
    hi = alpha / 2.0 - tau_upper_max_term(n, kap)
    checks = (
        _strict("kappa: 2k < theorem bound", kb - 2.0 * kap),
        _strict("tau > 0", tau),
        _strict("tau > window lower", tau - lo),
        _strict("tau < window upper", hi - tau),
    )
    return RangeReport(source="theorem", checks=checks, tau_window=(lo, hi),
                       passed=all(c.passed for c in checks))


def check_lemma_ranges(params: ModelParams) -> RangeReport:
    """Pass/fail of the lemma-level kappa bound and tau window, with slack.

    The reported window is the display derived from the critical-power window
    (lower bound with the /8 denominator).  Two extra constraints that the
    lemma's own derivation enforces but its displayed window omits are checked
    alongside: tau <= p - 2 (exponent ordering in the weighted interpolation
    step) and the tau upper bound coming from the dual-exponent window.  The
    overall pass is the conjunction, so the gate matches the witness search
    exactly.
    """
    n, kap, tau, alpha, p = params.n, params.kappa, params.tau, params.alpha, params.p
    kb = lemma_kappa_bound(n)
    lo = alpha / 2.0 - (n - 4 + _disc(n)) / 8.0
    hi = alpha / 2.0 - tau_upper_max_term(n, kap)
    # tau < n-1 + p*(2p/(2p-1) - n/2), i.e. n/r < (p-tau-1+n)/p after
    # substituting the Strichartz choice of r.
    dual_hi = (n - 1) + p * (2.0 * p / (2.0 * p - 1.0) - n / 2.0)
    checks = (
        _strict("kappa: 2k < lemma bound", kb - 2.0 * kap),
        _strict("tau > 0", tau),
        _strict("tau > window lower", tau - lo),
        _strict("tau < window upper", hi - tau),
        _strict("tau <= p-2", (p - 2.0) - tau),
        _strict("tau < dual-window upper", dual_hi - tau),
    )
    thm = check_theorem_ranges(params)
    return RangeReport(source="lemma", checks=checks, tau_window=(lo, hi),
                       passed=all(c.passed for c in checks),
                       disagrees_with_theorem=thm.passed != all(c.passed for c in checks))


def feasibility_gate(params: ModelParams) -> bool:
    """Conjunction of the theorem and lemma ranges (the stricter gate)."""
    return check_theorem_ranges(params).passed and check_lemma_ranges(params).passed


# ---------------------------------------------------------------------------
# Strichartz pair and the witness search
# ---------------------------------------------------------------------------

def strichartz_r(params: ModelParams) -> AdmissiblePair:
    """The specific admissible pair used by the nonlinear estimates.

    1/q = 1/(2(2p-1)) and n/r = n/2 - 1/(2p-1); the scaling identity
    2/q + n/r = n/2 then holds by construction.
    """
    n, p, kap = params.n, params.p, params.kappa
    if not p > 0.5 + 1.0 / (n - 2 - 2 * kap):
        raise InfeasibleError(
            f"p = {p} must exceed 1/2 + 1/(n-2-2k) = {0.5 + 1.0 / (n - 2 - 2 * kap)}")
    inv_q = 1.0 / (2.0 * (2.0 * p - 1.0))
    n_over_r = n / 2.0 - 1.0 / (2.0 * p - 1.0)
    r = n / n_over_r
    if not (2.0 - 1e-12 <= r <= 2.0 * n / (n - 2) + 1e-12):
        raise InfeasibleError(f"r = {r} outside [2, 2n/(n-2)] = [2, {2 * n / (n - 2)}]")
    return AdmissiblePair(q=1.0 / inv_q, r=r)


def _witness_exponents(params: ModelParams):
    """Reciprocal exponents derived from the Strichartz choice of (q, r)."""
    n, p, tau = params.n, params.p, params.tau
    nr = n / 2.0 - 1.0 / (2.0 * p - 1.0)       # n / r
    inv_r = nr / n
    inv_a1 = ((p - 1) * nr + tau - p + 2.0) / n
    inv_b1 = (p * nr + tau - p) / n
    inv_a2 = ((p - 1) * nr + tau - p + 1.0) / n
    inv_b2 = (p * nr + tau - p + 1.0) / n
    inv_a3 = inv_a1 - inv_r
    inv_b4 = inv_b2 - inv_r
    return nr, inv_r, inv_a1, inv_b1, inv_a2, inv_b2, inv_a3, inv_b4


def _witness_constraints(params: ModelParams) -> list:
    """(label, slack) for every inequality the witness must satisfy.

    Ordered so the headline summarized constraints surface first when several
    fail together.  Slacks are strict-reading: satisfied iff > 0.
    """
    n, p, tau, kap = params.n, params.p, params.tau, params.kappa
    nr, inv_r, ia1, ib1, ia2, ib2, ia3, ib4 = _witness_exponents(params)
    pm2 = p - 2.0
    out: list = []
    add = lambda label, slack: out.append((label, slack))  # noqa: E731

    # (st): (n-2)/(2n) <= 1/r <= 1/2 (1/q and the scaling hold by construction)
    add("st: 1/r >= (n-2)/(2n)", inv_r - (n - 2) / (2.0 * n))
    add("st: 1/r <= 1/2", 0.5 - inv_r)
    # (ka): norm-equivalence windows for 2n/(n+2) and r
    add("ka: (n+2)/(2n) > max(1/n, k/n)", (n + 2) / (2.0 * n) - max(1.0 / n, kap / n))
    add("ka: (n+2)/(2n) < min(1, 1-k/n)", min(1.0, 1.0 - kap / n) - (n + 2) / (2.0 * n))
    add("ka: 1/r > (1+k)/n", inv_r - (1.0 + kap) / n)
    add("ka: 1/r < min(1, 1-k/n)", min(1.0, 1.0 - kap / n) - inv_r)
    # (rr): the merged window, ordered first among the tau constraints so a
    # bare ordering violation is reported under its summarized name
    add("rr: tau > 0", tau)
    add("rr: tau <= p-2", pm2 - tau)
    add("rr: n/r > 1", nr - 1.0)
    add("rr: n/r < (p-tau-2+n)/(p-1)", (p - tau - 2 + n) / (p - 1) - nr)
    add("rr: n/r < (p-tau-1+n)/p", (p - tau - 1 + n) / p - nr)
    # raw Hoelder/HLS/CKN conditions at the derived exponents
    add("c7: 1/a1 > 0", ia1)
    add("c7: 1/a1 < 1", 1.0 - ia1)
    add("c7: 1/b1 > 0", ib1)
    add("c7: 1/b1 < 1", 1.0 - ib1)
    add("c8: 1/((p-1)a1) <= 1/r", inv_r - ia1 / (p - 1))
    add("c8: (tau+1)/(p-1) >= 0", (tau + 1) / (p - 1))
    add("c8: (tau+1)/(p-1) < n/((p-1)a1)", (n * ia1 - (tau + 1)) / (p - 1))
    add("c9: 1/(p b1) <= 1/r", inv_r - ib1 / p)
    add("c9: tau/p < n/(p b1)", (n * ib1 - tau) / p)
    add("c10: 1/a2 > 0", ia2)
    add("c10: 1/a2 < 1", 1.0 - ia2)
    add("c10: 1/b2 > 0", ib2)
    add("c10: 1/b2 < 1", 1.0 - ib2)
    add("c11: 1/((p-1)a2) <= 1/r", inv_r - ia2 / (p - 1))
    add("c11: tau/(p-1) < n/((p-1)a2)", (n * ia2 - tau) / (p - 1))
    add("c12: 1/(p b2) <= 1/r", inv_r - ib2 / p)
    add("c12: (tau+1)/p < n/(p b2)", (n * ib2 - (tau + 1)) / p)
    if pm2 == 0.0:
        add("c2: 1/((p-2)a3) > 0", -math.inf)
    else:
        add("c2: 1/((p-2)a3) > 0", ia3 / pm2)
        add("c2: 1/((p-2)a3) <= 1/r", inv_r - ia3 / pm2)
        add("c2: tau/(p-2) >= 0", tau / pm2)
        add("c2: tau/(p-2) < n/((p-2)a3)", (n * ia3 - tau) / pm2)
    add("c6: 1/((p-1)b4) > 0", ib4 / (p - 1))
    add("c6: 1/((p-1)b4) <= 1/r", inv_r - ib4 / (p - 1))
    add("c6: tau/(p-1) < n/((p-1)b4)", (n * ib4 - tau) / (p - 1))
    # summarized displays (c13)-(c21) at the same point
    add("c13: tau-p+2 <= 0", pm2 - tau)
    add("c13: n/r <= n", n - nr)
    add("c13: n/r > 1", nr - 1.0)
    add("c14: tau <= p", p - tau)
    add("c15: n/r > (p-tau-2)/(p-1)", nr - (p - tau - 2) / (p - 1))
    add("c15: n/r < (p-tau+n)/p", (p - tau + n) / p - nr)
    add("c16: n/r > (p-tau-1)/(p-1)", nr - (p - tau - 1) / (p - 1))
    add("c16: n/r < (p-tau-1+n)/p", (p - tau - 1 + n) / p - nr)
    add("c17: tau-p+1 <= 0", (p - 1.0) - tau)
    if pm2 != 0.0:
        add("c20: n/r > (p-tau-2)/(p-2)", nr - (p - tau - 2) / pm2)
    add("c21: n/r > (p-tau-1)/(p-1)", nr - (p - tau - 1) / (p - 1))
    return out


def find_exponent_witness(params: ModelParams):
    """Search for the exponent witness; Infeasible names the first failure.

    A constraint fails only when violated by more than the comparison slack,
    the lenient mirror of the strict range gates.
    """
    n, p, kap = params.n, params.p, params.kappa
    c26 = p - (0.5 + 1.0 / (n - 2 - 2 * kap))
    if not c26 > -STRICT_SLACK:
        return Infeasible("c26: p > 1/2 + 1/(n-2-2k)", c26)
    for label, slack in _witness_constraints(params):
        if not slack > -STRICT_SLACK:
            return Infeasible(label, slack)
    pair = strichartz_r(params)
    _, inv_r, ia1, ib1, ia2, ib2, ia3, ib4 = _witness_exponents(params)
    return ExponentWitness(q=pair.q, r=pair.r, inv_a1=ia1, inv_b1=ib1,
                           inv_a2=ia2, inv_b2=ib2, inv_a3=ia3, inv_b4=ib4)


def verify_witness(params: ModelParams, witness: ExponentWitness,
                   tol: float = STRICT_SLACK) -> list:
    """Independent re-check of a witness; returns the violated labels.

    Second code path on purpose: the exponents are recomputed from the HLS
    balance equation rather than the Strichartz form, and the inequalities are
    evaluated multiplied out rather than via reciprocals.
    """
    n, p, tau, kap, alpha = params.n, params.p, params.tau, params.kappa, params.alpha
    bad: list = []
    # n/r from the HLS balance: (2p-1) n/r = alpha + 2p - 2tau - 1 + n/2
    nr = (alpha + 2.0 * p - 2.0 * tau - 1.0 + n / 2.0) / (2.0 * p - 1.0)
    if abs(nr - n / witness.r) > 1e-9:
        bad.append("balance: n/r mismatch between HLS and Strichartz forms")
    na1 = (p - 1) * nr + tau - p + 2.0
    nb1 = p * nr + tau - p
    na2 = (p - 1) * nr + tau - p + 1.0
    nb2 = p * nr + tau - p + 1.0
    na3 = na1 - nr
    nb4 = nb2 - nr
    for name, have, want in (("a1", witness.inv_a1, na1 / n),
                             ("b1", witness.inv_b1, nb1 / n),
                             ("a2", witness.inv_a2, na2 / n),
                             ("b2", witness.inv_b2, nb2 / n),
                             ("a3", witness.inv_a3, na3 / n),
                             ("b4", witness.inv_b4, nb4 / n)):
        if abs(have - want) > 1e-9:
            bad.append(f"recompute: 1/{name} mismatch")

    def need(label: str, ok: bool):
        if not ok:
            bad.append(label)

    need("v: 2k < n-2", 2 * kap < n - 2 - tol)
    need("v: p > 2", p > 2.0 - tol)
    need("v: p > 1/2 + 1/(n-2-2k)",
         (p - 0.5) * (n - 2 - 2 * kap) > 1.0 - tol)
    need("v: (n-2)/2 <= n/r", 2.0 * nr >= (n - 2) - tol)
    need("v: n/r <= n/2", 2.0 * nr <= n + tol)
    need("v: n/r > 1+k", nr > 1.0 + kap - tol)
    need("v: n/r < n-k", nr < n - kap + tol)
    need("v: n/r > 1", nr > 1.0 - tol)
    need("v: 0 < n/a1 < n", tol > -na1 and na1 < n + tol)
    need("v: 0 < n/b1 < n", tol > -nb1 and nb1 < n + tol)
    need("v: 0 < n/a2 < n", tol > -na2 and na2 < n + tol)
    need("v: 0 < n/b2 < n", tol > -nb2 and nb2 < n + tol)
    need("v: tau <= p-2", tau <= p - 2.0 + tol)
    need("v: tau <= p-1", tau <= p - 1.0 + tol)
    need("v: tau <= p", tau <= p + tol)
    need("v: tau+1 < n/a1", tau + 1.0 < na1 + tol)
    need("v: tau < n/b1", tau < nb1 + tol)
    need("v: tau < n/a2", tau < na2 + tol)
    need("v: tau+1 < n/b2", tau + 1.0 < nb2 + tol)
    need("v: n/a3 > 0", na3 > -tol)
    need("v: tau < n/a3", tau < na3 + tol)
    need("v: n/a3 <= (p-2) n/r", na3 <= (p - 2.0) * nr + tol)
    need("v: n/b4 > 0", nb4 > -tol)
    need("v: tau < n/b4", tau < nb4 + tol)
    need("v: n/b4 <= (p-1) n/r", nb4 <= (p - 1.0) * nr + tol)
    need("v: HLS sum a1,b1", abs((na1 + nb1) - ((n + 2) / 2.0 + alpha)) < 1e-9)
    need("v: HLS sum a2,b2", abs((na2 + nb2) - ((n + 2) / 2.0 + alpha)) < 1e-9)
    return bad


__all__ = [
    "ModelParams", "AdmissiblePair", "ExponentWitness", "Infeasible",
    "RangeCheck", "RangeReport", "STRICT_SLACK",
    "derive", "kappa_of", "critical_p",
    "check_theorem_ranges", "check_lemma_ranges", "feasibility_gate",
    "theorem_kappa_bound", "lemma_kappa_bound", "tau_upper_max_term",
    "strichartz_r", "find_exponent_witness", "verify_witness",
]

"""Front-ends for the four singular inverse-power potential families.

Each family builds a working polynomial ODE in its natural variable
(r for the inverse quartic and octic, t = r^2 for the inverse sextic,
z = r^2 for the inverse decatic), drives the generic root engine, and maps
roots to the potential couplings, the energy and the closed-form
wavefunction shape.

Exponential shapes used throughout (all rates fixed by the singular tail):

    quartic:  Psi = r^gamma  prod (r - r_i)    exp(-w/2 r^2 + B r - s2d / r)
    sextic:   Psi = r^(3/2+e/s2d) prod (r^2-t_i) exp(-w/2 r^2 - s2d/(2 r^2))
    octic:    Psi = r^beta   prod (r - r_i)    exp(-w/2 r^2 + B r - fh/r
                                                   - g/(2 s2h r^2) - s2h/(3 r^3))
    decatic:  Psi = r^eta    prod (r^2 - z_i)  exp(-w/2 r^2 - c/(2 s2d r^2)
                                                   - s2d/(4 r^4))

with s2d = sqrt(2 d), s2h = sqrt(2 h), fh = (f - g^2/(4h)) / s2h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .bethe import (
    PolyODE,
    RootSet,
    SolverConfig,
    Variable,
    _power_sums,
    bae_residuals,
    compute_w_coefficients,
    solve_bae,
    verify_polynomial_identity,
)
from .errors import (
    ConstraintInfeasible,
    InvalidCase,
    InvalidExponent,
    InvalidParameter,
    NoSolutionFound,
)


class Family(str, Enum):
    QUARTIC = "quartic"
    SEXTIC = "sextic"
    OCTIC = "octic"
    DECATIC = "decatic"


class Case(str, Enum):
    HARMONIC = "harmonic"  # B = 0, omega > 0
    COULOMBIC = "coulombic"  # omega = 0, B < 0
    NONE = "none"


_FREE_KEYS = {
    (Family.QUARTIC, Case.HARMONIC): ("omega", "c", "d"),
    (Family.QUARTIC, Case.COULOMBIC): ("a", "c", "d"),
    (Family.SEXTIC, Case.HARMONIC): ("omega", "e", "d"),
    (Family.OCTIC, Case.HARMONIC): ("omega", "e", "f", "g", "h"),
    (Family.OCTIC, Case.COULOMBIC): ("a", "e", "f", "g", "h"),
    (Family.DECATIC, Case.HARMONIC): ("omega", "b", "c", "d"),
}


@dataclass(frozen=True)
class FamilyProblem:
    """A potential family, case, polynomial degree and free couplings.

    For the sextic and decatic families `ell` is the match target when
    `match_ell` is set; otherwise the effective angular momentum is derived
    and reported as a real number.
    """

    family: Family
    case: Case
    n: int
    ell: float
    free: Mapping[str, float]
    match_ell: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        case = Case(self.case)
        if case is Case.NONE:
            case = Case.HARMONIC
        object.__setattr__(self, "case", case)
        object.__setattr__(self, "free", dict(self.free))
        if self.n < 0:
            raise InvalidParameter("n >= 0 required")
        key = (self.family, self.case)
        if key not in _FREE_KEYS:
            raise InvalidCase(
                f"{self.family.value} does not support case {self.case.value}"
            )
        expected = set(_FREE_KEYS[key])
        got = set(self.free)
        if self.family is Family.DECATIC and self.match_ell:
            expected.discard("omega")
            got.discard("omega")
        if self.family is Family.SEXTIC and self.match_ell:
            expected.discard("omega")
            got.discard("omega")
        if got != expected:
            raise InvalidParameter(
                f"{self.family.value}/{self.case.value} expects couplings "
                f"{sorted(expected)}, got {sorted(set(self.free))}"
            )
        _validate_problem(self)


def _require(cond: bool, constraint: str):
    if not cond:
        raise InvalidParameter(f"constraint violated: {constraint}")


def _validate_problem(problem: FamilyProblem):
    f = problem.free
    fam, case = problem.family, problem.case
    if fam is Family.QUARTIC:
        _require(f["d"] > 0, "d > 0")
        if case is Case.HARMONIC:
            _require(f["omega"] > 0, "omega > 0")
        else:
            _require(f["a"] < 0, "a < 0")
    elif fam is Family.SEXTIC:
        _require(f["d"] > 0, "d > 0")
        if not problem.match_ell:
            _require(f["omega"] > 0, "omega > 0")
    elif fam is Family.OCTIC:
        _require(f["h"] > 0, "h > 0")
        if case is Case.HARMONIC:
            _require(f["omega"] > 0, "omega > 0")
        else:
            _require(f["a"] < 0, "a < 0")
    elif fam is Family.DECATIC:
        _require(f["d"] > 0, "d > 0")
        if not problem.match_ell:
            _require(f["omega"] > 0, "omega > 0")


@dataclass(frozen=True)
class WaveForm:
    """Closed-form wavefunction shape.

    log Psi(r) = leading_exponent * ln r + sum_p exp_coeffs[p] * r^p
                 + ln prod_i (v(r) - t_i)

    with v(r) = r, r^2 or r^2 according to `variable`.
    """

    leading_exponent: float
    exp_coeffs: Mapping[int, float]
    roots: RootSet
    variable: Variable

    def __post_init__(self):
        coeffs = {int(k): float(v) for k, v in self.exp_coeffs.items() if v != 0.0}
        object.__setattr__(self, "exp_coeffs", coeffs)
        if not self.leading_exponent > 0:
            raise InvalidExponent(
                f"leading exponent {self.leading_exponent} must be positive"
            )
        c2 = coeffs.get(2, 0.0)
        if c2 > 0:
            raise InvalidParameter("coefficient of r^2 must be <= 0")
        if c2 == 0.0 and coeffs.get(1, 0.0) >= 0.0:
            raise InvalidParameter("with no r^2 term the r coefficient must be < 0")
        neg = [p for p in coeffs if p < 0]
        if neg and coeffs[min(neg)] >= 0.0:
            raise InvalidParameter("most negative power must have negative coefficient")


@dataclass(frozen=True)
class QESSolution:
    """One exactly-solvable branch: roots, derived couplings, energy, shape."""

    problem: FamilyProblem
    roots: RootSet
    derived: dict
    energy: float
    waveform: WaveForm
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BranchFailure:
    """A root branch that was found but rejected while deriving parameters."""

    roots: RootSet | None
    error: str
    detail: str


# ----------------------------------------------------------------------
# Per-family ingredients
# ----------------------------------------------------------------------


def _quartic_rates(problem: FamilyProblem):
    f = problem.free
    s2d = math.sqrt(2.0 * f["d"])
    gamma = 1.0 + f["c"] / s2d
    if gamma <= 0:
        raise InvalidExponent("1 + c/sqrt(2d) must be positive")
    if problem.case is Case.HARMONIC:
        omega, bexp = f["omega"], 0.0
    else:
        omega, bexp = 0.0, f["a"] / (problem.n + gamma)
    return s2d, gamma, omega, bexp


def _sextic_rates(problem: FamilyProblem, omega=None):
    f = problem.free
    s2d = math.sqrt(2.0 * f["d"])
    xi = f["e"] / s2d
    lead = 1.5 + xi
    if lead <= 0:
        raise InvalidExponent("3/2 + e/sqrt(2d) must be positive")
    if omega is None:
        omega = f["omega"]
    return s2d, xi, lead, omega


def _octic_rates(problem: FamilyProblem):
    f = problem.free
    h = f["h"]
    s2h = math.sqrt(2.0 * h)
    fh = (f["f"] - f["g"] ** 2 / (4.0 * h)) / s2h
    beta = 2.0 + f["e"] / s2h - f["g"] * fh / (2.0 * h)
    if beta <= 0:
        raise InvalidExponent("the leading exponent beta must be positive")
    if problem.case is Case.HARMONIC:
        omega, bexp = f["omega"], 0.0
    else:
        omega, bexp = 0.0, f["a"] / (problem.n + beta)
    return s2h, fh, beta, omega, bexp


def _decatic_rates(problem: FamilyProblem, omega=None):
    f = problem.free
    s2d = math.sqrt(2.0 * f["d"])
    kappa = (f["c"] ** 2 / 16.0) * math.sqrt(2.0 / f["d"] ** 3)
    eta = 2.5 + f["b"] / s2d + kappa
    if eta <= 0:
        raise InvalidExponent("the leading exponent eta must be positive")
    if omega is None:
        if "omega" not in f:
            raise InvalidParameter("omega is required unless match_ell is set")
        omega = f["omega"]
    return s2d, kappa, eta, omega


def build_ode(problem: FamilyProblem, omega: float | None = None):
    """Working ODE (p, q only) and the variable its roots live in.

    `omega` overrides the free coupling while the match-ell outer solve is
    running; normal callers leave it None.
    """
    fam = problem.family
    if fam is Family.QUARTIC:
        s2d, gamma, w, bexp = _quartic_rates(problem)
        q = (2.0 * s2d, 2.0 * gamma, 2.0 * bexp, -2.0 * w, 0.0, 0.0)
        return PolyODE((0.0, 0.0, 1.0, 0.0, 0.0), q), Variable.R
    if fam is Family.SEXTIC:
        s2d, xi, _, w = _sextic_rates(problem, omega)
        q = (s2d, 2.0 + xi, -w, 0.0, 0.0, 0.0)
        return PolyODE((0.0, 0.0, 1.0, 0.0, 0.0), q), Variable.T_EQ_R2
    if fam is Family.OCTIC:
        s2h, fh, beta, w, bexp = _octic_rates(problem)
        g = problem.free["g"]
        q = (2.0 * s2h, 2.0 * g / s2h, 2.0 * fh, 2.0 * beta, 2.0 * bexp, -2.0 * w)
        return PolyODE((0.0, 0.0, 0.0, 0.0, 1.0), q), Variable.R
    if fam is Family.DECATIC:
        s2d, _, eta, w = _decatic_rates(problem, omega)
        q = (s2d, problem.free["c"] / s2d, eta + 0.5, -w, 0.0, 0.0)
        return PolyODE((0.0, 0.0, 0.0, 1.0, 0.0), q), Variable.Z_EQ_R2
    raise InvalidCase(f"unknown family {fam}")


def _sums(roots: RootSet, conj_tol: float = 1e-8):
    arr = roots.as_array()
    if len(arr) == 0:
        return 0.0, 0.0, 0.0, 0.0, 0.0
    return tuple(_power_sums(arr, conj_tol))


def derive_parameters(
    problem: FamilyProblem,
    roots: RootSet,
    omega: float | None = None,
    check_tol: float = 1e-8,
):
    """Map a root branch to (derived couplings, energy, waveform).

    The roots are re-checked against the family root system before any
    constraint is evaluated.
    """
    ode, variable = build_ode(problem, omega)
    if roots.variable is not variable:
        raise InvalidParameter("roots live in the wrong variable for this family")
    if roots.n != problem.n:
        raise InvalidParameter("root count does not match problem degree")
    if roots.n > 0:
        res = float(np.max(np.abs(bae_residuals(ode, roots))))
        if res > check_tol:
            raise InvalidParameter(
                f"roots do not solve the root system (residual {res:.3e})"
            )
    fam, case, n, ell = problem.family, problem.case, problem.n, problem.ell
    s1, s2, s3, s4, pair = _sums(roots)

    if fam is Family.QUARTIC:
        s2d, gamma, w, bexp = _quartic_rates(problem)
        energy = (
            w * (n + 1.5 + problem.free["c"] / s2d)
            if case is Case.HARMONIC
            else -0.5 * bexp * bexp
        )
        a = problem.free["a"] if case is Case.COULOMBIC else -w * (s2d + s1)
        b = 0.5 * (
            gamma * (gamma - 1.0)
            - ell * (ell + 1.0)
            + n * (n - 1.0 + 2.0 * gamma)
            + 2.0 * bexp * (s2d + s1)
            - 2.0 * w * s2
        )
        derived = {"a": a, "b": b} if case is Case.HARMONIC else {"B": bexp, "b": b}
        coeffs = {2: -w / 2.0, 1: bexp, -1: -s2d}
        wave = WaveForm(gamma, coeffs, roots, Variable.R)
        return derived, energy, wave

    if fam is Family.SEXTIC:
        s2d, xi, lead, w = _sextic_rates(problem, omega)
        energy = w * (2.0 * n + 2.0 + xi)
        l2 = 4.0 * n * (n + 1.0 + xi) + (xi + 1.0) ** 2 - 2.0 * w * (s2d + 2.0 * s1)
        if l2 < 0:
            raise ConstraintInfeasible(f"derived (l+1/2)^2 = {l2} < 0")
        derived = {"l_half_sq": l2, "ell": -0.5 + math.sqrt(l2)}
        if problem.match_ell:
            derived["omega"] = w
        coeffs = {2: -w / 2.0, -2: -s2d / 2.0}
        wave = WaveForm(lead, coeffs, roots, Variable.T_EQ_R2)
        return derived, energy, wave

    if fam is Family.OCTIC:
        s2h, fh, beta, w, bexp = _octic_rates(problem)
        g = problem.free["g"]
        energy = w * (n + 0.5 + beta) if case is Case.HARMONIC else -0.5 * bexp * bexp
        a = problem.free["a"] if case is Case.COULOMBIC else -w * (fh + s1)
        b = (
            0.5 * ((beta + ell) * (beta - ell - 1.0) + n * (n + 2.0 * beta - 1.0))
            - g * w / s2h
            - w * s2
            + bexp * (fh + s1)
        )
        c = (
            -w * s3
            + bexp * (g / s2h + s2)
            + (n + beta - 1.0) * (fh + s1)
            - w * s2h
        )
        d = (
            -w * s4
            + bexp * s3
            + (n + beta - 1.0) * s2
            + pair
            + fh * s1
            + g * (2.0 * n + 2.0 * beta - 3.0) / (2.0 * s2h)
            + 0.5 * fh * fh
            + bexp * s2h
        )
        if case is Case.HARMONIC:
            derived = {"a": a, "b": b, "c": c, "d": d}
        else:
            derived = {"B": bexp, "b": b, "c": c, "d": d}
        coeffs = {2: -w / 2.0, 1: bexp, -1: -fh, -2: -g / (2.0 * s2h), -3: -s2h / 3.0}
        wave = WaveForm(beta, coeffs, roots, Variable.R)
        return derived, energy, wave

    if fam is Family.DECATIC:
        s2d, kappa, eta, w = _decatic_rates(problem, omega)
        c = problem.free["c"]
        d = problem.free["d"]
        energy = w * (2.0 * n + eta + 0.5)
        l2 = (
            (eta - 0.5) ** 2
            + 4.0 * n * (n + eta - 0.5)
            - 2.0 * w * (c / s2d + 2.0 * s1)
        )
        if l2 < 0:
            raise ConstraintInfeasible(f"derived (l+1/2)^2 = {l2} < 0")
        a = (
            -2.0 * w * s2
            + (4.0 * n + 2.0 * eta - 3.0) * s1
            + 2.0 * n * c / s2d
            + (c / s2d) * (eta - 1.5)
            - w * s2d
        )
        # The r^-6 coupling the constructed wavefunction actually solves
        # (fixed by the eta that kills the z^-1 term of the working ODE).
        b_pot = s2d * (eta - 2.5) + c * c / (4.0 * d)
        derived = {
            "a": a,
            "b_pot": b_pot,
            "l_half_sq": l2,
            "ell": -0.5 + math.sqrt(l2),
        }
        if problem.match_ell:
            derived["omega"] = w
        coeffs = {2: -w / 2.0, -2: -c / (2.0 * s2d), -4: -s2d / 4.0}
        wave = WaveForm(eta, coeffs, roots, Variable.Z_EQ_R2)
        return derived, energy, wave

    raise InvalidCase(f"unknown family {fam}")


# ----------------------------------------------------------------------
# Pipeline
# ----------------------------------------------------------------------


def _branch_solution(
    problem: FamilyProblem,
    roots: RootSet,
    cfg: SolverConfig,
    omega: float | None = None,
) -> QESSolution:
    derived, energy, wave = derive_parameters(problem, roots, omega)
    ode, _ = build_ode(problem, omega)
    w = compute_w_coefficients(ode, roots, cfg.conj_tol)
    identity = verify_polynomial_identity(ode.with_w(w), roots)
    solution = QESSolution(
        problem,
        roots,
        derived,
        energy,
        wave,
        {
            "bae_residual": roots.bae_residual,
            "separation": roots.separation,
            "identity_residual": identity,
        },
    )
    from . import oracle, wavefunction  # deferred: oracle depends on this module

    solution.diagnostics["schrodinger_residual"] = oracle.schrodinger_residual(solution)
    solution.diagnostics["norm"] = wavefunction.norm_quadrature(solution)
    return solution


def solve_family_detailed(
    problem: FamilyProblem, cfg: SolverConfig = SolverConfig()
) -> tuple[list[QESSolution], list[BranchFailure]]:
    """solve_family plus a record of skipped branches (for scans)."""
    if problem.match_ell and problem.family in (Family.SEXTIC, Family.DECATIC):
        return _solve_match_ell(problem, cfg)
    solutions: list[QESSolution] = []
    failures: list[BranchFailure] = []
    ode, variable = build_ode(problem)
    try:
        branches = solve_bae(ode, problem.n, cfg, variable)
    except NoSolutionFound as exc:
        return [], [BranchFailure(None, type(exc).__name__, str(exc))]
    for roots in branches:
        try:
            solutions.append(_branch_solution(problem, roots, cfg))
        except (ConstraintInfeasible, InvalidExponent, InvalidParameter) as exc:
            failures.append(BranchFailure(roots, type(exc).__name__, str(exc)))
    return solutions, failures


def solve_family(
    problem: FamilyProblem, cfg: SolverConfig = SolverConfig()
) -> list[QESSolution]:
    """One QESSolution per admissible root branch, deterministic for a seed."""
    return solve_family_detailed(problem, cfg)[0]


# ----------------------------------------------------------------------
# Match-ell outer solve (sextic, decatic)
# ----------------------------------------------------------------------


def _l2_of_branch(problem, omega, roots):
    """Derived (l+1/2)^2 at given omega and roots, infeasible values allowed."""
    s1 = _sums(roots)[0]
    if problem.family is Family.SEXTIC:
        s2d, xi, _, _ = _sextic_rates(problem, omega)
        n = problem.n
        return 4.0 * n * (n + 1.0 + xi) + (xi + 1.0) ** 2 - 2.0 * omega * (
            s2d + 2.0 * s1
        )
    s2d, _, eta, _ = _decatic_rates(problem, omega)
    n = problem.n
    c = problem.free["c"]
    return (
        (eta - 0.5) ** 2
        + 4.0 * n * (n + eta - 0.5)
        - 2.0 * omega * (c / s2d + 2.0 * s1)
    )


def _track_branch_step(problem, omega, prev_roots: RootSet, cfg) -> RootSet | None:
    """Re-solve the root system at a nearby omega, warm-started Newton."""
    ode, variable = build_ode(problem, omega)
    n = problem.n
    if n == 0:
        return RootSet(0, (), variable, 0.0, math.inf)
    from .bethe import _accept_candidate, _newton_batch

    start = np.array([prev_roots.roots], dtype=complex)
    local = SolverConfig(
        seed=cfg.seed,
        starts=1,
        box=cfg.box,
        max_iter=60,
        bae_tol=cfg.bae_tol,
        sep_tol=cfg.sep_tol,
        conj_tol=cfg.conj_tol,
        dedup_tol=cfg.dedup_tol,
        denom_tol=cfg.denom_tol,
    )
    rows = _newton_batch(ode, start, local)
    if len(rows) == 0:
        return None
    accepted = _accept_candidate(ode, rows[0], cfg)
    if accepted is None:
        return None
    ordered, res, sep = accepted
    prev = np.array(prev_roots.roots)
    scale = 1.0 + max(float(np.max(np.abs(ordered))), float(np.max(np.abs(prev))))
    if np.max(np.abs(ordered - prev)) > 0.6 * scale:
        return None  # jumped to a different branch
    return RootSet(n, tuple(complex(z) for z in ordered), variable, res, sep)


class _BranchTracker:
    """Follow one root branch continuously in omega (small geometric hops)."""

    def __init__(self, problem, omega0, roots0: RootSet, cfg):
        self.problem = problem
        self.cfg = cfg
        self.omega = omega0
        self.roots = roots0

    def goto(self, omega: float) -> RootSet | None:
        if self.problem.n == 0:
            self.omega = omega
            return self.roots
        hops = max(1, math.ceil(abs(math.log(omega / self.omega)) / 0.2))
        roots, om_from = self.roots, self.omega
        for j in range(1, hops + 1):
            om = om_from * (omega / om_from) ** (j / hops)
            roots = _track_branch_step(self.problem, om, roots, self.cfg)
            if roots is None:
                return None
        self.omega, self.roots = omega, roots
        return roots


def _solve_match_ell(problem: FamilyProblem, cfg: SolverConfig):
    """Outer scalar solve on omega so that (l+1/2)^2 hits the requested ell.

    Brackets the mismatch along each tracked branch (scanning down from the
    starting omega, then up), then bisects the bracket to machine width.
    """
    target = (problem.ell + 0.5) ** 2
    omega_min, omega_max = 1e-6, 1.0e3
    omega0 = float(problem.free.get("omega", 1.0))
    ode0, variable = build_ode(problem, omega0)
    solutions: list[QESSolution] = []
    failures: list[BranchFailure] = []
    try:
        branches = solve_bae(ode0, problem.n, cfg, variable)
    except NoSolutionFound as exc:
        return [], [BranchFailure(None, type(exc).__name__, str(exc))]

    for branch in branches:
        tracker = _BranchTracker(problem, omega0, branch, cfg)

        def mismatch(omega: float) -> float | None:
            roots = tracker.goto(omega)
            if roots is None:
                return None
            return _l2_of_branch(problem, omega, roots) - target

        f0 = mismatch(omega0)
        bracket = None
        if f0 is not None:
            if f0 == 0.0:
                bracket = (omega0, omega0)
            else:
                for direction in (0.8, 1.25):
                    om_prev, f_prev = omega0, f0
                    tracker.goto(omega0)
                    om = omega0
                    while omega_min <= om * direction <= omega_max:
                        om = om * direction
                        f = mismatch(om)
                        if f is None:
                            break
                        if f_prev * f <= 0.0:
                            bracket = (min(om_prev, om), max(om_prev, om))
                            break
                        om_prev, f_prev = om, f
                    if bracket is not None:
                        break
        if bracket is None:
            failures.append(
                BranchFailure(
                    branch,
                    "ConstraintInfeasible",
                    "no omega in (0, 1e3] matches the requested ell on this branch",
                )
            )
            continue
        lo, hi = bracket
        flo = mismatch(lo)
        for _ in range(200):
            if hi - lo <= 4.0 * math.ulp(max(abs(lo), abs(hi))):
                break
            mid = 0.5 * (lo + hi)
            fm = mismatch(mid)
            if fm is None or fm == 0.0:
                lo = hi = mid
                break
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
        omega_star = 0.5 * (lo + hi)
        final = mismatch(omega_star)
        if final is None or abs(final) > 1e-8:
            failures.append(
                BranchFailure(branch, "ConstraintInfeasible", "outer solve stalled")
            )
            continue
        try:
            solutions.append(_branch_solution(problem, tracker.roots, cfg, omega_star))
        except (ConstraintInfeasible, InvalidExponent, InvalidParameter) as exc:
            failures.append(BranchFailure(branch, type(exc).__name__, str(exc)))
    solutions.sort(
        key=lambda s: tuple(np.array(s.roots.roots).real)
        + tuple(np.array(s.roots.roots).imag)
    )
    return solutions, failures


# ----------------------------------------------------------------------
# Octic reduction limits
# ----------------------------------------------------------------------


class ReductionLimit(str, Enum):
    TO_QUARTIC = "to_quartic"
    TO_SEXTIC = "to_sextic"


@dataclass(frozen=True)
class ReductionReport:
    eps: float
    limit: ReductionLimit
    target: FamilyProblem
    diffs: dict
    matched: int


def _rescaled_octic(problem: FamilyProblem, limit: ReductionLimit, eps: float):
    """Rebuild the octic problem at scale eps keeping the limit invariants.

    The invariants (beta, fh, g/s2h) are constant along the limit path, so
    any point on the path determines the whole curve.
    """
    s2h, fh, beta, omega, _ = _octic_rates(problem)
    gsig = problem.free["g"] / s2h
    sig = eps
    h = 0.5 * sig * sig
    if limit is ReductionLimit.TO_QUARTIC:
        if abs(gsig) > 1e-12:
            raise InvalidParameter("TO_QUARTIC path requires g = 0")
        g = 0.0
        f = fh * sig
    else:
        if abs(fh) > 1e-12:
            raise InvalidParameter("TO_SEXTIC path requires f = g^2/(4h)")
        g = gsig * sig
        f = 0.5 * gsig * gsig
    e = (beta - 2.0 + g * fh / (sig * sig)) * sig  # g*fh/sig^2 is 0 on both paths
    free = {"omega": omega, "e": e, "f": f, "g": g, "h": h}
    if problem.case is Case.COULOMBIC:
        free = {"a": problem.free["a"], "e": e, "f": f, "g": g, "h": h}
    return FamilyProblem(Family.OCTIC, problem.case, problem.n, problem.ell, free)


def _reduction_target(problem: FamilyProblem, limit: ReductionLimit) -> FamilyProblem:
    s2h, fh, beta, omega, _ = _octic_rates(problem)
    if limit is ReductionLimit.TO_QUARTIC:
        if fh <= 0:
            raise InvalidParameter("TO_QUARTIC path requires fh > 0")
        d = 0.5 * fh * fh
        c = (beta - 1.0) * fh
        if problem.case is Case.COULOMBIC:
            free = {"a": problem.free["a"], "c": c, "d": d}
        else:
            free = {"omega": omega, "c": c, "d": d}
        return FamilyProblem(
            Family.QUARTIC, problem.case, problem.n, problem.ell, free
        )
    gsig = problem.free["g"] / s2h
    if gsig <= 0:
        raise InvalidParameter("TO_SEXTIC path requires g > 0")
    if problem.n % 2:
        raise InvalidParameter("TO_SEXTIC comparison needs an even octic degree")
    d_s = 0.5 * gsig * gsig
    e_s = (beta - 1.5) * gsig
    return FamilyProblem(
        Family.SEXTIC,
        Case.HARMONIC,
        problem.n // 2,
        problem.ell,
        {"omega": omega, "e": e_s, "d": d_s},
    )


def _quantities(sol: QESSolution, limit: ReductionLimit, octic_side: bool):
    if limit is ReductionLimit.TO_QUARTIC:
        keys = ("energy", "a", "b", "c", "d", "exponent")
        if octic_side:
            dv = sol.derived
            a = dv.get("a", sol.problem.free.get("a"))
            return dict(
                energy=sol.energy,
                a=a,
                b=dv["b"],
                c=dv["c"],
                d=dv["d"],
                exponent=sol.waveform.leading_exponent,
            )
        dv = sol.derived
        a = dv.get("a", sol.problem.free.get("a"))
        return dict(
            energy=sol.energy,
            a=a,
            b=dv["b"],
            c=sol.problem.free["c"],
            d=sol.problem.free["d"],
            exponent=sol.waveform.leading_exponent,
        )
    if octic_side:
        dv = sol.derived
        ell = sol.problem.ell
        l2_eff = ell * (ell + 1.0) + 2.0 * dv["b"] + 0.25
        a = dv.get("a", sol.problem.free.get("a"))
        return dict(
            energy=sol.energy,
            a=a,
            c=dv["c"],
            d=dv["d"],
            l_half_sq=l2_eff,
            exponent=sol.waveform.leading_exponent,
        )
    return dict(
        energy=sol.energy,
        a=0.0,
        c=0.0,
        d=sol.problem.free["e"],
        l_half_sq=sol.derived["l_half_sq"],
        exponent=sol.waveform.leading_exponent,
    )


def reduction_check(
    problem: FamilyProblem,
    limit: ReductionLimit,
    eps: float,
    cfg: SolverConfig = SolverConfig(),
) -> ReductionReport:
    """Compare octic-derived quantities against the quartic/sextic limit.

    The octic problem is rebuilt with the vanishing couplings at magnitude
    eps along the path that keeps (beta, fh, g/sqrt(2h)) fixed; eps = 0 is
    handled as an exact call into the target family (zero differences).
    """
    if problem.family is not Family.OCTIC:
        raise InvalidParameter("reduction_check expects an octic problem")
    limit = ReductionLimit(limit)
    target = _reduction_target(problem, limit)
    target_solutions = solve_family(target, cfg)
    if eps == 0.0:
        keys = _quantities(target_solutions[0], limit, octic_side=False).keys() if target_solutions else ()
        return ReductionReport(
            0.0, limit, target, {k: 0.0 for k in keys}, len(target_solutions)
        )
    octic = _rescaled_octic(problem, limit, eps)
    octic_solutions = solve_family(octic, cfg)
    # Every target branch must be the limit of some octic branch; extra
    # octic branches (roots collapsing with eps) have no counterpart.
    diffs: dict[str, float] = {}
    matched = 0
    for tsol in target_solutions:
        tq = _quantities(tsol, limit, octic_side=False)
        best = None
        for osol in octic_solutions:
            oq = _quantities(osol, limit, octic_side=True)
            score = sum(abs(oq[k] - tq[k]) for k in tq)
            if best is None or score < best[0]:
                best = (score, oq)
        if best is None:
            continue
        matched += 1
        for k in tq:
            diffs[k] = max(diffs.get(k, 0.0), abs(best[1][k] - tq[k]))
    return ReductionReport(eps, limit, target, diffs, matched)

"""Generic functional-Bethe-ansatz engine.

Works on second-order ODEs  P(t) S'' + Q(t) S' + W(t) S = 0  with polynomial
coefficients of degree at most (4, 5, 4).  A degree-n polynomial
S(t) = prod_i (t - t_i) with distinct roots solves the equation exactly when
the roots satisfy the residue conditions

    sum_{j != i} 2 / (t_i - t_j) + Q(t_i) / P(t_i) = 0,    i = 1..n,

and W is assembled from the root power sums.  The module solves the root
system by batched multi-start damped Newton and verifies candidate solutions
by exact polynomial arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DenominatorBlowup, NonRealCoefficients, NoSolutionFound
from .polynomials import poly_from_roots, polyadd, polyder, polymul, polyval


class Variable(str, Enum):
    """Which radial variable the polynomial roots live in."""

    R = "r"
    T_EQ_R2 = "t=r^2"
    Z_EQ_R2 = "z=r^2"


@dataclass(frozen=True)
class PolyODE:
    """Coefficient arrays (ascending) of P, Q and optionally W."""

    p: tuple
    q: tuple
    w: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", _pad(self.p, 5, "p"))
        object.__setattr__(self, "q", _pad(self.q, 6, "q"))
        if self.w is not None:
            object.__setattr__(self, "w", _pad(self.w, 5, "w"))
        if not any(c != 0.0 for c in self.p):
            raise ValueError("P(t) must not be identically zero")

    def with_w(self, w) -> "PolyODE":
        return PolyODE(self.p, self.q, tuple(w))


def _pad(coeffs, length, name):
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) > length:
        raise ValueError(f"{name} accepts at most {length} coefficients")
    return coeffs + (0.0,) * (length - len(coeffs))


@dataclass(frozen=True)
class RootSet:
    """A distinct, conjugate-closed solution of the root system."""

    n: int
    roots: tuple
    variable: Variable
    bae_residual: float
    separation: float

    def as_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=complex)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and multi-start settings for the Newton root search."""

    seed: int = 0
    starts: int = 200
    box: float = 20.0
    max_iter: int = 100
    bae_tol: float = 1e-10
    ident_tol: float = 1e-10
    sep_tol: float = 1e-8
    conj_tol: float = 1e-8
    dedup_tol: float = 1e-6
    denom_tol: float = 1e-12


def _canonical_order(roots: np.ndarray) -> np.ndarray:
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _power_sums(roots, conj_tol: float):
    """Real power sums s1..s4 and the pair sum, in canonical root order.

    Summation in canonical order makes the result exactly permutation
    invariant.  Raises NonRealCoefficients if any sum has an imaginary part
    above tolerance (the root set is then not conjugation closed).
    """
    arr = _canonical_order(np.asarray(roots, dtype=complex))
    sums = [np.sum(arr**k) for k in (1, 2, 3, 4)]
    s1 = sums[0]
    pair = (s1 * s1 - sums[1]) / 2.0
    out = []
    for val in sums + [pair]:
        if abs(val.imag) > conj_tol * max(1.0, abs(val)):
            raise NonRealCoefficients(
                f"power sum {val} has imaginary part above {conj_tol}"
            )
        out.append(val.real)
    return out  # s1, s2, s3, s4, pair


def _roots_of(roots_or_rootset):
    if isinstance(roots_or_rootset, RootSet):
        return np.array(roots_or_rootset.roots, dtype=complex)
    return np.asarray(roots_or_rootset, dtype=complex)


def compute_w_coefficients(ode: PolyODE, roots, conj_tol: float = 1e-8):
    """W coefficients (w0..w4) that admit S(t) = prod (t - t_i) as solution.

    Evaluates the closing formulas on the root power sums; every term either
    carries a factor n or a root sum, so n = 0 returns all zeros.
    """
    arr = _roots_of(roots)
    n = len(arr)
    p0, p1, p2, p3, p4 = ode.p
    q0, q1, q2, q3, q4, q5 = ode.q
    if n == 0:
        return (0.0, 0.0, 0.0, 0.0, 0.0)
    s1, s2, s3, s4, pair = _power_sums(arr, conj_tol)
    w4 = -n * q5
    w3 = -q5 * s1 - n * q4
    w2 = -q5 * s2 - q4 * s1 - n * (n - 1) * p4 - n * q3
    w1 = (
        -q5 * s3
        - q4 * s2
        - (2.0 * (n - 1) * p4 + q3) * s1
        - n * (n - 1) * p3
        - n * q2
    )
    w0 = (
        -q5 * s4
        - q4 * s3
        - (q3 + 2.0 * (n - 1) * p4) * s2
        - 2.0 * p4 * pair
        - (2.0 * (n - 1) * p3 + q2) * s1
        - n * (n - 1) * p2
        - n * q1
    )
    return (w0, w1, w2, w3, w4)


def bae_residuals(
    ode: PolyODE,
    roots,
    denom_tol: float = 1e-12,
    sep_tol: float = 1e-8,
) -> np.ndarray:
    """Residuals sum_{j!=i} 2/(t_i - t_j) + Q(t_i)/P(t_i), one per root.

    All residuals vanish exactly when the roots solve the root system.
    Complex roots give complex residuals; callers usually take the max norm.
    """
    arr = _roots_of(roots)
    n = len(arr)
    if n == 0:
        return np.zeros(0, dtype=complex)
    pv = polyval(ode.p, arr)
    if np.min(np.abs(pv)) < denom_tol:
        raise DenominatorBlowup("a root coincides with a zero of P(t)")
    if n > 1:
        diff = arr[:, None] - arr[None, :]
        off = ~np.eye(n, dtype=bool)
        if np.min(np.abs(diff[off])) < sep_tol:
            raise DenominatorBlowup("roots are closer than sep_tol")
        pair_term = np.where(off, 2.0 / np.where(off, diff, 1.0), 0.0).sum(axis=1)
    else:
        pair_term = np.zeros(1, dtype=complex)
    return pair_term + polyval(ode.q, arr) / pv


def verify_polynomial_identity(ode: PolyODE, roots) -> float:
    """Scaled max coefficient of P S'' + Q S' + W S, expanded exactly.

    S is built from the roots by coefficient convolution; a valid solution
    yields a value at rounding level.  Requires ode.w to be set.
    """
    if ode.w is None:
        raise ValueError("ode.w must be set (use compute_w_coefficients)")
    arr = _roots_of(roots)
    s = poly_from_roots(arr)
    scale_s = max(1.0, float(np.max(np.abs(s))))
    if float(np.max(np.abs(s.imag))) > 1e-8 * scale_s:
        raise NonRealCoefficients("polynomial factor has complex coefficients")
    s = s.real
    s1 = np.asarray(polyder(s))
    s2 = np.asarray(polyder(s1))
    total = polyadd(polymul(ode.p, s2), polymul(ode.q, s1), polymul(ode.w, s))
    scale = max(
        1.0,
        max(abs(c) for c in ode.p),
        max(abs(c) for c in ode.q),
        max(abs(c) for c in ode.w),
        scale_s,
    )
    return float(np.max(np.abs(total))) / scale


# ----------------------------------------------------------------------
# Multi-start Newton solver
#
# Two complementary passes feed one candidate pool: Newton on the residue
# map in root space, and Newton on the equivalent square system in monic
# coefficient space.  The coefficient pass works in real arithmetic, so
# conjugation-closed root sets (real polynomial factors) are reached from
# real starts without any pole structure in the way.
# ----------------------------------------------------------------------


def _rational_tables(ode: PolyODE):
    return ode.p, polyder(ode.p), ode.q, polyder(ode.q)


def _rational(tables, t):
    """Q/P and d/dt (Q/P) at complex t (vectorized)."""
    p, pd, q, qd = tables
    pv = polyval(p, t)
    qv = polyval(q, t)
    pdv = polyval(pd, t)
    qdv = polyval(qd, t)
    f = qv / pv
    fp = (qdv * pv - qv * pdv) / (pv * pv)
    return f, fp


def _residual_batch(tables, T: np.ndarray) -> np.ndarray:
    m, n = T.shape
    f, _ = _rational(tables, T)
    if n == 1:
        return f
    diff = T[:, :, None] - T[:, None, :]
    off = ~np.eye(n, dtype=bool)
    safe = np.where(off[None, :, :], diff, 1.0)
    inv = np.where(off[None, :, :], 1.0 / safe, 0.0)
    return 2.0 * inv.sum(axis=2) + f


def _jacobian_batch(tables, T: np.ndarray) -> np.ndarray:
    m, n = T.shape
    _, fp = _rational(tables, T)
    if n == 1:
        return fp[:, :, None]
    diff = T[:, :, None] - T[:, None, :]
    off = ~np.eye(n, dtype=bool)
    safe = np.where(off[None, :, :], diff, 1.0)
    inv2 = np.where(off[None, :, :], 1.0 / (safe * safe), 0.0)
    jac = 2.0 * inv2
    idx = np.arange(n)
    jac[:, idx, idx] = -2.0 * inv2.sum(axis=2) + fp
    return jac


def _newton_batch(ode: PolyODE, starts: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Damped Newton on all starts simultaneously; returns converged rows.

    Residuals are carried between iterations and the line search only
    re-evaluates rows that still reject their step; rows that cannot make
    progress after repeated halvings are dropped.
    """
    tables = _rational_tables(ode)
    T = starts.copy()
    m, n = T.shape
    inner_tol = min(1e-13, cfg.bae_tol * 1e-2)
    radius = _escape_radius(cfg)
    with np.errstate(all="ignore"):
        R = _residual_batch(tables, T)
        norms = np.max(np.abs(R), axis=1)
        alive = np.isfinite(norms)
        done = alive & (norms < inner_tol)
        for _ in range(cfg.max_iter):
            act = alive & ~done
            if not act.any():
                break
            Ta, Ra = T[act], R[act]
            J = _jacobian_batch(tables, Ta)
            try:
                step = np.linalg.solve(J, Ra[..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.array(
                    [np.linalg.lstsq(Ji, Ri, rcond=None)[0] for Ji, Ri in zip(J, Ra)]
                )
            # Cap runaway steps before damping.
            mags = np.max(np.abs(step), axis=1)
            cap = 10.0 * (1.0 + np.max(np.abs(Ta), axis=1))
            scale = np.where(mags > cap, cap / np.where(mags > 0, mags, 1.0), 1.0)
            step = step * scale[:, None]
            base = np.sum(np.abs(Ra) ** 2, axis=1)
            lam = np.ones(len(step))
            trial = Ta - step
            Rt = _residual_batch(tables, trial)
            ok = np.isfinite(np.sum(np.abs(Rt) ** 2, axis=1)) & (
                np.sum(np.abs(Rt) ** 2, axis=1) <= base * (1.0 - 1e-4 * lam) + 1e-300
            )
            for _bt in range(18):
                if ok.all():
                    break
                idx = np.nonzero(~ok)[0]
                lam[idx] *= 0.5
                trial[idx] = Ta[idx] - lam[idx, None] * step[idx]
                Rt[idx] = _residual_batch(tables, trial[idx])
                val = np.sum(np.abs(Rt[idx]) ** 2, axis=1)
                ok[idx] = np.isfinite(val) & (
                    val <= base[idx] * (1.0 - 1e-4 * lam[idx]) + 1e-300
                )
            act_idx = np.nonzero(act)[0]
            stalled = act_idx[~ok]
            alive[stalled] = False
            moved = act_idx[ok]
            T[moved] = trial[ok]
            R[moved] = Rt[ok]
            norms[moved] = np.max(np.abs(Rt[ok]), axis=1)
            escaped = np.max(np.abs(T[moved]), axis=1) > radius
            fresh = np.isfinite(norms[moved]) & ~escaped
            alive[moved] &= fresh
            done[moved] = alive[moved] & (norms[moved] < inner_tol)
    good = alive & np.isfinite(norms) & (norms < cfg.bae_tol)
    return T[good]


def _coefficient_residual(ode: PolyODE, A: np.ndarray) -> np.ndarray:
    """Low-order coefficients of P S'' + Q S' + W S for monic S (batched).

    A holds the n non-leading real coefficients of S per row; W is built
    from power sums obtained through Newton's identities, which makes the
    top five coefficients of the expansion vanish identically and leaves a
    square n-equation system whose zeros are the root-system solutions.
    """
    m, n = A.shape
    S = np.concatenate([A, np.ones((m, 1))], axis=1)
    S1 = S[:, 1:] * np.arange(1, n + 1)
    S2 = S1[:, 1:] * np.arange(1, n) if n >= 2 else np.zeros((m, 0))
    # Elementary symmetric values e_k = (-1)^k * coefficient a_{n-k}.
    e = np.zeros((m, 5))
    for k in range(1, min(n, 4) + 1):
        e[:, k] = (-1.0) ** k * A[:, n - k]
    p1 = e[:, 1]
    p2 = e[:, 1] * p1 - 2.0 * e[:, 2]
    p3 = e[:, 1] * p2 - e[:, 2] * p1 + 3.0 * e[:, 3]
    p4 = e[:, 1] * p3 - e[:, 2] * p2 + e[:, 3] * p1 - 4.0 * e[:, 4]
    pair = e[:, 2]
    p0_, p1_, p2_, p3_, p4_ = ode.p
    q0_, q1_, q2_, q3_, q4_, q5_ = ode.q
    w = np.empty((m, 5))
    w[:, 4] = -n * q5_
    w[:, 3] = -q5_ * p1 - n * q4_
    w[:, 2] = -q5_ * p2 - q4_ * p1 - n * (n - 1) * p4_ - n * q3_
    w[:, 1] = (
        -q5_ * p3
        - q4_ * p2
        - (2.0 * (n - 1) * p4_ + q3_) * p1
        - n * (n - 1) * p3_
        - n * q2_
    )
    w[:, 0] = (
        -q5_ * p4
        - q4_ * p3
        - (q3_ + 2.0 * (n - 1) * p4_) * p2
        - 2.0 * p4_ * pair
        - (2.0 * (n - 1) * p3_ + q2_) * p1
        - n * (n - 1) * p2_
        - n * q1_
    )
    total = np.zeros((m, n + 5))
    for k, c in enumerate(ode.p):
        if c != 0.0 and S2.shape[1]:
            total[:, k : k + S2.shape[1]] += c * S2
    for k, c in enumerate(ode.q):
        if c != 0.0:
            total[:, k : k + S1.shape[1]] += c * S1
    for k in range(5):
        total[:, k : k + n + 1] += w[:, k : k + 1] * S
    return total[:, :n]


def _coefficient_newton(ode: PolyODE, starts: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Damped Newton on the coefficient-space system; Jacobian by forward
    differences (the system is polynomial and smooth)."""
    A = starts.copy()
    m, n = A.shape
    with np.errstate(all="ignore"):
        for _ in range(cfg.max_iter):
            R = _coefficient_residual(ode, A)
            norms = np.max(np.abs(R), axis=1)
            act = np.isfinite(norms) & (norms >= 1e-13)
            if not act.any():
                break
            Aa, Ra = A[act], R[act]
            J = np.empty((len(Aa), n, n))
            for j in range(n):
                h = 1e-7 * (1.0 + np.abs(Aa[:, j]))
                Ah = Aa.copy()
                Ah[:, j] += h
                J[:, :, j] = (_coefficient_residual(ode, Ah) - Ra) / h[:, None]
            try:
                step = np.linalg.solve(J, Ra[..., None])[..., 0]
            except np.linalg.LinAlgError:
                break
            base = np.sum(Ra * Ra, axis=1)
            lam = np.ones(len(step))
            trial = Aa - step
            for _bt in range(25):
                Rt = _coefficient_residual(ode, trial)
                val = np.sum(Rt * Rt, axis=1)
                ok = np.isfinite(val) & (val <= base + 1e-300)
                if ok.all():
                    break
                lam = np.where(ok, lam, 0.5 * lam)
                trial = Aa - lam[:, None] * step
            A[act] = trial
        R = _coefficient_residual(ode, A)
        norms = np.max(np.abs(R), axis=1)
    return A[np.isfinite(norms) & (norms < 1e-9)]


def _coefficient_starts(n: int, cfg: SolverConfig) -> np.ndarray:
    """Real coefficient starts built from random real/conjugate-pair roots."""
    starts = np.empty((cfg.starts, n))
    for k in range(cfg.starts):
        rng = np.random.default_rng([cfg.seed, 1_000_003 + k])
        box = cfg.box / (4.0 ** (k % 4))
        roots = []
        i = 0
        while i < n:
            if i + 1 < n and rng.random() < 0.5:
                re = rng.uniform(-box, box)
                im = rng.uniform(0.05, max(0.2, box))
                roots.extend([re + 1j * im, re - 1j * im])
                i += 2
            else:
                roots.append(complex(rng.uniform(-box, box)))
                i += 1
        coeffs = poly_from_roots(np.array(roots)).real
        starts[k] = coeffs[:n]
    return starts


def _make_starts(n: int, cfg: SolverConfig) -> np.ndarray:
    """Seeded multi-scale starts: per-start RNG stream from (seed, index).

    Real parts are drawn from boxes of geometrically shrinking half-width so
    root sets living on very different scales all receive coverage;
    imaginary parts are seeded at 0 and +-1.
    """
    starts = np.empty((cfg.starts, n), dtype=complex)
    for k in range(cfg.starts):
        rng = np.random.default_rng([cfg.seed, k])
        box = cfg.box / (4.0 ** (k % 4))
        if n >= 2 and k % 3 == 2:
            # Conjugate-paired start: Newton preserves the symmetry, which
            # targets conjugation-closed solutions directly.
            half = (n + 1) // 2
            re_h = rng.uniform(-box, box, size=half)
            im_h = rng.choice(np.array([0.25, 0.5, 1.0, 2.0]), size=half)
            re = np.repeat(re_h, 2)[:n]
            im = np.column_stack([im_h, -im_h]).ravel()[:n]
            if n % 2:
                im[-1] = 0.0
        else:
            re = rng.uniform(-box, box, size=n)
            im = rng.choice(np.array([0.0, 1.0, -1.0]), size=n, p=[0.5, 0.25, 0.25])
        starts[k] = re + 1j * im
    return starts


def _escape_radius(cfg: SolverConfig) -> float:
    # Beyond this, a small residual just means Q/P decayed along a diverging
    # Newton path (possible when deg Q < deg P), not that a solution exists.
    return 50.0 * max(1.0, cfg.box)


def _accept_candidate(ode: PolyODE, roots: np.ndarray, cfg: SolverConfig):
    """Apply distinctness, conjugation-closure, denominator and identity
    filters; every accepted set passes both independent checks."""
    n = len(roots)
    if np.max(np.abs(roots)) > _escape_radius(cfg):
        return None
    if n > 1:
        diff = roots[:, None] - roots[None, :]
        off = ~np.eye(n, dtype=bool)
        sep = float(np.min(np.abs(diff[off])))
    else:
        sep = math.inf
    if sep <= cfg.sep_tol:
        return None
    if np.min(np.abs(polyval(ode.p, roots))) < cfg.denom_tol:
        return None
    ordered = _canonical_order(roots)
    conj = _canonical_order(np.conj(roots))
    if np.max(np.abs(ordered - conj)) > cfg.conj_tol:
        return None
    try:
        res = float(np.max(np.abs(bae_residuals(ode, ordered, cfg.denom_tol, cfg.sep_tol))))
    except DenominatorBlowup:
        return None
    if res >= cfg.bae_tol:
        return None
    try:
        w = compute_w_coefficients(ode, ordered, cfg.conj_tol)
        if verify_polynomial_identity(ode.with_w(w), ordered) >= cfg.ident_tol:
            return None
    except NonRealCoefficients:
        return None
    return ordered, res, sep


def solve_bae(
    ode: PolyODE,
    n: int,
    cfg: SolverConfig = SolverConfig(),
    variable: Variable = Variable.R,
) -> list[RootSet]:
    """All distinct conjugate-closed solutions of the degree-n root system.

    Multi-start damped Newton with per-start RNG streams derived from
    (seed, start index); converged points are deduplicated and the list is
    sorted by the canonical key (sorted real parts, then imaginary parts),
    so the output is deterministic for a fixed seed.

    Raises NoSolutionFound when n > 0 and no start converges at all.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return [RootSet(0, (), variable, 0.0, math.inf)]
    converged = list(_newton_batch(ode, _make_starts(n, cfg), cfg))
    coeff_rows = _coefficient_newton(ode, _coefficient_starts(n, cfg), cfg)
    for row in coeff_rows:
        roots = np.roots(np.concatenate([row, [1.0]])[::-1])
        if np.all(np.isfinite(roots)):
            converged.append(roots.astype(complex))
    if len(converged) == 0:
        raise NoSolutionFound(f"no Newton start converged for n={n}")
    # Deduplicate on canonically ordered roots.
    reps: list[np.ndarray] = []
    for row in converged:
        ordered = _canonical_order(np.asarray(row))
        if not np.all(np.isfinite(ordered)):
            continue
        if any(np.max(np.abs(ordered - r)) < cfg.dedup_tol for r in reps):
            continue
        reps.append(ordered)
    # Polish each representative with undamped Newton until the step (a
    # direct estimate of the remaining root error) is at rounding level.
    tables = _rational_tables(ode)
    results = []
    with np.errstate(all="ignore"):
        for rep in reps:
            T = rep[None, :].copy()
            for _ in range(8):
                R = _residual_batch(tables, T)
                if not np.all(np.isfinite(R)):
                    break
                J = _jacobian_batch(tables, T)
                try:
                    step = np.linalg.solve(J, R[..., None])[..., 0]
                except np.linalg.LinAlgError:
                    break
                if not np.all(np.isfinite(step)):
                    break
                T = T - step
                if np.max(np.abs(step)) < 1e-15 * (1.0 + np.max(np.abs(T))):
                    break
            cand = T[0] if np.all(np.isfinite(T)) else rep
            accepted = _accept_candidate(ode, cand, cfg)
            if accepted is None:
                accepted = _accept_candidate(ode, rep, cfg)
            if accepted is not None:
                results.append(accepted)
    # Deduplicate again after polishing, then sort canonically.
    final: list[tuple] = []
    for ordered, res, sep in results:
        if any(
            np.max(np.abs(ordered - np.array(f[0]))) < cfg.dedup_tol for f in final
        ):
            continue
        final.append((ordered, res, sep))
    final.sort(
        key=lambda item: tuple(item[0].real) + tuple(item[0].imag)
    )
    return [
        RootSet(n, tuple(complex(z) for z in ordered), variable, res, sep)
        for ordered, res, sep in final
    ]

"""Isomorphism computation and empirical behavior-equivalence testing.

A constant invertible ``T`` is an isomorphism from ``sys1`` to ``sys2``
when ``A'_i T = T A_i``, ``B'_i = T B_i``, ``C'_i T = C_i`` and
``D'_i = D_i`` for every coefficient index (primes denoting ``sys2``).
Minimal regular realizations of one behavior are related by exactly one
such transform, which is what :func:`find_isomorphism` estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import (
    DEFAULT_MAX_ENTRIES,
    RcCertificate,
    _orth_rows,
    check_rc,
    extended_observability_matrix,
    is_observable,
)
from .core import LpvSsa, TimeDomain
from .errors import InputError, ResourceCapError
from .signals import Signal, random_input, random_scheduling
from .simulation import (
    integration_mesh,
    simulate_ct,
    simulate_dt,
    transition_matrices_ct,
    transition_matrices_dt,
)

__all__ = [
    "IsoResult",
    "EquivalenceReport",
    "find_isomorphism",
    "check_isomorphism",
    "match_initial_state",
    "behavior_equivalence_empirical",
]

CONDITION_CAP = 1e12


@dataclass(frozen=True)
class IsoResult:
    """Isomorphism verdict with the estimated transform and its residual.

    ``residual`` is the maximum relative Frobenius error over the four
    defining equation families.  ``verdict`` is ``"isomorphic"`` (small
    residual, well-conditioned ``T``), ``"not-isomorphic"`` (with the
    obstruction cited), or ``"inconclusive"`` (an unobservable operand
    makes the transform non-unique, or ``T`` cannot be certified
    invertible).
    """

    T: np.ndarray
    residual: float
    verdict: str
    obstruction: str = None
    condition_number: float = None


def _relerr(X: np.ndarray, Y: np.ndarray) -> float:
    num = float(np.linalg.norm(X - Y))
    den = 1.0 + max(float(np.linalg.norm(X)), float(np.linalg.norm(Y)))
    return num / den


def _check_signature(sys1: LpvSsa, sys2: LpvSsa) -> None:
    if sys1.signature() != sys2.signature():
        raise InputError(
            "systems must share n_u, n_y, n_p and time domain: "
            f"{sys1.signature()} vs {sys2.signature()}"
        )
    if not (
        np.allclose(sys1.region.lower, sys2.region.lower)
        and np.allclose(sys1.region.upper, sys2.region.upper)
    ):
        raise InputError("systems must share the scheduling region")


def check_isomorphism(sys1: LpvSsa, sys2: LpvSsa, T: np.ndarray) -> float:
    """Residual of ``T`` as a candidate isomorphism from sys1 to sys2.

    Maximum over coefficients of the relative Frobenius errors of the
    four equation families; exactly 0 for an exact isomorphism.
    """
    _check_signature(sys1, sys2)
    T = np.asarray(T, dtype=float)
    n1, n2 = sys1.n_x, sys2.n_x
    if n1 != n2 or T.shape != (n2, n1):
        raise InputError(
            f"transform must be {n2}x{n1} matching both state dimensions, got {T.shape}"
        )
    worst = 0.0
    for i in range(sys1.n_p + 1):
        worst = max(
            worst,
            _relerr(sys2.A.coeffs[i] @ T, T @ sys1.A.coeffs[i]),
            _relerr(sys2.B.coeffs[i], T @ sys1.B.coeffs[i]),
            _relerr(sys2.C.coeffs[i] @ T, sys1.C.coeffs[i]),
            _relerr(sys2.D.coeffs[i], sys1.D.coeffs[i]),
        )
    return worst


def _paired_obs_stacks(sys2: LpvSsa, sys1: LpvSsa, depth: int, max_entries: int):
    """Observability stacks of both systems with identical row structure.

    Direct stacking when it fits under the cap; otherwise a jointly
    compressed iteration that orthonormalizes the paired rows
    ``[O(sys2) | O(sys1)]``, which preserves any linear relation between
    the two stacks.
    """
    try:
        O2 = extended_observability_matrix(sys2, depth, max_entries=max_entries)
        O1 = extended_observability_matrix(sys1, depth, max_entries=max_entries)
        return O2, O1
    except ResourceCapError:
        pass
    n = sys1.n_x
    J = _orth_rows(np.hstack([np.vstack(sys2.C.coeffs), np.vstack(sys1.C.coeffs)]))
    for _ in range(depth):
        rows = [J]
        R2, R1 = J[:, :n], J[:, n:]
        for A2i, A1i in zip(sys2.A.coeffs, sys1.A.coeffs):
            rows.append(np.hstack([R2 @ A2i, R1 @ A1i]))
        J = _orth_rows(np.vstack(rows))
    return J[:, :n], J[:, n:]


def find_isomorphism(
    sys1: LpvSsa,
    sys2: LpvSsa,
    *,
    tol: float = 1e-8,
    rtol: float = None,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> IsoResult:
    """Estimate the isomorphism from ``sys1`` to ``sys2`` and judge it.

    The transform solves the stacked least-squares problem
    ``O(sys2) T = O(sys1)`` over the extended observability matrices at
    depth ``n - 1``, which the defining equations force for any true
    isomorphism.  The residual then evaluates all four equation families
    (covering the B/D equations the solve does not enforce).

    Returns
    -------
    IsoResult
        With ``verdict == "inconclusive"`` when either system is
        unobservable and the residual is large, since transforms between
        unobservable realizations are not unique.
    """
    _check_signature(sys1, sys2)
    n1, n2 = sys1.n_x, sys2.n_x
    if n1 != n2:
        return IsoResult(
            T=None,
            residual=np.inf,
            verdict="not-isomorphic",
            obstruction=f"dimension mismatch ({n1} vs {n2})",
        )
    d_err = max(
        _relerr(d2, d1) for d1, d2 in zip(sys1.D.coeffs, sys2.D.coeffs)
    )
    if d_err > tol:
        return IsoResult(
            T=None,
            residual=d_err,
            verdict="not-isomorphic",
            obstruction="feedthrough (D) coefficients differ",
        )
    n = n1
    if n == 0:
        return IsoResult(
            T=np.zeros((0, 0)),
            residual=d_err,
            verdict="isomorphic",
            condition_number=1.0,
        )
    O2, O1 = _paired_obs_stacks(sys2, sys1, max(n - 1, 0), max_entries)
    T = np.linalg.lstsq(O2, O1, rcond=rtol)[0]
    residual = check_isomorphism(sys1, sys2, T)
    cond = float(np.linalg.cond(T))
    if residual < tol and cond < CONDITION_CAP:
        return IsoResult(
            T=T, residual=residual, verdict="isomorphic", condition_number=cond
        )
    obs1, _ = is_observable(sys1, rtol)
    obs2, _ = is_observable(sys2, rtol)
    if residual >= tol and obs1 and obs2:
        return IsoResult(
            T=T,
            residual=residual,
            verdict="not-isomorphic",
            obstruction=(
                f"residual {residual:.3e} above tolerance {tol:.1e} "
                "with both systems observable"
            ),
            condition_number=cond,
        )
    why = []
    if not (obs1 and obs2):
        why.append("an unobservable operand makes the transform non-unique")
    if cond >= CONDITION_CAP:
        why.append(f"estimated transform is ill-conditioned (cond {cond:.2e})")
    return IsoResult(
        T=T,
        residual=residual,
        verdict="inconclusive",
        obstruction="; ".join(why),
        condition_number=cond,
    )


def _free_response_map(sys: LpvSsa, u: Signal, p: Signal, horizon, step: float):
    """Stacked map from an initial state to the zero-input output samples.

    Built on the same integration mesh the simulations use (which refines
    the breakpoints of both ``u`` and ``p``), so rows align sample by
    sample with the simulated outputs.
    """
    if sys.domain == TimeDomain.DT:
        N = int(horizon)
        Phi = transition_matrices_dt(sys, p, N)
        return np.vstack(
            [sys.C(p.value_at(t)) @ Phi[t] for t in range(N + 1)]
        )
    mesh = integration_mesh(float(horizon), step, u, p)
    _, Phi = transition_matrices_ct(sys, p, float(horizon), step, mesh=mesh)
    return np.vstack(
        [sys.C(p.value_at(t)) @ Phi[k] for k, t in enumerate(mesh)]
    )


def match_initial_state(
    sys_from: LpvSsa,
    x0,
    sys_to: LpvSsa,
    u: Signal,
    p: Signal,
    horizon,
    *,
    step: float = 1e-3,
    rtol: float = None,
    out_of_region: str = "reject",
):
    """Best initial state of ``sys_to`` reproducing ``sys_from``'s output.

    Simulates ``sys_from`` on the window, subtracts ``sys_to``'s forced
    (zero-initial-state) response, and solves the linear least-squares
    problem against the stacked free-response map of ``sys_to`` under the
    same scheduling.  The map can be rank-deficient on short windows, so
    the solve is rank-revealing at the shared tolerance.

    Returns
    -------
    (x0_to, residual)
        The minimizer and the output mismatch: root-mean-square error per
        sample, relative to the output scale of the window
        (``1 + RMS(y)``), so the figure stays meaningful when
        trajectories grow by many orders of magnitude over the horizon.
    """
    _check_signature(sys_from, sys_to)
    if sys_from.domain == TimeDomain.DT:
        N = int(horizon)
        y_from = simulate_dt(sys_from, x0, u, p, N, out_of_region=out_of_region).y.values
        y_forced = simulate_dt(
            sys_to, np.zeros(sys_to.n_x), u, p, N, out_of_region=out_of_region
        ).y.values
        samples = N + 1
    else:
        t_end = float(horizon)
        y_from = simulate_ct(
            sys_from, x0, u, p, t_end, step, out_of_region=out_of_region
        ).y.values
        y_forced = simulate_ct(
            sys_to, np.zeros(sys_to.n_x), u, p, t_end, step, out_of_region=out_of_region
        ).y.values
        samples = y_from.shape[0]
    M = _free_response_map(sys_to, u, p, horizon, step)
    b = (y_from - y_forced).reshape(-1)
    if sys_to.n_x == 0:
        x0_to = np.zeros(0)
    else:
        x0_to = np.linalg.lstsq(M, b, rcond=rtol)[0]
    y_match = y_forced + (M @ x0_to).reshape(y_from.shape)
    scale = np.sqrt(samples) + float(np.linalg.norm(y_from))
    residual = float(np.linalg.norm(y_from - y_match)) / scale
    return x0_to, residual


def _unit_ball(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    v = rng.standard_normal(n)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.zeros(n)
    return v * (rng.uniform() ** (1.0 / n) / norm)


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of the randomized behavior-equivalence test.

    A pass is evidence, not proof: only finitely many random signal
    triples are sampled, while behavior equality quantifies over all of
    them (``note`` restates this).  ``residuals`` holds one
    ``(from sys1, from sys2)`` row per trial.
    """

    trials: int
    horizon: float
    tolerance: float
    seed: int
    residuals: np.ndarray
    max_residual: float
    passed: bool
    rc_sys1: RcCertificate
    rc_sys2: RcCertificate
    note: str


def behavior_equivalence_empirical(
    sys1: LpvSsa,
    sys2: LpvSsa,
    trials: int = 20,
    horizon=None,
    seed: int = 0,
    *,
    tol: float = None,
    step: float = 1e-2,
    segments: int = 10,
    grid_per_axis: int = 5,
) -> EquivalenceReport:
    """Randomized two-sided check that two systems share their behavior.

    Each trial draws an initial state in the unit ball, a random input,
    and a random admissible scheduling, then matches the produced output
    with the other system's best initial state — in both directions.  The
    verdict compares the worst residual against ``tol`` (default ``1e-6``
    in DT, ``1e-4`` in CT; default horizon 20 steps / 2.0 time units).
    The regularity status of both systems is reported because behavior
    equality only coincides with i/o-family equality under regularity.
    """
    _check_signature(sys1, sys2)
    dt = sys1.domain == TimeDomain.DT
    if horizon is None:
        horizon = 20 if dt else 2.0
    if tol is None:
        tol = 1e-6 if dt else 1e-4
    if trials < 1:
        raise InputError("trials must be positive")
    rng = np.random.default_rng(seed)
    residuals = np.zeros((trials, 2))
    for k in range(trials):
        if dt:
            p = random_scheduling(sys1.region, rng, sys1.domain, n_steps=int(horizon))
            u = random_input(sys1.n_u, rng, sys1.domain, n_steps=int(horizon))
        else:
            p = random_scheduling(
                sys1.region, rng, sys1.domain, t_end=float(horizon), segments=segments
            )
            u = random_input(
                sys1.n_u, rng, sys1.domain, t_end=float(horizon), segments=segments
            )
        x1 = _unit_ball(rng, sys1.n_x)
        x2 = _unit_ball(rng, sys2.n_x)
        _, residuals[k, 0] = match_initial_state(
            sys1, x1, sys2, u, p, horizon, step=step
        )
        _, residuals[k, 1] = match_initial_state(
            sys2, x2, sys1, u, p, horizon, step=step
        )
    max_residual = float(residuals.max())
    return EquivalenceReport(
        trials=trials,
        horizon=float(horizon),
        tolerance=tol,
        seed=seed,
        residuals=residuals,
        max_residual=max_residual,
        passed=bool(max_residual < tol),
        rc_sys1=check_rc(sys1, grid_per_axis),
        rc_sys2=check_rc(sys2, grid_per_axis),
        note=(
            "pass is empirical evidence over finitely many sampled signals, "
            "not a proof of behavior equality"
        ),
    )

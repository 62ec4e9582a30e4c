"""Observability/reachability analysis and regularity certification.

Rank questions are decided through a single SVD convention: a singular
value counts toward the rank when it exceeds
``sigma_max * max(rows, cols) * 2**-52`` (overridable via ``rtol``).
Orthonormal bases returned from SVDs are sign-normalized so the
largest-magnitude entry of each column is positive.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .core import LpvSsa, TimeDomain, transpose_dual
from .errors import InputError, ResourceCapError
from .signals import Signal, random_scheduling
from .simulation import (
    _stage,
    integration_mesh,
    rk4_on_mesh,
    transition_matrices_dt,
)

__all__ = [
    "RankDecision",
    "RcCertificate",
    "LtvSystem",
    "extended_observability_matrix",
    "extended_reachability_matrix",
    "unobservable_subspace",
    "is_observable",
    "is_span_reachable_from_zero",
    "check_rc",
    "freeze_scheduling",
    "ltv_window_observability",
    "find_revealing_scheduling",
    "orthonormal_kernel",
]

DEFAULT_MAX_ENTRIES = 10**7
SINGULARITY_RTOL = 1e-10
# rank floor for iterated subspaces and transition-matrix stacks, whose
# rounding debris sits well above machine precision (see the docstrings)
ITERATION_RTOL = 1e-10


def _effective_tolerance(s: np.ndarray, shape, rtol) -> float:
    if rtol is None:
        rtol = max(shape) * 2.0**-52 if min(shape) else 0.0
    smax = float(s[0]) if s.size else 0.0
    return smax * rtol


@dataclass(frozen=True)
class RankDecision:
    """Numerical rank verdict: rank = #{singular values > tolerance_used}."""

    rank: int
    singular_values: np.ndarray
    tolerance_used: float

    @classmethod
    def from_matrix(cls, M: np.ndarray, rtol: float = None) -> "RankDecision":
        M = np.asarray(M, dtype=float)
        s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
        tol = _effective_tolerance(s, M.shape, rtol)
        return cls(rank=int(np.sum(s > tol)), singular_values=s, tolerance_used=tol)


def _sign_fix(V: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            V[:, j] = -col
    return V


def orthonormal_kernel(M: np.ndarray, rtol: float = None) -> np.ndarray:
    """Orthonormal null-space basis of ``M`` (columns), sign-normalized.

    The basis columns are the right singular vectors whose singular values
    fall at or below the rank tolerance, kept in SVD order.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    if n == 0:
        return np.zeros((0, 0))
    if M.shape[0] == 0:
        return np.eye(n)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    tol = _effective_tolerance(s, M.shape, rtol)
    rank = int(np.sum(s > tol))
    return _sign_fix(Vh[rank:].T)


def _obs_levels(sys: LpvSsa, n: int, max_entries: int):
    """Levels of the extended observability stack: depth-d blocks, d = 0..n.

    Level 0 stacks ``C_0 .. C_np``; level ``d+1`` right-multiplies level
    ``d`` by ``A_0 .. A_np`` in order.  Each product word appears exactly
    once, which keeps the row count at the stated geometric total while
    spanning the same rows as the textbook recursion.
    """
    level = np.vstack(sys.C.coeffs)
    levels = [level]
    total = level.shape[0]
    width = max(sys.n_x, 1)
    for _ in range(n):
        total += level.shape[0] * (sys.n_p + 1)
        if total * width > max_entries:
            raise ResourceCapError(
                f"extended matrix would hold {total * width} entries "
                f"(cap {max_entries}); use the subspace-iteration path "
                "(unobservable_subspace / is_observable)"
            )
        level = np.vstack([level @ Ai for Ai in sys.A.coeffs])
        levels.append(level)
    return levels


def extended_observability_matrix(
    sys: LpvSsa, n: int, *, max_entries: int = DEFAULT_MAX_ENTRIES
) -> np.ndarray:
    """Extended n-step observability matrix ``O_n``.

    ``O_0`` stacks the output coefficients; each further step appends the
    previous blocks propagated through every state coefficient, so the
    rows span ``{C_j A_w : words w of length <= n}``.  Row count is
    ``n_y (n_p+1) ((n_p+1)^{n+1} - 1) / n_p`` for ``n_p >= 1``.

    Raises
    ------
    ResourceCapError
        When the matrix would exceed ``max_entries`` entries.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    return np.vstack(_obs_levels(sys, n, max_entries))


def extended_reachability_matrix(
    sys: LpvSsa, n: int, *, max_entries: int = DEFAULT_MAX_ENTRIES
) -> np.ndarray:
    """Extended n-step reachability matrix ``R_n = O_n(dual)^T``."""
    return extended_observability_matrix(
        transpose_dual(sys), n, max_entries=max_entries
    ).T


def _orth_rows(M: np.ndarray, rtol: float = None) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of ``M``."""
    if M.size == 0:
        return M.reshape(0, M.shape[1]) if M.ndim == 2 else M
    _, s, Vh = np.linalg.svd(M, full_matrices=False)
    tol = _effective_tolerance(s, M.shape, rtol)
    return Vh[s > tol]


def unobservable_subspace(sys: LpvSsa, rtol: float = None) -> np.ndarray:
    """Orthonormal basis (columns) of the unobservable subspace.

    Subspace iteration that never forms the extended matrix: start from
    the joint kernel of the output coefficients and repeatedly intersect
    with the preimages under every state coefficient until the dimension
    stops dropping (at most ``n_x`` steps).  Each iterate is maintained
    through the orthonormal row basis of its orthogonal complement (the
    kernel of ``O_k`` is the complement of the row space of ``O_k``), so
    every rank decision happens on well-scaled rows.  The result spans
    ``Ker O_{n_x - 1}``.

    The iteration's rank floor defaults to ``1e-10`` relative rather than
    the machine-level convention: a computed invariant subspace is only
    accurate to roughly ``eps * sigma_max / sigma_min`` of the matrix it
    came from, and later levels must not count that rounding debris as
    new row-space directions.  Pass ``rtol`` to override.
    """
    n = sys.n_x
    if n == 0:
        return np.zeros((0, 0))
    rtol_iter = ITERATION_RTOL if rtol is None else rtol
    Q = _orth_rows(np.vstack(sys.C.coeffs), rtol_iter)
    for _ in range(max(n - 1, 0)):
        if Q.shape[0] >= n:
            break
        grown = _orth_rows(
            np.vstack([Q] + [Q @ Ai for Ai in sys.A.coeffs]), rtol_iter
        )
        if grown.shape[0] == Q.shape[0]:
            Q = grown
            break
        Q = grown
    return orthonormal_kernel(Q, rtol)


def is_observable(
    sys: LpvSsa,
    rtol: float = None,
    *,
    max_entries: int = DEFAULT_MAX_ENTRIES,
):
    """Rank test for observability: ``rank O_{n_x - 1} = n_x``.

    The verdict comes from the subspace-iteration kernel; the
    RankDecision reports the SVD of the explicit ``O_{n_x-1}`` when it
    fits under the entry cap, and otherwise the compressed decision
    (``n_x - dim kernel`` unit singular values).

    Returns
    -------
    (bool, RankDecision)
    """
    n = sys.n_x
    k = unobservable_subspace(sys, rtol).shape[1]
    try:
        O = extended_observability_matrix(sys, max(n - 1, 0), max_entries=max_entries)
        decision = RankDecision.from_matrix(O, rtol)
    except ResourceCapError:
        decision = RankDecision(
            rank=n - k,
            singular_values=np.ones(n - k),
            tolerance_used=0.0,
        )
    return k == 0, decision


def is_span_reachable_from_zero(
    sys: LpvSsa,
    rtol: float = None,
    *,
    max_entries: int = DEFAULT_MAX_ENTRIES,
):
    """Rank test for span-reachability from zero: observability of the dual.

    Returns
    -------
    (bool, RankDecision)
    """
    return is_observable(transpose_dual(sys), rtol, max_entries=max_entries)


def _is_singular(Ap: np.ndarray, rtol: float = SINGULARITY_RTOL) -> bool:
    """Scaled invertibility test: smallest singular value vs ``rtol * largest``."""
    if Ap.size == 0:
        return False
    s = np.linalg.svd(Ap, compute_uv=False)
    if s[0] == 0.0:
        return True
    return bool(s[-1] <= rtol * s[0])


@dataclass(frozen=True)
class RcCertificate:
    """Outcome of the regularity check.

    ``dt_invertibility`` is ``"not-applicable"`` in CT (nothing beyond the
    region shape is required there), ``"certified"`` when the 1-d
    determinant polynomial provably has no root in the interval,
    ``"heuristic-pass"`` when only grid plus random sampling was available
    (``n_p >= 2``; the grid resolution is recorded), and
    ``"refuted-with-witness"`` with a scheduling point at which the state
    matrix fails the scaled invertibility test.
    """

    convex_ok: bool
    dt_invertibility: str
    witness: np.ndarray = None
    det_poly_1d: np.ndarray = None
    grid_per_axis: int = None

    @property
    def holds(self) -> bool:
        return self.convex_ok and self.dt_invertibility in (
            "not-applicable",
            "certified",
            "heuristic-pass",
        )


def _chebyshev_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    k = np.arange(count)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * count))


def _rc_univariate(sys: LpvSsa) -> RcCertificate:
    lo, hi = float(sys.region.lower[0]), float(sys.region.upper[0])
    deg = sys.n_x
    nodes = _chebyshev_nodes(lo, hi, deg + 1)
    vals = np.array([np.linalg.det(sys.A(np.array([t]))) for t in nodes])
    coeffs = (
        npoly.polyfit(nodes, vals, deg) if deg > 0 else np.array([vals[0]])
    )
    scale = float(np.max(np.abs(coeffs)))
    # drop numerically-zero leading coefficients from the report
    while coeffs.size > 1 and abs(coeffs[-1]) <= 1e-12 * scale:
        coeffs = coeffs[:-1]

    def refute(p_star):
        return RcCertificate(
            convex_ok=True,
            dt_invertibility="refuted-with-witness",
            witness=np.array([p_star]),
            det_poly_1d=coeffs,
        )

    if scale == 0.0:
        return refute(0.5 * (lo + hi))

    # candidate singular points: polynomial roots inside the interval,
    # refined by a sign-change scan, plus the interval ends
    candidates = [lo, hi, 0.5 * (lo + hi)]
    if coeffs.size > 1:
        margin = 1e-9 * (hi - lo)
        for r in npoly.polyroots(coeffs):
            if abs(r.imag) <= 1e-8 * (1.0 + abs(r.real)):
                t = float(np.clip(r.real, lo, hi))
                if lo - margin <= r.real <= hi + margin:
                    candidates.append(t)
    scan = np.linspace(lo, hi, 65)
    dets = npoly.polyval(scan, coeffs)
    for i in np.where(dets[:-1] * dets[1:] < 0)[0]:
        a, b = scan[i], scan[i + 1]
        for _ in range(80):
            m = 0.5 * (a + b)
            if npoly.polyval(a, coeffs) * npoly.polyval(m, coeffs) <= 0:
                b = m
            else:
                a = m
        candidates.append(0.5 * (a + b))

    for t in candidates:
        if _is_singular(sys.A(np.array([t]))):
            return refute(t)
    return RcCertificate(
        convex_ok=True, dt_invertibility="certified", det_poly_1d=coeffs
    )


def check_rc(sys: LpvSsa, grid_per_axis: int = 10, *, seed: int = 12345) -> RcCertificate:
    """Regularity certificate: region shape plus DT invertibility of ``A(p)``.

    CT systems only need the region to be convex with nonempty interior,
    which holds for every validated box.  In DT with one scheduling
    variable, ``det A(p)`` is interpolated exactly as a polynomial at
    Chebyshev nodes and its real roots are isolated inside the interval;
    with two or more variables the check samples a tensor grid
    (``grid_per_axis`` points per axis) plus ``10 * grid_per_axis**n_p``
    seeded uniform draws and can only return a heuristic pass or a
    refutation with witness.
    """
    convex_ok = sys.region.has_interior()
    if sys.domain == TimeDomain.CT:
        return RcCertificate(convex_ok=convex_ok, dt_invertibility="not-applicable")
    if sys.n_x == 0:
        return RcCertificate(
            convex_ok=convex_ok,
            dt_invertibility="certified",
            det_poly_1d=np.array([1.0]) if sys.n_p == 1 else None,
        )
    if sys.n_p == 1:
        cert = _rc_univariate(sys)
        if not convex_ok:
            cert = RcCertificate(
                convex_ok=False,
                dt_invertibility=cert.dt_invertibility,
                witness=cert.witness,
                det_poly_1d=cert.det_poly_1d,
            )
        return cert
    if grid_per_axis < 1:
        raise InputError("grid_per_axis must be positive")
    pts = sys.region.grid(grid_per_axis)
    rng = np.random.default_rng(seed)
    pts = np.vstack([pts, sys.region.sample(rng, 10 * grid_per_axis**sys.n_p)])
    for p in pts:
        if _is_singular(sys.A(p)):
            return RcCertificate(
                convex_ok=convex_ok,
                dt_invertibility="refuted-with-witness",
                witness=p.copy(),
                grid_per_axis=grid_per_axis,
            )
    return RcCertificate(
        convex_ok=convex_ok,
        dt_invertibility="heuristic-pass",
        grid_per_axis=grid_per_axis,
    )


def _guard_region(sys: LpvSsa, p: Signal, out_of_region: str, stacklevel: int = 3):
    bad = p.restrict_check(sys.region)
    if not bad.size:
        return
    msg = (
        f"{bad.size} scheduling sample(s) outside the region "
        f"(first at index {bad[0]})"
    )
    if out_of_region == "reject":
        raise InputError(msg)
    if out_of_region == "warn":
        warnings.warn(msg, stacklevel=stacklevel)
    else:
        raise InputError(f"unknown out_of_region mode {out_of_region!r}")


@dataclass(frozen=True)
class LtvSystem:
    """Time-indexed matrices of a system frozen along one scheduling signal."""

    domain: TimeDomain
    times: np.ndarray
    As: np.ndarray
    Bs: np.ndarray
    Cs: np.ndarray
    Ds: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]


def freeze_scheduling(
    sys: LpvSsa, p: Signal, *, out_of_region: str = "reject"
) -> LtvSystem:
    """Evaluate the affine matrix functions along a scheduling signal.

    The result holds one matrix quadruple per signal sample (per step in
    DT, per mesh node in CT).
    """
    if p.domain != sys.domain:
        raise InputError("scheduling signal domain must match the system")
    if p.dim != sys.n_p:
        raise InputError(f"scheduling signal has dimension {p.dim}, expected {sys.n_p}")
    _guard_region(sys, p, out_of_region)
    K = p.n_samples
    As = np.empty((K, sys.n_x, sys.n_x))
    Bs = np.empty((K, sys.n_x, sys.n_u))
    Cs = np.empty((K, sys.n_y, sys.n_x))
    Ds = np.empty((K, sys.n_y, sys.n_u))
    for k in range(K):
        As[k], Bs[k], Cs[k], Ds[k] = sys.matrices_at(p.values[k])
    times = (
        np.arange(K, dtype=float) if sys.domain == TimeDomain.DT else p.times.copy()
    )
    return LtvSystem(domain=sys.domain, times=times, As=As, Bs=Bs, Cs=Cs, Ds=Ds)


def ltv_window_observability(
    sys: LpvSsa,
    p: Signal,
    t_end,
    rtol: float = None,
    *,
    step: float = None,
    out_of_region: str = "reject",
):
    """Observability of the frozen-scheduling LTV system on ``[0, t_end]``.

    DT: stacks ``C(t) Phi(t, 0)`` for ``t = 0 .. t_end`` and tests for
    full column rank.  CT: integrates the observability Gramian
    ``int Phi^T C^T C Phi dt`` with the RK4 machinery of the simulation
    module and tests its rank (note the Gramian's singular values live on
    a squared scale relative to the stacked-matrix convention).

    Both stacks are chains of matrix products, whose rounding turns exact
    rank deficiencies into debris of order ``eps * ||Phi||``, so the rank
    decision defaults to the ``1e-10`` relative floor used by the
    subspace iteration rather than the machine-level convention; pass
    ``rtol`` to override.

    Returns
    -------
    (bool, RankDecision)
    """
    if rtol is None:
        rtol = ITERATION_RTOL
    if p.domain != sys.domain:
        raise InputError("scheduling signal domain must match the system")
    _guard_region(sys, p, out_of_region)
    n = sys.n_x
    if sys.domain == TimeDomain.DT:
        t_end = int(t_end)
        if t_end < 1:
            raise InputError("t_end must be a positive integer in DT")
        if not p.covers(t_end):
            raise InputError("scheduling signal does not cover the window")
        Phi = transition_matrices_dt(sys, p, t_end)
        blocks = [sys.C(p.value_at(t)) @ Phi[t] for t in range(t_end + 1)]
        decision = RankDecision.from_matrix(np.vstack(blocks), rtol)
        return decision.rank == n, decision
    t_end = float(t_end)
    if t_end <= 0:
        raise InputError("t_end must be positive in CT")
    if not p.covers(t_end):
        raise InputError("scheduling signal does not cover the window")
    if step is None:
        step = t_end / 200.0
    mesh = integration_mesh(t_end, step, p)

    def deriv(t, a, b, Y):
        pt = _stage(p, t, a, b)
        Phi = Y[0]
        CPhi = sys.C(pt) @ Phi
        return np.stack([sys.A(pt) @ Phi, CPhi.T @ CPhi])

    Y0 = np.stack([np.eye(n), np.zeros((n, n))])
    W = rk4_on_mesh(deriv, Y0, mesh)[-1, 1]
    W = 0.5 * (W + W.T)
    decision = RankDecision.from_matrix(W, rtol)
    return decision.rank == n, decision


def find_revealing_scheduling(
    sys: LpvSsa,
    trials: int,
    window,
    seed: int,
    *,
    ct_segments: int = 8,
    step: float = None,
    rtol: float = None,
):
    """Randomized search for a scheduling signal that reveals the state.

    For an observable system satisfying the regularity conditions, some
    scheduling signal makes the frozen LTV system observable on a finite
    window; this draws ``trials`` random signals (DT: i.i.d. uniform over
    the region per step; CT: piecewise-constant on a uniform mesh of
    ``ct_segments`` pieces) and returns the first ``(signal, window)``
    passing the LTV window test, or None if the search is exhausted.
    Unobservable systems return None immediately with a warning, since no
    such signal can exist.  Deterministic for a given seed.
    """
    if trials < 1:
        raise InputError("trials must be positive")
    observable, _ = is_observable(sys, rtol)
    if not observable:
        warnings.warn(
            "system is not observable; no revealing scheduling exists",
            stacklevel=2,
        )
        return None
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if sys.domain == TimeDomain.DT:
            p = random_scheduling(sys.region, rng, sys.domain, n_steps=int(window))
        else:
            p = random_scheduling(
                sys.region, rng, sys.domain, t_end=float(window), segments=ct_segments
            )
        ok, _ = ltv_window_observability(sys, p, window, rtol, step=step)
        if ok:
            return p, window
    return None

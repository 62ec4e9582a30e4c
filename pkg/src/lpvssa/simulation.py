"""Trajectory generation: exact DT recursion and fixed-step RK4 in CT.

The CT integrator is the classical 4th-order Runge-Kutta method on a
deterministic mesh: a uniform grid refined with the breakpoints of the
input and scheduling signals, so no integration step straddles a signal
discontinuity.  Piecewise-constant signals are evaluated at the midpoint
of the current step (the segment value); piecewise-linear signals at the
exact stage times.  This keeps the scheme at its nominal order on
problems with piecewise-linear scheduling.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .core import LpvSsa, TimeDomain
from .errors import InputError
from .signals import PIECEWISE_CONSTANT, Signal, Trajectory

__all__ = [
    "simulate_dt",
    "simulate_ct",
    "io_response",
    "error_system",
    "transition_matrices_dt",
    "transition_matrices_ct",
    "integration_mesh",
]


def _check_signals(sys: LpvSsa, u: Signal, p: Signal, horizon, out_of_region: str):
    if u.domain != sys.domain or p.domain != sys.domain:
        raise InputError("signal time domains must match the system")
    if u.dim != sys.n_u:
        raise InputError(f"input signal has dimension {u.dim}, expected {sys.n_u}")
    if p.dim != sys.n_p:
        raise InputError(f"scheduling signal has dimension {p.dim}, expected {sys.n_p}")
    if not u.covers(horizon):
        raise InputError("input signal does not cover the requested horizon")
    if not p.covers(horizon):
        raise InputError("scheduling signal does not cover the requested horizon")
    bad = p.restrict_check(sys.region)
    if bad.size:
        msg = (
            f"{bad.size} scheduling sample(s) outside the region "
            f"(first at index {bad[0]})"
        )
        if out_of_region == "reject":
            raise InputError(msg)
        if out_of_region == "warn":
            warnings.warn(msg, stacklevel=3)
        else:
            raise InputError(f"unknown out_of_region mode {out_of_region!r}")


def _check_x0(sys: LpvSsa, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (sys.n_x,):
        if x0.size == 1 and x0[0] == 0.0:
            return np.zeros(sys.n_x)  # scalar 0 shorthand for the origin
        raise InputError(f"initial state has shape {x0.shape}, expected ({sys.n_x},)")
    return x0


def simulate_dt(
    sys: LpvSsa,
    x0,
    u: Signal,
    p: Signal,
    n_steps: int,
    *,
    out_of_region: str = "reject",
) -> Trajectory:
    """Run the exact DT recursion for ``t = 0 .. n_steps``.

    ``x(t+1) = A(p(t)) x(t) + B(p(t)) u(t)`` and
    ``y(t) = C(p(t)) x(t) + D(p(t)) u(t)``, in double precision with no
    rounding beyond the arithmetic itself.

    Parameters
    ----------
    sys : LpvSsa
        Discrete-time system.
    x0 : array_like, shape (n_x,)
    u, p : Signal
        Defined for every step up to ``n_steps``.
    n_steps : int
        Number of recursion steps; the trajectory holds ``n_steps + 1``
        aligned state/output samples.
    out_of_region : {"reject", "warn"}
        Handling of scheduling samples outside the region.

    Returns
    -------
    Trajectory
    """
    if sys.domain != TimeDomain.DT:
        raise InputError("simulate_dt needs a DT system")
    n_steps = int(n_steps)
    if n_steps < 0:
        raise InputError("n_steps must be nonnegative")
    _check_signals(sys, u, p, n_steps, out_of_region)
    xk = _check_x0(sys, x0)

    xs = np.zeros((n_steps + 1, sys.n_x))
    ys = np.zeros((n_steps + 1, sys.n_y))
    for t in range(n_steps + 1):
        pt = p.value_at(t)
        ut = u.value_at(t)
        A, B, C, D = sys.matrices_at(pt)
        xs[t] = xk
        ys[t] = C @ xk + D @ ut
        if t < n_steps:
            xk = A @ xk + B @ ut
    return Trajectory(x=Signal.dt(xs), y=Signal.dt(ys))


def integration_mesh(t_end: float, step: float, *signals: Signal) -> np.ndarray:
    """Uniform mesh on [0, t_end] refined with the signals' breakpoints."""
    t_end = float(t_end)
    step = float(step)
    if t_end <= 0:
        raise InputError("t_end must be positive")
    if step <= 0:
        raise InputError("step must be positive")
    n = max(1, math.ceil(t_end / step - 1e-9))
    mesh = np.linspace(0.0, t_end, n + 1)
    extra = []
    for sig in signals:
        if sig.times is not None:
            ts = sig.times
            extra.append(ts[(ts > 0.0) & (ts < t_end)])
    if extra:
        mesh = np.unique(np.concatenate([mesh] + extra))
        # merge nodes closer than a relative tolerance, keeping the endpoints
        keep = np.ones(mesh.size, dtype=bool)
        tol = 1e-12 * max(1.0, t_end)
        keep[1:] = np.diff(mesh) > tol
        keep[-1] = True
        if mesh.size > 1 and mesh[-1] - mesh[-2] <= tol:
            keep[-2] = False
        mesh = mesh[keep]
    return mesh


def _stage(sig: Signal, t: float, a: float, b: float):
    """Signal value for an RK4 stage at time ``t`` within the step [a, b]."""
    if sig.interpolation == PIECEWISE_CONSTANT:
        return sig.value_at(0.5 * (a + b))
    return sig.value_at(t)


def rk4_on_mesh(deriv, X0, mesh: np.ndarray) -> np.ndarray:
    """Classical RK4 for ``dX/dt = deriv(t, a, b, X)`` sampled on a mesh.

    ``deriv`` receives the stage time ``t`` and the current step ``[a, b]``
    so signal evaluation can pick the segment value for piecewise-constant
    signals.  Returns the stacked states, one per mesh node.
    """
    X = np.array(X0, dtype=float)
    out = np.empty((mesh.size,) + X.shape)
    out[0] = X
    for k in range(mesh.size - 1):
        a = mesh[k]
        b = mesh[k + 1]
        h = b - a
        m = a + 0.5 * h
        k1 = deriv(a, a, b, X)
        k2 = deriv(m, a, b, X + (0.5 * h) * k1)
        k3 = deriv(m, a, b, X + (0.5 * h) * k2)
        k4 = deriv(b, a, b, X + h * k3)
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = X
    return out


def simulate_ct(
    sys: LpvSsa,
    x0,
    u: Signal,
    p: Signal,
    t_end: float,
    step: float,
    *,
    out_of_region: str = "reject",
) -> Trajectory:
    """Integrate the CT system on [0, t_end] with fixed-step RK4.

    The output is sampled on the integration mesh (the uniform grid plus
    the signals' breakpoints).  Local truncation is order 4; accuracy is
    controlled by ``step`` and verified by the step-halving convergence
    test in the suite.

    Returns
    -------
    Trajectory
        State and output on the integration mesh.
    """
    if sys.domain != TimeDomain.CT:
        raise InputError("simulate_ct needs a CT system")
    _check_signals(sys, u, p, t_end, out_of_region)
    x0 = _check_x0(sys, x0)
    mesh = integration_mesh(t_end, step, u, p)

    def deriv(t, a, b, x):
        pt = _stage(p, t, a, b)
        ut = _stage(u, t, a, b)
        return sys.A(pt) @ x + sys.B(pt) @ ut

    xs = rk4_on_mesh(deriv, x0, mesh)
    ys = np.empty((mesh.size, sys.n_y))
    for k, t in enumerate(mesh):
        pt = p.value_at(t)
        ut = u.value_at(t)
        ys[k] = sys.C(pt) @ xs[k] + sys.D(pt) @ ut
    return Trajectory(
        x=Signal.ct(mesh, xs, PIECEWISE_CONSTANT),
        y=Signal.ct(mesh, ys, PIECEWISE_CONSTANT),
    )


def io_response(
    sys: LpvSsa,
    x0,
    u: Signal,
    p: Signal,
    horizon,
    *,
    step: float = 1e-3,
    out_of_region: str = "reject",
) -> Signal:
    """Finite-horizon output of the system from ``x0`` under ``(u, p)``.

    This is the sampled input-output map induced by the initial state:
    the ``y`` component of the simulated trajectory.  ``horizon`` is the
    number of steps in DT and the end time in CT (where ``step`` selects
    the integrator mesh).
    """
    if sys.domain == TimeDomain.DT:
        return simulate_dt(sys, x0, u, p, horizon, out_of_region=out_of_region).y
    return simulate_ct(sys, x0, u, p, horizon, step, out_of_region=out_of_region).y


def transition_matrices_dt(sys: LpvSsa, p: Signal, n_steps: int) -> np.ndarray:
    """State-transition matrices ``Phi(t, 0)`` for ``t = 0 .. n_steps`` (DT)."""
    if sys.domain != TimeDomain.DT:
        raise InputError("transition_matrices_dt needs a DT system")
    if not p.covers(n_steps):
        raise InputError("scheduling signal does not cover the requested horizon")
    n = sys.n_x
    out = np.empty((n_steps + 1, n, n))
    out[0] = np.eye(n)
    for t in range(n_steps):
        out[t + 1] = sys.A(p.value_at(t)) @ out[t]
    return out


def transition_matrices_ct(
    sys: LpvSsa, p: Signal, t_end: float, step: float, *, mesh: np.ndarray = None
) -> tuple:
    """Mesh and RK4-integrated ``Phi(t, 0)`` on [0, t_end] (CT).

    Returns ``(mesh, Phi)`` with ``Phi[k]`` the transition matrix at
    ``mesh[k]``.  Pass ``mesh`` to integrate on a preassembled grid (it
    must refine the scheduling signal's breakpoints).
    """
    if sys.domain != TimeDomain.CT:
        raise InputError("transition_matrices_ct needs a CT system")
    if not p.covers(t_end):
        raise InputError("scheduling signal does not cover the requested horizon")
    if mesh is None:
        mesh = integration_mesh(t_end, step, p)

    def deriv(t, a, b, X):
        return sys.A(_stage(p, t, a, b)) @ X

    return mesh, rk4_on_mesh(deriv, np.eye(sys.n_x), mesh)


def error_system(sys1: LpvSsa, sys2: LpvSsa) -> LpvSsa:
    """Difference system whose i/o functions subtract those of the operands.

    Block-diagonal state coupling, stacked inputs, and the output
    ``y = y_1 - y_2``: from a stacked initial state ``[x0_1; x0_2]`` its
    output equals ``io_response(sys1, x0_1) - io_response(sys2, x0_2)``
    for every shared ``(u, p)``.
    """
    if sys1.signature() != sys2.signature():
        raise InputError("systems must share n_u, n_y, n_p and time domain")
    if not (
        np.allclose(sys1.region.lower, sys2.region.lower)
        and np.allclose(sys1.region.upper, sys2.region.upper)
    ):
        raise InputError("systems must share the scheduling region")
    n1, n2 = sys1.n_x, sys2.n_x
    A, B, C, D = [], [], [], []
    for i in range(sys1.n_p + 1):
        Ai = np.zeros((n1 + n2, n1 + n2))
        Ai[:n1, :n1] = sys1.A.coeffs[i]
        Ai[n1:, n1:] = sys2.A.coeffs[i]
        A.append(Ai)
        B.append(np.vstack([sys1.B.coeffs[i], sys2.B.coeffs[i]]))
        C.append(np.hstack([sys1.C.coeffs[i], -sys2.C.coeffs[i]]))
        D.append(sys1.D.coeffs[i] - sys2.D.coeffs[i])
    return LpvSsa.from_matrices(A, B, C, D, sys1.region, sys1.domain)

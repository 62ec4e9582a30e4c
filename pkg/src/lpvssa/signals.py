"""Sampled input/scheduling signals and simulated trajectories.

Discrete-time signals are finite lists of vectors indexed by step.
Continuous-time signals are values on a strictly increasing mesh starting
at 0 with an interpolation rule: piecewise-constant (left-continuous, the
last value held beyond the final node) or piecewise-linear (defined only
up to the final node).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SchedulingRegion, TimeDomain
from .errors import InputError

__all__ = [
    "Signal",
    "Trajectory",
    "PIECEWISE_CONSTANT",
    "PIECEWISE_LINEAR",
    "random_scheduling",
    "random_input",
]

PIECEWISE_CONSTANT = "piecewise-constant"
PIECEWISE_LINEAR = "piecewise-linear"

_INTERP_ALIASES = {
    PIECEWISE_CONSTANT: PIECEWISE_CONSTANT,
    "constant": PIECEWISE_CONSTANT,
    "zoh": PIECEWISE_CONSTANT,
    PIECEWISE_LINEAR: PIECEWISE_LINEAR,
    "linear": PIECEWISE_LINEAR,
}


@dataclass(frozen=True)
class Signal:
    """Sampled trajectory of one vector-valued signal.

    Use :meth:`dt` / :meth:`ct` to construct; the plain constructor checks
    the invariants of whichever representation is requested.
    """

    domain: TimeDomain
    values: np.ndarray
    times: np.ndarray = None
    interpolation: str = None

    def __init__(self, domain, values, times=None, interpolation=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise InputError("signal values must be a (samples, dim) array")
        if not np.all(np.isfinite(values)):
            raise InputError("signal values must be finite")
        if domain == TimeDomain.DT:
            if values.shape[0] < 1:
                raise InputError("a DT signal needs at least one sample")
            if times is not None or interpolation is not None:
                raise InputError("DT signals carry no mesh or interpolation rule")
        else:
            times = np.atleast_1d(np.asarray(times, dtype=float))
            if times.ndim != 1 or times.shape[0] != values.shape[0]:
                raise InputError("CT mesh length must match the number of samples")
            if times.shape[0] < 1 or times[0] != 0.0:
                raise InputError("CT mesh must start at t = 0")
            if np.any(np.diff(times) <= 0):
                raise InputError("CT mesh must be strictly increasing")
            if interpolation not in _INTERP_ALIASES:
                raise InputError(
                    f"unknown interpolation rule {interpolation!r}; "
                    f"expected one of {sorted(set(_INTERP_ALIASES))}"
                )
            interpolation = _INTERP_ALIASES[interpolation]
            times = times.copy()
            times.setflags(write=False)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "interpolation", interpolation)

    @classmethod
    def dt(cls, values) -> "Signal":
        """Discrete-time signal from a (steps, dim) array."""
        return cls(TimeDomain.DT, values)

    @classmethod
    def ct(cls, times, values, interpolation=PIECEWISE_CONSTANT) -> "Signal":
        """Continuous-time signal on a mesh with an interpolation rule."""
        return cls(TimeDomain.CT, values, times=times, interpolation=interpolation)

    @classmethod
    def dt_constant(cls, value, n_steps: int) -> "Signal":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls.dt(np.tile(value, (n_steps + 1, 1)))

    @classmethod
    def ct_constant(cls, value, t_end: float) -> "Signal":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls.ct([0.0, float(t_end)], np.tile(value, (2, 1)))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    def covers(self, horizon) -> bool:
        """Whether the signal is defined on the whole requested window."""
        if self.domain == TimeDomain.DT:
            return self.n_samples >= int(horizon) + 1
        if self.interpolation == PIECEWISE_CONSTANT:
            return True
        return self.times[-1] >= float(horizon) - 1e-12

    def value_at(self, t):
        """Signal value at one time instant.

        DT: integer step index, bounds-checked.  CT piecewise-constant: the
        left-continuous step function (jumps at mesh nodes take the older
        value); the last value is held beyond the final node.  CT
        piecewise-linear: linear interpolation, endpoint values outside the
        mesh.
        """
        if self.domain == TimeDomain.DT:
            k = int(t)
            if k < 0 or k >= self.n_samples:
                raise InputError(f"step {k} outside the signal range 0..{self.n_samples - 1}")
            return self.values[k]
        t = float(t)
        if self.interpolation == PIECEWISE_CONSTANT:
            idx = int(np.searchsorted(self.times, t, side="left")) - 1
            return self.values[max(idx, 0)]
        out = np.empty(self.dim)
        for j in range(self.dim):
            out[j] = np.interp(t, self.times, self.values[:, j])
        return out

    def restrict_check(self, region: SchedulingRegion, atol=1e-12) -> np.ndarray:
        """Indices of samples lying outside the region (empty when all inside)."""
        lo, hi = region.lower, region.upper
        bad = ~(
            np.all(self.values >= lo - atol, axis=1)
            & np.all(self.values <= hi + atol, axis=1)
        )
        return np.where(bad)[0]


@dataclass(frozen=True)
class Trajectory:
    """State and output signals aligned on one time grid."""

    x: Signal
    y: Signal

    def __post_init__(self):
        if self.x.domain != self.y.domain:
            raise InputError("state and output must share the time domain")
        if self.x.n_samples != self.y.n_samples:
            raise InputError("state and output must be aligned on the same grid")

    @property
    def times(self):
        return self.x.times


def random_scheduling(
    region: SchedulingRegion,
    rng: np.random.Generator,
    domain: TimeDomain,
    *,
    n_steps: int = None,
    t_end: float = None,
    segments: int = 8,
) -> Signal:
    """Random admissible scheduling signal, uniform over the region.

    DT: i.i.d. uniform per step (``n_steps + 1`` samples).  CT:
    piecewise-constant on a uniform mesh of ``segments`` pieces over
    ``[0, t_end]``.
    """
    if domain == TimeDomain.DT:
        if n_steps is None:
            raise InputError("n_steps is required for a DT signal")
        return Signal.dt(region.sample(rng, n_steps + 1))
    if t_end is None:
        raise InputError("t_end is required for a CT signal")
    times = np.linspace(0.0, float(t_end), segments, endpoint=False)
    return Signal.ct(times, region.sample(rng, segments))


def random_input(
    dim: int,
    rng: np.random.Generator,
    domain: TimeDomain,
    *,
    n_steps: int = None,
    t_end: float = None,
    segments: int = 8,
    scale: float = 1.0,
) -> Signal:
    """Random input signal with standard-normal values (piecewise-constant in CT)."""
    if domain == TimeDomain.DT:
        if n_steps is None:
            raise InputError("n_steps is required for a DT signal")
        return Signal.dt(scale * rng.standard_normal((n_steps + 1, dim)))
    if t_end is None:
        raise InputError("t_end is required for a CT signal")
    times = np.linspace(0.0, float(t_end), segments, endpoint=False)
    return Signal.ct(times, scale * rng.standard_normal((segments, dim)))

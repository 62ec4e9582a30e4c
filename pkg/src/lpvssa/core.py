"""Core types for LPV state-space systems with affine scheduling dependence.

A system is described by four matrix-valued affine functions ``A, B, C, D``
of a scheduling point ``p`` ranging over a box region, together with a time
domain tag (discrete or continuous).  All values are immutable after
construction and every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InputError

__all__ = [
    "AffineMatrixFunction",
    "SchedulingRegion",
    "TimeDomain",
    "LpvSsa",
    "transpose_dual",
]


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


class TimeDomain(Enum):
    """Discrete-time (forward shift) or continuous-time (derivative) dynamics."""

    DT = "dt"
    CT = "ct"


@dataclass(frozen=True)
class AffineMatrixFunction:
    """Matrix-valued affine function ``M(p) = M_0 + sum_i p_i M_i``.

    Parameters
    ----------
    coeffs : sequence of (rows, cols) array_like
        ``n_p + 1`` real matrices of identical shape.  Index 0 is the
        constant term, index ``i >= 1`` multiplies scheduling coordinate
        ``p_i``.

    Raises
    ------
    InputError
        If the coefficient list is empty, shapes disagree, or any entry
        is not finite.
    """

    coeffs: tuple

    def __init__(self, coeffs):
        mats = [np.atleast_2d(np.asarray(c, dtype=float)) for c in coeffs]
        if not mats:
            raise InputError("need at least the constant coefficient matrix")
        shape = mats[0].shape
        for i, m in enumerate(mats):
            if m.shape != shape:
                raise InputError(
                    f"coefficient {i} has shape {m.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(m)):
                raise InputError(f"coefficient {i} contains non-finite entries")
        object.__setattr__(
            self, "coeffs", tuple(_frozen_array(m) for m in mats)
        )

    @property
    def n_p(self) -> int:
        """Number of scheduling coordinates (``len(coeffs) - 1``)."""
        return len(self.coeffs) - 1

    @property
    def shape(self) -> tuple:
        return self.coeffs[0].shape

    def __call__(self, p) -> np.ndarray:
        """Evaluate ``M_0 + sum_i p_i M_i`` at a scheduling point.

        Accumulation runs in coefficient-index order, so the result is
        bit-reproducible for a given input.

        Parameters
        ----------
        p : array_like, shape (n_p,)
            Scheduling point.  A scalar is accepted when ``n_p == 1``.

        Returns
        -------
        (rows, cols) ndarray
        """
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if p.shape != (self.n_p,):
            raise InputError(
                f"scheduling point has shape {p.shape}, expected ({self.n_p},)"
            )
        out = self.coeffs[0].copy()
        for i in range(self.n_p):
            out += p[i] * self.coeffs[i + 1]
        return out

    evaluate = __call__

    def transpose(self) -> "AffineMatrixFunction":
        """Coefficient-wise transpose."""
        return AffineMatrixFunction([m.T for m in self.coeffs])

    def allclose(self, other: "AffineMatrixFunction", rtol=1e-12, atol=1e-12) -> bool:
        return self.n_p == other.n_p and self.shape == other.shape and all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(self.coeffs, other.coeffs)
        )


@dataclass(frozen=True)
class SchedulingRegion:
    """Axis-aligned box in R^{n_p} of admissible scheduling values.

    The theory only needs a convex set with nonempty interior; boxes are
    the supported subset because they admit exact vertex and grid
    enumeration.  ``lower[i] < upper[i]`` is reported by :meth:`~LpvSsa.validate`
    rather than enforced here, so degenerate boxes can be constructed and
    then diagnosed.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if lo.ndim != 1 or hi.ndim != 1 or lo.shape != hi.shape:
            raise InputError("lower and upper must be 1-d vectors of equal length")
        if lo.size < 1:
            raise InputError("scheduling region needs at least one coordinate")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InputError("region bounds must be finite")
        object.__setattr__(self, "lower", _frozen_array(lo))
        object.__setattr__(self, "upper", _frozen_array(hi))

    @property
    def n_p(self) -> int:
        return self.lower.size

    def has_interior(self) -> bool:
        return bool(np.all(self.lower < self.upper))

    def contains(self, p, atol=0.0) -> bool:
        p = np.atleast_1d(np.asarray(p, dtype=float))
        return bool(
            p.shape == (self.n_p,)
            and np.all(p >= self.lower - atol)
            and np.all(p <= self.upper + atol)
        )

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Uniform draw(s) from the box; shape (n_p,) or (size, n_p)."""
        if size is None:
            return rng.uniform(self.lower, self.upper)
        return rng.uniform(self.lower, self.upper, size=(size, self.n_p))

    def grid(self, points_per_axis: int) -> np.ndarray:
        """Tensor grid with ``points_per_axis`` points per axis, shape (m, n_p)."""
        if points_per_axis < 1:
            raise InputError("points_per_axis must be positive")
        axes = [
            np.linspace(self.lower[i], self.upper[i], points_per_axis)
            for i in range(self.n_p)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class LpvSsa:
    """LPV state-space system with affine scheduling dependence.

    Dynamics (``xi`` is the forward shift in DT, the derivative in CT)::

        xi x(t) = A(p(t)) x(t) + B(p(t)) u(t)
        y(t)    = C(p(t)) x(t) + D(p(t)) u(t)

    The dataclass itself stores whatever it is given; :meth:`validate`
    reports invariant violations, and :meth:`from_matrices` is the
    validating constructor used by the file formats.
    """

    A: AffineMatrixFunction
    B: AffineMatrixFunction
    C: AffineMatrixFunction
    D: AffineMatrixFunction
    region: SchedulingRegion
    domain: TimeDomain

    @classmethod
    def from_matrices(cls, A, B, C, D, region, domain) -> "LpvSsa":
        """Build a system from coefficient lists and reject any invariant violation.

        Parameters
        ----------
        A, B, C, D : sequence of array_like or AffineMatrixFunction
            Coefficient lists (constant term first).
        region : SchedulingRegion or (lower, upper) pair
        domain : TimeDomain or {"dt", "ct"}

        Raises
        ------
        InputError
            Listing every violated invariant.
        """

        def _amf(x):
            return x if isinstance(x, AffineMatrixFunction) else AffineMatrixFunction(x)

        if not isinstance(region, SchedulingRegion):
            region = SchedulingRegion(*region)
        if not isinstance(domain, TimeDomain):
            domain = TimeDomain(str(domain).lower())
        sys = cls(_amf(A), _amf(B), _amf(C), _amf(D), region, domain)
        problems = sys.validate()
        if problems:
            raise InputError("invalid system: " + "; ".join(problems))
        return sys

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    @property
    def n_p(self) -> int:
        return self.region.n_p

    def validate(self) -> list:
        """Check every structural invariant.

        Returns
        -------
        list of str
            Empty iff the system is well formed; otherwise one
            human-readable entry per violated invariant.
        """
        v = []
        n_x = self.A.shape[0]
        if self.A.shape[1] != n_x:
            v.append(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n_x:
            v.append(f"B has {self.B.shape[0]} rows but A is {n_x}x{n_x}")
        if self.C.shape[1] != n_x:
            v.append(f"C has {self.C.shape[1]} columns but A is {n_x}x{n_x}")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            v.append(
                f"D has shape {self.D.shape}, expected "
                f"({self.C.shape[0]}, {self.B.shape[1]})"
            )
        if self.B.shape[1] < 1:
            v.append("system needs at least one input (n_u >= 1)")
        if self.C.shape[0] < 1:
            v.append("system needs at least one output (n_y >= 1)")
        n_p = self.region.n_p
        for name, f in (("A", self.A), ("B", self.B), ("C", self.C), ("D", self.D)):
            if f.n_p != n_p:
                v.append(
                    f"{name} has {f.n_p} scheduling coefficients but the "
                    f"region has n_p = {n_p}"
                )
        bad = np.where(self.region.lower >= self.region.upper)[0]
        for i in bad:
            v.append(
                f"region has empty interior in coordinate {i}: "
                f"lower={self.region.lower[i]} >= upper={self.region.upper[i]}"
            )
        return v

    def matrices_at(self, p):
        """Evaluate all four matrix functions at one scheduling point."""
        return self.A(p), self.B(p), self.C(p), self.D(p)

    def signature(self) -> tuple:
        """(n_u, n_y, n_p, domain) — what two systems must share to be compared."""
        return (self.n_u, self.n_y, self.n_p, self.domain)


def transpose_dual(sys: LpvSsa) -> LpvSsa:
    """Dual system: ``A_i -> A_i^T``, ``B_i -> C_i^T``, ``C_i -> B_i^T``, ``D_i -> D_i^T``.

    Span-reachability of ``sys`` from zero is observability of the dual,
    which is how the reachability-side operations are implemented.  The
    map is an involution: ``transpose_dual(transpose_dual(sys)) == sys``
    coefficient-wise.
    """
    return LpvSsa(
        A=sys.A.transpose(),
        B=sys.C.transpose(),
        C=sys.B.transpose(),
        D=sys.D.transpose(),
        region=sys.region,
        domain=sys.domain,
    )

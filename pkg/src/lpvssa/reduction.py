"""Observability reduction, minimization, and the dual reachability reduction.

The reduction changes basis with an orthogonal transform whose last rows
span the unobservable subspace, then keeps the leading blocks.  Every
solution of the original system projects to a solution of the reduced
one, so the manifest behavior is preserved; when the regularity
certificate holds the reduced system is moreover a minimal realization.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .analysis import RcCertificate, check_rc, unobservable_subspace, orthonormal_kernel
from .core import LpvSsa, transpose_dual
from .errors import InputError

__all__ = ["ReductionResult", "observability_reduction", "minimize", "reachability_reduction"]


@dataclass(frozen=True)
class ReductionResult:
    """Reduced system plus the full change of basis.

    ``projection_Pi`` is the first ``o`` rows of ``transform_T``: it maps
    original states to reduced states, and stacking it with the discarded
    rows recovers ``transform_T``.  For the observability reduction,
    ``T A_i T^{-1}`` is block lower-triangular with the reduced ``A_i`` as
    the top-left block, the first ``o`` rows of ``T B_i`` form the reduced
    ``B_i``, and ``C_i T^{-1}`` has its last columns zero; the reachability
    reduction satisfies the transposed statements.
    """

    reduced: LpvSsa
    transform_T: np.ndarray
    projection_Pi: np.ndarray
    o: int
    minimality: str = None
    rc: RcCertificate = None


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0))
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def observability_reduction(
    sys: LpvSsa,
    *,
    rng: np.random.Generator = None,
    rtol: float = None,
) -> ReductionResult:
    """Split off the unobservable part and keep the observable blocks.

    The unobservable subspace is spanned by the trailing basis vectors,
    its orthogonal complement by the leading ones, and the assembled
    basis matrix is orthogonal, so ``T`` is simply its transpose.  The
    reduced system is observable and has the same manifest behavior; an
    observable input comes back unchanged up to an orthogonal change of
    basis (``o = n_x``), a zero-output system collapses to the
    state-free feedthrough system (``o = 0``).

    Parameters
    ----------
    sys : LpvSsa
    rng : numpy Generator, optional
        When given, the bases of the complement and of the kernel are
        rotated by random orthogonal matrices: a different but equally
        valid completion, used to exercise the isomorphism results.
    rtol : float, optional
        Rank tolerance override.

    Returns
    -------
    ReductionResult
    """
    problems = sys.validate()
    if problems:
        raise InputError("invalid system: " + "; ".join(problems))
    n = sys.n_x
    K = unobservable_subspace(sys, rtol)
    W = orthonormal_kernel(K.T, rtol)  # orthogonal complement of the kernel
    o = W.shape[1]
    if rng is not None:
        W = W @ _random_orthogonal(rng, o)
        K = K @ _random_orthogonal(rng, K.shape[1])
    basis = np.hstack([W, K])  # orthogonal: complement first, kernel last
    T = basis.T
    Pi = T[:o]

    A = [T @ Ai @ basis for Ai in sys.A.coeffs]
    reduced = LpvSsa.from_matrices(
        A=[Ai[:o, :o] for Ai in A],
        B=[(T @ Bi)[:o] for Bi in sys.B.coeffs],
        C=[(Ci @ basis)[:, :o] for Ci in sys.C.coeffs],
        D=list(sys.D.coeffs),
        region=sys.region,
        domain=sys.domain,
    )
    return ReductionResult(reduced=reduced, transform_T=T, projection_Pi=Pi, o=o)


def minimize(
    sys: LpvSsa,
    *,
    grid_per_axis: int = 10,
    rng: np.random.Generator = None,
    rtol: float = None,
) -> ReductionResult:
    """Observability reduction with the minimality claim made explicit.

    Minimality of the observable reduction is only guaranteed under the
    regularity certificate, so the certificate is evaluated alongside and
    the result is flagged ``"minimal (behavioral)"`` when it certifies or
    heuristically passes, and ``"observable reduction only"`` otherwise.
    (Without regularity an observable system can still admit a smaller
    realization of the same behavior.)
    """
    result = observability_reduction(sys, rng=rng, rtol=rtol)
    rc = check_rc(sys, grid_per_axis)
    flag = "minimal (behavioral)" if rc.holds else "observable reduction only"
    return replace(result, minimality=flag, rc=rc)


def reachability_reduction(
    sys: LpvSsa,
    *,
    rng: np.random.Generator = None,
    rtol: float = None,
) -> ReductionResult:
    """Restrict to the span-reachable-from-zero part via the dual system.

    Dualize, reduce, dualize back: the reduced system is span-reachable
    from zero, and the returned transform is the dual reduction's, so the
    block structure is the transpose of the observability case
    (``T A_i T^{-1}`` block upper-triangular, last rows of ``T B_i``
    zero).
    """
    dual = observability_reduction(transpose_dual(sys), rng=rng, rtol=rtol)
    return ReductionResult(
        reduced=transpose_dual(dual.reduced),
        transform_T=dual.transform_T,
        projection_Pi=dual.projection_Pi,
        o=dual.o,
    )

"""Lowest eigenvalues, spectral gaps, and operator-inequality witnesses.

The gap of a positive-semidefinite operator is its smallest eigenvalue
strictly above the kernel tolerance; kernel multiplicity never enters.
Dimensions up to `dense_limit` go through a full Hermitian
eigendecomposition; larger ones use ARPACK's implicitly restarted Lanczos
(which='SA') on the matrix-free operator, with a seeded start vector for
determinism and a widened Krylov basis to resolve the clustered
near-zero spectra frustration-free Hamiltonians produce.  In the iterative
path the reported kernel dimension is an estimate: Lanczos may not resolve
the full multiplicity of a degenerate kernel even when the gap itself is
converged well past the requested tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator

from gapcert.operators import CompositeOperator, dense_matrix

KERNEL_TOL = 1e-8


class SolverConvergenceError(RuntimeError):
    """Eigensolver failed to converge; `partial` holds any converged pairs."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or []


class GapUndefinedError(RuntimeError):
    """All computed eigenvalues sit inside the kernel tolerance."""


@dataclass(frozen=True)
class EigenSolveConfig:
    """Eigensolver knobs; identical config + seed gives identical output.

    tol = 0 means machine precision for the iterative path.  dense_limit is
    the dimension at or below which the dense path is used.  max_k caps the
    adaptive escalation of k in spectral_gap.
    """

    k: int = 8
    tol: float = 0.0
    max_iter: int | None = None
    ncv: int | None = None
    seed: int = 7
    dense_limit: int = 4096
    max_k: int = 64

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.tol < 0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")


DEFAULT_CONFIG = EigenSolveConfig()


@dataclass
class GapReport:
    """Lowest eigenvalues with residuals, kernel count, and the gap."""

    eigenvalues: list
    residuals: list
    kernel_dim: int
    gap: float
    kernel_tol: float
    method: str
    k_used: int


def _residuals(op, vals, vecs):
    out = []
    for lam, v in zip(vals, vecs.T):
        out.append(float(np.linalg.norm(op.apply(v) - lam * v)))
    return out


def lowest_eigenvalues(op, config: EigenSolveConfig | None = None):
    """The k smallest eigenvalues of a Hermitian operator, with residuals.

    Returns [(eigenvalue, residual)] ascending.  Dense path below
    config.dense_limit; ARPACK otherwise.  On partial convergence the
    converged pairs are returned (fewer than k); if nothing converged,
    SolverConvergenceError is raised.
    """
    config = config or DEFAULT_CONFIG
    dim = op.dimension
    k = min(config.k, dim)

    if dim <= config.dense_limit:
        A = dense_matrix(op, limit=dim)
        vals, vecs = scipy.linalg.eigh(A)
        vals, vecs = vals[:k], vecs[:, :k]
        return list(zip(vals.tolist(), _residuals(op, vals, vecs)))

    if k > dim - 2:
        # eigsh cannot take k >= dim-1 for a matrix-free operator
        raise ValueError(f"iterative path needs k <= dimension-2, got k={k}, dim={dim}")
    rng = np.random.default_rng(config.seed)
    v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v0 /= np.linalg.norm(v0)
    ncv = config.ncv or min(dim, max(2 * k + 16, 52))
    ncv = max(ncv, k + 2)
    lin = LinearOperator(
        (dim, dim), matvec=op.apply, dtype=np.complex128
    )
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(
            lin,
            k=k,
            which="SA",
            v0=v0,
            ncv=ncv,
            maxiter=config.max_iter or 20000,
            tol=config.tol,
        )
    except ArpackNoConvergence as exc:
        vals, vecs = exc.eigenvalues, exc.eigenvectors
        if vals is None or len(vals) == 0:
            raise SolverConvergenceError(
                f"ARPACK failed to converge any of {k} eigenvalues at dim {dim}"
            ) from exc
    except ArpackError as exc:
        # e.g. error -9 when the operator annihilates the start vector
        raise SolverConvergenceError(
            f"ARPACK could not iterate at dim {dim}: {exc}"
        ) from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    return list(zip(vals.tolist(), _residuals(op, vals, vecs)))


def spectral_gap(op, kernel_tol: float = KERNEL_TOL, config: EigenSolveConfig | None = None) -> GapReport:
    """Smallest eigenvalue above kernel_tol, escalating k until one is found.

    k doubles (capped at config.max_k, and at the dimension) while every
    computed eigenvalue sits at or below kernel_tol.  Dense solves see the
    whole spectrum at once, so no escalation is needed there.
    """
    config = config or DEFAULT_CONFIG
    dim = op.dimension

    if dim <= config.dense_limit:
        A = dense_matrix(op, limit=dim)
        vals, vecs = scipy.linalg.eigh(A)
        kernel_dim = int(np.sum(vals <= kernel_tol))
        if kernel_dim == dim:
            raise GapUndefinedError(
                f"all {dim} eigenvalues lie within kernel tolerance {kernel_tol}"
            )
        k = min(max(config.k, kernel_dim + 1), dim)
        report_vals = vals[:k]
        report_vecs = vecs[:, :k]
        return GapReport(
            eigenvalues=report_vals.tolist(),
            residuals=_residuals(op, report_vals, report_vecs),
            kernel_dim=kernel_dim,
            gap=float(vals[kernel_dim]),
            kernel_tol=kernel_tol,
            method="dense",
            k_used=k,
        )

    k = max(config.k, 2)
    while True:
        pairs = lowest_eigenvalues(op, replace(config, k=k))
        vals = [v for v, _ in pairs]
        above = [v for v in vals if v > kernel_tol]
        if above:
            kernel_dim = len(vals) - len(above)
            return GapReport(
                eigenvalues=vals,
                residuals=[r for _, r in pairs],
                kernel_dim=kernel_dim,
                gap=float(min(above)),
                kernel_tol=kernel_tol,
                method="iterative",
                k_used=k,
            )
        if k >= min(config.max_k, dim - 2):
            raise GapUndefinedError(
                f"all {len(vals)} computed eigenvalues lie within kernel tolerance "
                f"{kernel_tol} after escalating k to {k}"
            )
        k = min(2 * k, config.max_k, dim - 2)


def is_frustration_free(op, tol: float = KERNEL_TOL, config: EigenSolveConfig | None = None) -> bool:
    """True iff the lowest eigenvalue is <= tol (the operator has a kernel)."""
    config = config or DEFAULT_CONFIG
    k = min(4, config.k)
    pairs = lowest_eigenvalues(op, replace(config, k=k))
    return pairs[0][0] <= tol


def check_operator_inequality(
    lhs,
    rhs,
    tol: float = 1e-9,
    config: EigenSolveConfig | None = None,
):
    """Witness for lhs >= rhs: (min_eig(lhs - rhs) >= -tol, that eigenvalue)."""
    diff = CompositeOperator.from_operator(lhs) - CompositeOperator.from_operator(rhs)
    pairs = lowest_eigenvalues(diff, config)
    witness = pairs[0][0]
    return witness >= -tol, float(witness)

"""Many-body operators from local projections, and the H^2 = H + Q + R split.

A nearest-neighbor interaction is a projection P on C^d (x) C^d; embedding
it on an edge (j, k) of a site list gives h_{j,k} = P (x) Id_elsewhere.
Operators are kept matrix-free: a term list plus index arithmetic for the
matvec.  Basis convention: site order follows the site list, with the first
site the most significant tensor factor, i.e. basis index
sum_i s_i * d^(m-1-i) -- the layout np.kron produces.

Squaring H = sum_e h_e with h_e^2 = h_e gives H^2 = H + Q + R, where Q
collects anticommutators {h_e, h_e'} of touching distinct edge pairs and R
those of disjoint (hence commuting) pairs; each R summand is a product of
commuting positive-semidefinite projections, so R >= 0.  Both are
represented lazily as products applied by sequential matvecs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from gapcert.lattice import PairClass, classify_pair

DEFAULT_MATVEC_LIMIT = 2**28
DEFAULT_DENSE_LIMIT = 2**14
PROJECTION_TOL = 1e-12


class DimensionLimitError(RuntimeError):
    """Raised when an operation would exceed a configured dimension limit."""


def projection_defects(P) -> tuple[float, float]:
    """Spectral-norm defects (||P - P*||, ||P^2 - P||) of a square matrix."""
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {P.shape}")
    herm = np.linalg.norm(P - P.conj().T, 2)
    idem = np.linalg.norm(P @ P - P, 2)
    return float(herm), float(idem)


def projection_check(P, tol: float = PROJECTION_TOL) -> bool:
    """True iff P is Hermitian and idempotent within tol (spectral norm)."""
    herm, idem = projection_defects(P)
    return herm <= tol and idem <= tol


@dataclass(frozen=True, eq=False)
class NNInteraction:
    """Local dimension d and a projection P on the two-site space C^(d^2)."""

    d: int
    P: np.ndarray
    name: str = ""

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.complex128)
        if P.shape != (self.d**2, self.d**2):
            raise ValueError(
                f"interaction matrix shape {P.shape} does not match d^2 = {self.d**2}"
            )
        object.__setattr__(self, "P", P)

    def check(self, tol: float = PROJECTION_TOL) -> bool:
        return projection_check(self.P, tol)


@functools.lru_cache(maxsize=128)
def _pair_bit_groups(dim: int, b_hi: int, b_lo: int):
    """Index groups for a two-site d=2 term: basis indices whose (b_hi, b_lo)
    bits equal (g >> 1, g & 1), each group listed in the same residual order."""
    rest = np.arange(dim >> 2, dtype=np.intp)
    for b in sorted((b_hi, b_lo)):
        low = rest & ((1 << b) - 1)
        rest = ((rest >> b) << (b + 1)) | low
    return tuple(
        rest + ((g >> 1) << b_hi) + ((g & 1) << b_lo) for g in range(4)
    )


class ManyBodyOperator:
    """Hermitian sum of local terms embedded on an ordered site list.

    `terms` is a list of (sites, matrix) with `sites` a tuple of entries of
    `site_list` (length k >= 1) and `matrix` of shape (d^k, d^k) acting on
    those tensor factors in the given order.
    """

    def __init__(self, site_list, d: int, terms):
        self.site_list = list(site_list)
        self.d = int(d)
        if len(set(self.site_list)) != len(self.site_list):
            raise ValueError("site list contains duplicates")
        self.dimension = self.d ** len(self.site_list)
        index = {s: i for i, s in enumerate(self.site_list)}
        self._positions = []
        self._mats = []
        for sites_of_term, M in terms:
            pos = tuple(index[s] for s in sites_of_term)
            if len(set(pos)) != len(pos):
                raise ValueError(f"term touches a site twice: {sites_of_term}")
            M = np.ascontiguousarray(M, dtype=np.complex128)
            want = self.d ** len(pos)
            if M.shape != (want, want):
                raise ValueError(
                    f"term matrix shape {M.shape} does not match d^{len(pos)} = {want}"
                )
            self._positions.append(pos)
            self._mats.append(M)

    @property
    def terms(self):
        return [
            (tuple(self.site_list[i] for i in pos), M)
            for pos, M in zip(self._positions, self._mats)
        ]

    @property
    def n_terms(self) -> int:
        return len(self._mats)

    def apply(self, v):
        """Matvec; accepts a vector (dim,) or a column batch (dim, nb)."""
        v = np.asarray(v, dtype=np.complex128)
        if v.shape[0] != self.dimension:
            raise ValueError(
                f"vector length {v.shape[0]} does not match dimension {self.dimension}"
            )
        m, d = len(self.site_list), self.d
        out = np.zeros_like(v)
        vr = v.reshape((d,) * m + v.shape[1:])
        outr = out.reshape(vr.shape)
        for pos, M in zip(self._positions, self._mats):
            if d == 2 and len(pos) == 2:
                b_hi = m - 1 - pos[0]
                b_lo = m - 1 - pos[1]
                groups = _pair_bit_groups(self.dimension, b_hi, b_lo)
                vals = [v[g] for g in groups]
                for g in range(4):
                    acc = M[g, 0] * vals[0]
                    for h in range(1, 4):
                        acc += M[g, h] * vals[h]
                    out[groups[g]] += acc
            else:
                k = len(pos)
                Mr = M.reshape((d,) * (2 * k))
                t = np.tensordot(Mr, vr, axes=(tuple(range(k, 2 * k)), pos))
                outr += np.moveaxis(t, tuple(range(k)), pos)
        return out

    def __matmul__(self, v):
        return self.apply(v)


class CompositeOperator:
    """Real linear combination of products of operator factors.

    Parts are (coefficient, factors) with factors a tuple of operators
    applied right-to-left, so (c, (A, B)) contributes c * A(B(v)).  The
    combination is Hermitian whenever the caller includes products in
    conjugate-transposed pairs (or squares of Hermitian factors), as the
    constructors here do.
    """

    def __init__(self, dimension: int, parts):
        self.dimension = int(dimension)
        self.parts = []
        for coeff, factors in parts:
            factors = tuple(factors)
            for f in factors:
                if f.dimension != self.dimension:
                    raise ValueError("factor dimension mismatch")
            self.parts.append((float(coeff), factors))

    @classmethod
    def from_operator(cls, op, coeff: float = 1.0):
        if isinstance(op, CompositeOperator):
            return coeff * op
        return cls(op.dimension, [(coeff, (op,))])

    def apply(self, v):
        v = np.asarray(v, dtype=np.complex128)
        if v.shape[0] != self.dimension:
            raise ValueError(
                f"vector length {v.shape[0]} does not match dimension {self.dimension}"
            )
        out = np.zeros_like(v)
        for coeff, factors in self.parts:
            w = v
            for f in reversed(factors):
                w = f.apply(w)
            out += coeff * w
        return out

    def __matmul__(self, v):
        return self.apply(v)

    def __add__(self, other):
        other = CompositeOperator.from_operator(other)
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        return CompositeOperator(self.dimension, self.parts + other.parts)

    def __sub__(self, other):
        return self + (-1.0) * CompositeOperator.from_operator(other)

    def __rmul__(self, scalar):
        return CompositeOperator(
            self.dimension, [(float(scalar) * c, f) for c, f in self.parts]
        )

    def __neg__(self):
        return (-1.0) * self


@dataclass
class TermDecomposition:
    """The split H^2 = H + Q + R over edge pairs."""

    H: ManyBodyOperator
    Q: CompositeOperator
    R: CompositeOperator
    n_touching_pairs: int = 0
    n_disjoint_pairs: int = 0


def build_hamiltonian(
    interaction: NNInteraction,
    edges,
    site_list,
    matvec_limit: int | None = DEFAULT_MATVEC_LIMIT,
) -> ManyBodyOperator:
    """Sum of the interaction embedded on every edge; term order = sorted edges."""
    if not interaction.check():
        herm, idem = projection_defects(interaction.P)
        raise ValueError(
            f"interaction failed projection check: ||P-P*||={herm:.3g}, ||P^2-P||={idem:.3g}"
        )
    site_list = list(site_list)
    dim = interaction.d ** len(site_list)
    if matvec_limit is not None and dim > matvec_limit:
        raise DimensionLimitError(
            f"dimension {interaction.d}^{len(site_list)} exceeds matvec limit {matvec_limit}"
        )
    terms = [((e.tail, e.head), interaction.P) for e in sorted(edges)]
    return ManyBodyOperator(site_list, interaction.d, terms)


def single_term_operator(op: ManyBodyOperator, term_index: int) -> ManyBodyOperator:
    """One embedded term of `op` as a standalone operator on the same sites."""
    sites_of_term, M = op.terms[term_index]
    return ManyBodyOperator(op.site_list, op.d, [(sites_of_term, M)])


def build_QR(
    interaction: NNInteraction,
    edges,
    site_list,
    matvec_limit: int | None = DEFAULT_MATVEC_LIMIT,
) -> TermDecomposition:
    """H plus the anticommutator sums Q (touching pairs) and R (disjoint pairs).

    Each unordered pair contributes both orders, so a disjoint pair enters R
    as h1 h2 + h2 h1 = 2 h1 h2.  Pairs of distinct slots carrying the same
    endpoints (side-2 wrap) do not commute in general and are kept in Q.
    """
    H = build_hamiltonian(interaction, edges, site_list, matvec_limit)
    ordered = sorted(edges)
    singles = [single_term_operator(H, i) for i in range(len(ordered))]
    q_parts, r_parts = [], []
    n_touch = n_disj = 0
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            both_orders = [
                (1.0, (singles[i], singles[j])),
                (1.0, (singles[j], singles[i])),
            ]
            if classify_pair(ordered[i], ordered[j]) is PairClass.DISJOINT:
                r_parts += both_orders
                n_disj += 1
            else:
                q_parts += both_orders
                n_touch += 1
    return TermDecomposition(
        H=H,
        Q=CompositeOperator(H.dimension, q_parts),
        R=CompositeOperator(H.dimension, r_parts),
        n_touching_pairs=n_touch,
        n_disjoint_pairs=n_disj,
    )


def dense_matrix(op, limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Materialize the operator by applying it to identity columns."""
    dim = op.dimension
    if dim > limit:
        raise DimensionLimitError(f"dimension {dim} exceeds dense limit {limit}")
    out = np.empty((dim, dim), dtype=np.complex128)
    step = max(1, min(dim, (2**22) // max(dim, 1)))
    for j0 in range(0, dim, step):
        nb = min(step, dim - j0)
        block = np.zeros((dim, nb), dtype=np.complex128)
        block[j0 + np.arange(nb), np.arange(nb)] = 1.0
        out[:, j0 : j0 + nb] = op.apply(block)
    return out


@dataclass
class SquareIdentityReport:
    """Residuals of (H^2 - H - Q - R) v over random unit vectors."""

    residuals: list = field(default_factory=list)
    tol: float = 1e-10
    n_touching_pairs: int = 0
    n_disjoint_pairs: int = 0

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_square_identity(
    interaction: NNInteraction,
    edges,
    site_list,
    trials: int = 20,
    tol: float = 1e-10,
    seed: int = 0,
) -> SquareIdentityReport:
    """Check H^2 = H + Q + R on random unit vectors; exact up to roundoff."""
    dec = build_QR(interaction, edges, site_list)
    H, Q, R = dec.H, dec.Q, dec.R
    rng = np.random.default_rng(seed)
    report = SquareIdentityReport(
        tol=tol,
        n_touching_pairs=dec.n_touching_pairs,
        n_disjoint_pairs=dec.n_disjoint_pairs,
    )
    dim = H.dimension
    for _ in range(trials):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        hv = H.apply(v)
        resid = H.apply(hv) - hv - Q.apply(v) - R.apply(v)
        report.residuals.append(float(np.linalg.norm(resid)))
    return report


def cauchy_schwarz_witness(
    P1: NNInteraction,
    P2: NNInteraction,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> float:
    """Minimum eigenvalue of {h12, h23} + h12 + h23 on a 3-site chain.

    Non-negativity is the operator Cauchy-Schwarz inequality
    -{A, B} <= A^2 + B^2 specialized to projections (A^2 = A).
    """
    if P1.d != P2.d:
        raise ValueError(f"local dimensions differ: {P1.d} != {P2.d}")
    d = P1.d
    if d**3 > dense_limit:
        raise DimensionLimitError(f"dimension {d**3} exceeds dense limit {dense_limit}")
    h12 = np.kron(P1.P, np.eye(d))
    h23 = np.kron(np.eye(d), P2.P)
    W = h12 @ h23 + h23 @ h12 + h12 + h23
    return float(np.linalg.eigvalsh(W)[0])

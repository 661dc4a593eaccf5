"""Finite-range interactions in D=3 and one-step coarse-graining to metaspins.

A finite-range model is a local dimension d, an odd range R, and a set of
interaction shapes: offset sets S containing the origin, each carrying a
projection on (C^d)^{|S|} (tensor factors in lexicographic offset order).
Space is partitioned into cubes C(y) of side R centered at y in R*Z^3; a
translated term P_{x+S} touches at most two cubes per axis, so its covering
cube block is a sub-block of a 2x2x2 cluster.  Grouping translated terms by
the spanned axes of their cover gives four class kinds -- on-site, face,
edge-adjacent, corner-adjacent -- and the coarse interaction of a class is
the projection onto the orthogonal complement of the joint kernel of all
terms assigned to its block.  That construction preserves ground spaces
exactly: on any cube region, the kernels of the original and coarse-grained
Hamiltonians coincide.

Class matrices act on d^{R^3}-dimensional metaspins and are materialized
lazily: at R=3, d=2 a face block already has dimension 2^54, far beyond
dense limits, while the class structure (assignments, counts, kinds) stays
cheap at any R.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from gapcert.operators import (
    DEFAULT_DENSE_LIMIT,
    DEFAULT_MATVEC_LIMIT,
    PROJECTION_TOL,
    DimensionLimitError,
    ManyBodyOperator,
    dense_matrix,
    projection_check,
    projection_defects,
)

KERNEL_CUT = 1e-8
SUBSPACE_TOL = 1e-9

Vec3 = tuple


def _as_vec3(t) -> Vec3:
    t = tuple(int(c) for c in t)
    if len(t) != 3:
        raise ValueError(f"expected a 3-vector, got {t}")
    return t


@dataclass(frozen=True, eq=False)
class InteractionShape:
    """An offset set S (lex-sorted, containing the origin) and its projection.

    The projection acts on (C^d)^{|S|} with tensor factors ordered by the
    lexicographic order of the offsets.
    """

    offsets: tuple
    projection: np.ndarray

    def __post_init__(self):
        offs = tuple(sorted(_as_vec3(o) for o in self.offsets))
        if len(set(offs)) != len(offs):
            raise ValueError("shape offsets contain duplicates")
        if (0, 0, 0) not in offs:
            raise ValueError("shape offsets must contain the origin")
        P = np.asarray(self.projection, dtype=np.complex128)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"projection must be square, got shape {P.shape}")
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "projection", P)

    @property
    def n_sites(self) -> int:
        return len(self.offsets)

    def span(self, axis: int) -> int:
        vals = [o[axis] for o in self.offsets]
        return max(vals) - min(vals)


def diam1(shape) -> int:
    """Maximum pairwise l1 distance over an offset set (or a shape)."""
    offsets = shape.offsets if isinstance(shape, InteractionShape) else [
        _as_vec3(o) for o in shape
    ]
    if not offsets:
        raise ValueError("diam1 of an empty offset set")
    return max(
        sum(abs(a[i] - b[i]) for i in range(3))
        for a in offsets
        for b in offsets
    )


@dataclass(frozen=True, eq=False)
class FiniteRangeSpec:
    """Local dimension, odd range R, and the interaction shapes."""

    d: int
    shapes: tuple
    R: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.d}")
        if self.R < 1 or self.R % 2 == 0:
            raise ValueError(f"range R must be odd and positive, got {self.R}")
        shapes = tuple(self.shapes)
        for s in shapes:
            want = self.d**s.n_sites
            if s.projection.shape != (want, want):
                raise ValueError(
                    f"projection shape {s.projection.shape} does not match "
                    f"d^{s.n_sites} = {want}"
                )
            if not projection_check(s.projection):
                dh, di = projection_defects(s.projection)
                raise ValueError(
                    f"shape matrix fails projection check: "
                    f"|P - P*| = {dh:.3e}, |P^2 - P| = {di:.3e}"
                )
        object.__setattr__(self, "shapes", shapes)


def validate_range(spec: FiniteRangeSpec) -> bool:
    """True iff every shape has l1 diameter strictly below R."""
    return all(diam1(s) < spec.R for s in spec.shapes)


def cube_of(site, R: int) -> Vec3:
    """Index b of the side-R cube C(R*b) containing the site."""
    h = (R - 1) // 2
    return tuple((c + h) // R for c in _as_vec3(site))


@dataclass(frozen=True)
class MetaCube:
    """The cube C(center) of R^3 sites, center in R*Z^3."""

    center: Vec3
    R: int

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vec3(self.center))
        if self.R < 1 or self.R % 2 == 0:
            raise ValueError(f"cube side must be odd and positive, got {self.R}")

    @property
    def sites(self):
        h = (self.R - 1) // 2
        return [
            tuple(c + a for c, a in zip(self.center, off))
            for off in itertools.product(range(-h, h + 1), repeat=3)
        ]


def build_Cn_region(n: int, R: int):
    """Sites of the union of the (n+1)^3 cubes C(R*b), b in [0, n]^3."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sites = []
    for b in itertools.product(range(n + 1), repeat=3):
        sites.extend(MetaCube(tuple(R * c for c in b), R).sites)
    return sorted(sites)


def build_HCn(spec: FiniteRangeSpec, n: int, matvec_limit: int = DEFAULT_MATVEC_LIMIT) -> ManyBodyOperator:
    """Open-boundary Hamiltonian on C_n: all translates x+S inside the region."""
    region = build_Cn_region(n, spec.R)
    dim = spec.d ** len(region)
    if dim > matvec_limit:
        raise DimensionLimitError(
            f"region dimension {spec.d}^{len(region)} exceeds limit {matvec_limit}"
        )
    inside = set(region)
    terms = []
    for x in region:
        for shape in spec.shapes:
            sites = tuple(
                tuple(x[i] + o[i] for i in range(3)) for o in shape.offsets
            )
            if all(s in inside for s in sites):
                terms.append((sites, shape.projection))
    return ManyBodyOperator(region, spec.d, terms)


class CoarseKind(Enum):
    ON_SITE = "OnSite"
    FACE = "Face"
    EDGE_ADJ = "EdgeAdj"
    CORNER_ADJ = "CornerAdj"


_KIND_BY_SPAN = {
    0: CoarseKind.ON_SITE,
    1: CoarseKind.FACE,
    2: CoarseKind.EDGE_ADJ,
    3: CoarseKind.CORNER_ADJ,
}


@dataclass(eq=False)
class CoarseClass:
    """One coarse interaction: a cube block plus the terms assigned to it.

    `block` lists the covering cubes as relative cube indices in {0,1}^3
    (lex order); `assigned` holds (shape, anchor) pairs with the anchor in
    block coordinates, where the base cube occupies [0, R-1]^3.  The matrix
    is the projection onto the complement of the joint kernel of the
    assigned terms on the block, materialized on demand because its
    dimension d^{R^3 * 2^k} is usually far beyond dense limits.
    """

    kind: CoarseKind
    axes: tuple
    block: tuple
    assigned: tuple
    d: int
    R: int
    _matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_terms(self) -> int:
        return len(self.assigned)

    @property
    def n_cubes(self) -> int:
        return len(self.block)

    @property
    def block_dim(self) -> int:
        return self.d ** (self.n_cubes * self.R**3)

    def block_sites(self):
        """Block sites in metaspin order: cube-major, lex within each cube."""
        sites = []
        for c in self.block:
            for q in itertools.product(range(self.R), repeat=3):
                sites.append(tuple(self.R * c[i] + q[i] for i in range(3)))
        return sites

    def matrix(self, limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        dim = self.block_dim
        if dim > limit:
            raise DimensionLimitError(
                f"{self.kind.value} block dimension {self.d}^"
                f"{self.n_cubes * self.R**3} = {dim} exceeds limit {limit}; "
                f"materialization is feasible only for "
                f"d^(cubes*R^3) <= {limit}"
            )
        sites = self.block_sites()
        terms = []
        for shape, anchor in self.assigned:
            term_sites = tuple(
                tuple(anchor[i] + o[i] for i in range(3)) for o in shape.offsets
            )
            terms.append((term_sites, shape.projection))
        op = ManyBodyOperator(sites, self.d, terms)
        H = dense_matrix(op, limit=dim)
        if len(self.assigned) == 1 and self.assigned[0][0].n_sites == len(sites):
            # single term covering the whole block: H is already the
            # complement-of-kernel projection, entrywise exact
            M = H
        else:
            vals, vecs = scipy.linalg.eigh(H)
            V = vecs[:, vals <= KERNEL_CUT]
            M = np.eye(dim, dtype=np.complex128) - V @ V.conj().T
            M = (M + M.conj().T) / 2
        self._matrix = M
        return M


@dataclass(eq=False)
class CoarseGrainedSpec:
    """Coarse interaction classes of one metaspin unit cell."""

    d: int
    R: int
    classes: tuple

    @property
    def metaspin_dim(self) -> int:
        return self.d ** self.R**3

    @property
    def n_cell_terms(self) -> int:
        return sum(c.n_terms for c in self.classes)

    def by_kind(self, kind: CoarseKind):
        return [c for c in self.classes if c.kind is kind]


def coarse_grain(spec: FiniteRangeSpec) -> CoarseGrainedSpec:
    """Partition one unit cell of translated terms into coarse classes.

    Terms are admitted when every shape spans at most R per axis (so the
    cover is a sub-block of a 2x2x2 cube cluster); this admits
    nearest-neighbor shapes at R=1, where coarse-graining is the identity.
    Classes are keyed by the set of spanned axes; every term of the cell is
    assigned to exactly one class.
    """
    R = spec.R
    h = (R - 1) // 2
    for shape in spec.shapes:
        for a in range(3):
            if shape.span(a) > R:
                raise ValueError(
                    f"shape spans {shape.span(a)} > R = {R} along axis {a}; "
                    f"cover exceeds a 2x2x2 cube block"
                )
    buckets = {}
    n_anchors = 0
    for shape in spec.shapes:
        for p in itertools.product(range(R), repeat=3):
            n_anchors += 1
            x = tuple(p[i] - h for i in range(3))
            sites = [tuple(x[i] + o[i] for i in range(3)) for o in shape.offsets]
            cube_vals = [{cube_of(s, R)[a] for s in sites} for a in range(3)]
            assert all(len(v) <= 2 for v in cube_vals)
            axes = tuple(a for a in range(3) if len(cube_vals[a]) > 1)
            b_min = tuple(min(cube_vals[a]) for a in range(3))
            base_corner = tuple(R * b_min[i] - h for i in range(3))
            anchor = tuple(x[i] - base_corner[i] for i in range(3))
            buckets.setdefault(axes, []).append((shape, anchor))
    classes = []
    for axes in sorted(buckets):
        block = tuple(
            sorted(
                itertools.product(
                    *[(0, 1) if a in axes else (0,) for a in range(3)]
                )
            )
        )
        classes.append(
            CoarseClass(
                kind=_KIND_BY_SPAN[len(axes)],
                axes=axes,
                block=block,
                assigned=tuple(buckets[axes]),
                d=spec.d,
                R=R,
            )
        )
    cg = CoarseGrainedSpec(d=spec.d, R=R, classes=tuple(classes))
    if cg.n_cell_terms != n_anchors:
        raise AssertionError(
            f"term conservation violated: {cg.n_cell_terms} assigned "
            f"vs {n_anchors} translated terms per cell"
        )
    return cg


def metacube_adjacency_counts() -> dict:
    """Face/edge/corner neighbor counts of a metacube, by enumeration."""
    counts = {"face": 0, "edge": 0, "corner": 0}
    for off in itertools.product((-1, 0, 1), repeat=3):
        touched = sum(1 for c in off if c != 0)
        if touched == 1:
            counts["face"] += 1
        elif touched == 2:
            counts["edge"] += 1
        elif touched == 3:
            counts["corner"] += 1
    return counts


def _kernel_basis(A: np.ndarray, cut: float = KERNEL_CUT) -> np.ndarray:
    vals, vecs = scipy.linalg.eigh(A)
    return vecs[:, vals <= cut]


def verify_ground_space_preservation(spec: FiniteRangeSpec, cubes, config=None) -> bool:
    """Kernels of the original and coarse Hamiltonians coincide on a region.

    `cubes` is a collection of cube indices b (the region is the union of
    C(R*b)).  Both Hamiltonians are built densely on the region with a
    shared cube-major site order; the check is mutual subspace containment
    with residual at most 1e-9.  Raises DimensionLimitError when the region
    dimension exceeds the dense limit.
    """
    from gapcert.spectral import DEFAULT_CONFIG

    config = config or DEFAULT_CONFIG
    R = spec.R
    cube_set = sorted({_as_vec3(b) for b in cubes})
    if not cube_set:
        raise ValueError("region contains no cubes")
    region = []
    for b in cube_set:
        region.extend(MetaCube(tuple(R * c for c in b), R).sites)
    dim = spec.d ** len(region)
    if dim > config.dense_limit:
        max_sites = int(np.log(config.dense_limit) / np.log(spec.d))
        raise DimensionLimitError(
            f"region dimension {spec.d}^{len(region)} exceeds dense limit "
            f"{config.dense_limit}; at d={spec.d}, R={R} the dense check is "
            f"feasible for at most {max_sites // R**3} cube(s)"
        )

    inside = set(region)
    orig_terms = []
    for x in region:
        for shape in spec.shapes:
            sites = tuple(
                tuple(x[i] + o[i] for i in range(3)) for o in shape.offsets
            )
            if all(s in inside for s in sites):
                orig_terms.append((sites, shape.projection))
    H_orig = dense_matrix(ManyBodyOperator(region, spec.d, orig_terms), limit=dim)

    cg = coarse_grain(spec)
    cube_index = set(cube_set)
    h = (R - 1) // 2
    coarse_terms = []
    for cls in cg.classes:
        M = cls.matrix(limit=config.dense_limit)
        shifts = {
            tuple(b[i] - c[i] for i in range(3))
            for b in cube_set
            for c in cls.block
        }
        for t in sorted(shifts):
            covered = [tuple(t[i] + c[i] for i in range(3)) for c in cls.block]
            if not all(b in cube_index for b in covered):
                continue
            sites = []
            for b in covered:
                center = tuple(R * c for c in b)
                sites.extend(MetaCube(center, R).sites)
            coarse_terms.append((tuple(sites), M))
    H_cg = dense_matrix(ManyBodyOperator(region, spec.d, coarse_terms), limit=dim)

    V1 = _kernel_basis(H_orig)
    V2 = _kernel_basis(H_cg)
    if V1.shape[1] != V2.shape[1]:
        return False
    if V1.shape[1] == 0:
        return True
    r12 = np.linalg.norm(V1 - V2 @ (V2.conj().T @ V1), ord=2)
    r21 = np.linalg.norm(V2 - V1 @ (V1.conj().T @ V2), ord=2)
    return max(r12, r21) <= SUBSPACE_TOL


def gap_bound_fr(gamma_Cn: float, n: int, c1: float, c2: float) -> float:
    """Finite-range gap bound c1 * (gamma_Cn - c2/n); constants caller-supplied."""
    if c1 <= 0 or c2 <= 0:
        raise ValueError(f"constants must be positive, got c1={c1}, c2={c2}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return c1 * (gamma_Cn - c2 / n)

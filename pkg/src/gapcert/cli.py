"""Command-line surface: gap solves, certification, verifiers, and sweeps.

Exit codes are exhaustive and mutually exclusive: 0 success (or all checks
passed), 1 verification failure, 2 numerical failure (solver did not
converge or no gap is defined), 3 configuration error (bad flags, unknown
model, precondition violations, infeasible dimensions).

Size conventions: `gap` and `certify --theorem main` take the box
parameter n of {0..n}^D, so the solved grid has side n+1 per axis;
`certify --theorem gm|lm` and `sweep` count sites directly (an n-row in a
sweep is the n-site-per-axis grid), which keeps sweep rows aligned with
the chain-length scaling fits and the chain criteria.

All floating-point output uses 12 significant digits; sweep CSVs are
byte-identical across runs for identical configuration (runtime_ms is 0
unless --timings is given).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from gapcert.coarsegrain import (
    CoarseKind,
    FiniteRangeSpec,
    coarse_grain,
    verify_ground_space_preservation,
)
from gapcert.criteria import (
    THEOREMS,
    aligned_pair_witness,
    certify,
    fit_power_law,
    per_box_bound_witness,
    subsystem_gap,
    threshold_gm,
    threshold_lm,
    threshold_main,
    verify_proposition_key,
)
from gapcert.lattice import (
    LatticeGeometry,
    grid_edges,
    grid_sites,
    verify_counting_lemma,
)
from gapcert.models import (
    MODELS,
    ModelFormatError,
    random_projection,
    resolve_model,
)
from gapcert.operators import (
    DimensionLimitError,
    NNInteraction,
    cauchy_schwarz_witness,
    projection_check,
    verify_square_identity,
)
from gapcert.spectral import (
    EigenSolveConfig,
    GapUndefinedError,
    SolverConvergenceError,
)

DEFAULT_DENSE_LIMIT = 4096
CSV_HEADER = (
    "model,D,n,boundary,gap,kernel_dim,threshold_main,threshold_gm,"
    "threshold_lm,margin_selected,runtime_ms"
)


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _fmt_bool(b) -> str:
    return "true" if b else "false"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; config errors are exit 3 here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Validated knobs of one CLI invocation."""

    command: str
    check: str | None = None
    model: str | None = None
    D: int = 1
    n: int | None = None
    n_from: int | None = None
    n_to: int | None = None
    N: int | None = None
    side: int | None = None
    theorem: str | None = None
    boundary: str = "open"
    R: int = 1
    d: int = 2
    rank: int | None = None
    trials: int = 20
    samples: int = 100
    seed: int = 7
    dense_limit: int | None = None
    out: str | None = None
    timings: bool = False
    override_low_d: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in vars(args).items() if k in fields and v is not None})

    @property
    def resolved_dense_limit(self) -> int:
        if self.dense_limit is not None:
            return self.dense_limit
        env = os.environ.get("GAPCERT_DENSE_LIMIT")
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise ValueError(
                    f"GAPCERT_DENSE_LIMIT must be an integer, got {env!r}"
                ) from None
        return DEFAULT_DENSE_LIMIT

    @property
    def solver_config(self) -> EigenSolveConfig:
        return EigenSolveConfig(seed=self.seed, dense_limit=self.resolved_dense_limit)


def _nn_model(cfg: RunConfig) -> NNInteraction:
    model = resolve_model(cfg.model)
    if not isinstance(model, NNInteraction):
        raise ValueError(
            f"model {cfg.model!r} is a finite-range spec; this command needs "
            f"a nearest-neighbor model"
        )
    return model


# -- gap --------------------------------------------------------------------


def cmd_gap(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.n < 1:
        raise ValueError(f"--n must be >= 1, got {cfg.n}")
    model = _nn_model(cfg)
    periodic = cfg.boundary == "periodic"
    side = cfg.n + 1
    report = subsystem_gap(
        model, cfg.D, side, periodic=periodic, config=cfg.solver_config
    )
    dim = model.d ** (side**cfg.D)
    print(f"model: {model.name} (d={model.d})")
    print(
        f"geometry: D={cfg.D}, n={cfg.n}, side {side}, {cfg.boundary}, "
        f"{dim} states"
    )
    print("eigenvalues:", " ".join(_fmt(v) for v in report.eigenvalues))
    print("residuals:", " ".join(_fmt(r) for r in report.residuals))
    print(f"kernel_dim: {report.kernel_dim}")
    print(f"frustration_free: {_fmt_bool(report.kernel_dim > 0)}")
    print(f"gap: {_fmt(report.gap)}")
    print(f"method: {report.method} (k={report.k_used})")
    return 0


# -- certify ----------------------------------------------------------------


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ValueError("--n is required")
    model = _nn_model(cfg)
    result = certify(
        model,
        D=cfg.D,
        n=cfg.n,
        theorem=cfg.theorem,
        config=cfg.solver_config,
        allow_nonrigorous_main=cfg.override_low_d,
    )
    print(f"theorem: {result.theorem_id}")
    print(f"model: {model.name} (d={model.d})")
    print(f"D: {result.D}")
    print(f"n: {result.n}")
    if len(result.gaps) > 1:
        print(
            "gaps:",
            " ".join(f"l={ell}:{_fmt(g)}" for ell, g in sorted(result.gaps.items())),
        )
    print(f"local_gap: {_fmt(result.local_gap)}")
    print(f"threshold: {_fmt(result.threshold)}")
    print(f"margin: {_fmt(result.margin)}")
    print(f"prefactor: {_fmt(result.prefactor)}")
    print(f"implied_bound: {_fmt(result.implied_lower_bound)}")
    print(f"certified: {_fmt_bool(result.certified)}")
    print(f"rigorous: {_fmt_bool(result.rigorous)}")
    for note in result.notes:
        print(f"note: {note}")
    return 0


# -- verify -----------------------------------------------------------------


def _counts_str(counter) -> str:
    return (
        "{" + ", ".join(f"{k}: {v}" for k, v in sorted(counter.items())) + "}"
        if counter
        else "{}"
    )


def _verify_counting(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.N is None:
        raise ValueError("counting needs --n and --N")
    rep = verify_counting_lemma(cfg.n, LatticeGeometry(D=cfg.D, N=cfg.N))
    print(f"counting check: D={cfg.D}, n={cfg.n}, N={cfg.N} (torus side {2 * cfg.N})")
    print(f"edges: expected {rep.edge_expected}, observed {_counts_str(rep.edge_counts)}")
    print(
        f"aligned pairs: expected {rep.aligned_expected}, "
        f"observed {_counts_str(rep.aligned_counts)}"
    )
    if rep.bent_expected is None:
        print("bent pairs: none in D=1")
    else:
        print(
            f"bent pairs: expected {rep.bent_expected}, "
            f"observed {_counts_str(rep.bent_counts)}"
        )
    print(
        f"disjoint pairs: bound {rep.disjoint_bound}, "
        f"observed {_counts_str(rep.disjoint_counts)}"
    )
    for note in rep.notes:
        print(f"note: {note}")
    if rep.discrepancies:
        shown = rep.discrepancies[:10]
        for d in shown:
            print(f"discrepancy: {d}")
        if len(rep.discrepancies) > len(shown):
            print(f"... and {len(rep.discrepancies) - len(shown)} more")
        print(f"FAIL ({len(rep.discrepancies)} discrepancies)")
        return 1
    print("PASS")
    return 0


def _verify_square_identity(cfg: RunConfig) -> int:
    if cfg.side is None or cfg.side < 2:
        raise ValueError(f"--side must be >= 2, got {cfg.side}")
    if cfg.model == "random":
        if cfg.rank is None:
            raise ValueError("--model random needs --rank")
        model = random_projection(cfg.d, cfg.rank, cfg.seed)
    else:
        model = _nn_model(cfg)
    rep = verify_square_identity(
        model,
        grid_edges(cfg.D, cfg.side, periodic=True),
        grid_sites(cfg.D, cfg.side),
        trials=cfg.trials,
        seed=cfg.seed,
    )
    print(f"square identity: model {model.name}, D={cfg.D}, torus side {cfg.side}")
    print(
        f"pairs: {rep.n_touching_pairs} touching, {rep.n_disjoint_pairs} disjoint"
    )
    print(f"max residual over {cfg.trials} random vectors: {_fmt(rep.max_residual)}")
    print(f"tolerance: {_fmt(rep.tol)}")
    print("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def cs_witnesses(d: int, samples: int, seed: int):
    """Seeded random-projection pair witnesses for the Cauchy-Schwarz check."""
    ranks = d * d - 1
    out = []
    for i in range(samples):
        P1 = random_projection(d, 1 + i % ranks, seed + 2 * i)
        P2 = random_projection(d, 1 + (i + 1) % ranks, seed + 2 * i + 1)
        out.append(cauchy_schwarz_witness(P1, P2))
    return out


def _verify_cauchy_schwarz(cfg: RunConfig) -> int:
    if cfg.samples < 1:
        raise ValueError(f"--samples must be >= 1, got {cfg.samples}")
    witnesses = cs_witnesses(cfg.d, cfg.samples, cfg.seed)
    wmin = min(witnesses)
    print(
        f"cauchy-schwarz: d={cfg.d}, {cfg.samples} random projection pairs, "
        f"seed {cfg.seed}"
    )
    print(f"min witness: {_fmt(wmin)}")
    print("tolerance: -1e-10")
    ok = wmin >= -1e-10
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _verify_per_box(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.n < 1:
        raise ValueError(f"--n must be >= 1, got {cfg.n}")
    model = _nn_model(cfg)
    witness, gamma = per_box_bound_witness(model, cfg.D, cfg.n, config=cfg.solver_config)
    print(f"per-box bound: model {model.name}, D={cfg.D}, box side {cfg.n + 1}")
    print(f"box gap: {_fmt(gamma)}")
    print(f"min eig of H_B^2 - gap*H_B: {_fmt(witness)}")
    print("tolerance: -1e-9")
    ok = witness >= -1e-9
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _verify_coarse_grain(cfg: RunConfig) -> int:
    spec = resolve_model(cfg.model, R=cfg.R)
    if not isinstance(spec, FiniteRangeSpec):
        raise ValueError(
            f"model {cfg.model!r} is nearest-neighbor; coarse-grain-identity "
            f"needs a finite-range spec"
        )
    if spec.R != cfg.R:
        raise ValueError(f"--R {cfg.R} does not match the spec's R={spec.R}")
    dense_limit = cfg.resolved_dense_limit
    cg = coarse_grain(spec)
    print(f"coarse-grain: model {cfg.model}, d={spec.d}, R={spec.R}")
    print(
        f"cell terms: {cg.n_cell_terms} "
        f"({len(spec.shapes)} shapes x {spec.R**3} placements; conserved)"
    )
    failures = 0
    skipped = 0
    for cls in cg.classes:
        line = (
            f"class {cls.kind.value}: axes {list(cls.axes)}, "
            f"{cls.n_cubes} cube(s), {cls.n_terms} term(s), "
            f"block dim {cls.block_dim}"
        )
        if cls.block_dim <= dense_limit:
            M = cls.matrix(limit=dense_limit)
            ok = projection_check(M, tol=1e-10)
            line += f", projection {'ok' if ok else 'FAILED'}"
            if not ok:
                failures += 1
        else:
            line += ", matrix skipped (exceeds dense limit)"
            skipped += 1
        print(line)
    if spec.R == 1:
        exact = True
        for cls, shape in zip(cg.classes, spec.shapes):
            if cls.n_terms != 1 or not np.array_equal(
                cls.matrix(limit=dense_limit), cls.assigned[0][0].projection
            ):
                exact = False
        print(f"R=1 identity (matrices equal entrywise): {_fmt_bool(exact)}")
        if not exact:
            failures += 1
        preserved = verify_ground_space_preservation(
            spec, [(0, 0, 0), (1, 0, 0)], config=cfg.solver_config
        )
        print(f"ground-space preservation on a 2-cube region: {_fmt_bool(preserved)}")
        if not preserved:
            failures += 1
    elif skipped:
        print(
            f"note: {skipped} class matrices not materialized; structural "
            f"checks (assignment, term conservation) only"
        )
    print("PASS" if failures == 0 else f"FAIL ({failures} failed checks)")
    return 0 if failures == 0 else 1


def _verify_prop_key(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.N is None:
        raise ValueError("prop-key needs --n and --N")
    model = _nn_model(cfg)
    rep = verify_proposition_key(
        model, cfg.D, cfg.n, cfg.N, config=cfg.solver_config
    )
    print(f"box-sum inequalities: model {model.name}, D={cfg.D}, n={cfg.n}, N={cfg.N}")
    print(f"box gap: {_fmt(rep.gamma_box)}")
    print(f"witness upper (rhs - A): {_fmt(rep.witness1)}")
    print(f"witness lower (A - c*gap*H): {_fmt(rep.witness2)}")
    print(f"in_regime: {_fmt_bool(rep.in_regime)}")
    for note in rep.notes:
        print(f"note: {note}")
    print("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def _verify_aligned(cfg: RunConfig) -> int:
    if cfg.side is None or cfg.side < 3:
        raise ValueError(f"--side must be >= 3, got {cfg.side}")
    model = _nn_model(cfg)
    w = aligned_pair_witness(model, cfg.side, config=cfg.solver_config)
    print(f"aligned-pair aggregate: model {model.name}, ring m={cfg.side}")
    print(f"min eig of 2H + Q: {_fmt(w)}")
    print("tolerance: -1e-9")
    ok = w >= -1e-9
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


_VERIFIERS = {
    "counting": _verify_counting,
    "square-identity": _verify_square_identity,
    "cauchy-schwarz": _verify_cauchy_schwarz,
    "per-box": _verify_per_box,
    "coarse-grain-identity": _verify_coarse_grain,
    "prop-key": _verify_prop_key,
    "aligned": _verify_aligned,
}


def cmd_verify(cfg: RunConfig) -> int:
    return _VERIFIERS[cfg.check](cfg)


# -- sweep ------------------------------------------------------------------


def _csv_field(x) -> str:
    return "" if x is None else _fmt(x)


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.n_from is None or cfg.n_to is None:
        raise ValueError("sweep needs --n-from and --n-to")
    if cfg.n_from < 1:
        raise ValueError(f"--n-from must be >= 1, got {cfg.n_from}")
    if cfg.n_to < cfg.n_from:
        raise ValueError(f"empty sweep range: n-from {cfg.n_from} > n-to {cfg.n_to}")
    model = _nn_model(cfg)
    periodic = cfg.boundary == "periodic"
    lines = [CSV_HEADER]
    comments = []
    ns, gaps = [], []
    failures = 0
    for n in range(cfg.n_from, cfg.n_to + 1):
        t0 = time.perf_counter()
        try:
            rep = subsystem_gap(
                model, cfg.D, n, periodic=periodic, config=cfg.solver_config
            )
        except (SolverConvergenceError, GapUndefinedError, DimensionLimitError) as exc:
            lines.append(f"{cfg.model},{cfg.D},{n},{cfg.boundary},error,,,,,,0")
            comments.append(f"# error at n={n}: {exc}")
            failures += 1
            continue
        ms = int(round((time.perf_counter() - t0) * 1000)) if cfg.timings else 0
        thr_main = threshold_main(n) if n >= 3 else None
        thr_gm = threshold_gm(n) if n > 2 else None
        thr_lm = threshold_lm(n) if n > 3 else None
        margin = None
        if cfg.theorem == "main":
            margin = None if thr_main is None else rep.gap - thr_main
        elif cfg.theorem == "gm":
            margin = None if thr_gm is None else rep.gap - thr_gm
        elif cfg.theorem == "lm":
            margin = None if thr_lm is None else rep.gap - thr_lm
        lines.append(
            ",".join(
                [
                    str(cfg.model),
                    str(cfg.D),
                    str(n),
                    cfg.boundary,
                    _fmt(rep.gap),
                    str(rep.kernel_dim),
                    _csv_field(thr_main),
                    _csv_field(thr_gm),
                    _csv_field(thr_lm),
                    _csv_field(margin),
                    str(ms),
                ]
            )
        )
        if rep.gap > 0:
            ns.append(n)
            gaps.append(rep.gap)
    if len(ns) >= 4:
        fit = fit_power_law(ns, gaps)
        comments.append(
            f"# fit: gap ~ C*n^-alpha over {len(ns)} sizes: "
            f"alpha={_fmt(fit.exponent)}, C={_fmt(fit.prefactor)}, "
            f"r2={_fmt(fit.r_squared)}"
        )
    else:
        comments.append(
            f"# fit: skipped (needs >= 4 positive gaps, have {len(ns)})"
        )
    text = "\n".join(lines + comments) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 2 if failures else 0


# -- parser -----------------------------------------------------------------


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--dense-limit",
        type=int,
        default=None,
        help="dense-path dimension threshold (default 4096; env GAPCERT_DENSE_LIMIT)",
    )
    common.add_argument("--seed", type=int, default=7, help="solver/RNG seed")

    parser = _Parser(
        prog="gapcert",
        description="Spectral-gap certification for frustration-free spin models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gap = sub.add_parser(
        "gap", parents=[common], help="diagonalize the model on a box {0..n}^D"
    )
    p_gap.add_argument("--model", required=True, help="registry name or model file")
    p_gap.add_argument("--D", type=int, default=1, help="spatial dimension")
    p_gap.add_argument(
        "--n", type=int, required=True, help="box parameter; the grid side is n+1"
    )
    p_gap.add_argument(
        "--boundary", choices=("open", "periodic"), default="open"
    )

    p_cert = sub.add_parser(
        "certify", parents=[common], help="evaluate a finite-size gap criterion"
    )
    p_cert.add_argument("--model", required=True, help="registry name or model file")
    p_cert.add_argument("--theorem", choices=THEOREMS, required=True)
    p_cert.add_argument("--n", type=int, required=True, help="subsystem size parameter")
    p_cert.add_argument("--D", type=int, default=1, help="spatial dimension")
    p_cert.add_argument(
        "--override-low-d",
        action="store_true",
        help="run the main criterion below D=3 (flagged non-rigorous)",
    )

    # leaf parsers only: a shared dest on both this level and its children
    # would let the child's default clobber a value parsed at this level
    p_ver = sub.add_parser("verify", help="run a proof-ingredient verifier")
    vsub = p_ver.add_subparsers(dest="check", required=True)

    v_count = vsub.add_parser(
        "counting", parents=[common], help="box/pair counting on the torus"
    )
    v_count.add_argument("--D", type=int, required=True)
    v_count.add_argument("--n", type=int, required=True, help="box parameter")
    v_count.add_argument("--N", type=int, required=True, help="torus half-side")

    v_sq = vsub.add_parser(
        "square-identity", parents=[common], help="H^2 = H + Q + R on a torus"
    )
    v_sq.add_argument(
        "--model", default="heisenberg-ferro", help="registry name, file, or 'random'"
    )
    v_sq.add_argument("--D", type=int, default=1)
    v_sq.add_argument("--side", type=int, required=True, help="torus side in sites")
    v_sq.add_argument("--trials", type=int, default=20)
    v_sq.add_argument("--d", type=int, default=2, help="local dimension for --model random")
    v_sq.add_argument("--rank", type=int, default=None, help="rank for --model random")

    v_cs = vsub.add_parser(
        "cauchy-schwarz",
        parents=[common],
        help="anticommutator bound on random projection pairs",
    )
    v_cs.add_argument("--d", type=int, default=2, help="local dimension")
    v_cs.add_argument("--samples", type=int, default=100)

    v_pb = vsub.add_parser(
        "per-box", parents=[common], help="H_B^2 >= gap * H_B on the open box"
    )
    v_pb.add_argument("--model", required=True)
    v_pb.add_argument("--D", type=int, default=2)
    v_pb.add_argument("--n", type=int, required=True, help="box parameter")

    v_cg = vsub.add_parser(
        "coarse-grain-identity",
        parents=[common],
        help="coarse-graining structure and R=1 identity checks",
    )
    v_cg.add_argument("--model", required=True, help="finite-range registry name or file")
    v_cg.add_argument("--R", type=int, default=1, help="interaction range (odd)")

    v_pk = vsub.add_parser(
        "prop-key", parents=[common], help="box-sum operator inequalities on a torus"
    )
    v_pk.add_argument("--model", required=True)
    v_pk.add_argument("--D", type=int, default=2)
    v_pk.add_argument("--n", type=int, required=True, help="box parameter")
    v_pk.add_argument("--N", type=int, required=True, help="torus half-side")

    v_al = vsub.add_parser(
        "aligned", parents=[common], help="aligned-pair aggregate -Q <= 2H on a ring"
    )
    v_al.add_argument("--model", required=True)
    v_al.add_argument("--side", type=int, default=6, help="ring length in sites")

    p_sweep = sub.add_parser(
        "sweep", parents=[common], help="gap vs size CSV with threshold columns"
    )
    p_sweep.add_argument("--model", required=True)
    p_sweep.add_argument("--D", type=int, default=1)
    p_sweep.add_argument("--n-from", type=int, required=True, help="first side, in sites")
    p_sweep.add_argument("--n-to", type=int, required=True, help="last side, in sites")
    p_sweep.add_argument("--boundary", choices=("open", "periodic"), default="open")
    p_sweep.add_argument(
        "--theorem", choices=THEOREMS, default=None, help="fills margin_selected"
    )
    p_sweep.add_argument("--out", default=None, help="CSV path (default stdout)")
    p_sweep.add_argument(
        "--timings", action="store_true", help="real runtime_ms (breaks byte-identity)"
    )
    return parser


_COMMANDS = {
    "gap": cmd_gap,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ValueError, ModelFormatError, DimensionLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SolverConvergenceError, GapUndefinedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

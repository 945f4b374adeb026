"""Monte Carlo harness: data generation, oracle-ratio runs, baseline comparison.

Each replication draws a fresh uniform design on [0,1]^(K+1), rebuilds
the projector, and runs the selection step for every tuning constant in
the grid on the same draw.  Per-replication random streams are derived
from (seed, K, replication index), so results do not depend on how the
replications are scheduled across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import functions
from .bases import dims_for, haar_depth, haar_design, nuisance_design
from .exceptions import ConfigurationError, DesignDegeneracyError
from .linalg import empirical_norm_sq
from .projection import build_projector, default_variance_space, estimate_variance
from .selection import (
    COMPLETE,
    NESTED,
    ModelCollection,
    PenaltySpec,
    oracle_benchmark,
    select_baseline,
    select_complete,
    select_nested,
)

DEFAULT_C_GRID = tuple(round(0.5 * i, 1) for i in range(11))  # 0.0, 0.5, ..., 5.0


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment: a signal, a design size, and a grid of tuning constants."""

    n: int = 512
    K: int = 1
    s_id: str = "f1"
    t_ids: tuple | None = None  # None -> f1..fK
    sigma2: float = 1.0
    variance: str = "known"  # "known" | "estimated"
    collection: str = NESTED
    C_grid: tuple = DEFAULT_C_GRID
    replications: int = 500
    seed: int = 0
    noise: str = "gaussian"  # "gaussian" | "t:<df>"

    def __post_init__(self):
        if self.n < 4:
            raise ConfigurationError("need n >= 4")
        if self.K < 0:
            raise ConfigurationError("K must be nonnegative")
        if self.replications < 1:
            raise ConfigurationError("need at least one replication")
        if self.sigma2 < 0:
            raise ConfigurationError("sigma2 must be nonnegative")
        if self.variance not in ("known", "estimated"):
            raise ConfigurationError(f"unknown variance mode {self.variance!r}")
        if self.collection not in (NESTED, COMPLETE):
            raise ConfigurationError(f"unknown collection {self.collection!r}")
        _parse_noise(self.noise)

    def resolved_t_ids(self) -> tuple:
        if self.t_ids is not None:
            if len(self.t_ids) != self.K:
                raise ConfigurationError(f"expected {self.K} nuisance component ids")
            return tuple(self.t_ids)
        return tuple(f"f{j}" for j in range(1, self.K + 1))


@dataclass(frozen=True)
class RatioCell:
    K: int
    C: float
    ratio: float
    stderr: float
    mean_rho: float
    n_reps: int


@dataclass
class RatioReport:
    """Per-(K, C) ratio estimates plus run metadata."""

    kind: str  # "oracle-ratio" | "baseline-comparison"
    s_id: str
    collection: str
    variance: str
    noise: str
    n: int
    replications: int
    seed: int
    cells: list = field(default_factory=list)
    n_skipped: int = 0
    mean_sigma2_used: float | None = None

    def extend(self, other: "RatioReport") -> None:
        self.cells.extend(other.cells)
        self.n_skipped += other.n_skipped

    def cell(self, K: int, C: float) -> RatioCell:
        for c in self.cells:
            if c.K == K and math.isclose(c.C, C):
                return c
        raise KeyError(f"no cell for K={K}, C={C}")

    def to_table(self) -> str:
        lines = [
            f"# {self.kind} s={self.s_id} collection={self.collection} "
            f"variance={self.variance} noise={self.noise}",
            f"# n={self.n} reps={self.replications} seed={self.seed} skipped={self.n_skipped}",
            "K\tC\tratio\tstderr\tmean_rho\tn_reps",
        ]
        for c in self.cells:
            lines.append(
                f"{c.K}\t{c.C:g}\t{c.ratio:.6g}\t{c.stderr:.4g}\t{c.mean_rho:.6g}\t{c.n_reps}"
            )
        return "\n".join(lines) + "\n"


def _parse_noise(noise: str):
    if noise == "gaussian":
        return None
    if noise.startswith("t:"):
        try:
            df = float(noise[2:])
        except ValueError:
            raise ConfigurationError(f"bad noise spec {noise!r}") from None
        if df <= 2:
            raise ConfigurationError("Student-t noise needs df > 2 for a finite variance")
        return df
    raise ConfigurationError(f"unknown noise model {noise!r}")


def _draw_noise(rng: np.random.Generator, n: int, noise: str) -> np.ndarray:
    df = _parse_noise(noise)
    if df is None:
        return rng.standard_normal(n)
    # standardized to unit variance
    return rng.standard_t(df, n) * math.sqrt((df - 2.0) / df)


def _design_depths(cfg: ExperimentConfig) -> tuple[int, int]:
    if cfg.K >= 1:
        d, _, dp, _ = dims_for(cfg.n, cfg.K)
        return d, dp
    d = haar_depth(cfg.n)
    if 2 ** (d + 1) - 1 >= cfg.n:
        raise ConfigurationError("Haar basis does not fit in the sample")
    return d, 0


def generate_dataset(cfg: ExperimentConfig, rng: np.random.Generator):
    """Draw one dataset: uniform design, additive signal, scaled noise.

    Returns ``(x, ys, z, s_true)`` where x is the covariate of interest,
    ys is (n, K) with the nuisance covariates, and s_true is the target
    component sampled at x.
    """
    x = rng.random(cfg.n)
    ys = rng.random((cfg.n, cfg.K))
    eps = _draw_noise(rng, cfg.n, cfg.noise)
    s_true = functions.evaluate(cfg.s_id, x)
    z = s_true + math.sqrt(cfg.sigma2) * eps
    for j, tid in enumerate(cfg.resolved_t_ids()):
        z = z + functions.evaluate(tid, ys[:, j])
    return x, ys, z, s_true


def _child_seeds(cfg: ExperimentConfig):
    return np.random.SeedSequence([cfg.seed, cfg.K]).spawn(cfg.replications)


def _build(cfg: ExperimentConfig, x, ys):
    d, dp = _design_depths(cfg)
    target = haar_design(x, d)
    nuisance = nuisance_design(ys, dp)
    return build_projector(target, nuisance)


def _select_grid(cfg: ExperimentConfig, y, projector):
    """Selection estimates for every C in the grid, plus the variance used."""
    if cfg.variance == "estimated":
        sigma2 = estimate_variance(y, default_variance_space(projector), projector)
    else:
        sigma2 = cfg.sigma2
    selector = select_nested if cfg.collection == NESTED else select_complete
    estimates = []
    for c in cfg.C_grid:
        # the spec carries the penalty shape; the resolved variance is passed
        # alongside so that sigma2 = 0 (noiseless runs) stays representable
        spec = PenaltySpec(family=cfg.collection, C=c, sigma2=None)
        estimates.append(selector(y, spec, projector, sigma2).estimate)
    return estimates, sigma2


def _ratio_replication(cfg: ExperimentConfig, child):
    rng = np.random.default_rng(child)
    x, ys, z, s_true = generate_dataset(cfg, rng)
    try:
        projector = _build(cfg, x, ys)
    except DesignDegeneracyError:
        return None
    y = projector.matrix @ z
    denom = oracle_benchmark(
        s_true, ModelCollection(cfg.collection, projector.labels), projector, cfg.sigma2
    )
    estimates, sigma2 = _select_grid(cfg, y, projector)
    ratios = [empirical_norm_sq(s_true - est) / denom for est in estimates]
    return np.array(ratios), projector.rho, sigma2


def _baseline_replication(cfg: ExperimentConfig, child):
    rng = np.random.default_rng(child)
    x, ys, z, s_true = generate_dataset(cfg, rng)
    try:
        projector = _build(cfg, x, ys)
    except DesignDegeneracyError:
        return None
    y = projector.matrix @ z
    risks, base_risks = [], []
    for c in cfg.C_grid:
        spec = PenaltySpec(family=NESTED, C=c, sigma2=None)
        tilted = select_nested(y, spec, projector, cfg.sigma2)
        base = select_baseline(z, projector, c, cfg.sigma2)
        risks.append(empirical_norm_sq(s_true - tilted.estimate))
        base_risks.append(empirical_norm_sq(s_true - base.estimate))
    return np.array(risks), np.array(base_risks), projector.rho


def _run_replications(cfg: ExperimentConfig, worker, threads: int | None):
    children = _child_seeds(cfg)
    threads = threads if threads and threads > 0 else (os.cpu_count() or 1)
    if threads == 1:
        results = [worker(cfg, child) for child in children]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda ch: worker(cfg, ch), children))
    kept = [r for r in results if r is not None]
    return kept, len(results) - len(kept)


def run_ratio_experiment(cfg: ExperimentConfig, threads: int | None = None) -> RatioReport:
    """Estimate the risk-to-benchmark ratio on a grid of tuning constants.

    Each replication contributes, for every C, the squared estimation
    error divided by that replication's oracle benchmark; cells report
    the mean ratio with its Monte Carlo standard error.
    """
    kept, skipped = _run_replications(cfg, _ratio_replication, threads)
    if not kept:
        raise ConfigurationError("every replication failed; check the configuration")
    ratios = np.array([r[0] for r in kept])  # (reps, n_C)
    rhos = np.array([r[1] for r in kept])
    sigma2s = np.array([r[2] for r in kept])
    report = RatioReport(
        kind="oracle-ratio",
        s_id=cfg.s_id,
        collection=cfg.collection,
        variance=cfg.variance,
        noise=cfg.noise,
        n=cfg.n,
        replications=cfg.replications,
        seed=cfg.seed,
        n_skipped=skipped,
        mean_sigma2_used=float(sigma2s.mean()),
    )
    n_reps = ratios.shape[0]
    for i, c in enumerate(cfg.C_grid):
        col = ratios[:, i]
        stderr = float(col.std(ddof=1) / math.sqrt(n_reps)) if n_reps > 1 else 0.0
        report.cells.append(
            RatioCell(cfg.K, float(c), float(col.mean()), stderr, float(rhos.mean()), n_reps)
        )
    return report


def run_baseline_comparison(cfg: ExperimentConfig, threads: int | None = None) -> RatioReport:
    """Risk of the projection pipeline relative to the dimension-penalized baseline.

    All nuisance components are forced to zero and both procedures see
    the same draws; cells report the ratio of mean risks, with a
    delta-method standard error.
    """
    cfg = replace(cfg, t_ids=("zero",) * cfg.K, collection=NESTED, variance="known")
    kept, skipped = _run_replications(cfg, _baseline_replication, threads)
    if not kept:
        raise ConfigurationError("every replication failed; check the configuration")
    risks = np.array([r[0] for r in kept])
    base_risks = np.array([r[1] for r in kept])
    rhos = np.array([r[2] for r in kept])
    report = RatioReport(
        kind="baseline-comparison",
        s_id=cfg.s_id,
        collection=cfg.collection,
        variance=cfg.variance,
        noise=cfg.noise,
        n=cfg.n,
        replications=cfg.replications,
        seed=cfg.seed,
        n_skipped=skipped,
    )
    n_reps = risks.shape[0]
    for i, c in enumerate(cfg.C_grid):
        a, b = risks[:, i], base_risks[:, i]
        ratio = float(a.mean() / b.mean())
        if n_reps > 1:
            va, vb = a.var(ddof=1), b.var(ddof=1)
            cab = float(np.cov(a, b, ddof=1)[0, 1])
            rel = va / a.mean() ** 2 + vb / b.mean() ** 2 - 2.0 * cab / (a.mean() * b.mean())
            stderr = float(abs(ratio) * math.sqrt(max(rel, 0.0) / n_reps))
        else:
            stderr = 0.0
        report.cells.append(
            RatioCell(cfg.K, float(c), ratio, stderr, float(rhos.mean()), n_reps)
        )
    return report


def figure_data(cfg: ExperimentConfig, C: float | None = None):
    """One replication's raw material for the diagnostic figure.

    Returns ``(meta, rows)`` where rows has one line per design point,
    sorted by the covariate of interest: x, signal, raw data, projected
    data, fitted component.
    """
    child = _child_seeds(cfg)[0]
    rng = np.random.default_rng(child)
    x, ys, z, s_true = generate_dataset(cfg, rng)
    projector = _build(cfg, x, ys)
    y = projector.matrix @ z
    c = C if C is not None else cfg.C_grid[0]
    single = replace(cfg, C_grid=(c,))
    estimates, sigma2 = _select_grid(single, y, projector)
    order = np.argsort(x, kind="stable")
    rows = np.column_stack([x, s_true, z, y, estimates[0]])[order]
    meta = {
        "s": cfg.s_id,
        "K": cfg.K,
        "n": cfg.n,
        "C": c,
        "collection": cfg.collection,
        "variance": cfg.variance,
        "seed": cfg.seed,
        "rho": projector.rho,
        "rho2": projector.rho2,
        "sigma2_used": sigma2,
    }
    return meta, rows


def emit_figure_data(cfg: ExperimentConfig, out_path, C: float | None = None) -> None:
    """Write the figure table to ``out_path`` as tab-separated text."""
    meta, rows = figure_data(cfg, C=C)
    parts = [" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in meta.items())]
    lines = [f"# figure data {parts[0]}", "x\ts\tz\ty\ts_tilde"]
    for row in rows:
        lines.append("\t".join(f"{v:.8g}" for v in row))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

"""Three-way imbalance benchmark: plain vs reweighted vs penalized training.

One fixed long-tailed setup (a 2-class 2-D Gaussian mixture with a 100:1
count ratio) is trained under each loss mode with identical data, budgets
and seeds, then scored on two axes per class:

* Bayes-classifier overlap of generated samples against the known mixture,
  summarized by the tail row's off-diagonal mass O[tail -> head];
* per-class Frechet distance against a large fresh *balanced* reference
  sample drawn from the same mixture, identical for every arm.

Per-seed rows and the across-seed medians go into one comparison table.
All hyperparameters live in BenchmarkConfig and were frozen after tuning;
the defaults are the reference configuration.
"""

import statistics
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import net
from .data import (LabeledDataset, ToyMixtureSpec, generate_gmm_dataset,
                   mixture_from_counts)
from .errors import ConfigError
from .metrics import frechet_from_samples, overlap_rate
from .sampler import SamplerConfig, sample_labeled
from .schedule import TauSchedule, make_linear_schedule
from .trainer import TrainConfig, train

ARMS = ("plain", "reweighted", "pcl")

TABLE_HEADER = "arm,seed,overlap_tail_head,frechet_tail,frechet_head"


@dataclass(frozen=True)
class BenchmarkConfig:
    # data: class 0 is the head, class 1 the tail
    head_mean: tuple[float, float] = (0.0, 0.0)
    tail_mean: tuple[float, float] = (4.0, 0.0)
    sigma: float = 1.0
    counts: tuple[int, int] = (2000, 20)
    data_seed: int = 0
    # diffusion schedule
    T: int = 100
    beta1: float = 1e-3
    betaT: float = 0.2
    sigma_mode: str = "beta"
    # denoiser
    hidden: tuple[int, ...] = (64, 64)
    time_dim: int = 8
    embed_dim: int = 8
    # training (shared across arms)
    steps: int = 5000
    batch_size: int = 32
    lr: float = 2e-4
    warmup: int = 250
    cond_dropout: float = 0.1
    seeds: tuple[int, ...] = (0, 1, 2)
    # penalty arm: exponential variant with a decaying tau
    tau0: float = 1.0
    tau_temperature: float = 50.0
    # evaluation
    omega: float = 0.0
    eval_samples_per_class: int = 1000
    eval_seed: int = 123
    reference_per_class: int = 2000
    reference_seed: int = 999

    def __post_init__(self):
        if len(self.counts) != 2 or min(self.counts) < 1:
            raise ConfigError(f"counts must be two positive ints, got {self.counts}")
        if len(self.seeds) < 1:
            raise ConfigError("at least one seed is required")
        if self.eval_samples_per_class < 1 or self.reference_per_class < 2:
            raise ConfigError("evaluation sample counts too small")


@dataclass(frozen=True)
class ArmRun:
    """One trained model's scores."""

    arm: str
    seed: int
    overlap_tail_head: float
    frechet_tail: float
    frechet_head: float


@dataclass
class BenchmarkResult:
    runs: list[ArmRun]
    medians: dict[str, tuple[float, float, float]]  # arm -> (O, fre_tail, fre_head)
    overlap_rel_decrease: float  # plain -> pcl, relative
    tail_frechet_ratio: float    # pcl / plain
    head_frechet_drift: float    # (pcl - plain) / plain
    config: BenchmarkConfig = field(default_factory=BenchmarkConfig)


def benchmark_mixture(cfg: BenchmarkConfig) -> ToyMixtureSpec:
    """The data-generating mixture with its true (imbalanced) priors."""
    return mixture_from_counts(means=[list(cfg.head_mean), list(cfg.tail_mean)],
                               sigmas=[cfg.sigma, cfg.sigma],
                               counts=cfg.counts)


def _train_config(cfg: BenchmarkConfig, arm: str, seed: int) -> TrainConfig:
    tau = (TauSchedule(kind="exp-decay", tau0=cfg.tau0,
                       temperature=cfg.tau_temperature)
           if arm == "pcl" else None)
    return TrainConfig(batch_size=cfg.batch_size, steps=cfg.steps, lr=cfg.lr,
                       warmup=cfg.warmup, seed=seed, loss=arm, tau=tau,
                       cond_dropout=cfg.cond_dropout, log_every=cfg.steps,
                       ckpt_every=cfg.steps)


def run_arm(cfg: BenchmarkConfig, arm: str, seed: int, ds: LabeledDataset,
            mix: ToyMixtureSpec, reference: LabeledDataset) -> ArmRun:
    """Train one arm and score its samples. The sampling noise is keyed only
    by (eval_seed, class), so every arm is evaluated on identical chains."""
    if arm not in ARMS:
        raise ConfigError(f"arm must be one of {ARMS}, got {arm!r}")
    sched = make_linear_schedule(cfg.beta1, cfg.betaT, cfg.T, cfg.sigma_mode)
    netcfg = net.NetworkConfig(dim=2, hidden=cfg.hidden, time_dim=cfg.time_dim,
                               num_classes=2, embed_dim=cfg.embed_dim)
    result = train(ds, netcfg, sched, _train_config(cfg, arm, seed))
    gen = sample_labeled(result.params, netcfg, sched,
                         SamplerConfig(omega=cfg.omega,
                                       num_samples=cfg.eval_samples_per_class,
                                       seed=cfg.eval_seed),
                         classes=[0, 1])
    overlap = overlap_rate(gen, mix)
    fre_tail = frechet_from_samples(reference.X[reference.y == 1],
                                    gen.X[gen.y == 1])
    fre_head = frechet_from_samples(reference.X[reference.y == 0],
                                    gen.X[gen.y == 0])
    return ArmRun(arm=arm, seed=seed,
                  overlap_tail_head=float(overlap[1, 0]),
                  frechet_tail=fre_tail, frechet_head=fre_head)


def run_benchmark(cfg: BenchmarkConfig = BenchmarkConfig(), out_dir=None,
                  progress=None) -> BenchmarkResult:
    """Run every arm for every seed; optionally write the table and summary
    CSVs into out_dir. `progress` is called with one line per finished run."""
    mix = benchmark_mixture(cfg)
    ds = generate_gmm_dataset(mix, cfg.counts, seed=cfg.data_seed)
    reference = generate_gmm_dataset(mix, [cfg.reference_per_class] * 2,
                                     seed=cfg.reference_seed)

    runs = []
    for arm in ARMS:
        for seed in cfg.seeds:
            run = run_arm(cfg, arm, seed, ds, mix, reference)
            runs.append(run)
            if progress is not None:
                progress(f"{arm:>10} seed={seed}: O[tail->head]={run.overlap_tail_head:.4f} "
                         f"frechet_tail={run.frechet_tail:.4f} "
                         f"frechet_head={run.frechet_head:.4f}")

    medians = {}
    for arm in ARMS:
        rows = [r for r in runs if r.arm == arm]
        medians[arm] = (statistics.median(r.overlap_tail_head for r in rows),
                        statistics.median(r.frechet_tail for r in rows),
                        statistics.median(r.frechet_head for r in rows))

    o_plain, ft_plain, fh_plain = medians["plain"]
    o_pcl, ft_pcl, fh_pcl = medians["pcl"]
    result = BenchmarkResult(
        runs=runs,
        medians=medians,
        overlap_rel_decrease=(o_plain - o_pcl) / o_plain if o_plain > 0 else float("nan"),
        tail_frechet_ratio=ft_pcl / ft_plain if ft_plain > 0 else float("nan"),
        head_frechet_drift=(fh_pcl - fh_plain) / fh_plain if fh_plain > 0 else float("nan"),
        config=cfg,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        table_to_csv(result, out / "benchmark_table.csv")
        summary_to_csv(result, out / "benchmark_summary.csv")
    return result


def table_to_csv(result: BenchmarkResult, path) -> None:
    """Per-run rows in a fixed arm-major order, then one median row per arm."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TABLE_HEADER + "\n")
        for run in result.runs:
            fh.write(f"{run.arm},{run.seed},{run.overlap_tail_head!r},"
                     f"{run.frechet_tail!r},{run.frechet_head!r}\n")
        for arm in ARMS:
            o, ft, fhead = result.medians[arm]
            fh.write(f"{arm},median,{float(o)!r},{float(ft)!r},{float(fhead)!r}\n")


def summary_to_csv(result: BenchmarkResult, path) -> None:
    rows = []
    for arm in ARMS:
        o, ft, fhead = result.medians[arm]
        rows += [(f"overlap_tail_head_{arm}", o),
                 (f"frechet_tail_{arm}", ft),
                 (f"frechet_head_{arm}", fhead)]
    rows += [("overlap_rel_decrease", result.overlap_rel_decrease),
             ("tail_frechet_ratio", result.tail_frechet_ratio),
             ("head_frechet_drift", result.head_frechet_drift)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("key,value\n")
        for k, v in rows:
            fh.write(f"{k},{float(v)!r}\n")


def table_from_csv(path) -> list[ArmRun]:
    """Parse only the per-seed rows back (median rows are derived data)."""
    runs = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip()
        if header != TABLE_HEADER:
            raise ConfigError(f"bad benchmark table header: {header!r}")
        for line in fh:
            arm, seed, o, ft, fhead = line.strip().split(",")
            if seed == "median":
                continue
            runs.append(ArmRun(arm=arm, seed=int(seed), overlap_tail_head=float(o),
                               frechet_tail=float(ft), frechet_head=float(fhead)))
    return runs

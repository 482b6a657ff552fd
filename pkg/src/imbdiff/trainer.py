"""Adam training loop over the bound losses, with checkpoint/resume.

Determinism contract: given the same dataset, configs and seed, the
trajectory is bit-identical, and resuming from a checkpoint reproduces the
uninterrupted run exactly. All randomness flows through one generator
consumed in a fixed order (see losses.draw_batch), whose state is saved
next to each checkpoint. Log rows are identical across reruns except for
the wall-clock seconds column.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import net
from .data import LabeledDataset, class_stats
from .errors import ConfigError, NumericsError
from .losses import (PclVariant, bind_overall, bind_reweighted, bind_simple,
                     draw_batch)
from .schedule import DiffusionSchedule, TauSchedule, default_tau_schedule

LOSS_MODES = ("plain", "pcl", "reweighted")
LOG_HEADER = "step,total,ddpm,pcl,tau_mean,seconds"


class TrainingAborted(NumericsError):
    """Raised when the loss or parameters go non-finite; carries the step
    and the last checkpoint that was still good."""

    def __init__(self, step: int, last_checkpoint):
        self.step = step
        self.last_checkpoint = last_checkpoint
        where = f", last good checkpoint: {last_checkpoint}" if last_checkpoint else ""
        super().__init__(f"non-finite loss or parameters at step {step}{where}")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    steps: int = 5000
    lr: float = 2e-4
    warmup: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    loss: str = "plain"
    variant: PclVariant = field(default_factory=PclVariant)
    tau: TauSchedule | None = None  # None -> default_tau_schedule(T) in pcl mode
    cond_dropout: float = 0.1
    log_every: int = 50
    ckpt_every: int = 1000

    def __post_init__(self):
        if self.loss not in LOSS_MODES:
            raise ConfigError(f"loss must be one of {LOSS_MODES}, got {self.loss!r}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.loss == "pcl" and self.batch_size < 2:
            raise ConfigError("pcl loss needs batch_size >= 2 (pairs come from the batch)")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.lr <= 0 or not np.isfinite(self.lr):
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.warmup < 0:
            raise ConfigError(f"warmup must be >= 0, got {self.warmup}")
        if not (0.0 <= self.cond_dropout < 1.0):
            raise ConfigError(f"cond_dropout must be in [0, 1), got {self.cond_dropout}")
        if self.log_every < 1 or self.ckpt_every < 1:
            raise ConfigError("log_every and ckpt_every must be >= 1")


def lr_at(cfg: TrainConfig, step: int) -> float:
    """Linear ramp from 0 to lr over the first `warmup` steps (1-based)."""
    if cfg.warmup > 0 and step <= cfg.warmup:
        return cfg.lr * step / cfg.warmup
    return cfg.lr


@dataclass(frozen=True)
class TrainLogRow:
    step: int
    total: float
    ddpm: float
    pcl: float
    tau_mean: float
    seconds: float

    def to_csv_row(self) -> str:
        return (f"{self.step},{self.total!r},{self.ddpm!r},{self.pcl!r},"
                f"{self.tau_mean!r},{self.seconds!r}")


@dataclass
class TrainResult:
    params: np.ndarray
    log: list[TrainLogRow]
    last_checkpoint: Path | None
    pairless_batches: int  # pcl-mode batches where no cross-class pair existed


STATE_MAGIC = b"IMBDIFF-STATE-1\n"


def _save_state(path: Path, step: int, m, v, rng) -> None:
    # Hand-rolled container instead of np.savez: zip archives embed wall-clock
    # mtimes, which would break byte-identical reruns of the same config.
    header = json.dumps({"step": int(step), "n": int(m.size),
                         "rng": rng.bit_generator.state}, sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(STATE_MAGIC)
        fh.write(header.encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(m, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(v, dtype="<f8").tobytes())


def _load_state(path: Path):
    with open(path, "rb") as fh:
        magic = fh.read(len(STATE_MAGIC))
        if magic != STATE_MAGIC:
            raise ConfigError(f"not an optimizer state file: {path}")
        header = json.loads(fh.readline().decode("ascii"))
        n = int(header["n"])
        payload = fh.read()
    if len(payload) != 2 * n * 8:
        raise ConfigError(f"optimizer state payload truncated: {path}")
    m = np.frombuffer(payload[: n * 8], dtype="<f8").copy()
    v = np.frombuffer(payload[n * 8:], dtype="<f8").copy()
    return int(header["step"]), m, v, header["rng"]


def train(ds: LabeledDataset, netcfg: net.NetworkConfig, sched: DiffusionSchedule,
          cfg: TrainConfig, out_dir=None, resume=None) -> TrainResult:
    """Run the loop. With out_dir set, writes log.csv plus ckpt_{step}.bin
    and ckpt_{step}.state.bin at the checkpoint cadence (and at the final
    step). resume points at an earlier ckpt_*.bin from the same setup."""
    if len(ds) == 0:
        raise ConfigError("cannot train on an empty dataset")
    if ds.dim != netcfg.dim:
        raise ConfigError(f"dataset dim {ds.dim} != network dim {netcfg.dim}")
    if len(ds) and int(ds.y.max()) >= netcfg.num_classes:
        raise ConfigError("dataset labels exceed network num_classes")

    tau = cfg.tau
    if cfg.loss == "pcl" and tau is None:
        tau = default_tau_schedule(sched.T)
    stats = class_stats(ds, num_classes=netcfg.num_classes) if cfg.loss == "reweighted" else None

    out_path = Path(out_dir) if out_dir is not None else None
    log_file = None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        log_file = out_path / "log.csv"

    rng = np.random.default_rng(cfg.seed)
    if resume is None:
        params = net.init_params(netcfg, cfg.seed)
        m = np.zeros_like(params)
        v = np.zeros_like(params)
        start_step = 0
        if log_file is not None:
            log_file.write_text(LOG_HEADER + "\n", encoding="utf-8")
    else:
        resume = Path(resume)
        loaded_cfg, params = net.load_checkpoint(resume)
        if loaded_cfg != netcfg:
            raise ConfigError("resume checkpoint was written with a different network config")
        state_path = resume.parent / (resume.stem + ".state.bin")
        start_step, m, v, rng_state = _load_state(state_path)
        rng.bit_generator.state = rng_state

    log_rows: list[TrainLogRow] = []
    last_ckpt = resume if resume is not None else None
    pairless = 0

    def flush_row(row: TrainLogRow):
        log_rows.append(row)
        if log_file is not None:
            with open(log_file, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(row.to_csv_row() + "\n")

    def save_ckpt(step: int) -> Path:
        ck = out_path / f"ckpt_{step}.bin"
        net.save_checkpoint(ck, netcfg, params)
        _save_state(out_path / f"ckpt_{step}.state.bin", step, m, v, rng)
        return ck

    for step in range(start_step + 1, cfg.steps + 1):
        t0 = time.perf_counter()
        batch = draw_batch(rng, ds, cfg.batch_size, sched.T, cfg.cond_dropout)
        if cfg.loss == "plain":
            bound = bind_simple(batch, sched, netcfg.null_class)
        elif cfg.loss == "reweighted":
            bound = bind_reweighted(batch, sched, stats, netcfg.null_class)
        else:
            bound = bind_overall(batch, sched, tau, cfg.variant, netcfg.null_class)
            if len(np.unique(batch.c)) < 2:
                pairless += 1
        try:
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                value, grad, parts = net.evaluate_bound(params, netcfg, bound)
        except NumericsError:
            raise TrainingAborted(step, last_ckpt) from None

        lr = lr_at(cfg, step)
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad * grad
        mhat = m / (1.0 - cfg.adam_beta1 ** step)
        vhat = v / (1.0 - cfg.adam_beta2 ** step)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            params = params - lr * mhat / (np.sqrt(vhat) + cfg.adam_eps)
        if not np.all(np.isfinite(params)):
            raise TrainingAborted(step, last_ckpt)

        if step % cfg.log_every == 0 or step == 1 or step == cfg.steps:
            flush_row(TrainLogRow(step=step, total=parts.total, ddpm=parts.ddpm,
                                  pcl=parts.pcl, tau_mean=parts.tau_mean,
                                  seconds=time.perf_counter() - t0))
        if out_path is not None and (step % cfg.ckpt_every == 0 or step == cfg.steps):
            last_ckpt = save_ckpt(step)

    return TrainResult(params=params, log=log_rows, last_checkpoint=last_ckpt,
                       pairless_batches=pairless)

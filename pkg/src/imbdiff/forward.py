"""Forward (noising) process: closed-form q(x_t | x_0).

x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps with eps ~ N(0, I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .schedule import DiffusionSchedule


@dataclass(frozen=True)
class NoisySample:
    """One corrupted example plus everything needed to reproduce it."""

    x_t: np.ndarray
    t: int
    eps: np.ndarray
    source_index: int = -1


def q_sample_batch(x0: np.ndarray, t: np.ndarray, eps: np.ndarray,
                   sched: DiffusionSchedule) -> np.ndarray:
    """Vectorized x_t for a batch: rows of x0/eps with per-row timesteps."""
    x0 = np.asarray(x0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if x0.shape != eps.shape:
        raise ConfigError(f"x0 and eps shapes differ: {x0.shape} vs {eps.shape}")
    if not np.all(np.isfinite(eps)):
        raise ConfigError("eps must be finite")
    abar = sched.alpha_bar(t)
    scale = np.sqrt(abar)
    noise_scale = np.sqrt(1.0 - abar)
    if x0.ndim == 2:
        scale = scale[:, None]
        noise_scale = noise_scale[:, None]
    return scale * x0 + noise_scale * eps


def q_sample(x0: np.ndarray, t: int, eps: np.ndarray,
             sched: DiffusionSchedule, source_index: int = -1) -> NoisySample:
    """Single-example forward corruption at step t."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1:
        raise ConfigError(f"q_sample takes a single example, got shape {x0.shape}")
    x_t = q_sample_batch(x0[None, :], np.asarray([t]), np.asarray(eps)[None, :], sched)[0]
    return NoisySample(x_t=x_t, t=int(t), eps=np.asarray(eps, dtype=np.float64),
                       source_index=source_index)

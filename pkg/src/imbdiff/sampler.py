"""Ancestral sampling from the reverse chain, with classifier-free guidance.

Each chain gets its own noise stream derived from (seed, class, chain
index) via SeedSequence spawning, so sample i of a run is reproducible in
isolation and independent of how many chains run alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import net
from .data import LabeledDataset
from .errors import ConfigError, NumericsError
from .losses import mu_theta
from .schedule import DiffusionSchedule


@dataclass(frozen=True)
class SamplerConfig:
    omega: float = 0.0  # guidance strength; 0 = purely conditional
    num_samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.num_samples < 0:
            raise ConfigError(f"num_samples must be >= 0, got {self.num_samples}")
        if not np.isfinite(self.omega):
            raise ConfigError(f"omega must be finite, got {self.omega}")


def cfg_noise(eps_cond: np.ndarray, eps_uncond: np.ndarray, omega: float) -> np.ndarray:
    """Guided noise estimate (1 + omega) * eps_cond - omega * eps_uncond."""
    return (1.0 + omega) * np.asarray(eps_cond) - omega * np.asarray(eps_uncond)


def _chain_noise(entropy, num_samples: int, T: int, dim: int) -> np.ndarray:
    """(n, T, dim) block: row [i, 0] seeds x_T for chain i, rows [i, 1:]
    are the per-step z draws for t = T..2 (t = 1 adds no noise)."""
    root = np.random.SeedSequence(entropy)
    out = np.empty((num_samples, T, dim), dtype=np.float64)
    for i, child in enumerate(root.spawn(num_samples)):
        out[i] = np.random.default_rng(child).standard_normal((T, dim))
    return out


def ancestral_sample_with(denoise, dim: int, sched: DiffusionSchedule,
                          num_samples: int, seed_entropy) -> np.ndarray:
    """Run the reverse chain with an arbitrary denoiser callable
    denoise(x, t) -> eps_hat for a batch x at integer step t."""
    if num_samples == 0:
        return np.zeros((0, dim), dtype=np.float64)
    noise = _chain_noise(seed_entropy, num_samples, sched.T, dim)
    x = noise[:, 0, :].copy()
    for t in range(sched.T, 0, -1):
        eps_hat = denoise(x, t)
        mu = mu_theta(x, t, eps_hat, sched)
        if t > 1:
            x = mu + float(sched.sigma(t)) * noise[:, sched.T - t + 1, :]
        else:
            x = mu
        if not np.all(np.isfinite(x)):
            bad = int(np.count_nonzero(~np.isfinite(x).all(axis=1)))
            raise NumericsError(f"{bad} chain(s) went non-finite at t={t}")
    return x


def model_denoiser(params, netcfg: net.NetworkConfig, class_c: int, omega: float):
    """eps_hat callable around the network; omega != 0 adds the guided
    combination with the null-token (unconditional) prediction."""
    if not (0 <= class_c < netcfg.num_classes):
        raise ConfigError(f"class must be in 0..{netcfg.num_classes - 1}, got {class_c}")

    def denoise(x, t):
        n = len(x)
        tt = np.full(n, t, dtype=np.int64)
        e_cond = net.apply(params, netcfg, x, tt, np.full(n, class_c, dtype=np.int64))
        if omega == 0.0:
            return e_cond
        e_un = net.apply(params, netcfg, x, tt,
                         np.full(n, netcfg.null_class, dtype=np.int64))
        return cfg_noise(e_cond, e_un, omega)

    return denoise


def ancestral_sample(params, netcfg: net.NetworkConfig, sched: DiffusionSchedule,
                     cfg: SamplerConfig, class_c: int) -> np.ndarray:
    """Draw cfg.num_samples points conditioned on class_c."""
    denoise = model_denoiser(params, netcfg, class_c, cfg.omega)
    return ancestral_sample_with(denoise, netcfg.dim, sched, cfg.num_samples,
                                 [cfg.seed, class_c])


def sample_labeled(params, netcfg: net.NetworkConfig, sched: DiffusionSchedule,
                   cfg: SamplerConfig, classes) -> LabeledDataset:
    """Sample cfg.num_samples per class and stack into a labeled dataset;
    the label records the conditioning class."""
    xs, ys = [], []
    for c in classes:
        pts = ancestral_sample(params, netcfg, sched, cfg, int(c))
        xs.append(pts)
        ys.append(np.full(len(pts), int(c), dtype=np.int64))
    if not xs:
        return LabeledDataset(X=np.zeros((0, netcfg.dim)), y=np.zeros(0, dtype=np.int64))
    return LabeledDataset(X=np.concatenate(xs, axis=0), y=np.concatenate(ys))


def oracle_gaussian_denoiser(mean, sigma: float, sched: DiffusionSchedule):
    """Exact eps-posterior for x0 ~ N(mean, sigma^2 I):
    eps_hat = (x_t - sqrt(abar_t) E[x0 | x_t]) / sqrt(1 - abar_t), with the
    conjugate-Gaussian posterior mean
    E[x0 | x_t] = m + sqrt(abar_t) sigma^2 / (abar_t sigma^2 + 1 - abar_t) (x_t - sqrt(abar_t) m).
    Used to test the sampler loop independently of any trained network."""
    mean = np.asarray(mean, dtype=np.float64)
    s2 = float(sigma) ** 2
    if s2 <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")

    def denoise(x, t):
        abar = float(sched.alpha_bar(t))
        root = np.sqrt(abar)
        gain = root * s2 / (abar * s2 + 1.0 - abar)
        e_x0 = mean + gain * (x - root * mean)
        return (x - root * e_x0) / np.sqrt(1.0 - abar)

    return denoise

"""Variance schedule for the forward/reverse diffusion chain.

Timesteps are 1-based: t runs over {1, ..., T}. Arrays are indexed with
t - 1, and the accessor methods below take care of that shift so callers
never touch raw indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SIGMA_MODES = ("beta", "tilde-beta")
TAU_KINDS = ("constant", "exp-decay")


@dataclass(frozen=True)
class DiffusionSchedule:
    """Precomputed per-step quantities of a discrete diffusion chain.

    betas[t-1] is the forward noise rate at step t, alphas = 1 - betas,
    alpha_bars the running product of alphas, and sigmas the reverse-step
    noise scale (mode-dependent, see make_linear_schedule).
    """

    T: int
    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray
    sigmas: np.ndarray
    sigma_mode: str = "beta"

    def __post_init__(self):
        for name in ("betas", "alphas", "alpha_bars", "sigmas"):
            arr = getattr(self, name)
            if arr.shape != (self.T,):
                raise ConfigError(f"{name} must have shape ({self.T},), got {arr.shape}")
            arr.flags.writeable = False

    def _check_t(self, t) -> np.ndarray:
        t = np.asarray(t)
        if not np.issubdtype(t.dtype, np.integer):
            raise ConfigError(f"timestep must be integral, got dtype {t.dtype}")
        if t.size and (t.min() < 1 or t.max() > self.T):
            raise ConfigError(f"timestep out of range 1..{self.T}")
        return t

    def beta(self, t):
        return self.betas[self._check_t(t) - 1]

    def alpha(self, t):
        return self.alphas[self._check_t(t) - 1]

    def alpha_bar(self, t):
        return self.alpha_bars[self._check_t(t) - 1]

    def sigma(self, t):
        return self.sigmas[self._check_t(t) - 1]


def make_linear_schedule(beta1: float, betaT: float, T: int,
                         sigma_mode: str = "beta") -> DiffusionSchedule:
    """Linearly interpolated betas: betas[t-1] = beta1 + (betaT-beta1)*(t-1)/(T-1).

    sigma_mode "beta" sets sigma_t^2 = beta_t; "tilde-beta" sets
    sigma_t^2 = (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t with
    alpha_bar_0 = 1 (so sigma_1 = 0).
    """
    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    if not (0.0 < beta1 <= betaT < 1.0):
        raise ConfigError(f"need 0 < beta1 <= betaT < 1, got beta1={beta1} betaT={betaT}")
    if sigma_mode not in SIGMA_MODES:
        raise ConfigError(f"sigma_mode must be one of {SIGMA_MODES}, got {sigma_mode!r}")

    if T == 1:
        betas = np.array([beta1], dtype=np.float64)
    else:
        betas = beta1 + (betaT - beta1) * np.arange(T, dtype=np.float64) / (T - 1)
    alphas = 1.0 - betas
    alpha_bars = np.cumprod(alphas)
    if sigma_mode == "beta":
        sigmas = np.sqrt(betas)
    else:
        prev = np.concatenate(([1.0], alpha_bars[:-1]))
        sigmas = np.sqrt((1.0 - prev) / (1.0 - alpha_bars) * betas)
    return DiffusionSchedule(T=T, betas=betas, alphas=alphas,
                             alpha_bars=alpha_bars, sigmas=sigmas,
                             sigma_mode=sigma_mode)


@dataclass(frozen=True)
class TauSchedule:
    """Timestep-dependent weight for the overlap penalty.

    kind "constant": tau(t) = tau0.
    kind "exp-decay": tau(t) = tau0 * exp(-t / temperature), so early
    (low-noise) steps get the largest weight.
    """

    kind: str = "constant"
    tau0: float = 0.1
    temperature: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in TAU_KINDS:
            raise ConfigError(f"tau kind must be one of {TAU_KINDS}, got {self.kind!r}")
        if not np.isfinite(self.tau0) or self.tau0 < 0.0:
            raise ConfigError(f"tau0 must be finite and >= 0, got {self.tau0}")
        if self.kind == "exp-decay" and not self.temperature > 0.0:
            raise ConfigError(f"exp-decay needs temperature > 0, got {self.temperature}")


def default_tau_schedule(T: int, tau0: float = 0.1) -> TauSchedule:
    """Decaying schedule with temperature T/4, the package default."""
    return TauSchedule(kind="exp-decay", tau0=tau0, temperature=T / 4.0)


def tau_at(ts: TauSchedule, t):
    """Evaluate tau(t) for scalar or array t; t must be >= 0."""
    t = np.asarray(t, dtype=np.float64)
    if t.size and t.min() < 0:
        raise ConfigError("tau_at: negative timestep")
    if ts.kind == "constant":
        return np.broadcast_to(np.float64(ts.tau0), t.shape).copy() if t.shape else np.float64(ts.tau0)
    return ts.tau0 * np.exp(-t / ts.temperature)

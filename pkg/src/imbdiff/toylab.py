"""Two-component toy objective and loss landscapes over (m1, m2).

The model family is two 1-D Gaussians with known weights (pi1, pi2) and a
shared known sigma; only the means move. Fitting is the pi-weighted
quadratic misfit. On top of that:

  naive mode subtracts tau * KL(m1, m2) = tau (m1-m2)^2 / (2 sigma^2),
  which is unbounded below once tau exceeds pi1*pi2 (the weighted
  quadratic form loses positive semidefiniteness);

  hinge mode adds tau * h((m1-m2)^2) for a decreasing penalty h from the
  losses module, which is bounded and, for small enough tau, leaves the
  grid argmin at the fit optimum. hinge_preservation_tau reports that
  threshold by bisection on the actual grid rather than assuming one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ToyMixtureSpec
from .errors import ConfigError
from .losses import PclVariant, variant_penalty

MODES = ("fit", "naive", "hinge")


def _check_mix(mix: ToyMixtureSpec) -> None:
    if mix.num_classes != 2 or mix.dim != 1:
        raise ConfigError("toylab works on two 1-D components")
    if mix.sigmas[0] != mix.sigmas[1]:
        raise ConfigError("toylab assumes a shared sigma")


def default_toy_mixture() -> ToyMixtureSpec:
    """The head/tail study mixture: weights (0.95, 0.05), truth (0, 2)."""
    return ToyMixtureSpec(weights=[0.95, 0.05], means=[[0.0], [2.0]], sigmas=[1.0, 1.0])


def toy_fit_loss(m1, m2, mix: ToyMixtureSpec):
    """sum_k pi_k (m_k - m_k*)^2 / (2 sigma^2); vectorizes over m1/m2 arrays."""
    _check_mix(mix)
    s2 = float(mix.sigmas[0]) ** 2
    t1, t2 = float(mix.means[0, 0]), float(mix.means[1, 0])
    w1, w2 = float(mix.weights[0]), float(mix.weights[1])
    m1 = np.asarray(m1, dtype=np.float64)
    m2 = np.asarray(m2, dtype=np.float64)
    return (w1 * (m1 - t1) ** 2 + w2 * (m2 - t2) ** 2) / (2.0 * s2)


def toy_objective(m1, m2, mix: ToyMixtureSpec, mode: str, tau: float = 0.5,
                  variant: PclVariant | None = None):
    """fit / fit+naive / fit+hinge value at (m1, m2); array-friendly."""
    _check_mix(mix)
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    if tau < 0 or not np.isfinite(tau):
        raise ConfigError(f"tau must be finite and >= 0, got {tau}")
    fit = toy_fit_loss(m1, m2, mix)
    if mode == "fit":
        return fit
    m1 = np.asarray(m1, dtype=np.float64)
    m2 = np.asarray(m2, dtype=np.float64)
    gap_sq = (m1 - m2) ** 2
    if mode == "naive":
        s2 = float(mix.sigmas[0]) ** 2
        return fit - tau * gap_sq / (2.0 * s2)
    if variant is None:
        raise ConfigError("hinge mode needs a penalty variant")
    return fit + tau * variant_penalty(variant, gap_sq)


@dataclass(frozen=True)
class LandscapeGrid:
    mode: str
    m1_values: np.ndarray
    m2_values: np.ndarray
    loss: np.ndarray  # loss[i, j] at (m1_values[i], m2_values[j])
    argmin_m1: float
    argmin_m2: float
    argmin_value: float


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    if not (hi > lo) or step <= 0:
        raise ConfigError(f"bad grid range [{lo}, {hi}] step {step}")
    n = int(np.floor((hi - lo) / step + 0.5)) + 1
    return lo + step * np.arange(n)


def landscape(mix: ToyMixtureSpec, mode: str, lo: float = -1.0, hi: float = 3.0,
              step: float = 0.05, tau: float = 0.5,
              variant: PclVariant | None = None) -> LandscapeGrid:
    """Dense evaluation over [lo, hi]^2; the argmin reported is the first
    (row-major) grid minimum, so it is deterministic under ties."""
    values = grid_values(lo, hi, step)
    m1g, m2g = np.meshgrid(values, values, indexing="ij")
    loss = np.asarray(toy_objective(m1g, m2g, mix, mode, tau, variant))
    flat = int(np.argmin(loss))
    i, j = np.unravel_index(flat, loss.shape)
    return LandscapeGrid(mode=mode, m1_values=values, m2_values=values, loss=loss,
                         argmin_m1=float(values[i]), argmin_m2=float(values[j]),
                         argmin_value=float(loss[i, j]))


def argmin_cell_distance(grid: LandscapeGrid, m1_star: float, m2_star: float) -> int:
    """Chebyshev distance, in grid cells, from the grid argmin to the grid
    point nearest (m1_star, m2_star)."""
    step1 = grid.m1_values[1] - grid.m1_values[0]
    step2 = grid.m2_values[1] - grid.m2_values[0]
    di = abs(grid.argmin_m1 - m1_star) / step1
    dj = abs(grid.argmin_m2 - m2_star) / step2
    return int(round(max(di, dj)))


def landscape_to_csv(grid: LandscapeGrid, path) -> None:
    """Row-major m1,m2,loss rows; trailing comment row carries the argmin."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("m1,m2,loss\n")
        for i, a in enumerate(grid.m1_values):
            for j, b in enumerate(grid.m2_values):
                fh.write(f"{float(a)!r},{float(b)!r},{float(grid.loss[i, j])!r}\n")
        fh.write(f"# argmin,{grid.argmin_m1!r},{grid.argmin_m2!r},{grid.argmin_value!r}\n")


def landscape_from_csv(path):
    """(rows, argmin) where rows is the (n, 3) data block."""
    rows = []
    argmin = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip()
        if header != "m1,m2,loss":
            raise ConfigError(f"bad landscape header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line.lstrip("# ").split(",")
                if parts[0] != "argmin" or len(parts) != 4:
                    raise ConfigError(f"bad argmin row: {line!r}")
                argmin = tuple(float(v) for v in parts[1:])
                continue
            rows.append([float(v) for v in line.split(",")])
    return np.asarray(rows), argmin


def naive_instability_tau(mix: ToyMixtureSpec) -> float:
    """Threshold tau* = pi1 * pi2 (with pi1 + pi2 = 1): beyond it the
    fit+naive quadratic form diag(pi) - tau [[1,-1],[-1,1]] is indefinite
    and the objective is unbounded below. Independent of sigma."""
    _check_mix(mix)
    return float(mix.weights[0] * mix.weights[1])


def naive_is_unbounded(mix: ToyMixtureSpec, tau: float) -> bool:
    _check_mix(mix)
    q = np.diag(mix.weights) - tau * np.array([[1.0, -1.0], [-1.0, 1.0]])
    return bool(np.linalg.eigvalsh(q)[0] < 0)


def hinge_preservation_tau(mix: ToyMixtureSpec, variant: PclVariant,
                           lo: float = -1.0, hi: float = 3.0, step: float = 0.05,
                           cells: int = 1, resolution: float = 1e-3,
                           tau_cap: float = 64.0) -> float:
    """Largest tau (to within `resolution`) for which the fit+hinge grid
    argmin stays within `cells` cells of the fit optimum, found by doubling
    then bisection against the grid itself. Returns inf if the cap never
    produces a violation (the margin hinge is flat at the optimum, so any
    tau preserves it)."""
    _check_mix(mix)
    m1_star, m2_star = float(mix.means[0, 0]), float(mix.means[1, 0])

    def ok(tau: float) -> bool:
        g = landscape(mix, "hinge", lo, hi, step, tau, variant)
        return argmin_cell_distance(g, m1_star, m2_star) <= cells

    if not ok(0.0):
        raise ConfigError("fit optimum is not on the grid; widen the range")
    hi_tau = resolution
    while ok(hi_tau):
        hi_tau *= 2.0
        if hi_tau > tau_cap:
            return float("inf")
    lo_tau = hi_tau / 2.0 if hi_tau > resolution else 0.0
    while hi_tau - lo_tau > resolution:
        mid = 0.5 * (lo_tau + hi_tau)
        if ok(mid):
            lo_tau = mid
        else:
            hi_tau = mid
    return lo_tau

"""Training losses: plain denoising, the pairwise overlap penalty, and the
inverse-frequency reweighting baseline.

The overlap penalty works on posterior means of the reverse step. For two
conditional Gaussians with shared variance sigma_t^2 the KL divergence is
||mu_i - mu_j||^2 / (2 sigma_t^2) plus a constant, so pushing the squared
distance d_ij = ||mu_theta(x_t^i, t, c_i) - mu_theta(x_t^j, t, c_j)||^2 up
separates the class-conditional reverse processes. A decreasing transform
h(d) turns that into a minimizable penalty; four variants are provided:

    neg_l2        h(d) = -d                 (unbounded below)
    hinge_margin  h(d) = max(0, margin - d) (flat once d >= margin)
    reciprocal    h(d) = 1 / (1 + d)
    exponential   h(d) = exp(-d)

Each anchor i is paired with every batch member j of a different class;
the partner is re-noised with the anchor's own (t_i, eps_i) so both means
are measured at the same step, and the pair sum is divided by the number
of contributing pairs. Gradients flow through both branches.

Losses are handed to the network as "bound" objects: the rows to evaluate
(x, t, c) plus a finish(outputs) callback that turns network outputs into
(value, d_out). net.loss_and_grad runs forward, finish, backward.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import net
from .data import DatasetStats, LabeledDataset
from .errors import ConfigError
from .forward import q_sample_batch
from .schedule import DiffusionSchedule, TauSchedule, tau_at

log = logging.getLogger(__name__)

VARIANTS = ("neg_l2", "hinge_margin", "reciprocal", "exponential")


@dataclass(frozen=True)
class PclVariant:
    """Penalty transform h(d) applied to pair distances; margin is only
    read by hinge_margin."""

    kind: str = "exponential"
    margin: float = 1.0

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.kind!r}")
        if not np.isfinite(self.margin) or self.margin < 0:
            raise ConfigError(f"margin must be finite and >= 0, got {self.margin}")


def variant_penalty(v: PclVariant, d):
    """h(d) for scalar or array d >= 0."""
    d = np.asarray(d, dtype=np.float64)
    if v.kind == "neg_l2":
        return -d
    if v.kind == "hinge_margin":
        return np.maximum(0.0, v.margin - d)
    if v.kind == "reciprocal":
        return 1.0 / (1.0 + d)
    return np.exp(-d)


def variant_penalty_grad(v: PclVariant, d):
    """dh/dd, elementwise (hinge uses the zero branch at d == margin)."""
    d = np.asarray(d, dtype=np.float64)
    if v.kind == "neg_l2":
        return -np.ones_like(d)
    if v.kind == "hinge_margin":
        return np.where(d < v.margin, -1.0, 0.0)
    if v.kind == "reciprocal":
        return -1.0 / (1.0 + d) ** 2
    return -np.exp(-d)


# ---------------------------------------------------------------------------
# Posterior-mean helpers


def mu_theta(x_t, t, eps_hat, sched: DiffusionSchedule):
    """Model posterior mean of the reverse step:
    mu = x_t / sqrt(alpha_t) - (1 - alpha_t) / (sqrt(alpha_t) sqrt(1 - abar_t)) * eps_hat."""
    x_t = np.asarray(x_t, dtype=np.float64)
    eps_hat = np.asarray(eps_hat, dtype=np.float64)
    alpha = sched.alpha(t)
    abar = sched.alpha_bar(t)
    a = 1.0 / np.sqrt(alpha)
    b = (1.0 - alpha) / (np.sqrt(alpha) * np.sqrt(1.0 - abar))
    if x_t.ndim == 2:
        a = np.reshape(a, (-1, 1)) if np.ndim(a) else a
        b = np.reshape(b, (-1, 1)) if np.ndim(b) else b
    return a * x_t - b * eps_hat


def pcl_distance(mu_i, mu_j) -> float:
    """Squared distance between two posterior means."""
    diff = np.asarray(mu_i, dtype=np.float64) - np.asarray(mu_j, dtype=np.float64)
    return float(np.sum(diff * diff))


def pcl_kl_closed_form(mu_i, mu_j, sigma_t: float) -> float:
    """KL(N(mu_i, sigma~^2 I) || N(mu_j, sigma_t^2 I)) = ||mu_i - mu_j||^2 / (2 sigma_t^2)
    for equal variances (the mean-shift term; constants cancel)."""
    if sigma_t <= 0:
        raise ConfigError(f"sigma_t must be positive, got {sigma_t}")
    return pcl_distance(mu_i, mu_j) / (2.0 * sigma_t ** 2)


def pair_distance_noise_form(x_t_i, x_t_j, eps_hat_i, eps_hat_j, t: int,
                             sched: DiffusionSchedule) -> float:
    """d_ij written purely in noise residuals:
    (1/alpha_t) * ||(x_t^i - x_t^j) + (1-alpha_t)/sqrt(1-abar_t) * (eps_hat_j - eps_hat_i)||^2.
    Algebraically identical to the mu_theta form; kept as an independent
    route for the equivalence check."""
    alpha = float(sched.alpha(t))
    abar = float(sched.alpha_bar(t))
    coef = (1.0 - alpha) / np.sqrt(1.0 - abar)
    v = (np.asarray(x_t_i) - np.asarray(x_t_j)) + coef * (np.asarray(eps_hat_j) - np.asarray(eps_hat_i))
    return float(np.sum(v * v) / alpha)


@dataclass(frozen=True)
class PairTerm:
    """One contributing pair, mostly for inspection and tests."""

    anchor: int
    partner: int
    t: int
    distance: float
    penalty: float
    tau: float


# ---------------------------------------------------------------------------
# Batch randomness


@dataclass(frozen=True)
class BatchDraw:
    """Everything random about one training batch, drawn up front so each
    loss mode consumes the RNG identically."""

    x0: np.ndarray
    c: np.ndarray
    t: np.ndarray
    eps: np.ndarray
    drop: np.ndarray  # True -> train this row unconditionally (null token)

    @property
    def size(self) -> int:
        return len(self.c)


def draw_batch(rng: np.random.Generator, ds: LabeledDataset, batch_size: int,
               T: int, p_uncond: float) -> BatchDraw:
    """Fixed draw order: row indices, timesteps, noise, dropout mask."""
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
    if len(ds) == 0:
        raise ConfigError("cannot draw from an empty dataset")
    idx = rng.integers(0, len(ds), size=batch_size)
    t = rng.integers(1, T + 1, size=batch_size)
    eps = rng.standard_normal((batch_size, ds.dim))
    drop = rng.random(batch_size) < p_uncond
    return BatchDraw(x0=ds.X[idx], c=ds.y[idx], t=t, eps=eps, drop=drop)


# ---------------------------------------------------------------------------
# Bound losses


@dataclass(frozen=True)
class LossParts:
    total: float
    ddpm: float
    pcl: float
    tau_mean: float


@dataclass(frozen=True)
class FinishResult:
    value: float
    d_out: np.ndarray
    parts: LossParts | None = None


@dataclass(frozen=True)
class BoundLoss:
    """Rows to push through the network plus the reduction over outputs."""

    x: np.ndarray
    t: np.ndarray
    c: np.ndarray
    finish: object
    label: str = ""


class ParamQuadratic:
    """0.5 * ||params||^2 as a bound loss; exercises the optimizer plumbing
    without touching the network."""

    label = "param_quadratic"

    def param_value_and_grad(self, params):
        params = np.asarray(params, dtype=np.float64)
        return 0.5 * float(params @ params), params.copy()


def _effective_classes(batch: BatchDraw, null_class: int) -> np.ndarray:
    return np.where(batch.drop, null_class, batch.c)


def bind_simple(batch: BatchDraw, sched: DiffusionSchedule, null_class: int) -> BoundLoss:
    """Mean over the batch of ||eps - eps_theta(x_t, t, c_eff)||^2, where
    c_eff is the true class or the null token per the dropout mask."""
    x_t = q_sample_batch(batch.x0, batch.t, batch.eps, sched)
    b = batch.size
    eps = batch.eps

    def finish(out):
        resid = out - eps
        value = float(np.mean(np.sum(resid * resid, axis=1)))
        d_out = (2.0 / b) * resid
        parts = LossParts(total=value, ddpm=value, pcl=0.0, tau_mean=0.0)
        return FinishResult(value=value, d_out=d_out, parts=parts)

    return BoundLoss(x=x_t, t=batch.t, c=_effective_classes(batch, null_class),
                     finish=finish, label="plain")


def bind_reweighted(batch: BatchDraw, sched: DiffusionSchedule,
                    stats: DatasetStats, null_class: int) -> BoundLoss:
    """Plain loss with each row scaled by (1 / w_c) / Z, where w_c is the
    class frequency and Z averages 1/w over the classes present in the
    dataset, so a class-balanced batch has mean weight 1."""
    present = stats.weights > 0
    if not np.any(present):
        raise ConfigError("reweighted loss needs at least one nonempty class")
    inv = np.zeros_like(stats.weights)
    inv[present] = 1.0 / stats.weights[present]
    z = inv[present].mean()
    if np.any(batch.c >= len(stats.weights)) or np.any(~present[batch.c]):
        raise ConfigError("batch contains a class with zero weight in stats")
    row_w = inv[batch.c] / z

    x_t = q_sample_batch(batch.x0, batch.t, batch.eps, sched)
    b = batch.size
    eps = batch.eps

    def finish(out):
        resid = out - eps
        per_row = np.sum(resid * resid, axis=1)
        value = float(np.mean(row_w * per_row))
        d_out = (2.0 / b) * row_w[:, None] * resid
        parts = LossParts(total=value, ddpm=value, pcl=0.0, tau_mean=0.0)
        return FinishResult(value=value, d_out=d_out, parts=parts)

    return BoundLoss(x=x_t, t=batch.t, c=_effective_classes(batch, null_class),
                     finish=finish, label="reweighted")


def bind_overall(batch: BatchDraw, sched: DiffusionSchedule, tau: TauSchedule,
                 variant: PclVariant, null_class: int) -> BoundLoss:
    """Denoising loss plus the pair-normalized overlap penalty.

    Row layout pushed through the network:
      [0, B)        denoising rows (dropout-masked classes),
      [B, 2B)       penalty anchors (always the true class),
      [2B, 2B+P)    pair partners: x0 of the partner re-noised with the
                    anchor's (t_i, eps_i), conditioned on the partner class.
    With no cross-class pair in the batch (or tau0 = 0) the penalty block
    is dropped and the loss reduces to bind_simple exactly.
    """
    x_t = q_sample_batch(batch.x0, batch.t, batch.eps, sched)
    b = batch.size
    eps = batch.eps
    tau_row = np.asarray(tau_at(tau, batch.t), dtype=np.float64).reshape(-1)
    tau_mean = float(tau_row.mean())

    diff = batch.c[:, None] != batch.c[None, :]
    anchor_idx, partner_idx = np.nonzero(diff)
    n_pairs = len(anchor_idx)
    use_pcl = tau.tau0 > 0.0 and n_pairs > 0
    if tau.tau0 > 0.0 and n_pairs == 0:
        log.debug("batch has a single class; overlap penalty contributes 0")

    if not use_pcl:
        base = bind_simple(batch, sched, null_class)

        def finish_plain(out):
            res = base.finish(out)
            parts = LossParts(total=res.value, ddpm=res.value, pcl=0.0, tau_mean=tau_mean)
            return FinishResult(value=res.value, d_out=res.d_out, parts=parts)

        return BoundLoss(x=base.x, t=base.t, c=base.c, finish=finish_plain, label="pcl")

    abar_i = sched.alpha_bar(batch.t)[anchor_idx]
    x_t_pair = (np.sqrt(abar_i)[:, None] * batch.x0[partner_idx]
                + np.sqrt(1.0 - abar_i)[:, None] * eps[anchor_idx])
    t_pair = batch.t[anchor_idx]
    alpha_pair = sched.alpha(t_pair)
    b_pair = (1.0 - alpha_pair) / (np.sqrt(alpha_pair) * np.sqrt(1.0 - sched.alpha_bar(t_pair)))

    rows_x = np.concatenate([x_t, x_t, x_t_pair], axis=0)
    rows_t = np.concatenate([batch.t, batch.t, t_pair])
    rows_c = np.concatenate([_effective_classes(batch, null_class), batch.c,
                             batch.c[partner_idx]])
    tau_pair = tau_row[anchor_idx]

    def finish(out):
        o_ddpm = out[:b]
        o_anchor = out[b:2 * b]
        o_partner = out[2 * b:]
        resid = o_ddpm - eps
        ddpm = float(np.mean(np.sum(resid * resid, axis=1)))

        mu_anchor = mu_theta(x_t, batch.t, o_anchor, sched)[anchor_idx]
        mu_partner = mu_theta(x_t_pair, t_pair, o_partner, sched)
        delta = mu_anchor - mu_partner
        dist = np.sum(delta * delta, axis=1)
        pcl = float(np.sum(tau_pair * variant_penalty(variant, dist)) / n_pairs)

        d_out = np.empty_like(out)
        d_out[:b] = (2.0 / b) * resid
        coef = (tau_pair * variant_penalty_grad(variant, dist) / n_pairs)[:, None]
        d_delta = coef * 2.0 * delta
        # mu = a * x_t - b_t * eps_hat, so d mu / d eps_hat = -b_t.
        d_out[2 * b:] = d_delta * b_pair[:, None]
        acc = np.zeros((b, out.shape[1]))
        np.add.at(acc, anchor_idx, -d_delta * b_pair[:, None])
        d_out[b:2 * b] = acc

        total = ddpm + pcl
        parts = LossParts(total=total, ddpm=ddpm, pcl=pcl, tau_mean=tau_mean)
        return FinishResult(value=total, d_out=d_out, parts=parts)

    return BoundLoss(x=rows_x, t=rows_t, c=rows_c, finish=finish, label="pcl")


def pair_terms(batch: BatchDraw, params, cfg, sched: DiffusionSchedule,
               tau: TauSchedule, variant: PclVariant) -> list[PairTerm]:
    """Explicit per-pair diagnostics matching bind_overall's penalty."""
    terms = []
    x_t = q_sample_batch(batch.x0, batch.t, batch.eps, sched)
    for i in range(batch.size):
        ti = int(batch.t[i])
        eh_i = net.predict_noise(params, cfg, x_t[i], ti, int(batch.c[i]))
        m_i = mu_theta(x_t[i], ti, eh_i, sched)
        for j in range(batch.size):
            if batch.c[j] == batch.c[i]:
                continue
            xtj = q_sample_batch(batch.x0[j][None], np.asarray([ti]),
                                 batch.eps[i][None], sched)[0]
            eh_j = net.predict_noise(params, cfg, xtj, ti, int(batch.c[j]))
            m_j = mu_theta(xtj, ti, eh_j, sched)
            d = pcl_distance(m_i, m_j)
            terms.append(PairTerm(anchor=i, partner=j, t=ti, distance=d,
                                  penalty=float(variant_penalty(variant, d)),
                                  tau=float(tau_at(tau, ti))))
    return terms


# ---------------------------------------------------------------------------
# Functional wrappers


def ddpm_simple_loss(params, cfg, batch: BatchDraw, sched: DiffusionSchedule) -> float:
    value, _ = net.loss_and_grad(params, cfg, bind_simple(batch, sched, cfg.null_class))
    return value


def overall_batch_loss(params, cfg, batch: BatchDraw, sched: DiffusionSchedule,
                       tau: TauSchedule, variant: PclVariant) -> float:
    value, _ = net.loss_and_grad(params, cfg,
                                 bind_overall(batch, sched, tau, variant, cfg.null_class))
    return value


def reweighted_loss(params, cfg, batch: BatchDraw, sched: DiffusionSchedule,
                    stats: DatasetStats) -> float:
    value, _ = net.loss_and_grad(params, cfg,
                                 bind_reweighted(batch, sched, stats, cfg.null_class))
    return value


# ---------------------------------------------------------------------------
# Class decomposition


@dataclass(frozen=True)
class Decomposition:
    """Global loss against its class-weighted split: global = sum_c w_c * per_class[c]."""

    global_loss: float
    per_class: np.ndarray
    weights: np.ndarray

    @property
    def weighted_sum(self) -> float:
        return float(self.weights @ self.per_class)

    @property
    def rel_error(self) -> float:
        ref = max(abs(self.global_loss), 1e-300)
        return abs(self.global_loss - self.weighted_sum) / ref


def decompose_loss_by_class(params, cfg, ds: LabeledDataset, sched: DiffusionSchedule,
                            t_assign: np.ndarray, eps_assign: np.ndarray) -> Decomposition:
    """Evaluate the conditional denoising loss once per element under a fixed
    (t, eps) assignment and split the mean by class. Every class up to
    max(label) must be populated."""
    n = len(ds)
    if n == 0:
        raise ConfigError("cannot decompose an empty dataset")
    t_assign = np.asarray(t_assign)
    eps_assign = np.asarray(eps_assign, dtype=np.float64)
    if t_assign.shape != (n,) or eps_assign.shape != ds.X.shape:
        raise ConfigError("t_assign / eps_assign must cover the dataset exactly")
    counts = np.bincount(ds.y)
    if np.any(counts == 0):
        raise ConfigError(f"empty class in dataset (counts {counts.tolist()})")

    x_t = q_sample_batch(ds.X, t_assign, eps_assign, sched)
    out = net.predict_noise(params, cfg, x_t, t_assign.astype(np.int64), ds.y)
    per_elem = np.sum((out - eps_assign) ** 2, axis=1)
    num_classes = len(counts)
    per_class = np.array([per_elem[ds.y == c].mean() for c in range(num_classes)])
    weights = counts / n
    return Decomposition(global_loss=float(per_elem.mean()),
                         per_class=per_class, weights=weights)

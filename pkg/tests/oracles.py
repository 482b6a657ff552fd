"""Independent reference implementations used to check the package.

Everything here is deliberately written the slow, obvious way (scalar
loops, quadrature, high-precision arithmetic) and must not share code
with src/imbdiff beyond calling its public predict_noise.
"""

import numpy as np
from scipy.integrate import quad

from imbdiff import net
from imbdiff.losses import variant_penalty
from imbdiff.schedule import tau_at


def kl_gaussians_quadrature(m1: float, m2: float, sigma: float) -> float:
    """KL(N(m1, sigma^2) || N(m2, sigma^2)) in 1-D by numerical integration
    of p * log(p / q). Integrand decays like a Gaussian, so +-12 sigma
    around m1 captures it to far better than 1e-10."""

    def integrand(x):
        logp = -0.5 * ((x - m1) / sigma) ** 2
        logq = -0.5 * ((x - m2) / sigma) ** 2
        p = np.exp(logp) / (sigma * np.sqrt(2 * np.pi))
        return p * (logp - logq)

    lo, hi = m1 - 12 * sigma, m1 + 12 * sigma
    val, _ = quad(integrand, lo, hi, limit=200, epsabs=1e-12, epsrel=1e-12)
    return val


def fd_gradient(f, params: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences, one coordinate at a time."""
    g = np.empty_like(params)
    for i in range(len(params)):
        up = params.copy()
        up[i] += h
        dn = params.copy()
        dn[i] -= h
        g[i] = (f(up) - f(dn)) / (2.0 * h)
    return g


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12))


def simple_loss_reference(params, cfg, batch, sched) -> float:
    """Per-row loop over the batch: mean ||eps - eps_theta||^2 with the
    dropout mask applied to the conditioning class."""
    total = 0.0
    for i in range(batch.size):
        t = int(batch.t[i])
        abar = float(sched.alpha_bar(t))
        x_t = np.sqrt(abar) * batch.x0[i] + np.sqrt(1.0 - abar) * batch.eps[i]
        c = cfg.null_class if batch.drop[i] else int(batch.c[i])
        eps_hat = net.predict_noise(params, cfg, x_t, t, c)
        total += float(np.sum((batch.eps[i] - eps_hat) ** 2))
    return total / batch.size


def reweighted_loss_reference(params, cfg, batch, sched, stats) -> float:
    present = stats.weights > 0
    inv = np.where(present, 1.0 / np.where(present, stats.weights, 1.0), 0.0)
    z = inv[present].mean()
    total = 0.0
    for i in range(batch.size):
        t = int(batch.t[i])
        abar = float(sched.alpha_bar(t))
        x_t = np.sqrt(abar) * batch.x0[i] + np.sqrt(1.0 - abar) * batch.eps[i]
        c = cfg.null_class if batch.drop[i] else int(batch.c[i])
        eps_hat = net.predict_noise(params, cfg, x_t, t, c)
        w = inv[int(batch.c[i])] / z
        total += w * float(np.sum((batch.eps[i] - eps_hat) ** 2))
    return total / batch.size


def overall_loss_reference(params, cfg, batch, sched, tau, variant) -> float:
    """Transliteration of the training objective: denoising term plus the
    anchor/partner double loop, partner re-noised with the anchor's
    (t, eps), pair sum divided by the pair count."""
    ddpm = simple_loss_reference(params, cfg, batch, sched)
    terms = []
    for i in range(batch.size):
        t = int(batch.t[i])
        alpha = float(sched.alpha(t))
        abar = float(sched.alpha_bar(t))
        sa, sn = np.sqrt(abar), np.sqrt(1.0 - abar)
        x_t_i = sa * batch.x0[i] + sn * batch.eps[i]
        eh_i = net.predict_noise(params, cfg, x_t_i, t, int(batch.c[i]))
        mu_i = x_t_i / np.sqrt(alpha) - (1 - alpha) / (np.sqrt(alpha) * sn) * eh_i
        for j in range(batch.size):
            if batch.c[j] == batch.c[i]:
                continue
            x_t_j = sa * batch.x0[j] + sn * batch.eps[i]
            eh_j = net.predict_noise(params, cfg, x_t_j, t, int(batch.c[j]))
            mu_j = x_t_j / np.sqrt(alpha) - (1 - alpha) / (np.sqrt(alpha) * sn) * eh_j
            d = float(np.sum((mu_i - mu_j) ** 2))
            terms.append(float(tau_at(tau, t)) * float(variant_penalty(variant, d)))
    if terms:
        return ddpm + sum(terms) / len(terms)
    return ddpm

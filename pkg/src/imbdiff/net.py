"""Conditional noise-prediction MLP with a hand-derived backward pass.

The network maps (x_t, t, c) -> eps_hat. Inputs are concatenated as
[x_t | sinusoidal time features | class embedding]; class C (one past the
last real class) is the null token used for classifier-free guidance.

Parameters live in one flat float64 vector with a fixed layout:

    embedding table (C+1, embed_dim), row-major,
    then per linear layer, W (fan_in, fan_out) row-major followed by b.

Checkpoint format (binary): the magic line ``IMBDIFF-NET-1``, one line of
JSON holding the NetworkConfig fields, then the flat parameter vector as
little-endian float64. See save_checkpoint / load_checkpoint.

Everything here is pure numpy; gradients come from the explicit reverse
sweep in _backward, which tests compare against central finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, NumericsError

MAGIC = b"IMBDIFF-NET-1\n"


def _silu(z):
    return z / (1.0 + np.exp(-z))


def _silu_grad(z):
    s = 1.0 / (1.0 + np.exp(-z))
    return s * (1.0 + z * (1.0 - s))


def _tanh_grad(z):
    return 1.0 - np.tanh(z) ** 2


_ACTIVATIONS = {
    "silu": (_silu, _silu_grad),
    "tanh": (np.tanh, _tanh_grad),
}


@dataclass(frozen=True)
class NetworkConfig:
    """Shape of the denoiser. num_classes counts real classes; the
    embedding table holds num_classes + 1 rows (last one = null token)."""

    dim: int
    hidden: tuple[int, ...]
    time_dim: int
    num_classes: int
    embed_dim: int
    activation: str = "silu"

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.dim < 1 or self.time_dim < 1 or self.embed_dim < 1:
            raise ConfigError("dim, time_dim and embed_dim must be >= 1")
        if self.num_classes < 1:
            raise ConfigError(f"num_classes must be >= 1, got {self.num_classes}")
        if any(h < 1 for h in self.hidden):
            raise ConfigError(f"hidden widths must be >= 1, got {self.hidden}")
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")

    @property
    def null_class(self) -> int:
        return self.num_classes

    @property
    def input_dim(self) -> int:
        return self.dim + self.time_dim + self.embed_dim

    def layer_dims(self) -> list[tuple[int, int]]:
        widths = [self.input_dim, *self.hidden, self.dim]
        return [(widths[i], widths[i + 1]) for i in range(len(widths) - 1)]

    def param_count(self) -> int:
        n = (self.num_classes + 1) * self.embed_dim
        for fan_in, fan_out in self.layer_dims():
            n += fan_in * fan_out + fan_out
        return n

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @staticmethod
    def from_dict(d: dict) -> "NetworkConfig":
        return NetworkConfig(dim=int(d["dim"]), hidden=tuple(d["hidden"]),
                             time_dim=int(d["time_dim"]),
                             num_classes=int(d["num_classes"]),
                             embed_dim=int(d["embed_dim"]),
                             activation=str(d.get("activation", "silu")))


def split_params(cfg: NetworkConfig, params: np.ndarray):
    """Views into the flat vector: (embedding, [(W, b), ...]). Writing to a
    view writes through to the flat vector, which is how the backward pass
    accumulates into one preallocated gradient buffer."""
    if params.shape != (cfg.param_count(),):
        raise ConfigError(f"expected {cfg.param_count()} params, got shape {params.shape}")
    pos = (cfg.num_classes + 1) * cfg.embed_dim
    emb = params[:pos].reshape(cfg.num_classes + 1, cfg.embed_dim)
    layers = []
    for fan_in, fan_out in cfg.layer_dims():
        w = params[pos:pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = params[pos:pos + fan_out]
        pos += fan_out
        layers.append((w, b))
    return emb, layers


def init_params(cfg: NetworkConfig, seed: int) -> np.ndarray:
    """Symmetric uniform init scaled by 1/sqrt(fan_in); embedding rows use
    1/sqrt(embed_dim). Draw order is fixed (embedding, then layers)."""
    rng = np.random.default_rng(seed)
    params = np.empty(cfg.param_count(), dtype=np.float64)
    emb, layers = split_params(cfg, params)
    emb[:] = rng.uniform(-1.0, 1.0, emb.shape) / np.sqrt(cfg.embed_dim)
    for w, b in layers:
        bound = 1.0 / np.sqrt(w.shape[0])
        w[:] = rng.uniform(-bound, bound, w.shape)
        b[:] = rng.uniform(-bound, bound, b.shape)
    return params


def time_features(t, time_dim: int) -> np.ndarray:
    """Sinusoidal features of the (raw, 1-based) timestep. Frequencies fall
    geometrically from 1 to 1/10000; sin features first, then cos."""
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    n_sin = (time_dim + 1) // 2
    n_cos = time_dim - n_sin
    k = np.arange(n_sin, dtype=np.float64)
    freqs = np.exp(-np.log(10000.0) * k / max(n_sin - 1, 1))
    ang = t[:, None] * freqs[None, :]
    return np.concatenate([np.sin(ang), np.cos(ang[:, :n_cos])], axis=1)


def _check_rows(cfg: NetworkConfig, x, t, c):
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t)
    c = np.asarray(c)
    if x.ndim != 2 or x.shape[1] != cfg.dim:
        raise ConfigError(f"x must be (B, {cfg.dim}), got {x.shape}")
    if t.shape != (x.shape[0],) or c.shape != (x.shape[0],):
        raise ConfigError("t and c must be 1-D with one entry per row of x")
    if not np.issubdtype(t.dtype, np.integer) or not np.issubdtype(c.dtype, np.integer):
        raise ConfigError("t and c must be integer arrays")
    if t.size and t.min() < 1:
        raise ConfigError("timesteps must be >= 1")
    if c.size and (c.min() < 0 or c.max() > cfg.null_class):
        raise ConfigError(f"class ids must be in 0..{cfg.null_class} (last = null token)")
    if not np.all(np.isfinite(x)):
        raise ConfigError("x contains non-finite values")
    return x, t.astype(np.int64), c.astype(np.int64)


class _Cache:
    __slots__ = ("c", "hs", "zs")

    def __init__(self, c, hs, zs):
        self.c = c
        self.hs = hs
        self.zs = zs


def _forward(params, cfg: NetworkConfig, x, t, c, keep: bool):
    emb, layers = split_params(cfg, params)
    act, _ = _ACTIVATIONS[cfg.activation]
    feats = np.concatenate([x, time_features(t, cfg.time_dim), emb[c]], axis=1)
    hs, zs = [feats], []
    h = feats
    for w, b in layers[:-1]:
        z = h @ w + b
        h = act(z)
        if keep:
            zs.append(z)
            hs.append(h)
    w, b = layers[-1]
    out = h @ w + b
    return (out, _Cache(c, hs, zs)) if keep else (out, None)


def apply(params, cfg: NetworkConfig, x, t, c) -> np.ndarray:
    """Batched eps_hat without validation or cache (hot path)."""
    out, _ = _forward(params, cfg, x, t, c, keep=False)
    return out


def predict_noise(params, cfg: NetworkConfig, x_t, t, c) -> np.ndarray:
    """Validated eps_hat. Accepts a single example (1-D x_t, int t and c)
    or a batch (2-D x_t with 1-D t, c). Output mirrors the input shape."""
    x_arr = np.asarray(x_t, dtype=np.float64)
    single = x_arr.ndim == 1
    if single:
        x_arr = x_arr[None, :]
        t = np.asarray([t])
        c = np.asarray([c])
    x_arr, t, c = _check_rows(cfg, x_arr, t, c)
    out = apply(params, cfg, x_arr, t, c)
    if not np.all(np.isfinite(out)):
        raise NumericsError("network produced non-finite output")
    return out[0] if single else out


def _backward(params, cfg: NetworkConfig, cache: _Cache, d_out) -> np.ndarray:
    """Reverse sweep. d_out is dLoss/d(out) with shape (B, dim); returns the
    flat gradient. Inputs x and t are constants, so only the embedding rows
    among the inputs receive gradient."""
    _, layers = split_params(cfg, params)
    _, act_grad = _ACTIVATIONS[cfg.activation]
    grad = np.zeros_like(params)
    gemb, glayers = split_params(cfg, grad)
    d = d_out
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        gw, gb = glayers[i]
        gw += cache.hs[i].T @ d
        gb += d.sum(axis=0)
        d = d @ w.T
        if i > 0:
            d = d * act_grad(cache.zs[i - 1])
    demb = d[:, cfg.dim + cfg.time_dim:]
    np.add.at(gemb, cache.c, demb)
    return grad


def loss_and_grad(params, cfg: NetworkConfig, bound):
    """Evaluate a bound loss (see losses module) and its parameter gradient.

    The bound either exposes param_value_and_grad(params) directly (pure
    parameter functions, used to exercise the optimizer), or exposes rows
    (x, t, c) plus finish(outputs) -> result with fields value, d_out and
    optionally d_params / parts.
    """
    value, grad, _ = evaluate_bound(params, cfg, bound)
    return value, grad


def evaluate_bound(params, cfg: NetworkConfig, bound):
    """Like loss_and_grad but also returns the bound's reported parts
    (ddpm/pcl/tau_mean breakdown when the bound provides one)."""
    params = np.asarray(params, dtype=np.float64)
    direct = getattr(bound, "param_value_and_grad", None)
    if direct is not None:
        value, grad = direct(params)
        return float(value), grad, None

    x, t, c = _check_rows(cfg, bound.x, bound.t, bound.c)
    out, cache = _forward(params, cfg, x, t, c, keep=True)
    if not np.all(np.isfinite(out)):
        raise NumericsError("network produced non-finite output")
    res = bound.finish(out)
    grad = _backward(params, cfg, cache, np.asarray(res.d_out, dtype=np.float64))
    if not (np.isfinite(res.value) and np.all(np.isfinite(grad))):
        raise NumericsError("non-finite loss or gradient")
    return float(res.value), grad, getattr(res, "parts", None)


def save_checkpoint(path, cfg: NetworkConfig, params: np.ndarray) -> None:
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (cfg.param_count(),):
        raise ConfigError(f"param vector has shape {params.shape}, expected ({cfg.param_count()},)")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(cfg.to_dict(), sort_keys=True).encode("ascii") + b"\n")
        fh.write(params.astype("<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(MAGIC):
        raise ConfigError(f"{path}: not a checkpoint (bad magic)")
    rest = blob[len(MAGIC):]
    nl = rest.index(b"\n")
    cfg = NetworkConfig.from_dict(json.loads(rest[:nl].decode("ascii")))
    raw = rest[nl + 1:]
    params = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    if params.shape != (cfg.param_count(),):
        raise ConfigError(f"{path}: payload holds {params.size} floats, "
                          f"config wants {cfg.param_count()}")
    return cfg, params

"""Long-tailed toy datasets: Gaussian mixtures, glyph rasters, CSV I/O.

The on-disk sample format is a CSV with header ``dim,label,x0,...,x{d-1}``
(UTF-8, LF line endings). Floats are written with repr, which round-trips
exactly through float().
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ImbalanceSpec:
    """Exponential long-tail profile: class i gets n_max * imb**(i/(C-1))."""

    num_classes: int
    n_max: int
    imb: float

    def __post_init__(self):
        if self.num_classes < 1:
            raise ConfigError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")
        if not (0.0 < self.imb <= 1.0):
            raise ConfigError(f"imb must be in (0, 1], got {self.imb}")


def longtail_counts(spec: ImbalanceSpec) -> np.ndarray:
    """Per-class counts, rounded half away from zero, clamped to >= 1.

    imb = 1 gives a balanced dataset; the head class always gets n_max.
    """
    c = spec.num_classes
    if c == 1:
        return np.array([spec.n_max], dtype=np.int64)
    expo = np.arange(c, dtype=np.float64) / (c - 1)
    raw = spec.n_max * spec.imb ** expo
    counts = np.floor(raw + 0.5).astype(np.int64)  # half away from zero (raw > 0)
    return np.maximum(counts, 1)


@dataclass(frozen=True)
class ToyMixtureSpec:
    """Isotropic Gaussian mixture: one component per class.

    weights are the class priors (used by the Bayes overlap metric),
    means has shape (C, d), sigmas one standard deviation per class.
    """

    weights: np.ndarray
    means: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        s = np.asarray(self.sigmas, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "sigmas", s)
        c = len(w)
        if m.shape[0] != c or s.shape != (c,):
            raise ConfigError(f"mixture shapes disagree: {c} weights, means {m.shape}, sigmas {s.shape}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ConfigError("mixture weights must be nonnegative and sum to 1")
        if np.any(s <= 0):
            raise ConfigError("mixture sigmas must be positive")
        for arr in (w, m, s):
            arr.flags.writeable = False

    @property
    def num_classes(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def mixture_from_counts(means, sigmas, counts) -> ToyMixtureSpec:
    """Mixture whose priors are the empirical count proportions."""
    counts = np.asarray(counts, dtype=np.float64)
    return ToyMixtureSpec(weights=counts / counts.sum(), means=means, sigmas=sigmas)


def make_ring_mixture(num_classes: int, radius: float = 4.0,
                      sigma: float = 1.0) -> ToyMixtureSpec:
    """Equal-prior 2-D mixture with means spaced evenly on a circle."""
    ang = 2.0 * np.pi * np.arange(num_classes) / num_classes
    means = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return ToyMixtureSpec(weights=np.full(num_classes, 1.0 / num_classes),
                          means=means, sigmas=np.full(num_classes, sigma))


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix X (N, d) with integer labels y (N,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ConfigError(f"bad dataset shapes X{X.shape} y{y.shape}")
        if len(y) and y.min() < 0:
            raise ConfigError("labels must be >= 0")
        X.flags.writeable = False
        y.flags.writeable = False

    def __len__(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class DatasetStats:
    """Per-class counts and empirical weights w_c = N_c / N."""

    counts: np.ndarray
    weights: np.ndarray

    @property
    def num_classes(self) -> int:
        return len(self.counts)


def class_stats(ds: LabeledDataset, num_classes: int | None = None) -> DatasetStats:
    if len(ds) == 0:
        raise ConfigError("empty dataset has no class stats")
    c = int(ds.y.max()) + 1 if num_classes is None else num_classes
    counts = np.bincount(ds.y, minlength=c).astype(np.int64)
    if len(counts) > c:
        raise ConfigError(f"labels exceed num_classes={c}")
    return DatasetStats(counts=counts, weights=counts / counts.sum())


def generate_gmm_dataset(mix: ToyMixtureSpec, counts, seed: int) -> LabeledDataset:
    """Draw counts[i] points from component i, in class order, one RNG stream."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (mix.num_classes,):
        raise ConfigError(f"need one count per class, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ConfigError("counts must be >= 0")
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for i, n in enumerate(counts):
        pts = mix.means[i] + mix.sigmas[i] * rng.standard_normal((n, mix.dim))
        xs.append(pts)
        ys.append(np.full(n, i, dtype=np.int64))
    return LabeledDataset(X=np.concatenate(xs, axis=0), y=np.concatenate(ys))


def resample_uniform(ds: LabeledDataset, n: int, seed: int) -> LabeledDataset:
    """Class-balanced bootstrap: uniform class draw, then uniform member
    within the class, with replacement. Classes absent from ds are skipped."""
    if len(ds) == 0:
        raise ConfigError("cannot resample an empty dataset")
    rng = np.random.default_rng(seed)
    present = np.unique(ds.y)
    by_class = {int(c): np.flatnonzero(ds.y == c) for c in present}
    cls = present[rng.integers(0, len(present), size=n)]
    rows = np.empty(n, dtype=np.int64)
    for k, c in enumerate(cls):
        members = by_class[int(c)]
        rows[k] = members[rng.integers(0, len(members))]
    return LabeledDataset(X=ds.X[rows].copy(), y=ds.y[rows].copy())


# ---------------------------------------------------------------------------
# CSV I/O


def _fmt(x: float) -> str:
    return repr(float(x))


def dataset_to_csv(ds: LabeledDataset, path, dim: int | None = None) -> None:
    """Write the sample CSV. dim only matters for an empty dataset, where the
    header still needs a width."""
    d = ds.dim if len(ds) else (dim if dim is not None else ds.dim)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("dim,label," + ",".join(f"x{j}" for j in range(d)) + "\n")
        for i in range(len(ds)):
            coords = ",".join(_fmt(v) for v in ds.X[i])
            fh.write(f"{d},{ds.y[i]},{coords}\n")


def dataset_from_csv(path) -> LabeledDataset:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _parse_dataset(fh)


def _parse_dataset(fh) -> LabeledDataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("sample CSV is empty (no header)") from None
    if len(header) < 3 or header[0] != "dim" or header[1] != "label":
        raise ConfigError(f"bad sample CSV header: {header!r}")
    d = len(header) - 2
    expect = ["dim", "label"] + [f"x{j}" for j in range(d)]
    if header != expect:
        raise ConfigError(f"bad sample CSV header: {header!r}")
    xs, ys = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != d + 2:
            raise ConfigError(f"line {lineno}: expected {d + 2} fields, got {len(row)}")
        if int(row[0]) != d:
            raise ConfigError(f"line {lineno}: dim {row[0]} disagrees with header width {d}")
        ys.append(int(row[1]))
        xs.append([float(v) for v in row[2:]])
    X = np.asarray(xs, dtype=np.float64).reshape(len(ys), d)
    return LabeledDataset(X=X, y=np.asarray(ys, dtype=np.int64))


def mixture_to_csv(mix: ToyMixtureSpec, path) -> None:
    """Sidecar describing the true mixture: component,weight,sigma,m0,..."""
    d = mix.dim
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("component,weight,sigma," + ",".join(f"m{j}" for j in range(d)) + "\n")
        for i in range(mix.num_classes):
            ms = ",".join(_fmt(v) for v in mix.means[i])
            fh.write(f"{i},{_fmt(mix.weights[i])},{_fmt(mix.sigmas[i])},{ms}\n")


def mixture_from_csv(path) -> ToyMixtureSpec:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["component", "weight", "sigma"]:
            raise ConfigError(f"bad mixture CSV header: {header!r}")
        d = len(header) - 3
        ws, ss, ms = [], [], []
        for row in reader:
            if not row:
                continue
            ws.append(float(row[1]))
            ss.append(float(row[2]))
            ms.append([float(v) for v in row[3:]])
    return ToyMixtureSpec(weights=np.asarray(ws), means=np.asarray(ms).reshape(len(ws), d),
                          sigmas=np.asarray(ss))


# ---------------------------------------------------------------------------
# 8x8 glyph rasters (d = 64): fixed binary templates, one per class,
# observed with isotropic pixel noise. That makes the glyph dataset a
# Gaussian mixture too, so the same generators and metrics apply.

_GLYPH_ART = [
    # 0: box outline
    "XXXXXXXX|X......X|X......X|X......X|X......X|X......X|X......X|XXXXXXXX",
    # 1: vertical bar
    "...XX...|...XX...|...XX...|...XX...|...XX...|...XX...|...XX...|...XX...",
    # 2: horizontal bar
    "........|........|........|XXXXXXXX|XXXXXXXX|........|........|........",
    # 3: main diagonal
    "XX......|.XX.....|..XX....|...XX...|....XX..|.....XX.|......XX|.......X",
    # 4: anti diagonal
    ".......X|......XX|.....XX.|....XX..|...XX...|..XX....|.XX.....|XX......",
    # 5: plus sign
    "...XX...|...XX...|...XX...|XXXXXXXX|XXXXXXXX|...XX...|...XX...|...XX...",
    # 6: X
    "X......X|.X....X.|..X..X..|...XX...|...XX...|..X..X..|.X....X.|X......X",
    # 7: filled center block
    "........|........|..XXXX..|..XXXX..|..XXXX..|..XXXX..|........|........",
    # 8: checkerboard
    "X.X.X.X.|.X.X.X.X|X.X.X.X.|.X.X.X.X|X.X.X.X.|.X.X.X.X|X.X.X.X.|.X.X.X.X",
    # 9: top-left corner block
    "XXXX....|XXXX....|XXXX....|XXXX....|........|........|........|........",
]

GLYPH_SIDE = 8
GLYPH_DIM = GLYPH_SIDE * GLYPH_SIDE


def glyph_templates(num_classes: int) -> np.ndarray:
    """(C, 64) float templates with entries in {0, 1}."""
    if not (1 <= num_classes <= len(_GLYPH_ART)):
        raise ConfigError(f"glyph mode supports 1..{len(_GLYPH_ART)} classes, got {num_classes}")
    out = np.zeros((num_classes, GLYPH_DIM))
    for i in range(num_classes):
        rows = _GLYPH_ART[i].split("|")
        for r, row in enumerate(rows):
            for cpos, ch in enumerate(row):
                out[i, r * GLYPH_SIDE + cpos] = 1.0 if ch == "X" else 0.0
    return out


def glyph_mixture(num_classes: int, noise_sigma: float = 0.25,
                  weights=None) -> ToyMixtureSpec:
    """Mixture view of the glyph generator (templates as means)."""
    means = glyph_templates(num_classes)
    if weights is None:
        weights = np.full(num_classes, 1.0 / num_classes)
    return ToyMixtureSpec(weights=np.asarray(weights, dtype=np.float64), means=means,
                          sigmas=np.full(num_classes, float(noise_sigma)))


def write_pgm(path, vec: np.ndarray) -> None:
    """Dump one 64-vector as an ASCII PGM, values clipped to [0, 1]."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (GLYPH_DIM,):
        raise ConfigError(f"expected a ({GLYPH_DIM},) vector, got {vec.shape}")
    levels = np.clip(np.rint(np.clip(vec, 0.0, 1.0) * 255), 0, 255).astype(int)
    grid = levels.reshape(GLYPH_SIDE, GLYPH_SIDE)
    buf = io.StringIO()
    buf.write(f"P2\n{GLYPH_SIDE} {GLYPH_SIDE}\n255\n")
    for r in range(GLYPH_SIDE):
        buf.write(" ".join(str(v) for v in grid[r]) + "\n")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(buf.getvalue())

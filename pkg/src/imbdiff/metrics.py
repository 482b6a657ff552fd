"""Evaluation stack for generated samples, all in raw data space.

Pieces: Fréchet distance between Gaussian moment summaries (global and
per class), k-NN manifold precision/recall, clustered-histogram
precision/recall curves reduced to F_beta scores, a Bayes-classifier
overlap matrix against the known mixture, many/med/few count bands, and
a linear probe trained on generated data and scored on held-out real
data. Everything is deterministic given its config.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, ToyMixtureSpec
from .errors import ConfigError

INTERVAL_NAMES = ("many", "med", "few")


@dataclass(frozen=True)
class MetricsConfig:
    knn_k: int = 5
    f_betas: tuple[float, ...] = (8.0, 0.125)
    clusters_per_class: int = 20
    kmeans_iters: int = 50
    prd_angles: int = 1001
    prd_seed: int = 0
    knn_max_points: int = 4000
    knn_seed: int = 0
    probe_iters: int = 400
    probe_lr: float = 0.1
    probe_seed: int = 0

    def __post_init__(self):
        if self.knn_k < 1:
            raise ConfigError(f"knn_k must be >= 1, got {self.knn_k}")
        if self.clusters_per_class < 1:
            raise ConfigError("clusters_per_class must be >= 1")
        if any(b <= 0 for b in self.f_betas):
            raise ConfigError("f_betas must be positive")


# ---------------------------------------------------------------------------
# Fréchet distance between Gaussians


def _sym_check(cov: np.ndarray, name: str, tol: float) -> np.ndarray:
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ConfigError(f"{name} must be square, got {cov.shape}")
    scale = max(float(np.abs(cov).max()), 1.0)
    if np.abs(cov - cov.T).max() > tol * scale:
        raise ConfigError(f"{name} is not symmetric within tolerance")
    return 0.5 * (cov + cov.T)


def _psd_sqrt(cov: np.ndarray, name: str, tol: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(cov)
    scale = max(float(vals.max()), 1.0) if len(vals) else 1.0
    if vals.min() < -tol * scale:
        raise ConfigError(f"{name} has negative eigenvalue {vals.min():.3e} beyond tolerance")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def frechet_gaussian(mu1, cov1, mu2, cov2, psd_tol: float = 1e-8) -> float:
    """||mu1 - mu2||^2 + tr(cov1 + cov2 - 2 (cov1 cov2)^(1/2)).

    The cross term is computed from the eigendecomposition of the
    symmetrized product A cov2 A with A = sqrt(cov1), which is similar to
    (cov1 cov2)^(1/2) and keeps everything in real arithmetic.
    """
    mu1 = np.asarray(mu1, dtype=np.float64)
    mu2 = np.asarray(mu2, dtype=np.float64)
    c1 = _sym_check(cov1, "cov1", psd_tol)
    c2 = _sym_check(cov2, "cov2", psd_tol)
    if mu1.shape != mu2.shape or c1.shape != c2.shape or c1.shape[0] != mu1.shape[0]:
        raise ConfigError("moment shapes disagree")
    a = _psd_sqrt(c1, "cov1", psd_tol)
    inner = a @ c2 @ a
    inner = 0.5 * (inner + inner.T)
    vals = np.linalg.eigh(inner)[0]
    cross = 2.0 * np.sum(np.sqrt(np.clip(vals, 0.0, None)))
    diff = mu1 - mu2
    return max(float(diff @ diff + np.trace(c1) + np.trace(c2) - cross), 0.0)


def sample_moments(x: np.ndarray):
    """Mean vector and sample covariance (ddof = 1) of rows."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        raise ConfigError(f"need >= 2 points for moments, got {len(x)}")
    mu = x.mean(axis=0)
    centered = x - mu
    cov = centered.T @ centered / (len(x) - 1)
    return mu, cov


def frechet_from_samples(a: np.ndarray, b: np.ndarray) -> float:
    mu1, c1 = sample_moments(a)
    mu2, c2 = sample_moments(b)
    return frechet_gaussian(mu1, c1, mu2, c2)


# ---------------------------------------------------------------------------
# k-NN manifold precision / recall


def _maybe_subsample(x: np.ndarray, limit: int, seed: int) -> np.ndarray:
    if len(x) <= limit:
        return x
    idx = np.random.default_rng(seed).choice(len(x), size=limit, replace=False)
    return x[np.sort(idx)]


def _kth_neighbor_sq_radii(x: np.ndarray, k: int) -> np.ndarray:
    """Squared distance to the k-th nearest neighbor, self excluded."""
    sq = np.sum(x * x, axis=1)
    radii = np.empty(len(x))
    chunk = max(1, 2_000_000 // max(len(x), 1))
    for lo in range(0, len(x), chunk):
        hi = min(lo + chunk, len(x))
        d2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (x[lo:hi] @ x.T)
        np.clip(d2, 0.0, None, out=d2)
        # column of the k-th smallest excluding self (self distance is 0)
        part = np.partition(d2, k, axis=1)
        radii[lo:hi] = part[:, k]
    return radii


def _covered_fraction(queries: np.ndarray, support: np.ndarray,
                      sq_radii: np.ndarray) -> float:
    sq_s = np.sum(support * support, axis=1)
    sq_q = np.sum(queries * queries, axis=1)
    hits = 0
    chunk = max(1, 2_000_000 // max(len(support), 1))
    for lo in range(0, len(queries), chunk):
        hi = min(lo + chunk, len(queries))
        d2 = sq_q[lo:hi, None] + sq_s[None, :] - 2.0 * (queries[lo:hi] @ support.T)
        np.clip(d2, 0.0, None, out=d2)
        hits += int(np.count_nonzero(np.any(d2 <= sq_radii[None, :], axis=1)))
    return hits / len(queries)


def knn_precision_recall(real: np.ndarray, gen: np.ndarray,
                         cfg: MetricsConfig = MetricsConfig()):
    """Manifold precision (gen points inside the real manifold) and recall
    (real points inside the generated manifold); the manifold is the union
    of k-th-neighbor balls. Identical sets give exactly (1, 1)."""
    real = np.asarray(real, dtype=np.float64)
    gen = np.asarray(gen, dtype=np.float64)
    k = cfg.knn_k
    if len(real) <= k or len(gen) <= k:
        raise ConfigError(f"need more than k={k} points in both sets")
    real = _maybe_subsample(real, cfg.knn_max_points, cfg.knn_seed)
    gen = _maybe_subsample(gen, cfg.knn_max_points, cfg.knn_seed + 1)
    precision = _covered_fraction(gen, real, _kth_neighbor_sq_radii(real, k))
    recall = _covered_fraction(real, gen, _kth_neighbor_sq_radii(gen, k))
    return precision, recall


# ---------------------------------------------------------------------------
# Clustered-histogram precision/recall curves and F_beta


def _kmeans_labels(points: np.ndarray, k: int, iters: int, seed: int) -> np.ndarray:
    """Lloyd iterations from a greedy farthest-first init (first center
    drawn by the seeded RNG, later ones maximize distance to the chosen
    set, argmax/argmin ties resolve to the lowest index)."""
    n = len(points)
    if n == 0:
        raise ConfigError("cannot cluster an empty point set")
    k = min(k, n)
    rng = np.random.default_rng(seed)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        centers[i] = points[int(np.argmax(d2))]
        d2 = np.minimum(d2, np.sum((points - centers[i]) ** 2, axis=1))
    labels = None
    sq_pts = np.sum(points * points, axis=1)[:, None]
    for _it in range(max(iters, 1)):
        dist = sq_pts + np.sum(centers * centers, axis=1)[None, :] - 2.0 * points @ centers.T
        new_labels = np.argmin(dist, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):  # empty clusters keep their previous center
                centers[j] = members.mean(axis=0)
    return labels


def f_beta(precision: float, recall: float, beta: float) -> float:
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (b2 * precision + recall)


@dataclass(frozen=True)
class PrdResult:
    precisions: np.ndarray
    recalls: np.ndarray
    f_scores: dict

    def f_at(self, beta: float) -> float:
        return self.f_scores[beta]


def prd_curve(hist_real: np.ndarray, hist_gen: np.ndarray, num_angles: int,
              epsilon: float = 1e-10):
    """alpha(lambda) = sum_i min(lambda * real_i, gen_i), beta = alpha / lambda,
    swept over lambda = tan(theta) for theta in (epsilon, pi/2 - epsilon)."""
    angles = np.linspace(epsilon, np.pi / 2 - epsilon, num_angles)
    slopes = np.tan(angles)
    precisions = np.minimum(slopes[:, None] * hist_real[None, :],
                            hist_gen[None, :]).sum(axis=1)
    recalls = precisions / slopes
    return precisions, recalls


def prd_f_beta(real: np.ndarray, gen: np.ndarray, num_clusters: int,
               cfg: MetricsConfig = MetricsConfig()) -> PrdResult:
    """Cluster the union of both sets, compare the two cluster histograms
    with the PRD curve, report max-F_beta for each configured beta."""
    real = np.asarray(real, dtype=np.float64)
    gen = np.asarray(gen, dtype=np.float64)
    if len(real) == 0 or len(gen) == 0:
        raise ConfigError("PRD needs nonempty real and generated sets")
    union = np.concatenate([real, gen], axis=0)
    labels = _kmeans_labels(union, num_clusters, cfg.kmeans_iters, cfg.prd_seed)
    k = labels.max() + 1
    hist_real = np.bincount(labels[:len(real)], minlength=k) / len(real)
    hist_gen = np.bincount(labels[len(real):], minlength=k) / len(gen)
    precisions, recalls = prd_curve(hist_real, hist_gen, cfg.prd_angles)
    scores = {}
    for b in cfg.f_betas:
        vals = [f_beta(p, r, b) for p, r in zip(precisions, recalls)]
        scores[b] = float(max(vals))
    return PrdResult(precisions=precisions, recalls=recalls, f_scores=scores)


# ---------------------------------------------------------------------------
# Bayes overlap matrix


def overlap_rate(gen: LabeledDataset, mix: ToyMixtureSpec) -> np.ndarray:
    """O[c][k] = fraction of class-c generated samples that the Bayes
    classifier of the known mixture assigns to class k. Ties go to the
    lowest class index; each row sums to 1."""
    c_count = mix.num_classes
    if len(gen) == 0:
        raise ConfigError("overlap needs generated samples")
    if gen.y.max() >= c_count:
        raise ConfigError("generated labels exceed mixture classes")
    log_post = np.empty((len(gen), c_count))
    for k in range(c_count):
        diff = gen.X - mix.means[k]
        s2 = mix.sigmas[k] ** 2
        log_post[:, k] = (np.log(mix.weights[k]) if mix.weights[k] > 0 else -np.inf)
        log_post[:, k] -= 0.5 * np.sum(diff * diff, axis=1) / s2
        log_post[:, k] -= gen.X.shape[1] * np.log(mix.sigmas[k])
    assign = np.argmax(log_post, axis=1)
    out = np.zeros((c_count, c_count))
    for c in range(c_count):
        rows = assign[gen.y == c]
        if len(rows) == 0:
            raise ConfigError(f"no generated samples for class {c}")
        out[c] = np.bincount(rows, minlength=c_count) / len(rows)
    return out


# ---------------------------------------------------------------------------
# Count bands


def interval_split(counts) -> np.ndarray:
    """Per-class band labels. Classes sorted by descending count (ties by
    class index): first floor(C/3) are "many", last floor(C/3) are "few",
    the rest "med". With C < 3 every class is "many"."""
    counts = np.asarray(counts)
    c = len(counts)
    labels = np.full(c, "many", dtype=object)
    if c < 3:
        return labels.astype(str)
    third = c // 3
    order = np.argsort(-counts, kind="stable")
    labels[order[:third]] = "many"
    labels[order[third:c - third]] = "med"
    labels[order[c - third:]] = "few"
    return labels.astype(str)


# ---------------------------------------------------------------------------
# Linear probe


@dataclass(frozen=True)
class ProbeResult:
    accuracy: float
    macro_precision: float
    macro_recall: float
    per_class_recall: np.ndarray
    absent_classes: tuple[int, ...]  # classes missing from the training set


def linear_probe(train_ds: LabeledDataset, test_ds: LabeledDataset,
                 num_classes: int, cfg: MetricsConfig = MetricsConfig()) -> ProbeResult:
    """Multinomial logistic regression trained on train_ds (generated
    samples), scored on test_ds (held-out real). Classes absent from the
    training set keep a zero predictor row and are flagged."""
    if len(train_ds) == 0 or len(test_ds) == 0:
        raise ConfigError("probe needs nonempty train and test sets")
    if max(int(train_ds.y.max()), int(test_ds.y.max())) >= num_classes:
        raise ConfigError("labels exceed num_classes")
    mu = train_ds.X.mean(axis=0)
    sd = train_ds.X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    xtr = (train_ds.X - mu) / sd
    xte = (test_ds.X - mu) / sd
    n, d = xtr.shape

    present = np.zeros(num_classes, dtype=bool)
    present[np.unique(train_ds.y)] = True
    absent = tuple(int(c) for c in np.flatnonzero(~present))

    rng = np.random.default_rng(cfg.probe_seed)
    w = np.zeros((d + 1, num_classes))
    w[:, present] = 0.01 * rng.standard_normal((d + 1, int(present.sum())))
    xb = np.concatenate([xtr, np.ones((n, 1))], axis=1)
    onehot = np.zeros((n, num_classes))
    onehot[np.arange(n), train_ds.y] = 1.0

    m = np.zeros_like(w)
    v = np.zeros_like(w)
    for it in range(1, cfg.probe_iters + 1):
        logits = xb @ w
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        g = xb.T @ (p - onehot) / n
        g[:, ~present] = 0.0  # absent classes stay at the zero predictor
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        mhat = m / (1 - 0.9 ** it)
        vhat = v / (1 - 0.999 ** it)
        w -= cfg.probe_lr * mhat / (np.sqrt(vhat) + 1e-8)

    xtb = np.concatenate([xte, np.ones((len(xte), 1))], axis=1)
    pred = np.argmax(xtb @ w, axis=1)
    acc = float(np.mean(pred == test_ds.y))
    per_recall = np.full(num_classes, np.nan)
    precisions = []
    recalls = []
    for c in range(num_classes):
        tp = np.count_nonzero((pred == c) & (test_ds.y == c))
        fp = np.count_nonzero((pred == c) & (test_ds.y != c))
        fn = np.count_nonzero((pred != c) & (test_ds.y == c))
        if tp + fn > 0:
            per_recall[c] = tp / (tp + fn)
            recalls.append(per_recall[c])
            precisions.append(tp / (tp + fp) if tp + fp > 0 else 0.0)
    return ProbeResult(accuracy=acc, macro_precision=float(np.mean(precisions)),
                       macro_recall=float(np.mean(recalls)),
                       per_class_recall=per_recall, absent_classes=absent)


# ---------------------------------------------------------------------------
# Full report


@dataclass
class MetricsReport:
    frechet_global: float
    frechet_per_class: np.ndarray
    knn_precision: float
    knn_recall: float
    f_scores: dict
    interval_labels: np.ndarray
    interval_frechet: dict
    overlap: np.ndarray | None = None
    probe: ProbeResult | None = None


def compute_report(real: LabeledDataset, gen: LabeledDataset,
                   cfg: MetricsConfig = MetricsConfig(),
                   mixture: ToyMixtureSpec | None = None,
                   probe_test: LabeledDataset | None = None) -> MetricsReport:
    """Full evaluation of generated samples against a real reference with
    matching class sets. The probe trains on gen and scores on probe_test
    (a held-out, ideally balanced, real set)."""
    classes_real = np.unique(real.y)
    classes_gen = np.unique(gen.y)
    if not np.array_equal(classes_real, classes_gen):
        raise ConfigError(f"class sets differ: real {classes_real.tolist()} "
                          f"vs generated {classes_gen.tolist()}")
    num_classes = int(classes_real.max()) + 1
    if len(classes_real) != num_classes:
        raise ConfigError("class labels must be contiguous from 0")

    fre_global = frechet_from_samples(real.X, gen.X)
    fre_class = np.array([frechet_from_samples(real.X[real.y == c], gen.X[gen.y == c])
                          for c in range(num_classes)])
    precision, recall = knn_precision_recall(real.X, gen.X, cfg)
    prd = prd_f_beta(real.X, gen.X, cfg.clusters_per_class * num_classes, cfg)

    counts = np.bincount(real.y, minlength=num_classes)
    bands = interval_split(counts)
    interval_frechet = {}
    for name in INTERVAL_NAMES:
        members = fre_class[bands == name]
        interval_frechet[name] = float(members.mean()) if len(members) else float("nan")

    overlap = overlap_rate(gen, mixture) if mixture is not None else None
    probe = (linear_probe(gen, probe_test, num_classes, cfg)
             if probe_test is not None else None)
    return MetricsReport(frechet_global=fre_global, frechet_per_class=fre_class,
                         knn_precision=precision, knn_recall=recall,
                         f_scores=prd.f_scores, interval_labels=bands,
                         interval_frechet=interval_frechet, overlap=overlap,
                         probe=probe)


def _beta_key(beta: float) -> str:
    if beta >= 1:
        return f"f_{beta:g}".replace(".", "_")
    return f"f_1_{1 / beta:g}".replace(".", "_")


def report_to_csv(report: MetricsReport, path) -> None:
    """Flat key,value rows; overlap goes to its own square CSV."""
    rows = [("frechet_global", report.frechet_global)]
    for c, v in enumerate(report.frechet_per_class):
        rows.append((f"frechet_class_{c}", v))
    rows.append(("knn_precision", report.knn_precision))
    rows.append(("knn_recall", report.knn_recall))
    for b, v in report.f_scores.items():
        rows.append((_beta_key(b), v))
    for c, name in enumerate(report.interval_labels):
        rows.append((f"interval_class_{c}", name))
    for name in INTERVAL_NAMES:
        rows.append((f"frechet_{name}", report.interval_frechet[name]))
    if report.probe is not None:
        rows.append(("probe_accuracy", report.probe.accuracy))
        rows.append(("probe_macro_precision", report.probe.macro_precision))
        rows.append(("probe_macro_recall", report.probe.macro_recall))
        for c, v in enumerate(report.probe.per_class_recall):
            rows.append((f"probe_recall_class_{c}", v))
        rows.append(("probe_absent_classes",
                     ";".join(str(c) for c in report.probe.absent_classes)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("key,value\n")
        for k, v in rows:
            fh.write(f"{k},{float(v)!r}\n" if isinstance(v, float) else f"{k},{v}\n")


def overlap_to_csv(overlap: np.ndarray, path) -> None:
    c = len(overlap)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("class," + ",".join(str(k) for k in range(c)) + "\n")
        for i in range(c):
            fh.write(str(i) + "," + ",".join(repr(float(v)) for v in overlap[i]) + "\n")


def report_from_csv(path) -> dict:
    """Key->value view of a report CSV (floats parsed where possible)."""
    out = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["key", "value"]:
            raise ConfigError(f"bad report header: {header!r}")
        for row in reader:
            if not row:
                continue
            key, value = row[0], ",".join(row[1:])
            try:
                out[key] = float(value)
            except ValueError:
                out[key] = value
    return out

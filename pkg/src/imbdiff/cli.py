"""Command-line experiment driver.

Subcommands wire the library modules into reproducible runs:

  train      fit a denoiser on a synthetic long-tailed dataset
  sample     draw per-class samples from a checkpoint (guidance sweep)
  landscape  two-mean toy loss surfaces written as CSV grids
  metrics    score generated samples against a reference set
  decompose  verify the class-weighted split of the denoising loss
  gradcheck  analytic vs finite-difference gradients for every loss mode

Configuration lives in a flat-sectioned INI file; see the repository README
for the full grammar. Any value can be overridden on the command line with
``--section.key value`` pairs, e.g. ``--train.steps 2000``. Every command
writes the effective config to ``<out_dir>/config.ini`` before doing any
work, so a run directory can always be replayed exactly.

Exit codes: 0 success, 1 check failure, 2 config error, 3 numeric abort.
No environment variables affect results.
"""

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from . import net
from .data import (ImbalanceSpec, LabeledDataset, ToyMixtureSpec, class_stats,
                   dataset_from_csv, dataset_to_csv, generate_gmm_dataset,
                   glyph_mixture, longtail_counts, make_ring_mixture,
                   mixture_from_csv, mixture_to_csv)
from .errors import CheckFailure, ConfigError, NumericsError
from .losses import (VARIANTS, BatchDraw, PclVariant, bind_overall,
                     bind_reweighted, bind_simple, decompose_loss_by_class)
from .metrics import MetricsConfig, compute_report, overlap_to_csv, report_to_csv
from .sampler import SamplerConfig, ancestral_sample
from .schedule import TauSchedule, default_tau_schedule, make_linear_schedule
from .toylab import (landscape, landscape_to_csv, naive_instability_tau,
                     naive_is_unbounded)
from .trainer import TrainConfig, train

_SECTIONS = {
    "run": {"out_dir"},
    "data": {"kind", "num_classes", "radius", "sigma", "n_max", "imb", "seed"},
    "schedule": {"T", "beta1", "betaT", "sigma_mode"},
    "net": {"hidden", "time_dim", "embed_dim", "activation"},
    "train": {"loss", "steps", "batch_size", "lr", "warmup", "adam_beta1",
              "adam_beta2", "adam_eps", "seed", "variant", "margin",
              "tau_kind", "tau0", "tau_temperature", "cond_dropout",
              "log_every", "ckpt_every"},
    "sampler": {"checkpoint", "classes", "num_samples", "omega", "seed"},
    "metrics": {"real", "gen", "mixture", "probe_test", "knn_k", "f_betas",
                "clusters_per_class", "kmeans_iters", "prd_angles", "prd_seed",
                "knn_max_points", "knn_seed", "probe_iters", "probe_lr",
                "probe_seed"},
    "landscape": {"w1", "m1_star", "m2_star", "sigma", "lo", "hi", "step",
                  "tau", "margin", "variants", "tau_neg_l2",
                  "tau_hinge_margin", "tau_reciprocal", "tau_exponential"},
    "decompose": {"seed", "checkpoint", "tolerance"},
    "gradcheck": {"dim", "num_classes", "hidden", "time_dim", "embed_dim",
                  "batch_size", "seed", "tolerance", "fd_step"},
}


# ---------------------------------------------------------------------------
# Config plumbing


def load_config(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return cp


def apply_overrides(cp: configparser.ConfigParser, tokens: list[str]) -> None:
    """Fold `--section.key value` pairs into the parsed config."""
    if len(tokens) % 2 != 0:
        raise ConfigError(f"override arguments must come in pairs, got {tokens}")
    for flag, value in zip(tokens[0::2], tokens[1::2]):
        if not flag.startswith("--") or "." not in flag[2:]:
            raise ConfigError(f"bad override {flag!r}; expected --section.key value")
        section, key = flag[2:].split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section {section!r} in override {flag!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)


def validate_keys(cp: configparser.ConfigParser) -> None:
    for section in cp.sections():
        known = _SECTIONS.get(section)
        if known is None:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key.lower() not in {k.lower() for k in known}:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")


def _raw(cp, section, key):
    if cp.has_section(section) and cp.has_option(section, key):
        return cp.get(section, key)
    return None


def _getstr(cp, section, key, default):
    v = _raw(cp, section, key)
    return default if v is None else v


def _getint(cp, section, key, default):
    v = _raw(cp, section, key)
    if v is None:
        return default
    try:
        return int(v)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key} must be an integer, got {v!r}") from exc


def _getfloat(cp, section, key, default):
    v = _raw(cp, section, key)
    if v is None:
        return default
    try:
        return float(v)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key} must be a number, got {v!r}") from exc


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{what} must be comma-separated integers, got {text!r}") from exc


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{what} must be comma-separated numbers, got {text!r}") from exc


def prepare_run_dir(cp, default_name: str) -> Path:
    """Create the output directory and snapshot the effective config into it
    before any computation runs."""
    run_dir = Path(_getstr(cp, "run", "out_dir", f"runs/{default_name}"))
    run_dir.mkdir(parents=True, exist_ok=True)
    with open(run_dir / "config.ini", "w", encoding="utf-8", newline="\n") as fh:
        cp.write(fh)
    return run_dir


# ---------------------------------------------------------------------------
# Section builders


def build_schedule(cp):
    return make_linear_schedule(
        beta1=_getfloat(cp, "schedule", "beta1", 1e-4),
        betaT=_getfloat(cp, "schedule", "betaT", 0.02),
        T=_getint(cp, "schedule", "T", 1000),
        sigma_mode=_getstr(cp, "schedule", "sigma_mode", "beta"),
    )


def build_mixture(cp) -> tuple[ToyMixtureSpec, np.ndarray]:
    kind = _getstr(cp, "data", "kind", "ring")
    num_classes = _getint(cp, "data", "num_classes", 4)
    sigma = _getfloat(cp, "data", "sigma", 1.0)
    if kind == "ring":
        mix = make_ring_mixture(num_classes, radius=_getfloat(cp, "data", "radius", 4.0),
                                sigma=sigma)
    elif kind == "glyphs":
        mix = glyph_mixture(num_classes, noise_sigma=sigma)
    else:
        raise ConfigError(f"data.kind must be 'ring' or 'glyphs', got {kind!r}")
    counts = longtail_counts(ImbalanceSpec(num_classes=num_classes,
                                           n_max=_getint(cp, "data", "n_max", 500),
                                           imb=_getfloat(cp, "data", "imb", 0.1)))
    return mix, counts


def build_dataset(cp) -> tuple[LabeledDataset, ToyMixtureSpec]:
    mix, counts = build_mixture(cp)
    ds = generate_gmm_dataset(mix, counts, seed=_getint(cp, "data", "seed", 0))
    return ds, mix


def build_netcfg(cp, dim: int, num_classes: int) -> net.NetworkConfig:
    hidden = tuple(_ints(_getstr(cp, "net", "hidden", "64,64"), "net.hidden"))
    return net.NetworkConfig(dim=dim, hidden=hidden,
                             time_dim=_getint(cp, "net", "time_dim", 8),
                             num_classes=num_classes,
                             embed_dim=_getint(cp, "net", "embed_dim", 8),
                             activation=_getstr(cp, "net", "activation", "silu"))


def default_warmup(steps: int) -> int:
    """5% of the run below 20k steps, the full-scale 5k above it."""
    return steps // 20 if steps < 20000 else 5000


def build_tau(cp, T: int) -> TauSchedule:
    kind = _getstr(cp, "train", "tau_kind", "exp-decay")
    tau0 = _getfloat(cp, "train", "tau0", 0.1)
    temperature = _getfloat(cp, "train", "tau_temperature", -1.0)
    if temperature <= 0:
        temperature = T / 4.0
    return TauSchedule(kind=kind, tau0=tau0, temperature=temperature)


def build_trainconfig(cp, T: int) -> TrainConfig:
    loss = _getstr(cp, "train", "loss", "plain")
    steps = _getint(cp, "train", "steps", 5000)
    warmup = _getint(cp, "train", "warmup", -1)
    if warmup < 0:
        warmup = default_warmup(steps)
    variant = PclVariant(kind=_getstr(cp, "train", "variant", "exponential"),
                         margin=_getfloat(cp, "train", "margin", 1.0))
    tau = build_tau(cp, T) if loss == "pcl" else None
    return TrainConfig(
        batch_size=_getint(cp, "train", "batch_size", 32),
        steps=steps,
        lr=_getfloat(cp, "train", "lr", 2e-4),
        warmup=warmup,
        adam_beta1=_getfloat(cp, "train", "adam_beta1", 0.9),
        adam_beta2=_getfloat(cp, "train", "adam_beta2", 0.999),
        adam_eps=_getfloat(cp, "train", "adam_eps", 1e-8),
        seed=_getint(cp, "train", "seed", 0),
        loss=loss,
        variant=variant,
        tau=tau,
        cond_dropout=_getfloat(cp, "train", "cond_dropout", 0.1),
        log_every=_getint(cp, "train", "log_every", 50),
        ckpt_every=_getint(cp, "train", "ckpt_every", 1000),
    )


def build_metricscfg(cp) -> MetricsConfig:
    f_betas = tuple(_floats(_getstr(cp, "metrics", "f_betas", "8.0,0.125"),
                            "metrics.f_betas"))
    return MetricsConfig(
        knn_k=_getint(cp, "metrics", "knn_k", 5),
        f_betas=f_betas,
        clusters_per_class=_getint(cp, "metrics", "clusters_per_class", 20),
        kmeans_iters=_getint(cp, "metrics", "kmeans_iters", 50),
        prd_angles=_getint(cp, "metrics", "prd_angles", 1001),
        prd_seed=_getint(cp, "metrics", "prd_seed", 0),
        knn_max_points=_getint(cp, "metrics", "knn_max_points", 4000),
        knn_seed=_getint(cp, "metrics", "knn_seed", 0),
        probe_iters=_getint(cp, "metrics", "probe_iters", 400),
        probe_lr=_getfloat(cp, "metrics", "probe_lr", 0.1),
        probe_seed=_getint(cp, "metrics", "probe_seed", 0),
    )


def _load_checkpoint(path_text: str):
    path = Path(path_text)
    if not path.is_file():
        raise ConfigError(f"checkpoint not found: {path}")
    return net.load_checkpoint(path)


def _write_kv_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("key,value\n")
        for k, v in rows:
            fh.write(f"{k},{float(v)!r}\n" if isinstance(v, float) else f"{k},{v}\n")


# ---------------------------------------------------------------------------
# Commands


def cmd_train(cp) -> int:
    ds, mix = build_dataset(cp)
    sched = build_schedule(cp)
    netcfg = build_netcfg(cp, dim=ds.dim, num_classes=_getint(cp, "data", "num_classes", 4))
    traincfg = build_trainconfig(cp, sched.T)
    run_dir = prepare_run_dir(cp, "train")
    dataset_to_csv(ds, run_dir / "dataset.csv")
    mixture_to_csv(mix, run_dir / "mixture.csv")
    result = train(ds, netcfg, sched, traincfg, out_dir=run_dir)
    last = result.log[-1]
    print(f"trained {traincfg.steps} steps ({traincfg.loss}); "
          f"final total loss {last.total:.6f} (ddpm {last.ddpm:.6f}, pcl {last.pcl:.6f})")
    if result.pairless_batches:
        print(f"note: {result.pairless_batches} batches had no cross-class pair")
    print(f"run dir: {run_dir}")
    print(f"last checkpoint: {result.last_checkpoint}")
    return 0


def cmd_sample(cp) -> int:
    ckpt = _raw(cp, "sampler", "checkpoint")
    if ckpt is None:
        raise ConfigError("sampler.checkpoint is required for the sample command")
    netcfg, params = _load_checkpoint(ckpt)
    sched = build_schedule(cp)
    classes_text = _getstr(cp, "sampler", "classes", "all")
    if classes_text.strip() == "all":
        classes = list(range(netcfg.num_classes))
    else:
        classes = _ints(classes_text, "sampler.classes")
    count = _getint(cp, "sampler", "num_samples", 100)
    omegas = _floats(_getstr(cp, "sampler", "omega", "0.0"), "sampler.omega")
    seed = _getint(cp, "sampler", "seed", 0)
    run_dir = prepare_run_dir(cp, "sample")

    for omega in omegas:
        tag = f"{omega:g}"
        xs, ys = [], []
        for c in classes:
            scfg = SamplerConfig(omega=omega, num_samples=count, seed=seed)
            pts = ancestral_sample(params, netcfg, sched, scfg, int(c))
            part = LabeledDataset(X=pts, y=np.full(len(pts), int(c), dtype=np.int64))
            dataset_to_csv(part, run_dir / f"samples_omega{tag}_class{c}.csv",
                           dim=netcfg.dim)
            xs.append(pts)
            ys.append(part.y)
        combined = LabeledDataset(X=np.concatenate(xs, axis=0),
                                  y=np.concatenate(ys))
        dataset_to_csv(combined, run_dir / f"samples_omega{tag}.csv", dim=netcfg.dim)
        _write_kv_csv(run_dir / f"samples_omega{tag}_meta.csv", [
            ("checkpoint", ckpt),
            ("omega", float(omega)),
            ("seed", seed),
            ("num_samples_per_class", count),
            ("classes", ";".join(str(c) for c in classes)),
            ("T", sched.T),
            ("sigma_mode", sched.sigma_mode),
        ])
        print(f"omega={tag}: wrote {len(classes)} class files "
              f"({count} samples each) to {run_dir}")
    return 0


def cmd_landscape(cp) -> int:
    w1 = _getfloat(cp, "landscape", "w1", 0.95)
    mix = ToyMixtureSpec(weights=(w1, 1.0 - w1),
                         means=[[_getfloat(cp, "landscape", "m1_star", 0.0)],
                                [_getfloat(cp, "landscape", "m2_star", 2.0)]],
                         sigmas=(_getfloat(cp, "landscape", "sigma", 1.0),) * 2)
    lo = _getfloat(cp, "landscape", "lo", -1.0)
    hi = _getfloat(cp, "landscape", "hi", 3.0)
    step = _getfloat(cp, "landscape", "step", 0.05)
    tau = _getfloat(cp, "landscape", "tau", 0.5)
    margin = _getfloat(cp, "landscape", "margin", 2.0)
    variants = [v.strip() for v in
                _getstr(cp, "landscape", "variants",
                        "hinge_margin,reciprocal,exponential").split(",") if v.strip()]
    run_dir = prepare_run_dir(cp, "landscape")

    def emit(grid, path):
        landscape_to_csv(grid, path)
        print(f"{grid.mode:>6}: argmin ({grid.argmin_m1:g}, {grid.argmin_m2:g}) "
              f"value {grid.argmin_value:.6f} -> {path}")

    emit(landscape(mix, "fit", lo, hi, step), run_dir / "landscape_fit.csv")
    emit(landscape(mix, "naive", lo, hi, step, tau=tau), run_dir / "landscape_naive.csv")
    if naive_is_unbounded(mix, tau):
        print(f"  note: naive objective is unbounded below at tau={tau:g} "
              f"(instability threshold {naive_instability_tau(mix):.6g}); "
              f"its grid argmin sits on the window boundary")
    for kind in variants:
        if kind not in VARIANTS:
            raise ConfigError(f"landscape.variants entry {kind!r} not in {VARIANTS}")
        vtau = _getfloat(cp, "landscape", f"tau_{kind}", tau)
        grid = landscape(mix, "hinge", lo, hi, step, tau=vtau,
                         variant=PclVariant(kind=kind, margin=margin))
        emit(grid, run_dir / f"landscape_hinge_{kind}.csv")
    return 0


def _require_file(path, key):
    if not Path(path).is_file():
        raise ConfigError(f"{key}: file not found: {path}")
    return path


def cmd_metrics(cp) -> int:
    real_path = _raw(cp, "metrics", "real")
    gen_path = _raw(cp, "metrics", "gen")
    if real_path is None or gen_path is None:
        raise ConfigError("metrics.real and metrics.gen are required for the metrics command")
    real = dataset_from_csv(_require_file(real_path, "metrics.real"))
    gen = dataset_from_csv(_require_file(gen_path, "metrics.gen"))
    mixture = None
    mix_path = _raw(cp, "metrics", "mixture")
    if mix_path is not None:
        mixture = mixture_from_csv(_require_file(mix_path, "metrics.mixture"))
    probe_test = None
    probe_path = _raw(cp, "metrics", "probe_test")
    if probe_path is not None:
        probe_test = dataset_from_csv(_require_file(probe_path, "metrics.probe_test"))
    mcfg = build_metricscfg(cp)
    run_dir = prepare_run_dir(cp, "metrics")

    report = compute_report(real, gen, mcfg, mixture=mixture, probe_test=probe_test)
    report_to_csv(report, run_dir / "report.csv")
    print(f"frechet_global {report.frechet_global:.6f}")
    print(f"knn precision {report.knn_precision:.4f} recall {report.knn_recall:.4f}")
    for beta, score in report.f_scores.items():
        print(f"prd F_{beta:g} {score:.4f}")
    for name, val in report.interval_frechet.items():
        print(f"frechet[{name}] {val:.6f}")
    if report.overlap is not None:
        overlap_to_csv(report.overlap, run_dir / "overlap.csv")
        off_diag = report.overlap - np.diag(np.diag(report.overlap))
        print(f"overlap: max off-diagonal {off_diag.max():.4f}")
    if report.probe is not None:
        print(f"probe accuracy {report.probe.accuracy:.4f}")
    print(f"report: {run_dir / 'report.csv'}")
    return 0


def cmd_decompose(cp) -> int:
    ds, _ = build_dataset(cp)
    sched = build_schedule(cp)
    seed = _getint(cp, "decompose", "seed", 0)
    tolerance = _getfloat(cp, "decompose", "tolerance", 1e-12)
    ckpt = _raw(cp, "decompose", "checkpoint")
    if ckpt is not None:
        netcfg, params = _load_checkpoint(ckpt)
        if netcfg.dim != ds.dim:
            raise ConfigError(f"checkpoint dim {netcfg.dim} != dataset dim {ds.dim}")
    else:
        netcfg = build_netcfg(cp, dim=ds.dim,
                              num_classes=_getint(cp, "data", "num_classes", 4))
        params = net.init_params(netcfg, seed)
    rng = np.random.default_rng(seed)
    t_assign = rng.integers(1, sched.T + 1, size=len(ds))
    eps_assign = rng.standard_normal(ds.X.shape)
    run_dir = prepare_run_dir(cp, "decompose")

    dec = decompose_loss_by_class(params, netcfg, ds, sched, t_assign, eps_assign)
    rows = [("global_loss", dec.global_loss),
            ("weighted_sum", dec.weighted_sum),
            ("rel_error", dec.rel_error)]
    for c, (w, l) in enumerate(zip(dec.weights, dec.per_class)):
        rows.append((f"weight_class_{c}", float(w)))
        rows.append((f"loss_class_{c}", float(l)))
    _write_kv_csv(run_dir / "decompose.csv", rows)
    print(f"global mean loss   = {dec.global_loss!r}")
    print(f"class-weighted sum = {dec.weighted_sum!r}")
    print(f"relative error     = {dec.rel_error:.3e}")
    if dec.rel_error > tolerance:
        raise CheckFailure(f"decomposition identity violated: rel error "
                           f"{dec.rel_error:.3e} > {tolerance:g}")
    return 0


def cmd_gradcheck(cp) -> int:
    dim = _getint(cp, "gradcheck", "dim", 2)
    num_classes = _getint(cp, "gradcheck", "num_classes", 3)
    hidden = tuple(_ints(_getstr(cp, "gradcheck", "hidden", "6"), "gradcheck.hidden"))
    netcfg = net.NetworkConfig(dim=dim, hidden=hidden,
                               time_dim=_getint(cp, "gradcheck", "time_dim", 4),
                               num_classes=num_classes,
                               embed_dim=_getint(cp, "gradcheck", "embed_dim", 3))
    if netcfg.param_count() > 1000:
        raise ConfigError(f"gradient audit nets are capped at 1000 parameters, "
                          f"got {netcfg.param_count()}")
    batch_size = _getint(cp, "gradcheck", "batch_size", 4)
    seed = _getint(cp, "gradcheck", "seed", 0)
    tolerance = _getfloat(cp, "gradcheck", "tolerance", 1e-4)
    h = _getfloat(cp, "gradcheck", "fd_step", 1e-5)
    sched = make_linear_schedule(1e-4, 0.02, T=50, sigma_mode="beta")
    run_dir = prepare_run_dir(cp, "gradcheck")

    # Crafted batch: round-robin classes guarantee cross-class pairs and the
    # final row exercises the unconditional (null-token) path.
    rng = np.random.default_rng(seed)
    c = np.arange(batch_size, dtype=np.int64) % num_classes
    batch = BatchDraw(x0=rng.standard_normal((batch_size, dim)),
                      c=c,
                      t=rng.integers(1, sched.T + 1, size=batch_size),
                      eps=rng.standard_normal((batch_size, dim)),
                      drop=np.arange(batch_size) == batch_size - 1)
    stats = class_stats(LabeledDataset(X=batch.x0, y=c), num_classes=num_classes)
    params = net.init_params(netcfg, seed)
    tau = default_tau_schedule(sched.T)

    modes = [("plain", bind_simple(batch, sched, netcfg.null_class)),
             ("reweighted", bind_reweighted(batch, sched, stats, netcfg.null_class))]
    for kind in VARIANTS:
        modes.append((f"pcl_{kind}",
                      bind_overall(batch, sched, tau, PclVariant(kind=kind),
                                   netcfg.null_class)))

    rows, failed = [], []
    worst = 0.0
    for name, bound in modes:
        _, grad, _ = net.evaluate_bound(params, netcfg, bound)
        fd = np.empty_like(params)
        for i in range(len(params)):
            up = params.copy()
            up[i] += h
            dn = params.copy()
            dn[i] -= h
            fd[i] = (net.evaluate_bound(up, netcfg, bound)[0]
                     - net.evaluate_bound(dn, netcfg, bound)[0]) / (2.0 * h)
        err = float(np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-12))
        ok = err <= tolerance
        worst = max(worst, err)
        rows.append((name, err))
        if not ok:
            failed.append(name)
        print(f"{name:>16}: rel error {err:.3e} {'PASS' if ok else 'FAIL'}")
    _write_kv_csv(run_dir / "gradcheck.csv",
                  rows + [("max_rel_error", worst), ("tolerance", tolerance)])
    print(f"max relative error {worst:.3e} over {len(modes)} modes "
          f"({netcfg.param_count()} parameters)")
    if failed:
        raise CheckFailure(f"gradient audit failed for {', '.join(failed)}: "
                           f"max rel error {worst:.3e} > {tolerance:g}")
    return 0


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imbdiff",
        description="Train, sample and analyze class-conditional diffusion "
                    "models on long-tailed toy data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in [
        ("train", cmd_train, "train a denoiser per the config file"),
        ("sample", cmd_sample, "draw per-class samples from a checkpoint"),
        ("landscape", cmd_landscape, "emit toy loss-surface CSV grids"),
        ("metrics", cmd_metrics, "score generated samples against a reference"),
        ("decompose", cmd_decompose, "check the class-weighted loss split"),
        ("gradcheck", cmd_gradcheck, "audit gradients against finite differences"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="path to the INI config file")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        cp = load_config(args.config)
        apply_overrides(cp, extra)
        validate_keys(cp)
        return args.func(cp)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

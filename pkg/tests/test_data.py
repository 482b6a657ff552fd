import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imbdiff.data import (GLYPH_DIM, ImbalanceSpec, LabeledDataset, ToyMixtureSpec,
                          class_stats, dataset_from_csv, dataset_to_csv,
                          generate_gmm_dataset, glyph_mixture, glyph_templates,
                          longtail_counts, make_ring_mixture, mixture_from_counts,
                          mixture_from_csv, mixture_to_csv, resample_uniform,
                          write_pgm)
from imbdiff.errors import ConfigError

# Count profiles recomputed with 60-digit arithmetic.
TEN_CLASS_PROFILE = [5000, 2997, 1797, 1077, 646, 387, 232, 139, 83, 50]


def test_two_class_profile():
    spec = ImbalanceSpec(num_classes=2, n_max=5000, imb=0.01)
    assert longtail_counts(spec).tolist() == [5000, 50]


def test_ten_class_profile_matches_oracle():
    spec = ImbalanceSpec(num_classes=10, n_max=5000, imb=0.01)
    assert longtail_counts(spec).tolist() == TEN_CLASS_PROFILE


def test_balanced_when_imb_is_one():
    spec = ImbalanceSpec(num_classes=5, n_max=123, imb=1.0)
    assert longtail_counts(spec).tolist() == [123] * 5


def test_counts_clamped_to_one():
    spec = ImbalanceSpec(num_classes=4, n_max=10, imb=0.0001)
    counts = longtail_counts(spec)
    assert counts[0] == 10 and counts[-1] == 1
    assert np.all(counts >= 1)


def test_single_class():
    assert longtail_counts(ImbalanceSpec(1, 42, 0.5)).tolist() == [42]


@settings(max_examples=60, deadline=None)
@given(c=st.integers(1, 30), n_max=st.integers(1, 10000),
       imb=st.floats(1e-4, 1.0))
def test_count_invariants(c, n_max, imb):
    counts = longtail_counts(ImbalanceSpec(c, n_max, imb))
    assert counts[0] == n_max
    assert np.all(np.diff(counts) <= 0)
    assert np.all(counts >= 1)


@pytest.mark.parametrize("kw", [dict(num_classes=0, n_max=10, imb=0.5),
                                dict(num_classes=2, n_max=0, imb=0.5),
                                dict(num_classes=2, n_max=10, imb=0.0),
                                dict(num_classes=2, n_max=10, imb=1.5)])
def test_bad_imbalance_spec(kw):
    with pytest.raises(ConfigError):
        ImbalanceSpec(**kw)


# --- mixtures and sampling -------------------------------------------------


def two_gaussians():
    return ToyMixtureSpec(weights=[0.5, 0.5], means=[[0.0, 0.0], [4.0, 0.0]],
                          sigmas=[1.0, 1.0])


def test_mixture_validation():
    with pytest.raises(ConfigError):
        ToyMixtureSpec(weights=[0.6, 0.6], means=[[0.0], [1.0]], sigmas=[1.0, 1.0])
    with pytest.raises(ConfigError):
        ToyMixtureSpec(weights=[0.5, 0.5], means=[[0.0], [1.0]], sigmas=[1.0, 0.0])
    with pytest.raises(ConfigError):
        ToyMixtureSpec(weights=[1.0], means=[[0.0], [1.0]], sigmas=[1.0])


def test_generate_gmm_counts_and_stats():
    ds = generate_gmm_dataset(two_gaussians(), [300, 20], seed=5)
    assert len(ds) == 320 and ds.dim == 2
    stats = class_stats(ds)
    assert stats.counts.tolist() == [300, 20]
    assert stats.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_generate_gmm_component_means():
    ds = generate_gmm_dataset(two_gaussians(), [20000, 20000], seed=9)
    m0 = ds.X[ds.y == 0].mean(axis=0)
    m1 = ds.X[ds.y == 1].mean(axis=0)
    assert np.allclose(m0, [0, 0], atol=0.05)
    assert np.allclose(m1, [4, 0], atol=0.05)


def test_generate_gmm_deterministic():
    a = generate_gmm_dataset(two_gaussians(), [5, 5], seed=1)
    b = generate_gmm_dataset(two_gaussians(), [5, 5], seed=1)
    c = generate_gmm_dataset(two_gaussians(), [5, 5], seed=2)
    assert np.array_equal(a.X, b.X)
    assert not np.array_equal(a.X, c.X)


def test_ring_mixture_geometry():
    mix = make_ring_mixture(4, radius=2.0, sigma=0.5)
    assert np.allclose(np.linalg.norm(mix.means, axis=1), 2.0)
    assert mix.dim == 2 and mix.num_classes == 4


def test_mixture_from_counts_weights():
    mix = mixture_from_counts([[0.0], [1.0]], [1.0, 1.0], [30, 10])
    assert np.allclose(mix.weights, [0.75, 0.25])


def test_resample_uniform_balances_classes():
    ds = generate_gmm_dataset(two_gaussians(), [1000, 30], seed=2)
    res = resample_uniform(ds, 4000, seed=3)
    counts = np.bincount(res.y, minlength=2)
    # binomial n=4000 p=0.5: five sigma is ~158
    assert abs(counts[0] - 2000) < 160
    # every resampled row exists in the source
    src = {tuple(row) for row in ds.X}
    assert all(tuple(row) in src for row in res.X[:100])


def test_resample_deterministic():
    ds = generate_gmm_dataset(two_gaussians(), [50, 10], seed=2)
    a = resample_uniform(ds, 64, seed=11)
    b = resample_uniform(ds, 64, seed=11)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)


def test_dataset_validation():
    with pytest.raises(ConfigError):
        LabeledDataset(X=np.zeros((3, 2)), y=np.zeros(2, dtype=int))
    with pytest.raises(ConfigError):
        LabeledDataset(X=np.zeros((2, 2)), y=np.array([0, -1]))
    with pytest.raises(ConfigError):
        class_stats(LabeledDataset(X=np.zeros((0, 2)), y=np.zeros(0, dtype=int)))


# --- CSV round trips -------------------------------------------------------


def test_dataset_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    ds = LabeledDataset(X=rng.standard_normal((40, 3)) * 1e-3, y=rng.integers(0, 4, 40))
    path = tmp_path / "ds.csv"
    dataset_to_csv(ds, path)
    back = dataset_from_csv(path)
    assert np.array_equal(back.X, ds.X)  # repr floats round-trip bitwise
    assert np.array_equal(back.y, ds.y)


def test_dataset_csv_header(tmp_path):
    ds = LabeledDataset(X=np.array([[1.0, 2.0]]), y=np.array([0]))
    path = tmp_path / "ds.csv"
    dataset_to_csv(ds, path)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "dim,label,x0,x1"
    assert "\r" not in text


def test_empty_dataset_csv(tmp_path):
    ds = LabeledDataset(X=np.zeros((0, 2)), y=np.zeros(0, dtype=int))
    path = tmp_path / "empty.csv"
    dataset_to_csv(ds, path, dim=2)
    assert path.read_text() == "dim,label,x0,x1\n"
    back = dataset_from_csv(path)
    assert len(back) == 0 and back.dim == 2


@pytest.mark.parametrize("text", [
    "",                                 # no header
    "a,b,c\n",                          # wrong header
    "dim,label,x0\n1,0,1.0,2.0\n",      # too many fields
    "dim,label,x0,x1\n3,0,1.0,2.0\n",   # dim field disagrees with width
])
def test_malformed_dataset_csv_rejected(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        dataset_from_csv(path)


def test_mixture_csv_round_trip(tmp_path):
    mix = make_ring_mixture(3, radius=1.5, sigma=0.7)
    path = tmp_path / "mix.csv"
    mixture_to_csv(mix, path)
    back = mixture_from_csv(path)
    assert np.array_equal(back.means, mix.means)
    assert np.array_equal(back.weights, mix.weights)
    assert np.array_equal(back.sigmas, mix.sigmas)


# --- glyphs ----------------------------------------------------------------


def test_glyph_templates_shape_and_values():
    t = glyph_templates(10)
    assert t.shape == (10, GLYPH_DIM)
    assert set(np.unique(t)) == {0.0, 1.0}
    # all templates pairwise distinct
    for i in range(10):
        for j in range(i + 1, 10):
            assert np.sum((t[i] - t[j]) ** 2) > 0


def test_glyph_mixture_is_gmm():
    mix = glyph_mixture(4, noise_sigma=0.3)
    ds = generate_gmm_dataset(mix, [50, 50, 50, 50], seed=0)
    assert ds.dim == GLYPH_DIM
    # noisy rasters stay near their template
    d0 = np.linalg.norm(ds.X[ds.y == 0] - glyph_templates(4)[0], axis=1).mean()
    assert d0 < 0.3 * np.sqrt(GLYPH_DIM) * 1.5


def test_glyph_class_limit():
    with pytest.raises(ConfigError):
        glyph_templates(11)


def test_write_pgm(tmp_path):
    vec = np.linspace(-0.2, 1.2, GLYPH_DIM)
    path = tmp_path / "img.pgm"
    write_pgm(path, vec)
    lines = path.read_text().splitlines()
    assert lines[0] == "P2" and lines[1] == "8 8" and lines[2] == "255"
    vals = [int(v) for line in lines[3:] for v in line.split()]
    assert len(vals) == GLYPH_DIM
    assert min(vals) == 0 and max(vals) == 255  # clipped ends

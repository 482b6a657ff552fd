import numpy as np
import pytest

from imbdiff import net
from imbdiff.errors import ConfigError, NumericsError
from imbdiff.net import NetworkConfig

from oracles import fd_gradient, rel_err

CFG = NetworkConfig(dim=2, hidden=(16,), time_dim=4, num_classes=2, embed_dim=4)


def test_param_count_by_hand():
    # emb (3,4)=12; layer1 (10,16)+16=176; layer2 (16,2)+2=34
    assert CFG.param_count() == 12 + 176 + 34 == 222


def test_split_gives_views():
    params = np.zeros(CFG.param_count())
    emb, layers = net.split_params(CFG, params)
    emb[0, 0] = 3.5
    layers[0][0][1, 2] = -1.25
    assert params[0] == 3.5
    assert np.count_nonzero(params) == 2


def test_init_deterministic():
    a = net.init_params(CFG, 12)
    b = net.init_params(CFG, 12)
    c = net.init_params(CFG, 13)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_zero_params_give_zero_output():
    params = np.zeros(CFG.param_count())
    out = net.predict_noise(params, CFG, np.array([1.0, -1.0]), 10, 1)
    assert np.array_equal(out, np.zeros(2))


def test_predict_noise_single_vs_batch():
    params = net.init_params(CFG, 1)
    x = np.array([0.3, -0.7])
    single = net.predict_noise(params, CFG, x, 5, 0)
    batch = net.predict_noise(params, CFG, x[None, :], np.array([5]), np.array([0]))
    assert np.array_equal(single, batch[0])


def test_null_token_equals_class_with_identical_embedding():
    params = net.init_params(CFG, 3)
    emb, _ = net.split_params(CFG, params)
    emb[CFG.null_class] = emb[1]
    x = np.array([0.2, 0.4])
    cond = net.predict_noise(params, CFG, x, 7, 1)
    uncond = net.predict_noise(params, CFG, x, 7, CFG.null_class)
    assert np.array_equal(cond, uncond)


def test_time_features_shape_and_range():
    f = net.time_features(np.array([1, 10, 500]), 6)
    assert f.shape == (3, 6)
    assert np.all(np.abs(f) <= 1.0)
    assert not np.array_equal(f[0], f[1])


def test_odd_time_dim():
    f = net.time_features(np.array([3]), 5)
    assert f.shape == (1, 5)


class _LinearProbeBound:
    """loss = <R, out> so dLoss/dout = R; exposes the raw backward pass."""

    def __init__(self, x, t, c, r):
        self.x, self.t, self.c, self.r = x, t, c, r

    def finish(self, out):
        class Res:
            pass

        res = Res()
        res.value = float(np.sum(self.r * out))
        res.d_out = self.r
        return res


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(8)
    cfg = NetworkConfig(dim=3, hidden=(8, 6), time_dim=4, num_classes=3, embed_dim=5)
    params = net.init_params(cfg, 4)
    x = rng.standard_normal((5, 3))
    t = rng.integers(1, 100, size=5)
    c = rng.integers(0, 4, size=5)  # includes the null token
    r = rng.standard_normal((5, 3))
    bound = _LinearProbeBound(x, t, c, r)
    val, grad = net.loss_and_grad(params, cfg, bound)
    fd = fd_gradient(lambda p: net.loss_and_grad(p, cfg, bound)[0], params)
    assert rel_err(grad, fd) < 1e-8


def test_unused_embedding_rows_get_zero_gradient():
    rng = np.random.default_rng(2)
    params = net.init_params(CFG, 2)
    x = rng.standard_normal((4, 2))
    bound = _LinearProbeBound(x, np.full(4, 3), np.zeros(4, dtype=int),
                              rng.standard_normal((4, 2)))
    _, grad = net.loss_and_grad(params, CFG, bound)
    gemb, _ = net.split_params(CFG, grad)
    assert np.count_nonzero(gemb[0]) > 0
    assert np.array_equal(gemb[1], np.zeros(CFG.embed_dim))
    assert np.array_equal(gemb[2], np.zeros(CFG.embed_dim))


def test_predict_noise_validation():
    params = net.init_params(CFG, 0)
    with pytest.raises(ConfigError):
        net.predict_noise(params, CFG, np.zeros(3), 1, 0)  # wrong dim
    with pytest.raises(ConfigError):
        net.predict_noise(params, CFG, np.zeros(2), 0, 0)  # t < 1
    with pytest.raises(ConfigError):
        net.predict_noise(params, CFG, np.zeros(2), 1, 3)  # class past null
    with pytest.raises(ConfigError):
        net.predict_noise(params, CFG, np.array([np.nan, 0.0]), 1, 0)
    with pytest.raises(ConfigError):
        net.predict_noise(params, CFG, np.zeros((2, 2)), np.array([1.5, 2.0]),
                          np.array([0, 0]))  # non-integer t


def test_non_finite_params_raise_numerics_error():
    params = net.init_params(CFG, 0)
    params[50] = np.inf
    with pytest.raises(NumericsError):
        net.predict_noise(params, CFG, np.zeros(2), 1, 0)


def test_bad_config_rejected():
    with pytest.raises(ConfigError):
        NetworkConfig(dim=0, hidden=(4,), time_dim=2, num_classes=1, embed_dim=2)
    with pytest.raises(ConfigError):
        NetworkConfig(dim=2, hidden=(0,), time_dim=2, num_classes=1, embed_dim=2)
    with pytest.raises(ConfigError):
        NetworkConfig(dim=2, hidden=(4,), time_dim=2, num_classes=1, embed_dim=2,
                      activation="relu6")


def test_wrong_param_vector_length_rejected():
    with pytest.raises(ConfigError):
        net.split_params(CFG, np.zeros(10))


# --- checkpoints -----------------------------------------------------------


def test_checkpoint_round_trip(tmp_path):
    params = net.init_params(CFG, 5)
    path = tmp_path / "ck.bin"
    net.save_checkpoint(path, CFG, params)
    cfg2, params2 = net.load_checkpoint(path)
    assert cfg2 == CFG
    assert np.array_equal(params2, params)


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "ck.bin"
    path.write_bytes(b"NOTACKPT\n{}\n")
    with pytest.raises(ConfigError):
        net.load_checkpoint(path)


def test_checkpoint_truncated_payload(tmp_path):
    params = net.init_params(CFG, 5)
    path = tmp_path / "ck.bin"
    net.save_checkpoint(path, CFG, params)
    blob = path.read_bytes()
    path.write_bytes(blob[:-16])
    with pytest.raises(ConfigError):
        net.load_checkpoint(path)

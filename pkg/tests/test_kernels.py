import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotword import ParamError, ShapeError
from hotword.kernels import (
    batchnorm_inf,
    conv2d,
    dense,
    depthwise_conv2d,
    global_avg_pool,
    l2_normalize,
    max_pool2d,
    same_padding,
    sigmoid,
    swish,
)

import oracles


def rel_err(got, want):
    scale = max(np.max(np.abs(want)), 1.0)
    return np.max(np.abs(got.astype(np.float64) - want)) / scale


class TestConv2d:
    def test_1x1_identity(self):
        x = np.random.default_rng(0).normal(size=(5, 4, 3)).astype(np.float32)
        kernel = np.eye(3, dtype=np.float32).reshape(1, 1, 3, 3)
        np.testing.assert_allclose(conv2d(x, kernel, 1, "valid"), x, atol=1e-6)

    def test_3x3_ones_valid(self):
        x = np.ones((3, 3, 1), dtype=np.float32)
        kernel = np.ones((3, 3, 1, 1), dtype=np.float32)
        out = conv2d(x, kernel, 1, "valid")
        assert out.shape == (1, 1, 1)
        assert out[0, 0, 0] == 9.0

    def test_against_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(7, 5, 3)).astype(np.float32)
        kernel = rng.normal(size=(3, 3, 3, 4)).astype(np.float32)
        got = conv2d(x, kernel, 2, "same")
        want = oracles.conv2d_naive(x, kernel, 2, "same")
        assert got.shape == want.shape
        assert rel_err(got, want) <= 1e-5

    def test_channel_mismatch(self):
        with pytest.raises(ShapeError):
            conv2d(np.zeros((4, 4, 2), np.float32), np.zeros((3, 3, 3, 1), np.float32))

    def test_bad_hyperparams(self):
        x = np.zeros((4, 4, 1), np.float32)
        with pytest.raises(ParamError):
            conv2d(x, np.zeros((2, 2, 1, 1), np.float32))
        with pytest.raises(ParamError):
            conv2d(x, np.zeros((3, 3, 1, 1), np.float32), stride=4)
        with pytest.raises(ParamError):
            conv2d(x, np.zeros((3, 3, 1, 1), np.float32), padding="full")


class TestDepthwise:
    def test_1x1_identity(self):
        x = np.random.default_rng(2).normal(size=(4, 4, 5)).astype(np.float32)
        np.testing.assert_allclose(
            depthwise_conv2d(x, np.ones((1, 1, 5), np.float32), 1, "valid"), x, atol=1e-6
        )

    def test_ones_kernel_sums_window(self):
        x = np.ones((3, 3, 2), dtype=np.float32)
        out = depthwise_conv2d(x, np.ones((3, 3, 2), np.float32), 1, "valid")
        np.testing.assert_array_equal(out, np.full((1, 1, 2), 9.0, np.float32))

    def test_against_oracle(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(6, 7, 4)).astype(np.float32)
        kernel = rng.normal(size=(5, 5, 4)).astype(np.float32)
        got = depthwise_conv2d(x, kernel, 1, "same")
        want = oracles.depthwise_naive(x, kernel, 1, "same")
        assert rel_err(got, want) <= 1e-5


class TestBatchNorm:
    def test_identity_params(self):
        x = np.random.default_rng(4).normal(size=(3, 3, 2)).astype(np.float32)
        ones, zeros = np.ones(2, np.float32), np.zeros(2, np.float32)
        out = batchnorm_inf(x, ones, zeros, zeros, ones - np.float32(1e-3))
        np.testing.assert_allclose(out, x, atol=1e-5)

    def test_x_equals_mean_gives_beta(self):
        x = np.full((2, 2, 1), 3.0, np.float32)
        out = batchnorm_inf(x, np.array([5.0], np.float32), np.array([7.0], np.float32),
                            np.array([3.0], np.float32), np.array([2.0], np.float32))
        np.testing.assert_allclose(out, 7.0, atol=1e-6)

    def test_direct_evaluation(self):
        out = batchnorm_inf(
            np.array([[[5.0]]], np.float32),
            np.array([2.0], np.float32),
            np.array([1.0], np.float32),
            np.array([3.0], np.float32),
            np.array([4.0 - 1e-3], np.float32),
        )
        assert out[0, 0, 0] == pytest.approx(3.0, abs=1e-6)


class TestActivations:
    def test_fixed_points(self):
        assert swish(np.zeros(1, np.float32))[0] == 0.0
        assert sigmoid(np.zeros(1, np.float32))[0] == 0.5
        assert swish(np.ones(1, np.float32))[0] == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-6)

    def test_extremes_stay_finite(self):
        x = np.array([-100.0, 100.0], np.float32)
        assert np.isfinite(sigmoid(x)).all()
        assert np.isfinite(swish(x)).all()
        assert sigmoid(x)[0] == pytest.approx(0.0, abs=1e-30)
        assert sigmoid(x)[1] == pytest.approx(1.0, abs=1e-7)


class TestPools:
    def test_constant_passthrough(self):
        x = np.full((4, 4, 3), 2.5, np.float32)
        np.testing.assert_allclose(global_avg_pool(x), 2.5, atol=1e-7)
        np.testing.assert_allclose(max_pool2d(x), 2.5, atol=1e-7)

    def test_max_of_quad(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]], np.float32).reshape(2, 2, 1)
        assert max_pool2d(x)[0, 0, 0] == 4.0

    def test_odd_size_floor_semantics(self):
        x = np.random.default_rng(5).normal(size=(7, 4, 2)).astype(np.float32)
        got = max_pool2d(x, 2, 2)
        want = oracles.max_pool_naive(x, 2, 2)
        assert got.shape == (3, 2, 2)
        assert rel_err(got, want) <= 1e-6

    def test_gap_against_oracle(self):
        x = np.random.default_rng(6).normal(size=(5, 9, 3)).astype(np.float32)
        assert rel_err(global_avg_pool(x), oracles.global_avg_pool_naive(x)) <= 1e-6


class TestDense:
    def test_identity(self):
        x = np.arange(4, dtype=np.float32)
        np.testing.assert_allclose(dense(x, np.eye(4, dtype=np.float32), np.zeros(4, np.float32)), x)

    def test_zero_weights_give_bias(self):
        bias = np.array([1.0, -2.0], np.float32)
        np.testing.assert_array_equal(dense(np.ones(3, np.float32), np.zeros((3, 2), np.float32), bias), bias)

    def test_against_oracle(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=40).astype(np.float32)
        w = rng.normal(size=(40, 9)).astype(np.float32)
        b = rng.normal(size=9).astype(np.float32)
        assert rel_err(dense(x, w, b), oracles.dense_naive(x, w, b)) <= 1e-6


class TestL2Normalize:
    def test_three_four_five(self):
        np.testing.assert_allclose(
            l2_normalize(np.array([3.0, 4.0], np.float32)), [0.6, 0.8], atol=1e-7
        )

    def test_unit_vector_unchanged(self):
        v = np.array([1.0, 0.0, 0.0], np.float32)
        np.testing.assert_allclose(l2_normalize(v), v, atol=1e-7)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_output_norm_one_and_idempotent(self, seed):
        v = np.random.default_rng(seed).normal(size=16).astype(np.float32)
        out = l2_normalize(v)
        assert abs(float(np.linalg.norm(out.astype(np.float64))) - 1.0) <= 1e-6
        np.testing.assert_allclose(l2_normalize(out), out, atol=1e-6)


class TestSamePadding:
    def test_output_height_is_ceil(self):
        for size in range(1, 101):
            for stride in (1, 2):
                for kernel in (1, 3, 5):
                    begin, end = same_padding(size, kernel, stride)
                    out = (size + begin + end - kernel) // stride + 1
                    assert out == math.ceil(size / stride)

    def test_tie_pads_more_at_end(self):
        begin, end = same_padding(4, 2, 1)  # total padding 1
        assert (begin, end) == (0, 1)


class TestRandomizedOracleSuite:
    """Seeded random shapes for every kernel against the naive loops."""

    @pytest.mark.parametrize("case", range(30))
    def test_conv2d_random(self, case):
        rng = np.random.default_rng(100 + case)
        k = int(rng.choice([1, 3, 5]))
        stride = int(rng.choice([1, 2, 3]))
        padding = str(rng.choice(["same", "valid"]))
        h = int(rng.integers(k, k + 9))
        w = int(rng.integers(k, k + 9))
        cin, cout = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        x = rng.normal(size=(h, w, cin)).astype(np.float32)
        kernel = rng.normal(size=(k, k, cin, cout)).astype(np.float32)
        got = conv2d(x, kernel, stride, padding)
        want = oracles.conv2d_naive(x, kernel, stride, padding)
        assert got.shape == want.shape
        assert rel_err(got, want) <= 1e-5

    @pytest.mark.parametrize("case", range(30))
    def test_depthwise_random(self, case):
        rng = np.random.default_rng(200 + case)
        k = int(rng.choice([1, 3, 5]))
        stride = int(rng.choice([1, 2, 3]))
        padding = str(rng.choice(["same", "valid"]))
        h = int(rng.integers(k, k + 9))
        w = int(rng.integers(k, k + 9))
        channels = int(rng.integers(1, 6))
        x = rng.normal(size=(h, w, channels)).astype(np.float32)
        kernel = rng.normal(size=(k, k, channels)).astype(np.float32)
        got = depthwise_conv2d(x, kernel, stride, padding)
        want = oracles.depthwise_naive(x, kernel, stride, padding)
        assert got.shape == want.shape
        assert rel_err(got, want) <= 1e-5

    @pytest.mark.parametrize("case", range(25))
    def test_dense_random(self, case):
        rng = np.random.default_rng(300 + case)
        n, m = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        x = rng.normal(size=n).astype(np.float32)
        w = rng.normal(size=(n, m)).astype(np.float32)
        b = rng.normal(size=m).astype(np.float32)
        assert rel_err(dense(x, w, b), oracles.dense_naive(x, w, b)) <= 1e-5

    @pytest.mark.parametrize("case", range(25))
    def test_pools_random(self, case):
        rng = np.random.default_rng(400 + case)
        h, w = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        channels = int(rng.integers(1, 5))
        x = rng.normal(size=(h, w, channels)).astype(np.float32)
        assert rel_err(max_pool2d(x, 2, 2), oracles.max_pool_naive(x, 2, 2)) <= 1e-5
        assert rel_err(global_avg_pool(x), oracles.global_avg_pool_naive(x)) <= 1e-5

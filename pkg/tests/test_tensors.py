import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from winoconv.tensors import FP16_MAX, Precision, Tensor4, fill_uniform, max_abs_error, quantize_fp16


def splitmix64_reference(seed, count):
    """Independent pure-int SplitMix64, used as an oracle for the
    vectorized implementation."""
    mask = (1 << 64) - 1
    out = []
    state = seed & mask
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        z = z ^ (z >> 31)
        out.append((z >> 11) * 2.0**-53)
    return out


class TestTensor4:
    def test_shape_and_size(self):
        t = Tensor4.zeros((2, 3, 4, 5))
        assert t.shape == (2, 3, 4, 5)
        assert t.size == 120

    def test_requires_four_axes(self):
        with pytest.raises(ValueError):
            Tensor4(np.zeros((2, 2), dtype=np.float32), Precision.FP32)

    def test_dtype_must_match_precision(self):
        with pytest.raises(ValueError):
            Tensor4(np.zeros((1, 1, 1, 1), dtype=np.float64), Precision.FP32)

    def test_immutable_storage(self):
        t = Tensor4.zeros((1, 1, 2, 2))
        with pytest.raises(ValueError):
            t.data[0, 0, 0, 0] = 1.0

    def test_from_array_copies(self):
        src = np.ones((1, 1, 2, 2), dtype=np.float32)
        t = Tensor4.from_array(src)
        src[0, 0, 0, 0] = 5.0
        assert t[0, 0, 0, 0] == 1.0

    def test_indexing_in_bounds(self):
        t = Tensor4.from_array(np.arange(8).reshape(1, 2, 2, 2))
        assert t[0, 1, 1, 1] == 7.0

    def test_indexing_rejects_out_of_range(self):
        t = Tensor4.zeros((1, 1, 2, 2))
        with pytest.raises(IndexError):
            t[0, 0, 2, 0]

    def test_indexing_rejects_negative(self):
        # No silent wraparound: -1 is a contract violation, not "last".
        t = Tensor4.zeros((1, 1, 2, 2))
        with pytest.raises(IndexError):
            t[0, 0, -1, 0]


class TestFillUniform:
    def test_deterministic_for_seed_and_shape(self):
        t = Tensor4.zeros((2, 3, 4, 4))
        a = fill_uniform(t, seed=42, lo=-1.0, hi=1.0)
        b = fill_uniform(t, seed=42, lo=-1.0, hi=1.0)
        assert np.array_equal(a.data, b.data)

    def test_different_seeds_differ(self):
        t = Tensor4.zeros((1, 1, 4, 4))
        a = fill_uniform(t, seed=1, lo=0.0, hi=1.0)
        b = fill_uniform(t, seed=2, lo=0.0, hi=1.0)
        assert not np.array_equal(a.data, b.data)

    def test_matches_scalar_splitmix64(self):
        t = Tensor4.zeros((1, 1, 2, 4), precision=Precision.FP64)
        got = fill_uniform(t, seed=1, lo=0.0, hi=1.0).data.ravel()
        want = splitmix64_reference(1, 8)
        assert got.tolist() == want

    def test_range_containment_tiny_interval(self):
        t = Tensor4.zeros((1, 1, 8, 8))
        filled = fill_uniform(t, seed=7, lo=0.0, hi=1e-30)
        vals = filled.data.astype(np.float64)
        assert np.all(vals >= 0.0)
        assert np.all(vals < 1e-30)

    def test_range_containment_symmetric(self):
        t = Tensor4.zeros((2, 2, 16, 16), precision=Precision.FP64)
        filled = fill_uniform(t, seed=3, lo=-1.0, hi=1.0)
        assert np.all(filled.data >= -1.0)
        assert np.all(filled.data < 1.0)

    def test_pure(self):
        t = Tensor4.zeros((1, 1, 2, 2))
        fill_uniform(t, seed=5, lo=0.0, hi=1.0)
        assert np.all(t.data == 0.0)

    def test_requires_lo_below_hi(self):
        t = Tensor4.zeros((1, 1, 1, 1))
        with pytest.raises(ValueError):
            fill_uniform(t, seed=0, lo=1.0, hi=1.0)

    def test_negative_seed_allowed(self):
        t = Tensor4.zeros((1, 1, 2, 2))
        a = fill_uniform(t, seed=-9, lo=0.0, hi=1.0)
        b = fill_uniform(t, seed=-9, lo=0.0, hi=1.0)
        assert np.array_equal(a.data, b.data)


class TestQuantizeFp16:
    def test_exact_values_unchanged(self):
        t = Tensor4.from_array([[[[1.0, -0.5, 0.0, 2.0]]]])
        q = quantize_fp16(t)
        assert q.data.tolist() == [[[[1.0, -0.5, 0.0, 2.0]]]]
        assert q.precision is Precision.FP16_SIM

    def test_tenth_rounds_to_nearest_half_value(self):
        t = Tensor4.from_array([[[[0.1]]]], precision=Precision.FP64)
        q = quantize_fp16(t)
        assert q[0, 0, 0, 0] == 0.0999755859375

    def test_idempotent(self):
        t = Tensor4.from_array(np.linspace(-1, 1, 16).reshape(1, 1, 4, 4))
        once = quantize_fp16(t)
        twice = quantize_fp16(once)
        assert np.array_equal(once.data, twice.data)

    def test_overflow_raises(self):
        t = Tensor4.from_array([[[[70000.0]]]])
        with pytest.raises(OverflowError):
            quantize_fp16(t)

    def test_max_value_survives(self):
        t = Tensor4.from_array([[[[FP16_MAX]]]])
        assert quantize_fp16(t)[0, 0, 0, 0] == FP16_MAX

    @given(st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=32))
    @settings(max_examples=50, deadline=None)
    def test_idempotent_property(self, vals):
        arr = np.array(vals, dtype=np.float64).reshape(1, 1, 1, -1)
        once = quantize_fp16(Tensor4.from_array(arr, precision=Precision.FP64))
        twice = quantize_fp16(once)
        assert np.array_equal(once.data, twice.data)


class TestMaxAbsError:
    def test_identical_is_zero(self):
        t = Tensor4.from_array(np.random.default_rng(0).random((1, 2, 3, 4)))
        assert max_abs_error(t, t) == 0.0

    def test_constant_offset(self):
        a = Tensor4.zeros((2, 2, 2, 2))
        b = Tensor4.from_array(np.full((2, 2, 2, 2), 0.25))
        assert max_abs_error(a, b) == 0.25

    def test_hand_case(self):
        a = Tensor4.from_array([[[[1.0, 2.0]]]])
        b = Tensor4.from_array([[[[1.5, 1.9]]]])
        assert max_abs_error(a, b) == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            max_abs_error(Tensor4.zeros((1, 1, 1, 2)), Tensor4.zeros((1, 1, 2, 1)))

    @given(st.integers(0, 2**32), st.integers(0, 2**32))
    @settings(max_examples=25, deadline=None)
    def test_symmetric_nonnegative(self, s1, s2):
        t = Tensor4.zeros((1, 1, 3, 3))
        a = fill_uniform(t, seed=s1, lo=-1.0, hi=1.0)
        b = fill_uniform(t, seed=s2, lo=-1.0, hi=1.0)
        e = max_abs_error(a, b)
        assert e == max_abs_error(b, a)
        assert e >= 0.0
        if s1 == s2:
            assert e == 0.0

    def test_zero_iff_equal(self):
        t = Tensor4.zeros((1, 1, 2, 2))
        a = fill_uniform(t, seed=1, lo=0.0, hi=1.0)
        bumped = a.data.copy()
        bumped[0, 0, 0, 0] += 1e-6
        b = Tensor4.from_array(bumped)
        assert max_abs_error(a, b) > 0.0

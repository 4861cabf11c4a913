import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from winoconv.counters import OpCounter
from winoconv.direct import LayerConfig, direct_forward
from winoconv.fftconv import (SplitComplexFactors, cgemm4, complex_mul_3, fast_cgemm,
                              fft2_pow2, fft_forward_layer, fft_pow2,
                              hermitian_unique_count, hermitianize, ifft2_pow2, ifft_pow2)
from winoconv.tensors import Precision, Tensor4, fill_uniform, max_abs_error


def naive_dft(x):
    n = len(x)
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return w @ np.asarray(x, dtype=np.complex128)


def rand(shape, seed, precision=Precision.FP32):
    return fill_uniform(Tensor4.zeros(shape, precision=precision), seed, -1.0, 1.0)


class TestFFT1D:
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
    def test_against_naive_dft(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        np.testing.assert_allclose(fft_pow2(x), naive_dft(x), atol=1e-12)

    def test_impulse(self):
        x = np.zeros(8)
        x[0] = 1.0
        np.testing.assert_allclose(fft_pow2(x), np.ones(8), atol=0)

    def test_ones(self):
        got = fft_pow2(np.ones(8))
        want = np.zeros(8, dtype=np.complex128)
        want[0] = 8.0
        np.testing.assert_allclose(got, want, atol=1e-13)

    def test_roundtrip(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        np.testing.assert_allclose(ifft_pow2(fft_pow2(x)), x, atol=1e-13)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            fft_pow2(np.zeros(6))

    def test_batched_rows(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((3, 8))
        got = fft_pow2(x)
        for i in range(3):
            np.testing.assert_allclose(got[i], naive_dft(x[i]), atol=1e-12)


class TestFFT2D:
    def test_against_separable_naive(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((8, 8))
        want = np.array([naive_dft(row) for row in x])
        want = np.array([naive_dft(col) for col in want.T]).T
        np.testing.assert_allclose(fft2_pow2(x), want, atol=1e-11)

    def test_roundtrip(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((2, 4, 8)) + 1j * rng.standard_normal((2, 4, 8))
        np.testing.assert_allclose(ifft2_pow2(fft2_pow2(x)), x, atol=1e-13)


class TestHermitian:
    def test_unique_counts(self):
        assert hermitian_unique_count(8) == 40
        assert hermitian_unique_count(16) == 144
        assert hermitian_unique_count(1) == 1
        with pytest.raises(ValueError):
            hermitian_unique_count(0)

    def test_hermitianize_symmetry(self):
        rng = np.random.default_rng(7)
        a = 8
        plane = rng.standard_normal((a, a)) + 1j * rng.standard_normal((a, a))
        h = hermitianize(plane)
        for u in range(a):
            for v in range(a):
                assert h[u, v] == np.conj(h[(a - u) % a, (a - v) % a]) or v <= a // 2

    def test_hermitianize_fixed_point(self):
        # A real field's transform is already hermitian; hermitianize must
        # leave it bitwise untouched.
        rng = np.random.default_rng(8)
        plane = fft2_pow2(rng.standard_normal((8, 8)))
        h = hermitianize(plane)
        np.testing.assert_allclose(h, plane, atol=1e-12)
        assert np.array_equal(hermitianize(h), h)


class TestComplexMul3:
    def test_worked_example(self):
        got = complex_mul_3(complex(1, 2), complex(3, 4))
        assert got == complex(-5, 10)

    def test_counter(self):
        c = OpCounter()
        complex_mul_3(1 + 1j, 2 + 2j, counter=c)
        assert c.get("mul") == 3

    def test_identity(self):
        z = complex(0.37, -2.25)
        assert complex_mul_3(z, 1 + 0j) == z

    def test_random_against_hardware(self):
        rng = np.random.default_rng(9)
        for _ in range(2000):
            x = complex(rng.standard_normal(), rng.standard_normal())
            y = complex(rng.standard_normal(), rng.standard_normal())
            got = complex_mul_3(x, y)
            want = x * y
            assert abs(got - want) <= 1e-13 * max(1.0, abs(want))

    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3),
           st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
    def test_property_matches_exact_product(self, a, b, c, d):
        # One extra rounding in each part, so allow a few ulps of slack
        # proportional to the magnitudes actually multiplied.
        got = complex_mul_3(complex(a, b), complex(c, d))
        want = complex(a, b) * complex(c, d)
        scale = (abs(a) + abs(b)) * (abs(c) + abs(d)) + 1.0
        assert abs(got.real - want.real) <= 1e-12 * scale
        assert abs(got.imag - want.imag) <= 1e-12 * scale


class TestFastCgemm:
    def test_factor_identities(self):
        x = np.array([[1.0 + 2.0j]])
        u = SplitComplexFactors.left(x)
        assert (u.a[0, 0], u.b[0, 0], u.c[0, 0]) == (1.0, 3.0, 1.0)
        y = np.array([[3.0 + 4.0j]])
        v = SplitComplexFactors.right(y)
        assert (v.a[0, 0], v.b[0, 0], v.c[0, 0]) == (3.0, 4.0, 7.0)

    def test_scalar_example(self):
        u = SplitComplexFactors.left(np.array([[1.0 + 2.0j]]))
        v = SplitComplexFactors.right(np.array([[3.0 + 4.0j]]))
        m0, m1 = fast_cgemm(u.a, u.b, u.c, v.a, v.b, v.c)
        assert m1[0, 0] == -5.0 and m0[0, 0] == 10.0

    def test_identity_returns_v(self):
        rng = np.random.default_rng(10)
        vmat = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        u = SplitComplexFactors.left(np.eye(3).astype(np.complex128))
        v = SplitComplexFactors.right(vmat)
        m0, m1 = fast_cgemm(u.a, u.b, u.c, v.a, v.b, v.c)
        np.testing.assert_allclose(m1, vmat.real, atol=1e-13)
        np.testing.assert_allclose(m0, vmat.imag, atol=1e-13)

    def test_matches_four_mult(self):
        rng = np.random.default_rng(11)
        q, k, c, p = 8, 3, 4, 5
        u = rng.standard_normal((q, k, c)) + 1j * rng.standard_normal((q, k, c))
        v = rng.standard_normal((q, c, p)) + 1j * rng.standard_normal((q, c, p))
        uf = SplitComplexFactors.left(u)
        vf = SplitComplexFactors.right(v)
        m0, m1 = fast_cgemm(uf.a, uf.b, uf.c, vf.a, vf.b, vf.c)
        want = cgemm4(u, v)
        np.testing.assert_allclose(m1 + 1j * m0, want, rtol=1e-12, atol=1e-12)

    def test_counters(self):
        rng = np.random.default_rng(12)
        q, k, c, p = 2, 3, 4, 5
        u = rng.standard_normal((q, k, c)) + 1j * rng.standard_normal((q, k, c))
        v = rng.standard_normal((q, c, p)) + 1j * rng.standard_normal((q, c, p))
        c3, c4 = OpCounter(), OpCounter()
        uf = SplitComplexFactors.left(u)
        vf = SplitComplexFactors.right(v)
        fast_cgemm(uf.a, uf.b, uf.c, vf.a, vf.b, vf.c, counter=c3)
        cgemm4(u, v, counter=c4)
        assert c3.get("mul") == 3 * q * k * c * p
        assert c4.get("mul") == 4 * q * k * c * p

    def test_batched_equals_slicewise(self):
        rng = np.random.default_rng(13)
        q, k, c, p = 4, 2, 3, 2
        u = rng.standard_normal((q, k, c)) + 1j * rng.standard_normal((q, k, c))
        v = rng.standard_normal((q, c, p)) + 1j * rng.standard_normal((q, c, p))
        uf = SplitComplexFactors.left(u)
        vf = SplitComplexFactors.right(v)
        m0, m1 = fast_cgemm(uf.a, uf.b, uf.c, vf.a, vf.b, vf.c)
        for i in range(q):
            ui = SplitComplexFactors.left(u[i])
            vi = SplitComplexFactors.right(v[i])
            s0, s1 = fast_cgemm(ui.a, ui.b, ui.c, vi.a, vi.b, vi.c)
            np.testing.assert_allclose(m0[i], s0, atol=1e-12)
            np.testing.assert_allclose(m1[i], s1, atol=1e-12)


class TestConjugateReflection:
    def test_unique_region_reconstructs_bitwise(self):
        # Products over hermitian operands inherit the symmetry, and with the
        # 4-mult kernel the reflected entries match conj() bit for bit, so the
        # redundant half never needs computing.
        rng = np.random.default_rng(14)
        a, k, c, p = 4, 3, 3, 3
        half = a // 2
        u = np.empty((k, c, a, a), dtype=np.complex128)
        v = np.empty((c, p, a, a), dtype=np.complex128)
        for i in range(k):
            for j in range(c):
                u[i, j] = hermitianize(rng.standard_normal((a, a))
                                       + 1j * rng.standard_normal((a, a)))
        for i in range(c):
            for j in range(p):
                v[i, j] = hermitianize(rng.standard_normal((a, a))
                                       + 1j * rng.standard_normal((a, a)))
        ufull = u.transpose(2, 3, 0, 1).reshape(a * a, k, c)
        vfull = v.transpose(2, 3, 0, 1).reshape(a * a, c, p)
        want = cgemm4(ufull, vfull).reshape(a, a, k, p)

        uu = u[:, :, :, :half + 1].transpose(2, 3, 0, 1).reshape(-1, k, c)
        vu = v[:, :, :, :half + 1].transpose(2, 3, 0, 1).reshape(-1, c, p)
        m = cgemm4(uu, vu).reshape(a, half + 1, k, p)
        got = np.empty((a, a, k, p), dtype=np.complex128)
        got[:, :half + 1] = m
        rev = (a - np.arange(a)) % a
        for vcol in range(half + 1, a):
            got[:, vcol] = np.conj(m[rev, a - vcol])
        assert np.array_equal(got, want)
        assert a * (half + 1) == hermitian_unique_count(a)


class TestForwardLayer:
    def test_all_ones(self):
        cfg = LayerConfig(N=1, C=1, H=8, W=8, K=1, pad=0)
        d = Tensor4.from_array(np.ones((1, 1, 8, 8), dtype=np.float32))
        g = Tensor4.from_array(np.ones((1, 1, 3, 3), dtype=np.float32))
        y = fft_forward_layer(d, g, cfg, tile=8)
        assert y.shape == (1, 1, 6, 6)
        np.testing.assert_allclose(y.data, 9.0, atol=1e-10)

    def test_multichannel_vs_direct(self):
        cfg = LayerConfig(N=1, C=2, H=16, W=16, K=4, pad=1)
        d, g = rand((1, 2, 16, 16), 15), rand((4, 2, 3, 3), 16)
        y = fft_forward_layer(d, g, cfg, tile=8)
        ref = direct_forward(d.astype(Precision.FP64), g.astype(Precision.FP64), cfg)
        assert max_abs_error(y, ref) < 1e-4

    def test_zero_filters(self):
        cfg = LayerConfig(N=1, C=2, H=8, W=8, K=2, pad=1)
        d = rand((1, 2, 8, 8), 17)
        g = Tensor4.zeros((2, 2, 3, 3), precision=Precision.FP32)
        y = fft_forward_layer(d, g, cfg, tile=8)
        assert np.all(y.data == 0.0)

    def test_fast_and_four_mult_agree(self):
        cfg = LayerConfig(N=1, C=3, H=12, W=10, K=2, pad=1)
        d, g = rand((1, 3, 12, 10), 18, Precision.FP64), rand((2, 3, 3, 3), 19, Precision.FP64)
        y3 = fft_forward_layer(d, g, cfg, tile=8, fast=True)
        y4 = fft_forward_layer(d, g, cfg, tile=8, fast=False)
        assert max_abs_error(y3, y4) < 1e-12

    def test_tile_too_small(self):
        cfg = LayerConfig(N=1, C=1, H=8, W=8, K=1, pad=0)
        d, g = rand((1, 1, 8, 8), 20), rand((1, 1, 3, 3), 21)
        with pytest.raises(ValueError):
            fft_forward_layer(d, g, cfg, tile=2)

    def test_tile_not_power_of_two(self):
        cfg = LayerConfig(N=1, C=1, H=8, W=8, K=1, pad=0)
        d, g = rand((1, 1, 8, 8), 22), rand((1, 1, 3, 3), 23)
        with pytest.raises(ValueError):
            fft_forward_layer(d, g, cfg, tile=6)

    def test_counters(self):
        cfg = LayerConfig(N=1, C=2, H=8, W=8, K=3, pad=1)
        a = 8
        q = a * (a // 2 + 1)
        # out 8x8, step m = 6, so a 2x2 grid of tiles
        p = 4
        c3, c4 = OpCounter(), OpCounter()
        d, g = rand((1, 2, 8, 8), 24), rand((3, 2, 3, 3), 25)
        fft_forward_layer(d, g, cfg, tile=a, counter=c3, fast=True)
        fft_forward_layer(d, g, cfg, tile=a, counter=c4, fast=False)
        assert c3.get("cmul") == q * 3 * 2 * p
        assert c4.get("cmul") == q * 3 * 2 * p
        assert c3.get("mul") == 3 * q * 3 * 2 * p
        assert c4.get("mul") == 4 * q * 3 * 2 * p

    def test_indivisible_extent(self):
        cfg = LayerConfig(N=2, C=3, H=13, W=13, K=2, pad=1)
        d, g = rand((2, 3, 13, 13), 26), rand((2, 3, 3, 3), 27)
        y = fft_forward_layer(d, g, cfg, tile=8)
        ref = direct_forward(d.astype(Precision.FP64), g.astype(Precision.FP64), cfg)
        assert y.shape == ref.shape
        assert max_abs_error(y, ref) < 1e-4

    def test_larger_tile(self):
        cfg = LayerConfig(N=1, C=2, H=16, W=16, K=2, pad=1)
        d, g = rand((1, 2, 16, 16), 28), rand((2, 2, 3, 3), 29)
        y = fft_forward_layer(d, g, cfg, tile=16)
        ref = direct_forward(d.astype(Precision.FP64), g.astype(Precision.FP64), cfg)
        assert max_abs_error(y, ref) < 1e-4

    def test_fp64_output_precision(self):
        cfg = LayerConfig(N=1, C=1, H=8, W=8, K=1, pad=0)
        d = rand((1, 1, 8, 8), 30, Precision.FP64)
        g = rand((1, 1, 3, 3), 31, Precision.FP64)
        y = fft_forward_layer(d, g, cfg, tile=8)
        assert y.precision == Precision.FP64
        ref = direct_forward(d, g, cfg)
        assert max_abs_error(y, ref) < 1e-12

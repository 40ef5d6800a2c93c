import numpy as np
import pytest

from stgabor import (
    AUTO_SPECTRAL_THRESHOLD,
    ConvolutionOptions,
    InvalidParameterError,
    NumericError,
    Volume,
    convolve,
    convolve_bank,
    derive_params,
    direction_grid,
    sample_kernel,
)
from stgabor.convolve import _resolve_backend

DIRECT = ConvolutionOptions(backend="direct")
SPECTRAL = ConvolutionOptions(backend="spectral")


def random_volume(rng, shape, origin=(0, 0, 0)):
    return Volume(rng.standard_normal(shape), origin=origin)


def centered_kernel(rng, shape):
    assert shape[0] % 2 == 1 and shape[1] % 2 == 1
    origin = (shape[0] // 2, shape[1] // 2, 0)
    return Volume(rng.standard_normal(shape), origin=origin)


def rel_linf(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return np.max(np.abs(a - b)) / scale


class TestOptions:
    def test_rejects_unknown_backend(self):
        with pytest.raises(InvalidParameterError):
            ConvolutionOptions(backend="winograd")

    def test_rejects_unsupported_boundary(self):
        with pytest.raises(InvalidParameterError):
            ConvolutionOptions(boundary="wrap")

    def test_auto_routes_by_work_product(self):
        small_video, small_kernel = (16, 16, 8), (3, 3, 3)
        assert _resolve_backend(small_video, small_kernel, "auto") == "direct"
        big_video, big_kernel = (128, 128, 32), (21, 21, 10)
        work = np.prod(big_video) * np.prod(big_kernel)
        assert work > AUTO_SPECTRAL_THRESHOLD
        assert _resolve_backend(big_video, big_kernel, "auto") == "spectral"


class TestConvolve:
    @pytest.mark.parametrize("opts", [DIRECT, SPECTRAL])
    def test_zero_video_gives_zero_output(self, opts):
        rng = np.random.default_rng(0)
        video = Volume(np.zeros((6, 5, 4)))
        kernel = centered_kernel(rng, (3, 3, 2))
        out = convolve(video, kernel, opts)
        assert out.shape == video.shape
        assert np.all(out.data == 0.0)

    @pytest.mark.parametrize("opts", [DIRECT, SPECTRAL])
    def test_unit_impulse_is_identity(self, opts):
        rng = np.random.default_rng(1)
        video = random_volume(rng, (7, 6, 5))
        impulse = np.zeros((3, 3, 2))
        impulse[1, 1, 0] = 1.0
        kernel = Volume(impulse, origin=(1, 1, 0))
        out = convolve(video, kernel, opts)
        np.testing.assert_allclose(out.data, video.data, rtol=0, atol=1e-12)

    def test_single_voxel_impulse_kernel(self):
        rng = np.random.default_rng(2)
        video = random_volume(rng, (4, 4, 3))
        kernel = Volume(np.ones((1, 1, 1)), origin=(0, 0, 0))
        out = convolve(video, kernel, DIRECT)
        assert np.array_equal(out.data, video.data)

    def test_direct_and_spectral_agree_on_random_pair(self):
        rng = np.random.default_rng(3)
        video = random_volume(rng, (16, 16, 8))
        kernel = centered_kernel(rng, (5, 5, 3))
        d = convolve(video, kernel, DIRECT)
        s = convolve(video, kernel, SPECTRAL)
        assert rel_linf(d.data, s.data) <= 1e-6

    def test_matches_reference_triple_loop(self):
        # Independent brute-force definition of same-extent true convolution.
        rng = np.random.default_rng(4)
        video = random_volume(rng, (5, 4, 4))
        kernel = centered_kernel(rng, (3, 3, 2))
        vd, kd = video.data, kernel.data
        ox, oy, ot = kernel.origin
        expected = np.zeros(vd.shape)
        for zx in range(vd.shape[0]):
            for zy in range(vd.shape[1]):
                for zt in range(vd.shape[2]):
                    acc = 0.0
                    for ax in range(kd.shape[0]):
                        for ay in range(kd.shape[1]):
                            for at in range(kd.shape[2]):
                                ix, iy, it = zx + ox - ax, zy + oy - ay, zt + ot - at
                                if (0 <= ix < vd.shape[0]
                                        and 0 <= iy < vd.shape[1]
                                        and 0 <= it < vd.shape[2]):
                                    acc += kd[ax, ay, at] * vd[ix, iy, it]
                    expected[zx, zy, zt] = acc
        for opts in (DIRECT, SPECTRAL):
            out = convolve(video, kernel, opts)
            np.testing.assert_allclose(out.data, expected, rtol=0, atol=1e-10)

    @pytest.mark.parametrize("opts", [DIRECT, SPECTRAL])
    def test_linearity(self, opts):
        rng = np.random.default_rng(5)
        v1 = random_volume(rng, (10, 9, 6))
        v2 = random_volume(rng, (10, 9, 6))
        kernel = centered_kernel(rng, (5, 3, 3))
        a, b = 2.5, -1.25
        mixed = Volume(a * v1.data + b * v2.data)
        lhs = convolve(mixed, kernel, opts).data
        rhs = a * convolve(v1, kernel, opts).data \
            + b * convolve(v2, kernel, opts).data
        assert rel_linf(lhs, rhs) <= 1e-9

    def test_shift_covariance_interior(self):
        # Shifting the input along x by one pixel shifts the output by one
        # pixel for voxels whose receptive field stays inside the volume:
        # bitwise for direct, to fft roundoff for spectral.
        rng = np.random.default_rng(6)
        shape = (12, 10, 8)
        base = rng.standard_normal(shape)
        shifted = np.zeros(shape)
        shifted[1:] = base[:-1]
        kernel = centered_kernel(rng, (3, 3, 2))
        h = 1
        for opts, atol in ((DIRECT, 0.0), (SPECTRAL, 1e-12)):
            out_base = convolve(Volume(base), kernel, opts).data
            out_shift = convolve(Volume(shifted), kernel, opts).data
            # interior excludes columns whose field touches the x boundary
            # on either copy
            lhs = out_shift[1 + h:shape[0] - h]
            rhs = out_base[h:shape[0] - 1 - h]
            if atol == 0.0:
                assert np.array_equal(lhs, rhs)
            else:
                scale = np.max(np.abs(rhs))
                np.testing.assert_allclose(lhs, rhs, rtol=0, atol=atol * scale)

    @pytest.mark.parametrize("kshape", [(1, 1, 3), (5, 1, 1), (1, 5, 2), (1, 1, 1)])
    def test_degenerate_kernel_dimensions(self, kshape):
        rng = np.random.default_rng(7)
        video = random_volume(rng, (9, 8, 7))
        origin = (kshape[0] // 2, kshape[1] // 2, 0)
        kernel = Volume(rng.standard_normal(kshape), origin=origin)
        d = convolve(video, kernel, DIRECT)
        s = convolve(video, kernel, SPECTRAL)
        assert rel_linf(d.data, s.data) <= 1e-6

    def test_kernel_larger_than_video(self):
        # Small clips against wide high-speed kernels must still agree
        # across backends; the padded full result is simply cropped.
        rng = np.random.default_rng(50)
        video = random_volume(rng, (8, 8, 4))
        kernel = centered_kernel(rng, (11, 11, 6))
        d = convolve(video, kernel, DIRECT)
        s = convolve(video, kernel, SPECTRAL)
        assert d.shape == video.shape
        assert rel_linf(d.data, s.data) <= 1e-12

    def test_empty_volume_rejected(self):
        with pytest.raises(InvalidParameterError):
            Volume(np.zeros((0, 4, 4)))

    def test_overflow_raises_numeric_error(self):
        video = Volume(np.full((4, 4, 4), 1e308))
        kernel = Volume(np.full((3, 3, 3), 1e5), origin=(1, 1, 0))
        with np.errstate(over="ignore"):
            with pytest.raises(NumericError):
                convolve(video, kernel, DIRECT)


class TestConvolveBank:
    def test_empty_bank_rejected(self):
        video = Volume(np.zeros((4, 4, 4)))
        with pytest.raises(InvalidParameterError):
            convolve_bank(video, [])

    def test_single_kernel_bank_matches_convolve(self):
        rng = np.random.default_rng(8)
        video = random_volume(rng, (10, 10, 6))
        kernel = centered_kernel(rng, (5, 5, 3))
        for opts in (DIRECT, SPECTRAL):
            single = convolve(video, kernel, opts)
            bank = convolve_bank(video, [kernel], opts)
            assert len(bank) == 1
            assert np.array_equal(bank[0].data, single.data)

    def test_zero_video_gives_zero_bank(self):
        rng = np.random.default_rng(9)
        video = Volume(np.zeros((8, 8, 5)))
        kernels = [centered_kernel(rng, (3, 3, 2)) for _ in range(4)]
        for out in convolve_bank(video, kernels, SPECTRAL):
            assert np.all(out.data == 0.0)

    def test_gabor_bank_matches_per_kernel_direct(self):
        # 8 directions x 2 speeds on a random video; the shared-transform
        # spectral path must match the direct backend kernel by kernel.
        rng = np.random.default_rng(10)
        video = random_volume(rng, (32, 32, 16))
        kernels = [
            sample_kernel(derive_params(v, theta))
            for v in (0.5, 1.0)
            for theta in direction_grid(8)
        ]
        spectral_out = convolve_bank(video, kernels, SPECTRAL)
        for kernel, out in zip(kernels, spectral_out):
            reference = convolve(video, kernel, DIRECT)
            assert rel_linf(out.data, reference.data) <= 1e-6

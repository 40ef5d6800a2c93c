import math

import numpy as np
import pytest

from stgabor import (
    BankConfig,
    ConvolutionOptions,
    FeatureVector,
    InvalidParameterError,
    Volume,
    config_fingerprint,
    default_support,
    derive_params,
    direction_grid,
    energy,
    extract_features,
    quadrature_response,
    render,
    sample_kernel,
    speed_grid,
    StimulusSpec,
)


def interior(volume, params):
    """Slices whose receptive field never touches the zero padding."""
    sup = default_support(params)
    h, length = sup.spatial_halfwidth, sup.temporal_length
    w, ht, t = volume.shape
    return volume.data[h:w - h, h:ht - h, length - 1:t]


class TestBankConfig:
    def test_grid_is_row_major_speed_then_direction(self):
        bank = BankConfig(speeds=(0.5, 1.0), directions=(0.0, 1.0, 2.0))
        grid = bank.grid()
        assert len(bank) == 6
        # index(i, j) = i * len(directions) + j
        for i, v in enumerate(bank.speeds):
            for j, d in enumerate(bank.directions):
                assert grid[i * 3 + j] == (v, d)

    def test_rejects_unsorted_speeds(self):
        with pytest.raises(InvalidParameterError):
            BankConfig(speeds=(1.0, 0.5), directions=(0.0,))

    def test_rejects_duplicate_directions(self):
        with pytest.raises(InvalidParameterError):
            BankConfig(speeds=(1.0,), directions=(0.5, 0.5))

    def test_rejects_directions_outside_range(self):
        with pytest.raises(InvalidParameterError):
            BankConfig(speeds=(1.0,), directions=(0.0, 2.0 * math.pi))

    def test_direction_grid_canonical_eight(self):
        grid = direction_grid(8)
        expected = [0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi,
                    5 * math.pi / 4, 3 * math.pi / 2, 7 * math.pi / 4]
        np.testing.assert_allclose(grid, expected, rtol=0, atol=1e-15)

    def test_speed_grid_quarter_steps(self):
        assert speed_grid(0.5, 2.0, 0.25) == \
            (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)

    def test_speed_grid_tenth_steps(self):
        grid = speed_grid(0.1, 1.5, 0.1)
        assert len(grid) == 15
        assert grid[0] == 0.1 and grid[-1] == 1.5

    def test_speed_grid_degenerate_and_invalid(self):
        assert speed_grid(1.0, 1.0, 0.5) == (1.0,)
        with pytest.raises(InvalidParameterError):
            speed_grid(2.0, 1.0, 0.5)
        with pytest.raises(InvalidParameterError):
            speed_grid(0.0, 1.0, 0.0)

    def test_invalid_normalization_rejected(self):
        bank = BankConfig(speeds=(1.0,), directions=(0.0,))
        with pytest.raises(InvalidParameterError):
            config_fingerprint(bank, "l2")
        with pytest.raises(InvalidParameterError):
            extract_features(Volume(np.zeros((8, 8, 4))), bank,
                             normalize="l2")

    def test_fingerprint_distinguishes_configs(self):
        b1 = BankConfig(speeds=(1.0,), directions=(0.0,))
        b2 = BankConfig(speeds=(2.0,), directions=(0.0,))
        assert config_fingerprint(b1) == config_fingerprint(b1)
        assert config_fingerprint(b1) != config_fingerprint(b2)
        assert config_fingerprint(b1) != config_fingerprint(b1, "per-voxel")


class TestFeatureVector:
    def test_rejects_negative_values(self):
        with pytest.raises(InvalidParameterError):
            FeatureVector(np.array([1.0, -0.5]), "abc")

    def test_rejects_empty(self):
        with pytest.raises(InvalidParameterError):
            FeatureVector(np.array([]), "abc")


class TestEnergy:
    def test_zero_volume(self):
        assert energy(Volume(np.zeros((3, 3, 3)))) == 0.0

    def test_all_ones_two_cubed(self):
        assert energy(Volume(np.ones((2, 2, 2)))) == 8.0

    def test_matches_elementwise_sum_oracle(self):
        rng = np.random.default_rng(11)
        data = rng.standard_normal((4, 3, 2))
        expected = 0.0
        for x in range(4):
            for y in range(3):
                for t in range(2):
                    expected += data[x, y, t] ** 2
        assert energy(Volume(data)) == pytest.approx(expected, rel=1e-12)


class TestQuadratureResponse:
    def test_zero_video_gives_zero_response(self):
        params = derive_params(1.0, 0.0)
        out = quadrature_response(Volume(np.zeros((24, 24, 12))), params)
        assert np.all(out.data == 0.0)

    def test_response_nonnegative(self):
        rng = np.random.default_rng(12)
        video = Volume(rng.standard_normal((24, 24, 12)))
        out = quadrature_response(video, derive_params(0.5, 1.0))
        assert np.all(out.data >= 0.0)

    @pytest.mark.parametrize("v,theta", [(2.0, 0.0), (1.0, math.pi / 4)])
    def test_matched_grating_flat_over_time(self, v, theta):
        params = derive_params(v, theta)
        spec = StimulusSpec("grating", theta, v, geometry=params.wavelength,
                            extent=(72, 72, 16))
        response = quadrature_response(render(spec), params)
        region = interior(response, params)
        per_frame = region.mean(axis=(0, 1))
        assert per_frame.std() / per_frame.mean() < 0.05

    @pytest.mark.parametrize("v,theta", [(2.0, 0.0), (1.0, math.pi / 4)])
    def test_matched_grating_phase_shift_invariance(self, v, theta):
        params = derive_params(v, theta)

        def response(phase):
            spec = StimulusSpec("grating", theta, v,
                                geometry=params.wavelength,
                                extent=(72, 72, 16), phase=phase)
            return interior(quadrature_response(render(spec), params), params)

        r0 = response(0.0)
        r1 = response(math.pi / 2)
        assert np.linalg.norm(r0 - r1) / np.linalg.norm(r0) < 0.01


class TestExtractFeatures:
    def test_zero_video_gives_zero_vector(self):
        bank = BankConfig(speeds=(0.5, 1.0), directions=direction_grid(4))
        vec = extract_features(Volume(np.zeros((24, 24, 12))), bank)
        assert len(vec) == 8
        assert np.all(vec.values == 0.0)

    def test_degenerate_bank_equals_single_energy(self):
        rng = np.random.default_rng(13)
        video = Volume(rng.standard_normal((20, 20, 12)))
        bank = BankConfig(speeds=(1.0,), directions=(0.0,))
        params = derive_params(1.0, 0.0, 0.0, bank.envelope_mode)
        vec = extract_features(video, bank)
        direct = energy(quadrature_response(video, params))
        assert vec.values[0] == direct

    def test_ordering_matches_manual_loop(self):
        rng = np.random.default_rng(14)
        video = Volume(rng.standard_normal((20, 20, 10)))
        bank = BankConfig(speeds=(0.5, 1.0), directions=(0.0, math.pi / 2))
        vec = extract_features(video, bank)
        manual = [
            energy(quadrature_response(video, derive_params(v, d)))
            for v in bank.speeds for d in bank.directions
        ]
        np.testing.assert_allclose(vec.values, manual, rtol=1e-9)

    def test_quadratic_scaling_with_contrast(self):
        rng = np.random.default_rng(15)
        video = rng.standard_normal((24, 24, 12))
        bank = BankConfig(speeds=(1.0,), directions=direction_grid(4))
        base = extract_features(Volume(video), bank).values
        c = 3.7
        scaled = extract_features(Volume(c * video), bank).values
        np.testing.assert_allclose(scaled, c * c * base, rtol=1e-9)

    def test_per_voxel_normalization(self):
        rng = np.random.default_rng(16)
        video = Volume(rng.standard_normal((16, 16, 8)))
        bank = BankConfig(speeds=(1.0,), directions=(0.0,))
        raw = extract_features(video, bank, normalize="none")
        per_voxel = extract_features(video, bank, normalize="per-voxel")
        assert per_voxel.values[0] == pytest.approx(
            raw.values[0] / video.data.size, rel=1e-15
        )
        assert raw.config_fingerprint != per_voxel.config_fingerprint

    def test_matched_bar_peaks_at_its_direction(self):
        spec = StimulusSpec("bar", 0.0, 1.0)
        video = render(spec)
        bank = BankConfig(speeds=(1.0,), directions=direction_grid(8))
        vec = extract_features(video, bank)
        assert int(np.argmax(vec.values)) == 0

    def test_backend_choice_does_not_change_features(self):
        rng = np.random.default_rng(17)
        video = Volume(rng.standard_normal((20, 20, 10)))
        bank = BankConfig(speeds=(0.5,), directions=(0.0, math.pi))
        direct = extract_features(video, bank, ConvolutionOptions("direct"))
        spectral = extract_features(video, bank, ConvolutionOptions("spectral"))
        np.testing.assert_allclose(direct.values, spectral.values, rtol=1e-9)
        assert direct.config_fingerprint == spectral.config_fingerprint


class TestKernelQuadraturePair:
    def test_pair_magnitude_is_carrier_free(self):
        # sqrt(g0^2 + g1^2) of a quadrature pair equals the product of the
        # Gaussian factors wherever the carrier's two phases are exact
        # sin/cos partners; verify against the analytic envelope.
        params = derive_params(2.0, 0.0)
        sup = default_support(params)
        g0 = sample_kernel(params, sup).data
        from stgabor import quadrature_partner
        g1 = sample_kernel(quadrature_partner(params), sup).data
        h = sup.spatial_halfwidth
        x = np.arange(-h, h + 1, dtype=float)[:, None, None]
        y = np.arange(-h, h + 1, dtype=float)[None, :, None]
        t = np.arange(sup.temporal_length, dtype=float)[None, None, :]
        envelope = (params.gamma / (2 * math.pi * params.sigma**2)) * np.exp(
            -((x + params.v_c * t) ** 2 + (params.gamma * y) ** 2)
            / (2 * params.sigma**2)
        ) * (1.0 / math.sqrt(2 * math.pi * params.tau)) * np.exp(
            -((t - params.mu_t) ** 2) / (2 * params.tau**2)
        )
        np.testing.assert_allclose(np.hypot(g0, g1), envelope,
                                   rtol=0, atol=1e-15)

import numpy as np
import pytest

from irs_anchor.model import (ANCHOR_1, ANCHOR_2, NoiseModel, PathLossModel, SystemGeometry,
                              cascade, db_to_linear, draw_channels, draw_rayleigh_channel,
                              los_channel, los_channel_from_distances, path_loss_gain,
                              synthesize_rx)

from conftest import crandn

PL = PathLossModel()


class TestPathLoss:
    @pytest.mark.parametrize("d, c, expected", [(1, 3, 1e-3), (1, 2, 1e-3), (10, 3, 1e-6)])
    def test_values(self, d, c, expected):
        assert path_loss_gain(d, c, PL) == pytest.approx(expected, rel=1e-12)

    def test_decreasing(self):
        d = np.linspace(1, 200, 500)
        assert np.all(np.diff(path_loss_gain(d, 3, PL)) < 0)

    def test_below_reference_distance(self):
        with pytest.raises(ValueError, match="reference distance"):
            path_loss_gain(0.5, 3, PL)

    def test_db_conversion(self):
        assert db_to_linear(-30) == pytest.approx(1e-3)
        assert db_to_linear(40) == pytest.approx(1e4)
        assert PL.reference_gain == pytest.approx(1e-3)

    def test_rejects_positive_gain(self):
        with pytest.raises(ValueError):
            PathLossModel(reference_gain_db=3.0)


class TestRayleigh:
    def test_zero_gain(self, rng):
        assert np.all(draw_rayleigh_channel(3, 4, 0.0, rng) == 0)

    def test_variance(self, rng):
        g = 2.5e-7
        h = draw_rayleigh_channel(100_000, 1, g, rng)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(g, rel=0.03)
        # circular symmetry: real and imaginary parts share the power
        assert np.var(h.real) == pytest.approx(g / 2, rel=0.03)
        assert abs(np.mean(h)) < 5 * np.sqrt(g / 100_000)

    def test_deterministic(self):
        a = draw_rayleigh_channel(4, 5, 1.0, np.random.default_rng(7))
        b = draw_rayleigh_channel(4, 5, 1.0, np.random.default_rng(7))
        assert np.array_equal(a, b)


class TestGeometry:
    def test_default_grid(self):
        g = SystemGeometry()
        assert g.n_elements == 60
        pos = g.element_positions()
        assert pos.shape == (60, 3)
        assert np.allclose(pos.mean(axis=0), g.irs_center)

    def test_plane_faces_bs(self):
        g = SystemGeometry()
        pos = g.element_positions() - np.asarray(g.irs_center)
        to_bs = np.asarray(g.bs_position) - np.asarray(g.irs_center)
        normal = np.array([to_bs[0], to_bs[1], 0.0])
        assert np.allclose(pos @ normal, 0.0, atol=1e-12)

    def test_spacing(self):
        g = SystemGeometry()
        pos = g.element_positions()
        assert np.linalg.norm(pos[1] - pos[0]) == pytest.approx(0.15)
        assert np.linalg.norm(pos[g.irs_cols] - pos[0]) == pytest.approx(0.15)

    @pytest.mark.parametrize("n, rows, cols", [(60, 6, 10), (16, 4, 4), (7, 1, 7), (8, 2, 4)])
    def test_for_elements(self, n, rows, cols):
        g = SystemGeometry.for_elements(n)
        assert (g.irs_rows, g.irs_cols) == (rows, cols)

    def test_invalid(self):
        with pytest.raises(ValueError):
            SystemGeometry(element_spacing=0.0)
        with pytest.raises(ValueError):
            SystemGeometry(bs_position=(np.nan, 0, 0))


class TestLosChannel:
    def test_toy_distances(self):
        lam = PL.carrier_wavelength
        h = los_channel_from_distances([1.0, 2.0], PL)
        assert np.allclose(np.abs(h), [np.sqrt(1e-3), np.sqrt(1e-3) / 2], rtol=1e-14)
        expected_phase = np.mod(-2 * np.pi * np.array([1.0, 2.0]) / lam, 2 * np.pi)
        assert np.allclose(np.mod(np.angle(h), 2 * np.pi), expected_phase % (2 * np.pi), atol=1e-12)

    def test_symmetric_anchor(self):
        g = SystemGeometry(irs_rows=1, irs_cols=2)
        to_bs = np.asarray(g.bs_position) - np.asarray(g.irs_center)
        normal = np.array([to_bs[0], to_bs[1], 0.0])
        anchor = np.asarray(g.irs_center) + 3 * normal / np.linalg.norm(normal)
        h = los_channel(g, anchor, PL)
        assert h[0] == pytest.approx(h[1], rel=1e-12)

    def test_magnitude_is_inverse_distance(self):
        g = SystemGeometry()
        anchor = np.asarray(g.anchor_los_position)
        d = np.linalg.norm(g.element_positions() - anchor, axis=1)
        h = los_channel(g, anchor, PL)
        assert np.allclose(np.abs(h), np.sqrt(1e-3) / d, rtol=1e-13)


class TestCascade:
    def test_identity_scaling(self, rng):
        H = crandn(rng, 3, 4)
        assert np.array_equal(cascade(H, np.ones(4)), H)

    def test_identity_matrix(self, rng):
        h = crandn(rng, 3)
        assert np.allclose(cascade(np.eye(3), h), np.diag(h))

    def test_loop_oracle(self, rng):
        H, h = crandn(rng, 2, 3), crandn(rng, 3)
        out = np.empty((2, 3), complex)
        for m in range(2):
            for n in range(3):
                out[m, n] = H[m, n] * h[n]
        assert np.allclose(cascade(H, h), out, rtol=1e-15, atol=0)

    def test_rewrite_identity(self, rng):
        H, h, v = crandn(rng, 5, 7), crandn(rng, 7), crandn(rng, 7)
        a = cascade(H, h) @ v
        assert np.linalg.norm(a - H @ np.diag(h) @ v) <= 1e-12 * np.linalg.norm(a)
        assert np.linalg.norm(a - H @ np.diag(v) @ h) <= 1e-12 * np.linalg.norm(a)

    def test_mismatch(self, rng):
        with pytest.raises(ValueError):
            cascade(crandn(rng, 2, 3), crandn(rng, 4))


class TestRealization:
    def test_cascades_consistent(self, make_channels):
        ch = make_channels(4, 6, 3, seed=3)
        for k in range(3):
            assert np.array_equal(ch.cascaded_bsu[k], cascade(ch.H_bs, ch.h_su[k]))
        assert np.array_equal(ch.cascaded_bsa1, cascade(ch.H_bs, ch.h_sa1))
        assert np.array_equal(ch.cascaded_bsa2, cascade(ch.H_bs, ch.h_sa2))
        assert np.array_equal(ch.cascaded_a1sa2, ch.h_sa2 * ch.h_sa1)
        assert all(np.all(np.isfinite(a)) for a in (ch.H_bs, ch.h_bu, ch.h_su))

    def test_bitwise_reproducible(self, make_channels):
        a, b = make_channels(4, 6, 3, seed=11), make_channels(4, 6, 3, seed=11)
        for name in ("H_bs", "h_bu", "h_su", "h_ba1", "h_sa2", "h_sa_los", "user_positions"):
            assert np.array_equal(getattr(a, name), getattr(b, name))
        assert a.h_a1a2 == b.h_a1a2

    def test_large_scale_gain(self):
        # BS-IRS power follows the center distance
        g = SystemGeometry()
        d = np.linalg.norm(np.subtract(g.bs_position, g.irs_center))
        gains = [np.mean(np.abs(draw_channels(8, 1, g, PL, np.random.default_rng(s)).H_bs) ** 2)
                 for s in range(200)]
        assert np.mean(gains) == pytest.approx(path_loss_gain(d, 3, PL), rel=0.05)

    def test_users_in_disk(self):
        g = SystemGeometry()
        ch = draw_channels(2, 50, g, PL, np.random.default_rng(0))
        off = ch.user_positions - np.asarray(g.user_center)
        assert np.all(np.hypot(off[:, 0], off[:, 1]) <= g.user_radius)
        assert np.all(off[:, 2] == 0)

    def test_fixed_users(self):
        g = SystemGeometry(user_positions=((3.0, 100.0, 0.0), (1.0, 98.0, 0.0)))
        ch = draw_channels(2, 2, g, PL, np.random.default_rng(0))
        assert np.array_equal(ch.user_positions, np.asarray(g.user_positions))


class TestSynthesize:
    def test_zero_power(self, make_channels):
        ch = make_channels(4, 6, 2)
        y = synthesize_rx(ch, np.ones(6), {0: 1.0, ANCHOR_1: 1.0}, 0.0)
        assert np.array_equal(y, np.zeros(4))

    def test_anchor_oracle(self, make_channels, rng):
        ch = make_channels(4, 6, 2)
        v = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
        p = 10.0
        y = synthesize_rx(ch, v, {ANCHOR_1: 1.0}, p)
        expected = np.sqrt(p) * (ch.h_ba1 + ch.H_bs @ np.diag(v) @ ch.h_sa1)
        assert np.allclose(y, expected, rtol=1e-13, atol=0)
        assert np.allclose(y, np.sqrt(p) * (cascade(ch.H_bs, ch.h_sa1) @ v + ch.h_ba1), rtol=1e-12)

    def test_a2_receiver(self, make_channels, rng):
        ch = make_channels(4, 6, 2)
        v = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
        y2 = synthesize_rx(ch, v, {ANCHOR_1: 1.0}, 4.0, receiver=ANCHOR_2)
        expected = 2.0 * (ch.h_a1a2 + ch.h_sa2 @ np.diag(v) @ ch.h_sa1)
        assert y2 == pytest.approx(expected, rel=1e-13)

    def test_irs_off(self, make_channels):
        ch = make_channels(4, 6, 2)
        y = synthesize_rx(ch, None, {1: 1.0}, 1.0)
        assert np.array_equal(y, ch.h_bu[1])

    def test_superposition(self, make_channels):
        ch = make_channels(3, 4, 2)
        v = np.ones(4)
        y = synthesize_rx(ch, v, {0: 1.0, 1: -1j}, 2.0)
        y0 = synthesize_rx(ch, v, {0: 1.0}, 2.0)
        y1 = synthesize_rx(ch, v, {1: -1j}, 2.0)
        assert np.allclose(y, y0 + y1, rtol=1e-14)

    def test_noise_variance(self, make_channels):
        ch = make_channels(1, 2, 1)
        noise = NoiseModel(-105.0, rng_seed=5)
        ys = np.array([synthesize_rx(ch, None, {0: 1.0}, 0.0, noise)[0] for _ in range(100_000)])
        assert np.mean(np.abs(ys) ** 2) == pytest.approx(db_to_linear(-105.0), rel=0.03)

    def test_errors(self, make_channels):
        ch = make_channels(2, 3, 1)
        with pytest.raises(KeyError):
            synthesize_rx(ch, None, {5: 1.0}, 1.0)
        with pytest.raises(KeyError):
            synthesize_rx(ch, None, {"x": 1.0}, 1.0)
        with pytest.raises(KeyError):
            synthesize_rx(ch, None, {0: 1.0}, 1.0, receiver=ANCHOR_2)
        with pytest.raises(ValueError, match="unit modulus"):
            synthesize_rx(ch, np.array([1, 0.5, 1]), {0: 1.0}, 1.0)

    def test_noise_model_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            NoiseModel(-np.inf)

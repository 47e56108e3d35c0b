import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gestarm.frameio import (
    GrayFrame,
    PgmHeaderError,
    PgmMaxvalError,
    PgmTruncatedError,
    SceneError,
    SynthScene,
    load_pgm,
    random_scene,
    save_pgm,
    synth_frame,
)

CENTERS = [(20.0, 20.0), (60.0, 20.0), (100.0, 20.0), (40.0, 60.0), (80.0, 60.0)]


class TestLoadPgm:
    def test_verbatim_copy(self):
        frame = load_pgm(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 7]))
        assert frame.width == 2 and frame.height == 2
        assert frame.pixels.flatten().tolist() == [0, 255, 128, 7]
        assert frame.seq == 0

    def test_all_black(self):
        frame = load_pgm(b"P5\n16 16\n255\n" + bytes(256))
        assert frame.pixels.sum() == 0

    def test_truncated_payload(self):
        with pytest.raises(PgmTruncatedError):
            load_pgm(b"P5\n4 4\n255\n" + bytes(10))

    def test_bad_magic(self):
        with pytest.raises(PgmHeaderError):
            load_pgm(b"P6\n2 2\n255\n" + bytes(12))

    def test_bad_maxval(self):
        with pytest.raises(PgmMaxvalError):
            load_pgm(b"P5\n2 2\n65535\n" + bytes(8))

    def test_garbled_header(self):
        with pytest.raises(PgmHeaderError):
            load_pgm(b"P5\ntwo 2\n255\n" + bytes(4))

    def test_comments_allowed(self):
        frame = load_pgm(b"P5\n# camera dump\n2 1\n255\n\x01\x02")
        assert frame.pixels.flatten().tolist() == [1, 2]


class TestSavePgm:
    def test_header_dimensions(self):
        frame = GrayFrame(np.zeros((3, 2), dtype=np.uint8))
        assert save_pgm(frame).startswith(b"P5\n2 3\n255\n")

    def test_all_white_payload(self):
        frame = GrayFrame(np.full((16, 16), 255, dtype=np.uint8))
        payload = save_pgm(frame)[len(b"P5\n16 16\n255\n"):]
        assert payload == bytes([255]) * 256

    @given(
        st.integers(min_value=1, max_value=24),
        st.integers(min_value=1, max_value=24),
        st.integers(min_value=0),
    )
    @settings(max_examples=40, deadline=None)
    def test_round_trip_identity(self, w, h, seed):
        rng = np.random.default_rng(seed)
        pixels = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        again = load_pgm(save_pgm(GrayFrame(pixels)))
        assert again.width == w and again.height == h
        assert np.array_equal(again.pixels, pixels)


class TestSynthFrame:
    def test_clean_disks_hit_extremes(self):
        scene = SynthScene(led_centers=CENTERS, led_radius=5.0)
        frame = synth_frame(scene, 120, 80)
        values = set(np.unique(frame.pixels).tolist())
        assert values == {0, 255}

    def test_gain_offset_arithmetic(self):
        scene = SynthScene(led_centers=CENTERS, led_radius=5.0, gain=0.5, offset=20.0)
        frame = synth_frame(scene, 120, 80)
        assert frame.pixels.max() == 147  # floor(0.5 * 255 + 20)
        assert frame.pixels.min() == 20

    def test_deterministic_for_seed(self):
        scene = SynthScene(led_centers=CENTERS, noise_amplitude=8.0, seed=123)
        a = synth_frame(scene, 120, 80)
        b = synth_frame(scene, 120, 80)
        assert np.array_equal(a.pixels, b.pixels)

    def test_different_seed_differs(self):
        base = SynthScene(led_centers=CENTERS, noise_amplitude=8.0, seed=1)
        other = SynthScene(led_centers=CENTERS, noise_amplitude=8.0, seed=2)
        assert not np.array_equal(
            synth_frame(base, 120, 80).pixels, synth_frame(other, 120, 80).pixels
        )

    def test_noiseless_disk_membership_is_exact(self):
        scene = SynthScene(led_centers=CENTERS, led_radius=5.0)
        frame = synth_frame(scene, 120, 80)
        xs = np.arange(120) + 0.5
        ys = np.arange(80) + 0.5
        gx, gy = np.meshgrid(xs, ys)
        expected = np.zeros((80, 120), dtype=bool)
        for cx, cy in CENTERS:
            expected |= (gx - cx) ** 2 + (gy - cy) ** 2 <= 25.0
        assert np.array_equal(frame.pixels == 255, expected)

    def test_rejects_wrong_center_count(self):
        with pytest.raises(SceneError):
            synth_frame(SynthScene(led_centers=CENTERS[:4]), 120, 80)

    def test_rejects_border_center(self):
        bad = CENTERS[:4] + [(2.0, 40.0)]
        with pytest.raises(SceneError):
            synth_frame(SynthScene(led_centers=bad, led_radius=5.0), 120, 80)

    def test_rejects_nonpositive_gain(self):
        with pytest.raises(SceneError):
            synth_frame(SynthScene(led_centers=CENTERS, gain=0.0), 120, 80)


class TestRandomScene:
    def test_reproducible(self):
        assert random_scene(5).led_centers == random_scene(5).led_centers

    def test_separation_honored(self):
        scene = random_scene(11, min_separation=30.0)
        pts = scene.led_centers
        for i in range(5):
            for j in range(i + 1, 5):
                dx = pts[i][0] - pts[j][0]
                dy = pts[i][1] - pts[j][1]
                assert (dx * dx + dy * dy) ** 0.5 >= 30.0

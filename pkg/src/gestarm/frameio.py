"""Grayscale frame I/O: binary PGM load/save and synthetic LED-glove frames.

Frames are 8-bit grayscale rasters (0 = black, 255 = white).  The synthetic
generator renders five bright disks standing in for the glove's fingertip
LEDs, with configurable illumination gain/offset and reproducible noise, so
the tracking pipeline can be driven and verified without a camera.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np


class PgmError(ValueError):
    """Base class for PGM parse failures."""


class PgmHeaderError(PgmError):
    """Missing/garbled magic, dimensions, or maxval token."""


class PgmMaxvalError(PgmError):
    """Well-formed header but maxval is not 255."""


class PgmTruncatedError(PgmError):
    """Header promises more pixel bytes than the payload contains."""


class SceneError(ValueError):
    """Synthetic scene violates its own constraints."""


# The tracking pipeline ignores frames smaller than this on either axis;
# the PGM parser itself accepts any size >= 1x1 (tiny frames are handy in
# codec tests).
MIN_PIPELINE_SIZE = 16

# Noise generator constants (32-bit linear congruential generator,
# Numerical Recipes variant).  Fixed so test frames are reproducible
# across machines and languages; see README "Synthetic frames".
LCG_MULTIPLIER = 1664525
LCG_INCREMENT = 1013904223
LCG_MODULUS = 1 << 32


@dataclass(eq=False)
class GrayFrame:
    """A grayscale raster; ``pixels`` is a (height, width) uint8 array."""

    pixels: np.ndarray
    seq: int = 0

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2:
            raise ValueError("pixels must be a 2-D (height, width) array")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass
class SynthScene:
    """Recipe for one synthetic glove frame.

    ``led_centers`` holds exactly five (x, y) subpixel positions, each at
    least ``led_radius`` away from every frame border.  ``gain`` scales the
    LED intensity (disk value = gain * 255 + offset), ``offset`` lifts the
    background, and ``noise_amplitude`` adds per-pixel uniform noise in
    [-amplitude, +amplitude] drawn from the seeded LCG above.
    """

    led_centers: list[tuple[float, float]]
    led_radius: float = 5.0
    gain: float = 1.0
    offset: float = 0.0
    noise_amplitude: float = 0.0
    seed: int = 0


def load_pgm(data: bytes) -> GrayFrame:
    """Parse a binary PGM (magic ``P5``, maxval 255) into a GrayFrame."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < 4:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            j = data.find(b"\n", i)
            i = n if j < 0 else j + 1
            continue
        if i >= n:
            raise PgmHeaderError("truncated PGM header")
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    if tokens[0] != b"P5":
        raise PgmHeaderError(f"expected magic P5, got {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PgmHeaderError(f"non-numeric PGM header field: {exc}") from None
    if width < 1 or height < 1:
        raise PgmHeaderError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise PgmMaxvalError(f"only maxval 255 is supported, got {maxval}")
    i += 1  # exactly one whitespace byte separates the header from pixels
    expected = width * height
    payload = data[i : i + expected]
    if len(payload) < expected:
        raise PgmTruncatedError(
            f"expected {expected} pixel bytes, got {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayFrame(pixels.copy(), seq=0)


def save_pgm(frame: GrayFrame) -> bytes:
    """Serialize a frame as binary PGM; inverse of :func:`load_pgm`."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def _lcg_noise(count: int, amplitude: float, seed: int) -> np.ndarray:
    """Uniform noise in [-amplitude, +amplitude), one value per pixel."""
    state = seed & 0xFFFFFFFF
    out = np.empty(count, dtype=np.float64)
    scale = 2.0 * amplitude / LCG_MODULUS
    for k in range(count):
        state = (LCG_MULTIPLIER * state + LCG_INCREMENT) & 0xFFFFFFFF
        out[k] = state * scale - amplitude
    return out


def synth_frame(scene: SynthScene, width: int, height: int, seq: int = 0) -> GrayFrame:
    """Render one synthetic glove frame.

    Pixel centers sit at integer + 0.5; a pixel belongs to an LED disk when
    its center is within ``led_radius`` (Euclidean) of the disk center.
    Intensities are computed in real arithmetic, floored, then clamped to
    [0, 255].  Deterministic for a fixed scene (including seed).
    """
    if len(scene.led_centers) != 5:
        raise SceneError(f"exactly 5 LED centers required, got {len(scene.led_centers)}")
    if scene.gain <= 0:
        raise SceneError(f"gain must be > 0, got {scene.gain}")
    r = scene.led_radius
    for cx, cy in scene.led_centers:
        if not (r <= cx <= width - r and r <= cy <= height - r):
            raise SceneError(
                f"LED center ({cx}, {cy}) is closer than {r} px to the border"
            )
    xs = np.arange(width, dtype=np.float64) + 0.5
    ys = np.arange(height, dtype=np.float64) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    disk = np.zeros((height, width), dtype=bool)
    for cx, cy in scene.led_centers:
        disk |= (gx - cx) ** 2 + (gy - cy) ** 2 <= r * r
    value = np.where(disk, scene.gain * 255.0 + scene.offset, float(scene.offset))
    if scene.noise_amplitude > 0:
        noise = _lcg_noise(width * height, scene.noise_amplitude, scene.seed)
        value = value + noise.reshape(height, width)
    pixels = np.clip(np.floor(value), 0.0, 255.0).astype(np.uint8)
    return GrayFrame(pixels, seq=seq)


# Default fingertip layout for the stock 320x240 desk-scale frame: five
# LED centers along a plausible hand arc, all well clear of the border.
DEFAULT_LED_CENTERS = [
    (110.0, 95.0),
    (140.0, 70.0),
    (170.0, 62.0),
    (200.0, 72.0),
    (227.0, 98.0),
]


def random_scene(
    seed: int,
    width: int = 320,
    height: int = 240,
    *,
    led_radius: float = 5.0,
    min_separation: float = 28.0,
    gain: float = 1.0,
    offset: float = 0.0,
    noise_amplitude: float = 0.0,
) -> SynthScene:
    """Place five non-overlapping LED centers uniformly at random.

    Uses :mod:`random`'s Mersenne Twister with the given seed, so scenes are
    reproducible.  Centers keep ``min_separation`` between each other and a
    small margin beyond ``led_radius`` from the border.
    """
    rng = random.Random(seed)
    margin = led_radius + 3.0
    centers: list[tuple[float, float]] = []
    attempts = 0
    while len(centers) < 5:
        attempts += 1
        if attempts > 10_000:
            raise SceneError("could not place 5 separated LED centers; relax constraints")
        x = rng.uniform(margin, width - margin)
        y = rng.uniform(margin, height - margin)
        if all(math.hypot(x - cx, y - cy) >= min_separation for cx, cy in centers):
            centers.append((x, y))
    return SynthScene(
        led_centers=centers,
        led_radius=led_radius,
        gain=gain,
        offset=offset,
        noise_amplitude=noise_amplitude,
        seed=seed,
    )

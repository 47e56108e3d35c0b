"""Fingertip tracking: contrast-stretch threshold, circle detection, hand center.

The pipeline turns a grayscale frame into a binary mask of near-saturated
pixels (the LED images), finds circular blobs with a Hough vote over
(cx, cy, r), keeps the five blobs whose radii sit closest to the median,
reduces them to a single hand-center point, and differences consecutive
centers into the per-frame displacement signal that drives the controller.
"""

from __future__ import annotations

import math
import statistics
from typing import NamedTuple, Optional

import numpy as np
from dataclasses import dataclass
from scipy.ndimage import maximum_filter

from .frameio import GrayFrame


class UniformFrameError(ValueError):
    """Frame has a single intensity; contrast stretch is undefined."""


class TrackingLostError(ValueError):
    """Fewer than five circle candidates; no fingertip set this frame."""


class SequenceOrderError(ValueError):
    """Hand centers arrived with non-increasing sequence numbers."""


# Stretched intensities at or above this value count as white.  The band
# [240, 255] keeps only near-saturated pixels, i.e. the LED images.
WHITE_BAND_LOW = 240.0

# Default circle search range for 320x240 desk-scale frames.
DEFAULT_R_MIN = 3
DEFAULT_R_MAX = 12


@dataclass(eq=False)
class BinaryFrame:
    """Boolean raster; True = white (255), False = black (0)."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError("bits must be a 2-D (height, width) array")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def to_gray(self) -> GrayFrame:
        """Render as a black/white GrayFrame (debug dumps)."""
        return GrayFrame(np.where(self.bits, 255, 0).astype(np.uint8))


class Circle(NamedTuple):
    cx: int
    cy: int
    r: int
    score: int


class HandCenter(NamedTuple):
    x: float
    y: float
    z: float
    seq: int


class Displacement(NamedTuple):
    dx: float
    dy: float
    dz: float


def normalize_and_threshold(frame: GrayFrame) -> BinaryFrame:
    """Min-max contrast stretch, then keep the near-saturated band.

    Each pixel p is stretched to (p - lo) * 255 / (hi - lo) in real
    arithmetic and marked white iff the stretched value is >= 240.  Because
    the stretch is invariant under positive affine changes of illumination,
    the binary output is too (as long as nothing clips).
    """
    lo = int(frame.pixels.min())
    hi = int(frame.pixels.max())
    if lo == hi:
        raise UniformFrameError(f"uniform frame (all pixels {lo}); skipping")
    stretched = (frame.pixels.astype(np.float64) - lo) * (255.0 / (hi - lo))
    return BinaryFrame(stretched >= WHITE_BAND_LOW)


def hough_circles(
    binary: BinaryFrame,
    r_min: int = DEFAULT_R_MIN,
    r_max: int = DEFAULT_R_MAX,
    *,
    peak_rel_threshold: float = 0.5,
) -> list[Circle]:
    """Vote white pixels into a (cx, cy, r) accumulator and return peaks.

    Every white pixel votes for the candidate centers on a circle of each
    radius around itself, sampled at max(16, ceil(2*pi*r)) angles.  Votes
    are then consolidated over 2x2 blocks (an even-diameter blob centers
    between cells, splitting its votes four ways) and peaks are block cells
    that are local maxima within r_min in their radius plane and score at
    least ``peak_rel_threshold`` of the global maximum.  Peaks are accepted
    greedily by score, suppressing any candidate whose circle intersects an
    accepted one (center distance < r1 + r2, floored at r_min), so one blob
    yields one detection.  Result is sorted by descending score.
    """
    h, w = binary.bits.shape
    if not (1 <= r_min <= r_max <= min(w, h) / 2):
        raise ValueError(
            f"radius range [{r_min}, {r_max}] invalid for {w}x{h} frame"
        )
    ys, xs = np.nonzero(binary.bits)
    if xs.size == 0:
        return []

    radii = list(range(r_min, r_max + 1))
    window = 2 * r_min + 1
    candidates: list[Circle] = []
    planes = []
    for r in radii:
        n_angles = max(16, math.ceil(2.0 * math.pi * r))
        theta = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
        dx = np.rint(r * np.cos(theta)).astype(np.intp)
        dy = np.rint(r * np.sin(theta)).astype(np.intp)
        ccx = xs[:, None] - dx[None, :]
        ccy = ys[:, None] - dy[None, :]
        ok = (ccx >= 0) & (ccx < w) & (ccy >= 0) & (ccy < h)
        flat = ccy[ok] * w + ccx[ok]
        votes = np.bincount(flat, minlength=h * w).reshape(h, w)
        # 2x2 block sum: cell (y, x) collects votes from {y-1, y} x {x-1, x}.
        padded = np.pad(votes, ((1, 0), (1, 0)))
        planes.append(
            padded[:-1, :-1] + padded[:-1, 1:] + padded[1:, :-1] + padded[1:, 1:]
        )

    best = max(int(p.max()) for p in planes)
    if best == 0:
        return []
    threshold = max(1, math.ceil(best * peak_rel_threshold))
    for r, plane in zip(radii, planes):
        local_max = maximum_filter(plane, size=window, mode="constant")
        py, px = np.nonzero((plane >= threshold) & (plane == local_max))
        for y, x in zip(py.tolist(), px.tolist()):
            candidates.append(Circle(x, y, r, int(plane[y, x])))

    candidates.sort(key=lambda c: (-c.score, c.r, c.cy, c.cx))
    kept: list[Circle] = []
    for cand in candidates:
        accept = True
        for c in kept:
            lim = max(r_min, cand.r + c.r)
            if (cand.cx - c.cx) ** 2 + (cand.cy - c.cy) ** 2 < lim * lim:
                accept = False
                break
        if accept:
            kept.append(cand)
    return kept


def select_fingertips(circles: list[Circle]) -> list[Circle]:
    """Keep the five circles whose radii sit closest to the median radius.

    Ties break toward higher score, then lower (cy, cx).  Raises
    :class:`TrackingLostError` when fewer than five candidates exist.
    """
    if len(circles) < 5:
        raise TrackingLostError(
            f"need 5 circle candidates, got {len(circles)}"
        )
    median_r = statistics.median(c.r for c in circles)
    ranked = sorted(circles, key=lambda c: (abs(c.r - median_r), -c.score, c.cy, c.cx))
    return ranked[:5]


def hand_center(tips: list[Circle], seq: int) -> HandCenter:
    """Reduce five fingertip circles to the hand-center point.

    x and y are half the coordinate range of the tips (|max - min| / 2);
    z is the difference of the x and y means after subtracting the
    respective half-range, a cheap depth proxy from hand spread.
    """
    if len(tips) != 5:
        raise ValueError(f"hand_center needs exactly 5 tips, got {len(tips)}")
    xs = [c.cx for c in tips]
    ys = [c.cy for c in tips]
    x_center = abs(max(xs) - min(xs)) / 2.0
    y_center = abs(max(ys) - min(ys)) / 2.0
    z_center = (sum(xs) - x_center) / 5.0 - (sum(ys) - y_center) / 5.0
    return HandCenter(x_center, y_center, z_center, seq)


def displacement(prev: Optional[HandCenter], curr: HandCenter) -> Displacement:
    """Pixel motion between consecutive hand centers; zero for the first."""
    if prev is None:
        return Displacement(0.0, 0.0, 0.0)
    if curr.seq <= prev.seq:
        raise SequenceOrderError(
            f"hand center seq {curr.seq} not after previous {prev.seq}"
        )
    return Displacement(curr.x - prev.x, curr.y - prev.y, curr.z - prev.z)

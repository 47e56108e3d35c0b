import numpy as np
import pytest

from gestarm.frameio import SynthScene, synth_frame


FIVE_DISK_CENTERS = [(50.0, 50.0), (100.0, 50.0), (150.0, 50.0), (75.0, 120.0), (125.0, 120.0)]


@pytest.fixture
def five_disk_frame():
    scene = SynthScene(led_centers=list(FIVE_DISK_CENTERS), led_radius=5.0)
    return synth_frame(scene, 200, 200)


@pytest.fixture
def gradient_frame():
    # 16x16 ramp between 10 and 200 with both extremes present
    arr = np.linspace(10, 200, 256).astype(np.uint8).reshape(16, 16)
    arr[0, 0] = 10
    arr[-1, -1] = 200
    return arr

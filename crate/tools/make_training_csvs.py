#!/usr/bin/env python3
"""Regenerate the two bundled training CSVs.

* testdata/train_constant.csv: two rows per (codec, resolution) of the
  bundled HLS ladder, all with VMAF 70. Forests trained on it predict a
  constant 70, which makes downstream behavior easy to reason about in the
  smoke tests.

* configs/training_example.csv: a plausibly shaped synthetic surface for the
  README walkthrough. Quality saturates with bitrate, drops with texture
  energy, scales with codec efficiency and resolution. Not measurements;
  stand-in labels with the right qualitative shape.
"""

import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

LADDER = {
    "avc": [
        (640, 360, 800_000),
        (768, 432, 1_200_000),
        (960, 540, 2_000_000),
        (1280, 720, 3_500_000),
        (1920, 1080, 6_000_000),
        (2560, 1440, 10_000_000),
        (3840, 2160, 16_000_000),
    ],
    "hevc": [
        (640, 360, 550_000),
        (768, 432, 850_000),
        (960, 540, 1_400_000),
        (1280, 720, 2_400_000),
        (1920, 1080, 4_200_000),
        (2560, 1440, 7_000_000),
        (3840, 2160, 11_000_000),
    ],
    "av1": [
        (640, 360, 450_000),
        (768, 432, 700_000),
        (960, 540, 1_100_000),
        (1280, 720, 2_000_000),
        (1920, 1080, 3_400_000),
        (2560, 1440, 5_600_000),
        (3840, 2160, 9_000_000),
    ],
}

HEADER = "segment_id,codec,width,height,bitrate_bps,E_Y,h,L_Y,vmaf"
EFFICIENCY = {"avc": 1.0, "hevc": 1.35, "av1": 1.6}
CONTENT = [
    (4.0, 0.3, 95.0),
    (18.0, 1.5, 110.0),
    (40.0, 3.5, 125.0),
    (75.0, 6.0, 85.0),
]


def constant_rows():
    rows = []
    n = 0
    for codec, rungs in LADDER.items():
        for width, height, bitrate in rungs:
            for scale, e_y in ((1.0, 10.0), (2.0, 20.0)):
                rows.append(
                    f"t{n:03d},{codec},{width},{height},{int(bitrate * scale)},"
                    f"{e_y:.6f},{1.0:.6f},{100.0:.6f},{70.0:.6f}"
                )
                n += 1
    return rows


def vmaf(codec, height, bitrate, e_y):
    capacity = 2.2e5 * (1.0 + e_y / 4.0) * height / 720.0
    v = 100.0 * (1.0 - math.exp(-EFFICIENCY[codec] * bitrate / capacity))
    return min(100.0, max(0.0, v))


def example_rows():
    rows = []
    n = 0
    for codec, rungs in LADDER.items():
        for width, height, bitrate in rungs:
            for e_y, h, l_y in CONTENT:
                for scale in (0.5, 1.0, 1.8):
                    b = int(bitrate * scale)
                    rows.append(
                        f"x{n:03d},{codec},{width},{height},{b},"
                        f"{e_y:.6f},{h:.6f},{l_y:.6f},{vmaf(codec, height, b, e_y):.6f}"
                    )
                    n += 1
    return rows


def write(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


write(ROOT / "testdata" / "train_constant.csv", constant_rows())
write(ROOT / "configs" / "training_example.csv", example_rows())

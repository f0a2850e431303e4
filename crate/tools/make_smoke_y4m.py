#!/usr/bin/env python3
"""Regenerate testdata/smoke_64x64_8f.y4m.

A fully deterministic 64x64, 8-frame, 30 fps clip: a diagonal luma gradient
drifting over time, neutral chroma. Textured and moving, so every feature is
nonzero, yet small enough to commit.
"""

import pathlib

WIDTH, HEIGHT, FRAMES = 64, 64, 8

out = pathlib.Path(__file__).resolve().parent.parent / "testdata" / "smoke_64x64_8f.y4m"
out.parent.mkdir(parents=True, exist_ok=True)

buf = bytearray()
buf += f"YUV4MPEG2 W{WIDTH} H{HEIGHT} F30:1 Ip A1:1 C420\n".encode()
for f in range(FRAMES):
    buf += b"FRAME\n"
    buf += bytes(
        (x * 3 + y * 5 + f * 7) % 256 for y in range(HEIGHT) for x in range(WIDTH)
    )
    buf += bytes([128]) * (WIDTH * HEIGHT // 2)

out.write_bytes(bytes(buf))
print(f"wrote {out} ({len(buf)} bytes)")

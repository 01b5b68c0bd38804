"""Hypothesis strategies shared by the test modules."""

import math

import numpy as np
from hypothesis import strategies as st

from plyforge.drawings import Point
from plyforge.ply.disks import PlyDisk
from plyforge.trees import random_tree

# disk sets keep every tangency and triple point this far away
MARGIN = 0.05


def _intersections(a, b):
    (x1, y1, r1), (x2, y2, r2) = a, b
    d = math.hypot(x2 - x1, y2 - y1)
    if d == 0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    along = (r1 ** 2 - r2 ** 2 + d ** 2) / (2 * d)
    h = math.sqrt(max(r1 ** 2 - along ** 2, 0.0))
    ux, uy = (x2 - x1) / d, (y2 - y1) / d
    mx, my = x1 + along * ux, y1 + along * uy
    return [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]


def well_separated(circles, margin=MARGIN):
    """No near-tangent pair and no intersection point near a third
    circle."""
    for i, a in enumerate(circles):
        for j in range(i + 1, len(circles)):
            b = circles[j]
            d = math.hypot(a[0] - b[0], a[1] - b[1])
            if abs(d - (a[2] + b[2])) < margin:
                return False
            if abs(d - abs(a[2] - b[2])) < margin:
                return False
            for px, py in _intersections(a, b):
                for k, c in enumerate(circles):
                    if k in (i, j):
                        continue
                    if abs(math.hypot(px - c[0], py - c[1]) - c[2]) < margin:
                        return False
    return True


@st.composite
def disk_sets(draw, min_disks=2, max_disks=6, margin=MARGIN):
    """Random disks with radii in [0.5, 1.5] and centers in [0, 3]^2,
    free of near-degenerate configurations.
    """
    count = draw(st.integers(min_value=min_disks, max_value=max_disks))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)
    while True:
        circles = [
            (rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0.5, 1.5))
            for _ in range(count)
        ]
        if well_separated(circles, margin):
            break
    return [
        PlyDisk(v, Point(float(x), float(y)), float(r))
        for v, (x, y, r) in enumerate(circles)
    ]


@st.composite
def tangent_chains(draw, max_disks=8):
    """Disks each tangent to an earlier one, mostly from outside and
    sometimes from inside.
    """
    count = draw(st.integers(min_value=2, max_value=max_disks))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)
    circles = [(0.0, 0.0, float(rng.uniform(0.5, 1.5)))]
    for _ in range(count - 1):
        x, y, r = circles[int(rng.integers(len(circles)))]
        radius = float(rng.uniform(0.5, 1.5))
        angle = float(rng.choice(np.arange(8)) * math.pi / 4)
        if radius < r and rng.random() < 0.25:
            gap = r - radius
        else:
            gap = r + radius
        circles.append(
            (x + gap * math.cos(angle), y + gap * math.sin(angle), radius)
        )
    return [
        PlyDisk(v, Point(x, y), r) for v, (x, y, r) in enumerate(circles)
    ]


@st.composite
def random_trees(draw, max_n=60, min_delta=3, max_delta=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    delta = draw(st.integers(min_value=min_delta, max_value=max_delta))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    return random_tree(n, delta, seed)

"""Pure-Python reference kernels.

Same contracts and floating-point operation order as ``_kernels.pyx``; used
when the compiled extension is unavailable and as the parity oracle in tests.
"""
import math

import numpy as np

SECTOR = math.pi / 4.0
HALF_SECTOR = math.pi / 8.0
SLIDE_PASSES = 3
SLIDE_BIAS = 1.0 + 1e-9
NO_HIT = -1
WALL_X = -2
WALL_Y = -3


def sense_all(x, y, heading, diameter, radius):
    """Sector occupancy codes and the contact adjacency for every robot.

    Returns ``(codes, adj)``: ``codes[i]`` has bit ``k`` set when another
    robot's surface is closer than ``radius`` and its bearing, relative to
    robot ``i``'s heading, falls in ``[45k - 22.5, 45k + 22.5)`` degrees.
    ``adj[i, j]`` is 1 for every such pair.
    """
    n = len(x)
    xs = x.tolist()
    ys = y.tolist()
    hs = heading.tolist()
    codes = np.zeros(n, dtype=np.uint8)
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        xi = xs[i]
        yi = ys[i]
        hi = hs[i]
        code = 0
        for j in range(n):
            if j == i:
                continue
            dx = xs[j] - xi
            dy = ys[j] - yi
            gap = math.sqrt(dx * dx + dy * dy) - diameter
            if gap < radius:
                rel = math.atan2(dy, dx) - hi
                k = int(math.floor((rel + HALF_SECTOR) / SECTOR)) % 8
                code |= 1 << k
                adj[i, j] = 1
        codes[i] = code
    return codes, adj


def move_clamped(x, y, dx, dy, diameter, side, passes=SLIDE_PASSES):
    """Advance robots in index order without interpenetration.

    Each robot travels along ``(dx[i], dy[i])`` until first contact with
    another robot or the walls of ``[r, side - r]``; the rest of the move is
    projected onto the contact tangent (robots and walls are frictionless)
    and retried, up to ``passes`` segments. Arrays are updated in place.
    """
    n = len(x)
    r = diameter / 2.0
    lo = r
    hi = side - r
    d2 = diameter * diameter
    for i in range(n):
        mx = float(dx[i])
        my = float(dy[i])
        xi = float(x[i])
        yi = float(y[i])
        for _ in range(passes):
            if mx == 0.0 and my == 0.0:
                break
            t = 1.0
            hit = NO_HIT
            if mx > 0.0:
                v = (hi - xi) / mx
                if v < t:
                    t = v
                    hit = WALL_X
            elif mx < 0.0:
                v = (lo - xi) / mx
                if v < t:
                    t = v
                    hit = WALL_X
            if my > 0.0:
                v = (hi - yi) / my
                if v < t:
                    t = v
                    hit = WALL_Y
            elif my < 0.0:
                v = (lo - yi) / my
                if v < t:
                    t = v
                    hit = WALL_Y
            a = mx * mx + my * my
            for j in range(n):
                if j == i:
                    continue
                px = xi - float(x[j])
                py = yi - float(y[j])
                b = 2.0 * (px * mx + py * my)
                if b >= 0.0:
                    continue
                c = px * px + py * py - d2
                if c <= 0.0:
                    t = 0.0
                    hit = j
                    break
                disc = b * b - 4.0 * a * c
                if disc < 0.0:
                    continue
                th = (-b - math.sqrt(disc)) / (2.0 * a)
                if th < t:
                    t = th
                    hit = j
            if t < 0.0:
                t = 0.0
            xi = min(max(xi + t * mx, lo), hi)
            yi = min(max(yi + t * my, lo), hi)
            if hit == NO_HIT:
                break
            rem = 1.0 - t
            mx = mx * rem
            my = my * rem
            if hit == WALL_X:
                mx = 0.0
            elif hit == WALL_Y:
                my = 0.0
            else:
                nx = xi - float(x[hit])
                ny = yi - float(y[hit])
                dot = mx * nx + my * ny
                if dot < 0.0:
                    # slight outward bias keeps the next segment non-approaching
                    k = dot * SLIDE_BIAS / (nx * nx + ny * ny)
                    mx = mx - k * nx
                    my = my - k * ny
        x[i] = xi
        y[i] = yi

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-tick kernels: sector sensing and clamped motion.

Mirrors ``_kernels_py`` operation for operation so both backends produce the
same trajectories.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, floor, sqrt, M_PI

cnp.import_array()

cdef double SECTOR = M_PI / 4.0
cdef double HALF_SECTOR = M_PI / 8.0
cdef int SLIDE_PASSES = 3
cdef double SLIDE_BIAS = 1.0 + 1e-9
cdef Py_ssize_t NO_HIT = -1
cdef Py_ssize_t WALL_X = -2
cdef Py_ssize_t WALL_Y = -3


def sense_all(double[::1] x, double[::1] y, double[::1] heading,
              double diameter, double radius):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double xi, yi, hi, dx, dy, gap, rel
    cdef int k, code
    codes_arr = np.zeros(n, dtype=np.uint8)
    adj_arr = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[::1] codes = codes_arr
    cdef unsigned char[:, ::1] adj = adj_arr
    for i in range(n):
        xi = x[i]
        yi = y[i]
        hi = heading[i]
        code = 0
        for j in range(n):
            if j == i:
                continue
            dx = x[j] - xi
            dy = y[j] - yi
            gap = sqrt(dx * dx + dy * dy) - diameter
            if gap < radius:
                rel = atan2(dy, dx) - hi
                k = <int>floor((rel + HALF_SECTOR) / SECTOR)
                k = ((k % 8) + 8) % 8
                code |= 1 << k
                adj[i, j] = 1
        codes[i] = <unsigned char>code
    return codes_arr, adj_arr


def move_clamped(double[::1] x, double[::1] y, double[::1] dx, double[::1] dy,
                 double diameter, double side, int passes=SLIDE_PASSES):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, hit
    cdef int p
    cdef double r = diameter / 2.0
    cdef double lo = r
    cdef double hi = side - r
    cdef double d2 = diameter * diameter
    cdef double mx, my, xi, yi, t, v, a, px, py, b, c, disc, th, rem, nx, ny, dot, k
    for i in range(n):
        mx = dx[i]
        my = dy[i]
        xi = x[i]
        yi = y[i]
        for p in range(passes):
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
                px = xi - x[j]
                py = yi - y[j]
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
                th = (-b - sqrt(disc)) / (2.0 * a)
                if th < t:
                    t = th
                    hit = j
            if t < 0.0:
                t = 0.0
            xi = _clip(xi + t * mx, lo, hi)
            yi = _clip(yi + t * my, lo, hi)
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
                nx = xi - x[hit]
                ny = yi - y[hit]
                dot = mx * nx + my * ny
                if dot < 0.0:
                    k = dot * SLIDE_BIAS / (nx * nx + ny * ny)
                    mx = mx - k * nx
                    my = my - k * ny
        x[i] = xi
        y[i] = yi


cdef inline double _clip(double v, double lo, double hi):
    if v < lo:
        v = lo
    if v > hi:
        v = hi
    return v

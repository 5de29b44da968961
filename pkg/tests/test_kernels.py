import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarmforage import _kernels_py, kernels

try:
    from swarmforage import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

needs_ext = pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")

D = 0.065
SIDE = 1.5


def scatter(rng, n, side=SIDE, spacing=D):
    """Non-overlapping random positions (rejection sampling)."""
    xs, ys = [], []
    while len(xs) < n:
        x, y = rng.uniform(D / 2, side - D / 2, size=2)
        if all(math.hypot(x - a, y - b) >= spacing for a, b in zip(xs, ys)):
            xs.append(x)
            ys.append(y)
    return np.array(xs), np.array(ys)


def min_gap(x, y):
    n = len(x)
    return min((math.hypot(x[i] - x[j], y[i] - y[j]) for i in range(n) for j in range(i)),
               default=math.inf)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_sensing(seed):
    rng = np.random.default_rng(seed)
    x, y = scatter(rng, 30, side=0.6)
    h = rng.uniform(0, 2 * math.pi, size=30)
    c1, a1 = _kernels_py.sense_all(x, y, h, D, 0.04)
    c2, a2 = _kernels_c.sense_all(x, y, h, D, 0.04)
    assert np.array_equal(c1, c2)
    assert np.array_equal(a1, a2)
    assert c1.any()


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_motion(seed):
    rng = np.random.default_rng(seed)
    x, y = scatter(rng, 30, side=0.5)
    ang = rng.uniform(0, 2 * math.pi, size=30)
    dx, dy = 0.03 * np.cos(ang), 0.03 * np.sin(ang)
    x1, y1, x2, y2 = x.copy(), y.copy(), x.copy(), y.copy()
    for _ in range(20):
        _kernels_py.move_clamped(x1, y1, dx, dy, D, SIDE)
        _kernels_c.move_clamped(x2, y2, dx, dy, D, SIDE)
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", [_kernels_py, _kernels_c], ids=["python", "cython"])
def test_head_on_contact_never_interpenetrates(impl):
    if impl is None:
        pytest.skip("compiled kernels not built")
    x = np.array([0.5, 0.6])
    y = np.array([0.75, 0.75])
    dx = np.array([0.01, -0.01])
    dy = np.zeros(2)
    for _ in range(20):
        impl.move_clamped(x, y, dx, dy, D, SIDE)
    gap = abs(x[1] - x[0]) - D
    assert gap >= -1e-12
    assert gap < 1e-9  # they do reach contact


def test_free_move_is_exact():
    x, y = np.array([0.5]), np.array([0.5])
    _kernels_py.move_clamped(x, y, np.array([0.01]), np.array([0.0]), D, SIDE)
    assert x[0] == pytest.approx(0.51, abs=1e-15)


def test_oblique_contact_slides_past():
    # neighbour 70 degrees off the direction of travel, already touching
    x = np.array([0.5, 0.5 + D * math.cos(math.radians(70))])
    y = np.array([0.5, 0.5 + D * math.sin(math.radians(70))])
    dx = np.array([0.01, 0.0])
    dy = np.zeros(2)
    _kernels_py.move_clamped(x, y, dx, dy, D, SIDE)
    assert x[0] > 0.5 + 1e-3
    assert math.hypot(x[1] - x[0], y[1] - y[0]) >= D - 1e-9


def test_walls_stop_and_slide():
    x, y = np.array([SIDE - D / 2 - 0.001]), np.array([0.7])
    ang = math.radians(30)
    _kernels_py.move_clamped(x, y, np.array([0.01 * math.cos(ang)]),
                             np.array([0.01 * math.sin(ang)]), D, SIDE)
    assert x[0] == pytest.approx(SIDE - D / 2)
    assert y[0] > 0.7 + 0.004


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 25), step=st.floats(0.001, 0.05))
def test_motion_never_interpenetrates(seed, n, step):
    rng = np.random.default_rng(seed)
    x, y = scatter(rng, n, side=0.6)
    for _ in range(10):
        ang = rng.uniform(0, 2 * math.pi, size=n)
        kernels.move_clamped(x, y, step * np.cos(ang), step * np.sin(ang), D, SIDE)
        assert min_gap(x, y) >= D - 1e-6
        assert np.all((x >= D / 2) & (x <= SIDE - D / 2))
        assert np.all((y >= D / 2) & (y <= SIDE - D / 2))

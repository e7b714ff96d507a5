"""The numba kernels and their numpy fallbacks must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from dirichlet_lab import _accel
from dirichlet_lab.frequency import primes_up_to, smallest_prime_factors


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def both(name, *args):
    return getattr(_accel, f"{name}_numpy")(*args), getattr(_accel, f"{name}_numba")(*args)


def test_weighted_prefix_sup(rng):
    terms = rng.standard_normal((50, 30)) + 1j * rng.standard_normal((50, 30))
    w = rng.uniform(0, 1, 30)
    a, b = both("weighted_prefix_sup", terms, w)
    assert np.allclose(a, b, rtol=1e-13)


def test_torus_eval_and_prefix(rng):
    theta = rng.uniform(0, 2 * np.pi, (40, 3))
    R = rng.integers(-3, 4, (12, 3))
    c = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    a, b = both("torus_eval", theta, R, c)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    w = (rng.uniform(size=12) > 0.4).astype(float)
    a, b = both("torus_prefix_sup", theta, R, c, w)
    assert np.allclose(a, b, rtol=1e-12)


def test_flow_kernels(rng):
    lam = np.log(np.arange(1, 201))
    c = rng.standard_normal(200) + 0j
    t = rng.uniform(-50, 50, 300)
    a, b = both("flow_eval", t, lam, c)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-11)
    cps = np.array([2, 8, 64, 200])
    a, b = both("flow_prefix_max", t, lam, c, cps)
    assert np.allclose(a, b, rtol=1e-11)


def test_grid_prefix_max_recurrence(rng):
    # the numba path rotates phases by a fixed step; it must track exact evaluation
    lam = np.log(np.arange(1, 3001))
    c = (-1.0) ** np.arange(1, 3001) + 0j
    cps = np.array([16, 1024, 3000])
    (ba, fa), (bb, fb) = both("grid_prefix_max", -100.0, 0.05, 4001, lam, c, cps)
    assert np.allclose(ba, bb, rtol=1e-10) and np.allclose(fa, fb, rtol=1e-9, atol=1e-9)
    grid = -100.0 + 0.05 * np.arange(4001)
    direct = _accel.flow_prefix_max_numpy(grid, lam, c, cps)
    assert np.allclose(ba, direct, rtol=1e-10)


def test_multiplicative_angles(rng):
    N = 500
    primes = primes_up_to(N)
    col = np.zeros(N + 1, dtype=np.int64)
    col[primes] = np.arange(len(primes))
    pa = rng.uniform(0, 2 * np.pi, (4, len(primes)))
    a, b = both("multiplicative_angles", pa, smallest_prime_factors(N), col)
    assert np.allclose(a, b, rtol=1e-13)
    # complete multiplicativity: chi(mn) = chi(m) chi(n)
    z = np.exp(1j * a)
    for m, n in [(6, 35), (12, 12), (7, 71)]:
        assert np.allclose(z[:, m * n - 1], z[:, m - 1] * z[:, n - 1])


def test_disable_flag_selects_numpy():
    env = dict(os.environ, DLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import dirichlet_lab as d; print(d.BACKEND)"], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"

import os
import subprocess
import sys

import numpy as np
import pytest

from wizer import _accel

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def problem(rng):
    nodes = np.arange(128) * (2 * np.pi / 128)
    return nodes, rng.uniform(0, 2 * np.pi, 60), rng.uniform(0.5, 2.0, 60)


@pytest.mark.parametrize("h", [0.001, 0.05, 1.0, 3.0])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_kde_sums_parity(problem, h, m):
    nodes, angles, weights = problem
    a_vals, a_dens = _accel.kde_sums_numba(nodes, angles, weights, h, m, 4)
    b_vals, b_dens = _accel.kde_sums_numpy(nodes, angles, weights, h, m, 4)
    scale = np.abs(b_vals).max()
    assert np.abs(a_vals - b_vals).max() <= 1e-13 * scale
    np.testing.assert_allclose(a_dens, b_dens, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_kernel_matrix_parity(problem, m):
    nodes, angles, _ = problem
    a = _accel.kernel_matrix_numba(nodes, angles, 0.1, m, 4)
    b = _accel.kernel_matrix_numpy(nodes, angles, 0.1, m, 4)
    assert a.shape == (60, 128)
    assert np.abs(a - b).max() <= 1e-13 * np.abs(b).max()


def test_kernel_matrix_rows_sum_to_kde(problem):
    nodes, angles, weights = problem
    K = _accel.kernel_matrix_numpy(nodes, angles, 0.2, 1, 4)
    vals, _ = _accel.kde_sums_numpy(nodes, angles, weights, 0.2, 1, 4)
    np.testing.assert_allclose(weights @ K, vals, atol=1e-12)


def test_sign_changes_parity(rng):
    rows = rng.choice([-1.0, 0.0, 1.0], size=(500, 17), p=[0.3, 0.4, 0.3])
    np.testing.assert_array_equal(_accel.sign_changes_rows_numba(rows), _accel.sign_changes_rows_numpy(rows))
    zero = np.zeros((3, 5))
    assert not _accel.sign_changes_rows_numpy(zero).any()


def test_env_flag_selects_numpy():
    code = "from wizer import _accel; print(_accel.backend())"
    env = dict(os.environ, WIZER_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["WIZER_DISABLE_NUMBA"] = ""
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"

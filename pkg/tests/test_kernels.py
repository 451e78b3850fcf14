import numpy as np
import pytest

from dliouville import kernels
from dliouville._accel import HAVE_NUMBA, backend

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable or disabled")


def test_backend_name():
    assert backend() in ("numba", "numpy")


@needs_numba
def test_trap_sum_backends_agree():
    rng = np.random.default_rng(0)
    z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-0.3, 0.3, 50)
    x = np.linspace(-10, 10, 301) + 0.4j
    w = np.exp(-x.real ** 2 / 10).astype(complex)
    a = kernels.trap_sum(z, x, w, use_numba=True)
    b = kernels.trap_sum(z, x, w, use_numba=False)
    assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(b))


@needs_numba
def test_log_poch_backends_agree():
    rng = np.random.default_rng(1)
    a = 0.7 * np.exp(2j * np.pi * rng.uniform(size=100))
    y = 0.5 * np.exp(0.3j)
    np.testing.assert_allclose(kernels.log_poch(a, y, use_numba=True),
                               kernels.log_poch(a, y, use_numba=False), rtol=1e-13, atol=1e-15)


def test_log_poch_matches_direct_product():
    a = np.array([0.3 + 0.1j, -0.5j])
    y = 0.4 + 0.2j
    direct = [np.sum(np.log(1 - t * y ** np.arange(200))) for t in a]
    np.testing.assert_allclose(np.exp(kernels.log_poch(a, y)), np.exp(direct), rtol=1e-13)


@pytest.mark.parametrize("use_numba", [False, pytest.param(True, marks=needs_numba)])
def test_liouville_row(use_numba):
    prev = np.array([2.0, 1.0, 3.0, 0.5])
    curr = np.array([1.0, 1.0, 2.0, 4.0])
    got = kernels.liouville_row(prev, curr, use_numba=use_numba)
    want = (1 + np.roll(curr, 1)) * (1 + np.roll(curr, -1)) / prev
    np.testing.assert_array_equal(got, want)


def test_disabled_flag_falls_back(monkeypatch):
    import importlib
    import subprocess
    import sys
    code = "from dliouville._accel import backend; print(backend())"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**__import__('os').environ, "DLIOUVILLE_DISABLE_NUMBA": "1"})
    assert out.stdout.strip() == "numpy"

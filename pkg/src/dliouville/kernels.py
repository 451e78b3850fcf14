"""Inner loops shared by the quantum dilogarithm and the lattice evolution.

Each public kernel has a numpy implementation; the numba version is used
when available (see :mod:`dliouville._accel`).  Both paths must agree to
rounding, which ``tests/test_kernels.py`` checks.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit

_CHUNK = 1 << 21  # complex entries per numpy block


# --------------------------------------------------------------------------
# trapezoid sum  S(z) = sum_k w_k exp(-2 i z x_k)

def _trap_sum_numpy(z, x, w):
    out = np.empty(z.shape[0], dtype=np.complex128)
    step = max(1, _CHUNK // max(1, x.shape[0]))
    for start in range(0, z.shape[0], step):
        zz = z[start:start + step]
        out[start:start + step] = np.exp(-2j * np.outer(zz, x)) @ w
    return out


@njit(cache=True)
def _trap_sum_jit(z, x, w):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in range(z.shape[0]):
        zi = -2j * z[i]
        acc = 0j
        for k in range(x.shape[0]):
            acc += w[k] * np.exp(zi * x[k])
        out[i] = acc
    return out


def trap_sum(z, x, w, use_numba=None):
    z = np.ascontiguousarray(z, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.complex128)
    w = np.ascontiguousarray(w, dtype=np.complex128)
    if _pick(use_numba):
        return _trap_sum_jit(z, x, w)
    return _trap_sum_numpy(z, x, w)


# --------------------------------------------------------------------------
# log of a q-Pochhammer symbol  sum_j log(1 - a y^j), |y| < 1

@njit(cache=True)
def _log_poch_jit(a, y, tol, maxterms):
    out = np.empty(a.shape[0], dtype=np.complex128)
    for i in range(a.shape[0]):
        t = a[i]
        acc = 0j
        n = 0
        while n < maxterms:
            if abs(t) < 1e-4:
                acc += -t * (1.0 + t * (0.5 + t * (1.0 / 3.0 + t * 0.25)))
                if abs(t) < tol:
                    break
            else:
                d = 1.0 - t
                if d == 0:
                    acc = complex(-np.inf, 0.0)
                    break
                acc += np.log(d)
            t = t * y
            n += 1
        out[i] = acc
    return out


def _log_poch_numpy(a, y, tol, maxterms):
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    ay = abs(y)
    if amax == 0.0:
        return np.zeros(a.shape, dtype=np.complex128)
    nterms = int(np.ceil((np.log(amax) - np.log(tol)) / -np.log(ay))) + 2
    nterms = max(1, min(nterms, maxterms))
    powers = y ** np.arange(nterms)
    t = np.outer(a, powers)
    small = np.abs(t) < 1e-4
    vals = np.empty_like(t)
    ts = t[small]
    vals[small] = -ts * (1.0 + ts * (0.5 + ts * (1.0 / 3.0 + ts * 0.25)))
    with np.errstate(divide="ignore"):
        vals[~small] = np.log(1.0 - t[~small])
    return vals.sum(axis=1)


def log_poch(a, y, tol=1e-18, maxterms=100000, use_numba=None):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    y = complex(y)
    if not abs(y) < 1.0:
        raise ValueError("q-Pochhammer base must satisfy |y| < 1")
    if _pick(use_numba):
        return _log_poch_jit(a, y, tol, maxterms)
    return _log_poch_numpy(a, y, tol, maxterms)


# --------------------------------------------------------------------------
# one time step of the periodic discrete Liouville equation

@njit(cache=True)
def _liouville_row_jit(prev, curr):
    n = curr.shape[0]
    out = np.empty(n)
    for m in range(n):
        left = curr[(m - 1) % n]
        right = curr[(m + 1) % n]
        out[m] = (1.0 + left) * (1.0 + right) / prev[m]
    return out


def _liouville_row_numpy(prev, curr):
    return (1.0 + np.roll(curr, 1)) * (1.0 + np.roll(curr, -1)) / prev


def liouville_row(prev, curr, use_numba=None):
    prev = np.ascontiguousarray(prev, dtype=np.float64)
    curr = np.ascontiguousarray(curr, dtype=np.float64)
    if _pick(use_numba):
        return _liouville_row_jit(prev, curr)
    return _liouville_row_numpy(prev, curr)


def _pick(use_numba):
    if use_numba is None:
        return HAVE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    return bool(use_numba)

"""Periodic discrete Liouville equation

    chi[m, n-1] * chi[m, n+1] = (1 + chi[m-1, n]) * (1 + chi[m+1, n]),

with m taken mod 2N.  A state holds two consecutive time rows.  Rows are
stored in full (2N entries each); the two checkerboard sublattices do not
interact, and the one with m + n odd is the one tied to triangulations.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import PositivityError


@dataclass(frozen=True)
class ZigzagState:
    """Rows chi[., n0-1] (``row_prev``) and chi[., n0] (``row_curr``), n0 = time_origin."""
    N: int
    row_prev: np.ndarray
    row_curr: np.ndarray
    time_origin: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        prev = np.array(self.row_prev, dtype=np.float64)
        curr = np.array(self.row_curr, dtype=np.float64)
        if prev.shape != (2 * self.N,) or curr.shape != (2 * self.N,):
            raise ValueError(f"rows must have length 2N = {2 * self.N}")
        _check_positive(prev)
        _check_positive(curr)
        prev.setflags(write=False)
        curr.setflags(write=False)
        object.__setattr__(self, "row_prev", prev)
        object.__setattr__(self, "row_curr", curr)

    def chi(self, m, n):
        """Value at site (m, n) for n in {n0 - 1, n0}."""
        if n == self.time_origin:
            return float(self.row_curr[m % (2 * self.N)])
        if n == self.time_origin - 1:
            return float(self.row_prev[m % (2 * self.N)])
        raise IndexError(f"row {n} not stored (have {self.time_origin - 1}, {self.time_origin})")

    @property
    def row_even(self):
        return self.row_curr if self.time_origin % 2 == 0 else self.row_prev

    @property
    def row_odd(self):
        return self.row_prev if self.time_origin % 2 == 0 else self.row_curr

    def allclose(self, other, rtol=1e-12):
        return (self.N == other.N and self.time_origin == other.time_origin
                and _rel(self.row_prev, other.row_prev) <= rtol
                and _rel(self.row_curr, other.row_curr) <= rtol)


def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))))


def _check_positive(row):
    if not (np.all(np.isfinite(row)) and np.all(row > 0)):
        raise PositivityError("lattice field left the positive reals (overflow or underflow)")


def step(state: ZigzagState) -> ZigzagState:
    new = kernels.liouville_row(state.row_prev, state.row_curr)
    _check_positive(new)
    return ZigzagState(state.N, state.row_curr, new, state.time_origin + 1)


def step_back(state: ZigzagState) -> ZigzagState:
    older = kernels.liouville_row(state.row_curr, state.row_prev)
    _check_positive(older)
    return ZigzagState(state.N, older, state.row_prev, state.time_origin - 1)


def lightcone_step(state: ZigzagState) -> ZigzagState:
    """State of chi'[m, n] = chi[m-1, n+1] on the same two time rows."""
    nxt = step(state).row_curr
    return ZigzagState(state.N, np.roll(state.row_curr, 1), np.roll(nxt, 1), state.time_origin)


def lightcone_step_inverse(state: ZigzagState) -> ZigzagState:
    curr = np.roll(state.row_prev, -1)
    nxt = np.roll(state.row_curr, -1)
    prev = kernels.liouville_row(nxt, curr)
    _check_positive(prev)
    return ZigzagState(state.N, prev, curr, state.time_origin)


def evolve(state: ZigzagState, n_steps: int):
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    traj = [state]
    for _ in range(n_steps):
        traj.append(step(traj[-1]))
    return traj


def trajectory_rows(traj):
    """(times, rows) with rows[k] = chi[., times[k]] including the first prev row."""
    rows = [traj[0].row_prev] + [s.row_curr for s in traj]
    times = [traj[0].time_origin - 1] + [s.time_origin for s in traj]
    return np.array(times), np.vstack(rows)


def equation_residuals(rows):
    """Residual |lhs - rhs| / (lhs + rhs) at every interior time of a row stack."""
    rows = np.asarray(rows, dtype=np.float64)
    lhs = rows[:-2] * rows[2:]
    mid = rows[1:-1]
    rhs = (1 + np.roll(mid, 1, axis=1)) * (1 + np.roll(mid, -1, axis=1))
    return np.abs(lhs - rhs) / (lhs + rhs)


def max_residual(traj) -> float:
    _, rows = trajectory_rows(traj)
    if rows.shape[0] < 3:
        return 0.0
    return float(equation_residuals(rows).max())


def zero_mode_step(z_prev, z_curr):
    if not (z_prev > 0 and z_curr > 0):
        raise PositivityError("zero-mode recursion needs positive inputs")
    return (1 + z_curr) ** 2 / z_prev


def zero_mode_orbit(z_prev, z_curr, n_steps):
    out = [z_prev, z_curr]
    for _ in range(n_steps):
        out.append(zero_mode_step(out[-2], out[-1]))
    return out


# --------------------------------------------------------------------------
# zigzag identification with Fock coordinates f_1..f_{2N}

def to_zigzag(state: ZigzagState):
    """f_m = chi[m, n0] for odd m, 1/chi[m, n0-1] for even m (m = 1..2N)."""
    f = []
    for m in range(1, 2 * state.N + 1):
        k = m % (2 * state.N)
        f.append(state.row_curr[k] if m % 2 else 1.0 / state.row_prev[k])
    return np.array(f)


def from_zigzag(f, fill=1.0, time_origin=0) -> ZigzagState:
    """State whose odd sublattice carries the zigzag data f_1..f_{2N}."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1 or f.size % 2:
        raise ValueError("need 2N zigzag values")
    N = f.size // 2
    prev = np.full(2 * N, float(fill))
    curr = np.full(2 * N, float(fill))
    for m in range(1, 2 * N + 1):
        k = m % (2 * N)
        if m % 2:
            curr[k] = f[m - 1]
        else:
            prev[k] = 1.0 / f[m - 1]
    return ZigzagState(N, prev, curr, time_origin)


# --------------------------------------------------------------------------
# export

def trajectory_csv(traj) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"# N={traj[0].N}", f"time_origin={traj[0].time_origin}"])
    w.writerow(["n", "m", "chi"])
    times, rows = trajectory_rows(traj)
    for n, row in zip(times, rows):
        for m, v in enumerate(row):
            w.writerow([int(n), m, repr(float(v))])
    return buf.getvalue()

import numpy as np
import pytest

from dliouville import lattice, volkov
from dliouville.errors import PositivityError
from dliouville.lattice import ZigzagState


def _random_state(N, seed=0, lo=0.5, hi=2.0):
    rng = np.random.default_rng(seed)
    return ZigzagState(N, rng.uniform(lo, hi, 2 * N), rng.uniform(lo, hi, 2 * N))


def test_step_single_site():
    # chi[m-1,n] = chi[m+1,n] = 1, chi[m,n-1] = 2  ->  chi[m,n+1] = 2
    st = ZigzagState(2, [2.0, 1.0, 2.0, 1.0], [1.0, 1.0, 1.0, 1.0])
    assert lattice.step(st).row_curr[0] == 2.0


def test_step_n1_periodic_neighbours():
    st = ZigzagState(1, [1.0, 1.0], [1.0, 1.0])
    nxt = lattice.step(st)
    assert nxt.chi(0, 1) == 4.0 and nxt.time_origin == 1


def test_lightcone_n1_zigzag():
    st = lattice.from_zigzag([1.0, 1.0])
    f = lattice.to_zigzag(lattice.lightcone_step(st))
    assert np.allclose(f, [4.0, 1.0], rtol=0, atol=1e-15)


def test_step_back_round_trip():
    st = _random_state(3, seed=1)
    back = st
    for _ in range(20):
        back = lattice.step(back)
    for _ in range(20):
        back = lattice.step_back(back)
    assert back.allclose(st, rtol=1e-12)


def test_lightcone_inverse():
    st = _random_state(4, seed=2)
    assert lattice.lightcone_step_inverse(lattice.lightcone_step(st)).allclose(st, 1e-12)


def test_lightcone_matches_volkov_shift():
    pair = volkov.get_pair("exp_sine")
    N = 3
    eps = volkov.epsilon_for(pair, 1, N)
    st = volkov.sample_lattice(pair, eps, N)
    got = lattice.lightcone_step(st)
    ms = np.arange(2 * N)
    want = volkov.sample_rows(pair, eps, ms - 1, [0, 1])
    assert np.max(np.abs(got.row_prev / want[0] - 1)) < 1e-12
    assert np.max(np.abs(got.row_curr / want[1] - 1)) < 1e-12


def test_evolve_zero_steps():
    st = _random_state(2)
    assert lattice.evolve(st, 0) == [st]
    with pytest.raises(ValueError):
        lattice.evolve(st, -1)


def test_evolve_residual_100_steps():
    traj = lattice.evolve(_random_state(2, seed=3), 100)
    assert len(traj) == 101
    assert lattice.max_residual(traj) < 1e-10
    assert all(np.all(np.isfinite(s.row_curr)) for s in traj)


def test_zero_mode():
    assert lattice.zero_mode_step(1, 1) == 4
    assert lattice.zero_mode_step(1, 4) == 25
    with pytest.raises(PositivityError):
        lattice.zero_mode_step(0.0, 1.0)


def test_constant_rows_follow_zero_mode():
    orbit = lattice.zero_mode_orbit(1.3, 0.7, 6)
    st = ZigzagState(1, [1.3, 1.3], [0.7, 0.7])
    for k, s in enumerate(lattice.evolve(st, 6)):
        assert np.all(s.row_curr == orbit[k + 1])


def test_state_validation():
    with pytest.raises(PositivityError):
        ZigzagState(1, [1.0, -1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        ZigzagState(2, [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(PositivityError):
        ZigzagState(1, [np.inf, 1.0], [1.0, 1.0])


def test_overflow_is_signalled():
    st = ZigzagState(1, [1e-200, 1e-200], [1e200, 1e200])
    with pytest.raises(PositivityError):
        lattice.step(st)


def test_periodic_index_and_rows():
    st = _random_state(2, seed=4)
    assert st.chi(5, 0) == st.chi(1, 0)
    with pytest.raises(IndexError):
        st.chi(0, 3)


def test_zigzag_round_trip():
    f = np.array([0.5, 2.0, 3.0, 0.25])
    assert np.allclose(lattice.to_zigzag(lattice.from_zigzag(f)), f, rtol=1e-15)


def test_csv_export():
    text = lattice.trajectory_csv(lattice.evolve(_random_state(2), 2))
    lines = text.splitlines()
    assert lines[0].startswith("# N=2")
    assert lines[1] == "n,m,chi"
    assert len(lines) == 2 + 4 * 4

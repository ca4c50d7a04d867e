import math

import numpy as np
import pytest

from rrlab.dynamics import (GridSpec, dv_dp, integrate_rk4, ld_rapidity_rhs, solve_trajectory, v_of_z)
from rrlab.errors import GridTooCoarse, OutOfGrid, TurningPoint
from rrlab.potential import PotentialSpec

from conftest import P_BAR, Z0

V_I = math.sqrt(0.01 - 0.001)


def test_v_of_z_free(consts):
    assert v_of_z(consts, PotentialSpec(), 0.1, 5.0) == pytest.approx(0.1)


def test_v_of_z_plateau(consts, ramp):
    assert v_of_z(consts, ramp, 0.1, -3.0) == pytest.approx(V_I, rel=1e-14)


def test_turning_point(consts):
    with pytest.raises(TurningPoint):
        v_of_z(consts, PotentialSpec(v_minus_inf=6e-3), 0.1, -3.0)
    with pytest.raises(TurningPoint):
        solve_trajectory(consts, PotentialSpec(v_minus_inf=6e-3), 0.1, 5.0)


def test_free_motion(free_traj):
    t = free_traj.t_grid
    np.testing.assert_allclose(free_traj.z_of_t, 5.0 + 0.1 * t, atol=1e-11)
    assert np.all(free_traj.a_of_t == 0.0)
    assert free_traj.T0 == pytest.approx(-50.0, rel=1e-12)


def test_standard_trajectory_frozen(traj):
    assert traj.v_i == pytest.approx(0.094868329805051388, rel=1e-14)
    assert traj.v_f == pytest.approx(0.1, rel=1e-15)
    assert traj.T0 == pytest.approx(-50.079982466950959, rel=1e-11)
    assert traj.t_grid[traj.i_zero] == 0.0
    assert traj.z_of_t[traj.i_zero] == pytest.approx(Z0, abs=1e-12)


def test_energy_and_acceleration_consistency(consts, ramp, traj):
    V, Vp, _ = ramp(traj.z_of_t)
    E = 0.5 * traj.v_of_t**2 + V
    assert np.max(np.abs(E - E[0])) / E[0] <= 1e-9
    np.testing.assert_allclose(traj.a_of_t, -Vp, atol=1e-9 * np.max(np.abs(Vp)))


def test_acceleration_support(traj):
    nz = np.nonzero(traj.a_of_t)[0]
    assert nz[0] > 0 and nz[-1] < len(traj.t_grid) - 1
    assert np.all(traj.a_of_t >= 0.0)
    assert np.all(np.abs(traj.z_of_t[nz]) < 1.0)


def test_velocity_change_integral(traj):
    dv = traj.dt * np.sum(traj.a_of_t)
    assert dv == pytest.approx(0.1 - V_I, rel=1e-9)
    assert dv == pytest.approx(0.0051317, abs=1e-7)


def test_rk4_oracle(consts, ramp, traj):
    t_samples = traj.t_grid[::64]
    t_samples = t_samples[t_samples <= 0.0]
    z_start = traj.z_of_t[0]
    z, v = integrate_rk4(consts, ramp, z_start, traj.v_of_t[0], t_samples - t_samples[0], substeps=16)
    np.testing.assert_allclose(z, traj.z_of_t[::64][: len(z)], atol=1e-8)


def test_dv_dp_free(consts, free_traj):
    np.testing.assert_allclose(dv_dp(free_traj), 1.0, rtol=1e-12)


def test_dv_dp_left_plateau(traj):
    t = traj.t_in - 1.0
    assert float(dv_dp(traj, t)) == pytest.approx(0.1 / V_I, rel=1e-10)
    assert float(dv_dp(traj, t)) == pytest.approx(1.05409, abs=1e-5)


@pytest.mark.parametrize("t", [-55.0, -50.0, -45.0, -20.0])
def test_dv_dp_finite_difference(consts, ramp, traj, t):
    d = 1e-6
    up = solve_trajectory(consts, ramp, P_BAR + d, Z0).sample(t)[1]
    dn = solve_trajectory(consts, ramp, P_BAR - d, Z0).sample(t)[1]
    fd = (up - dn) / (2 * d)
    assert float(dv_dp(traj, t)) == pytest.approx(float(fd[0]), rel=1e-6)


def test_out_of_grid(traj):
    with pytest.raises(OutOfGrid):
        dv_dp(traj, traj.t_grid[-1] + 1.0)


def test_rapidity_rhs(consts):
    assert ld_rapidity_rhs(consts, 0.0, 0.0) == 0.0
    assert ld_rapidity_rhs(consts, 0.0, 1.0) == pytest.approx(1 / (6 * math.pi))
    assert ld_rapidity_rhs(consts, 0.0, 0.3) > 0.0


def test_z0_before_ramp_rejected(consts, ramp):
    with pytest.raises(ValueError):
        solve_trajectory(consts, ramp, 0.1, 0.5)


def test_coarse_grid(consts, ramp):
    with pytest.raises(GridTooCoarse):
        solve_trajectory(consts, ramp, 0.1, 5.0, GridSpec(n_points=256))


def test_scaling_identity_deviation_is_first_order(consts):
    # a(kp, t/k) = a(p, t) holds in the free-flight parametrization; the exact
    # trajectory deviates at relative O(2mV/p^2)
    k = 1.01
    devs = []
    for vm in (2e-4, 1e-4, 5e-5):
        pot = PotentialSpec(v_minus_inf=vm)
        a = solve_trajectory(consts, pot, 0.1, 5.0)
        b = solve_trajectory(consts, pot, 0.1 * k, 5.0)
        t = np.linspace(a.t_in, a.t_out, 801)
        aa, bb = a.sample(t)[2], b.sample(t / k)[2]
        devs.append(np.max(np.abs(aa - bb)) / np.max(np.abs(aa)))
    assert devs[-1] <= 1e-4
    for x, y in zip(devs[:-1], devs[1:]):
        assert x / y == pytest.approx(2.0, rel=0.1)


def test_a_squared_grid_refinement(consts, ramp, traj):
    fine = solve_trajectory(consts, ramp, P_BAR, Z0, GridSpec(n_points=2**15))
    coarse = traj.dt * np.sum(traj.a_of_t**2)
    refined = fine.dt * np.sum(fine.a_of_t**2)
    assert refined == pytest.approx(coarse, rel=1e-9)


def test_csv(traj, tmp_path):
    path = tmp_path / "trajectory.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,z,v,a" and len(lines) == len(traj.t_grid) + 1

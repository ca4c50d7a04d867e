import cmath
import math
from dataclasses import replace

import numpy as np
import pytest

from rrlab.errors import OmegaOutOfRange, TurningPoint
from rrlab.potential import PotentialSpec
from rrlab.wkb import (WkbProblem, amplitude_asymptotic, amplitude_direct, amplitude_full, amplitude_ladder,
                       amplitude_time_component, classical_current_amplitude, classical_current_limit,
                       effective_z0, k_approximation_error, wkb_mode, wkb_mode_parts)

from conftest import LADDER


@pytest.fixture(scope="module")
def problem(consts, ramp):
    return WkbProblem(consts, ramp, 0.1, 0.02, 0.0, LADDER)


@pytest.fixture(scope="module")
def ladder(problem, traj, spectrum):
    return amplitude_ladder(problem, traj, spectrum)


def test_problem_validation(consts, ramp):
    with pytest.raises(TurningPoint):
        WkbProblem(consts, ramp, 0.1, 0.02)  # hbar = 1: P^2 < 0
    with pytest.raises(ValueError):
        WkbProblem(consts.with_hbar(1e-3), ramp, 0.1, 0.02, k_z=0.03)
    with pytest.raises(ValueError):
        WkbProblem(consts.with_hbar(1e-3), ramp, 0.1, -0.02)
    pr = WkbProblem(consts.with_hbar(1e-3), ramp, 0.1, 0.02)
    assert pr.P == pytest.approx(math.sqrt(0.01 - 2 * 1e-3 * 0.02), rel=1e-15)


def test_zero_potential_amplitude(consts):
    pr = WkbProblem(consts.with_hbar(1e-3), PotentialSpec(), 0.1, 0.02)
    assert amplitude_direct(pr) == 0.0


def test_ladder_frozen(ladder):
    g = ladder[2].G_direct
    assert g.real == pytest.approx(9.3381500643849693e-05, rel=1e-6)
    assert g.imag == pytest.approx(0.051164780865937766, rel=1e-9)


def test_ladder_convergence(ladder):
    errs = [r.rel_error for r in ladder]
    assert all(b < a for a, b in zip(errs[:-1], errs[1:]))
    assert errs[-1] / errs[-2] <= 0.75
    assert ladder[2].rel_error <= 5e-2


def test_asymptotic_modulus_and_phase(problem, traj, spectrum):
    pr = problem.at_hbar(1e-3)
    g = amplitude_asymptotic(pr, traj, spectrum, 5.0)
    assert abs(g) == pytest.approx(2 * 0.1 / 0.02 * abs(complex(spectrum.evaluate(0.02))), rel=1e-14)
    moved = amplitude_asymptotic(pr, traj, spectrum, 5.0 + 0.7)
    assert moved / g == pytest.approx(cmath.exp(1j * 0.02 * 0.7 / pr.P), rel=1e-12)
    assert effective_z0(pr, traj) == pytest.approx(5.0, rel=0.05)
    narrow = replace(spectrum, omega_grid=np.linspace(-0.01, 0.01, 3), a_hat=np.zeros(3, complex),
                     da_hat_domega=np.zeros(3, complex))
    with pytest.raises(OmegaOutOfRange):
        amplitude_asymptotic(pr, traj, narrow)


def test_time_component_vanishes_at_zero_kz(ladder):
    for r in ladder:
        assert abs(r.G0_direct) <= 1e-3 * abs(r.G_direct)


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_time_component_ratio(consts, ramp, sign):
    pr = WkbProblem(consts.with_hbar(5e-4), ramp, 0.1, 0.02, sign * 0.5 * 0.02)
    ratio = amplitude_time_component(pr) / amplitude_direct(pr)
    assert abs(ratio + sign * 0.5) <= 0.05 * 0.5
    assert abs(ratio.imag) < 1e-6


def test_full_prefactor_difference_is_second_order_in_hbar(problem):
    d = [abs(amplitude_full(problem.at_hbar(h)) - amplitude_direct(problem.at_hbar(h))) for h in (1e-3, 5e-4)]
    assert d[0] / d[1] == pytest.approx(4.0, rel=0.2)


def test_damped_variant_approaches_direct(problem):
    pr = problem.at_hbar(1e-3)
    ref = amplitude_direct(pr)
    errs = [abs(amplitude_direct(pr, "damped", eps) - ref) for eps in (1e-3, 1e-4)]
    assert errs[1] < errs[0] / 5
    with pytest.raises(ValueError):
        amplitude_direct(pr, "filon")


def test_k_approximation_linear_in_hbar(problem):
    e = [k_approximation_error(problem.at_hbar(h)) for h in (2e-3, 1e-3, 5e-4)]
    assert e[0] / e[1] == pytest.approx(2.0, rel=0.05)
    assert e[1] / e[2] == pytest.approx(2.0, rel=0.05)


def test_classical_current(consts, traj, spectrum):
    w = 0.02
    exact = classical_current_amplitude(consts, traj, w, 0.0)
    assert exact * w / 1j == pytest.approx(complex(spectrum.evaluate(w)), rel=1e-8)
    kz = 0.1 * w
    ex = classical_current_amplitude(consts, traj, w, kz)
    lim = classical_current_limit(consts, spectrum, w, kz)
    assert abs(ex - lim) / abs(lim) <= 2 * traj.v_f / consts.c


def test_classical_current_zero(consts, free_traj):
    assert classical_current_amplitude(consts, free_traj, 0.02, 0.0) == 0.0


def test_wkb_mode(consts, ramp):
    z = np.linspace(-4, 4, 17)
    free = wkb_mode(consts, PotentialSpec(), 0.1, z)
    np.testing.assert_allclose(free, np.exp(1j * 0.1 * z), rtol=1e-12)
    amp, phase = wkb_mode_parts(consts, ramp, 0.1, z)
    kap = np.sqrt(0.01 - 2 * ramp(z)[0])
    np.testing.assert_allclose(np.abs(wkb_mode(consts, ramp, 0.1, z)) ** 2, 0.1 / kap, rtol=1e-13)
    _, ph = wkb_mode_parts(consts, ramp, 0.1, np.array([2.0, 7.5]))
    assert ph[1] - ph[0] == pytest.approx(0.1 * 5.5 / consts.hbar, rel=1e-13)
    with pytest.raises(TurningPoint):
        wkb_mode(consts, PotentialSpec(v_minus_inf=6e-3), 0.1, 0.0)

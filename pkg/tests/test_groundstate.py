import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from katlas.cache import cache_key, solve_cached
from katlas.errors import PreconditionError
from katlas.groundstate import (
    Outcome,
    RadialProfile,
    ShootingConfig,
    action,
    closed_form_1d,
    dirichlet_norm_sq,
    find_bound_state,
    pohozaev_residual_q,
    potential_integral,
    shoot,
    tail_decay_rate,
    time_map,
)
from katlas.nonlinearity import PowerNonlinearity

CUBIC = PowerNonlinearity.single(1.0, 4.0)

# literature values for -Lap Q + Q = Q^3 in R^2 (Townes profile): ||Q||_2^2 = ||grad Q||_2^2
TOWNES_MASS = 11.70089652
TOWNES_PEAK = 2.2062009


def test_1d_sech_oracle():
    bs = closed_form_1d(CUBIC)
    x, v = bs.profile.r, bs.profile.v
    exact = math.sqrt(2) / np.cosh(x)
    assert np.max(np.abs(v - exact)) < 1e-9
    assert bs.D == pytest.approx(4 / 3, rel=1e-10)
    assert bs.S == pytest.approx(4 / 3, rel=1e-10)
    assert bs.zeta0 == pytest.approx(math.sqrt(2), rel=1e-15)


def test_1d_general_power():
    # v = (p/2)^(1/(p-2)) sech^(2/(p-2))((p-2) x / 2) for f = -v + v^(p-1)
    p = 3.0
    bs = closed_form_1d(PowerNonlinearity.single(1.0, p))
    x = bs.profile.r
    exact = (p / 2) ** (1 / (p - 2)) / np.cosh((p - 2) * x / 2) ** (2 / (p - 2))
    assert np.max(np.abs(bs.profile.v - exact)) < 1e-9
    assert abs(pohozaev_residual_q(bs)) < 1e-9 * bs.D


def test_time_map_inverts_profile():
    bs = closed_form_1d(CUBIC)
    for i in range(50, len(bs.profile.r), 400):
        assert time_map(CUBIC, bs.profile.v[i]) == pytest.approx(bs.profile.r[i], abs=1e-6)


def test_find_bound_state_n1_rejects_excited():
    with pytest.raises(PreconditionError):
        find_bound_state(CUBIC, 1, k=1)


def test_townes_profile(state):
    bs = state(2, 4.0, 0)
    assert bs.D == pytest.approx(TOWNES_MASS, rel=1e-8)
    assert bs.zeta0 == pytest.approx(TOWNES_PEAK, rel=1e-6)
    # N=2: the potential term integrates to zero
    assert abs(potential_integral(bs.profile, CUBIC)) < 1e-8 * bs.D


@pytest.mark.parametrize("N,p,k", [(2, 4.0, 1), (3, 4.0, 0), (3, 4.0, 1), (4, 3.0, 0), (5, 2.5, 0)])
def test_pohozaev_and_nodes(state, N, p, k):
    bs = state(N, p, k)
    assert bs.nodes == k == bs.profile.node_count()
    assert abs(bs.S - bs.D / N) <= 1e-8 * bs.D
    assert action(bs.profile, bs.nonlinearity) == pytest.approx(bs.S, rel=1e-12)


@pytest.mark.parametrize("N,p,k", [(3, 4.0, 0), (3, 4.0, 1), (5, 2.5, 0), (5, 2.5, 1)])
def test_exponential_decay_rate(state, N, p, k):
    bs = state(N, p, k)
    assert bs.decay_rate == pytest.approx(1.0, rel=0.05)
    assert tail_decay_rate(bs.profile, bs.nonlinearity) == pytest.approx(bs.decay_rate, rel=1e-12)


def test_energies_increase_with_nodes(state):
    D = [state(3, 4.0, k).D for k in range(3)]
    assert D[0] < D[1] < D[2]


def test_profile_invariants(state):
    p = state(3, 4.0, 1).profile
    assert p.r[0] == 0 and p.dv[0] == 0
    assert np.all(np.diff(p.r) > 0)
    assert abs(p.v[-1]) <= p.tail_cutoff * abs(p.v[0])
    assert dirichlet_norm_sq(p) > 0


def test_direct_integration_agrees(state):
    # re-integrate the core from the reported height with an independent stepper
    bs = state(3, 4.0, 0)
    p = bs.profile
    r0 = 1e-6
    c2 = -float(CUBIC.f(bs.zeta0)) / 6.0

    def rhs(r, y):
        return [y[1], -2.0 / r * y[1] - float(CUBIC.f(y[0]))]

    stop = p.r[np.searchsorted(p.r, 6.0)]
    sol = solve_ivp(rhs, (r0, stop), [bs.zeta0 + c2 * r0**2, 2 * c2 * r0], method="Radau",
                    rtol=1e-12, atol=1e-14, dense_output=True)
    grid = p.r[(p.r > 1e-3) & (p.r <= stop)]
    ref = sol.sol(grid)[0]
    assert np.max(np.abs(np.interp(grid, p.r, p.v) - ref)) < 1e-6 * bs.zeta0


def test_shoot_classification(state):
    bs = state(3, 4.0, 0)
    cfg = ShootingConfig()
    assert shoot(CUBIC, 3, 0.9 * bs.zeta0, cfg).outcome is Outcome.TURNS_BACK
    assert shoot(CUBIC, 3, 1.1 * bs.zeta0, cfg).outcome is Outcome.CROSSES_ZERO
    # below zeta, f(zeta0) <= 0 and the shot turns back at once
    assert shoot(CUBIC, 3, 1.0, cfg).outcome is Outcome.TURNS_BACK
    with pytest.raises(PreconditionError):
        shoot(CUBIC, 3, -1.0, cfg)


def test_radial_profile_validation():
    r = np.linspace(0, 1, 10)
    with pytest.raises(PreconditionError):
        RadialProfile(3, r + 0.1, np.exp(-r), -np.exp(-r))
    with pytest.raises(PreconditionError):
        RadialProfile(3, r, np.zeros(10), np.zeros(10))


def test_config_validation():
    with pytest.raises(ValueError):
        ShootingConfig(tail_cutoff=0.0)
    with pytest.raises(ValueError):
        ShootingConfig(scan_factor=1.0)


def test_cache_round_trip_is_bit_identical(tmp_path):
    nl = PowerNonlinearity.single(1.0, 4.0)
    fresh = solve_cached(nl, 3, 0, directory=tmp_path)
    hit = solve_cached(nl, 3, 0, directory=tmp_path)
    assert fresh.D == hit.D and fresh.zeta0 == hit.zeta0
    assert np.array_equal(fresh.profile.v, hit.profile.v)
    assert np.array_equal(fresh.profile.dv, hit.profile.dv)
    assert len(list(tmp_path.iterdir())) == 2


def test_cache_key_depends_on_inputs():
    cfg = ShootingConfig()
    k0 = cache_key(CUBIC, 3, 0, cfg)
    assert k0 == cache_key(PowerNonlinearity.single(1.0, 4.0), 3, 0, ShootingConfig())
    assert k0 != cache_key(CUBIC, 3, 1, cfg)
    assert k0 != cache_key(CUBIC, 2, 0, cfg)
    assert k0 != cache_key(CUBIC, 3, 0, ShootingConfig(points_per_length=100))


@settings(max_examples=8, deadline=None)
@given(omega=st.floats(0.3, 3.0))
def test_1d_omega_scaling(omega):
    # v_omega(x) = sqrt(omega) v_1(sqrt(omega) x) for the cubic, so D scales as omega^(3/2)
    bs = closed_form_1d(PowerNonlinearity.single(omega, 4.0))
    assert bs.D == pytest.approx(4 / 3 * omega**1.5, rel=1e-8)
    assert bs.zeta0 == pytest.approx(math.sqrt(2 * omega), rel=1e-14)


@pytest.mark.parametrize("N,p,k", [(2, 4.0, 1), (3, 4.0, 2), (4, 3.0, 1), (5, 2.2, 0), (6, 2.2, 0)])
def test_decay_contract_holds(state, N, p, k):
    assert abs(state(N, p, k).decay_rate - 1.0) <= 0.05


@pytest.mark.xfail(strict=True, reason="for p = 2.2 the |v|^0.2 term still shifts the local rate at depths "
                                       "reachable before the shots separate; measured 0.914 and 0.922")
@pytest.mark.parametrize("k", [1, 2])
def test_decay_contract_near_quadratic_excited(state, k):
    assert abs(state(5, 2.2, k).decay_rate - 1.0) <= 0.05

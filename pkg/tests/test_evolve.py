import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peakonlab.errors import BadGrid, CflViolation, InsufficientRecords, InsufficientSignal, NonFiniteState
from peakonlab.evolve import (DiagnosticsRecord, SolverConfig, ch_rhs, diagnostics, h1_energy, max_stable_dt,
                              mollified_peakon_initial, mollify, novikov_rhs, peak_speed_estimate,
                              peakon_reference, random_bandlimited, random_positive_momentum, rk4_step, run,
                              semidiscrete_rhs, shape_error)
from peakonlab.green import adaptive_gauss_legendre
from peakonlab.model import CH_HALF, Domain, ModelParams, make_profile, solve_periodic_amplitudes
from peakonlab.spectral import Grid, GridState, derivative, fourier_shift, grid_for

P = ModelParams(1.0, 1.0, 2.0)


def smooth_state(N, time=0.0):
    x = grid_for(N).x
    return GridState(time, 0.8 + 0.2 * np.exp(0.5 * np.cos(2 * np.pi * x) + 0.2 * np.sin(4 * np.pi * x)))


# -- grid and state ------------------------------------------------------------

def test_grid_validation():
    for bad in (4, 100, 0):
        with pytest.raises(BadGrid):
            Grid(bad)
    with pytest.raises(BadGrid):
        GridState(0.0, np.zeros(12))
    with pytest.raises(BadGrid):
        GridState.from_samples(np.linspace(0, 1, 16), np.zeros(16))
    s = GridState.from_samples(np.arange(16) / 16, np.ones(16), time=0.5)
    assert s.time == 0.5 and s.N == 16
    with pytest.raises(ValueError):
        s.u[0] = 2.0


def test_state_spectral_fields():
    x = grid_for(64).x
    s = GridState(0.0, np.sin(2 * np.pi * x))
    assert np.allclose(s.ux, 2 * np.pi * np.cos(2 * np.pi * x), atol=1e-12)
    assert np.allclose(s.m, (1 + 4 * np.pi**2) * np.sin(2 * np.pi * x), atol=1e-11)
    assert np.allclose(derivative(s.u), s.ux)
    # conjugate symmetry of the full spectrum for real data
    full = np.fft.fft(s.u)
    assert np.allclose(full[1:], np.conj(full[1:][::-1]))


@given(st.floats(-3, 3))
@settings(max_examples=20)
def test_fourier_shift(shift):
    x = grid_for(32).x
    u = np.cos(2 * np.pi * x) + 0.3 * np.sin(6 * np.pi * x)
    v = fourier_shift(u, shift)
    y = x - shift
    assert np.allclose(v, np.cos(2 * np.pi * y) + 0.3 * np.sin(6 * np.pi * y), atol=1e-12)


def test_config_validation():
    assert SolverConfig().n_steps == 5000
    for kw in ({"dt": 0.0}, {"cfl_safety": 0.0}, {"cfl_safety": 1.5}, {"t_end": -1.0}, {"record_every": 0}):
        with pytest.raises(ValueError):
            SolverConfig(**kw)
    with pytest.raises(BadGrid):
        SolverConfig(N=1000)


# -- right-hand side -----------------------------------------------------------

def test_rhs_trivial_states():
    for u in (np.zeros(64), np.full(64, 1.7)):
        assert np.max(np.abs(semidiscrete_rhs(GridState(0.0, u), P))) <= 1e-13


def test_rhs_nonfinite():
    u = np.zeros(64)
    u[3] = np.nan
    with pytest.raises(NonFiniteState) as info:
        semidiscrete_rhs(GridState(0.25, u), P)
    assert info.value.time == 0.25


def test_rhs_traveling_wave_error_decreases():
    errs = []
    for N in (256, 512, 1024):
        s = mollified_peakon_initial(P, N)
        errs.append(np.max(np.abs(semidiscrete_rhs(s, P) + P.c * s.ux)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_rhs_spatial_spectral_convergence():
    ref_state = smooth_state(512)
    ref = semidiscrete_rhs(ref_state, P)
    errs = []
    for N in (16, 32, 64):
        r = semidiscrete_rhs(smooth_state(N), P)
        errs.append(np.max(np.abs(r - ref[:: 512 // N])))
    assert errs[0] / errs[1] >= 1e2
    assert errs[1] / errs[2] >= 1e2 or errs[2] < 1e-12


@pytest.mark.parametrize("dealias", [True, False])
def test_reduction_paths(dealias):
    s = smooth_state(128)
    for k2 in (1.0, -0.5, 2.0):
        assert np.max(np.abs(semidiscrete_rhs(s, ModelParams(0.0, k2, 1.0), dealias)
                             - k2 * ch_rhs(s, None, dealias))) <= 1e-12
    for k1 in (1.0, 0.3):
        assert np.max(np.abs(semidiscrete_rhs(s, ModelParams(k1, 0.0, 1.0), dealias)
                             - k1 * novikov_rhs(s, None, dealias))) <= 1e-12


def test_rhs_linear_in_coefficients():
    s = smooth_state(128)
    a = semidiscrete_rhs(s, ModelParams(1.3, 0.0, 0.0))
    b = semidiscrete_rhs(s, ModelParams(0.0, -0.7, 0.0))
    ab = semidiscrete_rhs(s, ModelParams(1.3, -0.7, 0.0))
    assert np.max(np.abs(ab - a - b)) <= 1e-12


def test_h1_rate_vanishes():
    # dE/dt = 2 int m u_t = 0 for each constituent flow
    s = smooth_state(256)
    for p in (ModelParams(1, 0, 0), ModelParams(0, 1, 0), ModelParams(1.5, -2, 0)):
        rate = 2.0 * np.mean(s.m * semidiscrete_rhs(s, p))
        assert abs(rate) <= 1e-11


def test_mean_rate_law():
    """d/dt int u = -k1/2 int u_x^3; zero when k1 = 0."""
    s = smooth_state(256)
    for k1, k2 in ((0.0, 1.0), (1.0, 0.0), (2.0, -1.0)):
        rate = np.mean(semidiscrete_rhs(s, ModelParams(k1, k2, 0.0)))
        assert rate == pytest.approx(-0.5 * k1 * np.mean(s.ux**3), abs=1e-13)
    assert abs(np.mean(s.ux**3)) > 1e-2


def test_mean_conserved_for_ch():
    p = ModelParams(0.0, 1.0, 0.0)
    init = random_bandlimited(256, 3, mean=1.0)
    traj = run(SolverConfig(N=256, dt=2e-4, t_end=0.2, record_every=100), p, init)
    means = [r.mass_m for r in traj.records]
    assert max(abs(m - means[0]) for m in means) <= 1e-10


def test_mean_not_conserved_for_novikov():
    p = ModelParams(1.0, 0.0, 0.0)
    init = random_positive_momentum(256, 1)
    traj = run(SolverConfig(N=256, dt=2e-4, t_end=0.2, record_every=100), p, init)
    drift = traj.records[-1].mass_m - traj.records[0].mass_m
    # compare with the rate law integrated along the computed trajectory
    s0, s1 = traj.snapshots[0], traj.snapshots[-1]
    approx = 0.2 * 0.5 * (-0.5 * np.mean(s0.ux**3) - 0.5 * np.mean(s1.ux**3))
    assert abs(drift) > 1e-6
    assert drift == pytest.approx(approx, rel=0.05)


# -- time stepping -------------------------------------------------------------

def test_rk4_trivial_states():
    for u in (np.zeros(64), np.full(64, 0.6)):
        s = rk4_step(GridState(0.0, u), P, 1e-3)
        assert np.allclose(s.u, u, atol=1e-14) and s.time == 1e-3


def test_rk4_cfl():
    s = smooth_state(64)
    limit = max_stable_dt(s, P, 0.3)
    assert limit == pytest.approx(0.3 / 64 / (s.u.max() ** 2 + s.u.max()))
    with pytest.raises(CflViolation):
        rk4_step(s, P, 2 * limit)


def test_rk4_self_convergence():
    p = ModelParams(1.0, 1.0, 0.0)
    s0 = smooth_state(64)
    T = 0.02

    def integrate(n):
        s = s0
        for _ in range(n):
            s = rk4_step(s, p, T / n, cfl_safety=1.0)
        return s.u
    u1, u2, u4 = integrate(10), integrate(20), integrate(40)
    order = math.log2(np.max(np.abs(u1 - u2)) / np.max(np.abs(u2 - u4)))
    assert order >= 3.9


# -- diagnostics ---------------------------------------------------------------

def test_h1_energy_examples():
    x = grid_for(64).x
    assert h1_energy(GridState(0.0, np.full(64, 1.5))) == pytest.approx(2.25, rel=1e-14)
    assert h1_energy(GridState(0.0, np.cos(2 * np.pi * x))) == pytest.approx((1 + 4 * np.pi**2) / 2, rel=1e-14)


def test_h1_mollified_matches_quadrature():
    s = mollified_peakon_initial(P, 64)
    uh = s.u_hat
    n = np.arange(uh.size)
    w = grid_for(64).weights

    def field(y, deriv=False):
        ph = np.exp(2j * np.pi * n * np.asarray(y)[..., None])
        c = uh * (2j * np.pi * n if deriv else 1.0)
        return np.real((ph * (w * c)).sum(-1))

    # Nyquist mode of the mollified field is zero, so the real-part sum is exact
    assert abs(uh[-1]) < 1e-14
    assert np.allclose(field(s.x), s.u, atol=1e-13)
    quad = adaptive_gauss_legendre(lambda y: field(y) ** 2 + field(y, True) ** 2, np.linspace(0, 1, 9), 1e-13)
    assert h1_energy(s) == pytest.approx(quad, abs=1e-10)


def test_h1_mollified_limit():
    a = solve_periodic_amplitudes(P).plus
    exact = a * a * math.sinh(1.0)
    errs = [abs(h1_energy(mollified_peakon_initial(P, N)) - exact) for N in (256, 1024, 4096)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5 * exact


def test_mollify_properties():
    s = mollified_peakon_initial(P, 1024)
    a = solve_periodic_amplitudes(P).plus
    raw = a * np.cosh(0.5 - s.x)
    assert np.fft.rfft(s.u)[0] == pytest.approx(np.fft.rfft(raw)[0], rel=1e-14)
    assert abs(s.u.max() / (a * CH_HALF) - 1) <= 0.02
    assert np.allclose(mollify(np.full(64, 2.0)), 2.0)


def test_shape_error_exact_and_shifted():
    ref = peakon_reference(P)
    N = 256
    x = grid_for(N).x
    err, shift = shape_error(GridState(0.0, ref.u(0.0, x)), ref)
    assert err <= 1e-12 and shift == 0.0
    err, shift = shape_error(GridState(0.0, ref.u(0.0, x - 7 / N)), ref)
    assert abs(shift - 7 / N) <= 1 / (4 * N) and err <= 1e-10
    smooth = smooth_state(N)
    moved = GridState(0.0, fourier_shift(smooth.u, 7 / N))
    err, shift = shape_error(moved, smooth)
    assert abs(shift - 7 / N) <= 1 / (4 * N) and err <= 1e-10


def test_shape_error_subgrid_shift():
    smooth = smooth_state(128)
    moved = GridState(0.0, fourier_shift(smooth.u, 0.3 / 128))
    err, shift = shape_error(moved, smooth)
    assert abs(shift - 0.3 / 128) <= 1 / (4 * 128)
    assert err < 1e-2


def test_diagnostics_record():
    s = mollified_peakon_initial(P, 128)
    rec = diagnostics(s, peakon_reference(P))
    assert rec.shape_error >= 0 and 0 <= rec.peak_position < 1
    assert len(rec.row()) == len(DiagnosticsRecord.COLUMNS)


def _records(positions, times):
    return [DiagnosticsRecord(t, 1.0, 1.0, p, 0.0, 1.0) for t, p in zip(times, positions)]


def test_peak_speed_synthetic():
    t = np.linspace(0, 10, 41)
    assert peak_speed_estimate(_records((0.3 * t) % 1.0, t)) == pytest.approx(0.3, abs=1e-12)
    assert peak_speed_estimate(_records((-0.2 * t) % 1.0, t)) == pytest.approx(-0.2, abs=1e-12)
    with pytest.raises(InsufficientSignal) as info:
        peak_speed_estimate(_records(np.zeros(5), np.arange(5.0)))
    assert info.value.speed == 0.0
    with pytest.raises(InsufficientRecords):
        peak_speed_estimate(_records([0.0, 0.1], [0.0, 1.0]))


# -- initial data and driver ---------------------------------------------------

def test_random_initial_data():
    s = random_positive_momentum(256, 4)
    assert s.u.max() == pytest.approx(1.0)
    assert np.all(s.m > 0)
    assert np.array_equal(s.u, random_positive_momentum(256, 4).u)
    r = random_bandlimited(128, 2, amplitude=0.3, mean=1.0)
    assert np.max(np.abs(r.u - 1.0)) == pytest.approx(0.3)
    assert np.max(np.abs(np.fft.rfft(r.u)[7:])) < 1e-10


def test_run_t_end_zero():
    init = mollified_peakon_initial(P, 128)
    traj = run(SolverConfig(N=128, t_end=0.0), P, init)
    assert len(traj.snapshots) == 1 and len(traj.records) == 1
    assert traj.h1_drift() == 0.0


def test_run_rejects_mismatched_grid():
    with pytest.raises(ValueError):
        run(SolverConfig(N=128), P, mollified_peakon_initial(P, 64))


def test_run_records_and_snapshots():
    init = mollified_peakon_initial(P, 128)
    cfg = SolverConfig(N=128, dt=1e-4, t_end=0.01, record_every=25, snapshot_every=50)
    traj = run(cfg, P, init)
    assert [r.time for r in traj.records] == pytest.approx([0, 0.0025, 0.005, 0.0075, 0.01])
    assert [s.time for s in traj.snapshots] == pytest.approx([0, 0.005, 0.01])
    assert traj.final.time == 0.01


def test_comoving_frame_matches_lab_frame():
    init = mollified_peakon_initial(P, 128)
    lab = run(SolverConfig(N=128, dt=5e-5, t_end=0.02), P, init)
    mov = run(SolverConfig(N=128, dt=5e-5, t_end=0.02, frame_speed=P.c), P, init)
    assert np.max(np.abs(lab.final.u - mov.final.u)) <= 1e-6
    assert mov.final.time == lab.final.time


def test_nonfinite_during_run():
    u = np.zeros(64)
    u[0] = np.inf
    with pytest.raises(NonFiniteState):
        rk4_step(GridState(0.0, u), ModelParams(0.0, 1.0, 0.0), 1e-6)


def test_reference_profile():
    ref = peakon_reference(P)
    assert ref.domain is Domain.CIRCLE and ref.speed == P.c
    assert ref == make_profile(Domain.CIRCLE, solve_periodic_amplitudes(P).plus, P.c)

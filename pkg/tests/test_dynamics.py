"""Integrator tests: reversibility, symplecticity, conservation, frequency
extraction on known signals, blow-up handling and trajectory export."""

import csv
import math

import numpy as np
import pytest

from legkam import dynamics
from legkam.galerkin import PhaseState, build_eigen_system, build_tensor


def test_sim_config_validation():
    with pytest.raises(ValueError):
        dynamics.SimConfig(dim=1)
    with pytest.raises(ValueError):
        dynamics.SimConfig(dt=0.0)
    with pytest.raises(ValueError):
        dynamics.SimConfig(steps=0)
    with pytest.raises(ValueError):
        dynamics.SimConfig(initial_action=(1e-4,))
    with pytest.raises(ValueError):
        dynamics.SimConfig(initial_action=(1e-4, -1e-4))
    with pytest.raises(ValueError):
        dynamics.SimConfig(tail_amplitude=-0.1)
    with pytest.raises(ValueError):
        dynamics.SimConfig(save_stride=0)
    cfg = dynamics.SimConfig(initial_action=[0.01, 0.02])
    assert cfg.initial_action == (0.01, 0.02)


def test_initial_state_matches_action():
    cfg = dynamics.SimConfig(dim=6, initial_action=(0.04, 0.09),
                             tail_amplitude=0.0)
    state = dynamics.build_initial_state(cfg)
    assert state.q[0] == pytest.approx(0.2)
    assert state.q[1] == pytest.approx(0.3)
    assert (state.q[2:] == 0).all() and (state.p == 0).all()


def test_initial_tail_seeded():
    cfg = dynamics.SimConfig(dim=8, tail_amplitude=0.01, seed=42)
    a = dynamics.build_initial_state(cfg)
    b = dynamics.build_initial_state(cfg)
    assert (a.q == b.q).all() and (a.p == b.p).all()
    assert np.abs(a.q[2:]).max() > 0
    c = dynamics.build_initial_state(
        dynamics.SimConfig(dim=8, tail_amplitude=0.01, seed=43))
    assert not (a.q == c.q).all()


def test_single_step_reversible():
    tensor = build_tensor(4, 2.0)
    lambdas = build_eigen_system(4, 2.0).lambdas
    rng = np.random.default_rng(8)
    q = 0.1 * rng.standard_normal(4)
    p = 0.1 * rng.standard_normal(4)
    q1, p1 = dynamics.single_step(q, p, 1e-3, lambdas, tensor)
    q0, p0 = dynamics.single_step(q1, p1, -1e-3, lambdas, tensor)
    assert np.abs(q0 - q).max() < 1e-12
    assert np.abs(p0 - p).max() < 1e-12


def test_single_step_jacobian_determinant_one():
    tensor = build_tensor(4, 2.0)
    cfg = dynamics.SimConfig(dim=4, mass=2.0, dt=1e-3)
    rng = np.random.default_rng(21)
    state = PhaseState(q=0.2 * rng.standard_normal(4),
                       p=0.2 * rng.standard_normal(4))
    det = dynamics.step_jacobian_determinant(cfg, tensor, state, eps=1e-5)
    assert abs(det - 1.0) < 1e-8


def test_linear_run_conserves_mode_powers():
    cfg = dynamics.SimConfig(dim=5, mass=2.0, dt=1e-3, steps=2000,
                             initial_action=(0.01, 0.04),
                             tail_amplitude=0.1, seed=1,
                             include_coupling=False)
    traj = dynamics.integrate(cfg)
    power = traj.q ** 2 + traj.p ** 2
    assert np.abs(power - power[0]).max() < 1e-12
    drift = np.abs(traj.energies - traj.energies[0]).max()
    assert drift < 1e-11 * abs(traj.energies[0]) + 1e-14


def test_energy_drift_bounded_with_coupling():
    cfg = dynamics.SimConfig(dim=4, mass=2.0, dt=1e-3, steps=5000,
                             initial_action=(0.04, 0.04))
    traj = dynamics.integrate(cfg)
    rel = np.abs(traj.energies - traj.energies[0]).max() / traj.energies[0]
    assert rel < 1e-6


def test_trajectory_layout_and_stride():
    cfg = dynamics.SimConfig(dim=3, mass=1.0, dt=1e-2, steps=100,
                             save_stride=10, include_coupling=False)
    traj = dynamics.integrate(cfg)
    assert traj.n_samples == 11
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(1.0)
    assert traj.q.shape == (11, 3)
    state = traj.state(0)
    assert state.q[0] == pytest.approx(math.sqrt(cfg.initial_action[0]))


def test_integrate_respects_given_initial_state():
    cfg = dynamics.SimConfig(dim=3, mass=1.0, steps=10,
                             include_coupling=False)
    init = PhaseState(q=np.array([0.1, 0.0, 0.0]),
                      p=np.array([0.0, 0.2, 0.0]))
    traj = dynamics.integrate(cfg, initial=init)
    assert traj.q[0, 0] == 0.1
    assert traj.p[0, 1] == 0.2
    with pytest.raises(ValueError):
        dynamics.integrate(cfg, initial=PhaseState(q=np.zeros(4),
                                                   p=np.zeros(4)))


def test_tensor_dim_mismatch_rejected():
    tensor = build_tensor(3, 2.0)
    cfg = dynamics.SimConfig(dim=4, mass=2.0, steps=10)
    with pytest.raises(ValueError):
        dynamics.integrate(cfg, tensor=tensor)


def _synthetic_trajectory(omegas, dt, n, dim):
    t = np.arange(n) * dt
    q = np.zeros((n, dim))
    p = np.zeros((n, dim))
    for j, om in enumerate(omegas):
        q[:, j] = np.cos(om * t)
        p[:, j] = -np.sin(om * t)
    cfg = dynamics.SimConfig(dim=dim, mass=2.0, dt=dt, steps=n - 1,
                             include_coupling=False)
    lam = build_eigen_system(dim, 2.0).lambdas
    return dynamics.Trajectory(times=t, q=q, p=p,
                               energies=np.zeros(n), config=cfg, lambdas=lam)


def test_extract_frequencies_synthetic_tone():
    omegas = (2.3946, 0.7317)
    traj = _synthetic_trajectory(omegas, dt=0.05, n=4096, dim=2)
    freqs = dynamics.extract_frequencies(traj)
    assert abs(freqs[0] - omegas[0]) / omegas[0] < 1e-5
    assert abs(freqs[1] - omegas[1]) / omegas[1] < 1e-5


def test_extract_frequencies_flags_flat_modes():
    traj = _synthetic_trajectory((1.5, 0.0), dt=0.05, n=2048, dim=3)
    freqs = dynamics.extract_frequencies(traj, modes=(1, 3))
    assert abs(freqs[0] - 1.5) < 1e-4
    assert math.isnan(freqs[1])  # mode 3 never moves


def test_extract_frequencies_linear_modes():
    cfg = dynamics.SimConfig(dim=4, mass=2.0, dt=1e-3, steps=4096,
                             initial_action=(0.01, 0.01),
                             tail_amplitude=0.02, seed=5,
                             include_coupling=False)
    traj = dynamics.integrate(cfg)
    freqs = dynamics.extract_frequencies(traj)
    rel = np.abs(freqs - traj.lambdas) / traj.lambdas
    assert rel.max() < 1e-6


def test_extract_frequencies_needs_samples():
    traj = _synthetic_trajectory((1.0, 0.5), dt=0.1, n=512, dim=2)
    with pytest.raises(ValueError):
        dynamics.extract_frequencies(traj)


def test_torus_residual():
    cfg = dynamics.SimConfig(dim=5, mass=2.0, steps=500,
                             initial_action=(0.01, 0.01),
                             tail_amplitude=0.0)
    traj = dynamics.integrate(cfg)
    # the coupling drives the tail only at third order in the amplitude
    assert dynamics.torus_residual(traj) < 1e-3
    noisy = dynamics.SimConfig(dim=5, mass=2.0, steps=500,
                               initial_action=(0.01, 0.01),
                               tail_amplitude=0.05, seed=2)
    assert dynamics.torus_residual(dynamics.integrate(noisy)) > 0.01


def test_blow_up_detected_with_partial_trajectory():
    cfg = dynamics.SimConfig(dim=3, mass=2.0, dt=0.5, steps=4096,
                             initial_action=(2000.0, 2000.0))
    with pytest.raises(dynamics.BlowUpError) as err:
        dynamics.integrate(cfg)
    partial = err.value.trajectory
    assert partial is not None
    assert 1 <= partial.n_samples <= 4097
    assert np.isfinite(partial.q[0]).all()


def test_save_trajectory_csv(tmp_path):
    cfg = dynamics.SimConfig(dim=3, mass=1.0, steps=20,
                             include_coupling=False)
    traj = dynamics.integrate(cfg)
    path = tmp_path / "traj.csv"
    dynamics.save_trajectory_csv(traj, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "q1", "q2", "q3", "p1", "p2", "p3", "H"]
    assert len(rows) == 22
    assert float(rows[1][0]) == 0.0
    assert float(rows[1][1]) == pytest.approx(traj.q[0, 0])
    assert float(rows[-1][-1]) == pytest.approx(traj.energies[-1])


def test_frequency_report_fields():
    cfg = dynamics.SimConfig(dim=4, mass=2.0, dt=1e-3, steps=2048,
                             initial_action=(0.01, 0.01),
                             include_coupling=False)
    traj = dynamics.integrate(cfg)
    report = dynamics.frequency_report(traj)
    assert report["modes"] == [1, 2, 3, 4]
    assert len(report["frequencies"]) == 4
    assert report["frequencies"][0] == pytest.approx(traj.lambdas[0],
                                                     rel=1e-5)
    assert report["frequencies"][2] is None  # unexcited mode
    assert report["samples"] == 2049
    assert report["energy_drift_rel"] < 1e-10

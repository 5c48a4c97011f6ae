"""Symplectic simulation of the truncated model and frequency-map
diagnostics.

The Hamiltonian splits into an exactly solvable rotation (each (q_j, p_j)
pair turns clockwise with angular rate lambda_j) and a quartic kick whose
flow is exact because G depends on q only. One step is the Strang
composition rotate(dt/2) kick(dt) rotate(dt/2).
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .galerkin import (CouplingTensor, PhaseState, build_eigen_system,
                       build_tensor, gradient_g, quartic_form)

BLOWUP_LIMIT = 1e6
MIN_FREQ_SAMPLES = 1 << 10
PEAK_POWER_RATIO = 10.0


class BlowUpError(RuntimeError):
    """Raised when the state leaves the finite range; carries whatever part
    of the trajectory was sampled before the abort."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass
class SimConfig:
    """Run parameters. initial_action fixes q_j^2 + p_j^2 = I_j on modes
    1 and 2; tail_amplitude scales a seeded Gaussian perturbation of the
    remaining modes."""

    dim: int = 16
    mass: float = 2.0
    dt: float = 1e-3
    steps: int = 1 << 16
    initial_action: tuple = (1e-4, 1e-4)
    tail_amplitude: float = 0.0
    seed: int = 0
    include_coupling: bool = True
    save_stride: int = 1

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.save_stride < 1:
            raise ValueError(f"save_stride must be >= 1, got {self.save_stride}")
        ia = tuple(float(v) for v in self.initial_action)
        if len(ia) != 2 or min(ia) < 0:
            raise ValueError(f"initial_action must be two nonnegative "
                             f"components, got {self.initial_action}")
        self.initial_action = ia
        if self.tail_amplitude < 0:
            raise ValueError(f"tail_amplitude must be >= 0, "
                             f"got {self.tail_amplitude}")


@dataclass(eq=False)
class Trajectory:
    """Sampled states of one run, energies included."""

    times: np.ndarray
    q: np.ndarray        # (samples, dim)
    p: np.ndarray
    energies: np.ndarray
    config: SimConfig
    lambdas: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.times.size

    def state(self, i: int) -> PhaseState:
        return PhaseState(q=self.q[i].copy(), p=self.p[i].copy())


def build_initial_state(config: SimConfig) -> PhaseState:
    q = np.zeros(config.dim)
    p = np.zeros(config.dim)
    q[0] = math.sqrt(config.initial_action[0])
    q[1] = math.sqrt(config.initial_action[1])
    if config.tail_amplitude > 0 and config.dim > 2:
        rng = np.random.default_rng(config.seed)
        q[2:] = config.tail_amplitude * rng.standard_normal(config.dim - 2)
        p[2:] = config.tail_amplitude * rng.standard_normal(config.dim - 2)
    return PhaseState(q=q, p=p)


def single_step(q: np.ndarray, p: np.ndarray, dt: float,
                lambdas: np.ndarray, tensor: Optional[CouplingTensor]):
    """One Strang step; returns new (q, p) without mutating the inputs."""
    half = 0.5 * dt * lambdas
    c, s = np.cos(half), np.sin(half)
    q, p = q * c + p * s, p * c - q * s
    if tensor is not None:
        p = p - dt * gradient_g(q, tensor)
    return q * c + p * s, p * c - q * s


def integrate(config: SimConfig, tensor: Optional[CouplingTensor] = None,
              initial: Optional[PhaseState] = None) -> Trajectory:
    """Run the splitting integrator and sample every save_stride steps
    (the initial state is sample 0)."""
    sys = build_eigen_system(config.dim, config.mass)
    if config.include_coupling and tensor is None:
        tensor = build_tensor(config.dim, config.mass)
    if not config.include_coupling:
        tensor = None
    if tensor is not None and tensor.dim != config.dim:
        raise ValueError(f"tensor dim {tensor.dim} != config dim {config.dim}")

    state = build_initial_state(config) if initial is None else initial
    q = state.q.copy()
    p = state.p.copy()
    if q.size != config.dim:
        raise ValueError(f"initial state dim {q.size} != {config.dim}")

    half = 0.5 * config.dt * sys.lambdas
    c, s = np.cos(half), np.sin(half)
    dense = tensor.dense() if tensor is not None else None
    J = config.dim

    n_samples = config.steps // config.save_stride + 1
    qs = np.empty((n_samples, J))
    ps = np.empty((n_samples, J))
    qs[0], ps[0] = q, p
    sample = 1

    for step in range(1, config.steps + 1):
        q, p = q * c + p * s, p * c - q * s
        if dense is not None:
            t = dense.reshape(J * J * J, J) @ q
            t = t.reshape(J * J, J) @ q
            p = p - config.dt * (t.reshape(J, J) @ q)
        q, p = q * c + p * s, p * c - q * s
        if step % config.save_stride == 0:
            qs[sample], ps[sample] = q, p
            sample += 1
        if step % 256 == 0 or step == config.steps:
            peak = max(np.abs(q).max(), np.abs(p).max())
            if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
                partial = _assemble(qs[:sample], ps[:sample], config, sys,
                                    tensor)
                raise BlowUpError(
                    f"blow-up detected at step {step} (t = {step * config.dt})"
                    f": max |coordinate| = {float(peak):g}", partial)

    return _assemble(qs, ps, config, sys, tensor)


def _assemble(qs, ps, config, sys, tensor) -> Trajectory:
    times = np.arange(qs.shape[0]) * (config.dt * config.save_stride)
    energies = energy_series(qs, ps, sys.lambdas, tensor)
    return Trajectory(times=times, q=qs, p=ps, energies=energies,
                      config=config, lambdas=sys.lambdas.copy())


def energy_series(qs: np.ndarray, ps: np.ndarray, lambdas: np.ndarray,
                  tensor: Optional[CouplingTensor], chunk: int = 1024
                  ) -> np.ndarray:
    """H at every sample: (1/2) sum lambda (p^2+q^2) + (1/4) sum G qqqq."""
    quad = 0.5 * ((qs * qs + ps * ps) @ lambdas)
    if tensor is None:
        return quad
    dense = tensor.dense()
    quart = np.empty(qs.shape[0])
    for lo in range(0, qs.shape[0], chunk):
        block = qs[lo:lo + chunk]
        quart[lo:lo + chunk] = np.einsum(
            "ijkl,ti,tj,tk,tl->t", dense, block, block, block, block,
            optimize=True)
    return quad + 0.25 * quart


def _dtft_mag(x: np.ndarray, nu: float) -> float:
    """|sum_t x_t exp(-2 pi i nu t / M)| at fractional bin nu."""
    m = x.size
    phase = np.exp((-2j * np.pi * nu / m) * np.arange(m))
    return abs(phase @ x)


def _refine_peak(x: np.ndarray, k0: float) -> float:
    """Golden-section maximization of the windowed transform magnitude
    within one bin of the seed. Returns the fractional bin."""
    gr = (math.sqrt(5.0) - 1) / 2
    a, b = k0 - 1.0, k0 + 1.0
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = _dtft_mag(x, c), _dtft_mag(x, d)
    for _ in range(70):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = _dtft_mag(x, c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = _dtft_mag(x, d)
    return 0.5 * (a + b)


def extract_frequencies(traj: Trajectory, modes=None) -> np.ndarray:
    """Dominant rotation frequency magnitude per mode from the complex
    signal q + i p.

    FFT peak of the Hann-windowed signal, log-parabolic interpolation, then
    golden-section refinement of the continuous transform. Modes without a
    dominant peak (peak power / median power < 10) return NaN.
    """
    if traj.n_samples < MIN_FREQ_SAMPLES:
        raise ValueError(f"need at least {MIN_FREQ_SAMPLES} samples, "
                         f"got {traj.n_samples}")
    if modes is None:
        modes = range(1, traj.config.dim + 1)
    m = traj.n_samples
    window = np.hanning(m)
    dt_sample = traj.config.dt * traj.config.save_stride
    modes = list(modes)
    out = np.empty(len(modes))
    for pos, mode in enumerate(modes):
        z = (traj.q[:, mode - 1] + 1j * traj.p[:, mode - 1]) * window
        spec = np.fft.fft(z)
        power = np.abs(spec) ** 2
        k0 = int(np.argmax(power))
        med = float(np.median(power))
        if med <= 0 or power[k0] / med < PEAK_POWER_RATIO:
            out[pos] = np.nan
            continue
        mags = np.abs(spec[[(k0 - 1) % m, k0, (k0 + 1) % m]])
        logs = np.log(np.maximum(mags, 1e-300))
        denom = logs[0] - 2 * logs[1] + logs[2]
        shift = 0.0 if denom == 0 else 0.5 * (logs[0] - logs[2]) / denom
        nu = _refine_peak(z, k0 + shift)
        if nu > m / 2:
            nu -= m
        out[pos] = abs(2 * np.pi * nu / (m * dt_sample))
    return out


def torus_residual(traj: Trajectory) -> float:
    """Max over time of the tail fraction of the quadratic energy,
    sum_{j>=3} lambda_j (q^2+p^2) / sum_j lambda_j (q^2+p^2)."""
    lam = traj.lambdas
    power = traj.q ** 2 + traj.p ** 2
    total = power @ lam
    tail = power[:, 2:] @ lam[2:]
    mask = total > 0
    if not mask.any():
        return 0.0
    return float((tail[mask] / total[mask]).max())


def step_jacobian_determinant(config: SimConfig,
                              tensor: Optional[CouplingTensor],
                              state: PhaseState, eps: float = 1e-6) -> float:
    """Determinant of one step's Jacobian by central finite differences
    (symplecticity proxy; exact value is 1)."""
    sys = build_eigen_system(config.dim, config.mass)
    n = config.dim
    base = np.concatenate([state.q, state.p])
    jac = np.empty((2 * n, 2 * n))
    for col in range(2 * n):
        plus = base.copy()
        minus = base.copy()
        plus[col] += eps
        minus[col] -= eps
        qp, pp = single_step(plus[:n], plus[n:], config.dt, sys.lambdas,
                             tensor)
        qm, pm = single_step(minus[:n], minus[n:], config.dt, sys.lambdas,
                             tensor)
        jac[:, col] = (np.concatenate([qp, pp])
                       - np.concatenate([qm, pm])) / (2 * eps)
    return float(np.linalg.det(jac))


def save_trajectory_csv(traj: Trajectory, path, stride: int = 1):
    """CSV export: t, q1..qJ, p1..pJ, H."""
    J = traj.config.dim
    header = (["t"] + [f"q{j}" for j in range(1, J + 1)]
              + [f"p{j}" for j in range(1, J + 1)] + ["H"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(0, traj.n_samples, stride):
            w.writerow([repr(float(traj.times[i]))]
                       + [repr(float(v)) for v in traj.q[i]]
                       + [repr(float(v)) for v in traj.p[i]]
                       + [repr(float(traj.energies[i]))])


def frequency_report(traj: Trajectory, modes=None) -> dict:
    """JSON-ready frequency diagnostics for a run."""
    if modes is None:
        modes = list(range(1, min(traj.config.dim, 8) + 1))
    freqs = extract_frequencies(traj, modes)
    drift = float(np.max(np.abs(traj.energies - traj.energies[0])))
    rel = drift / abs(traj.energies[0]) if traj.energies[0] != 0 else drift
    return {
        "modes": list(modes),
        "frequencies": [None if math.isnan(f) else float(f) for f in freqs],
        "linear_frequencies": traj.lambdas[[m - 1 for m in modes]].tolist(),
        "energy_drift_rel": rel,
        "torus_residual": torus_residual(traj),
        "samples": int(traj.n_samples),
        "dt": traj.config.dt,
    }

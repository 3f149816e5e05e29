"""Time evolution and frame maps.

Time-dependent propagation uses midpoint-exponential stepping
psi_{k+1} = exp(-i H(t_k + dt/2) dt) psi_k: each step is exactly unitary
(to roundoff), so accuracy is purely a dt question (global order 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hamiltonians, hilbert
from .errors import DegenerateMassError, TruncationError, ValidationError
from .hilbert import Operator, QubitFieldState, TruncationSpec, as_matrix
from .linalg import require_hermitian

# hard contract: propagation aborts if this much population reaches the
# truncation edge, because silent truncation corruption is the main hazard
FOCK_TAIL_LIMIT = 1e-6

MIN_STEPS_PER_PERIOD = 40


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid (ns); every sample_stride-th step is recorded."""

    t_start: float
    t_end: float
    dt: float
    sample_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if self.t_end <= self.t_start:
            raise ValidationError("t_end must exceed t_start")
        if self.sample_stride < 1:
            raise ValidationError("sample_stride must be >= 1")
        n = (self.t_end - self.t_start) / self.dt
        if abs(n - round(n)) > 1e-9:
            raise ValidationError("t_end - t_start must be an integer multiple of dt")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    def sample_times(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.sample_stride)
        return self.t_start + idx * self.dt


def fastest_period(params: hamiltonians.DriveParams, frame: str) -> float:
    """Shortest oscillation period a propagation in the given frame must resolve."""
    if frame == "lab":
        rates = [params.omega, params.omega_q, params.nu, 2 * params.Omega]
    elif frame in ("l1", "interaction"):
        rates = [2 * params.Omega, abs(params.nu - params.omega)]
    else:
        raise ValidationError(f"no time-dependent propagation in frame {frame!r}")
    fastest = max(abs(r) for r in rates)
    if fastest == 0.0:
        return math.inf
    return 2 * math.pi / fastest


def validate_grid(grid: TimeGrid, params: hamiltonians.DriveParams, frame: str):
    period = fastest_period(params, frame)
    if grid.dt > period / MIN_STEPS_PER_PERIOD:
        raise ValidationError(
            f"dt = {grid.dt} ns resolves the fastest {frame}-frame period "
            f"({period:.4g} ns) with fewer than {MIN_STEPS_PER_PERIOD} steps"
        )


_BUILDER_FRAMES = {
    "build_lab": "lab",
    "build_l1": "l1",
    "build_interaction": "interaction",
}


def _state_vec(psi) -> np.ndarray:
    if isinstance(psi, QubitFieldState):
        return np.array(psi.amplitudes)
    return np.asarray(psi, dtype=complex)


def _tail(psi: np.ndarray, trunc: TruncationSpec) -> float:
    m = psi.reshape(2, trunc.dim)
    return float(np.sum(np.abs(m[:, trunc.dim - hilbert.TAIL_LEVELS :]) ** 2))


def propagate_ti(h, psi0, t: float) -> np.ndarray:
    """exp(-i H t) psi0 for time-independent Hermitian H, via eigendecomposition."""
    m = require_hermitian(as_matrix(h), tol=1e-12)
    w, v = np.linalg.eigh(m)
    psi = _state_vec(psi0)
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi))


def propagate_ti_sampled(h, psi0, times: np.ndarray) -> np.ndarray:
    """States at many times under a time-independent H; one eigendecomposition."""
    m = require_hermitian(as_matrix(h), tol=1e-12)
    w, v = np.linalg.eigh(m)
    coeff = v.conj().T @ _state_vec(psi0)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * coeff) @ v.T


def propagate_td(
    h_builder,
    params: hamiltonians.DriveParams,
    trunc: TruncationSpec,
    psi0,
    grid: TimeGrid,
    frame: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-exponential propagation under a time-dependent builder.

    Returns (sample_times, states) with states[k] the state at sample_times[k].
    Raises TruncationError if the Fock-tail population exceeds FOCK_TAIL_LIMIT
    at any sample.
    """
    if frame is None:
        frame = _BUILDER_FRAMES.get(getattr(h_builder, "__name__", ""), None)
    if frame is None:
        raise ValidationError("frame must be given for a custom Hamiltonian builder")
    validate_grid(grid, params, frame)

    psi = _state_vec(psi0)
    times = [grid.t_start]
    states = [psi.copy()]
    h_prev = None
    step = None
    for k in range(grid.n_steps):
        t_mid = grid.t_start + (k + 0.5) * grid.dt
        h = as_matrix(h_builder(params, trunc, t_mid))
        # builders with no actual time dependence return identical matrices;
        # reuse the step propagator then instead of re-diagonalizing
        if h_prev is None or not np.array_equal(h, h_prev):
            w, v = np.linalg.eigh(h)
            step = (v * np.exp(-1j * w * grid.dt)) @ v.conj().T
            h_prev = h
        psi = step @ psi
        if (k + 1) % grid.sample_stride == 0 or k + 1 == grid.n_steps:
            tail = _tail(psi, trunc)
            if tail > FOCK_TAIL_LIMIT:
                raise TruncationError(
                    f"Fock-tail population {tail:.3e} exceeds {FOCK_TAIL_LIMIT:.1e} "
                    f"at t = {grid.t_start + (k + 1) * grid.dt:.3f} ns"
                )
            times.append(grid.t_start + (k + 1) * grid.dt)
            states.append(psi.copy())
    return np.array(times), np.array(states)


# ---------------------------------------------------------------------------
# frame maps


def _rot_phases(params, trunc: TruncationSpec, t: float) -> np.ndarray:
    # diagonal of omega t (a+a + s_z/2): s_z/2 eigenvalues are -1/2 (g), +1/2 (e)
    n = np.arange(trunc.dim)
    diag = np.concatenate((n - 0.5, n + 0.5))
    return np.exp(1j * params.omega * t * diag)


def frame_map_lab_to_l1(psi, t: float, params, trunc: TruncationSpec) -> np.ndarray:
    return _rot_phases(params, trunc, t) * _state_vec(psi)


def frame_map_l1_to_lab(psi, t: float, params, trunc: TruncationSpec) -> np.ndarray:
    return _rot_phases(params, trunc, t).conj() * _state_vec(psi)


def _h0_unitary(params, trunc: TruncationSpec, t: float, sign: int) -> np.ndarray:
    # exp(sign * i H0 t) with H0 the strong-drive term: eigenvalues -+Omega on |+->
    plus = hilbert.spin_vector("plus", params.phi)
    minus = hilbert.spin_vector("minus", params.phi)
    u2 = np.exp(-sign * 1j * params.Omega * t) * np.outer(plus, plus.conj()) + np.exp(
        sign * 1j * params.Omega * t
    ) * np.outer(minus, minus.conj())
    return np.kron(u2, np.eye(trunc.dim))


def frame_map_l1_to_interaction(psi, t: float, params, trunc: TruncationSpec) -> np.ndarray:
    params.require_resonant_mode()
    return _h0_unitary(params, trunc, t, +1) @ _state_vec(psi)


def frame_map_interaction_to_l1(psi, t: float, params, trunc: TruncationSpec) -> np.ndarray:
    params.require_resonant_mode()
    return _h0_unitary(params, trunc, t, -1) @ _state_vec(psi)


# ---------------------------------------------------------------------------
# Foldy-Wouthuysen evolution


def evolve_fw(
    params: hamiltonians.DriveParams,
    trunc: TruncationSpec,
    psi0,
    t: float,
    mode: str = "exact",
) -> np.ndarray:
    """Evolve under the spin-diagonalized propagator S U_D(t) S+.

    exact: S is the full spin-rotation unitary.  linearized: the outer factors
    are exp(-+ i (g/(lam sqrt2)) s_x p), i.e. a massless evolution with the
    spin axis rotated, run for an effective time 1/lam.
    """
    if params.lam <= 0:
        raise DegenerateMassError("spin-diagonalized evolution requires lam > 0")
    free = hamiltonians.DriveParams(
        params.omega_q, params.omega, params.g, params.Omega,
        params.lam, params.nu, 0.0, params.phi,
    )
    hd = hamiltonians.build_effective(free, trunc).matrix
    psi = _state_vec(psi0)
    if mode == "exact":
        s = hamiltonians.build_fw_unitary(params, trunc).matrix
    elif mode == "linearized":
        q = hilbert.qubit_ops(params.phi)
        _, p = hilbert.quadrature_ops(trunc)
        gen = np.kron(q["sigma_x"].matrix, p.matrix)
        w, v = np.linalg.eigh(gen)
        s = (v * np.exp(-1j * params.g / (params.lam * math.sqrt(2)) * w)) @ v.conj().T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    inner = propagate_ti(hd, s.conj().T @ psi, t)
    return s @ inner

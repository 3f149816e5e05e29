"""Closed-form oracles for the simulated Dirac dynamics.

Everything here is built from the time-independent free Hamiltonian
H_D = (lam/2) s_z + (g/sqrt2) s_y p and checked elsewhere against direct
state propagation: the Heisenberg-picture position with its jitter term,
the short-time expansion of the free propagator, the spin-diagonalized
(no-jitter) position operator, and the short-time factorization of the
linear-potential propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import hamiltonians, hilbert
from .errors import NoPeakError, SingularHError
from .hamiltonians import DiracParams, DriveParams
from .hilbert import Operator, TruncationSpec
from .linalg import expm_herm_generator
from .observables import Trajectory

# eigenvalues closer to zero than this are routed to the analytic limit of
# removable-singularity functions (sinc family)
ZERO_EIG_TOL = 1e-12


def _free_hamiltonian(params: DriveParams, trunc: TruncationSpec) -> np.ndarray:
    free = DriveParams(
        params.omega_q, params.omega, params.g, params.Omega,
        params.lam, params.nu, 0.0, params.phi,
    )
    return hamiltonians.build_effective(free, trunc).matrix


@dataclass
class HeisenbergPosition:
    """Heisenberg-picture position x(t) = x0 + c^2 p H^-1 t + Z(t).

    Z(t) is the interference (jitter) term; it vanishes identically on
    fixed-energy-sign subspaces of H.
    """

    params: DriveParams
    trunc: TruncationSpec

    def __post_init__(self):
        self.dirac = DiracParams.from_drive(self.params)
        if self.dirac.mass_energy <= 0:
            raise SingularHError("H is singular for a massless particle at p = 0")
        self.h = _free_hamiltonian(self.params, self.trunc)
        self._w, self._v = np.linalg.eigh(self.h)
        xj, pj = hamiltonians.joint_x_p(self.trunc)
        self.x0_op = xj
        self._p = pj
        self.h_inv = (self._v * (1.0 / self._w)) @ self._v.conj().T
        self.drift_op = self.dirac.c_sim**2 * pj @ self.h_inv

    @cached_property
    def _sy(self) -> np.ndarray:
        q = hilbert.qubit_ops(self.params.phi)
        return np.kron(q["sigma_y"].matrix, np.eye(self.trunc.dim))

    def zbw_op(self, t: float) -> np.ndarray:
        """Oscillating term Z(t) = (i/2) c (s_y - c p H^-1) H^-1 (e^{-2iHt} - 1)."""
        c = self.dirac.c_sim
        osc = (self._v * (np.exp(-2j * self._w * t) - 1.0)) @ self._v.conj().T
        return 0.5j * c * (self._sy - c * self._p @ self.h_inv) @ self.h_inv @ osc

    def x_at(self, t: float) -> np.ndarray:
        return self.x0_op + self.drift_op * t + self.zbw_op(t)

    def positive_energy_projector(self) -> np.ndarray:
        """Spectral projector onto the positive-energy subspace of H."""
        vpos = self._v[:, self._w > 0]
        return vpos @ vpos.conj().T


def x_heisenberg(params: DriveParams, trunc: TruncationSpec, t: float) -> Operator:
    return Operator(HeisenbergPosition(params, trunc).x_at(t), "joint")


# ---------------------------------------------------------------------------
# short-time expansion of the free propagator in powers of lam*t


def _sinc(x: np.ndarray) -> np.ndarray:
    return np.sinc(x / math.pi)


def _cos_minus_sinc_over_x(x: np.ndarray) -> np.ndarray:
    # (cos x - sinc x)/x -> 0 as x -> 0
    out = np.zeros_like(x)
    big = np.abs(x) > ZERO_EIG_TOL
    out[big] = (np.cos(x[big]) - _sinc(x[big])) / x[big]
    return out


def _cos_minus_sinc_over_x2(x: np.ndarray) -> np.ndarray:
    # (cos x - sinc x)/x^2 -> -1/3 as x -> 0
    out = np.full_like(x, -1.0 / 3.0)
    big = np.abs(x) > ZERO_EIG_TOL
    out[big] = (np.cos(x[big]) - _sinc(x[big])) / x[big] ** 2
    return out


def series_propagator(
    params: DriveParams, trunc: TruncationSpec, t: float, order: int
) -> Operator:
    """Free propagator expanded around the massless one to the given order.

    Order 0 is exp(-i (g t/sqrt2) s_y p); each higher order adds one power of
    lam*t.  All momentum functions are evaluated per p eigenvalue with the
    analytic limits at p = 0.
    """
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    q = hilbert.qubit_ops(params.phi)
    _, p = hilbert.quadrature_ops(trunc)
    w, v = np.linalg.eigh(p.matrix)
    arg = params.g * t * w / math.sqrt(2)

    def pf(values: np.ndarray) -> np.ndarray:
        return (v * values) @ v.conj().T

    i2, sy, sz = np.eye(2), q["sigma_y"].matrix, q["sigma_z"].matrix
    u = np.kron(i2, pf(np.cos(arg))) - 1j * np.kron(sy, pf(np.sin(arg)))
    lam_t = params.lam * t
    if order >= 1:
        u = u - 0.5j * lam_t * np.kron(sz, pf(_sinc(arg)))
    if order >= 2:
        u = u + lam_t**2 / 4 * (
            -0.5 * np.kron(i2, pf(_sinc(arg)))
            - 0.5j * np.kron(sy, pf(_cos_minus_sinc_over_x(arg)))
        )
    if order >= 3:
        u = u - 1j * lam_t**3 / 16 * np.kron(sz, pf(_cos_minus_sinc_over_x2(arg)))
    return Operator(u, "joint")


# ---------------------------------------------------------------------------
# spin-diagonalized position operator (affine in t, no jitter)


@dataclass(frozen=True)
class FWPositionOperator:
    delta_op: np.ndarray
    energy_op: np.ndarray


def fw_position_parts(params: DriveParams, trunc: TruncationSpec) -> FWPositionOperator:
    dirac = DiracParams.from_drive(params)
    if dirac.mass_energy <= 0:
        raise SingularHError("position-operator correction requires mass_energy > 0")
    c, mc2 = dirac.c_sim, dirac.mass_energy
    q = hilbert.qubit_ops(params.phi)
    _, p = hilbert.quadrature_ops(trunc)
    w, v = np.linalg.eigh(p.matrix)
    energy = np.sqrt(c**2 * w**2 + mc2**2)
    dvals = c / (2 * energy) - c**3 * w**2 / (2 * energy**2 * (energy + mc2))
    delta = np.kron(q["sigma_x"].matrix, (v * dvals) @ v.conj().T)
    e_op = np.kron(np.eye(2), (v * energy) @ v.conj().T)
    return FWPositionOperator(delta_op=delta, energy_op=e_op)


def fw_position(params: DriveParams, trunc: TruncationSpec, t: float) -> Operator:
    """Jitter-free position operator x0 + c^2 p H^-1 t + Delta."""
    hp = HeisenbergPosition(params, trunc)
    parts = fw_position_parts(params, trunc)
    return Operator(hp.x0_op + hp.drift_op * t + parts.delta_op, "joint")


# ---------------------------------------------------------------------------
# short-time factorization of the linear-potential propagator


def klein_short_time(
    params: DriveParams,
    trunc: TruncationSpec,
    t: float,
    bulk_levels: int | None = None,
) -> tuple[Operator, float]:
    """Factorized short-time propagator for the linear-potential Hamiltonian.

    Returns the product
        exp(-i H_D t) exp(-i sqrt2 xi t x) exp(-i (g xi t^2 / 2) s_y)
    and its operator-norm distance to the exact propagator, restricted to the
    bulk Fock subspace (levels 0..bulk_levels, default n_max // 2) where the
    canonical commutator holds; the distance scales as O(t^3).

    Note the spin-rotation sign: the +i variant fails to cancel the
    second-order commutator and degrades the remainder to O(t^2).
    """
    dirac = DiracParams.from_drive(params)
    hd = _free_hamiltonian(params, trunc)
    xj, _ = hamiltonians.joint_x_p(trunc)
    q = hilbert.qubit_ops(params.phi)
    hk = hd + dirac.potential_slope * xj

    u_free = expm_herm_generator(hd, -1j * t)
    u_pot = expm_herm_generator(xj, -1j * dirac.potential_slope * t)
    u_spin = expm_herm_generator(
        np.kron(q["sigma_y"].matrix, np.eye(trunc.dim)), -1j * params.g * params.xi * t**2 / 2
    )
    approx = u_free @ u_pot @ u_spin
    exact = expm_herm_generator(hk, -1j * t)

    if bulk_levels is None:
        bulk_levels = trunc.n_max // 2
    keep = np.zeros(trunc.dim)
    keep[: bulk_levels + 1] = 1.0
    proj = np.kron(np.eye(2), np.diag(keep))
    err = float(np.linalg.norm(proj @ (exact - approx) @ proj, 2))
    return Operator(approx, "joint"), err


# ---------------------------------------------------------------------------
# jitter frequency extraction


def zbw_frequency(traj: Trajectory) -> float:
    """Dominant angular frequency (rad/ns) of the position record.

    Linear detrend, Hann window, discrete Fourier peak with quadratic
    interpolation.  Raises NoPeakError when the detrended record carries no
    oscillation (massless case) or no interior spectral peak exists.
    """
    t, xs = traj.times, traj.x
    dt = t[1] - t[0]
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * dt:
        raise ValueError("trajectory must be uniformly sampled")
    resid = xs - np.polyval(np.polyfit(t, xs, 1), t)
    scale = max(1.0, float(np.max(np.abs(xs))))
    if float(np.std(resid)) < 1e-9 * scale:
        raise NoPeakError("detrended position record is flat")
    window = np.hanning(resid.size)
    mag = np.abs(np.fft.rfft(resid * window))
    k = int(np.argmax(mag[1:]) + 1)
    if k >= mag.size - 1 or mag[k] < 10 * np.median(mag[1:]):
        raise NoPeakError("no dominant interior spectral peak")
    denom = mag[k - 1] - 2 * mag[k] + mag[k + 1]
    delta = 0.0 if denom == 0 else 0.5 * (mag[k - 1] - mag[k + 1]) / denom
    freq_cycles = (k + delta) / (resid.size * dt)
    return 2 * math.pi * freq_cycles

"""Hamiltonian builders for the driven qubit-resonator system.

Four pictures of the same physics:

  lab          full driven Hamiltonian, all three microwave drives explicit
  l1           frame rotating at the resonator frequency omega
  interaction  additionally rotated by the strong-drive term of the l1 frame
  effective    time independent: (lam/2) s_z + (g/sqrt2) s_y p + sqrt2 xi x,
               valid under the resonance conditions omega_q = omega,
               omega - nu = 2 Omega, phi = pi/2 and strong driving Omega >> g

plus the Foldy-Wouthuysen operators that block-diagonalize the spin sector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import ConfigError, DegenerateMassError
from .hilbert import Operator, TruncationSpec, as_matrix
from .linalg import hermitian_function

TWO_PI = 2 * math.pi
RESONANCE_TOL = 1e-12


def mhz(value: float) -> float:
    """2*pi x value MHz expressed in rad/ns."""
    return TWO_PI * value * 1e-3


@dataclass(frozen=True)
class DriveParams:
    """All drive/coupling frequencies (rad/ns) and the drive phase (rad).

    omega_q  qubit splitting
    omega    resonator frequency; also the frequency of the strong transversal
             drive and of the longitudinal drive
    g        qubit-field coupling
    Omega    strong transversal drive amplitude
    lam      weak transversal drive amplitude (simulated mass knob)
    nu       weak transversal drive frequency
    xi       longitudinal drive amplitude (simulated potential knob)
    phi      transversal drive phase
    """

    omega_q: float
    omega: float
    g: float
    Omega: float
    lam: float
    nu: float
    xi: float
    phi: float

    @classmethod
    def resonant_mode(
        cls,
        g: float = mhz(10.0),
        Omega: float = mhz(200.0),
        lam: float = 0.0,
        xi: float = 0.0,
        omega: float = mhz(9000.0),
    ) -> "DriveParams":
        """Resonant working point: omega_q = omega, omega - nu = 2 Omega, phi = pi/2."""
        return cls(
            omega_q=omega,
            omega=omega,
            g=g,
            Omega=Omega,
            lam=lam,
            nu=omega - 2 * Omega,
            xi=xi,
            phi=math.pi / 2,
        )

    def is_resonant_mode(self, tol: float = RESONANCE_TOL) -> bool:
        return (
            abs(self.omega_q - self.omega) <= tol
            and abs((self.omega - self.nu) - 2 * self.Omega) <= tol
            and abs(self.phi - math.pi / 2) <= tol
        )

    def require_resonant_mode(self):
        if not self.is_resonant_mode():
            raise ConfigError(
                "resonance conditions violated: need omega_q = omega, "
                "omega - nu = 2*Omega, phi = pi/2"
            )


@dataclass(frozen=True)
class DiracParams:
    """Mapping from drive amplitudes to the simulated relativistic parameters."""

    c_sim: float  # speed-of-light analogue, g/sqrt2
    mass_energy: float  # mc^2 analogue, lam/2
    potential_slope: float  # linear potential slope, sqrt2 * xi

    @classmethod
    def from_drive(cls, params: DriveParams) -> "DiracParams":
        return cls(
            c_sim=params.g / math.sqrt(2),
            mass_energy=params.lam / 2,
            potential_slope=math.sqrt(2) * params.xi,
        )


def _parts(trunc: TruncationSpec, phi: float):
    a, ad = hilbert.ladder_ops(trunc)
    q = hilbert.qubit_ops(phi)
    i2 = hilbert.qubit_identity()
    idf = hilbert.field_identity(trunc)
    return a, ad, q, i2, idf


def build_lab(params: DriveParams, trunc: TruncationSpec, t: float) -> Operator:
    """Full driven Hamiltonian in the lab frame at time t."""
    a, ad, q, i2, idf = _parts(trunc, params.phi)
    sm, sp = q["sigma"].matrix, q["sigma_dag"].matrix
    e_strong = np.exp(1j * (params.omega * t + params.phi))
    e_weak = np.exp(1j * (params.nu * t + params.phi))
    e_long = np.exp(1j * params.omega * t)
    h2 = (
        params.omega_q / 2 * q["sigma_z"].matrix
        - params.Omega * (e_strong * sm + e_strong.conjugate() * sp)
        - params.lam * (e_weak * sm + e_weak.conjugate() * sp)
    )
    h = (
        np.kron(h2, idf.matrix)
        + params.omega * np.kron(i2.matrix, ad.matrix @ a.matrix)
        - params.g * (np.kron(sp, a.matrix) + np.kron(sm, ad.matrix))
        + params.xi * np.kron(i2.matrix, e_long * a.matrix + e_long.conjugate() * ad.matrix)
    )
    return Operator(h, "joint")


def build_l1(params: DriveParams, trunc: TruncationSpec, t: float) -> Operator:
    """Hamiltonian in the frame rotating at the resonator frequency.

    Only the weak transversal drive stays time dependent, oscillating at
    nu - omega.  A residual (omega_q - omega)/2 s_z term is kept so the
    builder agrees with the frame-conjugation of the lab Hamiltonian for
    detuned parameters as well.
    """
    a, ad, q, i2, idf = _parts(trunc, params.phi)
    sm, sp = q["sigma"].matrix, q["sigma_dag"].matrix
    e_phi = np.exp(1j * params.phi)
    e_weak = np.exp(1j * ((params.nu - params.omega) * t + params.phi))
    h2 = (
        (params.omega_q - params.omega) / 2 * q["sigma_z"].matrix
        - params.Omega * (e_phi * sm + e_phi.conjugate() * sp)
        - params.lam * (e_weak * sm + e_weak.conjugate() * sp)
    )
    h = (
        np.kron(h2, idf.matrix)
        - params.g * (np.kron(sp, a.matrix) + np.kron(sm, ad.matrix))
        + params.xi * np.kron(i2.matrix, a.matrix + ad.matrix)
    )
    return Operator(h, "joint")


def h0_l1(params: DriveParams, trunc: TruncationSpec) -> Operator:
    """Strong-drive term of the l1 frame; generator of the interaction picture."""
    q = hilbert.qubit_ops(params.phi)
    e_phi = np.exp(1j * params.phi)
    h2 = -params.Omega * (e_phi * q["sigma"].matrix + e_phi.conjugate() * q["sigma_dag"].matrix)
    return Operator(np.kron(h2, np.eye(trunc.dim)), "joint")


def build_interaction(params: DriveParams, trunc: TruncationSpec, t: float) -> Operator:
    """Interaction-picture Hamiltonian in the rotated spin basis |+->.

    Requires omega_q = omega (the residual detuning term does not commute with
    the strong drive and would break this closed form).
    """
    if abs(params.omega_q - params.omega) > RESONANCE_TOL:
        raise ConfigError("interaction picture requires omega_q = omega")
    a, ad, q, i2, idf = _parts(trunc, params.phi)
    plus = hilbert.spin_vector("plus", params.phi)
    minus = hilbert.spin_vector("minus", params.phi)
    pp = np.outer(plus, plus.conj())
    pm = np.outer(minus, minus.conj())
    spm = np.outer(plus, minus.conj())
    smp = np.outer(minus, plus.conj())
    e2 = np.exp(-2j * params.Omega * t)
    e_phi = np.exp(1j * params.phi)
    e_weak = np.exp(1j * (params.nu - params.omega) * t)

    g_half = -params.g / 2 * np.kron(
        (pp - pm + e2 * spm - e2.conjugate() * smp), e_phi * a.matrix
    )
    lam_half = -params.lam / 2 * e_weak * np.kron(pp - pm - e2 * spm + e2.conjugate() * smp, idf.matrix)
    h = g_half + g_half.conj().T + lam_half + lam_half.conj().T
    h += params.xi * np.kron(i2.matrix, a.matrix + ad.matrix)
    return Operator(h, "joint")


def build_effective(params: DriveParams, trunc: TruncationSpec) -> Operator:
    """Time-independent effective Dirac Hamiltonian (RWA at the resonant point)."""
    params.require_resonant_mode()
    q = hilbert.qubit_ops(params.phi)
    x, p = hilbert.quadrature_ops(trunc)
    h = (
        params.lam / 2 * np.kron(q["sigma_z"].matrix, np.eye(trunc.dim))
        + params.g / math.sqrt(2) * np.kron(q["sigma_y"].matrix, p.matrix)
        + math.sqrt(2) * params.xi * np.kron(np.eye(2), x.matrix)
    )
    return Operator(h, "joint")


def build_nonrel(params: DriveParams, trunc: TruncationSpec) -> Operator:
    """Second-order (nonrelativistic) limit: s_z (g^2/2lam) p^2, plus the potential.

    The kinetic coefficient comes from expanding the spectral gap
    sqrt(lam^2/4 + g^2 p^2/2) = lam/2 + (g^2/2lam) p^2 + O(p^4); the branch-wise
    constant lam/2 is dropped since it only contributes a global phase.
    """
    if params.lam <= 0:
        raise DegenerateMassError("nonrelativistic limit requires lam > 0")
    q = hilbert.qubit_ops(params.phi)
    x, p = hilbert.quadrature_ops(trunc)
    h = params.g**2 / (2 * params.lam) * np.kron(q["sigma_z"].matrix, p.matrix @ p.matrix)
    if params.xi != 0.0:
        h = h + math.sqrt(2) * params.xi * np.kron(np.eye(2), x.matrix)
    return Operator(h, "joint")


def build_fw_hamiltonian(params: DriveParams, trunc: TruncationSpec) -> Operator:
    """Spin-diagonal Hamiltonian s_z sqrt(lam^2/4 + g^2 p^2 / 2)."""
    q = hilbert.qubit_ops(params.phi)
    _, p = hilbert.quadrature_ops(trunc)
    if params.lam == 0.0:
        pe = np.linalg.eigvalsh(p.matrix)
        if np.min(np.abs(pe)) < 1e-12:
            warnings.warn(
                "massless spectrum touches zero: transformed Hamiltonian is "
                "degenerate at p = 0",
                stacklevel=2,
            )
    f = hermitian_function(
        p.matrix, lambda w: np.sqrt(params.lam**2 / 4 + params.g**2 * w**2 / 2)
    )
    return Operator(np.kron(q["sigma_z"].matrix, f), "joint")


def build_fw_unitary(
    params: DriveParams, trunc: TruncationSpec, angle_convention: str = "half-angle"
) -> Operator:
    """Spin-rotation unitary exp(-i theta(p) s_x), evaluated per p eigenvalue.

    half-angle: theta(p) = atan(sqrt2 g p / lam) / 2.  This is the convention
    that exactly block-diagonalizes every 2x2 momentum block (see the
    blockwise oracle in the tests); it is the default.

    literal: theta(p) = atan(g p / (sqrt2 lam)).  Kept to document that the
    un-halved angle does not diagonalize the spin sector.
    """
    if params.lam <= 0:
        raise DegenerateMassError("spin-rotation angle requires lam > 0")
    if angle_convention not in ("half-angle", "literal"):
        raise ValueError(f"unknown angle convention {angle_convention!r}")
    q = hilbert.qubit_ops(params.phi)
    _, p = hilbert.quadrature_ops(trunc)
    w, v = np.linalg.eigh(p.matrix)
    if angle_convention == "half-angle":
        theta = 0.5 * np.arctan(math.sqrt(2) * params.g * w / params.lam)
    else:
        theta = np.arctan(params.g * w / (math.sqrt(2) * params.lam))
    cos_f = (v * np.cos(theta)) @ v.conj().T
    sin_f = (v * np.sin(theta)) @ v.conj().T
    s = np.kron(np.eye(2), cos_f) - 1j * np.kron(q["sigma_x"].matrix, sin_f)
    return Operator(s, "joint")


def joint_x_p(trunc: TruncationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Quadratures lifted to the joint space."""
    x, p = hilbert.quadrature_ops(trunc)
    i2 = np.eye(2)
    return np.kron(i2, x.matrix), np.kron(i2, p.matrix)

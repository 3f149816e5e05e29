"""Expectation values, reduced field states, Wigner maps, trajectories, CSV I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hamiltonians, hilbert, propagation
from .errors import DimensionError, GridTooSmallError, ValidationError
from .hilbert import (
    FieldDensityMatrix,
    Operator,
    QubitFieldState,
    TruncationSpec,
    as_matrix,
)
from .linalg import hermiticity_defect

WIGNER_BOUNDARY_TOL = 1e-4
DEFAULT_WIGNER_RANGE = 6.0
DEFAULT_WIGNER_POINTS = 121


@dataclass(frozen=True)
class Trajectory:
    """Time series of expectation values and truncation diagnostics."""

    times: np.ndarray
    x: np.ndarray
    p: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    norm: np.ndarray
    fock_tail: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(np.abs(np.asarray(self.norm) - 1.0) > 1e-9):
            raise ValidationError("trajectory contains a state with norm drift > 1e-9")


@dataclass(frozen=True)
class WignerMap:
    """Quasi-probability values W(x_i, p_j) on a uniform rectangular grid."""

    x_grid: np.ndarray
    p_grid: np.ndarray
    values: np.ndarray  # shape (len(x_grid), len(p_grid))

    def integral(self) -> float:
        dx = self.x_grid[1] - self.x_grid[0]
        dp = self.p_grid[1] - self.p_grid[0]
        return float(np.sum(self.values) * dx * dp)


def expectation(op, psi):
    """<psi|op|psi>; real for Hermitian operators, complex otherwise."""
    m = as_matrix(op)
    v = psi.amplitudes if isinstance(psi, QubitFieldState) else np.asarray(psi, dtype=complex)
    if m.shape[0] != v.shape[0]:
        raise DimensionError(f"operator dim {m.shape[0]} vs state dim {v.shape[0]}")
    val = np.vdot(v, m @ v)
    if hermiticity_defect(m) <= 1e-12:
        return float(val.real)
    return complex(val)


def reduce_field(psi) -> FieldDensityMatrix:
    """Partial trace over the qubit."""
    if isinstance(psi, QubitFieldState):
        m = psi.amplitudes.reshape(2, psi.dim)
    else:
        v = np.asarray(psi, dtype=complex)
        m = v.reshape(2, v.shape[0] // 2)
    rho = m[0][:, None] * m[0].conj()[None, :] + m[1][:, None] * m[1].conj()[None, :]
    rho = (rho + rho.conj().T) / 2
    return FieldDensityMatrix(rho / np.trace(rho).real)


def wigner_map(
    rho: FieldDensityMatrix,
    x_grid: np.ndarray | None = None,
    p_grid: np.ndarray | None = None,
) -> WignerMap:
    """Displaced-parity Wigner function.

    W(x, p) = Tr[rho D(alpha) Pi D(alpha)+] / pi with alpha = (x + i p)/sqrt2;
    with this convention the map integrates to 1.
    """
    if x_grid is None:
        x_grid = np.linspace(-DEFAULT_WIGNER_RANGE, DEFAULT_WIGNER_RANGE, DEFAULT_WIGNER_POINTS)
    if p_grid is None:
        p_grid = np.linspace(-DEFAULT_WIGNER_RANGE, DEFAULT_WIGNER_RANGE, DEFAULT_WIGNER_POINTS)
    x_grid = np.asarray(x_grid, dtype=float)
    p_grid = np.asarray(p_grid, dtype=float)
    d = rho.dim
    # the displaced state needs Fock support up to about |alpha|^2 plus a few
    # standard deviations; pad the workspace so edge-of-grid parities stay
    # accurate (zero-padding rho is exact since it has no support above d - 1)
    amax_sq = (np.max(np.abs(x_grid)) ** 2 + np.max(np.abs(p_grid)) ** 2) / 2.0
    n_work = max(d - 1, int(math.ceil(amax_sq + 6.0 * math.sqrt(amax_sq) + 10.0)))
    trunc = TruncationSpec(n_work)
    rho_w = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    rho_w[:d, :d] = rho.entries
    # D(alpha) Pi D(alpha)+ = e^{i p0 x} e^{-2 i x0 p} Pi e^{-i p0 x}, so in the
    # x eigenbasis each grid row reduces to quadratic forms in a phase matrix
    x_op, p_op = hilbert.quadrature_ops(trunc)
    lam_x, wx = np.linalg.eigh(x_op.matrix)
    lam_p, wp = np.linalg.eigh(p_op.matrix)
    rho_x = wx.conj().T @ rho_w @ wx
    pi_diag = (-1.0) ** np.arange(trunc.dim)
    u = np.exp(1j * np.outer(lam_x, p_grid))
    values = np.empty((x_grid.size, p_grid.size))
    for i, xv in enumerate(x_grid):
        shift = wp @ ((np.exp(-2j * xv * lam_p))[:, None] * wp.conj().T)
        b_x = wx.conj().T @ (shift * pi_diag[None, :]) @ wx
        c = rho_x * b_x.T
        values[i, :] = np.sum(u.conj() * (c @ u), axis=0).real / math.pi
    boundary = max(
        np.max(np.abs(values[0, :])),
        np.max(np.abs(values[-1, :])),
        np.max(np.abs(values[:, 0])),
        np.max(np.abs(values[:, -1])),
    )
    if boundary >= WIGNER_BOUNDARY_TOL:
        raise GridTooSmallError(
            f"|W| reaches {boundary:.2e} on the grid boundary; enlarge the grid"
        )
    return WignerMap(x_grid, p_grid, values)


def _observable_set(trunc: TruncationSpec, phi: float):
    q = hilbert.qubit_ops(phi)
    x, p = hilbert.quadrature_ops(trunc)
    idf = np.eye(trunc.dim)
    i2 = np.eye(2)
    return {
        "x": np.kron(i2, x.matrix),
        "p": np.kron(i2, p.matrix),
        "sy": np.kron(q["sigma_y"].matrix, idf),
        "sz": np.kron(q["sigma_z"].matrix, idf),
    }


def trajectory_from_states(
    times: np.ndarray, states: np.ndarray, trunc: TruncationSpec, phi: float = math.pi / 2
) -> Trajectory:
    ops = _observable_set(trunc, phi)
    d = trunc.dim
    recs = {k: [] for k in ("x", "p", "sy", "sz", "norm", "fock_tail")}
    for psi in states:
        for key in ("x", "p", "sy", "sz"):
            recs[key].append(np.vdot(psi, ops[key] @ psi).real)
        recs["norm"].append(float(np.linalg.norm(psi)))
        m = psi.reshape(2, d)
        recs["fock_tail"].append(float(np.sum(np.abs(m[:, d - hilbert.TAIL_LEVELS :]) ** 2)))
    return Trajectory(np.asarray(times), *(np.asarray(recs[k]) for k in ("x", "p", "sy", "sz", "norm", "fock_tail")))


def record_trajectory(
    source,
    params: hamiltonians.DriveParams,
    trunc: TruncationSpec,
    psi0,
    grid: propagation.TimeGrid,
    frame: str | None = None,
) -> Trajectory:
    """Record all trajectory observables along an evolution.

    `source` is either a time-independent Hamiltonian (Operator/ndarray) or a
    time-dependent builder f(params, trunc, t); the latter is propagated with
    the midpoint-exponential scheme.
    """
    if callable(source):
        times, states = propagation.propagate_td(source, params, trunc, psi0, grid, frame)
    else:
        times = grid.sample_times()
        states = propagation.propagate_ti_sampled(source, psi0, times - grid.t_start)
    return trajectory_from_states(times, states, trunc, params.phi)


# ---------------------------------------------------------------------------
# CSV output.  "# key=value" metadata lines, then a header row, then data rows
# with 12 significant digits.  No wall-clock content anywhere: identical inputs
# produce byte-identical files.


def _format_metadata(metadata: dict) -> list[str]:
    return [f"# {k}={v}" for k, v in metadata.items()]


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_trajectory_csv(traj: Trajectory, metadata: dict, path: str | Path) -> None:
    lines = _format_metadata(metadata)
    lines.append("t,x,p,sy,sz,norm,fock_tail")
    for k in range(traj.times.size):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    traj.times[k], traj.x[k], traj.p[k], traj.sy[k],
                    traj.sz[k], traj.norm[k], traj.fock_tail[k],
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_wigner_csv(wmap: WignerMap, metadata: dict, path: str | Path) -> None:
    lines = _format_metadata(metadata)
    lines.append("x,p,W")
    for i, xv in enumerate(wmap.x_grid):
        for j, pv in enumerate(wmap.p_grid):
            lines.append(f"{_fmt(xv)},{_fmt(pv)},{_fmt(wmap.values[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n")

"""Truncated qubit-resonator Hilbert space: operators and states.

Basis ordering (fixed, used by all modules and by the state file format):
joint index = q * (n_max + 1) + n, with q = 0 for |g>, q = 1 for |e>,
and n the Fock level. Qubit matrices are written in the (|g>, |e>) basis.

Units: hbar = 1, frequencies in rad/ns throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DimensionError, TruncationError, ValidationError
from .linalg import hermiticity_defect

# Population contained in the top TAIL_LEVELS Fock levels counts as "tail";
# it is the truncation-health diagnostic recorded in every trajectory.
TAIL_LEVELS = 3


@dataclass(frozen=True)
class TruncationSpec:
    """Fock truncation: levels 0..n_max are retained."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def joint_dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix tagged with the space it acts on."""

    matrix: np.ndarray
    space: str  # "field" | "qubit" | "joint"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if self.space not in ("field", "qubit", "joint"):
            raise ValueError(f"unknown space tag {self.space!r}")
        if self.space == "qubit" and m.shape[0] != 2:
            raise DimensionError("qubit operators are 2x2")
        if self.space == "joint" and m.shape[0] % 2 != 0:
            raise DimensionError("joint dimension must be even")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.space)

    def is_hermitian(self, tol: float = 1e-13) -> bool:
        return hermiticity_defect(self.matrix) <= tol

    def _coerce(self, other):
        if isinstance(other, Operator):
            if other.space != self.space:
                raise DimensionError(f"space mismatch: {self.space} vs {other.space}")
            return other.matrix
        return other

    def __matmul__(self, other):
        o = self._coerce(other)
        if isinstance(o, np.ndarray) and o.ndim == 1:
            return self.matrix @ o
        return Operator(self.matrix @ o, self.space)

    def __add__(self, other):
        return Operator(self.matrix + self._coerce(other), self.space)

    def __sub__(self, other):
        return Operator(self.matrix - self._coerce(other), self.space)

    def __mul__(self, scalar):
        return Operator(self.matrix * scalar, self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(-self.matrix, self.space)


def as_matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)


@dataclass(frozen=True)
class QubitFieldState:
    """Normalized joint state vector in the documented basis ordering."""

    amplitudes: np.ndarray
    n_max: int

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.shape != (2 * (self.n_max + 1),):
            raise DimensionError(
                f"state length {v.shape} does not match n_max={self.n_max}"
            )
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > 1e-9:
            raise ValidationError(f"state norm {nrm!r} deviates from 1 by more than 1e-9")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def qubit_block(self, q: int) -> np.ndarray:
        d = self.dim
        return self.amplitudes[q * d : (q + 1) * d]

    def fock_tail(self) -> float:
        """Population in the top TAIL_LEVELS Fock levels (both qubit sectors)."""
        psi = self.amplitudes.reshape(2, self.dim)
        return float(np.sum(np.abs(psi[:, self.dim - TAIL_LEVELS :]) ** 2))


@dataclass(frozen=True)
class FieldDensityMatrix:
    """Reduced density matrix of the resonator mode."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("density matrix must be square")
        if hermiticity_defect(m) > 1e-12:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-9:
            raise ValidationError(f"trace {tr} deviates from 1 by more than 1e-9")
        if np.min(np.linalg.eigvalsh(m)) < -1e-10:
            raise ValueError("density matrix has eigenvalue below -1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


# ---------------------------------------------------------------------------
# elementary operators


def ladder_ops(trunc: TruncationSpec) -> tuple[Operator, Operator]:
    """Annihilation and creation operators on the truncated field space."""
    d = trunc.dim
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    return Operator(a, "field"), Operator(a.conj().T, "field")


def number_op(trunc: TruncationSpec) -> Operator:
    return Operator(np.diag(np.arange(trunc.dim, dtype=complex)), "field")


def quadrature_ops(trunc: TruncationSpec) -> tuple[Operator, Operator]:
    """Dimensionless quadratures x = (a + a*)/sqrt2, p = -i(a - a*)/sqrt2."""
    a, ad = ladder_ops(trunc)
    x = (a.matrix + ad.matrix) / math.sqrt(2)
    p = -1j * (a.matrix - ad.matrix) / math.sqrt(2)
    return Operator(x, "field"), Operator(p, "field")


def qubit_ops(phi: float = math.pi / 2) -> dict[str, Operator]:
    """Qubit operators in the (|g>, |e>) basis.

    sigma = |g><e|, sigma_y = i|g><e| - i|e><g|, sigma_z = |e><e| - |g><g|,
    sigma_x = i sigma_z sigma_y.  The rotated-basis projectors P_plus/P_minus
    project onto |+-> = (|g> +- e^{-i phi}|e>)/sqrt2.
    """
    sigma = np.array([[0, 1], [0, 0]], dtype=complex)
    sigma_dag = sigma.conj().T
    sz = np.array([[-1, 0], [0, 1]], dtype=complex)
    sy = 1j * sigma - 1j * sigma_dag
    sx = 1j * sz @ sy
    plus = spin_vector("plus", phi)
    minus = spin_vector("minus", phi)
    return {
        "sigma": Operator(sigma, "qubit"),
        "sigma_dag": Operator(sigma_dag, "qubit"),
        "sigma_x": Operator(sx, "qubit"),
        "sigma_y": Operator(sy, "qubit"),
        "sigma_z": Operator(sz, "qubit"),
        "P_plus": Operator(np.outer(plus, plus.conj()), "qubit"),
        "P_minus": Operator(np.outer(minus, minus.conj()), "qubit"),
    }


def spin_vector(label: str, phi: float = math.pi / 2) -> np.ndarray:
    """Qubit state vector for one of the labels g, e, plus, minus."""
    if label == "g":
        return np.array([1, 0], dtype=complex)
    if label == "e":
        return np.array([0, 1], dtype=complex)
    if label == "plus":
        return np.array([1, np.exp(-1j * phi)], dtype=complex) / math.sqrt(2)
    if label == "minus":
        return np.array([1, -np.exp(-1j * phi)], dtype=complex) / math.sqrt(2)
    raise ValueError(f"unknown spin label {label!r}")


def _check_amplitude(alpha: complex, trunc: TruncationSpec):
    if abs(alpha) ** 2 > trunc.n_max / 4:
        raise TruncationError(
            f"|alpha|^2 = {abs(alpha)**2:.3f} exceeds n_max/4 = {trunc.n_max / 4:.3f}"
        )


def coherent_state(alpha: complex, trunc: TruncationSpec) -> np.ndarray:
    """Field vector of the coherent state |alpha>, renormalized after truncation."""
    _check_amplitude(alpha, trunc)
    n = np.arange(trunc.dim)
    if alpha == 0:
        c = np.zeros(trunc.dim, dtype=complex)
        c[0] = 1.0
        return c
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, trunc.dim)))))
    c = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - log_fact / 2)
    return c / np.linalg.norm(c)


@lru_cache(maxsize=8)
def _displacement_eigensystem(n_max: int):
    # Hermitian generator of the real displacement exp(r (a+ - a)).
    trunc = TruncationSpec(n_max)
    a, ad = ladder_ops(trunc)
    k = 1j * (ad.matrix - a.matrix)  # (a+ - a) = -i k
    w, v = np.linalg.eigh(k)
    return w, v


def displacement_op(alpha: complex, trunc: TruncationSpec) -> Operator:
    """Unitary displacement, computed by exponentiating alpha a+ - alpha* a.

    The generator is conjugated to the real-displacement one by a Fock-space
    phase rotation, so a single cached eigendecomposition serves all alpha.
    Large displacements are allowed; accuracy near the truncation edge is the
    caller's concern (the Wigner routines check their own grid boundary).
    """
    r, theta = abs(alpha), np.angle(alpha)
    w, v = _displacement_eigensystem(trunc.n_max)
    d0 = (v * np.exp(-1j * r * w)) @ v.conj().T
    rot = np.exp(1j * theta * np.arange(trunc.dim))
    return Operator((rot[:, None] * d0) * rot.conj()[None, :], "field")


def parity_op(trunc: TruncationSpec) -> Operator:
    return Operator(np.diag((-1.0 + 0j) ** np.arange(trunc.dim)), "field")


def tensor(q_op: Operator, f_op: Operator) -> Operator:
    """Joint operator q_op (x) f_op in the documented index ordering."""
    if q_op.space != "qubit" or f_op.space != "field":
        raise DimensionError("tensor expects (qubit, field) operands")
    return Operator(np.kron(q_op.matrix, f_op.matrix), "joint")


def qubit_identity() -> Operator:
    return Operator(np.eye(2, dtype=complex), "qubit")


def field_identity(trunc: TruncationSpec) -> Operator:
    return Operator(np.eye(trunc.dim, dtype=complex), "field")


def joint_state(
    spin: str | np.ndarray, alpha: complex, trunc: TruncationSpec, phi: float = math.pi / 2
) -> QubitFieldState:
    """Product state (spin) x (coherent |alpha>)."""
    sv = spin_vector(spin, phi) if isinstance(spin, str) else np.asarray(spin, dtype=complex)
    fv = coherent_state(alpha, trunc)
    amps = np.kron(sv, fv)
    return QubitFieldState(amps / np.linalg.norm(amps), trunc.n_max)


# ---------------------------------------------------------------------------
# state file format: "# n_max=<int>" header, then one "q n re im" line per
# basis index, in index order.  %.17g round-trips binary64 exactly.


def save_state(state: QubitFieldState, path: str | Path) -> None:
    d = state.dim
    lines = [f"# n_max={state.n_max}"]
    for idx, amp in enumerate(state.amplitudes):
        q, n = divmod(idx, d)
        lines.append(f"{q} {n} {amp.real:.17g} {amp.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_state(path: str | Path) -> QubitFieldState:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# n_max="):
        raise ValueError("missing '# n_max=' header")
    n_max = int(text[0].split("=", 1)[1])
    d = n_max + 1
    amps = np.zeros(2 * d, dtype=complex)
    for line in text[1:]:
        if not line.strip():
            continue
        q_s, n_s, re_s, im_s = line.split()
        amps[int(q_s) * d + int(n_s)] = float(re_s) + 1j * float(im_s)
    return QubitFieldState(amps, n_max)

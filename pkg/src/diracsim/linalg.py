"""Dense Hermitian linear algebra helpers.

All operator functions (exp, sqrt, atan, ...) are evaluated by full
eigendecomposition; joint dimensions stay below ~200, so this is exact
to roundoff and cheap.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NonHermitianError

HERMITICITY_TOL = 1e-13


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return m


def hermitian_function(m: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix via its spectrum."""
    w, v = np.linalg.eigh(require_hermitian(m))
    return (v * f(w)) @ v.conj().T


def expm_herm_generator(h: np.ndarray, scale: complex = -1j) -> np.ndarray:
    """exp(scale * h) for Hermitian h; exactly unitary (to roundoff) for scale = -i*t."""
    w, v = np.linalg.eigh(require_hermitian(h))
    return (v * np.exp(scale * w)) @ v.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))

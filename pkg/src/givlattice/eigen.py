"""Dense Hermitian eigensolver with a checked contract.

Delegates to LAPACK through ``numpy.linalg.eigh`` and verifies the result
with an explicit residual bound before handing it back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["HermitianMatrix", "EigenError", "EigenResult", "eigh", "RESIDUAL_TOL"]

RESIDUAL_TOL = 1e-10


class EigenError(RuntimeError):
    """Raised when the eigensolver output fails its residual check."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class HermitianMatrix:
    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        a = a.astype(complex)
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
        if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-12 * scale:
            raise ValueError("matrix is not Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def order(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray | None
    residual: float


def eigh(matrix: HermitianMatrix | np.ndarray, want_vectors: bool = False) -> EigenResult:
    """Ascending eigenvalues (and orthonormal eigenvectors) of a Hermitian matrix.

    The residual max_i ||A v_i - lambda_i v_i|| must not exceed
    1e-10 * max(1, ||A||_max * order); otherwise ``EigenError`` is raised.
    """
    if not isinstance(matrix, HermitianMatrix):
        matrix = HermitianMatrix(matrix)
    a = matrix.data
    n = matrix.order
    if n == 0:
        return EigenResult(np.zeros(0), np.zeros((0, 0), complex) if want_vectors else None, 0.0)
    w, v = np.linalg.eigh(a)
    res = float(np.max(np.linalg.norm(a @ v - v * w, axis=0)))
    bound = RESIDUAL_TOL * max(1.0, float(np.max(np.abs(a))) * n)
    if not np.isfinite(res) or res > bound:
        raise EigenError("eigen decomposition failed its residual check",
                         {"order": n, "residual": res, "bound": bound})
    return EigenResult(w, v if want_vectors else None, res)

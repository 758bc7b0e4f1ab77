"""Complex Hermitian matrix utilities for the LMI machinery.

Everything here operates on plain numpy arrays.  Complex Hermitian
eigenproblems are routed through the real symmetric embedding
``[[Re A, -Im A], [Im A, Re A]]`` so that one real eigensolver code path
serves every spectrum and definiteness query.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError


def hermiticity_defect(a: np.ndarray) -> float:
    """Max-norm of A - A', scaled by max(1, max-norm of A)."""
    a = np.asarray(a)
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    return float(np.abs(a - a.conj().T).max()) / scale


def is_hermitian(a: np.ndarray, rtol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and hermiticity_defect(a) <= rtol


def ccr_signature(n: int) -> np.ndarray:
    """The 2n x 2n commutation signature J = diag(+I_n, -I_n)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


def block_swap(n: int) -> np.ndarray:
    """The 2n x 2n block swap (anti-diagonal identity blocks)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, i], [i, z]])


def drift_matrix(m: np.ndarray, n_doubled: np.ndarray) -> np.ndarray:
    """Drift matrix -i J M - (1/2) J N' J N of the doubled-up dynamics.

    ``m`` is the 2n x 2n Hermitian Hamiltonian matrix, ``n_doubled`` the
    2m x 2n doubled coupling matrix.
    """
    m = np.asarray(m, dtype=complex)
    n_doubled = np.asarray(n_doubled, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ValidationError(f"M must be square of even size, got {m.shape}")
    if not is_hermitian(m):
        raise ValidationError("M must be Hermitian")
    two_n = m.shape[0]
    if n_doubled.ndim != 2 or n_doubled.shape[1] != two_n or n_doubled.shape[0] % 2:
        raise ValidationError(
            f"N must be 2m x {two_n}, got {n_doubled.shape}"
        )
    j_n = ccr_signature(two_n // 2)
    j_m = ccr_signature(n_doubled.shape[0] // 2)
    return -1j * j_n @ m - 0.5 * j_n @ n_doubled.conj().T @ j_m @ n_doubled


def embed_complex(a: np.ndarray) -> np.ndarray:
    """Real embedding [[Re A, -Im A], [Im A, Re A]] of any complex matrix."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def real_embedding(a: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Real symmetric embedding of a Hermitian matrix.

    The embedding is symmetric and positive semidefinite exactly when the
    input is; its spectrum is the input spectrum with every eigenvalue
    doubled.
    """
    if not is_hermitian(a, rtol):
        raise ValidationError("real_embedding requires a Hermitian matrix")
    return embed_complex(a)


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending.

    Computed on the real embedding; the doubled spectrum is deduplicated by
    pairing adjacent sorted values.
    """
    w = np.linalg.eigvalsh(real_embedding(a))
    return w[0::2]


def hermitian_lambda_max(a: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    return float(hermitian_eigenvalues(a)[-1])


def default_margin(a: np.ndarray) -> float:
    """Default strictness margin 1e-8 * max(1, max-norm of A)."""
    return 1e-8 * max(1.0, float(np.abs(np.asarray(a)).max()))


def is_negative_definite(a: np.ndarray, margin: float = 0.0) -> bool:
    """True iff lambda_max(A) <= -margin."""
    if margin < 0:
        raise ValidationError("margin must be >= 0")
    return hermitian_lambda_max(a) <= -margin

"""Assembly of the performance LMI, its Schur-complement quadratic form,
the structured-P parameterization, and the standard-form conic program.

The decision variable is constrained to the structured subspace
P = [[P1, P2], [P2#, P1#]] (P1 Hermitian, P2 symmetric) by construction:
the conic program's unknowns are coordinates in a Hermitian basis of that
subspace, so no extra structure constraints are ever needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import block_swap, ccr_signature, drift_matrix, embed_complex
from .model import PlantModel, SectorConstants, doubled_matrices


@dataclass(frozen=True)
class StructuredPBasis:
    """Hermitian basis of the structured subspace; d = n^2 + n(n+1)."""

    n: int
    matrices: tuple

    @property
    def dim(self) -> int:
        return len(self.matrices)


def _doubled(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    return np.block([[p1, p2], [p2.conj(), p1.conj()]])


def p_basis(n: int) -> StructuredPBasis:
    """Basis of structured Hermitian matrices, ordered deterministically:
    P1 diagonal, P1 off-diagonal (real, imag), then P2 upper triangle
    (real, imag)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    z = np.zeros((n, n), dtype=complex)
    mats = []
    for i in range(n):
        p1 = z.copy()
        p1[i, i] = 1.0
        mats.append(_doubled(p1, z))
    for i in range(n):
        for j in range(i + 1, n):
            p1 = z.copy()
            p1[i, j] = 1.0
            p1[j, i] = 1.0
            mats.append(_doubled(p1, z))
            p1 = z.copy()
            p1[i, j] = 1j
            p1[j, i] = -1j
            mats.append(_doubled(p1, z))
    for i in range(n):
        for j in range(i, n):
            p2 = z.copy()
            p2[i, j] = 1.0
            p2[j, i] = 1.0
            mats.append(_doubled(z, p2))
            p2 = z.copy()
            p2[i, j] = 1j
            p2[j, i] = 1j
            mats.append(_doubled(z, p2))
    assert len(mats) == n * n + n * (n + 1)
    return StructuredPBasis(n, tuple(mats))


def matrix_from_coords(basis: StructuredPBasis, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.dim,):
        raise ValidationError(
            f"coordinate vector must have length {basis.dim}, got {x.shape}"
        )
    out = np.zeros((2 * basis.n, 2 * basis.n), dtype=complex)
    for xi, b in zip(x, basis.matrices):
        out += xi * b
    return out


def coords_from_matrix(basis: StructuredPBasis, p: np.ndarray,
                       rtol: float = 1e-10) -> np.ndarray:
    """Unique coordinates of a structured Hermitian matrix.

    Raises if ``p`` is not (to ``rtol``) in the structured subspace.
    """
    n = basis.n
    p = np.asarray(p, dtype=complex)
    if p.shape != (2 * n, 2 * n):
        raise ValidationError(f"P must be {2*n}x{2*n}, got {p.shape}")
    x = []
    for i in range(n):
        x.append(p[i, i].real)
    for i in range(n):
        for j in range(i + 1, n):
            x.append(p[i, j].real)
            x.append(p[i, j].imag)
    for i in range(n):
        for j in range(i, n):
            x.append(p[i, n + j].real)
            x.append(p[i, n + j].imag)
    x = np.array(x)
    resid = np.abs(matrix_from_coords(basis, x) - p).max()
    if resid > rtol * max(1.0, float(np.abs(p).max())):
        raise ValidationError(
            f"matrix is not in the structured subspace (residual {resid:.3e})"
        )
    return x


def assemble_lmi_doubled(P: np.ndarray, tau1: float, kappa: float,
                         M: np.ndarray, N: np.ndarray, e: np.ndarray) -> np.ndarray:
    """The (2n+1) x (2n+1) Hermitian LMI block matrix at a given P.

    Layout: [[F'P + PF + kappa * S e^T e# S,  2 P J S e^T],
             [2 e# S J P,                     -1/tau1^2]]
    with S the block swap and F the drift matrix.
    """
    if tau1 <= 0:
        raise ValidationError("tau1 must be positive")
    P = np.asarray(P, dtype=complex)
    two_n = P.shape[0]
    if P.shape != (two_n, two_n) or two_n % 2:
        raise ValidationError(f"P must be square of even size, got {P.shape}")
    n = two_n // 2
    e = np.asarray(e, dtype=complex).reshape(-1)
    if e.size != two_n:
        raise ValidationError(f"E must have length {two_n}, got {e.size}")
    J = ccr_signature(n)
    S = block_swap(n)
    F = drift_matrix(M, N)
    v = S @ e
    vv = np.outer(v, v.conj())
    col = 2.0 * (P @ (J @ v))
    out = np.zeros((two_n + 1, two_n + 1), dtype=complex)
    out[:two_n, :two_n] = F.conj().T @ P + P @ F + kappa * vv
    out[:two_n, two_n] = col
    out[two_n, :two_n] = col.conj()
    out[two_n, two_n] = -1.0 / tau1**2
    return out


def assemble_lmi(P: np.ndarray, tau1: float, kappa: float,
                 plant: PlantModel) -> np.ndarray:
    M, N, e = doubled_matrices(plant)
    return assemble_lmi_doubled(P, tau1, kappa, M, N, e)


def assemble_qmi_doubled(P: np.ndarray, tau1: float, kappa: float,
                         M: np.ndarray, N: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Schur complement of the LMI: F'P + PF + 4 tau1^2 (PJv)(PJv)' + kappa vv'."""
    if tau1 <= 0:
        raise ValidationError("tau1 must be positive")
    P = np.asarray(P, dtype=complex)
    two_n = P.shape[0]
    n = two_n // 2
    e = np.asarray(e, dtype=complex).reshape(-1)
    J = ccr_signature(n)
    S = block_swap(n)
    F = drift_matrix(M, N)
    v = S @ e
    pjv = P @ (J @ v)
    return (F.conj().T @ P + P @ F
            + 4.0 * tau1**2 * np.outer(pjv, pjv.conj())
            + kappa * np.outer(v, v.conj()))


def assemble_qmi(P: np.ndarray, tau1: float, kappa: float,
                 plant: PlantModel) -> np.ndarray:
    M, N, e = doubled_matrices(plant)
    return assemble_qmi_doubled(P, tau1, kappa, M, N, e)


@dataclass(frozen=True)
class ConstraintBlock:
    """Affine PSD constraint constant + sum_i x_i coeffs[i] >= 0.

    Stored as real symmetric matrices (complex Hermitian data arrives here
    through the real embedding, which maps PSD to PSD).
    """

    constant: np.ndarray
    coeffs: tuple

    @property
    def size(self) -> int:
        return self.constant.shape[0]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        out = self.constant.copy()
        for xi, c in zip(np.asarray(x, dtype=float), self.coeffs):
            if xi != 0.0:
                out = out + xi * c
        return out


@dataclass(frozen=True)
class ConicProblem:
    """minimize c.x + offset subject to each block being PSD."""

    num_vars: int
    c: np.ndarray
    offset: float
    blocks: tuple
    basis: StructuredPBasis | None = None

    def objective(self, x: np.ndarray) -> float:
        return float(self.c @ np.asarray(x, dtype=float)) + self.offset


def build_conic_program(plant: PlantModel, sector: SectorConstants,
                        tau1: float, kappa_mode: str,
                        eps: float = 1e-8) -> ConicProblem:
    """Standard-form conic program for the minimal certified cost bound.

    Variables are the structured-P coordinates plus one slack t bounding
    |mu|. Constraints: (i) -LMI(x) - eps*I >= 0, (ii) P(x) - eps*I >= 0,
    (iii) [[t, mu(x)], [conj(mu(x)), t]] >= 0.  Objective:
    tr(P(x) K) + sqrt(delta3) * t + zeta(tau1) with K the coupling-trace
    kernel.
    """
    from .analysis import kappa as kappa_fn, zeta as zeta_fn

    if eps <= 0:
        raise ValidationError("eps must be positive")
    if tau1 <= 0:
        raise ValidationError("tau1 must be positive")
    kap = kappa_fn(tau1, sector.gamma0, sector.gamma1, sector.gamma2,
                   kappa_mode)
    offset = zeta_fn(tau1, sector.delta0, sector.delta1, sector.delta2)

    M, N, e = doubled_matrices(plant)
    n = plant.n_modes
    m = plant.m_channels
    basis = p_basis(n)
    d = basis.dim
    J = ccr_signature(n)
    S = block_swap(n)
    F = drift_matrix(M, N)
    v = S @ e
    vv = np.outer(v, v.conj())
    sel = np.zeros((2 * m, 2 * m), dtype=complex)
    sel[:m, :m] = np.eye(m)
    kernel = J @ N.conj().T @ sel @ N @ J

    c = np.zeros(d + 1)
    for i, B in enumerate(basis.matrices):
        c[i] = float(np.trace(B @ kernel).real)
    c[d] = float(np.sqrt(sector.delta3))

    zero = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)

    # (i) -LMI(x) - eps I >= 0
    const = zero.copy()
    const[: 2 * n, : 2 * n] = -kap * vv
    const[2 * n, 2 * n] = 1.0 / tau1**2
    const -= eps * np.eye(2 * n + 1)
    coeffs = []
    for B in basis.matrices:
        blk = zero.copy()
        blk[: 2 * n, : 2 * n] = -(F.conj().T @ B + B @ F)
        col = -2.0 * (B @ (J @ v))
        blk[: 2 * n, 2 * n] = col
        blk[2 * n, : 2 * n] = col.conj()
        coeffs.append(blk)
    coeffs.append(zero)
    block_lmi = ConstraintBlock(
        embed_complex(const), tuple(embed_complex(b) for b in coeffs)
    )

    # (ii) P(x) - eps I >= 0
    const = -eps * np.eye(2 * n, dtype=complex)
    coeffs = list(basis.matrices) + [np.zeros((2 * n, 2 * n), dtype=complex)]
    block_pos = ConstraintBlock(
        embed_complex(const), tuple(embed_complex(b) for b in coeffs)
    )

    # (iii) [[t, mu(x)], [conj(mu(x)), t]] >= 0, i.e. t >= |mu(x)|
    sjpj = S @ J
    coeffs = []
    for B in basis.matrices:
        mu_i = -(e @ (sjpj @ B @ J) @ e)
        blk = np.zeros((2, 2), dtype=complex)
        blk[0, 1] = mu_i
        blk[1, 0] = np.conj(mu_i)
        coeffs.append(blk)
    coeffs.append(np.eye(2, dtype=complex))
    block_mu = ConstraintBlock(
        embed_complex(np.zeros((2, 2), dtype=complex)),
        tuple(embed_complex(b) for b in coeffs),
    )

    return ConicProblem(
        num_vars=d + 1,
        c=c,
        offset=float(offset),
        blocks=(block_lmi, block_pos, block_mu),
        basis=basis,
    )

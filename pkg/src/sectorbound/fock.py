"""Truncated Fock-space operator algebra and master-equation simulation.

Operators are dense matrices on the product basis with mode 0 as the most
significant Kronecker factor.  Truncation corrupts only the highest photon
levels, so algebraic identities are checked on the interior subspace
(total photon number at most ``interior_cutoff``), where they are exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analysis import mu as mu_constant, trace_term
from .errors import IntegrationError, ValidationError
from .model import CostSpec, NonlinearitySpec, PlantModel, doubled_matrices

TOP_LEVEL_LEAK_THRESHOLD = 1e-6


class TruncationLeakWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FockSpace:
    """Truncated multimode Fock space.

    ``cutoff`` is the per-mode photon truncation (dimension cutoff+1 per
    mode); ``interior_cutoff`` bounds the total photon number of the
    truncation-artifact-free subspace.
    """

    n_modes: int
    cutoff: int
    interior_cutoff: int | None = None
    max_dim: int = 4096

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValidationError("n_modes must be >= 1")
        if self.interior_cutoff is None:
            object.__setattr__(self, "interior_cutoff", max(self.cutoff - 2, 0))
        if self.cutoff < self.interior_cutoff + 2:
            raise ValidationError(
                "cutoff must be at least interior_cutoff + 2"
            )
        if self.dim > self.max_dim:
            raise ValidationError(
                f"dimension {self.dim} exceeds the cap {self.max_dim}"
            )

    @property
    def mode_dim(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.mode_dim ** self.n_modes

    def occupations(self) -> np.ndarray:
        """(dim, n_modes) array of photon numbers per basis state."""
        d = self.mode_dim
        idx = np.arange(self.dim)
        out = np.zeros((self.dim, self.n_modes), dtype=int)
        for k in range(self.n_modes - 1, -1, -1):
            out[:, k] = idx % d
            idx = idx // d
        return out


def mode_annihilator(space: FockSpace, mode_index: int) -> np.ndarray:
    """Lowering operator of one mode: a[k, k+1] = sqrt(k+1), identity on
    the other modes."""
    if not 0 <= mode_index < space.n_modes:
        raise ValidationError(
            f"mode_index {mode_index} out of range for {space.n_modes} modes"
        )
    d = space.mode_dim
    a = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        a[k, k + 1] = math.sqrt(k + 1)
    out = np.eye(1, dtype=complex)
    for k in range(space.n_modes):
        out = np.kron(out, a if k == mode_index else np.eye(d, dtype=complex))
    return out


def interior_projector(space: FockSpace) -> np.ndarray:
    """Diagonal projector onto total photon number <= interior_cutoff."""
    total = space.occupations().sum(axis=1)
    return np.diag((total <= space.interior_cutoff).astype(float)).astype(complex)


def top_level_mask(space: FockSpace) -> np.ndarray:
    """Boolean mask of basis states with any mode at the cutoff level."""
    return (space.occupations() == space.cutoff).any(axis=1)


def build_z(space: FockSpace, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """z = sum_i E1[i] a_i + E2[i] a_i^dag."""
    e1 = np.asarray(e1, dtype=complex).reshape(-1)
    e2 = np.asarray(e2, dtype=complex).reshape(-1)
    if e1.size != space.n_modes or e2.size != space.n_modes:
        raise ValidationError(
            f"E1/E2 must have length {space.n_modes}, got {e1.size}/{e2.size}"
        )
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(space.n_modes):
        if e1[i] != 0 or e2[i] != 0:
            a = mode_annihilator(space, i)
            out += e1[i] * a + e2[i] * a.conj().T
    return out


def build_q(space: FockSpace, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """Hermitian quadrature q = z + z^dag."""
    z = build_z(space, e1, e2)
    return z + z.conj().T


def _xi_ops(space: FockSpace):
    lowering = [mode_annihilator(space, i) for i in range(space.n_modes)]
    raising = [a.conj().T for a in lowering]
    xi = lowering + raising
    xi_dag = raising + lowering
    return xi, xi_dag


def xi_quadratic(space: FockSpace, Q: np.ndarray) -> np.ndarray:
    """Quadratic form xi^dag Q xi over the doubled operator vector."""
    Q = np.asarray(Q, dtype=complex)
    two_n = 2 * space.n_modes
    if Q.shape != (two_n, two_n):
        raise ValidationError(f"Q must be {two_n}x{two_n}, got {Q.shape}")
    xi, xi_dag = _xi_ops(space)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(two_n):
        for j in range(two_n):
            if Q[i, j] != 0:
                out += Q[i, j] * (xi_dag[i] @ xi[j])
    return out


def quadratic_hamiltonian(space: FockSpace, M: np.ndarray) -> np.ndarray:
    """(1/2) xi^dag M xi for a doubled Hermitian M."""
    M = np.asarray(M, dtype=complex)
    if np.abs(M - M.conj().T).max() > 1e-12 * max(1.0, np.abs(M).max()):
        raise ValidationError("M must be Hermitian")
    return 0.5 * xi_quadratic(space, M)


def func_of_hermitian(g, a: np.ndarray) -> np.ndarray:
    """g(A) through the eigendecomposition of a Hermitian matrix."""
    a = np.asarray(a, dtype=complex)
    w, u = np.linalg.eigh(a)
    return (u * np.asarray(g(w), dtype=complex)) @ u.conj().T


def func_of_q(space: FockSpace, g, e1: np.ndarray, e2: np.ndarray) -> np.ndarray:
    """g applied to the quadrature q = z + z^dag."""
    return func_of_hermitian(g, build_q(space, e1, e2))


def coupling_ops(space: FockSpace, N1: np.ndarray, N2: np.ndarray):
    """L_j = sum_i N1[j,i] a_i + N2[j,i] a_i^dag, one matrix per channel."""
    N1 = np.asarray(N1, dtype=complex)
    N2 = np.asarray(N2, dtype=complex)
    if N1.shape != N2.shape or N1.ndim != 2 or N1.shape[1] != space.n_modes:
        raise ValidationError(
            f"N1/N2 must both be m x {space.n_modes}, got {N1.shape}/{N2.shape}"
        )
    lowering = [mode_annihilator(space, i) for i in range(space.n_modes)]
    raising = [a.conj().T for a in lowering]
    out = []
    for j in range(N1.shape[0]):
        L = np.zeros((space.dim, space.dim), dtype=complex)
        for i in range(space.n_modes):
            L += N1[j, i] * lowering[i] + N2[j, i] * raising[i]
        out.append(L)
    return out


@dataclass(frozen=True)
class DensityOperator:
    """Validated density matrix wrapper."""

    matrix: np.ndarray

    def validate(self, tol: float = 1e-8) -> "DensityOperator":
        rho = self.matrix
        if np.abs(rho - rho.conj().T).max() > tol:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > tol:
            raise ValidationError("density matrix trace differs from one")
        if np.linalg.eigvalsh(rho).min() < -tol:
            raise ValidationError("density matrix has a negative eigenvalue")
        return self

    @staticmethod
    def vacuum(space: FockSpace) -> "DensityOperator":
        rho = np.zeros((space.dim, space.dim), dtype=complex)
        rho[0, 0] = 1.0
        return DensityOperator(rho)


def _lindblad_rhs(heff: np.ndarray, ls, rho: np.ndarray) -> np.ndarray:
    g = heff @ rho
    out = g + g.conj().T
    for L in ls:
        out += L @ rho @ L.conj().T
    return out


def lindblad_step(H: np.ndarray, Ls, rho: np.ndarray, dt: float,
                  time: float = 0.0) -> np.ndarray:
    """One fixed-step RK4 step of the master equation.

    Hermiticity is restored by symmetrization after the step; NaN or
    overflow aborts with the supplied time stamp.
    """
    heff = -1j * np.asarray(H, dtype=complex)
    for L in Ls:
        heff = heff - 0.5 * (L.conj().T @ L)
    out = _rk4_step(heff, list(Ls), np.asarray(rho, dtype=complex), dt)
    if not np.isfinite(out).all():
        raise IntegrationError(
            f"non-finite density matrix at t={time + dt:.6g}", time=time + dt
        )
    return out


def _rk4_step(heff, ls, rho, dt):
    k1 = _lindblad_rhs(heff, ls, rho)
    k2 = _lindblad_rhs(heff, ls, rho + (0.5 * dt) * k1)
    k3 = _lindblad_rhs(heff, ls, rho + (0.5 * dt) * k2)
    k4 = _lindblad_rhs(heff, ls, rho + dt * k3)
    rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (rho + rho.conj().T)


@dataclass(frozen=True)
class SimulationResult:
    """Time series of the simulated cost and integration diagnostics."""

    times: np.ndarray
    exp_w: np.ndarray
    running_avg: np.ndarray
    top_population: np.ndarray
    final_average: float
    max_trace_drift: float
    truncation_leak: bool
    probe_times: np.ndarray = field(default=None)
    probe_min_eigs: np.ndarray = field(default=None)


def cost_operator(space: FockSpace, plant: PlantModel, cost: CostSpec,
                  ordering: str = "as_written") -> np.ndarray:
    """Cost observable c_w * z z^dag + g_w(q).

    ``ordering`` selects how the written product z z* is realized:
    'as_written' multiplies in the written order (annihilator part left),
    'symmetrized' averages both orders; the two differ by the scalar
    commutator [z, z^dag].
    """
    if ordering not in ("as_written", "symmetrized"):
        raise ValidationError(f"unknown ordering {ordering!r}")
    z = build_z(space, plant.E1, plant.E2)
    zz = z @ z.conj().T
    if ordering == "symmetrized":
        zz = 0.5 * (zz + z.conj().T @ z)
    q = z + z.conj().T
    return cost.c_w * zz + func_of_hermitian(cost.g_w, q)


def simulate(space: FockSpace, plant: PlantModel,
             nonlinearity: NonlinearitySpec, cost: CostSpec,
             t_final: float, dt: float, initial="vacuum",
             ordering: str = "as_written",
             probe_interval: int = 0) -> SimulationResult:
    """Integrate the master equation and accumulate the running cost average.

    The Hamiltonian is the quadratic part plus g_f(q); the running average
    is the trapezoid rule of the instantaneous expectation.  A population
    above 1e-6 in any top Fock level raises a TruncationLeakWarning and
    sets the ``truncation_leak`` flag.
    """
    if plant.n_modes != space.n_modes:
        raise ValidationError("plant and space mode counts differ")
    if t_final <= 0 or dt <= 0:
        raise ValidationError("t_final and dt must be positive")

    M, _, _ = doubled_matrices(plant)
    H = quadratic_hamiltonian(space, M)
    q = build_q(space, plant.E1, plant.E2)
    H = H + func_of_hermitian(nonlinearity.g_f, q)
    ls = coupling_ops(space, plant.N1, plant.N2)
    w_op = cost_operator(space, plant, cost, ordering)

    if initial == "vacuum":
        rho = DensityOperator.vacuum(space).matrix.copy()
    elif isinstance(initial, DensityOperator):
        rho = initial.validate().matrix.astype(complex).copy()
    else:
        raise ValidationError("initial must be 'vacuum' or a DensityOperator")

    heff = -1j * H
    for L in ls:
        heff = heff - 0.5 * (L.conj().T @ L)

    n_steps = int(round(t_final / dt))
    top_mask = top_level_mask(space)
    w_t = w_op.T.copy()

    times = np.empty(n_steps + 1)
    exp_w = np.empty(n_steps + 1)
    running = np.empty(n_steps + 1)
    top_pop = np.empty(n_steps + 1)
    probe_ts, probe_eigs = [], []

    def measure(k, t, rho):
        times[k] = t
        exp_w[k] = np.einsum("ij,ij->", rho, w_t).real
        top_pop[k] = np.real(np.diag(rho))[top_mask].sum()

    measure(0, 0.0, rho)
    running[0] = exp_w[0]
    integral = 0.0
    max_drift = 0.0
    leak = False
    for step in range(1, n_steps + 1):
        rho = _rk4_step(heff, ls, rho, dt)
        t = step * dt
        tr = np.trace(rho).real
        if not np.isfinite(rho).all():
            raise IntegrationError(f"non-finite density matrix at t={t:.6g}",
                                   time=t)
        max_drift = max(max_drift, abs(tr - 1.0))
        measure(step, t, rho)
        integral += 0.5 * dt * (exp_w[step - 1] + exp_w[step])
        running[step] = integral / t
        if not leak and top_pop[step] > TOP_LEVEL_LEAK_THRESHOLD:
            leak = True
            warnings.warn(
                f"top Fock level population {top_pop[step]:.2e} exceeds "
                f"{TOP_LEVEL_LEAK_THRESHOLD:g} at t={t:.6g}; increase the cutoff",
                TruncationLeakWarning,
            )
        if probe_interval and step % probe_interval == 0:
            probe_ts.append(t)
            probe_eigs.append(float(np.linalg.eigvalsh(rho).min()))

    return SimulationResult(
        times=times,
        exp_w=exp_w,
        running_avg=running,
        top_population=top_pop,
        final_average=float(running[-1]),
        max_trace_drift=float(max_drift),
        truncation_leak=leak,
        probe_times=np.array(probe_ts),
        probe_min_eigs=np.array(probe_eigs),
    )


def _rel_residual(lhs: np.ndarray, rhs: np.ndarray, proj: np.ndarray) -> float:
    dl = proj @ lhs @ proj
    dr = proj @ rhs @ proj
    den = max(np.linalg.norm(dl), np.linalg.norm(dr), 1.0)
    return float(np.linalg.norm(dl - dr)) / den


def commutator_identity_report(space: FockSpace, P: np.ndarray,
                               plant: PlantModel) -> dict:
    """Relative residuals (on the interior subspace) of the four operator
    identities behind the certificate machinery.

    Keys: 'double_commutator' ([z,[z,V]] = mu), 'hamiltonian_commutator'
    ([V, H_quad] = xi'(PJM - MJP)xi), 'dissipation_identity' (the coupling
    trace identity) and 'ladder_commutator' ([xi_k, V] = (2JP xi)_k).
    Residuals are exact up to roundoff when cutoff >= interior_cutoff + 4.
    """
    P = np.asarray(P, dtype=complex)
    two_n = 2 * space.n_modes
    if P.shape != (two_n, two_n):
        raise ValidationError(f"P must be {two_n}x{two_n}, got {P.shape}")
    if plant.n_modes != space.n_modes:
        raise ValidationError("plant and space mode counts differ")

    M, N, e = doubled_matrices(plant)
    proj = interior_projector(space)
    ident = np.eye(space.dim, dtype=complex)
    xi, _ = _xi_ops(space)

    V = xi_quadratic(space, P)
    z = build_z(space, plant.E1, plant.E2)
    J = np.diag(np.concatenate([np.ones(space.n_modes),
                                -np.ones(space.n_modes)])).astype(complex)

    def comm(a, b):
        return a @ b - b @ a

    mu_val = mu_constant(P, e)
    res_mu = _rel_residual(comm(z, comm(z, V)), mu_val * ident, proj)

    h_quad = quadratic_hamiltonian(space, M)
    res_h = _rel_residual(comm(V, h_quad),
                          xi_quadratic(space, P @ J @ M - M @ J @ P), proj)

    ls = coupling_ops(space, plant.N1, plant.N2)
    lhs = np.zeros((space.dim, space.dim), dtype=complex)
    for L in ls:
        lhs += 0.5 * (L.conj().T @ comm(V, L)) + 0.5 * (comm(L.conj().T, V) @ L)
    njnj = N.conj().T @ J @ N @ J @ P + P @ J @ N.conj().T @ J @ N
    rhs = trace_term(P, N) * ident - 0.5 * xi_quadratic(space, njnj)
    res_l = _rel_residual(lhs, rhs, proj)

    jp2 = 2.0 * J @ P
    res_ladder = 0.0
    for k in range(two_n):
        lhs_k = comm(xi[k], V)
        rhs_k = np.zeros((space.dim, space.dim), dtype=complex)
        for j in range(two_n):
            if jp2[k, j] != 0:
                rhs_k += jp2[k, j] * xi[j]
        res_ladder = max(res_ladder, _rel_residual(lhs_k, rhs_k, proj))

    return {
        "double_commutator": res_mu,
        "hamiltonian_commutator": res_h,
        "dissipation_identity": res_l,
        "ladder_commutator": res_ladder,
    }

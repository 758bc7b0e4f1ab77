"""Scalar certificate formulas, fixed-tau1 certification, and the outer
tau1 search minimizing the certified bound.

Two kappa conventions are shipped.  The 'literal' branch for tau1^2 <= 1
is 1/gamma1^2 + (1/tau1^2 - 1); the 'derivation_consistent' branch scales
the second term by 1/gamma2^2, which is what combining the two sector
conditions actually produces.  The tau1^2 > 1 branch is identical in both
modes.  Default is derivation_consistent (soundness first); literal is
provided to reproduce the published example.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllInfeasible, SolverFailure, ValidationError
from .linalg import block_swap, ccr_signature, hermitian_lambda_max
from .lmi import assemble_lmi, build_conic_program, matrix_from_coords
from .model import (Certificate, KAPPA_MODES, PlantModel, SearchConfig,
                    SectorConstants, doubled_matrices)
from .solver import (STATUS_INFEASIBLE, STATUS_OPTIMAL, solve)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def kappa(tau1: float, gamma0: float, gamma1: float, gamma2: float,
          mode: str = "derivation_consistent") -> float:
    """Uncertainty gain multiplying the z z* quadratic form in the LMI."""
    if tau1 <= 0 or gamma0 <= 0 or gamma1 <= 0 or gamma2 <= 0:
        raise ValidationError("tau1 and gammas must be positive")
    if mode not in KAPPA_MODES:
        raise ValidationError(f"kappa mode must be one of {KAPPA_MODES}")
    t2 = tau1 * tau1
    if t2 <= 1.0:
        if mode == "literal":
            return 1.0 / gamma1**2 + (1.0 / t2 - 1.0)
        return 1.0 / gamma1**2 + (1.0 / t2 - 1.0) / gamma2**2
    return 1.0 / (t2 * gamma1**2) + (1.0 / gamma0**2) * (1.0 - 1.0 / t2)


def zeta(tau1: float, delta0: float, delta1: float, delta2: float) -> float:
    """Constant offset of the certified bound."""
    if tau1 <= 0:
        raise ValidationError("tau1 must be positive")
    if min(delta0, delta1, delta2) < 0:
        raise ValidationError("deltas must be non-negative")
    t2 = tau1 * tau1
    if t2 <= 1.0:
        return delta1 + (1.0 / t2 - 1.0) * delta2
    return delta1 / t2 + (1.0 - 1.0 / t2) * delta0


def mu(P: np.ndarray, e: np.ndarray) -> complex:
    """Double-commutator constant -E S J P J E^T (E^T unconjugated)."""
    P = np.asarray(P, dtype=complex)
    e = np.asarray(e, dtype=complex).reshape(-1)
    two_n = e.size
    if P.shape != (two_n, two_n):
        raise ValidationError(
            f"P must be {two_n}x{two_n} to match E, got {P.shape}"
        )
    if two_n % 2:
        raise ValidationError("E must have even length")
    n = two_n // 2
    J = ccr_signature(n)
    S = block_swap(n)
    return complex(-(e @ (S @ J @ P @ J) @ e))


def trace_term(P: np.ndarray, N: np.ndarray) -> float:
    """Real scalar tr(P J N' diag(I_m, 0) N J); rejects non-real results."""
    P = np.asarray(P, dtype=complex)
    N = np.asarray(N, dtype=complex)
    two_n = P.shape[0]
    if P.shape != (two_n, two_n) or two_n % 2:
        raise ValidationError(f"P must be square of even size, got {P.shape}")
    if N.ndim != 2 or N.shape[1] != two_n or N.shape[0] % 2:
        raise ValidationError(f"N must be 2m x {two_n}, got {N.shape}")
    n = two_n // 2
    m = N.shape[0] // 2
    J = ccr_signature(n)
    sel = np.zeros((2 * m, 2 * m), dtype=complex)
    sel[:m, :m] = np.eye(m)
    val = complex(np.trace(P @ J @ N.conj().T @ sel @ N @ J))
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValidationError(
            f"trace term has non-real residue {val.imag:.3e}"
        )
    return val.real


def bound_from(P: np.ndarray, tau1: float, plant: PlantModel,
               sector: SectorConstants) -> float:
    """Certified bound trace_term + zeta + sqrt(delta3) * |mu| at a given P."""
    _, N, e = doubled_matrices(plant)
    return (trace_term(P, N)
            + zeta(tau1, sector.delta0, sector.delta1, sector.delta2)
            + math.sqrt(sector.delta3) * abs(mu(P, e)))


@dataclass(frozen=True)
class Infeasible:
    """Marker: no certificate exists at this tau1 (the LMI test is only
    sufficient, so this never means the system is unstable)."""

    tau1: float
    detail: str = ""


def certify_fixed_tau(tau1: float, plant: PlantModel, sector: SectorConstants,
                      kappa_mode: str = "derivation_consistent",
                      eps: float = 1e-8, tol: float = 1e-9,
                      max_iter: int = 200):
    """Certificate with the bound-minimizing structured P at fixed tau1,
    or an :class:`Infeasible` marker.

    Raises :class:`SolverFailure` when the solver cannot reach a
    trustworthy answer.
    """
    problem = build_conic_program(plant, sector, tau1, kappa_mode, eps)
    result = solve(problem, tol=tol, max_iter=max_iter)
    if result.status == STATUS_INFEASIBLE:
        return Infeasible(tau1, result.detail)
    if result.status != STATUS_OPTIMAL:
        raise SolverFailure(
            f"solver failed at tau1={tau1}: {result.detail}",
            diagnostics={"tau1": tau1, "detail": result.detail},
        )
    d = problem.basis.dim
    P = matrix_from_coords(problem.basis, result.x[:d])
    kap = kappa(tau1, sector.gamma0, sector.gamma1, sector.gamma2, kappa_mode)
    zet = zeta(tau1, sector.delta0, sector.delta1, sector.delta2)
    _, N, e = doubled_matrices(plant)
    mu_val = mu(P, e)
    trace_val = trace_term(P, N)
    bound = trace_val + zet + math.sqrt(sector.delta3) * abs(mu_val)
    margin = -hermitian_lambda_max(assemble_lmi(P, tau1, kap, plant))
    return Certificate(
        P=P,
        tau1=float(tau1),
        kappa=float(kap),
        zeta=float(zet),
        mu=mu_val,
        trace_term=trace_val,
        bound=float(bound),
        feasibility_margin=float(margin),
        kappa_mode=kappa_mode,
        solver_status=result.status,
        solver_iterations=result.iterations,
        duality_gap=result.duality_gap,
    )


@dataclass(frozen=True)
class SearchOutcome:
    """Best certificate of the tau1 search plus the full evaluation trace.

    ``trace`` holds (tau1, bound) pairs in evaluation order; bound is None
    where no certificate was obtained.
    """

    certificate: Certificate
    trace: tuple


def _certify_or_none(tau1, plant, sector, kappa_mode, eps, tol, max_iter):
    try:
        out = certify_fixed_tau(tau1, plant, sector, kappa_mode, eps, tol,
                                max_iter)
    except SolverFailure:
        return None
    if isinstance(out, Infeasible):
        return None
    return out


def minimize_bound(plant: PlantModel, sector: SectorConstants,
                   search: SearchConfig | None = None,
                   kappa_mode: str = "derivation_consistent",
                   eps: float = 1e-8, tol: float = 1e-9,
                   max_iter: int = 200) -> SearchOutcome:
    """Outer derivative-free tau1 search minimizing the certified bound.

    A logarithmic grid over tau1^2 is scanned first; golden-section
    refinement then brackets the best grid point within its contiguous
    feasible run.  Infeasible evaluations score +inf.  Raises
    :class:`AllInfeasible` when no grid point certifies.
    """
    search = search or SearchConfig()
    taus = np.sqrt(np.logspace(math.log10(search.grid_min),
                               math.log10(search.grid_max),
                               search.grid_points))
    trace = []
    certs = []
    for t in taus:
        cert = _certify_or_none(float(t), plant, sector, kappa_mode, eps, tol,
                                max_iter)
        certs.append(cert)
        trace.append((float(t), None if cert is None else cert.bound))

    feasible = [i for i, c in enumerate(certs) if c is not None]
    if not feasible:
        raise AllInfeasible("no feasible tau1 on the search grid")
    best_idx = min(feasible, key=lambda i: (certs[i].bound, taus[i]))
    best = certs[best_idx]

    # contiguous feasible run around the best grid point
    lo_idx = best_idx
    while lo_idx - 1 in feasible:
        lo_idx -= 1
    hi_idx = best_idx
    while hi_idx + 1 in feasible:
        hi_idx += 1
    lo = math.log(taus[max(lo_idx, best_idx - 1)])
    hi = math.log(taus[min(hi_idx, best_idx + 1)])

    if search.refine_iters > 0 and hi > lo:
        cache = {}

        def eval_log(u):
            if u not in cache:
                cert = _certify_or_none(math.exp(u), plant, sector,
                                        kappa_mode, eps, tol, max_iter)
                cache[u] = cert
                trace.append((math.exp(u),
                              None if cert is None else cert.bound))
            c = cache[u]
            return math.inf if c is None else c.bound

        a, b = lo, hi
        u1 = b - _GOLDEN * (b - a)
        u2 = a + _GOLDEN * (b - a)
        f1, f2 = eval_log(u1), eval_log(u2)
        for _ in range(search.refine_iters):
            if f1 <= f2:
                b, u2, f2 = u2, u1, f1
                u1 = b - _GOLDEN * (b - a)
                f1 = eval_log(u1)
            else:
                a, u1, f1 = u1, u2, f2
                u2 = a + _GOLDEN * (b - a)
                f2 = eval_log(u2)
        for cert in cache.values():
            if cert is not None and (cert.bound, cert.tau1) < (best.bound,
                                                               best.tau1):
                best = cert

    return SearchOutcome(certificate=best, trace=tuple(trace))

"""Deterministic solver for the standard-form conic programs built by
:mod:`sectorbound.lmi`.

The heavy lifting is delegated to cvxopt's primal-dual cone LP (its SDP
interface), which is deterministic for fixed input.  A small presolve
eliminates variables with zero objective coefficient whose coefficient
matrices are all PSD: such variables can grow without harming feasibility,
would otherwise push the central path to infinity, and are post-set to
their minimal feasible value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import cvxopt
import cvxopt.solvers

from .lmi import ConicProblem

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SolveResult:
    status: str
    x: np.ndarray | None
    objective_value: float
    duality_gap: float
    iterations: int
    detail: str = ""


def _monotone_free_vars(problem: ConicProblem):
    """Indices with zero cost whose block coefficients are all PSD diagonal."""
    out = []
    for i in range(problem.num_vars):
        if problem.c[i] != 0.0:
            continue
        nonzero = False
        ok = True
        for block in problem.blocks:
            coeff = block.coeffs[i]
            if np.abs(coeff).max() == 0.0:
                continue
            nonzero = True
            diag = np.diag(coeff)
            if np.abs(coeff - np.diag(diag)).max() > 0.0 or diag.min() <= 0.0:
                ok = False
                break
        if ok and nonzero:
            out.append(i)
    return out


def _post_set_minimal(problem: ConicProblem, x: np.ndarray, idx: int) -> float:
    """Minimal value of variable idx keeping all its blocks PSD."""
    lo = 0.0
    for block in problem.blocks:
        coeff = block.coeffs[idx]
        if np.abs(coeff).max() == 0.0:
            continue
        rest = block.constant.copy()
        for j, cj in enumerate(block.coeffs):
            if j != idx and x[j] != 0.0:
                rest = rest + x[j] * cj
        scale = float(np.diag(coeff).min())
        need = -float(np.linalg.eigvalsh(rest).min()) / scale
        lo = max(lo, need)
    return lo


def solve(problem: ConicProblem, tol: float = 1e-9,
          max_iter: int = 200) -> SolveResult:
    """Solve the conic problem; deterministic for fixed inputs.

    Returns status 'optimal' with primal feasibility residual and duality
    gap at most ``tol``, 'infeasible' when the solver certifies primal
    infeasibility, and 'numerical_failure' otherwise (diagnostics in
    ``detail``).
    """
    free = _monotone_free_vars(problem)
    active = [i for i in range(problem.num_vars) if i not in free]

    gs, hs = [], []
    for block in problem.blocks:
        k = block.size
        g = np.zeros((k * k, len(active)))
        for col, i in enumerate(active):
            g[:, col] = -block.coeffs[i].reshape(k * k, order="F")
        gs.append(cvxopt.matrix(g))
        hs.append(cvxopt.matrix(block.constant))
    c = cvxopt.matrix(problem.c[active])

    options = {
        "show_progress": False,
        "abstol": tol,
        "reltol": 1e-13,
        "feastol": max(tol, 1e-9),
        "maxiters": max_iter,
    }
    try:
        sol = cvxopt.solvers.sdp(c, Gs=gs, hs=hs, options=options)
    except Exception as exc:  # cvxopt can raise on hard instances
        return SolveResult(
            status=STATUS_NUMERICAL_FAILURE,
            x=None,
            objective_value=float("nan"),
            duality_gap=float("nan"),
            iterations=0,
            detail=f"solver exception: {exc!r}",
        )

    status = sol["status"]
    iterations = int(sol.get("iterations") or 0)
    gap = sol.get("gap")
    gap = float(gap) if gap is not None else float("nan")

    if status == "primal infeasible":
        return SolveResult(STATUS_INFEASIBLE, None, float("inf"), gap,
                           iterations, "primal infeasibility certificate")
    if status != "optimal" or sol["x"] is None:
        detail = (
            f"status={status} gap={gap!r} "
            f"pres={sol.get('primal infeasibility')!r} "
            f"dres={sol.get('dual infeasibility')!r}"
        )
        return SolveResult(STATUS_NUMERICAL_FAILURE, None, float("nan"), gap,
                           iterations, detail)

    x = np.zeros(problem.num_vars)
    xa = np.asarray(sol["x"]).reshape(-1)
    for col, i in enumerate(active):
        x[i] = xa[col]
    for i in free:
        x[i] = _post_set_minimal(problem, x, i)
    return SolveResult(
        status=STATUS_OPTIMAL,
        x=x,
        objective_value=problem.objective(x),
        duality_gap=gap,
        iterations=iterations,
        detail="",
    )


def constraint_min_eigs(problem: ConicProblem, x: np.ndarray):
    """Smallest eigenvalue of each constraint block at x (for audits)."""
    return [float(np.linalg.eigvalsh(b.evaluate(x)).min())
            for b in problem.blocks]

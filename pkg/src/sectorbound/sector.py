"""Numerical verification of the sector, Lipschitz and cost-bound
conditions on a sampling disc, plus calibration of minimal delta constants.

These are scalar-shadow checks: the underlying conditions are operator
inequalities, and here z ranges over complex numbers with z z* read as
|z|^2.  A clean pass is therefore a necessary-condition check, not a
proof; a violation is a hard disproof of the supplied constants.  The
operator reading of z z* differs from the scalar one by a commutator
constant, which this module deliberately ignores.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SectorBoundError, ValidationError
from .model import SectorConstants

CONDITION_NAMES = ("cost_bound", "sector_a", "sector_c", "lipschitz")


class SectorEvaluationError(SectorBoundError):
    """A user callable failed at a sample point."""

    def __init__(self, message, point):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class PolarGrid:
    """Polar mesh of the disc |z| <= radius, plus the origin.

    Points are ordered by (radius, angle) ascending with the origin first,
    so worst-violation witnesses tie-break deterministically and doubling
    either resolution only adds points.
    """

    radius: float = 3.0
    n_radial: int = 60
    n_angular: int = 60

    def __post_init__(self):
        if self.radius <= 0 or self.n_radial < 1 or self.n_angular < 1:
            raise ValidationError("grid parameters must be positive")

    def points(self) -> np.ndarray:
        rs = self.radius * np.arange(1, self.n_radial + 1) / self.n_radial
        thetas = 2.0 * math.pi * np.arange(self.n_angular) / self.n_angular
        pts = [0.0 + 0.0j]
        for r in rs:
            for th in thetas:
                pts.append(r * complex(math.cos(th), math.sin(th)))
        return np.array(pts, dtype=complex)


@dataclass(frozen=True)
class ConditionReport:
    max_violation: float
    witness_z: complex
    samples: int

    def passes(self, tolerance: float) -> bool:
        return self.max_violation <= tolerance


@dataclass(frozen=True)
class SectorReport:
    conditions: dict
    tolerance: float
    note: str = ("scalar-shadow necessary-condition check; z z* is read as "
                 "|z|^2, ignoring the operator-ordering commutator constant")

    def all_pass(self) -> bool:
        return all(c.passes(self.tolerance) for c in self.conditions.values())

    def worst(self):
        name = max(self.conditions,
                   key=lambda k: self.conditions[k].max_violation)
        return name, self.conditions[name]


def _eval(fn, z, what):
    try:
        val = fn(z)
    except Exception as exc:
        raise SectorEvaluationError(
            f"{what} failed at z={z!r}: {exc}", point=z
        ) from exc
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise SectorEvaluationError(
            f"{what} returned non-finite value at z={z!r}", point=z
        )
    return val


def verify_sector(w, f_z, f_zz, sector: SectorConstants,
                  grid: PolarGrid | None = None,
                  tolerance: float = 1e-9) -> SectorReport:
    """Worst violations of the four conditions over the sampling grid.

    ``w`` maps a complex sample to the real cost shadow; ``f_z`` and
    ``f_zz`` sample the derivative shadows.  Per condition the report
    stores max(left - right) and the first sample attaining it.
    """
    grid = grid or PolarGrid()
    pts = grid.points()
    worst = {name: (-math.inf, 0j) for name in CONDITION_NAMES}
    for z in pts:
        zz = abs(z) ** 2
        w_val = _eval(w, z, "cost callable").real
        fz2 = abs(_eval(f_z, z, "f_z callable")) ** 2
        fzz2 = abs(_eval(f_zz, z, "f_zz callable")) ** 2
        viol = {
            "cost_bound": w_val - (zz / sector.gamma0**2 + sector.delta0),
            "sector_a": w_val + fz2 - (zz / sector.gamma1**2 + sector.delta1),
            "sector_c": fz2 - (zz / sector.gamma2**2 + sector.delta2),
            "lipschitz": fzz2 - sector.delta3,
        }
        for name, v in viol.items():
            if v > worst[name][0]:
                worst[name] = (float(v), complex(z))
    conditions = {
        name: ConditionReport(max_violation=worst[name][0],
                              witness_z=worst[name][1],
                              samples=len(pts))
        for name in CONDITION_NAMES
    }
    return SectorReport(conditions=conditions, tolerance=tolerance)


def calibrate_deltas(w, f_z, f_zz, gamma0: float, gamma1: float,
                     gamma2: float, grid: PolarGrid | None = None):
    """Minimal (delta0..delta3) making all four conditions hold on the grid.

    Each delta is the grid maximum of (left side minus quadratic part),
    clamped at zero; verify_sector passes with these constants on the same
    grid by construction.
    """
    if min(gamma0, gamma1, gamma2) <= 0:
        raise ValidationError("gammas must be positive")
    grid = grid or PolarGrid()
    d0 = d1 = d2 = d3 = 0.0
    for z in grid.points():
        zz = abs(z) ** 2
        w_val = _eval(w, z, "cost callable").real
        fz2 = abs(_eval(f_z, z, "f_z callable")) ** 2
        fzz2 = abs(_eval(f_zz, z, "f_zz callable")) ** 2
        d0 = max(d0, w_val - zz / gamma0**2)
        d1 = max(d1, w_val + fz2 - zz / gamma1**2)
        d2 = max(d2, fz2 - zz / gamma2**2)
        d3 = max(d3, fzz2)
    return float(d0), float(d1), float(d2), float(d3)


def crosscheck_fz(g_f, f_z, grid: PolarGrid | None = None, h: float = 1e-5,
                  tolerance: float = 1e-6) -> float:
    """Max deviation between f_z samples and central differences of g_f.

    Optional consistency check for quadrature nonlinearities f = g_f(z+z*);
    the module never otherwise differentiates numerically.
    """
    grid = grid or PolarGrid()
    worst = 0.0
    for z in grid.points():
        q = (z + np.conj(z)).real
        fd = (float(g_f(q + h)) - float(g_f(q - h))) / (2.0 * h)
        worst = max(worst, abs(complex(f_z(z)) - fd))
    if worst > tolerance:
        raise ValidationError(
            f"f_z disagrees with finite differences of g_f by {worst:.3e}"
        )
    return worst

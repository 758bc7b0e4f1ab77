"""Domain types: plant data, sector constants, cost and nonlinearity specs,
certificates, and configuration ingestion.

All types are immutable after construction and safe to share across threads.
Configuration documents are JSON; complex scalars are encoded as
``{"re": x, "im": y}`` records and matrices as row-major nested arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, ValidationError
from .linalg import hermiticity_defect, is_hermitian

_STRUCTURE_RTOL = 1e-12


def _as_complex_matrix(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be a matrix, got ndim={arr.ndim}")
    return arr


def _as_complex_row(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    arr = arr.reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{name} must be a nonempty row vector")
    return arr


@dataclass(frozen=True, eq=False)
class PlantModel:
    """Nominal (S, L, H) data in doubled-up block form.

    ``M1``/``M2`` are the n x n Hamiltonian blocks (M1 Hermitian, M2
    symmetric), ``N1``/``N2`` the m x n coupling blocks, and ``E1``/``E2``
    the row coefficients of the scalar operator the nonlinearity acts
    through.  The scattering matrix is fixed to the identity and not
    represented.
    """

    n_modes: int
    m_channels: int
    M1: np.ndarray
    M2: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    E1: np.ndarray
    E2: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, PlantModel):
            return NotImplemented
        return (
            self.n_modes == other.n_modes
            and self.m_channels == other.m_channels
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("M1", "M2", "N1", "N2", "E1", "E2")
            )
        )

    __hash__ = None


def validate_plant(M1, M2, N1, N2, E1, E2, symmetrize: bool = False) -> PlantModel:
    """Validate raw matrices and build a :class:`PlantModel`.

    Structural defects are rejected, never silently repaired; pass
    ``symmetrize=True`` to average each block with its required-symmetry
    image before validation.
    """
    M1 = _as_complex_matrix(M1, "M1")
    M2 = _as_complex_matrix(M2, "M2")
    N1 = _as_complex_matrix(N1, "N1")
    N2 = _as_complex_matrix(N2, "N2")
    E1 = _as_complex_row(E1, "E1")
    E2 = _as_complex_row(E2, "E2")

    if symmetrize:
        M1 = 0.5 * (M1 + M1.conj().T)
        M2 = 0.5 * (M2 + M2.T)

    n = M1.shape[0]
    if M1.shape != (n, n):
        raise ValidationError(f"M1 must be square, got {M1.shape}")
    if M2.shape != (n, n):
        raise ValidationError(f"M2 must be {n}x{n}, got {M2.shape}")
    m = N1.shape[0]
    if N1.shape != (m, n):
        raise ValidationError(f"N1 must be m x {n}, got {N1.shape}")
    if N2.shape != (m, n):
        raise ValidationError(f"N2 must be {m}x{n}, got {N2.shape}")
    if E1.size != n or E2.size != n:
        raise ValidationError(
            f"E1/E2 must have length {n}, got {E1.size}/{E2.size}"
        )
    if not is_hermitian(M1, _STRUCTURE_RTOL):
        raise ValidationError("M1 not Hermitian")
    scale = max(1.0, float(np.abs(M2).max()))
    if float(np.abs(M2 - M2.T).max()) / scale > _STRUCTURE_RTOL:
        raise ValidationError("M2 not symmetric")
    if np.abs(E1).max() == 0.0 and np.abs(E2).max() == 0.0:
        raise ValidationError("E1 and E2 are both zero; z must be nontrivial")

    plant = PlantModel(n, m, M1, M2, N1, N2, E1, E2)
    m_doubled, _, _ = doubled_matrices(plant)
    if hermiticity_defect(m_doubled) > _STRUCTURE_RTOL:
        raise ValidationError("doubled M is not Hermitian")
    return plant


def doubled_matrices(plant: PlantModel):
    """Doubled-up matrices (M, N, E) of a plant.

    M = [[M1, M2], [M2#, M1#]] (2n x 2n), N = [[N1, N2], [N2#, N1#]]
    (2m x 2n), and E = [E1, E2] as a flat length-2n vector.
    """
    m = np.block(
        [[plant.M1, plant.M2], [plant.M2.conj(), plant.M1.conj()]]
    )
    n = np.block(
        [[plant.N1, plant.N2], [plant.N2.conj(), plant.N1.conj()]]
    )
    e = np.concatenate([plant.E1, plant.E2])
    return m, n, e


@dataclass(frozen=True)
class SectorConstants:
    """Constants of the sector, Lipschitz and cost-bound conditions."""

    gamma0: float
    gamma1: float
    gamma2: float
    delta0: float
    delta1: float
    delta2: float
    delta3: float

    def __post_init__(self):
        for name in ("gamma0", "gamma1", "gamma2"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("delta0", "delta1", "delta2", "delta3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")


def _neg_cos(q):
    return -np.cos(q)


def _sin_sum(z):
    return np.sin(z + np.conj(z))


def _cos_sum(z):
    return np.cos(z + np.conj(z))


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """Perturbation Hamiltonian f = g_f(z + z*) plus its derivative shadows.

    ``f_z`` and ``f_zz`` sample the formal first and second z-derivatives on
    the complex plane; they back the scalar sector checks, while ``g_f``
    backs the operator construction in simulation.
    """

    kind: str
    g_f: Callable[[float], float]
    f_z: Callable[[complex], complex]
    f_zz: Callable[[complex], complex]
    source: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, NonlinearitySpec):
            return NotImplemented
        return self.kind == other.kind and self.source == other.source

    __hash__ = None

    @staticmethod
    def from_kind(kind: str) -> "NonlinearitySpec":
        if kind == "neg_cos_q":
            return NonlinearitySpec(kind, _neg_cos, _sin_sum, _cos_sum,
                                    {"kind": kind})
        if kind == "zero":
            return NonlinearitySpec(
                kind,
                lambda q: np.zeros_like(np.asarray(q, dtype=float)) + 0.0,
                lambda z: 0.0,
                lambda z: 0.0,
                {"kind": kind},
            )
        raise ConfigError(f"unknown nonlinearity kind {kind!r}")

    @staticmethod
    def from_samples(q_grid, values) -> "NonlinearitySpec":
        """Cubic-spline nonlinearity from tabulated g_f samples.

        The derivative shadows are the spline's analytic first and second
        derivatives evaluated at q = z + conj(z).
        """
        q = np.asarray(q_grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if q.ndim != 1 or q.size < 4 or q.shape != v.shape:
            raise ConfigError("custom nonlinearity needs matching 1-d grids "
                              "with at least 4 samples")
        spline = CubicSpline(q, v)
        d1 = spline.derivative(1)
        d2 = spline.derivative(2)
        return NonlinearitySpec(
            "custom",
            spline,
            lambda z: complex(d1((z + np.conj(z)).real)),
            lambda z: complex(d2((z + np.conj(z)).real)),
            {"custom": {"q_grid": q.tolist(), "values": v.tolist()}},
        )


def _neg_sin_sq(q):
    return -np.sin(q) ** 2


_G_W_REGISTRY = {
    "neg_sin_sq": _neg_sin_sq,
    "zero": lambda q: np.zeros_like(np.asarray(q, dtype=float)) + 0.0,
}


@dataclass(frozen=True, eq=False)
class CostSpec:
    """Cost density W(z, z*) = c_w * z z* + g_w(z + z*)."""

    kind: str
    c_w: float
    g_w: Callable[[float], float]
    source: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, CostSpec):
            return NotImplemented
        return (self.kind == other.kind and self.c_w == other.c_w
                and self.source == other.source)

    __hash__ = None

    def scalar_shadow(self, z: complex) -> float:
        """W evaluated with z a complex number and z z* read as |z|^2."""
        return self.c_w * abs(z) ** 2 + float(self.g_w((z + np.conj(z)).real))

    @staticmethod
    def from_kind(kind: str) -> "CostSpec":
        if kind == "josephson_cost":
            return CostSpec(kind, 4.0, _neg_sin_sq, {"kind": kind})
        raise ConfigError(f"unknown cost kind {kind!r}")

    @staticmethod
    def from_parts(c_w: float, g_w_tag: str) -> "CostSpec":
        if c_w < 0:
            raise ConfigError("c_w must be non-negative")
        if g_w_tag not in _G_W_REGISTRY:
            raise ConfigError(f"unknown g_w tag {g_w_tag!r}")
        return CostSpec("custom", float(c_w), _G_W_REGISTRY[g_w_tag],
                        {"c_w": float(c_w), "g_w": g_w_tag})


@dataclass(frozen=True)
class SearchConfig:
    """Outer tau1 search: log grid over tau1^2 plus golden-section refine."""

    grid_min: float = 1e-3
    grid_max: float = 1e3
    grid_points: int = 31
    refine_iters: int = 24

    def __post_init__(self):
        if not (0 < self.grid_min < self.grid_max):
            raise ValidationError("need 0 < grid_min < grid_max")
        if self.grid_points < 1:
            raise ValidationError("grid_points must be >= 1")
        if self.refine_iters < 0:
            raise ValidationError("refine_iters must be >= 0")


@dataclass(frozen=True)
class SolverConfig:
    eps_margin: float = 1e-8
    tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        if self.eps_margin <= 0 or self.tol <= 0 or self.max_iter < 1:
            raise ValidationError("solver parameters must be positive")


@dataclass(frozen=True)
class SimulateConfig:
    cutoff: int = 8
    t_final: float = 10.0
    dt: float = 1e-3
    initial_state: str = "vacuum"

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValidationError("cutoff must be >= 2")
        if self.t_final <= 0 or self.dt <= 0:
            raise ValidationError("t_final and dt must be positive")
        if self.initial_state != "vacuum":
            raise ValidationError(
                f"unsupported initial_state {self.initial_state!r}"
            )


KAPPA_MODES = ("literal", "derivation_consistent")


@dataclass(frozen=True, eq=False)
class Certificate:
    """A solved performance certificate.

    ``bound`` always equals ``trace_term + zeta + sqrt(delta3) * |mu|``
    evaluated in exactly that expression; ``feasibility_margin`` is the
    negated largest eigenvalue of the assembled LMI at ``P``.
    """

    P: np.ndarray
    tau1: float
    kappa: float
    zeta: float
    mu: complex
    trace_term: float
    bound: float
    feasibility_margin: float
    kappa_mode: str
    solver_status: str
    solver_iterations: int
    duality_gap: float

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return np.array_equal(self.P, other.P) and all(
            getattr(self, f) == getattr(other, f)
            for f in ("tau1", "kappa", "zeta", "mu", "trace_term", "bound",
                      "feasibility_margin", "kappa_mode")
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class AnalysisConfig:
    plant: PlantModel
    sector: SectorConstants
    cost: CostSpec | None
    nonlinearity: NonlinearitySpec | None
    tau1_fixed: float | None
    tau1_search: SearchConfig
    solver: SolverConfig
    kappa_mode: str
    simulate: SimulateConfig

    def __eq__(self, other):
        if not isinstance(other, AnalysisConfig):
            return NotImplemented
        return all(
            getattr(self, f) == getattr(other, f)
            for f in ("plant", "sector", "cost", "nonlinearity", "tau1_fixed",
                      "tau1_search", "solver", "kappa_mode", "simulate")
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# Config document parsing


def _reject_unknown(d: dict, allowed, where: str):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _scalar(v, where: str) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, dict):
        _reject_unknown(v, ("re", "im"), where)
        if "re" not in v or "im" not in v:
            raise ConfigError(f"{where}: complex record needs 're' and 'im'")
        return complex(v["re"], v["im"])
    raise ConfigError(f"{where}: expected number or {{re, im}} record")


def _matrix(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ConfigError(f"{where}: expected a nested array (matrix)")
    width = len(v[0])
    if width == 0 or any(len(r) != width for r in v):
        raise ConfigError(f"{where}: ragged or empty matrix")
    return np.array(
        [[_scalar(x, where) for x in row] for row in v], dtype=complex
    )


def _vector(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where}: expected a nonempty array (vector)")
    return np.array([_scalar(x, where) for x in v], dtype=complex)


def _positive_number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if not v > 0:
        raise ConfigError(f"{where} must be positive")
    return float(v)


def _nonneg_number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if v < 0:
        raise ConfigError(f"{where} must be non-negative")
    return float(v)


def _parse_plant(d, symmetrize: bool) -> PlantModel:
    if not isinstance(d, dict):
        raise ConfigError("'plant' must be an object")
    keys = ("n_modes", "m_channels", "M1", "M2", "N1", "N2", "E1", "E2")
    _reject_unknown(d, keys, "plant")
    missing = [k for k in keys if k not in d]
    if missing:
        raise ConfigError(f"plant is missing key {missing[0]!r}")
    n = d["n_modes"]
    m = d["m_channels"]
    if not isinstance(n, int) or n < 1 or isinstance(n, bool):
        raise ConfigError("plant.n_modes must be a positive integer")
    if not isinstance(m, int) or m < 1 or isinstance(m, bool):
        raise ConfigError("plant.m_channels must be a positive integer")
    try:
        plant = validate_plant(
            _matrix(d["M1"], "plant.M1"),
            _matrix(d["M2"], "plant.M2"),
            _matrix(d["N1"], "plant.N1"),
            _matrix(d["N2"], "plant.N2"),
            _vector(d["E1"], "plant.E1"),
            _vector(d["E2"], "plant.E2"),
            symmetrize=symmetrize,
        )
    except ValidationError as exc:
        raise ConfigError(f"plant: {exc}") from exc
    if plant.n_modes != n:
        raise ConfigError(
            f"plant.n_modes={n} inconsistent with M1 of size {plant.n_modes}"
        )
    if plant.m_channels != m:
        raise ConfigError(
            f"plant.m_channels={m} inconsistent with N1 of {plant.m_channels} rows"
        )
    return plant


def _parse_sector(d) -> SectorConstants:
    if not isinstance(d, dict):
        raise ConfigError("'sector' must be an object")
    keys = ("gamma0", "gamma1", "gamma2", "delta0", "delta1", "delta2", "delta3")
    _reject_unknown(d, keys, "sector")
    missing = [k for k in keys if k not in d]
    if missing:
        raise ConfigError(f"sector is missing key {missing[0]!r}")
    vals = {}
    for k in keys[:3]:
        vals[k] = _positive_number(d[k], f"sector.{k}")
    for k in keys[3:]:
        vals[k] = _nonneg_number(d[k], f"sector.{k}")
    return SectorConstants(**vals)


def _parse_cost(d) -> CostSpec:
    if not isinstance(d, dict):
        raise ConfigError("'cost' must be an object")
    if "kind" in d:
        _reject_unknown(d, ("kind",), "cost")
        return CostSpec.from_kind(d["kind"])
    _reject_unknown(d, ("c_w", "g_w"), "cost")
    if "c_w" not in d or "g_w" not in d:
        raise ConfigError("cost needs either 'kind' or both 'c_w' and 'g_w'")
    return CostSpec.from_parts(_nonneg_number(d["c_w"], "cost.c_w"), d["g_w"])


def _parse_nonlinearity(d) -> NonlinearitySpec:
    if not isinstance(d, dict):
        raise ConfigError("'nonlinearity' must be an object")
    if "kind" in d:
        _reject_unknown(d, ("kind",), "nonlinearity")
        return NonlinearitySpec.from_kind(d["kind"])
    _reject_unknown(d, ("custom",), "nonlinearity")
    if "custom" not in d:
        raise ConfigError("nonlinearity needs either 'kind' or 'custom'")
    custom = d["custom"]
    if not isinstance(custom, dict):
        raise ConfigError("nonlinearity.custom must be an object")
    _reject_unknown(custom, ("q_grid", "values"), "nonlinearity.custom")
    if "q_grid" not in custom or "values" not in custom:
        raise ConfigError("nonlinearity.custom needs 'q_grid' and 'values'")
    return NonlinearitySpec.from_samples(custom["q_grid"], custom["values"])


def _parse_tau1(d):
    if not isinstance(d, dict):
        raise ConfigError("'tau1' must be an object")
    if "fixed" in d:
        _reject_unknown(d, ("fixed",), "tau1")
        return _positive_number(d["fixed"], "tau1.fixed"), SearchConfig()
    _reject_unknown(d, ("search",), "tau1")
    if "search" not in d:
        raise ConfigError("tau1 needs either 'fixed' or 'search'")
    s = d["search"]
    if not isinstance(s, dict):
        raise ConfigError("tau1.search must be an object")
    keys = ("grid_min", "grid_max", "grid_points", "refine_iters")
    _reject_unknown(s, keys, "tau1.search")
    kwargs = {}
    if "grid_min" in s:
        kwargs["grid_min"] = _positive_number(s["grid_min"], "tau1.search.grid_min")
    if "grid_max" in s:
        kwargs["grid_max"] = _positive_number(s["grid_max"], "tau1.search.grid_max")
    if "grid_points" in s:
        gp = s["grid_points"]
        if not isinstance(gp, int) or isinstance(gp, bool) or gp < 1:
            raise ConfigError("tau1.search.grid_points must be a positive integer")
        kwargs["grid_points"] = gp
    if "refine_iters" in s:
        ri = s["refine_iters"]
        if not isinstance(ri, int) or isinstance(ri, bool) or ri < 0:
            raise ConfigError("tau1.search.refine_iters must be a non-negative integer")
        kwargs["refine_iters"] = ri
    try:
        return None, SearchConfig(**kwargs)
    except ValidationError as exc:
        raise ConfigError(f"tau1.search: {exc}") from exc


def _parse_solver(d) -> SolverConfig:
    if not isinstance(d, dict):
        raise ConfigError("'solver' must be an object")
    keys = ("eps_margin", "tol", "max_iter")
    _reject_unknown(d, keys, "solver")
    kwargs = {}
    if "eps_margin" in d:
        kwargs["eps_margin"] = _positive_number(d["eps_margin"], "solver.eps_margin")
    if "tol" in d:
        kwargs["tol"] = _positive_number(d["tol"], "solver.tol")
    if "max_iter" in d:
        mi = d["max_iter"]
        if not isinstance(mi, int) or isinstance(mi, bool) or mi < 1:
            raise ConfigError("solver.max_iter must be a positive integer")
        kwargs["max_iter"] = mi
    return SolverConfig(**kwargs)


def _parse_simulate(d) -> SimulateConfig:
    if not isinstance(d, dict):
        raise ConfigError("'simulate' must be an object")
    keys = ("cutoff", "t_final", "dt", "initial_state")
    _reject_unknown(d, keys, "simulate")
    kwargs = {}
    if "cutoff" in d:
        c = d["cutoff"]
        if not isinstance(c, int) or isinstance(c, bool) or c < 2:
            raise ConfigError("simulate.cutoff must be an integer >= 2")
        kwargs["cutoff"] = c
    if "t_final" in d:
        kwargs["t_final"] = _positive_number(d["t_final"], "simulate.t_final")
    if "dt" in d:
        kwargs["dt"] = _positive_number(d["dt"], "simulate.dt")
    if "initial_state" in d:
        s = d["initial_state"]
        if s != "vacuum":
            raise ConfigError(f"simulate.initial_state {s!r} unsupported "
                              "(only 'vacuum')")
        kwargs["initial_state"] = s
    return SimulateConfig(**kwargs)


def load_config(text: str, symmetrize: bool = False) -> AnalysisConfig:
    """Parse a JSON configuration document into an :class:`AnalysisConfig`.

    Unknown keys are rejected at every level; omitted optional blocks get
    documented defaults.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be an object")
    top = ("plant", "sector", "cost", "nonlinearity", "tau1", "solver",
           "kappa_mode", "simulate")
    _reject_unknown(doc, top, "top level")
    for required in ("plant", "sector"):
        if required not in doc:
            raise ConfigError(f"missing required top-level key {required!r}")

    plant = _parse_plant(doc["plant"], symmetrize)
    sector = _parse_sector(doc["sector"])
    cost = _parse_cost(doc["cost"]) if "cost" in doc else None
    nonlinearity = (
        _parse_nonlinearity(doc["nonlinearity"]) if "nonlinearity" in doc else None
    )
    tau1_fixed, tau1_search = (
        _parse_tau1(doc["tau1"]) if "tau1" in doc else (None, SearchConfig())
    )
    solver = _parse_solver(doc["solver"]) if "solver" in doc else SolverConfig()
    kappa_mode = doc.get("kappa_mode", "derivation_consistent")
    if kappa_mode not in KAPPA_MODES:
        raise ConfigError(f"kappa_mode must be one of {KAPPA_MODES}")
    simulate = (
        _parse_simulate(doc["simulate"]) if "simulate" in doc else SimulateConfig()
    )
    return AnalysisConfig(
        plant=plant,
        sector=sector,
        cost=cost,
        nonlinearity=nonlinearity,
        tau1_fixed=tau1_fixed,
        tau1_search=tau1_search,
        solver=solver,
        kappa_mode=kappa_mode,
        simulate=simulate,
    )


def _encode_scalar(x: complex):
    x = complex(x)
    if x.imag == 0.0:
        return x.real
    return {"re": x.real, "im": x.imag}


def _encode_matrix(a: np.ndarray):
    return [[_encode_scalar(x) for x in row] for row in np.asarray(a)]


def _encode_vector(a: np.ndarray):
    return [_encode_scalar(x) for x in np.asarray(a).reshape(-1)]


def config_to_dict(config: AnalysisConfig) -> dict:
    doc = {
        "plant": {
            "n_modes": config.plant.n_modes,
            "m_channels": config.plant.m_channels,
            "M1": _encode_matrix(config.plant.M1),
            "M2": _encode_matrix(config.plant.M2),
            "N1": _encode_matrix(config.plant.N1),
            "N2": _encode_matrix(config.plant.N2),
            "E1": _encode_vector(config.plant.E1),
            "E2": _encode_vector(config.plant.E2),
        },
        "sector": {
            k: getattr(config.sector, k)
            for k in ("gamma0", "gamma1", "gamma2",
                      "delta0", "delta1", "delta2", "delta3")
        },
        "solver": {
            "eps_margin": config.solver.eps_margin,
            "tol": config.solver.tol,
            "max_iter": config.solver.max_iter,
        },
        "kappa_mode": config.kappa_mode,
        "simulate": {
            "cutoff": config.simulate.cutoff,
            "t_final": config.simulate.t_final,
            "dt": config.simulate.dt,
            "initial_state": config.simulate.initial_state,
        },
    }
    if config.cost is not None:
        doc["cost"] = dict(config.cost.source)
    if config.nonlinearity is not None:
        doc["nonlinearity"] = dict(config.nonlinearity.source)
    if config.tau1_fixed is not None:
        doc["tau1"] = {"fixed": config.tau1_fixed}
    else:
        s = config.tau1_search
        doc["tau1"] = {"search": {
            "grid_min": s.grid_min, "grid_max": s.grid_max,
            "grid_points": s.grid_points, "refine_iters": s.refine_iters,
        }}
    return doc


def serialize_config(config: AnalysisConfig) -> str:
    """Canonical JSON form; load_config(serialize_config(c)) == c."""
    return json.dumps(config_to_dict(config), indent=2, sort_keys=True)

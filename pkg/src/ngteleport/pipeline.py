"""Parameter-space evaluation: single points, (r, T) sweeps, CSV/JSON output.

The grid evaluator computes the three sweep quantities (teleportation
fidelity, minimum covariance eigenvalue, heralding probability) without
materialising the full conditioned characteristic function per point: the
covariance needs only the integral's degree-2 Taylor data, and the fidelity
overlap composes the detection and teleportation integrals into one
six-variable Gaussian reduction with scalar moments. Both shortcuts reuse the
exact charfn operations and are pinned against the reference path
(build_ng_state + covariance_of + fidelity) in the test suite.

Output contract: CSV columns r,T,F,lambda_min,p_ng,success,unsqueezed,region,
flags,error in that order, '#'-prefixed metadata preamble, 12-significant-digit
floats, lowercase booleans; identical configuration produces a byte-identical
file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import __version__
from .analysis import moments_from_taylor
from .charfn import PolyGaussian
from .errors import EngineError, MeasureZeroOutcomeError, NonPositiveKernelError
from .gaussian import GaussianState, make_tmst, make_tmsv, symplectic_form
from .nongauss import P_SUCCESS_FLOOR, OperationSpec, _ancilla_block, _mix_matrix

BOUNDARY_TOL = 1e-9

CSV_COLUMNS = ("r", "T", "F", "lambda_min", "p_ng", "success", "unsqueezed", "region", "flags", "error")

# eight-variable slots (A1, F1, A2, F2) composed with the teleportation slice:
# resource variables evaluated at (-tau, sig) / (-tau, -sig), ancilla variables kept
_COMPOSE = np.zeros((8, 6))
_COMPOSE[0, 0] = -1.0
_COMPOSE[1, 1] = 1.0
_COMPOSE[4, 0] = -1.0
_COMPOSE[5, 1] = -1.0
_COMPOSE[2, 2] = _COMPOSE[3, 3] = 1.0
_COMPOSE[6, 4] = _COMPOSE[7, 5] = 1.0

_INPUT_ENV = np.zeros((6, 6))
_INPUT_ENV[0, 0] = _INPUT_ENV[1, 1] = 1.0  # chi_in(L) chi_in(-L) = exp(-|L|^2/2)


def make_seed(family: str, r: float, kappa: float = 0.5) -> GaussianState:
    family = family.lower()
    if family == "tmsv":
        return make_tmsv(r)
    if family == "tmst":
        return make_tmst(r, kappa)
    raise ValueError("family must be 'tmsv' or 'tmst'")


@dataclass(frozen=True)
class PointResult:
    r: float
    T: float
    fidelity: float
    lambda_min: float
    p_success: float
    success: bool
    unsqueezed: bool
    region: bool
    flags: tuple
    error: str | None = None

    @classmethod
    def failed(cls, r: float, T: float, error: str) -> "PointResult":
        nan = float("nan")
        return cls(r, T, nan, nan, nan, False, False, False, (), error)


def _seed_kernel8(seed: GaussianState, op: OperationSpec) -> np.ndarray:
    omega = symplectic_form(2)
    k4 = omega @ seed.cov @ omega.T
    k8 = np.zeros((8, 8))
    pos = (0, 1, 4, 5)
    k8[np.ix_(pos, pos)] = k4
    mix = _mix_matrix(op.transmissivity)
    return mix @ k8 @ mix.T


def _detected_object(seed: GaussianState, op: OperationSpec) -> PolyGaussian:
    """Joint pre-integration object: seed kernel + cached ancilla block."""
    block = _ancilla_block(op.m1, op.n1, op.m2, op.n2, op.transmissivity)
    return PolyGaussian(_seed_kernel8(seed, op) + block.kernel, block.phase, block.poly)


@lru_cache(maxsize=512)
def _composed_block(m1: int, n1: int, m2: int, n2: int, transmissivity: float) -> PolyGaussian:
    """Ancilla block pulled through the teleportation slice (seed-independent)."""
    block = _ancilla_block(m1, n1, m2, n2, transmissivity)
    return block.substitute(_COMPOSE)


def point_quantities(seed: GaussianState, op: OperationSpec):
    """(fidelity, lambda_min, p_success, mean, cov) at one parameter point."""
    if np.max(np.abs(seed.mean)) > 1e-12:
        raise ValueError("seed must be zero-mean")
    obj = _detected_object(seed, op)

    chi2 = obj.integrate_out((2, 3, 6, 7), max_kept_degree=2)
    raw = chi2.value_at_origin()
    if abs(raw.imag) > 1e-10 * max(1.0, abs(raw)):
        raise EngineError("heralding probability came out non-real: %r" % raw)
    p = raw.real
    if p < P_SUCCESS_FLOOR:
        raise MeasureZeroOutcomeError(
            "detection pattern %s has probability %.3e" % (op.label(), p)
        )
    _, grad, hess = chi2.taylor2()
    mean, cov = moments_from_taylor(grad / raw, hess / raw)
    lam = float(np.linalg.eigvalsh(cov)[0])

    cblock = _composed_block(op.m1, op.n1, op.m2, op.n2, op.transmissivity)
    kernel6 = _COMPOSE.T @ _seed_kernel8(seed, op) @ _COMPOSE + cblock.kernel + _INPUT_ENV
    composed = PolyGaussian(kernel6, cblock.phase, cblock.poly)
    overlap = composed.integrate_out(range(6))
    val = overlap.value_at_origin()
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise EngineError("fidelity came out non-real: %r" % val)
    fid = val.real / p
    if not -BOUNDARY_TOL <= fid <= 1.0 + BOUNDARY_TOL:
        raise EngineError("fidelity %r outside [0, 1]" % fid)
    fid = min(max(fid, 0.0), 1.0)
    return fid, lam, p, mean, cov


def evaluate_point(family: str, r: float, kappa: float, op: OperationSpec) -> PointResult:
    """One sweep row; pipeline failures become an error row, not an exception."""
    try:
        fid, lam, p, _, _ = point_quantities(make_seed(family, r, kappa), op)
    except MeasureZeroOutcomeError:
        return PointResult.failed(r, op.transmissivity, "measure_zero")
    except NonPositiveKernelError:
        return PointResult.failed(r, op.transmissivity, "non_positive_kernel")
    flags = []
    if abs(fid - 0.5) < BOUNDARY_TOL:
        flags.append("F_boundary")
    if abs(lam - 0.5) < BOUNDARY_TOL:
        flags.append("lambda_boundary")
    success = fid > 0.5
    unsqueezed = lam >= 0.5
    return PointResult(
        r=r,
        T=op.transmissivity,
        fidelity=fid,
        lambda_min=lam,
        p_success=p,
        success=success,
        unsqueezed=unsqueezed,
        region=success and unsqueezed,
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("grid counts must be >= 2")
        if self.hi < self.lo:
            raise ValueError("grid upper bound below lower bound")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    def label(self) -> str:
        return "%s:%s:%d" % (_fmt(self.lo), _fmt(self.hi), self.count)


@dataclass(frozen=True)
class SweepConfig:
    family: str
    m1: int
    n1: int
    m2: int
    n2: int
    r_grid: GridSpec
    t_grid: GridSpec
    kappa: float = 1.0

    def __post_init__(self):
        if self.family.lower() not in ("tmsv", "tmst"):
            raise ValueError("family must be 'tmsv' or 'tmst'")
        if not 0.0 < self.t_grid.lo <= self.t_grid.hi < 1.0:
            raise ValueError("transmissivity grid must lie inside (0, 1)")
        if self.r_grid.lo < 0.0:
            raise ValueError("squeezing grid must be non-negative")

    def metadata(self) -> dict:
        return {
            "family": self.family.lower(),
            "spec": "%d,%d,%d,%d" % (self.m1, self.n1, self.m2, self.n2),
            "kappa": _fmt(self.kappa if self.family.lower() == "tmst" else 0.5),
            "engine_version": __version__,
            "r_grid": self.r_grid.label(),
            "T_grid": self.t_grid.label(),
        }


def run_sweep(config: SweepConfig):
    """Evaluate the full grid in deterministic r-major order."""
    kappa = config.kappa if config.family.lower() == "tmst" else 0.5
    rows = []
    for r in config.r_grid.values():
        for t in config.t_grid.values():
            op = OperationSpec(config.m1, config.n1, config.m2, config.n2, transmissivity=float(t))
            rows.append(evaluate_point(config.family, float(r), kappa, op))
    return rows


def _fmt(x: float) -> str:
    if isinstance(x, float) and np.isnan(x):
        return "nan"
    return "%.12g" % x


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def row_fields(row: PointResult) -> list:
    return [
        _fmt(row.r),
        _fmt(row.T),
        _fmt(row.fidelity),
        _fmt(row.lambda_min),
        _fmt(row.p_success),
        _fmt_bool(row.success),
        _fmt_bool(row.unsqueezed),
        _fmt_bool(row.region),
        ";".join(row.flags),
        row.error or "",
    ]


def render_csv(config: SweepConfig, rows) -> str:
    lines = ["# %s: %s" % (k, v) for k, v in config.metadata().items()]
    lines.append(",".join(CSV_COLUMNS))
    lines.extend(",".join(row_fields(row)) for row in rows)
    return "\n".join(lines) + "\n"


def render_json(config: SweepConfig, rows) -> str:
    payload = {
        "metadata": config.metadata(),
        "columns": list(CSV_COLUMNS),
        "rows": [
            {col: field for col, field in zip(CSV_COLUMNS, row_fields(row))}
            for row in rows
        ],
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def write_sweep(path: str, config: SweepConfig, rows, fmt: str = "csv") -> None:
    text = render_csv(config, rows) if fmt == "csv" else render_json(config, rows)
    with open(path, "w") as fh:
        fh.write(text)

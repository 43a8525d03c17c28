"""Symplectic linear algebra and Gaussian states in covariance-matrix form.

Conventions used throughout the package:

* quadrature ordering (q1, p1, q2, p2, ...), hbar = 1,
* vacuum variance 1/2 per quadrature, i.e. V_vac = diag(1/2, ..., 1/2),
* symplectic form Omega = direct sum of [[0, 1], [-1, 0]] blocks,
* beamsplitter convention with +sin(theta) in the upper-right block and
  transmissivity T = cos^2(theta).

A state is physical iff the Hermitian matrix V + i*Omega/2 is positive
semidefinite (up to eigensolver noise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VACUUM_VARIANCE = 0.5
SYMPLECTIC_TOL = 1e-12
PHYSICALITY_TOL = -1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """2n x 2n symplectic form, a direct sum of [[0, 1], [-1, 0]] blocks."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff S * Omega * S^T = Omega entrywise within tol."""
    S = np.asarray(S, dtype=float)
    n2 = S.shape[0]
    if S.shape != (n2, n2) or n2 % 2 != 0:
        return False
    omega = symplectic_form(n2 // 2)
    return bool(np.max(np.abs(S @ omega @ S.T - omega)) <= tol)


@dataclass(frozen=True)
class GaussianState:
    """n-mode Gaussian state: mean vector (length 2n) and covariance matrix (2n x 2n)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 != 0 or mean.size == 0:
            raise ValueError("mean must have even positive length 2n")
        if cov.shape != (mean.size, mean.size):
            raise ValueError("cov shape must match mean length")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ValueError("cov must be symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2


def vacuum(n_modes: int) -> GaussianState:
    """n-mode vacuum: zero mean, V = diag(1/2)."""
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def squeezer(r: float) -> np.ndarray:
    """Single-mode squeezer diag(e^-r, e^r) acting on (q, p)."""
    if not np.isfinite(r):
        raise ValueError("squeeze parameter must be finite")
    return np.diag([np.exp(-r), np.exp(r)])


def embed_mode_op(block: np.ndarray, n_modes: int, modes) -> np.ndarray:
    """Embed a k-mode symplectic block at the given modes of a 2n x 2n identity.

    `modes` lists the (distinct, 0-based) target modes in the order the block's
    own modes are arranged.
    """
    block = np.asarray(block, dtype=float)
    k = block.shape[0] // 2
    modes = tuple(modes)
    if len(set(modes)) != len(modes) or len(modes) != k:
        raise ValueError("modes must be distinct and match the block size")
    if any(m < 0 or m >= n_modes for m in modes):
        raise ValueError("mode index out of range")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    full = np.eye(2 * n_modes)
    full[np.ix_(idx, idx)] = block
    return full


def beam_splitter(transmissivity: float, n_modes: int = 2, modes=(0, 1)) -> np.ndarray:
    """Beamsplitter with T = cos^2(theta) on the given mode pair.

    The 4x4 block is [[cos(theta) I2, sin(theta) I2], [-sin(theta) I2, cos(theta) I2]];
    T = 1 is the identity.
    """
    if not 0.0 < transmissivity <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    if modes[0] == modes[1]:
        raise ValueError("beamsplitter modes must differ")
    theta = np.arccos(np.sqrt(transmissivity))
    c, s = np.cos(theta), np.sin(theta)
    eye2 = np.eye(2)
    block = np.block([[c * eye2, s * eye2], [-s * eye2, c * eye2]])
    return embed_mode_op(block, n_modes, modes)


def apply(S: np.ndarray, state: GaussianState) -> GaussianState:
    """Transform a Gaussian state by a symplectic matrix: d -> Sd, V -> SVS^T."""
    S = np.asarray(S, dtype=float)
    if S.shape != (2 * state.n_modes, 2 * state.n_modes):
        raise ValueError("symplectic matrix dimension does not match state")
    if not is_symplectic(S, tol=1e-10):
        raise ValueError("matrix is not symplectic")
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def make_tmsv(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeeze parameter r >= 0.

    Closed-form covariance: diagonal cosh(2r)/2, with +sinh(2r)/2 on the q1q2
    and -sinh(2r)/2 on the p1p2 off-diagonals. Equivalent to two opposite
    single-mode squeezers followed by a balanced beamsplitter on vacuum.
    """
    if r < 0:
        raise ValueError("squeeze parameter must be non-negative")
    return make_tmst(r, 0.5)


def make_tmst(r: float, kappa: float) -> GaussianState:
    """Two-mode squeezed thermal state; kappa = <n> + 1/2 of the thermal seed.

    kappa = 1/2 is the vacuum seed and reproduces the TMSV covariance exactly.
    """
    if r < 0:
        raise ValueError("squeeze parameter must be non-negative")
    if kappa < 0.5:
        raise ValueError("kappa < 1/2 is an unphysical thermal seed")
    b = kappa * np.cosh(2.0 * r)
    c = kappa * np.sinh(2.0 * r)
    cov = np.array(
        [
            [b, 0.0, c, 0.0],
            [0.0, b, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ]
    )
    return GaussianState(np.zeros(4), cov)


def physicality_margin(state: GaussianState) -> float:
    """Minimum eigenvalue of the Hermitian matrix V + i*Omega/2."""
    omega = symplectic_form(state.n_modes)
    h = state.cov + 0.5j * omega
    return float(np.linalg.eigvalsh(h)[0])


def is_physical(state: GaussianState, tol: float = PHYSICALITY_TOL) -> bool:
    """True iff V + i*Omega/2 >= 0 within eigensolver tolerance."""
    return physicality_margin(state) >= tol

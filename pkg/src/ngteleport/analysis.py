"""Moments, covariance matrices and the U(2)-invariant squeezing verdict.

Symmetrically ordered quadrature moments are read off a normalised
characteristic function by differentiation at the origin: each power of q_i
differentiates sigma_i with a 1/i prefactor, each power of p_i differentiates
tau_i with a 1/(-i) prefactor. The two-mode state is squeezed iff the minimum
eigenvalue of its covariance matrix is strictly below 1/2; that criterion is
invariant under all passive (orthogonal-symplectic) transformations, which is
what makes it a basis-independent quadrature-squeezing test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .charfn import PolyGaussian
from .gaussian import is_symplectic
from .nongauss import NGState

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class SqueezingReport:
    """Covariance matrix, its minimum eigenvalue and the squeezing verdict."""

    mean: np.ndarray
    cov: np.ndarray
    lambda_min: float
    squeezed: bool
    boundary: bool


def symmetric_moment(chi: PolyGaussian, q_powers, p_powers) -> float:
    """<{q1^r1 p1^s1 q2^r2 p2^s2 ...}_sym> from a normalised char function.

    q_powers / p_powers give the exponent per mode. The result must be real;
    a large imaginary residue signals a convention bug upstream.
    """
    q_powers = tuple(int(v) for v in q_powers)
    p_powers = tuple(int(v) for v in p_powers)
    n_modes = chi.n_vars // 2
    if len(q_powers) != n_modes or len(p_powers) != n_modes:
        raise ValueError("need one (q, p) power pair per mode")
    orders = [0] * chi.n_vars
    for i in range(n_modes):
        orders[2 * i] = p_powers[i]  # tau_i derivatives
        orders[2 * i + 1] = q_powers[i]  # sigma_i derivatives
    pref = (1.0 / 1j) ** sum(q_powers) * (1.0 / -1j) ** sum(p_powers)
    val = pref * chi.derivative_at_zero(orders)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise ValueError("moment came out non-real: %r" % val)
    return float(val.real)


def moments_from_taylor(grad: np.ndarray, hess: np.ndarray):
    """Mean and covariance from the origin gradient/Hessian of a normalised chi.

    Quadrature index order (q1, p1, q2, p2): each q_i power carries
    (1/i) d/dsigma_i, each p_i power (1/-i) d/dtau_i.
    """
    dvar = (1, 0, 3, 2)
    pref = (-1j, 1j, -1j, 1j)
    mean = np.zeros(4)
    for i in range(4):
        m = pref[i] * grad[dvar[i]]
        if abs(m.imag) > 1e-9 * max(1.0, abs(m)):
            raise ValueError("first moment came out non-real: %r" % m)
        mean[i] = m.real
    cov = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            m = pref[i] * pref[j] * hess[dvar[i], dvar[j]]
            if abs(m.imag) > 1e-9 * max(1.0, abs(m)):
                raise ValueError("second moment came out non-real: %r" % m)
            cov[i, j] = cov[j, i] = m.real - mean[i] * mean[j]
    return mean, cov


def covariance_of(state) -> SqueezingReport:
    """Assemble mean and covariance from a normalised characteristic function.

    Accepts an NGState or a 4-variable PolyGaussian. First moments are
    computed, never assumed zero; V_ij = <{xi_i, xi_j}>/2 - d_i d_j.
    """
    chi = state.chi if isinstance(state, NGState) else state
    if chi.n_vars != 4:
        raise ValueError("expected a two-mode characteristic function")
    if abs(chi.value_at_origin() - 1.0) > 1e-10:
        raise ValueError("characteristic function is not normalised")

    _, grad, hess = chi.taylor2()
    mean, cov = moments_from_taylor(grad, hess)
    lam = float(np.linalg.eigvalsh(cov)[0])
    return SqueezingReport(
        mean=mean,
        cov=cov,
        lambda_min=lam,
        squeezed=lam < 0.5,
        boundary=abs(lam - 0.5) < BOUNDARY_TOL,
    )


def random_passive(seed: int, n_modes: int = 2) -> np.ndarray:
    """Haar-random passive transformation (orthogonal and symplectic).

    Built from a random unitary U = X - iY: quadratures of mode i mix into
    [[X_ij, Y_ij], [-Y_ij, X_ij]] blocks. Deterministic in the seed.
    """
    u = unitary_group.rvs(n_modes, random_state=np.random.default_rng(seed))
    x, y = u.real, -u.imag
    k = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        for j in range(n_modes):
            k[2 * i, 2 * j] = x[i, j]
            k[2 * i, 2 * j + 1] = y[i, j]
            k[2 * i + 1, 2 * j] = -y[i, j]
            k[2 * i + 1, 2 * j + 1] = x[i, j]
    if not is_symplectic(k) or np.max(np.abs(k @ k.T - np.eye(2 * n_modes))) > 1e-12:
        raise AssertionError("generated transform is not passive")
    return k

"""Closed-form fidelity and minimum-eigenvalue expressions used as test oracles.

The symmetric single-photon subtraction and addition cases admit compact
closed forms in b = T tanh(r): the conditioned states depend on (r, T) only
through that combination (per-arm Kraus algebra gives Schmidt coefficients
proportional to (m+1) (T tanh r)^m), so every normalised-state property is a
function of b alone. The Gaussian two-mode squeezed vacuum/thermal baselines
follow from the overlap integral directly. The engine never calls these in
its own pipeline -- they exist to cross-check it (CLI `verify` and the test
suite).
"""

import numpy as np


def ps_fidelity(r, T):
    """(0,1)(0,1) photon-subtracted TMSV fidelity, b = T tanh r."""
    b = T * np.tanh(r)
    return (1 + b) ** 3 * (1 + (1 - b) ** 2) / (4 * (1 + b**2))


def pa_fidelity(r, T):
    """(1,0)(1,0) photon-added TMSV fidelity, b = T tanh r."""
    b = T * np.tanh(r)
    return (1 + b) ** 3 / (4 * (1 + b**2))


def ps_lambda_min(r, T):
    """(0,1)(0,1) photon-subtracted TMSV minimum covariance eigenvalue."""
    b = T * np.tanh(r)
    return (1 - b) ** 2 * (1 - 2 * b + 3 * b**2) / (2 * (1 - b**4))


def pa_lambda_min(r, T):
    """(1,0)(1,0) photon-added TMSV minimum covariance eigenvalue."""
    b = T * np.tanh(r)
    return (1 - b) ** 2 * (3 - 2 * b + b**2) / (2 * (1 - b**4))


def tmsv_fidelity(r):
    """Gaussian baseline: F = 1/(1 + e^-2r)."""
    return 1.0 / (1.0 + np.exp(-2.0 * r))


def tmst_fidelity(r, kappa):
    """Gaussian baseline: F = 1/(1 + 2 kappa e^-2r)."""
    return 1.0 / (1.0 + 2.0 * kappa * np.exp(-2.0 * r))


def tmsv_lambda_min(r):
    """Gaussian baseline: lambda_min = e^-2r / 2."""
    return 0.5 * np.exp(-2.0 * r)


def tmst_lambda_min(r, kappa):
    """Gaussian baseline: lambda_min = kappa e^-2r."""
    return kappa * np.exp(-2.0 * r)

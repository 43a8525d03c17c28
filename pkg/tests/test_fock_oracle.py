import numpy as np
import pytest
from scipy.linalg import expm

from ngteleport import closed_forms as cf
from ngteleport.errors import CutoffTooSmallError, MeasureZeroOutcomeError
from ngteleport.fock_oracle import (
    FockState,
    annihilator,
    beamsplitter_unitary,
    displacement,
    displacement_batch,
    estimate_cutoff,
    kraus_operator,
    oracle_char,
    oracle_covariance,
    oracle_fidelity,
    oracle_ng,
    oracle_point,
    oracle_seed,
    squeeze_unitary,
)
from ngteleport.gaussian import make_tmst, make_tmsv
from ngteleport.nongauss import OperationSpec, build_ng_state
from ngteleport.pipeline import make_seed, point_quantities


def test_truncated_unitaries_on_low_photon_block():
    dim = 41
    u = squeeze_unitary(0.6, dim)
    low = (u.conj().T @ u)[:20, :20]
    assert np.max(np.abs(low - np.eye(20))) < 1e-8
    b = beamsplitter_unitary(np.arccos(np.sqrt(0.8)), dim).toarray()
    low = (b.conj().T @ b)[: 15 * dim, : 15 * dim]
    assert np.max(np.abs(low - np.eye(15 * dim))) < 1e-8


def test_beamsplitter_matches_dense_exponential():
    dim = 12
    theta = 0.43
    a = annihilator(dim)
    gen = np.kron(a.T, a) - np.kron(a, a.T)
    dense = expm(theta * gen)
    sect = beamsplitter_unitary(theta, dim).toarray()
    assert np.max(np.abs(dense - sect)) < 1e-12


def test_displacement_matches_exponential():
    rng = np.random.default_rng(41)
    dim = 25
    a = annihilator(dim + 30)  # generous padding: the reference leaks at the top
    for _ in range(5):
        alpha = complex(rng.normal(), rng.normal())
        ref = expm(alpha * a.T - np.conj(alpha) * a)[:dim, :dim]
        fast = displacement(alpha, dim)
        assert np.max(np.abs(ref - fast)) < 1e-10
    batch = displacement_batch(np.array([0.3 + 0.2j, -1.0j]), dim)
    assert np.max(np.abs(batch[0] - displacement(0.3 + 0.2j, dim))) < 1e-14


def test_seed_vacuum_and_schmidt_amplitudes():
    s = oracle_seed("tmsv", 0.0, cutoff=10)
    assert s.is_pure
    vec = s.vectors[:, 0].reshape(11, 11)
    assert abs(vec[0, 0] - 1.0) < 1e-12
    assert np.sum(np.abs(vec)) - 1.0 < 1e-10

    s = oracle_seed("tmsv", 0.5)
    lam = np.tanh(0.5)
    vec = s.vectors[:, 0].reshape(31, 31)
    assert abs(vec[1, 1] - np.sqrt(1 - lam**2) * lam) < 1e-10
    # trace one
    assert abs(np.sum(s.weights) - 1.0) < 1e-12


def test_seed_tail_check_raises():
    with pytest.raises(CutoffTooSmallError):
        oracle_seed("tmsv", 1.0, cutoff=20)
    with pytest.raises(CutoffTooSmallError):
        oracle_seed("tmst", 0.8, kappa=1.0, cutoff=25)


def test_seed_covariances_match_closed_forms():
    _, cov = oracle_covariance(oracle_seed("tmsv", 0.5))
    assert np.max(np.abs(cov - make_tmsv(0.5).cov)) < 1e-8
    _, cov = oracle_covariance(oracle_seed("tmst", 0.4, kappa=1.0, cutoff=35))
    assert np.max(np.abs(cov - make_tmst(0.4, 1.0).cov)) < 1e-8


def test_thermal_seed_density_is_positive():
    s = oracle_seed("tmst", 0.3, kappa=1.0, cutoff=30)
    rho = s.density()
    assert abs(np.trace(rho).real - 1.0) < 1e-9
    assert np.linalg.eigvalsh(rho)[0] >= -1e-10


def test_catalysis_on_vacuum():
    st, p = oracle_ng(oracle_seed("tmsv", 0.0, cutoff=12), OperationSpec(1, 1, 1, 1, transmissivity=0.8))
    assert abs(p - 0.64) < 1e-12
    vec = st.vectors[:, 0].reshape(13, 13)
    assert abs(abs(vec[0, 0]) - 1.0) < 1e-10


def test_subtraction_from_vacuum_measure_zero():
    with pytest.raises(MeasureZeroOutcomeError):
        oracle_ng(oracle_seed("tmsv", 0.0, cutoff=12), OperationSpec(0, 1, 0, 1, transmissivity=0.8))


def test_kraus_operator_structure():
    k = kraus_operator(0, 1, 0.9, 20)
    # photon subtraction lowers the photon number by exactly one
    for j in range(20):
        for i in range(21):
            if i != j + 1:
                assert abs(k[j, i]) < 1e-14
    amp = k[0, 1]  # <0,1|U|1,0>: one photon reflected
    assert abs(abs(amp) - np.sqrt(0.1)) < 1e-12


def test_oracle_matches_engine_at_reference_point():
    op = OperationSpec(0, 1, 0, 1, transmissivity=0.9)
    state, p = oracle_ng(oracle_seed("tmsv", 0.5), op)
    ng = build_ng_state(make_tmsv(0.5), op)
    assert abs(p - ng.p_success) < 1e-6

    rng = np.random.default_rng(42)
    for _ in range(10):
        lam = rng.normal(size=4)
        assert abs(oracle_char(state, lam) - ng.chi.evaluate(lam)) < 1e-6

    _, cov = oracle_covariance(state)
    assert abs(np.linalg.eigvalsh(cov)[0] - cf.ps_lambda_min(0.5, 0.9)) < 1e-6


def test_oracle_fidelity_values():
    f, err = oracle_fidelity(oracle_seed("tmsv", 0.5))
    assert err < 1e-6
    assert abs(f - cf.tmsv_fidelity(0.5)) < 1e-6

    state, _ = oracle_ng(oracle_seed("tmsv", 0.5), OperationSpec(0, 1, 0, 1, transmissivity=0.9))
    f, err = oracle_fidelity(state)
    assert abs(f - cf.ps_fidelity(0.5, 0.9)) < 1e-5

    f, err = oracle_fidelity(oracle_seed("tmsv", 0.0, cutoff=12))
    assert abs(f - 0.5) < 1e-8


def test_oracle_point_bundle_and_cutoff_robustness():
    op = OperationSpec(1, 1, 1, 1, transmissivity=0.8)
    a = oracle_point("tmsv", 0.5, 0.5, op, cutoff=30)
    b = oracle_point("tmsv", 0.5, 0.5, op, cutoff=35)
    assert abs(a.fidelity - b.fidelity) < 1e-6
    assert abs(a.lambda_min - b.lambda_min) < 1e-6
    assert abs(a.p_success - b.p_success) < 1e-6

    fid, lam, p, _, _ = point_quantities(make_seed("tmsv", 0.5), op)
    assert abs(a.fidelity - fid) < 1e-6
    assert abs(a.lambda_min - lam) < 1e-6
    assert abs(a.p_success - p) < 1e-6


def test_oracle_point_escalates_cutoff():
    op = OperationSpec(1, 1, 1, 1, transmissivity=0.8)
    pt = oracle_point("tmsv", 1.0, 0.5, op, cutoff=30)
    assert pt.cutoff > 30


def test_estimate_cutoff_monotone():
    assert estimate_cutoff("tmsv", 0.1) == 30
    assert estimate_cutoff("tmsv", 1.0) > 30
    assert estimate_cutoff("tmst", 1.0, 1.0) > estimate_cutoff("tmsv", 1.0)


def test_teleport_map_sign_sensitivity():
    """Flipping the sign convention of the teleport slice must be detected:
    the overlap with the correlated resource collapses to the classical bound
    scale, far from the true value."""
    from ngteleport.fock_oracle import _overlap_operator, _orders_for

    state = oracle_seed("tmsv", 0.5)
    good, _ = oracle_fidelity(state)
    # rebuild the overlap with the Bob-side sigma sign flipped: equivalent to
    # slicing the resource at (-tau, sig, -tau, +sig)
    import ngteleport.fock_oracle as fo

    orig = fo._overlap_operator

    def flipped(dim, order, L, alpha):
        import math

        nodes, wts = np.polynomial.legendre.leggauss(order)
        nodes = nodes * L
        wts = wts * L
        tau = np.repeat(nodes, order)
        sig = np.tile(nodes, order)
        w2 = np.repeat(wts, order) * np.tile(wts, order)
        coef = w2 * np.exp(-0.5 * (tau**2 + sig**2)) / (2.0 * math.pi)
        a1 = (-tau + 1j * sig) / math.sqrt(2.0)
        a2 = (-tau + 1j * sig) / math.sqrt(2.0)  # wrong sign on Bob's sigma
        d1 = fo.displacement_batch(a1, dim).reshape(-1, dim * dim)
        d2 = fo.displacement_batch(a2, dim).reshape(-1, dim * dim)
        w2mat = (coef[:, None] * d1).T @ d2
        w4 = w2mat.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3)
        return np.ascontiguousarray(w4.reshape(dim * dim, dim * dim))

    fo._overlap_operator = flipped
    try:
        bad, _ = oracle_fidelity(state)
    finally:
        fo._overlap_operator = orig
    assert abs(good - cf.tmsv_fidelity(0.5)) < 1e-6
    assert abs(bad - good) > 0.1

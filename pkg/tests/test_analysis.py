import numpy as np
import pytest

from ngteleport import closed_forms as cf
from ngteleport.analysis import covariance_of, random_passive, symmetric_moment
from ngteleport.charfn import PolyGaussian
from ngteleport.gaussian import (
    is_symplectic,
    make_tmst,
    make_tmsv,
    physicality_margin,
    symplectic_form,
    vacuum,
)
from ngteleport.nongauss import OperationSpec, build_ng_state
from ngteleport.gaussian import GaussianState


def test_vacuum_moments():
    chi = PolyGaussian.from_gaussian(vacuum(2))
    assert abs(symmetric_moment(chi, (2, 0), (0, 0)) - 0.5) < 1e-14
    assert abs(symmetric_moment(chi, (0, 0), (2, 0)) - 0.5) < 1e-14
    assert abs(symmetric_moment(chi, (1, 0), (0, 0))) < 1e-14


def test_tmsv_cross_moment():
    chi = PolyGaussian.from_gaussian(make_tmsv(0.5))
    # <q1 q2> = sinh(1)/2
    assert abs(symmetric_moment(chi, (1, 1), (0, 0)) - 0.5876005968219007) < 1e-12
    assert abs(symmetric_moment(chi, (0, 0), (1, 1)) + 0.5876005968219007) < 1e-12


def test_coherent_first_moment():
    alpha = 1.25 - 0.4j
    d = np.sqrt(2.0) * np.array([alpha.real, alpha.imag, 0, 0])
    chi = PolyGaussian.from_gaussian(GaussianState(d, 0.5 * np.eye(4)))
    assert abs(symmetric_moment(chi, (1, 0), (0, 0)) - np.sqrt(2) * alpha.real) < 1e-12
    assert abs(symmetric_moment(chi, (0, 0), (1, 0)) - np.sqrt(2) * alpha.imag) < 1e-12


def test_covariance_matches_gaussian_constructors():
    for state in (make_tmsv(0.8), make_tmst(0.45, 1.2), vacuum(2)):
        rep = covariance_of(PolyGaussian.from_gaussian(state))
        assert np.max(np.abs(rep.cov - state.cov)) < 1e-10
        assert np.max(np.abs(rep.mean)) < 1e-12


def test_covariance_of_requires_normalised_input():
    chi = PolyGaussian.from_gaussian(make_tmsv(0.3)).scale(2.0)
    with pytest.raises(ValueError):
        covariance_of(chi)


def test_subtracted_state_lambda_min_closed_form():
    ng = build_ng_state(make_tmsv(0.5), OperationSpec(0, 1, 0, 1, transmissivity=0.9))
    rep = covariance_of(ng)
    assert abs(rep.lambda_min - cf.ps_lambda_min(0.5, 0.9)) < 1e-11
    assert abs(rep.lambda_min - 0.1208266109403652) < 1e-9
    assert rep.squeezed


def test_added_state_lambda_min_at_zero_squeezing():
    for t in (0.6, 0.9):
        ng = build_ng_state(make_tmsv(1e-9), OperationSpec(1, 0, 1, 0, transmissivity=t))
        rep = covariance_of(ng)
        assert abs(rep.lambda_min - 1.5) < 1e-7  # two-mode Fock |11>
        assert not rep.squeezed


def test_tmsv_lambda_min():
    for r in (0.1, 0.6, 1.2):
        rep = covariance_of(PolyGaussian.from_gaussian(make_tmsv(r)))
        assert abs(rep.lambda_min - 0.5 * np.exp(-2 * r)) < 1e-12


def test_ng_first_moments_vanish():
    for seed in (make_tmsv(0.7), make_tmst(0.5, 1.0)):
        for mk in ((0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)):
            ng = build_ng_state(seed, OperationSpec(*mk, transmissivity=0.8))
            rep = covariance_of(ng)
            assert np.max(np.abs(rep.mean)) < 1e-10


def test_ng_covariance_physicality():
    omega = symplectic_form(2)
    for mk in ((0, 1, 0, 1), (1, 1, 1, 1)):
        ng = build_ng_state(make_tmst(0.6, 1.0), OperationSpec(*mk, transmissivity=0.75))
        rep = covariance_of(ng)
        h = rep.cov + 0.5j * omega
        assert np.linalg.eigvalsh(h)[0] >= -1e-8


def test_random_passive_properties():
    for seed in range(10):
        k = random_passive(seed)
        assert np.allclose(k @ k.T, np.eye(4), atol=1e-12)
        assert is_symplectic(k)
    assert np.allclose(random_passive(3), random_passive(3))
    assert not np.allclose(random_passive(3), random_passive(4))


def test_lambda_min_invariance_under_passive_transforms():
    ng = build_ng_state(make_tmsv(0.5), OperationSpec(1, 0, 1, 0, transmissivity=0.9))
    rep = covariance_of(ng)
    for seed in range(50):
        k = random_passive(seed)
        lam = float(np.linalg.eigvalsh(k @ rep.cov @ k.T)[0])
        assert abs(lam - rep.lambda_min) < 1e-9


def test_lambda_min_against_characteristic_polynomial_roots():
    # independent eigensolver check: smallest real root of det(V - x I)
    for mk in ((0, 1, 0, 1), (1, 1, 1, 1)):
        ng = build_ng_state(make_tmst(0.5, 1.0), OperationSpec(*mk, transmissivity=0.8))
        rep = covariance_of(ng)
        roots = np.roots(np.poly(rep.cov))
        # quartic root extraction is itself only conditioned to ~1e-7 here
        assert np.max(np.abs(roots.imag)) < 1e-6
        assert abs(np.min(roots.real) - rep.lambda_min) < 1e-7


def test_boundary_flag():
    # engineered report exactly at the threshold
    ng = build_ng_state(make_tmsv(0.5), OperationSpec(0, 1, 0, 1, transmissivity=0.9))
    rep = covariance_of(ng)
    assert rep.boundary == (abs(rep.lambda_min - 0.5) < 1e-9)


def test_symmetric_moment_rejects_non_real():
    # a deliberately non-Hermitian "state" must trip the reality check:
    # its p-moment picks up the real tau coefficient times 1/(-i)
    chi = PolyGaussian(0.5 * np.eye(2), np.zeros(2), {(0, 0): 1.0, (1, 0): 0.3})
    with pytest.raises(ValueError):
        symmetric_moment(chi, (0,), (1,))

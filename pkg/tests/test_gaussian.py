import numpy as np
import pytest

from ngteleport.gaussian import (
    GaussianState,
    apply,
    beam_splitter,
    embed_mode_op,
    is_physical,
    is_symplectic,
    make_tmst,
    make_tmsv,
    physicality_margin,
    squeezer,
    symplectic_form,
    vacuum,
)


def test_symplectic_form_properties():
    for n in (1, 2, 3):
        omega = symplectic_form(n)
        assert np.allclose(omega @ omega, -np.eye(2 * n))
        assert np.allclose(omega.T, -omega)


def test_squeezer_values():
    assert np.allclose(squeezer(0.0), np.eye(2))
    s = squeezer(0.5)
    assert np.allclose(np.diag(s), [0.6065306597126334, 1.6487212707001282])
    assert np.allclose(squeezer(0.5) @ squeezer(-0.5), np.eye(2))
    assert is_symplectic(s)


def test_beam_splitter_values():
    assert np.allclose(beam_splitter(1.0), np.eye(4))
    b = beam_splitter(0.5)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    assert np.allclose(b[:2, :2], inv_sqrt2 * np.eye(2))
    assert np.allclose(b[:2, 2:], inv_sqrt2 * np.eye(2))
    assert np.allclose(b[2:, :2], -inv_sqrt2 * np.eye(2))
    for t in (0.1, 0.37, 0.8, 0.99):
        b = beam_splitter(t)
        assert np.allclose(b @ b.T, np.eye(4), atol=1e-14)
        assert is_symplectic(b)


def test_beam_splitter_domain():
    with pytest.raises(ValueError):
        beam_splitter(0.0)
    with pytest.raises(ValueError):
        beam_splitter(1.2)
    with pytest.raises(ValueError):
        beam_splitter(0.5, n_modes=2, modes=(1, 1))


def test_apply_identity_and_dimension_check():
    st = make_tmsv(0.3)
    out = apply(np.eye(4), st)
    assert np.allclose(out.cov, st.cov)
    with pytest.raises(ValueError):
        apply(np.eye(2), st)
    with pytest.raises(ValueError):
        apply(np.diag([2.0, 1.0, 1.0, 1.0]), st)  # not symplectic


def test_tmsv_matches_two_step_construction():
    for r in np.linspace(0.0, 2.0, 9):
        sq = embed_mode_op(squeezer(r), 2, (0,)) @ embed_mode_op(squeezer(-r), 2, (1,))
        built = apply(beam_splitter(0.5), apply(sq, vacuum(2)))
        assert np.max(np.abs(built.cov - make_tmsv(r).cov)) < 1e-12
        assert np.allclose(built.mean, 0.0)


def test_tmsv_entries_and_eigenvalues():
    st = make_tmsv(0.0)
    assert np.allclose(st.cov, 0.5 * np.eye(4))
    st = make_tmsv(0.5)
    assert abs(st.cov[0, 0] - 0.7715403174076218) < 1e-14  # cosh(1)/2
    assert abs(st.cov[0, 2] - 0.5876005968219007) < 1e-14  # sinh(1)/2
    assert st.cov[1, 3] < 0
    for r in (0.2, 0.7, 1.3):
        eig = np.sort(np.linalg.eigvalsh(make_tmsv(r).cov))
        expect = np.sort([np.exp(2 * r) / 2] * 2 + [np.exp(-2 * r) / 2] * 2)
        assert np.allclose(eig, expect)


def test_tmst_entries_and_vacuum_seed_limit():
    st = make_tmst(0.5, 1.0)
    assert abs(st.cov[0, 0] - 1.5430806348152437) < 1e-14  # cosh(1)
    assert abs(st.cov[0, 2] - 1.1752011936438014) < 1e-14  # sinh(1)
    for r in (0.0, 0.4, 1.1):
        assert np.max(np.abs(make_tmst(r, 0.5).cov - make_tmsv(r).cov)) < 1e-14
    eig = np.linalg.eigvalsh(make_tmst(0.3, 1.2).cov)
    assert abs(eig[0] - 1.2 * np.exp(-0.6)) < 1e-12
    assert abs(eig[-1] - 1.2 * np.exp(0.6)) < 1e-12
    with pytest.raises(ValueError):
        make_tmst(0.5, 0.3)


def test_physicality():
    assert is_physical(vacuum(1))
    assert is_physical(make_tmst(0.7, 1.0))
    bad = GaussianState(np.zeros(4), np.diag([0.4, 0.4, 0.5, 0.5]))
    assert not is_physical(bad)
    assert physicality_margin(bad) < -0.05


def test_apply_preserves_physicality():
    rng = np.random.default_rng(11)
    st = make_tmst(0.6, 1.1)
    for _ in range(20):
        t = rng.uniform(0.05, 1.0)
        s = beam_splitter(t) @ embed_mode_op(squeezer(rng.uniform(-1, 1)), 2, (0,))
        st2 = apply(s, st)
        assert is_physical(st2)


def test_state_validation():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(3))
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.array([[1.0, 0.5], [0.2, 1.0]]))

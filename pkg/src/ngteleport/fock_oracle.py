"""Brute-force truncated-Fock verification path for the characteristic-function engine.

Everything here is rebuilt from first principles in a photon-number basis:
squeezers and beamsplitters are matrix exponentials of truncated generators
(padded by +10 levels during exponentiation, then cropped), heralded
operations are exact Kraus contractions <n|U_BS|m> per arm, characteristic
values come from displacement-operator Fock matrix elements, and the
teleportation overlap is a tensor-product Gauss-Legendre quadrature on
[-L, L]^2 with an order-escalation error estimate. Used only by tests and the
`oracle-check` CLI command; nothing in the main pipeline depends on it.

Two-mode states are held as weighted ensembles of pure vectors (a pure state
is a one-term ensemble; thermal seeds enter as their Fock-diagonal mixture),
which keeps mixed states tractable at the cutoffs demanded by the tail check
without ever materialising a density matrix. ``FockState.density`` exists for
small-cutoff cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import CutoffTooSmallError, EngineError, MeasureZeroOutcomeError
from .nongauss import P_SUCCESS_FLOOR, OperationSpec

DEFAULT_CUTOFF = 30
EXP_PAD = 10
TAIL_TOL = 1e-10
QUAD_L = 7.5
QUAD_ORDERS = (32, 44, 60, 80)

_MAX_ESCALATIONS = 14


def _orders_for(dim: int):
    # displacement matrix elements oscillate on a ~sqrt(n) scale, so larger
    # working dimensions need more quadrature nodes from the start
    if dim <= 55:
        return QUAD_ORDERS
    if dim <= 75:
        return QUAD_ORDERS[1:]
    return QUAD_ORDERS[2:]


def annihilator(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def squeeze_unitary(r: float, dim: int) -> np.ndarray:
    """exp[r (a^2 - a+^2) / 2] truncated to dim levels."""
    a = annihilator(dim)
    gen = 0.5 * r * (a @ a - a.T @ a.T)
    return expm(gen)


def beamsplitter_unitary(theta: float, dim: int) -> sp.csr_matrix:
    """exp[theta (a1+ a2 - a1 a2+)] on the dim x dim two-mode lattice.

    The generator conserves total photon number, so the exponential is taken
    sector by sector; sectors fully inside the lattice are exact.
    """
    rows, cols, vals = [], [], []
    for total in range(2 * dim - 1):
        lo = max(0, total - dim + 1)
        hi = min(total, dim - 1)
        ks = np.arange(lo, hi + 1)
        size = ks.size
        gen = np.zeros((size, size))
        for idx in range(size - 1):
            k = ks[idx]
            amp = math.sqrt((k + 1.0) * (total - k))  # (k, total-k) -> (k+1, total-k-1)
            gen[idx + 1, idx] = amp
            gen[idx, idx + 1] = -amp
        block = expm(theta * gen)
        flat = ks * dim + (total - ks)
        rows.append(np.repeat(flat, size))
        cols.append(np.tile(flat, size))
        vals.append(block.ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim * dim, dim * dim))


def displacement_batch(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Fock matrix elements of D(alpha) for a batch of amplitudes.

    Closed form D[m, n] = sqrt(n!/m!) alpha^(m-n) e^{-|a|^2/2} L_n^{(m-n)}(|a|^2)
    for m >= n (conjugate-swap rule below the diagonal), evaluated with the
    associated-Laguerre three-term recurrence. Returns shape (P, dim, dim).
    """
    alphas = np.asarray(alphas, dtype=complex).ravel()
    p = alphas.size
    u = np.abs(alphas) ** 2
    env = np.exp(-0.5 * u)
    out = np.zeros((p, dim, dim), dtype=complex)
    lower_pref = env.astype(complex)  # prod_{t<=diag} alpha / sqrt(t), times envelope
    upper_pref = env.astype(complex)  # same with -conj(alpha)
    for diag in range(dim):
        if diag > 0:
            lower_pref = lower_pref * alphas / math.sqrt(diag)
            upper_pref = upper_pref * (-np.conj(alphas)) / math.sqrt(diag)
        scale_lo = lower_pref.copy()
        scale_up = upper_pref.copy()
        lag_prev = np.zeros(p)
        lag = np.ones(p)
        for n in range(dim - diag):
            out[:, n + diag, n] = scale_lo * lag
            if diag:
                out[:, n, n + diag] = scale_up * lag
            # advance prefactor sqrt(n!/(n+diag)!) -> next n
            ratio = math.sqrt((n + 1.0) / (n + 1.0 + diag))
            scale_lo = scale_lo * ratio
            scale_up = scale_up * ratio
            lag_next = ((2 * n + 1 + diag - u) * lag - (n + diag) * lag_prev) / (n + 1.0)
            lag_prev, lag = lag, lag_next
    return out


def displacement(alpha: complex, dim: int) -> np.ndarray:
    return displacement_batch(np.array([alpha]), dim)[0]


@dataclass(frozen=True)
class FockState:
    """Two-mode truncated state as a weighted ensemble of pure vectors.

    ``vectors`` has one unit-norm column of length (cutoff+1)^2 per ensemble
    member; ``weights`` sum to one. A pure state is a single column.
    """

    cutoff: int
    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def is_pure(self) -> bool:
        return self.weights.size == 1

    def density(self) -> np.ndarray:
        """Materialise the density matrix (small cutoffs only)."""
        scaled = self.vectors * np.sqrt(self.weights)
        return scaled @ scaled.conj().T


def thermal_weights(nbar: float, count: int) -> np.ndarray:
    """First `count` Fock populations of a thermal state with mean nbar."""
    n = np.arange(count)
    if nbar <= 0:
        w = np.zeros(count)
        w[0] = 1.0
        return w
    return nbar**n / (1.0 + nbar) ** (n + 1)


def _tmsv_closed_form(r: float, dim: int) -> np.ndarray:
    lam = math.tanh(r)
    amps = np.sqrt(1.0 - lam**2) * lam ** np.arange(dim)
    return np.diag(amps)


def _construction_pad(r: float, cutoff: int) -> int:
    """Padding for the seed construction space.

    Truncating the squeezer generator at the top of the ladder contaminates
    amplitudes inside the crop region at a level ~ lam^(pad + cutoff/2),
    lam = tanh r; choose pad so that stays below 1e-11, with margin. All
    construction-space operations are cheap, so generous padding costs nothing.
    """
    lam = math.tanh(abs(r))
    if lam < 1e-3:
        return EXP_PAD
    need = int(math.ceil(-math.log(1e-11) / -math.log(lam))) - cutoff // 2 + EXP_PAD
    return max(EXP_PAD, need)


def oracle_seed(family: str, r: float, kappa: float = 0.5, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """Two-mode squeezed vacuum/thermal seed built by truncated unitaries.

    Squeezes the two modes by +r and -r, mixes them on a balanced
    beamsplitter, and crops from the padded construction space down to the
    cutoff, raising CutoffTooSmallError if the discarded population exceeds
    the tail tolerance. The vacuum-seeded state is cross-checked against its
    Schmidt form sqrt(1-lam^2) sum lam^n |nn>, lam = tanh r.
    """
    return _seed_cached(family.lower(), float(r), float(kappa), int(cutoff))


@lru_cache(maxsize=4)
def _seed_cached(family: str, r: float, kappa: float, cutoff: int) -> FockState:
    family = family.lower()
    if family not in ("tmsv", "tmst"):
        raise ValueError("family must be 'tmsv' or 'tmst'")
    if family == "tmsv":
        kappa = 0.5
    if kappa < 0.5:
        raise ValueError("kappa < 1/2 is an unphysical thermal seed")
    dim = cutoff + 1
    dim_pad = dim + _construction_pad(r, cutoff)

    nbar = kappa - 0.5
    if nbar == 0.0:
        pair_weights = [(1.0, 0, 0)]
        residual = 0.0
    else:
        w = thermal_weights(nbar, dim_pad)
        order = [
            (w[j] * w[k], j, k) for j in range(dim_pad) for k in range(dim_pad)
        ]
        order.sort(reverse=True)
        pair_weights = []
        acc = 0.0
        for wt, j, k in order:
            pair_weights.append((wt, j, k))
            acc += wt
            if 1.0 - acc < 0.2 * TAIL_TOL:
                break
        residual = 1.0 - acc

    sq_plus = squeeze_unitary(r, dim_pad)
    sq_minus = squeeze_unitary(-r, dim_pad)
    bs = beamsplitter_unitary(math.pi / 4.0, dim_pad)

    weights = np.array([wt for wt, _, _ in pair_weights])
    pre = np.empty((dim_pad * dim_pad, len(pair_weights)))
    for idx, (_, j, k) in enumerate(pair_weights):
        pre[:, idx] = np.outer(sq_plus[:, j], sq_minus[:, k]).ravel()
    mixed = np.asarray(bs @ pre)
    grids = mixed.reshape(dim_pad, dim_pad, -1)
    kept = grids[:dim, :dim, :]
    lost = np.sum(np.abs(grids) ** 2, axis=(0, 1)) - np.sum(np.abs(kept) ** 2, axis=(0, 1))
    tail = residual + float(weights @ lost)
    cols = kept.reshape(dim * dim, -1).astype(complex)
    if tail > TAIL_TOL:
        raise CutoffTooSmallError(
            "population %.3e beyond cutoff %d exceeds %.0e" % (tail, cutoff, TAIL_TOL)
        )

    norms = np.linalg.norm(cols, axis=0)
    weights = weights * norms**2
    weights = weights / weights.sum()
    cols = cols / norms

    state = FockState(cutoff=cutoff, weights=weights, vectors=cols)
    if nbar == 0.0:
        closed = _tmsv_closed_form(r, dim).ravel()
        dev = float(np.max(np.abs(cols[:, 0] - closed)))
        if dev > 1e-9:
            raise EngineError("vacuum-seeded state deviates from Schmidt form by %.2e" % dev)
    return state


@lru_cache(maxsize=64)
def _kraus_cached(m: int, n: int, transmissivity: float, cutoff: int) -> np.ndarray:
    dim = cutoff + 1
    dim_pad = dim + EXP_PAD
    theta = math.acos(math.sqrt(transmissivity))
    bs = beamsplitter_unitary(theta, dim_pad).toarray()
    u4 = bs.reshape(dim_pad, dim_pad, dim_pad, dim_pad)
    return np.ascontiguousarray(u4[:dim, n, :dim, m])


def kraus_operator(m: int, n: int, transmissivity: float, cutoff: int) -> np.ndarray:
    """Single-arm heralding operator <n|_anc U_BS(T) |m>_anc on the kept mode."""
    return _kraus_cached(int(m), int(n), float(transmissivity), int(cutoff))


def oracle_ng(seed: FockState, spec: OperationSpec):
    """Apply the heralded scheme to a seed ensemble; returns (state, p_success)."""
    dim = seed.dim
    k1 = kraus_operator(spec.m1, spec.n1, spec.transmissivity, seed.cutoff)
    k2 = kraus_operator(spec.m2, spec.n2, spec.transmissivity, seed.cutoff)
    cols = np.empty_like(seed.vectors)
    norms2 = np.empty(seed.weights.size)
    for idx in range(seed.weights.size):
        phi = k1 @ seed.vectors[:, idx].reshape(dim, dim) @ k2.T
        flat = phi.ravel()
        norms2[idx] = float(np.real(np.vdot(flat, flat)))
        cols[:, idx] = flat
    contrib = seed.weights * norms2
    p = float(contrib.sum())
    if p < P_SUCCESS_FLOOR:
        raise MeasureZeroOutcomeError(
            "detection pattern %s has probability %.3e" % (spec.label(), p)
        )
    keep = contrib / p > 1e-16
    cols = cols[:, keep] / np.sqrt(norms2[keep])
    weights = contrib[keep] / contrib[keep].sum()
    return FockState(cutoff=seed.cutoff, weights=weights, vectors=cols), p


@lru_cache(maxsize=8)
def _quadrature_ops(cutoff: int):
    dim = cutoff + 1
    a = sp.csr_matrix(annihilator(dim))
    q = (a + a.T) / math.sqrt(2.0)
    p = (a - a.T) * (-1j / math.sqrt(2.0))
    eye = sp.identity(dim, format="csr")
    return (
        sp.kron(q, eye, format="csr"),
        sp.kron(p, eye, format="csr"),
        sp.kron(eye, q, format="csr"),
        sp.kron(eye, p, format="csr"),
    )


def oracle_covariance(state: FockState):
    """Mean vector and covariance matrix from ladder-operator moments."""
    ops = _quadrature_ops(state.cutoff)
    n_terms = state.weights.size
    acted = [op @ state.vectors for op in ops]
    mean = np.zeros(4)
    for i in range(4):
        vals = np.einsum("it,it->t", state.vectors.conj(), acted[i]).real
        mean[i] = float(state.weights @ vals)
    cov = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            vals = np.einsum("it,it->t", acted[i].conj(), acted[j]).real
            second = float(state.weights @ vals)
            cov[i, j] = cov[j, i] = second - mean[i] * mean[j]
    del n_terms
    return mean, cov


def oracle_char(state: FockState, lam) -> complex:
    """Characteristic value Tr[rho D1(a1) D2(a2)], a_i = (tau_i + i sigma_i)/sqrt(2)."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4,):
        raise ValueError("expected a length-4 phase-space point")
    dim = state.dim
    d1 = displacement((lam[0] + 1j * lam[1]) / math.sqrt(2.0), dim)
    d2 = displacement((lam[2] + 1j * lam[3]) / math.sqrt(2.0), dim)
    total = 0.0 + 0.0j
    for idx in range(state.weights.size):
        psi = state.vectors[:, idx].reshape(dim, dim)
        total += state.weights[idx] * np.vdot(psi, d1 @ psi @ d2.T)
    return complex(total)


def _coherent_char_values(tau, sig, alpha: complex):
    gauss = np.exp(-0.25 * (tau**2 + sig**2))
    phase = np.exp(1j * math.sqrt(2.0) * (np.real(alpha) * sig - np.imag(alpha) * tau))
    return gauss * phase


_W_CACHE: dict = {}


def _overlap_operator(dim: int, order: int, L: float, alpha: complex) -> np.ndarray:
    """(1/2pi) Int chi_in(L) chi_in(-L) D1 x D2 over the teleport slice, as a matrix."""
    key = (dim, order, round(L, 9), complex(alpha))
    if key in _W_CACHE:
        return _W_CACHE[key]
    nodes, wts = np.polynomial.legendre.leggauss(order)
    nodes = nodes * L
    wts = wts * L
    tau = np.repeat(nodes, order)
    sig = np.tile(nodes, order)
    w2 = np.repeat(wts, order) * np.tile(wts, order)
    scal = _coherent_char_values(tau, sig, alpha) * _coherent_char_values(-tau, -sig, alpha)
    coef = w2 * scal / (2.0 * math.pi)
    # chi_out(-L) slices the resource at (-tau, sig, -tau, -sig)
    a1 = (-tau + 1j * sig) / math.sqrt(2.0)
    a2 = (-tau - 1j * sig) / math.sqrt(2.0)
    d1 = displacement_batch(a1, dim).reshape(-1, dim * dim)
    d2 = displacement_batch(a2, dim).reshape(-1, dim * dim)
    w2mat = (coef[:, None] * d1).T @ d2  # [(a c), (b d)]
    w4 = w2mat.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3)
    out = np.ascontiguousarray(w4.reshape(dim * dim, dim * dim))
    while _W_CACHE and sum(w.nbytes for w in _W_CACHE.values()) + out.nbytes > 8e8:
        _W_CACHE.pop(next(iter(_W_CACHE)))
    _W_CACHE[key] = out
    return out


def _fidelity_at_dim(state, weights, vectors, dim, dim_w, alpha, quad_tol, L):
    if dim_w != dim:
        grid = vectors.reshape(dim, dim, -1)
        vectors = np.ascontiguousarray(grid[:dim_w, :dim_w, :]).reshape(dim_w * dim_w, -1)
    prev = None
    err = math.inf
    for order in _orders_for(dim_w):
        w_op = _overlap_operator(dim_w, order, L, alpha)
        acted = w_op @ vectors
        vals = np.einsum("it,it->t", vectors.conj(), acted)
        total = complex(weights @ vals)
        if abs(total.imag) > 1e-8:
            raise EngineError("fidelity quadrature came out non-real: %r" % total)
        f = total.real
        if prev is not None:
            err = abs(f - prev)
            if err < quad_tol:
                return f, err
        prev = f
    raise EngineError("fidelity quadrature did not converge (last change %.3e)" % err)


def _population_dim(state: FockState, tol: float) -> int:
    """Smallest Fock dimension keeping all but `tol` of the population."""
    prob = np.abs(state.vectors.reshape(state.dim, state.dim, -1)) ** 2 @ state.weights
    inside = np.cumsum(np.cumsum(prob, axis=0), axis=1).diagonal()
    tails = 1.0 - inside
    hits = np.nonzero(tails <= tol)[0]
    return int(hits[0]) + 1 if hits.size else state.dim


def oracle_fidelity(
    state: FockState,
    alpha: complex = 0j,
    quad_tol: float = 2e-7,
    L: float = QUAD_L,
):
    """Teleportation fidelity by 2D quadrature of the overlap integrand.

    The tensor-product Gauss-Legendre order escalates until two successive
    estimates agree within quad_tol. The working Fock dimension starts where
    the state's own population profile says the overlap is converged (large
    seed cutoffs are driven by the tail check, not by the overlap, and the
    quadrature operator scales as dim^4) and is then refined by +10; the
    reported error estimate covers both the quadrature and the refinement.
    """
    # trim low-weight ensemble members; each contributes at most its weight
    # to the overlap, so the dropped mass adds to the error estimate directly
    order_idx = np.argsort(state.weights)[::-1]
    cum = np.cumsum(state.weights[order_idx])
    keep_n = int(np.searchsorted(cum, 1.0 - 5e-3 * quad_tol)) + 1
    keep = order_idx[: min(keep_n, order_idx.size)]
    weights = state.weights[keep]
    vectors = state.vectors[:, keep]
    dropped = max(0.0, 1.0 - float(weights.sum()))

    dim_w = min(state.dim, max(41, _population_dim(state, 0.1 * quad_tol)))
    prev = None
    while True:
        f, qerr = _fidelity_at_dim(state, weights, vectors, state.dim, dim_w, alpha, quad_tol, L)
        if prev is not None and abs(f - prev) < quad_tol:
            return f, max(qerr, abs(f - prev)) + dropped
        if dim_w == state.dim:
            return f, (qerr if prev is None else max(qerr, abs(f - prev))) + dropped
        prev = f
        dim_w = min(state.dim, dim_w + 10)


def estimate_cutoff(family: str, r: float, kappa: float = 0.5) -> int:
    """Starting cutoff for which the seed tail check is expected to pass."""
    if family.lower() == "tmsv" or kappa <= 0.5:
        q = math.tanh(abs(r)) ** 2
    else:
        nbar_eff = kappa * math.cosh(2.0 * r) - 0.5
        q = nbar_eff / (1.0 + nbar_eff)
    if q < 1e-6:
        return DEFAULT_CUTOFF
    need = int(math.ceil(math.log(0.05 * TAIL_TOL) / math.log(q))) + 2
    return max(DEFAULT_CUTOFF, 5 * int(math.ceil(need / 5.0)))


@dataclass(frozen=True)
class OraclePoint:
    fidelity: float
    lambda_min: float
    p_success: float
    mean: np.ndarray
    cov: np.ndarray
    cutoff: int
    quad_error: float


def oracle_point(
    family: str,
    r: float,
    kappa: float,
    spec: OperationSpec,
    cutoff: int | None = None,
    quad_tol: float = 1e-7,
) -> OraclePoint:
    """Full independent evaluation (F, lambda_min, P) at one parameter point.

    The cutoff auto-escalates in steps of 5 until the seed tail check passes.
    """
    c = cutoff if cutoff is not None else estimate_cutoff(family, r, kappa)
    for _ in range(_MAX_ESCALATIONS):
        try:
            seed = oracle_seed(family, r, kappa, cutoff=c)
            break
        except CutoffTooSmallError:
            c += 5
    else:
        raise CutoffTooSmallError("tail check kept failing up to cutoff %d" % c)
    state, p = oracle_ng(seed, spec)
    mean, cov = oracle_covariance(state)
    lam = float(np.linalg.eigvalsh(cov)[0])
    f, err = oracle_fidelity(state, quad_tol=quad_tol)
    return OraclePoint(
        fidelity=f,
        lambda_min=lam,
        p_success=p,
        mean=mean,
        cov=cov,
        cutoff=c,
        quad_error=err,
    )

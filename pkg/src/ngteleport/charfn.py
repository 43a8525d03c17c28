"""Exact calculus of polynomial-times-Gaussian characteristic functions.

A ``PolyGaussian`` represents P(L) * exp(-1/2 L^T G L + l^T L) over real
variables L = (tau1, sigma1, tau2, sigma2, ...), two per mode. G is a real
symmetric kernel, l a complex linear phase (purely imaginary for displaced
states), and P a sparse polynomial with complex coefficients.

Gaussian states map to kernel G = Omega V Omega^T with phase -i(Omega d);
Fock states contribute Laguerre polynomials. Products, linear substitutions,
partial Gaussian integration (with a 1/(2pi) factor per integrated variable
pair) and derivatives at the origin are all exact up to float rounding, so
moments and overlap integrals downstream carry no discretisation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveKernelError
from .gaussian import GaussianState, symplectic_form

PRUNE_TOL = 1e-14

Poly = dict  # exponent tuple -> complex coefficient

# Hot-path polynomial arithmetic uses integer-packed exponents (6 bits per
# variable), so multiplying monomials is a single integer addition. Total
# degrees in this artifact stay <= 16, far from the 63-per-variable limit.
_PACK_BITS = 6
_PACK_MASK = (1 << _PACK_BITS) - 1


def _pack_poly(poly: Poly) -> dict:
    out = {}
    for e, c in poly.items():
        key = 0
        for i, p in enumerate(e):
            key |= p << (_PACK_BITS * i)
        out[key] = out.get(key, 0.0) + c
    return out


def _unpack_poly(packed: dict, n_vars: int) -> Poly:
    out: Poly = {}
    for key, c in packed.items():
        e = tuple((key >> (_PACK_BITS * i)) & _PACK_MASK for i in range(n_vars))
        out[e] = c
    return out


def _prune(poly: Poly) -> Poly:
    """Drop coefficients negligible relative to the largest one."""
    if not poly:
        return {}
    cut = PRUNE_TOL * max(1.0, max(abs(c) for c in poly.values()))
    return {e: c for e, c in poly.items() if abs(c) > cut}


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    get = out.get
    for e, c in b.items():
        out[e] = get(e, 0.0) + c
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    """Product of packed-key polynomials (exponents add as integers)."""
    out: dict = {}
    get = out.get
    if len(a) < len(b):
        a, b = b, a
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = ea + eb
            out[e] = get(e, 0.0) + ca * cb
    return out


def _poly_scale(a: dict, s: complex) -> dict:
    return {e: c * s for e, c in a.items()}


def _laguerre_poly(n: int) -> list:
    """Monomial coefficients of the Laguerre polynomial L_n: [c0, c1, ...]."""
    return [(-1) ** k * math.comb(n, k) / math.factorial(k) for k in range(n + 1)]


@dataclass(frozen=True)
class PolyGaussian:
    """P(L) * exp(-1/2 L^T kernel L + phase^T L) over n real variables."""

    kernel: np.ndarray
    phase: np.ndarray
    poly: Poly

    def __post_init__(self):
        kernel = np.array(self.kernel, dtype=float)
        phase = np.array(self.phase, dtype=complex)
        n = phase.size
        if kernel.shape != (n, n):
            raise ValueError("kernel shape must match phase length")
        if n and np.max(np.abs(kernel - kernel.T)) > 1e-12:
            raise ValueError("kernel must be symmetric")
        kernel = 0.5 * (kernel + kernel.T)
        poly = _prune({tuple(int(p) for p in e): complex(c) for e, c in self.poly.items()})
        for e in poly:
            if len(e) != n or any(p < 0 for p in e):
                raise ValueError("bad exponent multi-index %r" % (e,))
        kernel.setflags(write=False)
        phase.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "poly", poly)

    @property
    def n_vars(self) -> int:
        return self.phase.size

    @classmethod
    def _make(cls, kernel: np.ndarray, phase: np.ndarray, poly: Poly) -> "PolyGaussian":
        """Trusted fast path for operation outputs: inputs are already
        symmetric/pruned, so the public validation pass is skipped."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "kernel", kernel)
        object.__setattr__(obj, "phase", phase)
        object.__setattr__(obj, "poly", poly)
        return obj

    # ----- constructors -------------------------------------------------

    @classmethod
    def constant(cls, n_vars: int, value: complex = 1.0) -> "PolyGaussian":
        return cls(np.zeros((n_vars, n_vars)), np.zeros(n_vars), {(0,) * n_vars: value})

    @classmethod
    def from_gaussian(cls, state: GaussianState) -> "PolyGaussian":
        """Characteristic function of a Gaussian state.

        kernel = Omega V Omega^T, phase = -i Omega d, polynomial part 1.
        """
        omega = symplectic_form(state.n_modes)
        kernel = omega @ state.cov @ omega.T
        phase = -1j * (omega @ state.mean)
        n = 2 * state.n_modes
        return cls(kernel, phase, {(0,) * n: 1.0})

    @classmethod
    def fock(cls, n: int) -> "PolyGaussian":
        """Characteristic function of the Fock state |n>:
        exp(-(tau^2+sigma^2)/4) * L_n((tau^2+sigma^2)/2).
        """
        if n < 0:
            raise ValueError("photon number must be non-negative")
        poly: Poly = {}
        for k, ck in enumerate(_laguerre_poly(n)):
            # ((tau^2 + sigma^2)/2)^k expanded binomially
            for j in range(k + 1):
                e = (2 * j, 2 * (k - j))
                poly[e] = poly.get(e, 0.0) + ck * math.comb(k, j) * 0.5**k
        return cls(0.5 * np.eye(2), np.zeros(2), poly)

    # ----- pointwise ------------------------------------------------------

    def value_at_origin(self) -> complex:
        return complex(self.poly.get((0,) * self.n_vars, 0.0))

    def evaluate(self, point) -> complex:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.n_vars,):
            raise ValueError("point length must match n_vars")
        acc = 0.0 + 0.0j
        for e, c in self.poly.items():
            term = c
            for x, p in zip(point, e):
                if p:
                    term *= x**p
            acc += term
        expo = -0.5 * point @ self.kernel @ point + self.phase @ point
        return complex(acc * np.exp(expo))

    def evaluate_grid(self, points: np.ndarray) -> np.ndarray:
        """Vectorised evaluate over an (M, n_vars) array of real points."""
        points = np.asarray(points, dtype=float)
        acc = np.zeros(points.shape[0], dtype=complex)
        for e, c in self.poly.items():
            term = np.full(points.shape[0], c, dtype=complex)
            for i, p in enumerate(e):
                if p:
                    term *= points[:, i] ** p
            acc += term
        expo = -0.5 * np.einsum("mi,ij,mj->m", points, self.kernel, points)
        expo = expo + points @ self.phase
        return acc * np.exp(expo)

    # ----- algebra --------------------------------------------------------

    def scale(self, factor: complex) -> "PolyGaussian":
        return PolyGaussian._make(self.kernel, self.phase, _prune(_poly_scale(self.poly, factor)))

    def multiply(self, other: "PolyGaussian") -> "PolyGaussian":
        """Pointwise product; both operands must live on the same variables."""
        if self.n_vars != other.n_vars:
            raise ValueError("variable-space mismatch in multiply")
        prod = _poly_mul(_pack_poly(self.poly), _pack_poly(other.poly))
        return PolyGaussian._make(
            self.kernel + other.kernel,
            self.phase + other.phase,
            _prune(_unpack_poly(prod, self.n_vars)),
        )

    def __mul__(self, other: "PolyGaussian") -> "PolyGaussian":
        return self.multiply(other)

    def substitute(self, matrix: np.ndarray) -> "PolyGaussian":
        """Linear change of variables L_old = M @ L_new (M need not be square)."""
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != self.n_vars:
            raise ValueError("substitution matrix must have n_vars rows")
        n_new = m.shape[1]
        kernel = m.T @ self.kernel @ m
        phase = m.T @ self.phase
        # linear form for each old variable (packed keys), and its powers
        forms = []
        for i in range(self.n_vars):
            f = {}
            for j in range(n_new):
                if m[i, j] != 0.0:
                    f[1 << (_PACK_BITS * j)] = m[i, j]
            forms.append(f)
        pow_cache: dict = {}

        def form_power(i: int, p: int) -> dict:
            if p == 0:
                return {0: 1.0}
            key = (i, p)
            if key not in pow_cache:
                pow_cache[key] = _poly_mul(form_power(i, p - 1), forms[i])
            return pow_cache[key]

        out: dict = {}
        get = out.get
        for e, c in self.poly.items():
            term = {0: c}
            for i, p in enumerate(e):
                if p:
                    term = _poly_mul(term, form_power(i, p))
            for k, v in term.items():
                out[k] = get(k, 0.0) + v
        kernel = 0.5 * (kernel + kernel.T)
        return PolyGaussian._make(kernel, phase, _prune(_unpack_poly(out, n_new)))

    def embed(self, n_total: int, positions) -> "PolyGaussian":
        """Embed into a larger variable space, mapping variable i to positions[i]."""
        positions = tuple(positions)
        if len(positions) != self.n_vars or len(set(positions)) != len(positions):
            raise ValueError("positions must be distinct and match n_vars")
        m = np.zeros((self.n_vars, n_total))
        for i, pos in enumerate(positions):
            m[i, pos] = 1.0
        return self.substitute(m)

    def negate_variables(self) -> "PolyGaussian":
        return self.substitute(-np.eye(self.n_vars))

    # ----- integration and derivatives -------------------------------------

    def integrate_out(self, variables, max_kept_degree: int | None = None) -> "PolyGaussian":
        """Gaussian-integrate the listed variables over R^k, keeping the rest.

        Variables are integrated in mode pairs; a 1/(2pi) normalisation is
        applied per pair, matching the photon-detection and fidelity overlap
        integrals. The kernel block over the integrated variables must be
        positive definite, otherwise the integral diverges and a
        NonPositiveKernelError is raised.

        Each monomial x^a y^b contributes y^b * E[X^a] with X Gaussian of
        covariance A^-1 and mean A^-1 (l_x - C y); the expectation is expanded
        by the Isserlis/Wick recursion with mean, which yields a polynomial in
        the kept variables.

        `max_kept_degree`, when given, truncates the result polynomial at that
        total degree. Degrees only grow along the recursion, so the retained
        coefficients are exact: the truncated result has the same Taylor
        expansion at the origin up to that order (dense-grid covariance
        extraction needs only degree 2).
        """
        xs = tuple(sorted(set(int(v) for v in variables)))
        if len(xs) == 0 or len(xs) % 2 != 0:
            raise ValueError("variables must come in pairs")
        if xs[0] < 0 or xs[-1] >= self.n_vars:
            raise ValueError("variable index out of range")
        ys = tuple(i for i in range(self.n_vars) if i not in xs)
        k, m = len(xs), len(ys)

        a_blk = self.kernel[np.ix_(xs, xs)]
        c_blk = self.kernel[np.ix_(xs, ys)]
        q_blk = self.kernel[np.ix_(ys, ys)]
        eig_min = float(np.linalg.eigvalsh(a_blk)[0])
        if eig_min <= 1e-12:
            raise NonPositiveKernelError(
                "kernel block over integrated variables is not positive definite "
                "(min eigenvalue %.3e)" % eig_min
            )
        a_inv = np.linalg.inv(a_blk)
        lx = self.phase[list(xs)]
        ly = self.phase[list(ys)]

        kernel = q_blk - c_blk.T @ a_inv @ c_blk
        kernel = 0.5 * (kernel + kernel.T)
        phase = ly - c_blk.T @ (a_inv @ lx)
        pairs = k // 2
        scalar = (
            (2.0 * np.pi) ** (k / 2.0)
            * np.linalg.det(a_blk) ** -0.5
            * (2.0 * np.pi) ** -pairs
            * np.exp(0.5 * lx @ a_inv @ lx)
        )

        sigma = a_inv
        mu_const = a_inv @ lx

        if m == 0:
            # full integration: moments are plain scalars
            cache: dict = {(0,) * k: 1.0 + 0.0j}

            def scalar_moment(a: tuple) -> complex:
                cached = cache.get(a)
                if cached is not None:
                    return cached
                i = next(idx for idx, p in enumerate(a) if p)
                rest = list(a)
                rest[i] -= 1
                rest = tuple(rest)
                total = mu_const[i] * scalar_moment(rest) if mu_const[i] != 0.0 else 0.0
                for j in range(k):
                    w = sigma[i, j] * rest[j]
                    if w:
                        red = list(rest)
                        red[j] -= 1
                        total += w * scalar_moment(tuple(red))
                cache[a] = total
                return total

            seen: dict = {}
            for e, c in self.poly.items():
                ax = tuple(e[i] for i in xs)
                seen[ax] = seen.get(ax, 0.0) + c
            acc = 0.0 + 0.0j
            for ax, c in seen.items():
                acc += c * scalar_moment(ax)
            return PolyGaussian._make(kernel, phase, {(): acc * scalar} if acc else {})

        # conditional mean of the integrated block, linear in the kept
        # variables; polynomials over the kept space use packed keys
        mu_lin = -(a_inv @ c_blk)
        mu_polys = []
        for i in range(k):
            f: dict = {}
            if mu_const[i] != 0.0:
                f[0] = complex(mu_const[i])
            for j in range(m):
                if mu_lin[i, j] != 0.0:
                    f[1 << (_PACK_BITS * j)] = complex(mu_lin[i, j])
            mu_polys.append(f)

        def packed_degree(key: int) -> int:
            d = 0
            while key:
                d += key & _PACK_MASK
                key >>= _PACK_BITS
            return d

        moment_cache: dict = {(0,) * k: {0: 1.0}}

        def moment(a: tuple) -> dict:
            cached = moment_cache.get(a)
            if cached is not None:
                return cached
            i = next(idx for idx, p in enumerate(a) if p)
            rest = list(a)
            rest[i] -= 1
            rest = tuple(rest)
            out: dict = {}
            get = out.get
            mp = mu_polys[i]
            if mp:
                for e, c in moment(rest).items():
                    for em, cm in mp.items():
                        key = e + em
                        if max_kept_degree is not None and em and packed_degree(key) > max_kept_degree:
                            continue
                        out[key] = get(key, 0.0) + c * cm
            for j in range(k):
                w = sigma[i, j] * rest[j]
                if w:
                    red = list(rest)
                    red[j] -= 1
                    for e, c in moment(tuple(red)).items():
                        out[e] = get(e, 0.0) + w * c
            moment_cache[a] = out
            return out

        # group kept-variable monomials by the integrated-variable exponent,
        # so each distinct moment expands once
        groups: dict = {}
        for e, c in self.poly.items():
            ax = tuple(e[i] for i in xs)
            by = 0
            for j, i in enumerate(ys):
                by |= e[i] << (_PACK_BITS * j)
            if max_kept_degree is not None and packed_degree(by) > max_kept_degree:
                continue
            bucket = groups.setdefault(ax, {})
            bucket[by] = bucket.get(by, 0.0) + c
        out_poly: dict = {}
        get = out_poly.get
        for ax, bucket in groups.items():
            for e, c in _poly_mul(moment(ax), bucket).items():
                if max_kept_degree is not None and packed_degree(e) > max_kept_degree:
                    continue
                out_poly[e] = get(e, 0.0) + c
        out_poly = _poly_scale(out_poly, scalar)
        return PolyGaussian._make(kernel, phase, _prune(_unpack_poly(out_poly, m)))

    def taylor2(self):
        """Value, gradient and Hessian at the origin, in closed form.

        Equivalent to derivative_at_zero for orders <= 2 but a single pass
        over the coefficients; used for covariance extraction on dense grids.
        """
        n = self.n_vars
        get = self.poly.get
        zero = (0,) * n
        val = complex(get(zero, 0.0))
        lin = np.zeros(n, dtype=complex)
        for i in range(n):
            e = list(zero)
            e[i] = 1
            lin[i] = get(tuple(e), 0.0)
        grad = lin + val * self.phase
        hess = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                quad = get(tuple(e), 0.0) * (2.0 if i == j else 1.0)
                h = (
                    quad
                    + lin[i] * self.phase[j]
                    + lin[j] * self.phase[i]
                    + val * (self.phase[i] * self.phase[j] - self.kernel[i, j])
                )
                hess[i, j] = hess[j, i] = h
        return val, grad, hess

    def derivative_at_zero(self, orders) -> complex:
        """Exact partial derivative at L = 0, one order entry per variable."""
        orders = tuple(int(o) for o in orders)
        if len(orders) != self.n_vars or any(o < 0 for o in orders):
            raise ValueError("orders must be non-negative, one per variable")
        n = self.n_vars
        poly = _pack_poly(self.poly)
        # d/dx_i (P e^E) = (dP/dx_i + P * (phase_i - (G x)_i)) e^E
        for i, count in enumerate(orders):
            shift = _PACK_BITS * i
            exp_grad: dict = {}
            if self.phase[i] != 0.0:
                exp_grad[0] = complex(self.phase[i])
            for j in range(n):
                if self.kernel[i, j] != 0.0:
                    exp_grad[1 << (_PACK_BITS * j)] = -complex(self.kernel[i, j])
            for _ in range(count):
                new: dict = {}
                get = new.get
                for e, c in poly.items():
                    p = (e >> shift) & _PACK_MASK
                    if p:
                        de = e - (1 << shift)
                        new[de] = get(de, 0.0) + c * p
                if exp_grad:
                    for e, c in _poly_mul(poly, exp_grad).items():
                        new[e] = get(e, 0.0) + c
                poly = new
        return complex(poly.get(0, 0.0))

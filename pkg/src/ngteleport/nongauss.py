"""Conditional non-Gaussian operations on two-mode Gaussian states.

Fock ancillas |m1>, |m2> are coupled to the two modes of a zero-mean Gaussian
resource through transmissivity-T beamsplitters; detecting n1 and n2 photons
in the output ancilla ports heralds the operation. Per arm, m < n subtracts
photons (PS), m > n adds them (PA), and m = n is catalysis (PC).

The conditioned characteristic function is obtained exactly: the joint
8-variable product state (variable slots ordered A1, F1, A2, F2) is pulled
back through the inverse beamsplitter map, multiplied by the detected Fock
characteristic functions, and the ancilla variables are Gaussian-integrated
with a 1/(2pi) factor per pair. The detection overlap is taken against
chi_{|n>}(Lambda) as-is; Fock characteristic functions are even in Lambda, so
this equals the chi_{|n>}(-Lambda) form of the trace rule. The value at the
origin before normalisation is the heralding probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import block_diag

from .charfn import PolyGaussian
from .errors import MeasureZeroOutcomeError
from .gaussian import GaussianState, beam_splitter, is_physical

P_SUCCESS_FLOOR = 1e-15

PS = "PS"
PA = "PA"
PC = "PC"


@dataclass(frozen=True)
class OperationSpec:
    """Ancilla inputs (m1, m2), detected photons (n1, n2), transmissivity T."""

    m1: int
    n1: int
    m2: int
    n2: int
    transmissivity: float

    def __post_init__(self):
        for v in (self.m1, self.n1, self.m2, self.n2):
            if v < 0 or int(v) != v:
                raise ValueError("photon numbers must be non-negative integers")
        if not 0.0 < self.transmissivity < 1.0:
            raise ValueError("transmissivity must lie strictly inside (0, 1)")

    @property
    def arms(self):
        return classify(self)

    def label(self) -> str:
        a1, a2 = classify(self)
        tag = a1 if a1 == a2 else a1 + a2
        return "(%d,%d)(%d,%d)-%s" % (self.m1, self.n1, self.m2, self.n2, tag)


def classify(spec: OperationSpec):
    """Per-arm labels: PS iff m<n, PA iff m>n, PC iff m=n."""

    def arm(m, n):
        if m < n:
            return PS
        if m > n:
            return PA
        return PC

    return arm(spec.m1, spec.n1), arm(spec.m2, spec.n2)


@dataclass(frozen=True)
class NGState:
    """Normalised conditioned resource state over modes (A1, A2)."""

    chi: PolyGaussian
    p_success: float
    spec: OperationSpec
    seed: object = field(default=None)


@lru_cache(maxsize=512)
def _mix_matrix(transmissivity: float) -> np.ndarray:
    bs4 = beam_splitter(transmissivity)  # couples (A_i, F_i)
    mix = block_diag(bs4, bs4)
    mix.setflags(write=False)
    return mix


@lru_cache(maxsize=512)
def _ancilla_block(m1: int, n1: int, m2: int, n2: int, transmissivity: float) -> PolyGaussian:
    """Seed-independent factor of the pre-detection joint state.

    The input-ancilla characteristic functions pulled back through the
    inverse beamsplitter map, times the detected Fock characteristic
    functions; only the (Gaussian, polynomial-free) seed factor varies from
    point to point, so this whole object is reusable across a sweep.
    """
    ancillas = PolyGaussian.fock(m1).embed(8, (2, 3)) * PolyGaussian.fock(m2).embed(8, (6, 7))
    mixed = ancillas.substitute(_mix_matrix(transmissivity).T)  # chi(L) -> chi(B^-1 L)
    return (
        mixed
        * PolyGaussian.fock(n1).embed(8, (2, 3))
        * PolyGaussian.fock(n2).embed(8, (6, 7))
    )


def build_ng_state(seed: GaussianState, spec: OperationSpec, seed_info=None) -> NGState:
    """Run the heralded scheme on a zero-mean two-mode Gaussian seed.

    Raises MeasureZeroOutcomeError when the requested detection pattern has
    probability below the floor (e.g. photon subtraction from vacuum).
    """
    if seed.n_modes != 2:
        raise ValueError("seed must be a two-mode state")
    if np.max(np.abs(seed.mean)) > 1e-12:
        raise ValueError("seed must be zero-mean")
    if not is_physical(seed):
        raise ValueError("seed state is unphysical")

    # variable slots: A1 -> (0,1), F1 -> (2,3), A2 -> (4,5), F2 -> (6,7)
    block = _ancilla_block(spec.m1, spec.n1, spec.m2, spec.n2, spec.transmissivity)
    seed_chi = PolyGaussian.from_gaussian(seed).embed(8, (0, 1, 4, 5))
    mix = _mix_matrix(spec.transmissivity)
    seed_kernel = mix @ seed_chi.kernel @ mix.T  # congruence by B^-T = B
    detected = PolyGaussian(seed_kernel + block.kernel, block.phase, block.poly)
    reduced = detected.integrate_out((2, 3, 6, 7))

    raw = reduced.value_at_origin()
    if abs(raw.imag) > 1e-10 * max(1.0, abs(raw)):
        raise ValueError("heralding probability came out non-real: %r" % raw)
    p = raw.real
    if p < P_SUCCESS_FLOOR:
        raise MeasureZeroOutcomeError(
            "detection pattern %s has probability %.3e" % (spec.label(), p)
        )

    chi = reduced.scale(1.0 / raw)
    poly = dict(chi.poly)
    poly[(0,) * 4] = 1.0  # exact normalisation at the origin
    chi = PolyGaussian(chi.kernel, chi.phase, poly)
    return NGState(chi=chi, p_success=p, spec=spec, seed=seed_info)

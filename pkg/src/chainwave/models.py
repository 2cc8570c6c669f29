"""Lattice models: non-reciprocal chain and non-reciprocal dimerized chain.

The single-band chain with asymmetric hoppings is

    H = sum_n  t_l |n><n+1|  +  t_r |n+1><n|        (n = 1..N)

with real t_l, t_r of equal sign.  The dimerized two-band chain is

    H = sum_n (t1 - g/2)|n,A><n,B| + (t1 + g/2)|n,B><n,A|
        + t2 (|n,B><n+1,A| + h.c.)

with real couplings and |g/2| < |t1|.  Both are similarity-equivalent to
Hermitian chains (see `chainwave.transform`).  Diagonal disorder draws w_n
uniform on [-w, w] from a seeded, platform-independent stream.

Sites are 1-indexed throughout the public API; the dimerized chain is stored
in the interleaved order (1,A), (1,B), (2,A), (2,B), ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, InvalidParameterError, UnsupportedModelError
from .rng import symmetric_uniform

HATANO_NELSON = "hatano_nelson"
NH_SSH = "nh_ssh"


@dataclass(frozen=True)
class HnParams:
    t_l: float
    t_r: float


@dataclass(frozen=True)
class SshParams:
    t1: float
    t2: float
    gamma: float


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform on-site disorder: amplitude w >= 0, 64-bit seed."""

    w: float
    seed: int = 0

    def __post_init__(self):
        if self.w < 0:
            raise InvalidParameterError("disorder amplitude w must be >= 0")
        if not (0 <= self.seed < 2 ** 64):
            raise InvalidParameterError("seed must fit in 64 bits")


@dataclass(frozen=True)
class ModelSpec:
    """Model parameters.  ``n`` counts sites (chain) or unit cells (dimer)."""

    variant: str
    n: int
    a: float = 1.0
    boundary: str = "obc"
    hn: Optional[HnParams] = None
    ssh: Optional[SshParams] = None
    disorder: Optional[DisorderSpec] = None

    def __post_init__(self):
        if self.variant not in (HATANO_NELSON, NH_SSH):
            raise InvalidParameterError(f"unknown variant {self.variant!r}")
        if self.boundary not in ("obc", "pbc"):
            raise InvalidParameterError(f"unknown boundary {self.boundary!r}")
        if self.n < 2:
            raise DimensionError("n must be >= 2")
        if self.a <= 0:
            raise InvalidParameterError("lattice spacing a must be > 0")
        if self.variant == HATANO_NELSON:
            if self.hn is None:
                raise InvalidParameterError("chain variant requires hn params")
            if self.hn.t_l * self.hn.t_r <= 0:
                raise InvalidParameterError(
                    "t_l and t_r must be nonzero and share the same sign"
                )
        else:
            if self.ssh is None:
                raise InvalidParameterError("dimer variant requires ssh params")
            if abs(self.ssh.gamma / 2.0) >= abs(self.ssh.t1):
                raise InvalidParameterError(
                    "|gamma/2| must be < |t1| so the transform ratio is real"
                )

    @property
    def dim(self) -> int:
        return self.n if self.variant == HATANO_NELSON else 2 * self.n

    @property
    def is_clean(self) -> bool:
        return self.disorder is None or self.disorder.w == 0.0

    @property
    def t0(self) -> float:
        """Geometric mean hopping of the Hermitian counterpart (chain only)."""
        if self.variant != HATANO_NELSON:
            raise UnsupportedModelError("t0 is defined for the chain variant")
        return float(np.sqrt(self.hn.t_l * self.hn.t_r))

    @property
    def r(self) -> float:
        """Similarity-transform ratio: sqrt(t_r/t_l), or the dimer analogue."""
        if self.variant == HATANO_NELSON:
            return float(np.sqrt(self.hn.t_r / self.hn.t_l))
        s = self.ssh
        return float(np.sqrt((s.t1 + s.gamma / 2.0) / (s.t1 - s.gamma / 2.0)))


@dataclass(frozen=True)
class Hamiltonian:
    """Banded storage: main diagonal, first super/sub diagonals, pbc corners.

    Entries are binary64 and embed exactly into any working precision
    >= 53 bits; ``precision_bits`` records the arithmetic width downstream
    kernels should use.
    """

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    corner_first_last: Optional[float]  # H[1, dim]
    corner_last_first: Optional[float]  # H[dim, 1]
    precision_bits: int
    model: ModelSpec

    @property
    def dim(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        """Dense complex matrix; intended for small-n checks only."""
        h = np.zeros((self.dim, self.dim), dtype=complex)
        np.fill_diagonal(h, self.diag)
        idx = np.arange(self.dim - 1)
        h[idx, idx + 1] = self.upper
        h[idx + 1, idx] = self.lower
        if self.corner_first_last is not None:
            h[0, -1] = self.corner_first_last
            h[-1, 0] = self.corner_last_first
        return h

    def is_exactly_hermitian(self) -> bool:
        if not np.array_equal(self.upper, self.lower):
            return False
        if (self.corner_first_last is None) != (self.corner_last_first is None):
            return False
        if self.corner_first_last is not None:
            return self.corner_first_last == self.corner_last_first
        return True


@dataclass(frozen=True)
class SpectrumResult:
    energies: np.ndarray
    labels: np.ndarray
    basis: str
    model: ModelSpec = field(repr=False, default=None)


def disorder_realization(d: DisorderSpec, n: int) -> np.ndarray:
    """n on-site energies, uniform on [-w, w], deterministic per (seed, n)."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    if d.w == 0.0:
        return np.zeros(n)
    return symmetric_uniform(d.seed, n, d.w)


def build_hamiltonian(spec: ModelSpec, precision_bits: int = 53) -> Hamiltonian:
    """Realize the banded matrix of ``spec`` (disorder on the diagonal)."""
    if precision_bits < 53:
        raise InvalidParameterError("precision_bits must be >= 53")
    dim = spec.dim
    diag = np.zeros(dim)
    if spec.disorder is not None and spec.disorder.w > 0:
        diag = disorder_realization(spec.disorder, dim)
    if spec.variant == HATANO_NELSON:
        upper = np.full(dim - 1, spec.hn.t_l)
        lower = np.full(dim - 1, spec.hn.t_r)
        cfl = cln = None
        if spec.boundary == "pbc":
            # wrap terms t_l |N><1| and t_r |1><N|
            cfl, cln = spec.hn.t_r, spec.hn.t_l
    else:
        if spec.boundary == "pbc":
            raise UnsupportedModelError("dimer chain is built with obc only")
        t_ab = spec.ssh.t1 - spec.ssh.gamma / 2.0  # <A|H|B> within a cell
        t_ba = spec.ssh.t1 + spec.ssh.gamma / 2.0  # <B|H|A> within a cell
        upper = np.empty(dim - 1)
        lower = np.empty(dim - 1)
        upper[0::2] = t_ab
        lower[0::2] = t_ba
        upper[1::2] = spec.ssh.t2
        lower[1::2] = spec.ssh.t2
        cfl = cln = None
    return Hamiltonian(diag, upper, lower, cfl, cln, precision_bits, spec)


def pbc_spectrum(spec: ModelSpec) -> SpectrumResult:
    """Bloch energies E(k) = (t_l+t_r)cos(ka) + i(t_l-t_r)sin(ka) at
    k_m = (2 pi / a)(m / N)."""
    if spec.variant != HATANO_NELSON:
        raise UnsupportedModelError("pbc spectrum implemented for the chain only")
    if not spec.is_clean:
        raise UnsupportedModelError("pbc spectrum requires a clean model")
    t_l, t_r = spec.hn.t_l, spec.hn.t_r
    m = np.arange(spec.n)
    k = 2.0 * np.pi * m / (spec.n * spec.a)
    ka = k * spec.a
    energies = (t_l + t_r) * np.cos(ka) + 1j * (t_l - t_r) * np.sin(ka)
    return SpectrumResult(energies, k, "pbc-bloch", spec)


def obc_spectrum_hn(spec: ModelSpec) -> SpectrumResult:
    """Open-chain energies E_m = 2 sqrt(t_r t_l) cos(theta_m),
    theta_m = pi m / (N+1), m = 1..N.  All real."""
    if spec.variant != HATANO_NELSON:
        raise UnsupportedModelError("obc analytic spectrum is for the chain")
    if spec.boundary != "obc":
        raise UnsupportedModelError("requires obc boundary")
    if not spec.is_clean:
        raise UnsupportedModelError("obc analytic spectrum requires a clean model")
    m = np.arange(1, spec.n + 1)
    theta = np.pi * m / (spec.n + 1)
    energies = 2.0 * spec.t0 * np.cos(theta)
    return SpectrumResult(energies.astype(complex), theta, "obc-analytic", spec)


def obc_eigenvector(spec: ModelSpec, m: int, normalized: bool = True) -> np.ndarray:
    """Right eigenvector <n|psi^(m)> proportional to r^n sin(theta_m n)."""
    if not (1 <= m <= spec.n):
        raise InvalidParameterError("mode index out of range")
    n = np.arange(1, spec.n + 1)
    theta = np.pi * m / (spec.n + 1)
    v = spec.r ** n * np.sin(theta * n)
    if normalized:
        v = v / np.linalg.norm(v)
    return v

"""Diagonal similarity transforms that Hermitize the lattice models.

For the asymmetric chain, S = diag(r^n) with r = sqrt(t_r/t_l) turns H into a
uniform Hermitian chain with hopping sqrt(t_l t_r).  For the dimerized chain,
S = diag(1, r, r, r^2, ..., r^(N-1), r^(N-1), r^N) with
r = sqrt((t1+g/2)/(t1-g/2)) yields the Hermitian dimer with intra-cell hopping
sqrt((t1+g/2)(t1-g/2)).  Both identities hold entrywise, so H is
pseudo-Hermitian with eta = S S^dagger.

Diagonal entries are kept as logs alongside raw values: r^n underflows
binary64 near n ~ 700 for r ~ 0.3, and every amplitude comparison downstream
happens in log space.  eta is never materialized; residuals use the diagonal
structure directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np

from .errors import DimensionError, UnsupportedModelError
from .models import HATANO_NELSON, Hamiltonian, ModelSpec
from .precision import mp_bits

__all__ = [
    "SimilarityTransform",
    "make_transform",
    "hermitian_counterpart",
    "pseudo_hermiticity_residual",
]


@dataclass(frozen=True)
class SimilarityTransform:
    """Positive diagonal map; ``log_diag[i] = ln S_ii`` is always finite.

    ``exact_pattern`` marks transforms built by `make_transform`, whose ratio
    is the model's closed form and is re-derived at working precision by the
    kernels; hand-modified transforms (exact_pattern=False) are taken at the
    face value of their stored ``r``.
    """

    log_diag: np.ndarray
    r: float
    precision_bits: int
    model: ModelSpec
    exact_pattern: bool = True

    @property
    def dim(self) -> int:
        return len(self.log_diag)

    @property
    def diag(self) -> np.ndarray:
        """Raw diagonal values; may under/overflow binary64 for large n."""
        return np.exp(self.log_diag)

    def exact_log_diag(self):
        """ln S_ii as gmpy2 mpfr values at the transform's precision."""
        with mp_bits(self.precision_bits):
            lnr = _exact_lnr(self.model) if self.exact_pattern else gmpy2.log(gmpy2.mpfr(self.r))
            return [lnr * int(k) for k in self._diag_exponents()]

    def _diag_exponents(self) -> np.ndarray:
        """Integer exponents e_i with S_ii = r^{e_i}."""
        n = self.model.n
        if self.model.variant == HATANO_NELSON:
            return np.arange(1, n + 1)
        cells = np.arange(1, n + 1)
        e = np.empty(2 * n, dtype=np.int64)
        e[0::2] = cells - 1  # A sublattice
        e[1::2] = cells      # B sublattice
        return e


def _exact_lnr(spec: ModelSpec):
    """ln r at the current gmpy2 context precision."""
    if spec.variant == HATANO_NELSON:
        return gmpy2.log(gmpy2.sqrt(gmpy2.mpfr(spec.hn.t_r) / gmpy2.mpfr(spec.hn.t_l)))
    s = spec.ssh
    num = gmpy2.mpfr(s.t1) + gmpy2.mpfr(s.gamma) / 2
    den = gmpy2.mpfr(s.t1) - gmpy2.mpfr(s.gamma) / 2
    return gmpy2.log(gmpy2.sqrt(num / den))


def make_transform(spec: ModelSpec, precision_bits: int = 53) -> SimilarityTransform:
    """Transform for a clean open chain; disorder commutes with it anyway."""
    if spec.boundary != "obc":
        raise UnsupportedModelError("the transform Hermitizes the open chain only")
    r = spec.r
    lnr = float(np.log(r))
    if spec.variant == HATANO_NELSON:
        log_diag = np.arange(1, spec.n + 1) * lnr
    else:
        cells = np.arange(1, spec.n + 1)
        log_diag = np.empty(2 * spec.n)
        log_diag[0::2] = (cells - 1) * lnr
        log_diag[1::2] = cells * lnr
    return SimilarityTransform(log_diag, r, precision_bits, spec)


def hermitian_counterpart(h: Hamiltonian, s: SimilarityTransform) -> Hamiltonian:
    """H' = S^-1 H S, computed bandwise at the transform's precision.

    For the clean chain this is the uniform Hermitian chain with hopping
    sqrt(t_l t_r); entries are returned rounded to binary64 (they are exact
    to that width for the closed-form models).
    """
    if h.dim != s.dim:
        raise DimensionError("Hamiltonian and transform dimensions differ")
    if h.corner_first_last is not None:
        raise UnsupportedModelError("transform applies to open boundaries")
    with mp_bits(s.precision_bits):
        lnr = _exact_lnr(s.model) if s.exact_pattern else gmpy2.log(gmpy2.mpfr(s.r))
        e = s._diag_exponents()
        up = np.empty(h.dim - 1)
        lo = np.empty(h.dim - 1)
        for i in range(h.dim - 1):
            # H'_{i,i+1} = H_{i,i+1} * S_{i+1}/S_i,  H'_{i+1,i} symmetric
            ratio = gmpy2.exp(lnr * int(e[i + 1] - e[i]))
            up[i] = float(gmpy2.mpfr(h.upper[i]) * ratio)
            lo[i] = float(gmpy2.mpfr(h.lower[i]) / ratio)
    return Hamiltonian(
        h.diag.copy(), up, lo, None, None, h.precision_bits, h.model
    )


def pseudo_hermiticity_residual(h: Hamiltonian, s: SimilarityTransform) -> float:
    """max-norm of H^dagger - eta^-1 H eta with eta = S S^dagger (diagonal).

    Uses (eta^-1 H eta)_{ij} = H_{ij} S_j^2 / S_i^2 on the band; evaluated at
    the transform's precision so clean-model residuals reflect that width.
    """
    if h.dim != s.dim:
        raise DimensionError("Hamiltonian and transform dimensions differ")
    # guard bits: the defect of exact closed-form inputs must be evaluated
    # more accurately than the width it is judged against
    with mp_bits(s.precision_bits + 64):
        lnr = _exact_lnr(s.model) if s.exact_pattern else gmpy2.log(gmpy2.mpfr(s.r))
        e = s._diag_exponents()
        worst = gmpy2.mpfr(0)
        for i in range(h.dim - 1):
            ratio2 = gmpy2.exp(2 * lnr * int(e[i + 1] - e[i]))
            # (i, i+1) entry: H^dag gives conj(H[i+1, i]) = lower[i] (real)
            d1 = abs(gmpy2.mpfr(h.lower[i]) - gmpy2.mpfr(h.upper[i]) * ratio2)
            # (i+1, i) entry
            d2 = abs(gmpy2.mpfr(h.upper[i]) - gmpy2.mpfr(h.lower[i]) / ratio2)
            worst = max(worst, d1, d2)
        # diagonal: real on-site terms are eta-invariant, residual 0 exactly
        return float(worst)

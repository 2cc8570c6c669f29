"""State vectors and initial conditions.

Amplitudes live either in a numpy complex128 array (53-bit runs) or in a list
of gmpy2 mpc values (wider mantissas).  A global ``log_scale`` offset makes
the physical amplitude ``values[i] * exp(log_scale)``; the 53-bit kernels
renormalize through it so exponential growth never overflows, while the
gmpy2 backend leaves it at zero (MPFR's exponent range is effectively
unbounded here).

The Gaussian initial condition is

    psi_n = (4 pi sigma^2)^(-1/2) exp(-a^2 (n-n0)^2 / (4 sigma^2)) e^(-i k0 a n)

which is deliberately not L2-normalized.  The carrier sign makes a packet
with k0 > 0 move toward larger site indices, so every closed-form prediction
downstream can be used with positive momenta unchanged (only the sign of the
stored complex phases depends on this gauge choice).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import gmpy2
import numpy as np

from .errors import DimensionError, InvalidParameterError
from .precision import LOG10_E, mp_bits, mpc_log10_abs2, mpc_phase

Values = Union[np.ndarray, list]


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian packet parameters: center site, width, carrier momentum."""

    n0: float
    sigma: float
    k0: float = 0.0
    a: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise InvalidParameterError("sigma must be > 0")
        if abs(self.k0 * self.a) > np.pi + 1e-12:
            raise InvalidParameterError("|k0 * a| must be <= pi")
        if self.a <= 0:
            raise InvalidParameterError("a must be > 0")


@dataclass
class StateVector:
    """Complex amplitudes at one instant, at a declared precision."""

    values: Values
    precision_bits: int
    time_tag: float = 0.0
    log_scale: float = 0.0
    _log10: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def backend(self) -> str:
        return "numpy" if isinstance(self.values, np.ndarray) else "gmpy2"

    def log10_abs2(self) -> np.ndarray:
        """Per-site log10 |psi_n|^2, including the global scale offset."""
        if self._log10 is not None:
            return self._log10
        if self.backend == "numpy":
            mag = np.abs(self.values)
            with np.errstate(divide="ignore"):
                out = 2.0 * np.log10(mag) + 2.0 * self.log_scale * LOG10_E
        else:
            out = np.array([mpc_log10_abs2(z) for z in self.values])
            out += 2.0 * self.log_scale * LOG10_E
        self._log10 = out
        return out

    def phases(self) -> np.ndarray:
        """Unit-modulus phases psi_n/|psi_n| (nan where the amplitude is 0)."""
        if self.backend == "numpy":
            mag = np.abs(self.values)
            with np.errstate(invalid="ignore", divide="ignore", over="ignore", under="ignore"):
                out = np.where(mag > 0, self.values / np.where(mag > 0, mag, 1.0), complex("nan"))
            return out
        return np.array([mpc_phase(z) for z in self.values])

    def to_complex128(self) -> np.ndarray:
        """Amplitudes as binary64 complex; overflows become inf."""
        if self.backend == "numpy":
            return self.values * np.exp(self.log_scale)
        with np.errstate(over="ignore"):
            return np.array([complex(z) for z in self.values]) * np.exp(self.log_scale)

    def l2_log10(self) -> float:
        """log10 of the squared L2 norm."""
        rows = self.log10_abs2()
        m = rows.max()
        if not np.isfinite(m):
            return float("-inf")
        return float(m + np.log10(np.sum(10.0 ** (rows - m))))

    def copy(self) -> "StateVector":
        vals = self.values.copy() if self.backend == "numpy" else list(self.values)
        return StateVector(vals, self.precision_bits, self.time_tag, self.log_scale)


def delta_state(n0: int, n: int, precision_bits: int = 53) -> StateVector:
    """Unit amplitude at site n0 (1-indexed), zero elsewhere."""
    if not (1 <= n0 <= n):
        raise DimensionError(f"n0={n0} outside 1..{n}")
    if precision_bits <= 53:
        v = np.zeros(n, dtype=complex)
        v[n0 - 1] = 1.0
        return StateVector(v, 53)
    with mp_bits(precision_bits):
        v = [gmpy2.mpc(0)] * n
        v[n0 - 1] = gmpy2.mpc(1)
    return StateVector(v, precision_bits)


def gaussian_state(p: GaussianPacket, n: int, precision_bits: int = 53) -> StateVector:
    """Gaussian amplitudes on sites 1..n at the requested precision."""
    if n < 2:
        raise DimensionError("n must be >= 2")
    if precision_bits <= 53:
        idx = np.arange(1, n + 1, dtype=float)
        pref = (4.0 * np.pi * p.sigma ** 2) ** -0.5
        env = np.exp(-(p.a ** 2) * (idx - p.n0) ** 2 / (4.0 * p.sigma ** 2))
        v = pref * env * np.exp(-1j * p.k0 * p.a * idx)
        return StateVector(v.astype(complex), 53)
    with mp_bits(precision_bits):
        pi = gmpy2.const_pi()
        sig2 = gmpy2.mpfr(p.sigma) ** 2
        pref = 1 / gmpy2.sqrt(4 * pi * sig2)
        a = gmpy2.mpfr(p.a)
        k0 = gmpy2.mpfr(p.k0)
        n0 = gmpy2.mpfr(p.n0)
        vals = []
        for i in range(1, n + 1):
            env = gmpy2.exp(-(a * (i - n0)) ** 2 / (4 * sig2))
            ph = gmpy2.exp(gmpy2.mpc(0, -1) * (k0 * a * i))
            vals.append(pref * env * ph)
    return StateVector(vals, precision_bits)


def momentum_amplitude(state: StateVector, k: float, a: float = 1.0) -> complex:
    """c_k = N^(-1/2) sum_n e^{+i k a n} psi_n  (binary64 result).

    This is the projection onto the translation eigenmode that carries label
    k in the convention of `gaussian_state` (a packet built with carrier k0
    projects onto c_{k0}).
    """
    n = state.dim
    idx = np.arange(1, n + 1, dtype=float)
    row = np.exp(1j * k * a * idx) / np.sqrt(n)
    if state.backend == "numpy":
        return complex(row @ state.values * np.exp(state.log_scale))
    acc = gmpy2.mpc(0)
    for w, z in zip(row, state.values):
        acc += gmpy2.mpc(w) * z
    return complex(acc) * np.exp(state.log_scale)

"""Closed-form propagator of the uniform Hermitian chain.

On the infinite chain with hopping t0,

    <m| exp(-i H' t) |n> = (-i)^(m-n) J_{m-n}(2 t0 t),

with J the Bessel function of the first kind.  Callers apply the r^(m-n)
similarity weight for the non-reciprocal chain.  Evaluations use mpmath so
large orders far outside the light cone keep full relative accuracy.
"""

from __future__ import annotations

import mpmath as mp


def _dps_for(delta: int, x: float, extra: int = 25) -> int:
    """Working digits: enough to resolve the super-exponential tail."""
    if abs(delta) <= x:
        return 25 + extra
    nu = abs(delta)
    z = nu / max(x, 1e-300)
    tail_decades = nu * (mp.acosh(z) - mp.sqrt(1 - z ** -2)) / mp.log(10)
    return int(tail_decades) + 25 + extra


def bessel_propagator(delta_site: int, t0: float, t: float) -> complex:
    """(-i)^Delta J_Delta(2 t0 t) as a binary64 complex.

    Underflows to 0 beyond ~300 decades; use `bessel_propagator_log10`
    in the deep tail.
    """
    val, l10 = _eval(delta_site, t0, t)
    return val


def bessel_propagator_log10(delta_site: int, t0: float, t: float) -> float:
    """log10 |<m|exp(-iH't)|n>|; -inf at exact zeros."""
    _, l10 = _eval(delta_site, t0, t)
    return l10


def _eval(delta_site: int, t0: float, t: float):
    x = 2.0 * abs(t0) * t
    d = int(delta_site)
    with mp.workdps(_dps_for(d, x)):
        j = mp.besselj(abs(d), x)
        # J_{-n}(x) = (-1)^n J_n(x)
        if d < 0 and d % 2 != 0:
            j = -j
        phase = (-1j) ** (d % 4)
        val = mp.mpc(phase) * j
        l10 = float(mp.log10(abs(val))) if val != 0 else float("-inf")
        return complex(val), l10


def unitarity_sum(t0: float, t: float, margin: int = 40) -> float:
    """sum_Delta |J_Delta(2 t0 t)|^2 over a window wide enough to converge;
    equals 1 for the unitary Hermitian propagator."""
    x = 2.0 * abs(t0) * t
    kmax = int(x) + margin
    with mp.workdps(30):
        total = mp.besselj(0, x) ** 2
        for k in range(1, kmax + 1):
            total += 2 * mp.besselj(k, x) ** 2
        return float(total)

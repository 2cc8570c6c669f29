"""Arbitrary-precision arithmetic helpers built on gmpy2 (MPFR/MPC).

All high-precision kernels run inside ``mp_bits(bits)`` so the context is
explicit and restored afterwards.  MPFR operations are correctly rounded,
which makes every run bit-reproducible across platforms.
"""

from __future__ import annotations

from contextlib import contextmanager

import gmpy2
import numpy as np

LOG10_E = float(np.log10(np.e))


@contextmanager
def mp_bits(bits: int):
    """Temporarily set the gmpy2 context to ``bits`` of mantissa."""
    saved = gmpy2.get_context()
    gmpy2.set_context(gmpy2.context(precision=int(bits)))
    try:
        yield
    finally:
        gmpy2.set_context(saved)


def to_mpc_vector(values) -> list:
    """Lift a complex iterable to gmpy2 mpc at the current context."""
    return [gmpy2.mpc(complex(v)) for v in values]


def mpc_log10_abs2(z) -> float:
    """log10 |z|^2 as a float; -inf for exact zero."""
    if z == 0:
        return float("-inf")
    return 2.0 * float(gmpy2.log10(abs(z)))


def mpc_phase(z) -> complex:
    """Unit-modulus phase z/|z| as a binary64 complex; nan for zero."""
    if z == 0:
        return complex(float("nan"), float("nan"))
    m = abs(z)
    return complex(float(z.real / m), float(z.imag / m))

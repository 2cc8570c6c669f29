"""Evolution kernels: scaled-Taylor stepper and spectral propagators.

Two independent routes compute exp(-i H t) psi:

* ``taylor_evolve`` - a precision-agnostic stepper.  Each step sums the
  Taylor series of exp(-i h H) with a banded matrix-vector kernel until terms
  fall below the working epsilon, then verifies the step by comparing one
  full step against two half steps in an entrywise relative metric (with a
  deep floor so tail sites are controlled too).  Steps halve on failure and
  grow after comfortable successes.

* ``sine_spectral_evolve`` - exact diagonalization of the Hermitized open
  chain in its closed-form sine eigenbasis, evaluated term by term at the
  working precision; amplitudes are mapped back through the diagonal
  transform.  ``tridiag_spectral_evolve`` does the same for the dimerized
  chain via a real symmetric tridiagonal eigensolver.

The 53-bit code paths use numpy; wider mantissas use gmpy2 lists.  The
stepper renormalizes by the max magnitude (adding to the state's global
``log_scale``) so binary64 runs survive exponential growth.
"""

from __future__ import annotations

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import BackendUnsupportedError, PrecisionError
from .models import HATANO_NELSON, Hamiltonian, ModelSpec
from .precision import mp_bits
from .states import StateVector
from .transform import make_transform

# entries more than this many decades below the vector max are compared
# against the floor rather than relatively (they carry no controlled digits)
REL_FLOOR_DECADES = 250.0


# ---------------------------------------------------------------- numpy path

def _np_matvec(h: Hamiltonian, x: np.ndarray) -> np.ndarray:
    y = h.diag * x
    y[:-1] += h.upper * x[1:]
    y[1:] += h.lower * x[:-1]
    if h.corner_first_last is not None:
        y[0] += h.corner_first_last * x[-1]
        y[-1] += h.corner_last_first * x[0]
    return y


def _np_taylor_step(h: Hamiltonian, x: np.ndarray, dt: float, term_eps: float):
    acc = x.copy()
    term = x
    coef = -1j * dt
    small = 0
    for k in range(1, 1000):
        term = (coef / k) * _np_matvec(h, term)
        acc = acc + term
        tmax = np.abs(term).max()
        amax = np.abs(acc).max()
        if tmax <= term_eps * amax:
            small += 1
            if small >= 2:
                return acc
        else:
            small = 0
    raise PrecisionError("Taylor series did not converge; reduce max_step")


def _np_rel_err(a: np.ndarray, b: np.ndarray, term_eps: float) -> float:
    """Entrywise relative disagreement with a floor.

    The floor sits above the Taylor truncation resolution: sites at the
    series' reach frontier differ between one full and two half steps by
    their (tiny) leading terms, which says nothing about step accuracy.
    Deep-tail fidelity is certified by cross-backend validation instead.
    """
    mb = np.abs(b)
    frac = max(10.0 ** (-REL_FLOOR_DECADES), term_eps * 1e4)
    floor = mb.max() * frac
    denom = np.maximum(mb, floor if floor > 0 else np.finfo(float).tiny)
    return float((np.abs(a - b) / denom).max())


# ---------------------------------------------------------------- gmpy2 path

def _mp_bands(h: Hamiltonian):
    diag = [mpfr(v) for v in h.diag]
    up = [mpfr(v) for v in h.upper]
    lo = [mpfr(v) for v in h.lower]
    corners = None
    if h.corner_first_last is not None:
        corners = (mpfr(h.corner_first_last), mpfr(h.corner_last_first))
    return diag, up, lo, corners


def _mp_matvec(bands, x: list) -> list:
    diag, up, lo, corners = bands
    n = len(x)
    y = [None] * n
    for i in range(n):
        acc = diag[i] * x[i]
        if i < n - 1:
            acc = acc + up[i] * x[i + 1]
        if i > 0:
            acc = acc + lo[i - 1] * x[i - 1]
        y[i] = acc
    if corners is not None:
        y[0] = y[0] + corners[0] * x[-1]
        y[-1] = y[-1] + corners[1] * x[0]
    return y


def _mp_taylor_step(bands, x: list, dt, term_eps):
    n = len(x)
    acc = list(x)
    term = x
    coef = mpc(0, -1) * dt
    small = 0
    for k in range(1, 2000):
        term = _mp_matvec(bands, term)
        f = coef / k
        term = [t * f for t in term]
        for i in range(n):
            acc[i] = acc[i] + term[i]
        tmax = max(map(abs, term))
        amax = max(map(abs, acc))
        if tmax <= term_eps * amax:
            small += 1
            if small >= 2:
                return acc
        else:
            small = 0
    raise PrecisionError("Taylor series did not converge; reduce max_step")


def _mp_rel_err(a: list, b: list, term_eps) -> float:
    mb = [abs(z) for z in b]
    mmax = max(mb)
    floor = mmax * max(mpfr(10) ** int(-REL_FLOOR_DECADES), mpfr(term_eps) * 10000)
    worst = mpfr(0)
    for x, m, y in zip(a, mb, b):
        d = abs(x - y) / (m if m > floor else floor)
        if d > worst:
            worst = d
    return float(worst)


# -------------------------------------------------------------- the stepper

def taylor_evolve(
    h: Hamiltonian,
    psi0: StateVector,
    times,
    tolerance: float,
    max_step: float = 1.0,
    renorm_ceiling: float = 1e120,
) -> list[StateVector]:
    """Snapshots of exp(-i H t) psi0 at the sorted ``times``.

    Local error per accepted step is bounded by ``tolerance`` in the
    entrywise relative metric via step doubling (the half-step result is the
    one kept).  Raises PrecisionError when the needed step underflows, which
    signals that ``tolerance`` is unreachable at this mantissa width.
    """
    bits = max(h.precision_bits, psi0.precision_bits)
    numpy_path = bits <= 53
    # keep steps comfortably inside the series' fast-convergence regime
    hnorm = float(np.abs(h.diag).max() + np.abs(h.upper).max() + np.abs(h.lower).max())
    h_cap = min(max_step, 1.5 / max(hnorm, 1e-30))
    out: list[StateVector] = []

    if numpy_path:
        x = np.array(psi0.values, dtype=complex)
        lsc = float(psi0.log_scale)
        term_eps = 2.0 ** -49
        t = 0.0
        dt = h_cap
        for target in times:
            while t < target - 1e-12:
                dt = min(dt, target - t, h_cap)
                if dt < 1e-13 * max(target, 1.0):
                    raise PrecisionError(
                        "step size underflow: tolerance unreachable at "
                        f"{bits} bits",
                        suggested_bits=suggest_bits(tolerance),
                    )
                full = _np_taylor_step(h, x, dt, term_eps)
                half = _np_taylor_step(h, x, dt / 2.0, term_eps)
                half = _np_taylor_step(h, half, dt / 2.0, term_eps)
                err = _np_rel_err(full, half, term_eps)
                if err <= tolerance:
                    x = half
                    t += dt
                    if err <= tolerance / 100.0:
                        dt = min(dt * 2.0, h_cap)
                    m = np.abs(x).max()
                    if m > renorm_ceiling or (0 < m < 1.0 / renorm_ceiling):
                        # scale by a power of two: exact in binary fp
                        p = int(np.floor(np.log2(m)))
                        x = x * 2.0 ** (-p)
                        lsc += p * float(np.log(2.0))
                else:
                    dt /= 2.0
            sv = StateVector(x.copy(), 53, float(target), lsc)
            out.append(sv)
        return out

    with mp_bits(bits):
        bands = _mp_bands(h)
        x = [mpc(complex(v)) for v in psi0.values] if psi0.backend == "numpy" else list(psi0.values)
        if psi0.log_scale:
            s = gmpy2.exp(mpfr(psi0.log_scale))
            x = [z * s for z in x]
        term_eps = mpfr(2) ** (-bits + 6)
        t = mpfr(0)
        dt = mpfr(h_cap)
        for target in times:
            tgt = mpfr(float(target))
            while t < tgt - mpfr(1e-12):
                dt = min(dt, tgt - t, mpfr(h_cap))
                if dt < mpfr(1e-13) * max(tgt, mpfr(1)):
                    raise PrecisionError(
                        "step size underflow: tolerance unreachable at "
                        f"{bits} bits",
                        suggested_bits=suggest_bits(tolerance),
                    )
                full = _mp_taylor_step(bands, x, dt, term_eps)
                half = _mp_taylor_step(bands, x, dt / 2, term_eps)
                half = _mp_taylor_step(bands, half, dt / 2, term_eps)
                err = _mp_rel_err(full, half, term_eps)
                if err <= tolerance:
                    x = half
                    t = t + dt
                    if err <= tolerance / 100.0:
                        dt = min(dt * 2, mpfr(h_cap))
                else:
                    dt = dt / 2
            out.append(StateVector(list(x), bits, float(target), 0.0))
        return out


def suggest_bits(tolerance: float) -> int:
    """Smallest standard mantissa width with epsilon below tolerance/10^6."""
    need = int(np.ceil(-np.log2(tolerance))) + 20
    for b in (53, 106, 159, 212, 318, 424):
        if b >= need:
            return b
    return need


# ------------------------------------------------------- spectral propagator

def sine_spectral_evolve(
    spec: ModelSpec,
    psi0: StateVector,
    times,
    bits: int,
) -> list[StateVector]:
    """Clean open chain via S e^{-i H' t} S^-1 in the sine eigenbasis.

    H' is the uniform Hermitian chain: eigenvectors
    u_m(n) = sqrt(2/(N+1)) sin(pi m n/(N+1)), eigenvalues
    2 sqrt(t_l t_r) cos(pi m/(N+1)).  Exact up to rounding at ``bits``.
    """
    if spec.variant != HATANO_NELSON:
        raise BackendUnsupportedError("sine basis applies to the chain variant")
    if not spec.is_clean or spec.boundary != "obc":
        raise BackendUnsupportedError("spectral transform needs a clean open chain")
    n = spec.n
    if bits <= 53:
        from scipy.fft import dst

        idx = np.arange(1, n + 1)
        lam = 2.0 * spec.t0 * np.cos(np.pi * idx / (n + 1))
        logr = np.log(spec.r)
        vals = np.array(psi0.values, dtype=complex) * np.exp(psi0.log_scale)
        phi0 = vals * np.exp(-idx * logr)
        c = dst(phi0, type=1, norm="ortho")
        out = []
        rpow = np.exp(idx * logr)
        for t in times:
            if float(t) == 0.0:
                out.append(StateVector(vals.copy(), 53, 0.0))
                continue
            phi = dst(c * np.exp(-1j * lam * float(t)), type=1, norm="ortho")
            out.append(StateVector(phi * rpow, 53, float(t)))
        return out

    with mp_bits(bits):
        pi = gmpy2.const_pi()
        t0 = gmpy2.sqrt(mpfr(spec.hn.t_l) * mpfr(spec.hn.t_r))
        lnr = gmpy2.log(gmpy2.sqrt(mpfr(spec.hn.t_r) / mpfr(spec.hn.t_l)))
        m_div = n + 1
        # sin(pi j/(N+1)) for j = 0..N+1; extend by antiperiodicity
        stab = [gmpy2.sin(pi * j / m_div) for j in range(m_div + 1)]

        def sine(j: int):
            j = j % (2 * m_div)
            return stab[j] if j <= m_div else -stab[2 * m_div - j]

        norm = gmpy2.sqrt(mpfr(2) / m_div)
        lam = [2 * t0 * gmpy2.cos(pi * m / m_div) for m in range(1, n + 1)]
        if psi0.backend == "numpy":
            src = [mpc(complex(v)) for v in psi0.values]
        else:
            src = list(psi0.values)
        if psi0.log_scale:
            s = gmpy2.exp(mpfr(psi0.log_scale))
            src = [z * s for z in src]
        phi0 = [src[i - 1] * gmpy2.exp(-i * lnr) for i in range(1, n + 1)]
        coeff = []
        for m in range(1, n + 1):
            acc = mpc(0)
            for i in range(1, n + 1):
                acc += sine(m * i) * phi0[i - 1]
            coeff.append(acc * norm)
        rpow = [gmpy2.exp(i * lnr) for i in range(1, n + 1)]
        out = []
        for t in times:
            if float(t) == 0.0:
                out.append(StateVector(list(src), bits, 0.0))
                continue
            tt = mpfr(float(t))
            ph = [gmpy2.exp(mpc(0, -1) * (lam[m] * tt)) * coeff[m] for m in range(n)]
            vals = []
            for i in range(1, n + 1):
                acc = mpc(0)
                for m in range(1, n + 1):
                    acc += sine(m * i) * ph[m - 1]
                vals.append(acc * norm * rpow[i - 1])
            out.append(StateVector(vals, bits, float(t)))
        return out


_TRIDIAG_MP_LIMIT = 240  # mpmath eigsy is O(dim^3) pure Python


def tridiag_spectral_evolve(
    spec: ModelSpec,
    psi0: StateVector,
    times,
    bits: int,
) -> list[StateVector]:
    """Clean open dimerized chain via its Hermitian counterpart's
    eigendecomposition (real symmetric tridiagonal)."""
    if spec.variant == HATANO_NELSON:
        return sine_spectral_evolve(spec, psi0, times, bits)
    if not spec.is_clean or spec.boundary != "obc":
        raise BackendUnsupportedError("spectral transform needs a clean open chain")
    s = make_transform(spec, bits)
    dim = spec.dim
    tt1 = float(np.sqrt((spec.ssh.t1 + spec.ssh.gamma / 2) * (spec.ssh.t1 - spec.ssh.gamma / 2)))
    offd = np.empty(dim - 1)
    offd[0::2] = tt1
    offd[1::2] = spec.ssh.t2

    if bits <= 53:
        from scipy.linalg import eigh_tridiagonal

        lam, vecs = eigh_tridiagonal(np.zeros(dim), offd)
        vals = np.array(psi0.values, dtype=complex) * np.exp(psi0.log_scale)
        phi0 = vals * np.exp(-s.log_diag)
        c = vecs.T @ phi0
        rw = np.exp(s.log_diag)
        out = []
        for t in times:
            if float(t) == 0.0:
                out.append(StateVector(vals.copy(), 53, 0.0))
                continue
            phi = vecs @ (c * np.exp(-1j * lam * float(t)))
            out.append(StateVector(phi * rw, 53, float(t)))
        return out

    if dim > _TRIDIAG_MP_LIMIT:
        raise BackendUnsupportedError(
            f"high-precision dimer spectral evolution is limited to "
            f"dim <= {_TRIDIAG_MP_LIMIT} (got {dim}); use the stepper"
        )
    import mpmath as mp

    dps = int(bits * 0.3010) + 10
    with mp.workdps(dps):
        a = mp.matrix(dim, dim)
        for i in range(dim - 1):
            a[i, i + 1] = mp.mpf(offd[i])
            a[i + 1, i] = mp.mpf(offd[i])
        evals, q = mp.eigsy(a)
        ldiag = s.exact_log_diag()
        with mp_bits(bits):
            if psi0.backend == "numpy":
                src = [mpc(complex(v)) for v in psi0.values]
            else:
                src = list(psi0.values)
            if psi0.log_scale:
                sc = gmpy2.exp(mpfr(psi0.log_scale))
                src = [z * sc for z in src]
            phi0 = [src[i] * gmpy2.exp(-ldiag[i]) for i in range(dim)]
            umat = [[mpfr(str(q[i, m])) for m in range(dim)] for i in range(dim)]
            lam = [mpfr(str(evals[m])) for m in range(dim)]
            coeff = []
            for m in range(dim):
                acc = mpc(0)
                for i in range(dim):
                    acc += umat[i][m] * phi0[i]
                coeff.append(acc)
            rw = [gmpy2.exp(v) for v in ldiag]
            out = []
            for t in times:
                if float(t) == 0.0:
                    out.append(StateVector(list(src), bits, 0.0))
                    continue
                ttv = mpfr(float(t))
                ph = [gmpy2.exp(mpc(0, -1) * (lam[m] * ttv)) * coeff[m] for m in range(dim)]
                vals = []
                for i in range(dim):
                    acc = mpc(0)
                    for m in range(dim):
                        acc += umat[i][m] * ph[m]
                    vals.append(acc * rw[i])
                out.append(StateVector(vals, bits, float(t)))
            return out

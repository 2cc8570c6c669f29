"""Closed-form predictions for the non-reciprocal chain and dimer.

Everything here is plain binary64 arithmetic in log space; formulas are exact
transcriptions of the model's asymptotics:

* velocities: v_h = 2 a sqrt(t_r t_l) (max Hermitian group speed),
  v_nh = -a (t_r + t_l) (drift of the maximally amplified momentum).
* transformed Gaussian: S^-1 maps a width-sigma Gaussian at n0 to one at
  ntilde0 = n0 - (2 sigma^2 / a^2) ln r with prefactor
  C = exp(sigma^2/a^2 ln^2 r - n0 ln r).
* saddle-point forms of the Hermitian packet inside and outside the light
  cone; peak expansion m_max ~ ntilde0 + A t + B t^2 + C3 t^3.
* continuum limit (effective mass m, drift b), wall-reflection times, the
  disorder saturation/growth bundle, localization length, edge timestamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidParameterError, NoRootError, UnsupportedModelError
from .models import HATANO_NELSON, ModelSpec
from .states import GaussianPacket

TWO_THIRDS_AIRY = 1.018792971647471  # first zero of Ai'(-s)
FIRST_MAX_SHIFT = TWO_THIRDS_AIRY / 2.0 ** (1.0 / 3.0)  # J_nu first max offset


# ------------------------------------------------------------ basic bundles

@dataclass(frozen=True)
class VelocityPair:
    v_h: float
    v_nh: float


@dataclass(frozen=True)
class TransformedGaussian:
    log_c: float
    n0_shifted: float


@dataclass(frozen=True)
class ContinuumParams:
    e0: float
    mass: float
    drift: float
    a0: float
    t_l0: float
    t_r0: float


@dataclass(frozen=True)
class ReflectionPrediction:
    t_hit_continuum: float
    t_hit_lattice: float
    t_delta: float
    coeff_a: float
    coeff_b: float
    coeff_c: float
    t_transition_cubic: Optional[float]
    wall_distance: float


@dataclass(frozen=True)
class DisorderPrediction:
    v_s: float                # appendix convention (factor 4)
    v_s_main_text: float      # without the factor 4
    t_s: float
    growth_rate: float
    t_transition: float       # inf when the quadratic has no real root


def _require_chain(spec: ModelSpec):
    if spec.variant != HATANO_NELSON:
        raise UnsupportedModelError("this prediction applies to the chain variant")


def velocities(spec: ModelSpec) -> VelocityPair:
    _require_chain(spec)
    t_l, t_r, a = spec.hn.t_l, spec.hn.t_r, spec.a
    return VelocityPair(v_h=2.0 * a * math.sqrt(t_r * t_l), v_nh=-a * (t_r + t_l))


def ssh_hermitian_velocity(spec: ModelSpec) -> float:
    """2 a min(teff1, t2) with teff1 = sqrt((t1+g/2)(t1-g/2)); a is the
    inter-site spacing of the dimerized chain."""
    if spec.variant == HATANO_NELSON:
        raise UnsupportedModelError("dimer formula requested for the chain")
    s = spec.ssh
    rad = (s.t1 + s.gamma / 2.0) * (s.t1 - s.gamma / 2.0)
    if rad <= 0:
        raise InvalidParameterError("gap condition |gamma/2| < |t1| violated")
    teff1 = math.sqrt(rad)
    return 2.0 * spec.a * min(teff1, abs(s.t2))


def ssh_edge_period(spec: ModelSpec) -> float:
    """Round-trip time 2 L / v_h of the Hermitian dimer wavefront, with
    L = 2 N a the chain length in site units."""
    v = ssh_hermitian_velocity(spec)
    return 2.0 * (2.0 * spec.n * spec.a) / v


def transformed_gaussian(p: GaussianPacket, r: float) -> TransformedGaussian:
    if r <= 0:
        raise InvalidParameterError("r must be > 0")
    lnr = math.log(r)
    s2a2 = (p.sigma / p.a) ** 2
    return TransformedGaussian(
        log_c=s2a2 * lnr ** 2 - p.n0 * lnr,
        n0_shifted=p.n0 - 2.0 * s2a2 * lnr,
    )


# -------------------------------------------------- saddle-point amplitudes

def _prefactor_nq(p: GaussianPacket) -> float:
    """N_q of the stationary-phase forms for the package's (4 pi sigma^2)^-1/2
    packet normalization."""
    pref = (4.0 * math.pi * p.sigma ** 2) ** -0.5
    return math.sqrt(4.0 * math.pi * (p.sigma / p.a) ** 2) * pref / (2.0 * math.pi)


def saddle_point_amplitude(
    p: GaussianPacket, spec: ModelSpec, m: float, t: float
) -> tuple[complex, str]:
    """Hermitian-chain amplitude <m|exp(-iH't)|packet> by stationary phase.

    Returns (value, branch) with branch one of "inside", "outside",
    "cone-edge".  Within a band of 2 sites around |a(m-n0)| = t v_h both
    asymptotics fail; there the larger magnitude is returned with the
    "cone-edge" flag.  Complex value (phase included) inside the cone.
    """
    _require_chain(spec)
    t0 = spec.t0
    if t < 1.0 / t0:
        raise DomainError("stationary phase requires t >= 1/sqrt(t_l t_r)")
    vmax = 2.0 * spec.a * t0
    x = (m - p.n0) * spec.a
    cone = t * vmax
    band = 2.0 * spec.a
    if abs(abs(x) - cone) < band:
        s = 1.0 if x >= 0 else -1.0
        inside = _saddle_inside(p, vmax, s * min(abs(x), cone - band), t)
        outside = _saddle_outside_log(p, vmax, s * max(abs(x), cone + band), t)
        if math.log(abs(inside)) >= outside * math.log(10.0):
            return inside, "cone-edge"
        mag = 10.0 ** outside
        return complex(mag, 0.0), "cone-edge"
    if abs(x) < cone:
        return _saddle_inside(p, vmax, x, t), "inside"
    mag10 = _saddle_outside_log(p, vmax, x, t)
    return complex(10.0 ** mag10, 0.0), "outside"


def _saddle_inside(p: GaussianPacket, vmax: float, x: float, t: float) -> complex:
    u = x / (t * vmax)
    q = math.asin(u)
    cosq = math.sqrt(1.0 - u * u)
    nq = _prefactor_nq(p)
    s2a2 = (p.sigma / p.a) ** 2
    weight = math.exp(-s2a2 * (q - p.k0 * p.a) ** 2)
    amp = nq * math.sqrt(2.0 * math.pi / ((t * vmax / p.a) * cosq)) * weight
    # total phase: e^{i pi/4} e^{i (t vmax/a) A}, A = -(u q + cos q) in this gauge
    big_a = -(u * q + cosq)
    phase = math.pi / 4.0 + (t * vmax / p.a) * big_a
    return amp * complex(math.cos(phase), math.sin(phase))


def _saddle_outside_log(p: GaussianPacket, vmax: float, x: float, t: float) -> float:
    """log10 magnitude of the steepest-descent branch (|x| > t vmax)."""
    mbar = x / p.a
    big_t = t * vmax / p.a
    z = abs(mbar) / big_t
    s = 1.0 if mbar >= 0 else -1.0
    alpha = math.acosh(z)
    s2a2 = (p.sigma / p.a) ** 2
    q0 = p.k0 * p.a
    weight = -s2a2 * ((q0 - s * math.pi / 2.0) ** 2 - alpha ** 2)
    decay = -abs(mbar) * alpha + math.sqrt(mbar * mbar - big_t * big_t)
    nq = _prefactor_nq(p)
    ln10 = math.log(10.0)
    return (
        math.log(nq * math.sqrt(2.0 * math.pi)) + weight + decay
        - 0.25 * math.log(mbar * mbar - big_t * big_t)
    ) / ln10


def nh_gaussian_approximation(
    p: GaussianPacket, spec: ModelSpec, m: float, t: float
) -> float:
    """log10 |<m|exp(-iHt)|packet>| for the non-reciprocal chain: the r^m
    weight times the Hermitian saddle form of the transformed packet."""
    _require_chain(spec)
    lnr = math.log(spec.r)
    tg = transformed_gaussian(p, spec.r)
    shifted = GaussianPacket(tg.n0_shifted, p.sigma, p.k0, p.a)
    vmax = 2.0 * spec.a * spec.t0
    x = (m - tg.n0_shifted) * spec.a
    if abs(x) >= t * vmax - 2.0 * spec.a:
        raise DomainError("site outside the Hermitian cone of the approximation")
    herm = _saddle_inside(shifted, vmax, x, t)
    ln10 = math.log(10.0)
    return (tg.log_c + m * lnr + math.log(abs(herm))) / ln10


def nh_peak_position(p: GaussianPacket, spec: ModelSpec, t: float) -> float:
    """Peak site of the non-reciprocal Gaussian approximation: solves
    2 (sigma/a)^2 (arcsin u - a k0) / (t v_h sqrt(1-u^2)) = ln r."""
    _require_chain(spec)
    from scipy.optimize import brentq

    lnr = math.log(spec.r)
    tg = transformed_gaussian(p, spec.r)
    if t <= 0:
        return tg.n0_shifted
    vh = 2.0 * spec.a * spec.t0
    s2a2 = (p.sigma / p.a) ** 2
    q0 = p.k0 * p.a

    def f(u):
        return 2.0 * s2a2 * (math.asin(u) - q0) / (t * vh * math.sqrt(1 - u * u)) - lnr

    u = brentq(f, -1 + 1e-14, 1 - 1e-14, xtol=1e-14)
    return tg.n0_shifted + u * t * vh / spec.a


def nh_peak_log_amplitude(p: GaussianPacket, spec: ModelSpec, t: float) -> float:
    """ln |psi|^2 at the peak of the approximation (shared prefactors kept,
    curvature factor included); used for packet-vs-packet races."""
    m = nh_peak_position(p, spec, t)
    return 2.0 * math.log(10.0) * nh_gaussian_approximation(p, spec, m, t)


def peak_expansion(p: GaussianPacket, spec: ModelSpec, order: int = 3) -> tuple:
    """(A, B, C3) of m_max(t) ~ ntilde0 + A t + B t^2 + C3 t^3, in sites.

    A = sin(a k0) v_h / a
    B = ln r cos^2(a k0) (v_h/a)^2 / (2 (sigma/a)^2)
    C3 = -3 ln^2 r cos^2(a k0) sin(a k0) (v_h/a)^3 / (8 (sigma/a)^4)
    """
    _require_chain(spec)
    if order not in (1, 2, 3):
        raise InvalidParameterError("order must be 1, 2 or 3")
    vh_a = 2.0 * spec.t0  # v_h / a
    q0 = p.k0 * p.a
    lnr = math.log(spec.r)
    s2 = (p.sigma / p.a) ** 2
    coeff_a = math.sin(q0) * vh_a
    coeff_b = lnr * math.cos(q0) ** 2 * vh_a ** 2 / (2.0 * s2)
    coeff_c = (
        -3.0 * lnr ** 2 * math.cos(q0) ** 2 * math.sin(q0) * vh_a ** 3 / (8.0 * s2 ** 2)
    )
    if order == 1:
        return (coeff_a, 0.0, 0.0)
    if order == 2:
        return (coeff_a, coeff_b, 0.0)
    return (coeff_a, coeff_b, coeff_c)


# -------------------------------------------------------------- continuum

def continuum_params(spec: ModelSpec, a0: Optional[float] = None) -> ContinuumParams:
    """Effective-mass parameters; m and b are invariants of the continuum
    family that keeps a^2 sqrt(t_l t_r) and r^(1/a) fixed."""
    _require_chain(spec)
    a0 = spec.a if a0 is None else a0
    t_l, t_r, a = spec.hn.t_l, spec.hn.t_r, spec.a
    root = math.sqrt(t_l * t_r)
    mass = 1.0 / (2.0 * a * a * root)
    drift = a * math.log(t_r / t_l) * root
    # reference couplings at spacing a0 on the same family
    prod0 = (a / a0) ** 4 * t_l * t_r
    ratio0 = (t_r / t_l) ** (a0 / a)
    t_r0 = math.sqrt(prod0 * ratio0)
    t_l0 = math.sqrt(prod0 / ratio0)
    return ContinuumParams(
        e0=2.0 * root, mass=mass, drift=drift, a0=a0, t_l0=t_l0, t_r0=t_r0
    )


def continuum_peak(cp: ContinuumParams, p: GaussianPacket, t: float) -> float:
    """x_max(t) = x0 + (k0/m) t + (b / m sigma^2) t^2 / 2."""
    x0 = p.n0 * p.a
    return x0 + (p.k0 / cp.mass) * t + (cp.drift / (cp.mass * p.sigma ** 2)) * t * t / 2.0


def continuum_peak_with_reflection(
    cp: ContinuumParams, p: GaussianPacket, wall_distance: float, t: float
) -> float:
    """Continuum peak with the carrier flipped at the wall-hit time: the
    velocity jumps by -2 k0/m at t_hit while the position stays continuous."""
    t_hit = wall_distance * cp.mass / p.k0
    if t <= t_hit:
        return continuum_peak(cp, p, t)
    mirrored = GaussianPacket(p.n0 + 2.0 * wall_distance / p.a, p.sigma, -p.k0, p.a)
    return continuum_peak(cp, mirrored, t)


# -------------------------------------------------------------- reflection

def reflection_prediction(
    p: GaussianPacket, spec: ModelSpec, wall_distance: float, a0: Optional[float] = None
) -> ReflectionPrediction:
    """Transition-time bundle for reflection off a wall ``wall_distance``
    away (in length units) from the packet center, carrier k0 toward it."""
    _require_chain(spec)
    if p.k0 == 0:
        raise DomainError("k0 must be nonzero: the packet must approach the wall")
    if wall_distance <= 0:
        raise DomainError("wall distance must be positive")
    d = wall_distance
    a = spec.a
    q0 = abs(p.k0) * a
    root = spec.t0
    t_hit_cont = d / (2.0 * a * a * root * abs(p.k0))
    t_hit_lat = d / (2.0 * a * root * math.sin(q0))
    cp = continuum_params(spec, a0)
    a0v = cp.a0
    root0 = math.sqrt(cp.t_l0 * cp.t_r0)
    lnratio0 = math.log(cp.t_r0 / cp.t_l0)
    t_delta = (
        (3.0 / 64.0)
        * (lnratio0 ** 2 / root0)
        * (math.cos(q0) ** 2 * a * a / math.sin(q0) ** 3)
        * d ** 3 / (a0v ** 4 * p.sigma ** 4)
    )
    ca, cb, cc = peak_expansion(GaussianPacket(p.n0, p.sigma, abs(p.k0), p.a), spec, 3)
    t_cubic = _cubic_transition_time(ca, cc, d / a)
    return ReflectionPrediction(
        t_hit_continuum=t_hit_cont,
        t_hit_lattice=t_hit_lat,
        t_delta=t_delta,
        coeff_a=ca,
        coeff_b=cb,
        coeff_c=cc,
        t_transition_cubic=t_cubic,
        wall_distance=d,
    )


def _cubic_transition_time(ca: float, cc: float, target: float) -> Optional[float]:
    """Smallest positive root of A t + C t^3 = target below the cubic's
    turning point; None when the cubic never reaches the target."""
    from scipy.optimize import brentq

    if cc >= 0:
        # monotone increasing: unique root
        return brentq(lambda t: ca * t + cc * t ** 3 - target, 0.0, 10.0 * target / max(ca, 1e-300))
    t_star = math.sqrt(ca / (3.0 * abs(cc)))
    peak = ca * t_star + cc * t_star ** 3
    if peak < target:
        return None
    return brentq(lambda t: ca * t + cc * t ** 3 - target, 0.0, t_star, xtol=1e-12)


def reflection_transition_time(
    p: GaussianPacket, spec: ModelSpec, wall_distance: float
) -> float:
    pred = reflection_prediction(p, spec, wall_distance)
    if pred.t_transition_cubic is None:
        raise NoRootError(
            "the cubic peak race never reaches the wall separation; "
            "no lattice transition below the turning point (relates to sigma_c)"
        )
    return pred.t_transition_cubic


def critical_sigma_reflection(
    spec: ModelSpec,
    wall_distance: float,
    k0: float,
    sigma_lo: float = 0.8,
    sigma_hi: float = 6.0,
    tol: float = 0.05,
) -> float:
    """Smallest packet width for which the image packet overtakes the
    incident one; bisection on the saddle-form peak-amplitude race.

    The image is the mirror of the Hermitized packet: same transform
    prefactor, center offset 2d, carrier -k0, which puts its initial peak
    log-amplitude 2 d ln r below the incident one.
    """
    _require_chain(spec)
    if k0 <= 0:
        raise DomainError("k0 must be positive (toward the wall)")

    def crossing(sigma: float) -> bool:
        return _image_race_crosses(spec, sigma, k0, wall_distance)

    lo, hi = sigma_lo, sigma_hi
    if crossing(lo):
        raise NoRootError("crossing already occurs at the lower sigma bracket")
    if not crossing(hi):
        raise NoRootError("no crossing anywhere in the scanned sigma range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crossing(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _image_race_crosses(
    spec: ModelSpec, sigma: float, k0: float, d: float, horizon: float = 3000.0
) -> bool:
    lnr = math.log(spec.r)
    vh = 2.0 * spec.a * spec.t0
    s2a2 = (sigma / spec.a) ** 2
    from scipy.optimize import brentq

    def peak_log(t: float, q0: float, herm_center: float) -> float:
        def f(u):
            return 2.0 * s2a2 * (math.asin(u) - q0) / (t * vh * math.sqrt(1 - u * u)) - lnr

        u = brentq(f, -1 + 1e-14, 1 - 1e-14, xtol=1e-14)
        m = herm_center + u * t * vh / spec.a
        return (
            2.0 * m * lnr
            - 2.0 * s2a2 * (math.asin(u) - q0) ** 2
            - 0.5 * math.log(1 - u * u)
        )

    c_inc = -2.0 * s2a2 * lnr            # Hermitized incident center (at 0)
    c_img = 2.0 * d / spec.a + 2.0 * s2a2 * lnr
    t0v = 1.0 / spec.t0
    for t in np.geomspace(t0v, horizon, 1200):
        if peak_log(t, -k0 * spec.a, c_img) >= peak_log(t, k0 * spec.a, c_inc):
            return True
    return False


# ---------------------------------------------------------------- disorder

def disorder_prediction(
    spec: ModelSpec, p: GaussianPacket, k_target: float
) -> DisorderPrediction:
    """Saturation value/time of the target momentum occupation and the
    transition time where its amplified growth overtakes the packet's own
    continuum-Gaussian peak."""
    _require_chain(spec)
    if spec.disorder is None or spec.disorder.w <= 0:
        raise InvalidParameterError("model carries no disorder")
    t_l, t_r, a = spec.hn.t_l, spec.hn.t_r, spec.a
    w = spec.disorder.w
    n = spec.n
    de = (t_l + t_r) * (math.cos(k_target * a) - math.cos(p.k0 * a))
    if de == 0:
        raise DomainError("degenerate Re E difference between k_target and k0")
    base = (w * w / 3.0) / n / (de * de)
    v_s = 4.0 * base
    t_s = math.pi / abs(de)
    growth = 2.0 * abs(t_l - t_r)
    b = a * math.log(t_r / t_l) * math.sqrt(t_l * t_r)
    qa = b * b / (2.0 * p.sigma ** 2)
    qb = 2.0 * p.k0 * b - growth
    qc = 0.5 * math.log(8.0 * math.pi * p.sigma ** 2 / n ** 2) - math.log(v_s) + growth * t_s
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        t_trans = math.inf
    else:
        root = (-qb - math.sqrt(disc)) / (2.0 * qa)
        t_trans = root if root > 0 else math.inf
    return DisorderPrediction(
        v_s=v_s, v_s_main_text=base, t_s=t_s, growth_rate=growth, t_transition=t_trans
    )


def critical_sigma_disorder(
    spec: ModelSpec, p: GaussianPacket, w: float,
    sigma_lo: float = 0.2, sigma_hi: float = 12.0,
) -> float:
    """Width where the packet's own amplified-momentum content equals the
    disorder saturation floor: solve
    sqrt(8 pi sigma^2/N^2) exp(-2 sigma^2 (pi/2 + q0)^2 / a^2) = V_s."""
    _require_chain(spec)
    if w <= 0:
        raise InvalidParameterError("w must be > 0")
    from scipy.optimize import brentq

    n = spec.n
    t_l, t_r, a = spec.hn.t_l, spec.hn.t_r, spec.a
    de = (t_l + t_r) * (math.cos(math.pi / 2.0) - math.cos(p.k0 * a))
    v_s = 4.0 * (w * w / 3.0) / n / (de * de)
    q0 = p.k0 * a
    gap = (math.pi / 2.0 + q0) ** 2

    def f(sigma):
        return (
            0.5 * math.log(8.0 * math.pi * sigma ** 2 / n ** 2)
            - 2.0 * sigma ** 2 * gap / a ** 2
            - math.log(v_s)
        )

    return brentq(f, sigma_lo, sigma_hi, xtol=1e-9)


def critical_disorder_amplitude(spec: ModelSpec, p: GaussianPacket) -> float:
    """Dual form: disorder amplitude below which no transition is observable
    at the packet's own width (same equality solved for w)."""
    _require_chain(spec)
    n = spec.n
    t_l, t_r, a = spec.hn.t_l, spec.hn.t_r, spec.a
    de = (t_l + t_r) * (math.cos(math.pi / 2.0) - math.cos(p.k0 * a))
    q0 = p.k0 * a
    lhs = math.sqrt(8.0 * math.pi * p.sigma ** 2 / n ** 2) * math.exp(
        -2.0 * p.sigma ** 2 * (math.pi / 2.0 + q0) ** 2 / a ** 2
    )
    return math.sqrt(lhs * 3.0 * n * de * de / 4.0)


def localization_length(spec: ModelSpec, energy: float) -> float:
    """xi(E) = 6 a (t0^2/w^2)(1 - E^2/(4 t0^2)); zero at the band edges."""
    _require_chain(spec)
    if spec.disorder is None or spec.disorder.w <= 0:
        raise InvalidParameterError("model carries no disorder")
    t0 = spec.t0
    if abs(energy) > 2.0 * t0:
        raise DomainError("|E| must be <= 2 sqrt(t_l t_r)")
    w = spec.disorder.w
    return 6.0 * spec.a * (t0 * t0 / (w * w)) * (1.0 - energy ** 2 / (4.0 * t0 * t0))


def edge_timestamps(spec: ModelSpec, x0: float) -> dict:
    """Arrival times at the amplified edge: t1 non-reciprocal front, t2
    direct Hermitian front, t3 once-reflected, t4 twice-reflected."""
    _require_chain(spec)
    length = spec.n * spec.a
    if not (0 < x0 < length):
        raise DomainError("x0 must lie strictly inside the chain")
    v = velocities(spec)
    return {
        "t1": x0 / abs(v.v_nh),
        "t2": x0 / v.v_h,
        "t3": (2.0 * length - x0) / v.v_h,
        "t4": (4.0 * length - x0) / v.v_h,
    }

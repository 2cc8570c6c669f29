"""Observables extracted from numeric trajectories.

All detection happens in log-magnitude space (dynamic ranges here exceed
10^300).  Conventions:

* peak traces use the per-snapshot argmax with ties broken toward the
  smaller site index; normalization cancels in argmax and in thresholds
  relative to the per-snapshot max.
* a transition event is a peak displacement between consecutive snapshots
  exceeding the ballistic ceiling |v_nh| dt plus a configured number of
  sites.
* wavefront arrivals at an edge site appear as caustic maxima of the raw
  edge series.  The first maximum of a sharp front lags the ballistic
  arrival by the standard turning-point offset (first maximum of J_nu(x) at
  x ~ nu + 0.8086 nu^(1/3)), which `edge_feature_times` removes.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
from scipy.signal import find_peaks

from .errors import InsufficientPeaksError, InvalidParameterError
from .evolution import Trajectory, edge_amplitude_log10

FIRST_MAX_SHIFT = 1.018792971647471 / 2.0 ** (1.0 / 3.0)  # = 0.8086...

NH_FRONT_ARRIVAL = "nh_front_arrival"
HERMITIAN_FRONT_ARRIVAL = "hermitian_front_arrival"
REFLECTION_ONSET = "reflection_onset"
TRANSITION_JUMP = "transition_jump"


@dataclass(frozen=True)
class FrontEvent:
    time: float
    site: int
    kind: str
    confidence: float  # detection margin in log10-magnitude units


def peak_trace(traj: Trajectory) -> np.ndarray:
    """(T, 2) rows of (t, argmax site); ties break to the smaller site."""
    if len(traj.times) == 0:
        raise InvalidParameterError("empty trajectory")
    sites = traj.log10_abs2.argmax(axis=1) + 1  # argmax returns first maximum
    return np.column_stack([traj.times, sites.astype(float)])


def front_position(traj: Trajectory, threshold_log10: float) -> np.ndarray:
    """(T, 3) rows (t, leftmost site, rightmost site) where the per-snapshot
    max-relative log10 magnitude exceeds ``threshold_log10`` (< 0)."""
    if threshold_log10 >= 0:
        raise InvalidParameterError("threshold must be below 0 (relative to max)")
    rel = traj.log10_abs2 - traj.snapshot_max_log10()[:, None]
    out = np.empty((len(traj.times), 3))
    for i, row in enumerate(rel):
        hit = np.where(row >= threshold_log10)[0]
        out[i] = (traj.times[i], hit[0] + 1.0, hit[-1] + 1.0)
    return out


def detect_transition(
    trace: np.ndarray,
    min_jump_sites: int,
    v_ceiling: float,
    kind: str = TRANSITION_JUMP,
    persistence: int = 12,
) -> list[FrontEvent]:
    """Events where the peak relocates faster than ballistically possible
    and stays away from its old track.

    ``trace`` is the output of `peak_trace`; ``v_ceiling`` is the largest
    physical front speed (|v_nh| for the chain) in sites per time unit.
    A candidate jump must be confirmed by the following ``persistence``
    snapshots never re-entering the ballistic envelope of the pre-jump
    position; this suppresses argmax flapping between near-degenerate maxima
    (the two fronts of a symmetric Hermitian packet).  Candidates too close
    to the end of the trace to be confirmed are dropped.  Set
    ``persistence=0`` to report every ballistic violation.
    """
    if min_jump_sites < 3:
        raise InvalidParameterError("min_jump_sites must be >= 3")
    events: list[FrontEvent] = []
    t = trace[:, 0]
    s = trace[:, 1]
    for i in range(1, len(t)):
        dt = t[i] - t[i - 1]
        ceiling = v_ceiling * dt + min_jump_sites
        jump = abs(s[i] - s[i - 1])
        if jump <= ceiling:
            continue
        if persistence > 0:
            if i + persistence >= len(t):
                continue  # not enough trace left to confirm
            confirmed = True
            for j in range(i + 1, i + 1 + persistence):
                envelope = v_ceiling * (t[j] - t[i - 1]) + min_jump_sites
                if abs(s[j] - s[i - 1]) <= envelope:
                    confirmed = False  # peak came back: near-degenerate maxima
                    break
            if not confirmed:
                continue
        events.append(
            FrontEvent(
                time=float(t[i]),
                site=int(s[i]),
                kind=kind,
                confidence=float(jump - ceiling),
            )
        )
    return events


def oscillation_period(
    times: np.ndarray,
    series: np.ndarray,
    prominence_fraction: float = 0.10,
    min_separation_fraction: float = 0.05,
) -> float:
    """Mean spacing between principal local maxima of ``series``.

    Peaks must clear a prominence floor (default 10% of the series max) and
    are deduplicated within ``min_separation_fraction`` of the span, which
    merges the ringing around each principal arrival.
    """
    if len(series) < 5:
        raise InsufficientPeaksError("series too short")
    span = times[-1] - times[0]
    dt = np.median(np.diff(times))
    dist = max(1, int(min_separation_fraction * span / dt))
    idx, _ = find_peaks(
        series, prominence=prominence_fraction * float(np.max(series)), distance=dist
    )
    if len(idx) < 3:
        raise InsufficientPeaksError(
            f"found {len(idx)} principal peaks; need at least 3"
        )
    return float(np.diff(times[idx]).mean())


def undo_caustic_lag(t_peak: float, v_front: float) -> float:
    """Ballistic arrival time from a measured first-caustic time.

    Solves nu + 0.8086 nu^(1/3) = v_front * t_peak for the traveled order nu
    and returns nu / v_front.
    """
    target = v_front * t_peak
    nu = target
    for _ in range(60):
        nu = target - FIRST_MAX_SHIFT * nu ** (1.0 / 3.0)
    return nu / v_front


def edge_feature_times(
    traj: Trajectory,
    site: int,
    v_h: float,
    v_nh: float,
    onset_level: float = -1.0,
    caustic_prominence: float = 0.2,
    envelope_window: float = 8.0,
) -> dict:
    """Arrival features of an edge series.

    Returns ``{"t1": ..., "caustics": [...]}`` where t1 is the first upward
    crossing of ``onset_level`` in the L2-normalized log10 series (the
    non-reciprocal front pinning to the edge) and ``caustics`` are
    caustic-lag-corrected times of principal maxima of the raw series'
    envelope (Hermitian-front arrivals, direct and reflected).
    """
    t = traj.times
    l2 = edge_amplitude_log10(traj, site, "l2")
    above = np.where(l2 >= onset_level)[0]
    t1 = float(t[above[0]]) if len(above) else None

    raw = edge_amplitude_log10(traj, site, "none")
    dt = float(np.median(np.diff(t)))
    win = max(1, int(round(envelope_window / dt)))
    # centered running max kills the interference nulls between arrivals
    env = np.array([raw[max(0, i - win):i + win + 1].max() for i in range(len(raw))])
    idx, _ = find_peaks(env, prominence=caustic_prominence)
    caustics = []
    for i in idx:
        lo = max(0, i - win)
        hi = min(len(raw), i + win + 1)
        j = lo + int(np.argmax(raw[lo:hi]))
        t_peak = float(t[j])
        if t1 is not None and t_peak <= t1:
            continue
        caustics.append(undo_caustic_lag(t_peak, v_h))
    return {"t1": t1, "caustics": caustics}


def fit_front_velocity(front: np.ndarray, side: str, t_window: tuple) -> float:
    """Linear-fit speed of the left or right front over a time window."""
    t = front[:, 0]
    col = 1 if side == "left" else 2
    sel = (t >= t_window[0]) & (t <= t_window[1])
    if sel.sum() < 3:
        raise InvalidParameterError("window contains fewer than 3 samples")
    return float(np.polyfit(t[sel], front[sel, col], 1)[0])


def fit_peak_velocity(trace: np.ndarray, t_window: tuple) -> float:
    t = trace[:, 0]
    sel = (t >= t_window[0]) & (t <= t_window[1])
    if sel.sum() < 3:
        raise InvalidParameterError("window contains fewer than 3 samples")
    return float(np.polyfit(t[sel], trace[sel, 1], 1)[0])

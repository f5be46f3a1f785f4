"""Lifetime extraction from population traces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INV_E = math.exp(-1.0)
FIT_WINDOW = (0.05, 0.9)
NON_DECAYING_LEVEL = 0.9


@dataclass(frozen=True)
class DecayFit:
    """Result of :func:`fit_decay`.

    ``t1`` is ``None`` for non-decaying traces. ``crossing_time`` is the
    interpolated first 1/e crossing, or ``None`` when the trace never gets
    there (the log-linear fit then extrapolates).
    """

    t1: float | None
    crossing_time: float | None
    oscillatory: bool
    non_decaying: bool
    n_points: int

    @property
    def method_flags(self) -> tuple[str, ...]:
        flags = []
        if self.non_decaying:
            flags.append("non_decaying")
        if self.oscillatory:
            flags.append("oscillatory")
        if self.crossing_time is None and self.t1 is not None:
            flags.append("extrapolated")
        return tuple(flags)

    @property
    def t1_or_inf(self) -> float:
        return math.inf if self.t1 is None else self.t1


def _first_crossing(times, p, level):
    below = np.flatnonzero(p < level)
    if below.size == 0:
        return None, None
    i = int(below[0])
    if i == 0:
        return i, float(times[0])
    p0, p1 = p[i - 1], p[i]
    if p0 > 0 and p1 > 0:
        # interpolate in log p: exact for exponential segments
        frac = (math.log(p0) - math.log(level)) / (math.log(p0) - math.log(p1))
    else:
        frac = (p0 - level) / (p0 - p1)
    return i, float(times[i - 1] + frac * (times[i] - times[i - 1]))


def fit_decay(times, p, window: tuple[float, float] = FIT_WINDOW) -> DecayFit:
    """Fit an energy-relaxation time to a population trace starting near 1.

    Primary estimate is the first 1/e crossing; it is refined by a log-linear
    least-squares fit over samples with ``window[0] <= p <= window[1]`` taken
    before the trace first drops under ``window[0]``.
    """
    times = np.asarray(times, dtype=float)
    p = np.asarray(p, dtype=float)
    if times.shape != p.shape or times.ndim != 1:
        raise ValueError("times and p must be 1-D arrays of equal length")

    if np.all(p >= NON_DECAYING_LEVEL):
        return DecayFit(None, None, False, True, 0)

    i_cross, t_cross = _first_crossing(times, p, INV_E)
    oscillatory = bool(i_cross is not None and np.any(p[i_cross:] > INV_E))

    lo, hi = window
    stop = np.flatnonzero(p < lo)
    end = int(stop[0]) if stop.size else p.size
    mask = np.zeros(p.size, dtype=bool)
    mask[:end] = (p[:end] >= lo) & (p[:end] <= hi)
    n = int(mask.sum())

    t1 = t_cross
    if n >= 3:
        slope, _ = np.polyfit(times[mask], np.log(p[mask]), 1)
        if slope < 0:
            t1 = -1.0 / float(slope)
    return DecayFit(t1, t_cross, oscillatory, False, n)

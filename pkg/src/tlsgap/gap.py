"""Phononic-bandgap response of a single TLS.

The bath seen by a TLS is a flat (Markovian) phonon spectral density with a
Lorentzian dip of fractional depth ``depth`` and half-width ``width`` at
``center``.  The dip is exactly represented by one damped auxiliary amplitude
(a pseudomode), which turns the non-Markovian single-excitation problem into a
two-variable linear ODE.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError, PerfectGapError, StepSizeError, ToleranceError
from .fitting import DecayFit, fit_decay

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class GapSpec:
    """Bandgap as seen by a TLS.

    ``s_parallel``/``s_perpendicular`` default to ``depth`` (isotropic gap).
    Frequencies are in Hz; ``width`` is the half-width of the Lorentzian dip,
    so a 1 GHz full bandgap is ``width=0.5e9``.
    """

    depth: float = 0.0
    center: float = 5e9
    width: float = 0.5e9
    s_parallel: float | None = None
    s_perpendicular: float | None = None

    def __post_init__(self):
        if self.s_parallel is None:
            object.__setattr__(self, "s_parallel", self.depth)
        if self.s_perpendicular is None:
            object.__setattr__(self, "s_perpendicular", self.depth)
        for name in ("depth", "s_parallel", "s_perpendicular"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.width > 0:
            raise DomainError("gap width must be positive")

    @property
    def is_isotropic(self) -> bool:
        return self.s_parallel == self.s_perpendicular

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "center": self.center,
            "width": self.width,
            "s_parallel": self.s_parallel,
            "s_perpendicular": self.s_perpendicular,
        }


@dataclass(frozen=True)
class SpectralDensity:
    """Phonon spectral density ``D(f) = (G0/2pi) * (1 - depth * w^2 / ((f - fg)^2 + w^2))``."""

    baseline_rate: float
    gap: GapSpec = field(default_factory=GapSpec)

    def __post_init__(self):
        if not self.baseline_rate > 0:
            raise DomainError("baseline_rate must be positive")

    def __call__(self, frequency):
        f = np.asarray(frequency, dtype=float)
        w = self.gap.width
        dip = self.gap.depth * w**2 / ((f - self.gap.center) ** 2 + w**2)
        return self.baseline_rate / TWO_PI * (1.0 - dip)


@dataclass(frozen=True)
class DecayTrace:
    times: np.ndarray
    excited_probability: np.ndarray
    amplitude: np.ndarray
    metadata: dict = field(default_factory=dict)

    def fit(self) -> DecayFit:
        return fit_decay(self.times, self.excited_probability)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time_s", "p_excited", "re_amplitude", "im_amplitude"])
            for t, p, a in zip(self.times, self.excited_probability, self.amplitude):
                w.writerow([repr(float(t)), repr(float(p)), repr(float(a.real)), repr(float(a.imag))])
        return path


def t1_enhancement(depth: float) -> float:
    """Wide-gap, on-resonance lifetime multiplier ``1 / (1 - depth)``."""
    if not 0.0 <= depth <= 1.0:
        raise DomainError(f"depth must lie in [0, 1), got {depth}")
    if depth == 1.0:
        raise PerfectGapError("depth = 1: lifetime diverges; model a perfect gap as 1 - eps")
    return 1.0 / (1.0 - depth)


def _pseudomode_rates(spectral: SpectralDensity, tls_frequency: float):
    g0 = spectral.baseline_rate
    w_ang = TWO_PI * spectral.gap.width
    detune = TWO_PI * (spectral.gap.center - tls_frequency)
    return g0, w_ang, detune, spectral.gap.depth


def gapped_decay(
    spectral: SpectralDensity,
    tls_frequency: float,
    horizon: float,
    tolerance: float = 1e-10,
    times=None,
    n_points: int = 1001,
) -> DecayTrace:
    """Excited-state amplitude of a TLS decaying into the gapped phonon bath.

    Integrates ``dc/dt = -(G0/2) c + b`` and
    ``db/dt = depth*G0*w/2 * c - (w + i*dg) b`` with ``c(0)=1, b(0)=0``
    (``w`` the angular half-width, ``dg`` the angular gap-centre detuning).
    The auxiliary amplitude is carried as ``beta = 2b/G0`` to keep both
    components O(1), and the system is solved with an implicit Radau scheme
    since the dip width usually exceeds the decay rate by orders of magnitude.
    """
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    g0, w, dg, lam = _pseudomode_rates(spectral, tls_frequency)
    a = np.array(
        [[-0.5 * g0, 0.5 * g0], [lam * w, -(w + 1j * dg)]],
        dtype=complex,
    )
    # real embedding: Radau has no complex support
    jac = np.block([[a.real, -a.imag], [a.imag, a.real]])
    t_eval = np.linspace(0.0, horizon, n_points) if times is None else np.asarray(times, dtype=float)
    sol = integrate.solve_ivp(
        lambda t, y: jac @ y,
        (0.0, float(t_eval[-1])),
        np.array([1.0, 0.0, 0.0, 0.0]),
        method="Radau",
        jac=jac,
        t_eval=t_eval,
        rtol=tolerance,
        atol=tolerance * 1e-3,
    )
    if sol.status != 0:
        raise ToleranceError(f"gapped_decay: {sol.message}")
    c = sol.y[0] + 1j * sol.y[2]
    meta = {
        "solver": "scipy.integrate.solve_ivp/Radau",
        "rtol": tolerance,
        "baseline_rate": g0,
        "tls_frequency": tls_frequency,
        "n_steps": int(sol.t.size),
        **{f"gap_{k}": v for k, v in spectral.gap.to_dict().items()},
    }
    return DecayTrace(sol.t, np.abs(c) ** 2, c, meta)


def volterra_oracle(
    spectral: SpectralDensity,
    tls_frequency: float,
    horizon: float,
    step: float,
    output_every: int = 1,
) -> DecayTrace:
    """Reference solution of the memory-kernel form of the gapped decay.

    Discretises ``dc/dt = -(G0/2) c + depth*(G0 w/2) * int_0^t exp(-(w+i dg)(t-s)) c(s) ds``
    with the trapezoidal rule for both the convolution and the outer
    derivative.  Because the kernel is exponential, the full trapezoid sum obeys
    a one-step recursion, so the scheme is a fixed 2x2 update applied
    ``horizon/step`` times.
    """
    g0, w, dg, lam = _pseudomode_rates(spectral, tls_frequency)
    if not (g0 * step < 1e-2 and w * step < 1e-1):
        raise StepSizeError(f"step {step:g} too coarse: need G0*step < 1e-2 and w*step < 1e-1")
    n_steps = int(math.ceil(horizon / step - 1e-9))
    h = horizon / n_steps
    amp = lam * g0 * w / 2.0
    e = np.exp(-(w + 1j * dg) * h)
    # state (c_n, I_n); f_n = -(g0/2) c_n + amp * I_n
    lhs = 1.0 + 0.25 * h * g0 - 0.25 * amp * h * h
    row_c = np.array([1.0 - 0.25 * h * g0 + 0.25 * amp * h * h * e, 0.5 * h * amp * (1.0 + e)]) / lhs
    row_i = np.array([0.5 * h * e, e]) + 0.5 * h * row_c
    step_matrix = np.vstack([row_c, row_i])
    stride = max(1, int(output_every))
    jump = np.linalg.matrix_power(step_matrix, stride)
    n_out = n_steps // stride
    states = np.empty((n_out + 1, 2), dtype=complex)
    states[0] = (1.0, 0.0)
    for k in range(n_out):
        states[k + 1] = jump @ states[k]
    times = np.arange(n_out + 1) * (stride * h)
    c = states[:, 0]
    meta = {"solver": "trapezoidal-volterra", "step": h, "baseline_rate": g0}
    return DecayTrace(times, np.abs(c) ** 2, c, meta)


def angular_depth(gap: GapSpec, theta):
    """Suppression depth for a dipole at angle ``theta`` from the metal plane."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > HALF_PI + 1e-12):
        raise DomainError("theta must lie in [0, pi/2]")
    out = gap.s_parallel * np.cos(theta) ** 2 + gap.s_perpendicular * np.sin(theta) ** 2
    return float(out) if out.ndim == 0 else out


def isotropic_weight(theta):
    """Density of the angle from the plane for a uniformly random 3D dipole."""
    return np.cos(theta)


def sine_weight(theta):
    """The alternative ``sin(theta)`` weighting (angle measured from the plane)."""
    return np.sin(theta)


ANGULAR_WEIGHTS: dict[str, Callable] = {"isotropic": isotropic_weight, "sine": sine_weight}


@dataclass(frozen=True)
class SuppressionCurve:
    """Tabulated depth-vs-angle curve, linearly interpolated."""

    theta: np.ndarray
    depth: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        d = np.asarray(self.depth, dtype=float)
        if th.ndim != 1 or th.shape != d.shape or th.size < 2:
            raise DomainError("curve needs matching 1-D theta/depth columns with >= 2 rows")
        if np.any(np.diff(th) <= 0) or th[0] < 0 or th[-1] > HALF_PI + 1e-9:
            raise DomainError("theta must be strictly increasing within [0, pi/2]")
        if np.any(d < 0) or np.any(d > 1):
            raise DomainError("depth values must lie in [0, 1]")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "depth", d)

    def __call__(self, theta):
        return np.interp(theta, self.theta, self.depth)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.theta


def load_suppression_curve(path: str | Path) -> SuppressionCurve:
    """Read a two-column CSV ``theta_radians, depth`` (header optional, ``#`` comments skipped)."""
    rows = []
    with Path(path).open() as fh:
        for rec in csv.reader(line for line in fh if not line.lstrip().startswith("#")):
            if not rec:
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                if rows:
                    raise DomainError(f"bad row {rec} in {path}") from None
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return SuppressionCurve(arr[:, 0], arr[:, 1])


@dataclass(frozen=True)
class AngularAverage:
    mean_depth: float
    mean_rate_factor: float
    mean_t1_factor: float


def _quad(fun, points):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(fun, 0.0, HALF_PI, points=points, limit=500, epsabs=0.0, epsrel=1e-10)
        except integrate.IntegrationWarning as exc:
            raise DivergenceError(f"angular quadrature did not converge: {exc}") from None
    return val


def angular_average(profile, weight: Callable = isotropic_weight) -> AngularAverage:
    """Weighted angular means of the depth, the rate factor and the T1 factor.

    ``profile`` is a :class:`GapSpec` (cos^2/sin^2 interpolation) or any
    callable ``theta -> depth`` such as a :class:`SuppressionCurve`.
    ``weight`` must be a normalised density on [0, pi/2].
    """
    if isinstance(profile, GapSpec):
        depth_fn = lambda th: angular_depth(profile, th)  # noqa: E731
        points = None
    else:
        depth_fn = profile
        bp = getattr(profile, "breakpoints", None)
        points = None if bp is None else [p for p in np.asarray(bp) if 0 < p < HALF_PI] or None

    norm = _quad(lambda th: float(weight(th)), points)
    if abs(norm - 1.0) > 1e-6:
        raise DomainError(f"angular weight is not normalised on [0, pi/2] (integral {norm:.8g})")

    grid = np.linspace(0.0, HALF_PI, 4001)
    if points is not None:
        grid = np.union1d(grid, points)
    lam = np.asarray(depth_fn(grid), dtype=float)
    wts = np.asarray(weight(grid), dtype=float)
    if np.any((lam >= 1.0) & (wts > 0)):
        raise DivergenceError("depth reaches 1 where the weight is positive: mean T1 factor is infinite")

    mean_depth = _quad(lambda th: float(weight(th) * depth_fn(th)), points)
    mean_rate = _quad(lambda th: float(weight(th) * (1.0 - depth_fn(th))), points)
    mean_t1 = _quad(lambda th: float(weight(th) / (1.0 - depth_fn(th))), points)
    return AngularAverage(mean_depth, mean_rate, mean_t1)


def effective_tls_t1(tls, gap: GapSpec) -> float:
    """Gap-enhanced lifetime of ``tls`` given its dipole angle."""
    lam = angular_depth(gap, tls.theta)
    if lam >= 1.0:
        raise PerfectGapError(f"angular depth {lam} at theta={tls.theta}: lifetime diverges")
    return tls.t1_intrinsic / (1.0 - lam)

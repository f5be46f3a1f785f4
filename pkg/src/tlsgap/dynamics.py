"""Qubit exchanging one excitation with a bath of decaying TLSs.

With no drive and decay that only empties the one-excitation sector, the
qubit population follows exactly from the non-Hermitian effective Hamiltonian

    H_eff = H - (i/2) diag(0, gamma_1, ..., gamma_N)

on the (N+1)-dimensional sector.  H is an arrowhead matrix: the qubit couples
to every TLS, TLSs do not couple to one another.  Everything runs in the frame
rotating at the qubit frequency, in angular units internally.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy
from scipy import integrate, linalg

from .ensemble import TlsEnsemble
from .errors import DomainError, NormGuardError, SizeError, ToleranceError
from .fitting import DecayFit, fit_decay
from .gap import GapSpec, effective_tls_t1, t1_enhancement

TWO_PI = 2.0 * math.pi
DENSE_LIMIT = 512  # largest N propagated by matrix exponential under method="auto"
LINDBLAD_MAX_TLS = 4


@dataclass(frozen=True)
class ExcitationState:
    qubit_amplitude: complex
    tls_amplitudes: np.ndarray
    time: float = 0.0

    @classmethod
    def qubit_excited(cls, n_tls: int) -> "ExcitationState":
        return cls(1.0 + 0j, np.zeros(n_tls, dtype=complex))

    @classmethod
    def tls_excited(cls, n_tls: int, index: int) -> "ExcitationState":
        amps = np.zeros(n_tls, dtype=complex)
        amps[index] = 1.0
        return cls(0j, amps)

    @property
    def norm2(self) -> float:
        return abs(self.qubit_amplitude) ** 2 + float(np.sum(np.abs(self.tls_amplitudes) ** 2))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[complex(self.qubit_amplitude)], np.asarray(self.tls_amplitudes, dtype=complex)])


@dataclass(frozen=True)
class ArrowheadGenerator:
    """Effective generator on the one-excitation sector.

    Detunings and couplings in Hz (``couplings`` are the exchange matrix
    elements, half the vacuum Rabi rate), ``decay_rates`` in 1/s.
    """

    qubit_detuning: float
    tls_detunings: np.ndarray
    couplings: np.ndarray
    decay_rates: np.ndarray

    def __post_init__(self):
        for name in ("tls_detunings", "couplings", "decay_rates"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(-1))
        n = self.tls_detunings.size
        if self.couplings.size != n or self.decay_rates.size != n:
            raise DomainError("tls_detunings, couplings and decay_rates must have equal length")
        if np.any(self.decay_rates < 0):
            raise DomainError("decay rates must be non-negative")

    @property
    def n_tls(self) -> int:
        return self.tls_detunings.size

    @cached_property
    def diagonal(self) -> np.ndarray:
        """Diagonal of H_eff in rad/s (qubit first)."""
        d = np.empty(self.n_tls + 1, dtype=complex)
        d[0] = TWO_PI * self.qubit_detuning
        d[1:] = TWO_PI * self.tls_detunings - 0.5j * self.decay_rates
        return d

    @cached_property
    def coupling_angular(self) -> np.ndarray:
        return TWO_PI * self.couplings

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        """``H_eff @ psi`` in O(N)."""
        d = self.diagonal
        g = self.coupling_angular
        out = d * psi
        out[0] += g @ psi[1:]
        out[1:] += g * psi[0]
        return out

    def dense(self) -> np.ndarray:
        n = self.n_tls + 1
        h = np.zeros((n, n), dtype=complex)
        h[np.diag_indices(n)] = self.diagonal
        h[0, 1:] = self.coupling_angular
        h[1:, 0] = self.coupling_angular
        return h

    def stiffness(self, horizon: float) -> float:
        """Largest decay rate times the horizon."""
        return float(self.decay_rates.max(initial=0.0) * horizon)


@dataclass(frozen=True)
class QubitTrace:
    times: np.ndarray
    p_qubit: np.ndarray
    p_tls_total: np.ndarray
    p_emitted: np.ndarray
    metadata: dict = field(default_factory=dict)

    def fit(self) -> DecayFit:
        return fit_qubit_t1(self)

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time_s", "p_qubit", "p_tls_total", "p_emitted"])
            for row in zip(self.times, self.p_qubit, self.p_tls_total, self.p_emitted):
                w.writerow([repr(float(x)) for x in row])
        return path


def build_generator(
    ensemble: TlsEnsemble,
    gap: GapSpec | None = None,
    mode: str = "isotropic",
    t1_factor: float | None = None,
) -> ArrowheadGenerator:
    """Map a sampled ensemble onto the arrowhead generator.

    ``mode="isotropic"`` multiplies every TLS lifetime by the same factor
    (``t1_factor`` if given, else ``1/(1 - gap.depth)``); ``"anisotropic"``
    uses each TLS's dipole angle via :func:`effective_tls_t1`.
    """
    if len(ensemble) == 0:
        raise DomainError("ensemble is empty")
    if mode not in ("isotropic", "anisotropic"):
        raise DomainError(f"unknown mode {mode!r}")
    arr = ensemble.arrays
    t1 = arr["t1_intrinsic"]
    if mode == "anisotropic" and gap is not None:
        t1_eff = np.array([effective_tls_t1(m, gap) for m in ensemble.members])
    else:
        factor = t1_factor if t1_factor is not None else (1.0 if gap is None else t1_enhancement(gap.depth))
        if factor <= 0:
            raise DomainError("t1_factor must be positive")
        t1_eff = t1 * factor
    return ArrowheadGenerator(
        qubit_detuning=0.0,
        tls_detunings=arr["detuning"],
        couplings=arr["omega"] / 2.0,
        decay_rates=1.0 / t1_eff,
    )


def _output_grid(horizon, output_grid):
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    if np.isscalar(output_grid):
        n = int(output_grid)
        if n < 2:
            raise DomainError("need at least two output points")
        return np.linspace(0.0, horizon, n)
    grid = np.asarray(output_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or grid[0] < 0 or grid[-1] > horizon * (1 + 1e-12):
        raise DomainError("output grid must be a 1-D array within [0, horizon]")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("output grid must be strictly increasing")
    return grid


def _trace_from_states(times, states, tolerance, meta):
    p_qubit = np.abs(states[:, 0]) ** 2
    p_tls = np.sum(np.abs(states[:, 1:]) ** 2, axis=1)
    norm2 = p_qubit + p_tls
    if not np.all(np.isfinite(norm2)) or np.any(norm2 > 1.0 + 10.0 * tolerance):
        raise NormGuardError(f"state norm reached {np.nanmax(norm2)!r}")
    return QubitTrace(times, p_qubit, p_tls, 1.0 - norm2, meta)


def _propagate_expm(gen, psi0, times):
    h = gen.dense()
    out = np.empty((times.size, psi0.size), dtype=complex)
    cache: dict[float, np.ndarray] = {}
    psi, t_prev = psi0, 0.0
    for k, t in enumerate(times):
        dt = float(t - t_prev)
        if dt > 0:
            key = round(dt, 18)
            if key not in cache:
                cache[key] = linalg.expm(-1j * dt * h)
            psi = cache[key] @ psi
        out[k] = psi
        t_prev = t
    return out


def _propagate_rk(gen, psi0, times, tolerance, matvec):
    if matvec == "dense":
        h = gen.dense()
        rhs = lambda t, y: -1j * (h @ y)  # noqa: E731
    else:
        rhs = lambda t, y: -1j * gen.matvec(y)  # noqa: E731
    if times[-1] == 0.0:
        return np.tile(psi0, (times.size, 1)), 0
    sol = integrate.solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        psi0,
        method="DOP853",
        t_eval=times,
        rtol=tolerance,
        atol=tolerance * 1e-3,
    )
    if sol.status != 0:
        raise ToleranceError(f"propagate: {sol.message}")
    return sol.y.T, int(sol.nfev)


def propagate(
    generator: ArrowheadGenerator,
    horizon: float,
    output_grid=201,
    tolerance: float = 1e-8,
    method: str = "auto",
    matvec: str = "arrowhead",
    initial: ExcitationState | None = None,
) -> QubitTrace:
    """Evolve the one-excitation sector from a qubit excitation.

    ``method="rk"`` is adaptive Dormand-Prince 8(5,3) with the O(N) arrowhead
    product (``matvec="dense"`` swaps in a dense product for cross-checks);
    ``method="expm"`` uses the exact propagator of the dense generator, which
    is immune to the stiffness of very short TLS lifetimes; ``"auto"`` takes
    ``expm`` for N <= 512 and ``rk`` above.
    """
    if not 0 < tolerance <= 1e-3:
        raise DomainError("tolerance must lie in (0, 1e-3]")
    if method not in ("auto", "rk", "expm"):
        raise DomainError(f"unknown method {method!r}")
    if matvec not in ("arrowhead", "dense"):
        raise DomainError(f"unknown matvec {matvec!r}")
    times = _output_grid(horizon, output_grid)
    if initial is None:
        initial = ExcitationState.qubit_excited(generator.n_tls)
    psi0 = initial.as_vector()
    if psi0.size != generator.n_tls + 1:
        raise DomainError("initial state does not match generator size")

    if method == "auto":
        method = "expm" if generator.n_tls <= DENSE_LIMIT else "rk"
    nfev = None
    if method == "expm":
        states = _propagate_expm(generator, psi0, times)
    else:
        states, nfev = _propagate_rk(generator, psi0, times, tolerance, matvec)
    meta = {
        "method": method,
        "solver": "scipy.linalg.expm" if method == "expm" else "scipy.integrate.solve_ivp/DOP853",
        "matvec": matvec if method == "rk" else "dense",
        "rtol": tolerance,
        "n_tls": generator.n_tls,
        "nfev": nfev,
        "scipy": scipy.__version__,
    }
    return _trace_from_states(times, states, tolerance, meta)


def _liouvillian(gen: ArrowheadGenerator) -> np.ndarray:
    # basis: 0 = global ground, 1 = qubit excited, 2.. = TLS j excited
    n = gen.n_tls
    dim = n + 2
    h = np.zeros((dim, dim), dtype=complex)
    h[1:, 1:] = gen.dense().real  # Hermitian part; decay enters through collapse operators
    eye = np.eye(dim)
    # column-stacking convention: vec(A rho B) = (B^T kron A) vec(rho)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for j, gamma in enumerate(gen.decay_rates):
        if gamma == 0:
            continue
        c = np.zeros((dim, dim), dtype=complex)
        c[0, j + 2] = math.sqrt(gamma)
        cdc = c.conj().T @ c
        lv += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return lv


def lindblad_oracle(
    generator: ArrowheadGenerator,
    horizon: float,
    grid=201,
    excite: int | None = None,
    return_density: bool = False,
):
    """Full density-matrix reference on the (N+2)-dimensional space, N <= 4.

    ``excite=None`` starts from the excited qubit, an integer ``j`` from an
    excited TLS ``j``.  With ``return_density=True`` the density matrices are
    returned alongside the trace.
    """
    n = generator.n_tls
    if n > LINDBLAD_MAX_TLS:
        raise SizeError(f"lindblad_oracle handles at most {LINDBLAD_MAX_TLS} TLSs, got {n}")
    times = _output_grid(horizon, grid)
    dim = n + 2
    rho0 = np.zeros((dim, dim), dtype=complex)
    k = 1 if excite is None else excite + 2
    rho0[k, k] = 1.0
    lv = _liouvillian(generator)
    vec = rho0.reshape(-1, order="F")
    rhos = np.empty((times.size, dim, dim), dtype=complex)
    cache: dict[float, np.ndarray] = {}
    t_prev = 0.0
    for i, t in enumerate(times):
        dt = float(t - t_prev)
        if dt > 0:
            key = round(dt, 18)
            if key not in cache:
                cache[key] = linalg.expm(dt * lv)
            vec = cache[key] @ vec
        rhos[i] = vec.reshape(dim, dim, order="F")
        t_prev = t
    pops = np.real(np.einsum("tii->ti", rhos))
    trace = QubitTrace(
        times,
        pops[:, 1],
        pops[:, 2:].sum(axis=1),
        pops[:, 0],
        {"solver": "lindblad/expm", "n_tls": n},
    )
    if return_density:
        return trace, rhos
    return trace


def fit_qubit_t1(trace: QubitTrace) -> DecayFit:
    """Qubit T1 from a trace, with oscillatory / non-decaying flags."""
    return fit_decay(trace.times, trace.p_qubit)


def quality_factor(t1: float, qubit_frequency: float) -> float:
    """``Q = 2 pi f T1``."""
    if not (t1 > 0 and qubit_frequency > 0):
        raise DomainError("t1 and qubit_frequency must be positive")
    return TWO_PI * qubit_frequency * t1

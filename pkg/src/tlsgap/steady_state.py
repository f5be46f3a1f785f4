"""Continuous-wave TLS loss: power-saturated loss tangent and its gap scaling."""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class LossModel:
    """Saturable TLS loss.

    ``e_c`` is the strong-field crossover field, which scales as
    ``1/sqrt(T1*T2)``; ``t2_over_t1 = 2`` is the low-temperature limit.
    Only ``e_ac/e_c`` ever matters, so ``e_c`` may be given in any field unit.
    """

    tan_delta0: float
    e_c: float = 1.0
    t2_over_t1: float = 2.0

    def __post_init__(self):
        if not self.tan_delta0 > 0:
            raise DomainError("tan_delta0 must be positive")
        if not self.e_c > 0:
            raise DomainError("e_c must be positive")
        if not 0 < self.t2_over_t1 <= 2:
            raise DomainError("t2_over_t1 must lie in (0, 2]")


def loss_tangent(model: LossModel, e_ac):
    """``tan_delta0 / sqrt(1 + (e_ac/e_c)^2)``."""
    e = np.asarray(e_ac, dtype=float)
    if np.any(e < 0):
        raise DomainError("e_ac must be non-negative")
    out = model.tan_delta0 / np.hypot(1.0, e / model.e_c)
    return float(out) if out.ndim == 0 else out


def rescale_for_gap(model: LossModel, t1_factor: float, allow_degradation: bool = False) -> LossModel:
    """Loss model after every TLS lifetime is multiplied by ``t1_factor``.

    With T2 tied to T1, ``e_c`` falls by exactly ``t1_factor``; the weak-field
    loss tangent is unchanged.
    """
    if not t1_factor > 0:
        raise DomainError("t1_factor must be positive")
    if t1_factor < 1 and not allow_degradation:
        raise DomainError("t1_factor < 1 shortens TLS lifetimes; pass allow_degradation=True")
    return dataclasses.replace(model, e_c=model.e_c / t1_factor)


def quality_factor_from_loss(tan_delta: float, participation: float = 1.0) -> float:
    """Internal quality factor ``1 / (participation * tan_delta)``."""
    if not (0 < tan_delta <= 1 and 0 < participation <= 1):
        raise DomainError("tan_delta and participation must lie in (0, 1]")
    return 1.0 / (participation * tan_delta)


def power_sweep(model: LossModel, t1_factor: float, field_ratios) -> np.ndarray:
    """Rows ``(e_ac/e_c, tan_delta, tan_delta_gapped, ratio)`` over the given field ratios."""
    ratios = np.asarray(field_ratios, dtype=float)
    gapped = rescale_for_gap(model, t1_factor)
    e = ratios * model.e_c
    base = loss_tangent(model, e)
    new = loss_tangent(gapped, e)
    return np.column_stack([ratios, base, new, np.asarray(new) / np.asarray(base)])


def write_power_sweep_csv(rows: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["e_ac_over_ec", "tan_delta", "tan_delta_gapped", "ratio"])
        for r in np.atleast_2d(rows):
            w.writerow([repr(float(x)) for x in r])
    return path


def default_field_ratios(n: int = 61) -> np.ndarray:
    """Log-spaced ``e_ac/e_c`` from 1e-3 to 1e3."""
    return np.logspace(-3, 3, n)


"""Bilinear control systems ``H(t) = H_0 + sum_i u_i(t) H_i`` (hbar = 1)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .operators import DEFAULT_TOL, DimensionError, Tolerances, as_hermitian

__all__ = ["ControlSystem", "ControlSchedule", "Segment"]


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """Drift Hamiltonian plus control Hamiltonians, all Hermitian and ``n x n``."""

    drift: np.ndarray
    controls: tuple = ()
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        h0 = as_hermitian(self.drift, tol=self.tol)
        n = h0.shape[0]
        hs = []
        for i, h in enumerate(self.controls):
            try:
                hs.append(as_hermitian(h, dim=n, tol=self.tol))
            except DimensionError as exc:
                raise DimensionError(f"control {i + 1}: {exc}") from None
        object.__setattr__(self, "drift", h0)
        object.__setattr__(self, "controls", tuple(hs))

    @property
    def n(self) -> int:
        return self.drift.shape[0]

    @property
    def m(self) -> int:
        return len(self.controls)

    def hamiltonian(self, values: Sequence[float]) -> np.ndarray:
        if len(values) != self.m:
            raise ValueError(f"expected {self.m} control values, got {len(values)}")
        h = np.array(self.drift)
        for u, hi in zip(values, self.controls):
            h = h + float(u) * hi
        return h

    def generators(self) -> list[np.ndarray]:
        """``-i H_0, -i H_1, ..., -i H_m``."""
        return [-1j * h for h in (self.drift,) + self.controls]


@dataclass(frozen=True)
class Segment:
    duration: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant control values."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        segs = []
        for k, s in enumerate(self.segments):
            if not isinstance(s, Segment):
                s = Segment(*s)
            d = float(s.duration)
            if not (np.isfinite(d) and d > 0):
                raise ValueError(f"segment {k}: duration must be > 0, got {s.duration!r}")
            vals = tuple(float(u) for u in s.values)
            if not all(np.isfinite(vals)):
                raise ValueError(f"segment {k}: control values must be finite")
            segs.append(Segment(d, vals))
        if segs and len({len(s.values) for s in segs}) != 1:
            raise ValueError("segments carry differing numbers of control values")
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def check_against(self, system: ControlSystem) -> None:
        for k, s in enumerate(self.segments):
            if len(s.values) != system.m:
                raise ValueError(
                    f"segment {k}: {len(s.values)} control values for a system with "
                    f"{system.m} controls"
                )

"""Piecewise-constant propagation, the equivalent Hamilton flow, and shooting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import rk4_flow
from ._parallel import ordered_map
from .geometry import PureState
from .operators import DimensionError
from .systems import ControlSchedule, ControlSystem, Segment

__all__ = [
    "Trajectory",
    "propagate_unitary",
    "propagate_state",
    "propagate_state_stepped",
    "hamilton_flow_integrate",
    "flow_deviation",
    "fidelity",
    "random_shooting_reach",
]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled curve ``t -> p(t)``; ``states[k]`` is the projector matrix at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        s = np.asarray(self.states, dtype=np.complex128)
        if t.ndim != 1 or s.ndim != 3 or s.shape[0] != t.size:
            raise ValueError("times and states must be aligned")
        if t.size and (t[0] != 0.0 or np.any(np.diff(t) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self) -> int:
        return self.times.size

    def pure_states(self) -> list[PureState]:
        return [PureState(0.5 * (s + s.conj().T)) for s in self.states]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _check(system: ControlSystem, p0: PureState | None, schedule: ControlSchedule):
    schedule.check_against(system)
    if p0 is not None and p0.n != system.n:
        raise DimensionError(f"state dimension {p0.n} does not match system dimension {system.n}")


def _segment_eig(system: ControlSystem, seg: Segment):
    return np.linalg.eigh(system.hamiltonian(seg.values))


def _evolver(w: np.ndarray, v: np.ndarray, tau: float) -> np.ndarray:
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


def propagate_unitary(system: ControlSystem, schedule: ControlSchedule) -> np.ndarray:
    """``U(T)`` for ``i dU/dt = H(t) U``, ``U(0) = I``; later segments multiply on the left."""
    _check(system, None, schedule)
    u = np.eye(system.n, dtype=np.complex128)
    for seg in schedule.segments:
        w, v = _segment_eig(system, seg)
        u = _evolver(w, v, seg.duration) @ u
    return u


def _grid_counts(schedule: ControlSchedule, step: float) -> list[int]:
    return [max(1, math.ceil(seg.duration / step - 1e-9)) for seg in schedule.segments]


def _exact_on_grid(system, p0, schedule, counts) -> Trajectory:
    times = [0.0]
    states = [np.array(p0.projector)]
    t0 = 0.0
    p = np.array(p0.projector)
    for seg, k in zip(schedule.segments, counts):
        w, v = _segment_eig(system, seg)
        for j in range(1, k + 1):
            tau = seg.duration * j / k
            u = _evolver(w, v, tau)
            states.append(u @ p @ u.conj().T)
            times.append(t0 + tau)
        p = states[-1]
        t0 += seg.duration
    return Trajectory(np.array(times), np.array(states))


def propagate_state(
    system: ControlSystem,
    p0: PureState,
    schedule: ControlSchedule,
    samples_per_segment: int = 1,
) -> Trajectory:
    """Exact ``p(t) = U(t) p0 U(t)^H`` on a grid uniform within each segment."""
    _check(system, p0, schedule)
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    return _exact_on_grid(system, p0, schedule, [samples_per_segment] * len(schedule.segments))


def propagate_state_stepped(
    system: ControlSystem, p0: PureState, schedule: ControlSchedule, step: float
) -> Trajectory:
    """Exact trajectory on the grid :func:`hamilton_flow_integrate` uses for ``step``."""
    _check(system, p0, schedule)
    if not (step > 0 and np.isfinite(step)):
        raise ValueError("step must be positive")
    return _exact_on_grid(system, p0, schedule, _grid_counts(schedule, step))


def hamilton_flow_integrate(
    system: ControlSystem,
    p0: PureState,
    schedule: ControlSchedule,
    step: float,
) -> Trajectory:
    """Integrate ``dp/dt = -i[H(t), p]`` with fixed-step RK4.

    Each segment is split into ``ceil(duration / step)`` equal steps; the
    state is snapped back to the nearest rank-1 projector at every segment
    boundary.
    """
    _check(system, p0, schedule)
    if not (step > 0 and np.isfinite(step)):
        raise ValueError("step must be positive")
    if schedule.segments and step > min(s.duration for s in schedule.segments) * (1 + 1e-12):
        raise ValueError("step is larger than the shortest segment")
    times = [np.zeros(1)]
    states = [np.array(p0.projector)[None]]
    t0 = 0.0
    p = np.array(p0.projector)
    for seg, k in zip(schedule.segments, _grid_counts(schedule, step)):
        h = seg.duration / k
        traj = rk4_flow(system.hamiltonian(seg.values), p, h, k)
        p = PureState.nearest(traj[-1]).projector
        traj[-1] = p
        times.append(t0 + h * np.arange(1, k + 1))
        states.append(traj[1:])
        t0 += seg.duration
    return Trajectory(np.concatenate(times), np.concatenate(states))


def flow_deviation(
    system: ControlSystem, p0: PureState, schedule: ControlSchedule, step: float
) -> float:
    """Max Frobenius gap between exact conjugation and the integrated Hamilton flow."""
    integrated = hamilton_flow_integrate(system, p0, schedule, step)
    exact = propagate_state_stepped(system, p0, schedule, step)
    if not np.allclose(exact.times, integrated.times, rtol=0, atol=1e-12):
        raise RuntimeError("integration and exact grids differ")
    diff = integrated.states - exact.states
    return float(np.max(np.linalg.norm(diff, axis=(1, 2))))


def fidelity(p, q) -> float:
    """``tr(p q)`` for two pure states (projectors or :class:`PureState`)."""
    a = p.projector if isinstance(p, PureState) else np.asarray(p)
    b = q.projector if isinstance(q, PureState) else np.asarray(q)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.trace(a @ b).real)


def random_shooting_reach(
    system: ControlSystem,
    p0: PureState,
    target: PureState,
    budget: int,
    horizon: float,
    seed: int,
    u_max: float = 10.0,
    n_segments: int = 8,
) -> tuple[float, ControlSchedule]:
    """Best final fidelity over random piecewise-constant schedules.

    Candidate 0 is the empty schedule; candidates ``1..budget`` have
    ``n_segments`` equal segments spanning ``horizon`` with controls uniform
    in ``[-u_max, u_max]``, drawn from a generator seeded by ``(seed, index)``.
    Ties go to the lowest index.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not (horizon > 0 and n_segments >= 1 and u_max >= 0):
        raise ValueError("horizon and n_segments must be positive, u_max non-negative")
    if p0.n != system.n or target.n != system.n:
        raise DimensionError("state dimensions do not match the system")
    dt = horizon / n_segments

    def candidate(idx: int) -> tuple[float, ControlSchedule]:
        if idx == 0:
            sched = ControlSchedule(())
        else:
            rng = np.random.default_rng([seed, idx])
            vals = rng.uniform(-u_max, u_max, size=(n_segments, system.m))
            sched = ControlSchedule(tuple(Segment(dt, tuple(row)) for row in vals))
        u = propagate_unitary(system, sched)
        return fidelity(u @ p0.projector @ u.conj().T, target), sched

    results = ordered_map(candidate, range(budget + 1))
    best = 0
    for i, (f, _) in enumerate(results):
        if f > results[best][0]:
            best = i
    return results[best]

"""Compiled vs pure-Python kernel timings.

Times the two hot kernels directly, then two end-to-end workloads that
lean on them (Lie closure in u(6), flow comparison at step 1e-3), with the
backend swapped by rebinding the names the library modules imported.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import contextlib
import sys
import timeit

import numpy as np

import qgc.dynamics
import qgc.lie
from qgc._kernels import _fallback
from qgc.dynamics import flow_deviation
from qgc.geometry import pure_state_from_ket
from qgc.lie import lie_closure
from qgc.systems import ControlSchedule, ControlSystem, Segment

try:
    from qgc._kernels import _core
except ImportError:
    _core = None


def rand_herm(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


@contextlib.contextmanager
def backend(mod):
    saved = qgc.lie.mgs_residual, qgc.dynamics.rk4_flow
    qgc.lie.mgs_residual, qgc.dynamics.rk4_flow = mod.mgs_residual, mod.rk4_flow
    try:
        yield
    finally:
        qgc.lie.mgs_residual, qgc.dynamics.rk4_flow = saved


def workloads(rng):
    n = 4
    H = rand_herm(rng, n)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    p0 = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real

    dim, m = 72, 30
    Q = np.linalg.qr(rng.normal(size=(dim, m)))[0].T.copy()
    x = rng.normal(size=dim)

    gens = [-1j * rand_herm(rng, 6), -1j * np.diag(rng.normal(size=6))]
    sys3 = ControlSystem(rand_herm(rng, 3), (rand_herm(rng, 3),))
    sched = ControlSchedule((Segment(0.5, (0.3,)), Segment(0.5, (-0.8,))))
    start = pure_state_from_ket(rng.normal(size=3) + 1j * rng.normal(size=3))

    return {
        "rk4_flow n=4, 1000 steps": lambda mod: mod.rk4_flow(H, p0, 1e-3, 1000),
        "mgs_residual 30x72": lambda mod: mod.mgs_residual(Q, m, x.copy()),
        "lie_closure u(6)": lambda mod: lie_closure(gens),
        "flow_deviation n=3, step 1e-3": lambda mod: flow_deviation(sys3, start, sched, 1e-3),
    }


def best_time(fn, mod, repeat):
    with backend(mod):
        number = 1
        while timeit.timeit(lambda: fn(mod), number=number) < 0.05:
            number *= 2
        return min(timeit.repeat(lambda: fn(mod), number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':34s} {'cython':>12s} {'python':>12s} {'speedup':>8s}")
    for name, fn in workloads(rng).items():
        tc = best_time(fn, _core, args.repeat)
        tp = best_time(fn, _fallback, args.repeat)
        print(f"{name:34s} {tc * 1e3:10.3f}ms {tp * 1e3:10.3f}ms {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

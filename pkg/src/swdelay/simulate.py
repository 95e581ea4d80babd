"""Fixed-step simulation of switched delay systems.

Classical RK4 on the method-of-steps formulation: the state advances on a
uniform grid, delayed reads come from the stored grid history through cubic
Hermite interpolation (derivatives at t >= 0 are the stored right-hand-side
evaluations; derivatives of the initial history are finite-difference
estimates of the sampled data), and the distributed term is a composite
trapezoid rule on the kernel grid refined to the step grid. Discrete delays,
the horizon and every switching duration must be multiples of the step:
misaligned inputs are rejected rather than silently rounded, so each RK4
step runs under a single active subsystem and runs are reproducible.

Divergence (non-finite state or max-norm beyond 1e12 times the history
norm) is reported as a flag on the returned trajectory, not as an error:
demonstrating instability is a first-class use of the simulator.

The inner loop lives in the compiled extension ``swdelay._stepper`` when
available, with the bit-identical pure-Python twin ``swdelay._stepper_py``
as fallback; see :func:`stepper_backend`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import SplitMix64
from .certify import LclfCertificate
from .errors import StepMismatch
from .model import SwitchedDelaySystem

try:  # compiled hot loop, optional
    from . import _stepper as _backend
    _COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    from . import _stepper_py as _backend
    _COMPILED = False

from . import _stepper_py

#: Divergence is flagged when the max norm exceeds this times the history norm.
DIVERGE_FACTOR = 1e12

_ALIGN_RTOL = 1e-9


def stepper_backend() -> str:
    """Name of the stepper implementation in use."""
    return "compiled" if _COMPILED else "python"


@dataclass(frozen=True, eq=False)
class Constant:
    """Signal that keeps one subsystem active forever."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("subsystem index must be nonnegative")


@dataclass(frozen=True, eq=False)
class Periodic:
    """Signal cycling through (index, duration) entries."""

    schedule: tuple[tuple[int, float], ...]

    def __post_init__(self):
        sched = tuple((int(k), float(d)) for k, d in self.schedule)
        if not sched:
            raise ValueError("periodic schedule must be nonempty")
        if any(d <= 0.0 for _, d in sched):
            raise ValueError("durations must be strictly positive")
        if any(k < 0 for k, _ in sched):
            raise ValueError("subsystem indices must be nonnegative")
        object.__setattr__(self, "schedule", sched)


@dataclass(frozen=True, eq=False)
class RandomDwell:
    """Seeded random signal with dwell times in [min_dwell, max_dwell]."""

    min_dwell: float
    max_dwell: float
    seed: int

    def __post_init__(self):
        if self.min_dwell <= 0.0:
            raise ValueError("min_dwell must be strictly positive")
        if self.max_dwell < self.min_dwell:
            raise ValueError("max_dwell must be >= min_dwell")


SwitchingSignal = Constant | Periodic | RandomDwell


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled switched solution on the uniform step grid."""

    times: np.ndarray
    states: np.ndarray            # (len(times), n)
    active: np.ndarray            # subsystem index driving each grid point
    diverged: bool = False

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _steps_of(duration: float, dt: float, what: str) -> int:
    ratio = duration / dt
    steps = round(ratio)
    if steps < 1 or abs(ratio - steps) > _ALIGN_RTOL * max(1.0, ratio):
        raise StepMismatch(f"{what} {duration} is not a positive multiple "
                           f"of dt={dt}")
    return int(steps)


def _per_step_indices(signal: SwitchingSignal, n_sub: int, steps: int,
                      dt: float) -> np.ndarray:
    active = np.empty(steps + 1, dtype=np.int64)
    if isinstance(signal, Constant):
        if signal.index >= n_sub:
            raise ValueError(f"signal references subsystem {signal.index}, "
                             f"system has {n_sub}")
        active[:] = signal.index
        return active
    if isinstance(signal, Periodic):
        for k, _ in signal.schedule:
            if k >= n_sub:
                raise ValueError(f"signal references subsystem {k}, system "
                                 f"has {n_sub}")
        seg_steps = [(k, _steps_of(d, dt, "schedule duration"))
                     for k, d in signal.schedule]
        pos = 0
        while pos < steps:
            for k, s in seg_steps:
                take = min(s, steps - pos)
                active[pos:pos + take] = k
                pos += take
                if pos >= steps:
                    break
        active[steps] = active[steps - 1]
        return active
    if isinstance(signal, RandomDwell):
        lo = int(math.ceil(signal.min_dwell / dt - _ALIGN_RTOL))
        hi = int(math.floor(signal.max_dwell / dt + _ALIGN_RTOL))
        lo = max(lo, 1)
        if hi < lo:
            raise StepMismatch(
                f"no multiple of dt={dt} lies in the dwell range "
                f"[{signal.min_dwell}, {signal.max_dwell}]")
        rng = SplitMix64(signal.seed)
        pos = 0
        while pos < steps:
            k = rng.randint(n_sub)
            dwell = rng.uniform(signal.min_dwell, signal.max_dwell)
            s = min(max(int(round(dwell / dt)), lo), hi)
            take = min(s, steps - pos)
            active[pos:pos + take] = k
            pos += take
        active[steps] = active[steps - 1]
        return active
    raise TypeError(f"unknown switching signal {signal!r}")


def _history_derivatives(hist: np.ndarray, dt: float) -> np.ndarray:
    """Finite-difference slope estimates of the sampled history.

    Five-point stencils (fourth order) when enough samples exist, degrading
    gracefully for very short histories.
    """
    m = hist.shape[0]
    d = np.zeros_like(hist)
    if m == 1:
        return d
    if m < 5:
        d[0] = (hist[1] - hist[0]) / dt
        d[-1] = (hist[-1] - hist[-2]) / dt
        for i in range(1, m - 1):
            d[i] = (hist[i + 1] - hist[i - 1]) / (2.0 * dt)
        return d
    c = 1.0 / (12.0 * dt)
    d[0] = c * (-25.0 * hist[0] + 48.0 * hist[1] - 36.0 * hist[2]
                + 16.0 * hist[3] - 3.0 * hist[4])
    d[1] = c * (-3.0 * hist[0] - 10.0 * hist[1] + 18.0 * hist[2]
                - 6.0 * hist[3] + hist[4])
    d[2:m - 2] = c * (hist[0:m - 4] - 8.0 * hist[1:m - 3]
                      + 8.0 * hist[3:m - 1] - hist[4:m])
    d[m - 2] = -c * (-3.0 * hist[m - 1] - 10.0 * hist[m - 2]
                     + 18.0 * hist[m - 3] - 6.0 * hist[m - 4] + hist[m - 5])
    d[m - 1] = -c * (-25.0 * hist[m - 1] + 48.0 * hist[m - 2]
                     - 36.0 * hist[m - 3] + 16.0 * hist[m - 4]
                     - 3.0 * hist[m - 5])
    return d


def _pack_subsystems(sys: SwitchedDelaySystem, dt: float):
    """Flatten per-subsystem data into the stepper's packed layout."""
    n = sys.n
    a0 = np.empty((sys.size, n, n))
    disc_ptr = [0]
    disc_half: list[int] = []
    disc_mats: list[np.ndarray] = []
    kern_ptr = [0]
    kern_half: list[int] = []
    kern_ongrid: list[int] = []
    kern_theta: list[float] = []
    kern_w: list[np.ndarray] = []
    for idx, s in enumerate(sys.subsystems):
        a0[idx] = s.a0
        for delay, mat in s.discrete:
            m = _steps_of(delay, dt, "delay")
            disc_half.append(2 * m)
            disc_mats.append(mat)
        disc_ptr.append(len(disc_half))
        if s.kernel is not None:
            nodes = _quadrature_nodes(s.kernel.grid, dt)
            weights = np.zeros(len(nodes))
            for a in range(len(nodes) - 1):
                w = 0.5 * (nodes[a + 1] - nodes[a])
                weights[a] += w
                weights[a + 1] += w
            for theta, w in zip(nodes, weights):
                half = theta / (0.5 * dt)
                half_i = round(half)
                ongrid = abs(half - half_i) <= 1e-9 * max(1.0, abs(half))
                kern_half.append(int(half_i) if ongrid else 0)
                kern_ongrid.append(1 if ongrid else 0)
                kern_theta.append(theta)
                kern_w.append(w * s.kernel.value_at(theta))
        kern_ptr.append(len(kern_half))

    def pack(lst, shape, dtype):
        return np.array(lst, dtype=dtype) if lst else np.zeros(shape,
                                                               dtype=dtype)

    return (np.ascontiguousarray(a0),
            np.array(disc_ptr, dtype=np.int64),
            pack(disc_half, (0,), np.int64),
            pack(disc_mats, (0, n, n), np.float64),
            np.array(kern_ptr, dtype=np.int64),
            pack(kern_half, (0,), np.int64),
            pack(kern_ongrid, (0,), np.uint8),
            pack(kern_theta, (0,), np.float64),
            pack(kern_w, (0, n, n), np.float64))


def _quadrature_nodes(grid: tuple[float, ...], dt: float) -> list[float]:
    """Kernel grid refined with every step-grid offset inside its span."""
    span = -grid[0]
    raw = [float(g) for g in grid]
    j = 0
    while True:
        theta = -j * dt
        if theta < -span - 1e-12:
            break
        raw.append(max(theta, -span))
        j += 1
    raw.sort()
    nodes = [raw[0]]
    for theta in raw[1:]:
        if theta - nodes[-1] > 1e-9 * dt:
            nodes.append(theta)
    return nodes


def simulate(sys: SwitchedDelaySystem, history, signal: SwitchingSignal,
             horizon: float, dt: float,
             backend=None) -> Trajectory:
    """Integrate the switched system from the given history.

    history maps theta in [-h, 0] to the state vector (a constant vector is
    also accepted); it is sampled on the step grid. horizon, every discrete
    delay, the max delay h and every schedule duration must be multiples of
    dt (StepMismatch otherwise). backend overrides the stepper module (used
    by the benchmark; None picks the compiled one when present).
    """
    if dt <= 0.0:
        raise StepMismatch("dt must be strictly positive")
    steps = _steps_of(horizon, dt, "horizon")
    mh = 0
    if sys.h > 0.0:
        mh = _steps_of(sys.h, dt, "max delay h")
    active = _per_step_indices(signal, sys.size, steps, dt)

    if callable(history):
        phi = history
    else:
        const = np.asarray(history, dtype=float).reshape(sys.n)
        phi = lambda theta: const
    n = sys.n
    xs = np.zeros((mh + steps + 1, n))
    for m in range(mh + 1):
        theta = (m - mh) * dt
        val = np.asarray(phi(theta), dtype=float).reshape(n)
        if not np.isfinite(val).all():
            raise ValueError("history values must be finite")
        xs[m] = val
    history_norm = float(np.abs(xs[:mh + 1]).max())
    dhist = _history_derivatives(xs[:mh + 1].copy(), dt)
    dtraj = np.zeros((steps + 1, n))
    threshold = DIVERGE_FACTOR * history_norm

    packed = _pack_subsystems(sys, dt)
    mod = backend if backend is not None else _backend
    steps_done, diverged = mod.run(
        xs, dhist, dtraj, active[:steps].copy(), *packed,
        n, mh, steps, dt, threshold)

    last = mh + steps_done + 1
    times = np.arange(steps_done + 1) * dt
    return Trajectory(times=times,
                      states=xs[mh:last].copy(),
                      active=active[:steps_done + 1].copy(),
                      diverged=bool(diverged))


def pure_python_backend():
    """The fallback stepper module (for benchmarks and tests)."""
    return _stepper_py


def compiled_backend():
    """The compiled stepper module, or None when not built."""
    return _backend if _COMPILED else None


def decay_envelope_check(traj: Trajectory, cert: LclfCertificate,
                         history_norm: float,
                         rel_slack: float = 1e-6) -> bool:
    """Componentwise check of the certified decay envelope.

    True iff |x_i(t)| <= M exp(-alpha t) xi_i / max(xi) * history_norm for
    every grid point, with relative slack for rounding.
    """
    xi = cert.xi / cert.xi.max()
    bound = (cert.envelope_gain * history_norm
             * np.exp(-cert.decay_alpha * traj.times)[:, None]
             * xi[None, :] * (1.0 + rel_slack))
    return bool((np.abs(traj.states) <= bound).all())


def positivity_check(traj: Trajectory, tol: float = 1e-9) -> bool:
    """True iff every component stays above -tol times the running max norm."""
    running = 0.0
    for row in traj.states:
        running = max(running, float(np.abs(row).max()))
        if float(row.min()) < -tol * running:
            return False
    return True


def trajectory_to_csv(traj: Trajectory, stream) -> None:
    """Write ``t,x1,...,xn,sigma`` rows; sigma is the 1-based subsystem."""
    n = traj.states.shape[1]
    header = "t," + ",".join(f"x{i + 1}" for i in range(n)) + ",sigma"
    stream.write(header + "\n")
    for t, row, k in zip(traj.times, traj.states, traj.active):
        cells = [f"{t:.17g}"] + [f"{v:.17g}" for v in row] + [str(int(k) + 1)]
        stream.write(",".join(cells) + "\n")

"""Delta-interaction scattering of labelled balls on a line.

Straight-line trajectories are turned into an ordered collision schedule;
each collision becomes a two-ball gate with reflection amplitude
``-ic/(ic+V)`` and transmission amplitude ``V/(ic+V)`` for relative
velocity ``V`` and coupling ``c``.  The factorisation identity
``H(x,1) H(x+y,2) H(y,1) = H(y,2) H(x+y,1) H(x,2)`` makes the final
unitary a function of the permutation signature alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import perm, qsim
from .perm import Perm


class SimultaneousCollision(ValueError):
    """Two collision events coincide in time; scheduler cannot order them."""

    def __init__(self, events):
        self.events = events
        super().__init__(f"tied collision events: {events}")


@dataclass(frozen=True)
class TrajectorySet:
    """Straight-line initial data: strictly increasing positions, one
    velocity per ball, repulsive coupling c > 0."""

    positions: tuple[float, ...]
    velocities: tuple[float, ...]
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(float(x) for x in self.positions))
        object.__setattr__(self, "velocities", tuple(float(v) for v in self.velocities))
        if len(self.positions) != len(self.velocities):
            raise ValueError("positions and velocities must have equal length")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("positions must be strictly increasing")
        if self.c <= 0:
            raise ValueError("coupling c must be positive")

    @property
    def n(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class Collision:
    time: float
    k: int               # adjacent location pair (k, k+1) at collision time
    relative_velocity: float
    rapidity: float      # relative velocity normalised by c


@dataclass
class CollisionSchedule:
    n: int
    c: float
    collisions: list[Collision] = field(default_factory=list)
    signature: Perm = ()

    def transposition_product(self) -> Perm:
        sigma = perm.identity(self.n)
        for col in self.collisions:
            sigma = perm.position_swap(sigma, col.k)
        return sigma


def delta_gate(p_left: float, p_right: float, c: float, k: int) -> qsim.Gate:
    """Two-ball collision gate for momenta (p_left, p_right) at locations (k, k+1)."""
    if c <= 0:
        raise ValueError("coupling c must be positive")
    return qsim.delta(p_left - p_right, c, k=k)


def build_schedule(traj: TrajectorySet, tie_tol: float = 1e-12,
                   jitter: float | None = None, seed=0,
                   max_retries: int = 8) -> CollisionSchedule:
    """Order all positive-time line crossings into a collision schedule.

    Equal-velocity pairs never collide.  Tied crossing times raise
    SimultaneousCollision unless ``jitter`` is given, in which case the
    initial positions are perturbed by up to ``jitter`` and the build is
    retried (the Yang-Baxter identity makes the outcome tie-insensitive).
    """
    rng = np.random.default_rng(seed)
    positions = np.array(traj.positions, dtype=float)
    for attempt in range(max_retries + 1):
        try:
            return _build_once(positions, traj.velocities, traj.c, tie_tol)
        except SimultaneousCollision:
            if jitter is None or attempt == max_retries:
                raise
            positions = np.array(traj.positions) + rng.uniform(
                -jitter, jitter, size=traj.n
            )
            positions.sort()
    raise AssertionError("unreachable")


def _build_once(positions, velocities, c, tie_tol) -> CollisionSchedule:
    n = len(positions)
    events = []  # (time, line_i, line_j) with i left of j initially
    for i in range(n):
        for j in range(i + 1, n):
            dv = velocities[i] - velocities[j]
            if dv == 0:
                continue
            t = (positions[j] - positions[i]) / dv
            if t > 0:
                events.append((t, i, j))
    events.sort()
    for (t1, *e1), (t2, *e2) in zip(events, events[1:]):
        if abs(t1 - t2) <= tie_tol:
            raise SimultaneousCollision([(t1, *e1), (t2, *e2)])

    order = list(range(n))        # order[slot] = line index at that location
    collisions = []
    for t, i, j in events:
        si, sj = order.index(i), order.index(j)
        if abs(si - sj) != 1:
            raise AssertionError("crossing lines are not adjacent at collision time")
        k = min(si, sj) + 1
        v_left = velocities[order[k - 1]]
        v_right = velocities[order[k]]
        collisions.append(Collision(t, k, v_left - v_right, (v_left - v_right) / c))
        order[k - 1], order[k] = order[k], order[k - 1]

    signature = tuple(x + 1 for x in order)
    return CollisionSchedule(n, c, collisions, signature)


def schedule_circuit(sched: CollisionSchedule) -> list[qsim.Gate]:
    """One collision gate per event, in schedule order."""
    return [
        qsim.delta(col.relative_velocity, sched.c, k=col.k)
        for col in sched.collisions
    ]


def schedule_unitary(sched: CollisionSchedule) -> np.ndarray:
    return qsim.circuit_unitary(schedule_circuit(sched), sched.n)


def ybe_residual(x: float, y: float) -> float:
    """Max-norm residual of the three-ball factorisation identity."""
    lhs = qsim.circuit_unitary(
        [qsim.H(y, k=1), qsim.H(x + y, k=2), qsim.H(x, k=1)], 3
    )
    rhs = qsim.circuit_unitary(
        [qsim.H(x, k=2), qsim.H(x + y, k=1), qsim.H(y, k=2)], 3
    )
    return float(np.abs(lhs - rhs).max())


def ybe_check(x: float, y: float, tol: float = 1e-12) -> bool:
    return ybe_residual(x, y) < tol


def ybe_violation_residual(x: float, y: float, detune: float = 1.0) -> float:
    """Residual after detuning the middle rapidity; nonzero for generic x, y."""
    lhs = qsim.circuit_unitary(
        [qsim.H(y, k=1), qsim.H(x + y + detune, k=2), qsim.H(x, k=1)], 3
    )
    rhs = qsim.circuit_unitary(
        [qsim.H(x, k=2), qsim.H(x + y + detune, k=1), qsim.H(y, k=2)], 3
    )
    return float(np.abs(lhs - rhs).max())


def signature_determinism_check(velocities, trials: int, seed=0, c: float = 1.0,
                                tol: float = 1e-10) -> bool:
    """Fixed velocities: schedules with equal signature give equal unitaries.

    Draws random strictly-increasing initial positions, groups the resulting
    schedules by permutation signature, and compares unitaries within each
    group against the group's first representative.
    """
    velocities = tuple(float(v) for v in velocities)
    n = len(velocities)
    if n > 5:
        raise ValueError("signature determinism check limited to n <= 5")
    rng = np.random.default_rng(seed)
    reference: dict[Perm, np.ndarray] = {}
    for _ in range(trials):
        xs = np.sort(rng.uniform(0.0, 10.0, size=n))
        while np.any(np.diff(xs) < 1e-3):
            xs = np.sort(rng.uniform(0.0, 10.0, size=n))
        try:
            sched = build_schedule(TrajectorySet(tuple(xs), velocities, c))
        except SimultaneousCollision:
            continue
        u = schedule_unitary(sched)
        ref = reference.setdefault(sched.signature, u)
        if np.abs(u - ref).max() > tol:
            return False
    return True

"""Nondeterministic scattering gadgets with postselected measurements.

A gadget schedule interleaves collision gates with label measurements.
``P_{ij}`` projects onto permutations holding label ``i`` at location
``j``; demolition mode additionally freezes the location, after which no
gate may touch it (the detected particle is classical and out of play, so
later collisions simply reach across the frozen slot).

The two demolition gadget families kick ancilla particles off black
particles and postselect on the reflections; conditioned on success the
black pair picks up the rotation ``arctan(z1) + arctan(z2)``.  The
three-particle non-demolition gadget cycles the reversed Yang-Baxter
triangle and two recovery collisions, inducing the closed-form angle
``phi = arctan(-(z1+z2) / (1 - z1 z2 - z1 z2 (z1+z2)^2))`` per iteration.

Circuit compilation rewrites an arbitrary adjacent-X circuit into a
sequence of such gadgets (stationary scheme by default, trajectory scheme
behind a flag); the conditional output distribution over the black labels
reproduces the direct simulation exactly, with an overall success
probability that may be exponentially small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import perm, qsim
from .classical import PermDistribution
from .perm import Perm
from .qsim import Gate, PermState

ZERO_PROB = 1e-14


class ZeroProbabilityOutcome(ValueError):
    """A postselection branch has (numerically) vanishing probability."""


class FrozenPositionError(ValueError):
    """A gate references a location already consumed by a demolition."""


@dataclass(frozen=True)
class MeasurementEvent:
    position: int
    label: int
    demolition: bool = True

    def __post_init__(self):
        if self.position < 1 or self.label < 1:
            raise ValueError("positions and labels are 1-based")


Event = Gate | MeasurementEvent


@dataclass(frozen=True)
class GadgetSchedule:
    """Validated event list over an n-particle space."""

    n: int
    events: tuple[Event, ...]
    ancilla_labels: frozenset[int] = frozenset()

    def __post_init__(self):
        frozen: set[int] = set()
        for ev in self.events:
            if isinstance(ev, MeasurementEvent):
                if not (ev.position <= self.n and ev.label <= self.n):
                    raise ValueError(f"measurement {ev} out of range for n={self.n}")
                if ev.position in frozen:
                    raise FrozenPositionError(f"re-measuring frozen position {ev.position}")
                if ev.demolition:
                    frozen.add(ev.position)
            else:
                p, q = ev.positions()
                if q > self.n:
                    raise ValueError(f"gate positions ({p},{q}) out of range for n={self.n}")
                if p in frozen or q in frozen:
                    raise FrozenPositionError(
                        f"gate on ({p},{q}) touches frozen positions {frozen & {p, q}}"
                    )

    def frozen_map(self) -> dict[int, int]:
        return {
            ev.position: ev.label
            for ev in self.events
            if isinstance(ev, MeasurementEvent) and ev.demolition
        }

    def to_json(self) -> dict:
        events = []
        for ev in self.events:
            if isinstance(ev, MeasurementEvent):
                events.append({
                    "measure": {
                        "position": ev.position,
                        "label": ev.label,
                        "demolition": ev.demolition,
                    }
                })
            else:
                events.append({"gate": qsim.gate_to_json(ev)})
        return {
            "n": self.n,
            "ancilla_labels": sorted(self.ancilla_labels),
            "events": events,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GadgetSchedule":
        events: list[Event] = []
        for ev in obj["events"]:
            if "measure" in ev:
                m = ev["measure"]
                events.append(
                    MeasurementEvent(m["position"], m["label"], m.get("demolition", True))
                )
            else:
                events.append(qsim.gate_from_json(ev["gate"]))
        return cls(int(obj["n"]), tuple(events), frozenset(obj.get("ancilla_labels", ())))


def postselect(state: PermState, ev: MeasurementEvent) -> tuple[PermState, float]:
    """Project onto label-at-location and renormalise.

    Returns the post-measurement state and the pre-normalisation squared
    norm (the Born probability of the selected outcome).
    """
    perms = perm.all_perms(state.n)
    keep = perms[:, ev.position - 1] == ev.label
    projected = np.where(keep, state.amp, 0.0)
    prob = float(np.vdot(projected, projected).real)
    if prob < ZERO_PROB:
        raise ZeroProbabilityOutcome(
            f"outcome label {ev.label} at position {ev.position} has probability {prob}"
        )
    return PermState(state.n, projected / math.sqrt(prob)), prob


@dataclass
class ScheduleResult:
    state: PermState
    success_prob: float
    frozen: dict[int, int]


def run_schedule(sched: GadgetSchedule, state: PermState | None = None) -> ScheduleResult:
    """Execute the schedule; success probability multiplies per postselection."""
    if state is None:
        state = PermState.basis(sched.n)
    if state.n != sched.n:
        raise ValueError("state dimension differs from schedule")
    success = 1.0
    for ev in sched.events:
        if isinstance(ev, MeasurementEvent):
            state, prob = postselect(state, ev)
            success *= prob
        else:
            state = qsim.apply_gate(state, ev)
    return ScheduleResult(state, success, sched.frozen_map())


# ---------------------------------------------------------------------------
# Embedding black particles among ancillas, and reducing back
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _lift_index_map(n_black: int, insertions: tuple[tuple[int, int], ...]) -> np.ndarray:
    """black rank -> lifted rank, inserting (position, label) ancillas."""
    n_full = n_black + len(insertions)
    ins = dict(insertions)
    index = np.empty(math.factorial(n_black), dtype=np.int64)
    black_positions = [p for p in range(1, n_full + 1) if p not in ins]
    for r in range(math.factorial(n_black)):
        sigma = perm.unrank(r, n_black)
        full = [0] * n_full
        for p, lab in ins.items():
            full[p - 1] = lab
        for pos, lab in zip(black_positions, sigma):
            full[pos - 1] = lab
        index[r] = perm.rank(tuple(full))
    return index


def lift_state(state: PermState, insertions: dict[int, int]) -> PermState:
    """Insert ancilla particles (lifted position -> label) around a black state."""
    n_full = state.n + len(insertions)
    index = _lift_index_map(state.n, tuple(sorted(insertions.items())))
    amp = np.zeros(math.factorial(n_full), dtype=complex)
    amp[index] = state.amp
    return PermState(n_full, amp)


def strip_frozen(state: PermState, frozen: dict[int, int],
                 leak_tol: float = 1e-9) -> PermState:
    """Remove demolished positions, renumbering the remaining labels.

    Every surviving amplitude holds the frozen labels at the frozen
    positions, so the state factorises; any weight outside that section is
    leakage and must be negligible.
    """
    if not frozen:
        return state.copy()
    n_red = state.n - len(frozen)
    index = _strip_index_map(state.n, tuple(sorted(frozen.items())))
    reduced = state.amp[index]
    lost = float(np.linalg.norm(state.amp) ** 2 - np.linalg.norm(reduced) ** 2)
    if lost > leak_tol:
        raise ValueError(f"stripping would discard weight {lost}")
    return PermState(n_red, reduced)


@lru_cache(maxsize=None)
def _strip_index_map(n_full: int, frozen: tuple[tuple[int, int], ...]) -> np.ndarray:
    """reduced rank -> full rank for a frozen (position -> label) section."""
    froz = dict(frozen)
    n_red = n_full - len(froz)
    keep_positions = [p for p in range(1, n_full + 1) if p not in froz]
    keep_labels = sorted(set(range(1, n_full + 1)) - set(froz.values()))
    index = np.empty(math.factorial(n_red), dtype=np.int64)
    for r in range(math.factorial(n_red)):
        sigma = perm.unrank(r, n_red)
        full = [0] * n_full
        for p, lab in froz.items():
            full[p - 1] = lab
        for pos, lab in zip(keep_positions, sigma):
            full[pos - 1] = keep_labels[lab - 1]
        index[r] = perm.rank(tuple(full))
    return index


# ---------------------------------------------------------------------------
# Gadget families
# ---------------------------------------------------------------------------


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(U^dag V)| / dim: 1 iff the gates agree up to a global phase."""
    dim = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / dim)


def four_particle_schedule(z1: float, z2: float, c: float = 1.0) -> GadgetSchedule:
    """Demolition gadget of the trajectory scheme on labels (a,1,2,b)=(3,1,2,4).

    The blacks collide with their own relative velocity z1, each ancilla is
    postselected to bounce off its black neighbour, and the momentum-swapped
    blacks collide once more with the ancillas' relative velocity z2.
    """
    return GadgetSchedule(
        n=4,
        events=(
            qsim.delta(z1, c, pair=(2, 3)),
            qsim.delta(z2, c, pair=(1, 2)),
            MeasurementEvent(position=1, label=3, demolition=True),
            qsim.delta(z1, c, pair=(3, 4)),
            MeasurementEvent(position=4, label=4, demolition=True),
            qsim.delta(z2, c, pair=(2, 3)),
        ),
        ancilla_labels=frozenset({3, 4}),
    )


def _two_level_effective(sched: GadgetSchedule, insertions: dict[int, int]) -> tuple[np.ndarray, float]:
    """Induced 2x2 map on a black pair embedded in a gadget schedule."""
    columns = []
    success = None
    for black in ((1, 2), (2, 1)):
        lifted = lift_state(PermState(2, _basis2(black)), insertions)
        result = run_schedule(sched, lifted)
        reduced = strip_frozen(result.state, result.frozen)
        if reduced.n != 2:
            raise AssertionError("gadget did not reduce to the black pair")
        columns.append(reduced.amp)
        success = result.success_prob if success is None else success
        if abs(result.success_prob - success) > 1e-12:
            raise AssertionError("success probability depends on the black input")
    return np.stack(columns, axis=1), float(success)


def _basis2(order: tuple[int, int]) -> np.ndarray:
    amp = np.zeros(2, dtype=complex)
    amp[perm.rank(order)] = 1.0
    return amp


def four_particle_gadget(z1: float, z2: float, c: float = 1.0) -> tuple[np.ndarray, float]:
    """(effective 2x2 gate on the black pair, success probability).

    Conditioned on both detectors reporting their ancilla, the induced map
    equals X(arctan z1 + arctan z2, 1) up to a global phase.
    """
    if not (math.isfinite(z1) and math.isfinite(z2)):
        raise ValueError("rapidities must be finite")
    sched = four_particle_schedule(z1, z2, c)
    return _two_level_effective(sched, insertions={1: 3, 4: 4})


def four_particle_target(z1: float, z2: float) -> np.ndarray:
    theta = math.atan(z1) + math.atan(z2)
    return np.array(
        [[math.cos(theta), 1j * math.sin(theta)],
         [1j * math.sin(theta), math.cos(theta)]]
    )


def navigation_gadget(v1: float, va: float, c: float = 1.0) -> float:
    """Success probability of redirecting a particle by bouncing an ancilla.

    The ancilla approaches from the left; postselecting the detector on its
    label leaves the original particle carrying velocity va.  The success
    probability is the reflection weight c^2 / (c^2 + V^2).
    """
    rel = va - v1
    if rel == 0:
        raise ValueError("equal velocities never collide")
    sched = GadgetSchedule(
        n=2,
        events=(
            qsim.delta(rel, c, pair=(1, 2)),
            MeasurementEvent(position=1, label=2, demolition=True),
        ),
        ancilla_labels=frozenset({2}),
    )
    lifted = lift_state(PermState.basis(1), insertions={1: 2})
    return run_schedule(sched, lifted).success_prob


def three_particle_phi(z1: float, z2: float) -> float:
    """Closed-form rotation angle of one non-demolition gadget iteration."""
    z3 = z1 + z2
    return math.atan2(-z3, 1.0 - z1 * z2 - z1 * z2 * z3 * z3)


def three_particle_schedule(z1: float, z2: float, t: int) -> GadgetSchedule:
    """t iterations of the non-demolition gadget on labels x=1, ancilla=2, y=3.

    Each iteration runs the reversing triangle C(z1, z2) =
    H(z2,1) H(z1+z2,2) H(z1,1) with postselection of the ancilla back at the
    middle, then three recovery collisions (rapidities -z2, -(z1+z2), -z1)
    with postselections that restore the velocity configuration.
    """
    if t < 0:
        raise ValueError("iteration count must be nonnegative")
    z3 = z1 + z2
    block: tuple[Event, ...] = (
        qsim.H(z1, k=1),
        qsim.H(z3, k=2),
        qsim.H(z2, k=1),
        MeasurementEvent(position=2, label=2, demolition=False),
        qsim.H(-z2, k=1),
        MeasurementEvent(position=1, label=2, demolition=False),
        qsim.H(-z3, k=2),
        qsim.H(-z1, k=1),
        MeasurementEvent(position=2, label=2, demolition=False),
    )
    return GadgetSchedule(n=3, events=block * t)


def three_particle_nondemolition(z1: float, z2: float, t: int) -> tuple[np.ndarray, float]:
    """(effective 2x2 gate on labels x, y around the fixed ancilla, success).

    The induced map is cos(t phi) I + i sin(t phi) swap up to global phase,
    with phi = three_particle_phi(z1, z2).
    """
    sched = three_particle_schedule(z1, z2, t)
    basis_states = (perm.identity(3), (3, 2, 1))
    columns = []
    success = 1.0
    for sigma in basis_states:
        result = run_schedule(sched, PermState.basis(3, sigma))
        amps = np.array([result.state.amplitude(b) for b in basis_states])
        leak = 1.0 - float(np.vdot(amps, amps).real)
        if leak > 1e-10:
            raise AssertionError(f"state leaked outside the x/y span: {leak}")
        columns.append(amps)
        success = result.success_prob
    return np.stack(columns, axis=1), success


# ---------------------------------------------------------------------------
# Compilation of adjacent-X circuits into postselected schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GadgetSegment:
    """One gadget instance: ancilla insertions plus the lifted schedule."""

    schedule: GadgetSchedule
    insertions: tuple[tuple[int, int], ...]  # (lifted position, ancilla label)


@dataclass(frozen=True)
class GadgetProgram:
    n: int
    scheme: str
    segments: tuple[GadgetSegment, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "scheme": self.scheme,
            "segments": [
                {"insertions": [list(x) for x in seg.insertions],
                 "schedule": seg.schedule.to_json()}
                for seg in self.segments
            ],
        }


def _wrap_angle(theta: float) -> float:
    """Reduce mod pi into [0, pi); X(theta) changes only by a global sign."""
    out = math.fmod(theta, math.pi)
    return out + math.pi if out < 0 else out


def _stationary_segment(n: int, k: int, u: float, w: float, c: float) -> GadgetSegment:
    """Stationary gadget around blacks (k, k+1): four ancillas, four bounces.

    Lifted layout inserts A_L, F_L before black k and F_R, A_R after black
    k+1.  The fired ancillas kick the blacks to velocities (u, -w), the
    blacks collide with rapidity u + w, and the outer stationary ancillas
    absorb the momenta again, every bounce postselected.
    """
    a_l, f_l, f_r, a_r = n + 1, n + 2, n + 3, n + 4
    insertions = ((k, a_l), (k + 1, f_l), (k + 4, f_r), (k + 5, a_r))
    events: tuple[Event, ...] = (
        qsim.delta(u, c, pair=(k + 1, k + 2)),
        MeasurementEvent(position=k + 1, label=f_l, demolition=True),
        qsim.delta(w, c, pair=(k + 3, k + 4)),
        MeasurementEvent(position=k + 4, label=f_r, demolition=True),
        qsim.delta(u + w, c, pair=(k + 2, k + 3)),
        qsim.delta(w, c, pair=(k, k + 2)),
        MeasurementEvent(position=k, label=a_l, demolition=True),
        qsim.delta(u, c, pair=(k + 3, k + 5)),
        MeasurementEvent(position=k + 5, label=a_r, demolition=True),
    )
    sched = GadgetSchedule(n + 4, events, frozenset({a_l, f_l, f_r, a_r}))
    return GadgetSegment(sched, insertions)


def _trajectory_segment(n: int, k: int, z1: float, z2: float,
                        va_rel: float, vb_rel: float, c: float) -> GadgetSegment:
    """Four-particle demolition gadget around blacks (k, k+1).

    z1, z2 set the conditional rotation; va_rel and vb_rel are the true
    ancilla-black relative velocities, which only scale the success
    probability and global phase.
    """
    a, b = n + 1, n + 2
    insertions = ((k, a), (k + 3, b))
    events: list[Event] = []
    if z1 != 0.0:
        events.append(qsim.delta(z1, c, pair=(k + 1, k + 2)))
    events += [
        qsim.delta(va_rel, c, pair=(k, k + 1)),
        MeasurementEvent(position=k, label=a, demolition=True),
        qsim.delta(vb_rel, c, pair=(k + 2, k + 3)),
        MeasurementEvent(position=k + 3, label=b, demolition=True),
        qsim.delta(z2, c, pair=(k + 1, k + 2)),
    ]
    sched = GadgetSchedule(n + 2, tuple(events), frozenset({a, b}))
    return GadgetSegment(sched, insertions)


def _navigation_segment(n: int, p: int, v_black: float, c: float) -> GadgetSegment:
    """Reset the black at position p to rest by bouncing a resting ancilla.

    The ancilla sits on the side the particle moves toward, so the relative
    velocity at the collision is |v_black| and the postselected reflection
    leaves the black stationary.
    """
    anc = n + 1
    if v_black > 0:  # ancilla on the right catches the particle
        insertions = ((p + 1, anc),)
        gate = qsim.delta(v_black, c, pair=(p, p + 1))
        meas = MeasurementEvent(position=p + 1, label=anc, demolition=True)
    else:
        insertions = ((p, anc),)
        gate = qsim.delta(-v_black, c, pair=(p, p + 1))
        meas = MeasurementEvent(position=p, label=anc, demolition=True)
    sched = GadgetSchedule(n + 1, (gate, meas), frozenset({anc}))
    return GadgetSegment(sched, insertions)


_POLE_TOL = 1e-9


def compile_x_circuit(gates, n: int, scheme: str = "stationary",
                      c: float = 1.0) -> GadgetProgram:
    """Rewrite an adjacent-X circuit as postselected scattering gadgets.

    The stationary scheme keeps black particles at rest between gadgets; a
    single gadget realises any angle in (0, pi/2) and larger angles split
    into two half-angle gadgets.  The trajectory scheme tracks the black
    velocities imparted by each gadget, tunes the ancilla pair to make up
    the remaining rotation, and falls back to navigation resets when the
    required rapidity would diverge.
    """
    if scheme not in ("stationary", "trajectory"):
        raise ValueError(f"unknown scheme {scheme!r}")
    for g in gates:
        if g.kind != "X" or g.pair is not None:
            raise ValueError("adjacent X circuit required")
        if not (1 <= g.k <= n - 1):
            raise ValueError(f"gate position {g.k} out of range for n={n}")

    segments: list[GadgetSegment] = []
    if scheme == "stationary":
        for g in gates:
            theta = _wrap_angle(g.theta)
            if theta == 0.0:
                continue
            angles = [theta] if theta < math.pi / 2 else [theta / 2, theta / 2]
            for ang in angles:
                z = math.tan(ang)
                segments.append(_stationary_segment(n, g.k, z / 2, z / 2, c))
        return GadgetProgram(n, scheme, tuple(segments))

    velocity = [0.0] * (n + 2)  # velocity[p] = black velocity at position p

    def reset_pair(k: int):
        for p in (k, k + 1):
            if velocity[p] != 0.0:
                segments.append(_navigation_segment(n, p, velocity[p], c))
                velocity[p] = 0.0

    def emit(k: int, theta: float):
        v1, v2 = velocity[k], velocity[k + 1]
        z1 = v1 - v2
        extra = math.remainder(theta - math.atan(z1), math.pi)
        if abs(abs(extra) - math.pi / 2) < _POLE_TOL:
            reset_pair(k)
            extra = math.remainder(theta, math.pi)
            if abs(abs(extra) - math.pi / 2) < _POLE_TOL:
                emit(k, theta / 2)
                reset_pair(k)
                emit(k, theta - theta / 2)
                return
            v1 = v2 = z1 = 0.0
        z2 = math.tan(extra)
        va, vb = z2 / 2.0, -z2 / 2.0
        segments.append(_trajectory_segment(n, k, z1, z2, va - v2, v1 - vb, c))
        velocity[k], velocity[k + 1] = vb, va

    for g in gates:
        emit(g.k, g.theta)
    return GadgetProgram(n, scheme, tuple(segments))


def run_compiled(program: GadgetProgram,
                 state: PermState | None = None) -> tuple[PermDistribution, float]:
    """Conditional output distribution over the black labels, and the total
    success probability of all postselections."""
    if state is None:
        state = PermState.basis(program.n)
    if state.n != program.n:
        raise ValueError("input state dimension differs from program")
    success = 1.0
    for seg in program.segments:
        lifted = lift_state(state, dict(seg.insertions))
        result = run_schedule(seg.schedule, lifted)
        state = strip_frozen(result.state, result.frozen)
        success *= result.success_prob
    return state.measure_distribution(), success

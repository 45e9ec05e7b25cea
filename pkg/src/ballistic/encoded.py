"""Encoded qubit computation inside the permutation space.

Two encodings are implemented.  The two-label encoding stores one qubit
per disjoint label pair (a < b) as |0> = |ab>, |1> = i|ba>, with rotations
from plain position swaps and an entangling gate from label-conditioned
controlled swaps.  The symmetric-subgroup encoding maps weight-k bit
strings to superpositions over a Young subgroup coset, reducing exchange
interaction circuits exp(i theta E) to position-swap circuits with exact
output statistics.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import perm, qsim
from .perm import Perm
from .qsim import Gate, PermState


@dataclass(frozen=True)
class EncodedQubitLayout:
    """Disjoint label pairs (a < b), qubit q occupying positions (2q-1, 2q)."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for a, b in self.pairs:
            if not a < b:
                raise ValueError(f"pair {(a, b)} must be ordered")
            if {a, b} & seen:
                raise ValueError("qubit label pairs must be disjoint")
            seen.update((a, b))

    @property
    def n_qubits(self) -> int:
        return len(self.pairs)

    @property
    def n_labels(self) -> int:
        return max(b for _, b in self.pairs)

    def positions(self, qubit: int) -> tuple[int, int]:
        if not (1 <= qubit <= self.n_qubits):
            raise ValueError(f"no qubit {qubit}")
        return 2 * qubit - 1, 2 * qubit


def encoded_basis_state(layout: EncodedQubitLayout, bits: str) -> PermState:
    """|bits> with phase i per set bit; unused labels padded at the end."""
    if len(bits) != layout.n_qubits:
        raise ValueError("bit count differs from qubit count")
    n = layout.n_labels
    oneline: list[int] = []
    for (a, b), bit in zip(layout.pairs, bits):
        oneline += [b, a] if bit == "1" else [a, b]
    used = set(oneline)
    oneline += [x for x in range(1, n + 1) if x not in used]
    state = PermState.basis(n, tuple(oneline))
    state.amp *= 1j ** bits.count("1")
    return state


def controlled_swap(pairs, k: int, l: int, n: int) -> list[Gate]:
    """Gate sequence applying +-i swap(k, l) when the labels at (k, l) form
    a listed pair; starred pairs get the inverse sign.

    ``pairs`` is a list of ((a, b), starred) entries.  The core is a single
    symmetric-angle-table gate on adjacent positions; a non-adjacent (k, l)
    is reached by conjugating with bare position swaps, whose i phases
    cancel between the two flanks.
    """
    if not (1 <= k < l <= n):
        raise ValueError(f"positions ({k},{l}) out of range for n={n}")
    table = np.zeros((n, n))
    seen: set[frozenset[int]] = set()
    for (a, b), starred in pairs:
        if not (1 <= a <= n and 1 <= b <= n and a != b):
            raise ValueError(f"bad label pair {(a, b)}")
        if frozenset((a, b)) in seen:
            raise ValueError(f"overlapping label pair {(a, b)}")
        seen.add(frozenset((a, b)))
        angle = -math.pi / 2 if starred else math.pi / 2
        table[a - 1, b - 1] = angle
        table[b - 1, a - 1] = angle
    core = qsim.Z(table, k=l - 1)
    before = [qsim.X(math.pi / 2, k=j) for j in range(k, l - 1)]
    after = [qsim.X(-math.pi / 2, k=j) for j in reversed(range(k, l - 1))]
    return before + [core] + after


def encoded_cnot(layout: EncodedQubitLayout) -> list[Gate]:
    """Controlled NOT on two encoded qubits, control first.

    Five conditional swaps: shuttle the control's low label next to the
    target, swap the target pair conditioned on it, shuttle back with the
    inverse sign, then a squared conditional swap to fix the residual sign
    on the control-on column.  Verified against the truth table
    |00>->|00>, |01>->|01>, |10>->|11>, |11>->|10> by exact simulation.
    """
    if layout.n_qubits != 2:
        raise ValueError("encoded_cnot needs exactly two qubits")
    (a, _b), (x, y) = layout.pairs
    n = layout.n_labels
    seq: list[Gate] = []
    seq += controlled_swap([((a, x), False), ((a, y), False)], 2, 3, n)
    seq += controlled_swap([((x, y), False)], 2, 4, n)
    seq += controlled_swap([((a, x), True), ((a, y), True)], 2, 3, n)
    seq += controlled_swap([((a, x), False)], 2, 3, n)
    seq += controlled_swap([((a, x), False)], 2, 3, n)
    return seq


def encoded_rotation(layout: EncodedQubitLayout, qubit: int, theta: float) -> Gate:
    """|0> -> cos(theta)|0> + sin(theta)|1> on one encoded qubit.

    A bare position swap on the pair realises the real rotation; the i in
    the |1> encoding absorbs the swap's phase.
    """
    p, q = layout.positions(qubit)
    if q == p + 1:
        return qsim.X(theta, k=p)
    return qsim.X(theta, pair=(p, q))


def encoded_two_qubit_matrix(layout: EncodedQubitLayout, gates) -> np.ndarray:
    """4x4 matrix of a gate sequence on the encoded two-qubit basis."""
    cols = []
    basis = ["00", "01", "10", "11"]
    for bits in basis:
        state = qsim.apply_circuit(encoded_basis_state(layout, bits), gates)
        col = []
        for out in basis:
            ref = encoded_basis_state(layout, out)
            col.append(complex(np.vdot(ref.amp, state.amp)))
        leak = state.norm() ** 2 - sum(abs(c) ** 2 for c in col)
        if leak > 1e-10:
            raise ValueError(f"gate sequence leaks {leak} outside the code space")
        cols.append(col)
    return np.array(cols, dtype=complex).T


# ---------------------------------------------------------------------------
# Exchange interaction circuits on qubits
# ---------------------------------------------------------------------------


MAX_QUBITS = 12


@dataclass(frozen=True)
class ExchangeGate:
    theta: float
    i: int
    j: int


@dataclass(frozen=True)
class ExchangeCircuit:
    n: int
    gates: tuple[ExchangeGate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n > MAX_QUBITS:
            raise ValueError(f"n={self.n} exceeds dense qubit limit {MAX_QUBITS}")
        for g in self.gates:
            if not (1 <= g.i < g.j <= self.n):
                raise ValueError(f"exchange ({g.i},{g.j}) out of range for n={self.n}")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "gates": [{"theta": g.theta, "i": g.i, "j": g.j} for g in self.gates],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> "ExchangeCircuit":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            int(obj["n"]),
            tuple(ExchangeGate(float(g["theta"]), int(g["i"]), int(g["j"]))
                  for g in obj["gates"]),
        )


def _exchange_partner(n: int, i: int, j: int) -> np.ndarray:
    """Index map on 2^n basis states swapping bits i and j (1-based, bit 1
    is the leftmost position in the string reading)."""
    idx = np.arange(2 ** n)
    bi = (idx >> (n - i)) & 1
    bj = (idx >> (n - j)) & 1
    differ = bi ^ bj
    return idx ^ (differ << (n - i)) ^ (differ << (n - j))


def exchange_apply(state: np.ndarray, n: int, g: ExchangeGate) -> np.ndarray:
    partner = _exchange_partner(n, g.i, g.j)
    return math.cos(g.theta) * state + 1j * math.sin(g.theta) * state[partner]


def bit_basis_state(bits: str) -> np.ndarray:
    state = np.zeros(2 ** len(bits), dtype=complex)
    state[int(bits, 2)] = 1.0
    return state


def exchange_simulate(circ: ExchangeCircuit, state_or_bits) -> np.ndarray:
    """Evolve a qubit state under the exchange circuit; Hamming weight is
    conserved sector by sector."""
    if isinstance(state_or_bits, str):
        state = bit_basis_state(state_or_bits)
    else:
        state = np.asarray(state_or_bits, dtype=complex)
    if state.shape != (2 ** circ.n,):
        raise ValueError("state dimension is not 2^n")
    for g in circ.gates:
        state = exchange_apply(state, circ.n, g)
    return state


def exchange_distribution(circ: ExchangeCircuit, state_or_bits) -> dict[str, float]:
    state = exchange_simulate(circ, state_or_bits)
    probs = np.abs(state) ** 2
    return {
        format(idx, f"0{circ.n}b"): float(p)
        for idx, p in enumerate(probs)
        if p > 1e-300
    }


# ---------------------------------------------------------------------------
# Reduction to ball permuting: symmetric-subgroup encoding
# ---------------------------------------------------------------------------


def hamming_encode(bits: str) -> PermState:
    """Uniform Young-subgroup superposition encoding of a weight-k string.

    Labels 1..k stand for set bits: the state is the normalised sum of all
    arrangements placing {1..k} on the one-positions of ``bits`` and the
    rest elsewhere, with no relative phases.
    """
    n = len(bits)
    k = bits.count("1")
    ones = [p for p, b in enumerate(bits, start=1) if b == "1"]
    zeros = [p for p, b in enumerate(bits, start=1) if b == "0"]
    amp = np.zeros(math.factorial(n), dtype=complex)
    norm = 1.0 / math.sqrt(math.factorial(k) * math.factorial(n - k))
    for low in itertools.permutations(range(1, k + 1)):
        for high in itertools.permutations(range(k + 1, n + 1)):
            oneline = [0] * n
            for pos, lab in zip(ones, low):
                oneline[pos - 1] = lab
            for pos, lab in zip(zeros, high):
                oneline[pos - 1] = lab
            amp[perm.rank(tuple(oneline))] = norm
    return PermState(n, amp)


def encode_qubit_state(state: np.ndarray, n: int, k: int) -> PermState:
    """Lift a weight-k qubit-sector state into the permutation space."""
    out = np.zeros(math.factorial(n), dtype=complex)
    for idx in range(2 ** n):
        a = state[idx]
        if a == 0:
            continue
        bits = format(idx, f"0{n}b")
        if bits.count("1") != k:
            raise ValueError("state has weight outside the requested sector")
        out += a * hamming_encode(bits).amp
    return PermState(n, out)


def mirror_circuit(circ: ExchangeCircuit) -> list[Gate]:
    """Exchange gates replaced by position-swap gates on the same pairs."""
    return [
        qsim.X(g.theta, k=g.i) if g.j == g.i + 1 else qsim.X(g.theta, pair=(g.i, g.j))
        for g in circ.gates
    ]


def readout_bits(sigma: Perm, k: int) -> str:
    """Threshold a measured permutation: labels 1..k become ones."""
    return "".join("1" if x <= k else "0" for x in sigma)


def exchange_reduction_distribution(circ: ExchangeCircuit, bits: str) -> dict[str, float]:
    """Bit-string distribution of the mirrored permutation circuit.

    Evolves the encoded state with position swaps, measures in the
    permutation basis, and thresholds labels; matches exchange_simulate
    exactly.
    """
    if len(bits) != circ.n:
        raise ValueError("input length differs from circuit")
    if circ.n > 7:
        raise ValueError("reduction is dense over n!; limited to n <= 7")
    k = bits.count("1")
    state = qsim.apply_circuit(hamming_encode(bits), mirror_circuit(circ))
    weights = state.measure_distribution().weights
    out: dict[str, float] = {}
    perms = perm.all_perms(circ.n)
    ones_mask = perms <= k
    for r, w in enumerate(weights):
        if w <= 1e-300:
            continue
        key = "".join("1" if o else "0" for o in ones_mask[r])
        out[key] = out.get(key, 0.0) + float(w)
    return out


def exchange_reduction_sample(circ: ExchangeCircuit, bits: str, seed) -> str:
    """One sampled readout of the mirrored circuit."""
    state = qsim.apply_circuit(hamming_encode(bits), mirror_circuit(circ))
    sigma = state.sample_measurement(seed)
    return readout_bits(sigma, bits.count("1"))


def total_variation(p: dict[str, float], q: dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0.0) - q.get(x, 0.0)) for x in keys)


# ---------------------------------------------------------------------------
# Three-spin logical qubit
# ---------------------------------------------------------------------------


def logical_three_spin() -> tuple[np.ndarray, np.ndarray]:
    """(|0_L>, |1_L>) in the weight-1 sector of three qubits."""
    zero = np.zeros(8, dtype=complex)
    one = np.zeros(8, dtype=complex)
    zero[int("010", 2)] = 1.0 / math.sqrt(2)
    zero[int("100", 2)] = -1.0 / math.sqrt(2)
    one[int("001", 2)] = 2.0 / math.sqrt(6)
    one[int("010", 2)] = -1.0 / math.sqrt(6)
    one[int("100", 2)] = -1.0 / math.sqrt(6)
    return zero, one


def third_bit_zero_probability(state: np.ndarray) -> float:
    probs = np.abs(state) ** 2
    return float(sum(p for idx, p in enumerate(probs) if not idx & 1))


def distinguish(copies: int, seed, which: str = "one") -> bool:
    """Decide 0_L unless any of the k third-bit measurements reads 1.

    Sampling the logical-one state, the decision is wrong iff every copy
    reads 0, which happens with probability (1/3)^copies; the logical-zero
    state is never misidentified.
    Returns True when the decision is 0_L.
    """
    if copies < 1:
        raise ValueError("need at least one copy")
    zero, one = logical_three_spin()
    state = zero if which == "zero" else one
    p0 = third_bit_zero_probability(state)
    rng = np.random.default_rng(seed)
    return bool(np.all(rng.random(copies) < p0))

"""Exact amplitude evolution on the n!-dimensional permutation Hilbert space.

Basis states are permutations in one-line notation, indexed by
lexicographic rank.  All gates are two-level in the pairing sense: they
couple each basis permutation with exactly one partner, so a gate touches
every amplitude once.

Gate families (theta real, z real, angle tables real symmetric):

- ``X(theta, k)``: cos(theta) I + i sin(theta) (swap of positions k, k+1)
- ``Y(theta, k)``: same form with the swap of *labels* k, k+1
- ``Z(table, k)``: position swap with angle table[a][b] for the labels
  a, b currently at positions k, k+1
- ``W(table, k)``: label swap of k, k+1 with angle table[a][b] for the
  *positions* a, b where those labels sit
- ``H(z, k)``   : X(arctan z, k), the rapidity form
- ``DELTA(v, c, k)``: the physical two-ball collision
  (-ic/(ic+v)) I + (v/(ic+v)) swap, equal to H(v/c, k) up to global phase

X, H and DELTA accept an explicit non-adjacent position pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import perm
from .classical import PermDistribution, ResourceLimitError
from .perm import Perm

NORM_TOL = 1e-10
MAX_MATRIX_N = 6


@dataclass(frozen=True)
class Gate:
    kind: str
    k: int | None = None
    pair: tuple[int, int] | None = None
    theta: float | None = None
    z: float | None = None
    c: float | None = None
    table: tuple[tuple[float, ...], ...] | None = None

    def positions(self) -> tuple[int, int]:
        if self.pair is not None:
            return self.pair
        return (self.k, self.k + 1)


def X(theta: float, k: int | None = None, pair: tuple[int, int] | None = None) -> Gate:
    if (k is None) == (pair is None):
        raise ValueError("give exactly one of k or pair")
    return Gate("X", k=k, pair=pair, theta=float(theta))


def Y(theta: float, k: int) -> Gate:
    return Gate("Y", k=k, theta=float(theta))


def _check_table(table, n_labels_hint=None) -> tuple[tuple[float, ...], ...]:
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("angle table must be square")
    if np.abs(arr - arr.T).max() > 1e-15:
        raise ValueError("angle table must be symmetric (unitarity)")
    return tuple(tuple(row) for row in arr)


def Z(table, k: int | None = None, pair: tuple[int, int] | None = None) -> Gate:
    if (k is None) == (pair is None):
        raise ValueError("give exactly one of k or pair")
    return Gate("Z", k=k, pair=pair, table=_check_table(table))


def W(table, k: int) -> Gate:
    return Gate("W", k=k, table=_check_table(table))


def H(z: float, k: int | None = None, pair: tuple[int, int] | None = None) -> Gate:
    if (k is None) == (pair is None):
        raise ValueError("give exactly one of k or pair")
    return Gate("H", k=k, pair=pair, z=float(z))


def delta(v: float, c: float = 1.0, k: int | None = None,
          pair: tuple[int, int] | None = None) -> Gate:
    if c <= 0:
        raise ValueError("interaction strength c must be positive")
    if (k is None) == (pair is None):
        raise ValueError("give exactly one of k or pair")
    return Gate("DELTA", k=k, pair=pair, z=float(v), c=float(c))


@dataclass
class PermState:
    """Complex amplitude vector over all n! permutations."""

    n: int
    amp: np.ndarray

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=complex)
        if self.amp.shape != (math.factorial(self.n),):
            raise ValueError("amplitude vector must have length n!")

    @classmethod
    def basis(cls, n: int, sigma: Perm | None = None) -> "PermState":
        amp = np.zeros(math.factorial(n), dtype=complex)
        amp[perm.rank(sigma) if sigma is not None else 0] = 1.0
        return cls(n, amp)

    def copy(self) -> "PermState":
        return PermState(self.n, self.amp.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def check_normalized(self, tol: float = NORM_TOL):
        if abs(self.norm() - 1.0) > tol:
            raise ValueError(f"state norm {self.norm()} drifted beyond {tol}")

    def amplitude(self, sigma: Perm) -> complex:
        return complex(self.amp[perm.rank(sigma)])

    def measure_distribution(self) -> PermDistribution:
        self.check_normalized()
        w = np.abs(self.amp) ** 2
        return PermDistribution(self.n, w / w.sum())

    def sample_measurement(self, seed) -> Perm:
        self.check_normalized()
        rng = np.random.default_rng(seed)
        w = np.abs(self.amp) ** 2
        r = int(rng.choice(len(self.amp), p=w / w.sum()))
        return perm.unrank(r, self.n)


def _gate_coefficients(g: Gate, n: int):
    """(pair_table, diag coefficient, off coefficient); coefficients may be
    scalars or per-rank vectors for the label-dependent families."""
    p, q = g.positions()
    if not (1 <= p < q <= n):
        raise ValueError(f"gate positions ({p},{q}) out of range for n={n}")
    if g.kind == "X":
        table = perm.position_swap_table(n, p, q)
        return table, math.cos(g.theta), 1j * math.sin(g.theta)
    if g.kind == "H":
        th = math.atan(g.z)
        table = perm.position_swap_table(n, p, q)
        return table, math.cos(th), 1j * math.sin(th)
    if g.kind == "DELTA":
        table = perm.position_swap_table(n, p, q)
        denom = 1j * g.c + g.z
        return table, -1j * g.c / denom, g.z / denom
    if g.kind == "Y":
        if g.k is None or g.k > n - 1:
            raise ValueError(f"Y gate label index {g.k} out of range for n={n}")
        table = perm.label_swap_table(n, g.k)
        return table, math.cos(g.theta), 1j * math.sin(g.theta)
    if g.kind == "Z":
        angles = np.asarray(g.table, dtype=float)
        if angles.shape[0] < n:
            raise ValueError("Z table smaller than label count")
        perms = perm.all_perms(n)
        a = perms[:, p - 1].astype(int) - 1
        b = perms[:, q - 1].astype(int) - 1
        th = angles[a, b]
        table = perm.position_swap_table(n, p, q)
        return table, np.cos(th), 1j * np.sin(th)
    if g.kind == "W":
        angles = np.asarray(g.table, dtype=float)
        if angles.shape[0] < n:
            raise ValueError("W table smaller than position count")
        if g.k is None or g.k > n - 1:
            raise ValueError(f"W gate label index {g.k} out of range for n={n}")
        inv = perm.inverse_positions(n)
        a = inv[:, g.k - 1].astype(int) - 1
        b = inv[:, g.k].astype(int) - 1
        th = angles[a, b]
        table = perm.label_swap_table(n, g.k)
        return table, np.cos(th), 1j * np.sin(th)
    raise ValueError(f"unknown gate kind {g.kind!r}")


def apply_gate(state: PermState, g: Gate) -> PermState:
    """Apply one gate; touches each amplitude exactly once."""
    table, diag, off = _gate_coefficients(g, state.n)
    return PermState(state.n, diag * state.amp + off * state.amp[table])


def apply_circuit(state: PermState, gates) -> PermState:
    for g in gates:
        state = apply_gate(state, g)
    return state


def circuit_unitary(gates, n: int) -> np.ndarray:
    """Materialise the full n! x n! matrix (guarded to small n)."""
    if n > MAX_MATRIX_N:
        raise ResourceLimitError(f"n={n} exceeds matrix limit {MAX_MATRIX_N}")
    dim = math.factorial(n)
    u = np.eye(dim, dtype=complex)
    for g in gates:
        table, diag, off = _gate_coefficients(g, n)
        diag = np.asarray(diag).reshape(-1, 1) if np.ndim(diag) else diag
        off = np.asarray(off).reshape(-1, 1) if np.ndim(off) else off
        u = diag * u + off * u[table, :]
    return u


def gate_matrix(g: Gate, n: int) -> np.ndarray:
    return circuit_unitary([g], n)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def _require_x_only(gates):
    bad = [g.kind for g in gates if g.kind not in ("X", "H", "DELTA")]
    if bad:
        raise ValueError(f"position-swap (X-type) circuit required, found {bad}")


def column_permutation_check(gates, n: int, tol: float = 1e-12) -> bool:
    """Every column of a position-swap circuit is a relabelling of the first.

    Checks U[rank(relabel(sigma, pi)), rank(pi)] == U[rank(sigma), rank(e)]
    for all sigma, pi.
    """
    _require_x_only(gates)
    u = circuit_unitary(gates, n)
    alpha = u[:, 0]
    for pi_rank in range(u.shape[1]):
        pi = perm.unrank(pi_rank, n)
        reorder = perm.relabel_ranks(n, pi)
        if np.abs(u[reorder, pi_rank] - alpha).max() > tol:
            return False
    return True


def xy_duality_check(gates, n: int, tol: float = 1e-12) -> bool:
    """Amplitudes of the Y-mirrored circuit at sigma equal the X amplitudes
    at sigma^{-1}, starting from the identity basis state."""
    for g in gates:
        if g.kind != "X" or g.pair is not None:
            raise ValueError("adjacent X circuit required")
    x_state = apply_circuit(PermState.basis(n), gates)
    y_state = apply_circuit(PermState.basis(n), [Y(g.theta, g.k) for g in gates])
    inv_table = perm.rank_rows(
        np.argsort(perm.all_perms(n), axis=1).astype(np.int8) + 1
    )
    return bool(np.abs(y_state.amp - x_state.amp[inv_table]).max() <= tol)


def trace_identity_check(gates, n: int, tol: float = 1e-9):
    """Tr(C) against n! times the identity-diagonal amplitude."""
    _require_x_only(gates)
    trace = complex(np.trace(circuit_unitary(gates, n)))
    amp = apply_circuit(PermState.basis(n), gates).amplitude(perm.identity(n))
    nfact = math.factorial(n)
    ok = abs(trace - nfact * amp) <= tol * nfact
    return trace, amp, ok


def mc_identity_amplitude(gates, n: int, samples: int, seed) -> complex:
    """Monte-Carlo estimate of the identity-diagonal amplitude.

    Draws uniform basis permutations and averages the exactly evaluated
    diagonal entries, real and imaginary parts separately (the classical
    stand-in for one-clean-qubit trace estimation, where the maximally
    mixed register is the uniform permutation draw).  The mean is unbiased
    with standard error bounded by sample-std/sqrt(samples); for
    position-swap circuits right-invariance makes every diagonal entry
    equal, so the sample variance is identically zero and the estimate is
    exact for any sample count.
    """
    _require_x_only(gates)
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, math.factorial(n), size=samples)
    entries: dict[int, complex] = {}
    total = 0.0 + 0.0j
    for r in draws:
        r = int(r)
        if r not in entries:
            sigma = perm.unrank(r, n)
            out = apply_circuit(PermState.basis(n, sigma), gates)
            entries[r] = out.amplitude(sigma)
        total += entries[r]
    return complex(total.real / samples, total.imag / samples)


# ---------------------------------------------------------------------------
# JSON circuit schema
# ---------------------------------------------------------------------------


def gate_to_json(g: Gate) -> dict:
    out: dict = {"type": g.kind}
    if g.pair is not None:
        out["pair"] = list(g.pair)
    else:
        out["k"] = g.k
    if g.kind in ("X", "Y"):
        out["theta"] = g.theta
    elif g.kind == "H":
        out["z"] = g.z
    elif g.kind == "DELTA":
        out["z"] = g.z
        out["c"] = g.c
    else:
        out["table"] = [list(row) for row in g.table]
    return out


def gate_from_json(obj: dict) -> Gate:
    kind = obj["type"]
    k = obj.get("k")
    pair = tuple(obj["pair"]) if "pair" in obj else None
    if kind == "X":
        return X(obj["theta"], k=k, pair=pair)
    if kind == "Y":
        return Y(obj["theta"], k)
    if kind == "Z":
        return Z(obj["table"], k=k, pair=pair)
    if kind == "W":
        return W(obj["table"], k)
    if kind == "H":
        return H(obj["z"], k=k, pair=pair)
    if kind == "DELTA":
        return delta(obj["z"], obj.get("c", 1.0), k=k, pair=pair)
    raise ValueError(f"unknown gate type {kind!r}")


def circuit_to_json(gates, n: int) -> dict:
    return {"n": n, "gates": [gate_to_json(g) for g in gates]}


def circuit_from_json(obj: dict | str) -> tuple[list[Gate], int]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return [gate_from_json(g) for g in obj["gates"]], int(obj["n"])

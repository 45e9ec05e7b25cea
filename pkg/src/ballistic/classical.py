"""Classical probabilistic swap networks on n labelled balls.

A program is an ordered list of swaps ``(i, j)`` with independent firing
probabilities.  Starting from the sorted arrangement, each step exchanges
the contents of positions ``i`` and ``j`` with its probability.  The module
computes the exact output distribution, single-color marginals, subset
brute-force probabilities, reachability (polynomial route for adjacent
words, set dynamic programming in general), subset counting, the classical
Yang-Baxter parameter solution, and the reduction that folds deterministic
instruction bits into an all-probabilistic program.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import perm
from .perm import Perm

MAX_DENSE_N = 10
MAX_SUBSET_M = 24

TOL = 1e-12


class ResourceLimitError(ValueError):
    """Requested computation exceeds the configured desk-scale limits."""


@dataclass(frozen=True)
class SwapStep:
    i: int
    j: int
    p: float = 1.0


@dataclass(frozen=True)
class SwapProgram:
    """Ordered probabilistic swaps over n positions.

    ``instruction`` is an optional 0/1 string, one bit per step:
    1 = probabilistic, 0 = deterministic (always fires).
    """

    n: int
    steps: tuple[SwapStep, ...] = field(default_factory=tuple)
    instruction: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for s in self.steps:
            if not (1 <= s.i < s.j <= self.n):
                raise ValueError(f"swap ({s.i},{s.j}) out of range for n={self.n}")
            if not (0.0 <= s.p <= 1.0):
                raise ValueError(f"probability {s.p} outside [0,1]")
        if self.instruction is not None:
            if len(self.instruction) != len(self.steps):
                raise ValueError("instruction length must equal step count")
            if self.instruction.strip("01"):
                raise ValueError("instruction must be a 0/1 string")

    @property
    def m(self) -> int:
        return len(self.steps)

    def is_adjacent(self) -> bool:
        return all(s.j == s.i + 1 for s in self.steps)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "steps": [{"i": s.i, "j": s.j, "p": s.p} for s in self.steps],
        }
        if self.instruction is not None:
            out["instruction"] = self.instruction
        return out

    @classmethod
    def from_json(cls, obj: dict | str) -> "SwapProgram":
        if isinstance(obj, str):
            obj = json.loads(obj)
        steps = tuple(
            SwapStep(int(s["i"]), int(s["j"]), float(s.get("p", 1.0)))
            for s in obj.get("steps", [])
        )
        return cls(int(obj["n"]), steps, obj.get("instruction"))


@dataclass
class PermDistribution:
    """Probability weights over all n! permutations, indexed by rank."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (math.factorial(self.n),):
            raise ValueError("weight vector must have length n!")
        if self.weights.min() < -TOL:
            raise ValueError("negative weight")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {self.weights.sum()}, not 1")

    def prob(self, sigma: Perm) -> float:
        return float(self.weights[perm.rank(sigma)])

    def support(self) -> list[Perm]:
        return [perm.unrank(r, self.n) for r in np.nonzero(self.weights > TOL)[0]]

    def marginal_location(self, color: int) -> np.ndarray:
        """P(color ends at position p) for p = 1..n, by direct summation."""
        perms = perm.all_perms(self.n)
        out = np.zeros(self.n)
        for p in range(self.n):
            out[p] = self.weights[perms[:, p] == color].sum()
        return out

    def total_variation(self, other: "PermDistribution") -> float:
        return 0.5 * float(np.abs(self.weights - other.weights).sum())


def _apply_step(sigma: Perm, step: SwapStep) -> Perm:
    return perm.swap_positions(sigma, step.i, step.j)


def deterministic_product(prog: SwapProgram) -> Perm:
    """Final permutation when every step fires."""
    sigma = perm.identity(prog.n)
    for s in prog.steps:
        sigma = _apply_step(sigma, s)
    return sigma


def exact_distribution(prog: SwapProgram) -> PermDistribution:
    """Exact output distribution via the n!-dimensional stochastic update."""
    if prog.n > MAX_DENSE_N:
        raise ResourceLimitError(f"n={prog.n} exceeds dense limit {MAX_DENSE_N}")
    w = np.zeros(math.factorial(prog.n))
    w[perm.rank(perm.identity(prog.n))] = 1.0
    for s in prog.steps:
        table = perm.position_swap_table(prog.n, s.i, s.j)
        w = (1.0 - s.p) * w + s.p * w[table]
    return PermDistribution(prog.n, w)


def brute_force_probability(prog: SwapProgram, target: Perm) -> float:
    """Sum over all 2^m firing subsets: the independent oracle for exact_distribution."""
    if prog.m > MAX_SUBSET_M:
        raise ResourceLimitError(f"m={prog.m} exceeds subset limit {MAX_SUBSET_M}")
    target = perm.check_perm(target)
    if len(target) != prog.n:
        raise perm.SizeMismatchError("target size differs from program")
    total = 0.0
    for mask in range(1 << prog.m):
        sigma = perm.identity(prog.n)
        weight = 1.0
        for t, s in enumerate(prog.steps):
            if mask >> t & 1:
                sigma = _apply_step(sigma, s)
                weight *= s.p
            else:
                weight *= 1.0 - s.p
        if sigma == target:
            total += weight
    return total


def marginal_location(prog: SwapProgram, color: int) -> np.ndarray:
    """P(color ends at position p), computed in O(m n) without the full distribution."""
    if not (1 <= color <= prog.n):
        raise ValueError(f"color {color} out of range for n={prog.n}")
    v = np.zeros(prog.n)
    v[color - 1] = 1.0
    for s in prog.steps:
        a, b = s.i - 1, s.j - 1
        va, vb = v[a], v[b]
        v[a] = s.p * vb + (1.0 - s.p) * va
        v[b] = s.p * va + (1.0 - s.p) * vb
    return v


def sample(prog: SwapProgram, seed) -> Perm:
    """One Monte-Carlo run of the program; each step fires independently."""
    rng = np.random.default_rng(seed)
    sigma = perm.identity(prog.n)
    for s in prog.steps:
        if rng.random() < s.p:
            sigma = _apply_step(sigma, s)
    return sigma


def sample_many(prog: SwapProgram, shots: int, seed) -> dict[Perm, int]:
    rng = np.random.default_rng(seed)
    counts: dict[Perm, int] = {}
    fires = rng.random((shots, prog.m)) < [s.p for s in prog.steps]
    for row in fires:
        sigma = perm.identity(prog.n)
        for fired, s in zip(row, prog.steps):
            if fired:
                sigma = _apply_step(sigma, s)
        counts[sigma] = counts.get(sigma, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Classical Yang-Baxter solution
# ---------------------------------------------------------------------------


def classical_yb_params(x: float, y: float) -> tuple[float, float, float, float, float, float]:
    """Swap probabilities (p1,p2,p3,p1',p2',p3') solving the stochastic YBE."""
    if x < 0 or y < 0:
        raise ValueError("parameters must be nonnegative")
    p1 = x / (1.0 + x)
    p2 = (x + y) / (1.0 + x + y)
    p3 = y / (1.0 + y)
    return p1, p2, p3, p3, p2, p1


def _r_matrix(n3: int, k: int, p: float) -> np.ndarray:
    dim = math.factorial(n3)
    table = perm.position_swap_table(n3, k, k + 1)
    mat = (1.0 - p) * np.eye(dim)
    mat[table, np.arange(dim)] += p
    return mat


def classical_ybe_residual(x: float, y: float) -> float:
    """Max-norm residual of R1 R2 R1 = R2 R1 R2 with the parameter solution."""
    p1, p2, p3, q1, q2, q3 = classical_yb_params(x, y)
    lhs = _r_matrix(3, 1, p1) @ _r_matrix(3, 2, p2) @ _r_matrix(3, 1, p3)
    rhs = _r_matrix(3, 2, q1) @ _r_matrix(3, 1, q2) @ _r_matrix(3, 2, q3)
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# Reachability and counting
# ---------------------------------------------------------------------------


def demazure_product(word: list[int], n: int) -> Perm:
    """Greedy 0-Hecke product: absorb a generator only if it adds an inversion."""
    u = perm.identity(n)
    for k in word:
        v = perm.position_swap(u, k)
        if perm.inversions(v) > perm.inversions(u):
            u = v
    return u


def bruhat_leq(u: Perm, v: Perm) -> bool:
    """Ehresmann dominance test: sorted prefixes of u entrywise <= those of v."""
    if len(u) != len(v):
        raise perm.SizeMismatchError("Bruhat comparison needs equal n")
    n = len(u)
    for k in range(1, n):
        us = sorted(u[:k])
        vs = sorted(v[:k])
        if any(a > b for a, b in zip(us, vs)):
            return False
    return True


def reachable_adjacent(word: list[int], target: Perm) -> bool:
    """True iff some subsequence of the adjacent-swap word produces target.

    Polynomial route: a subsequence with product ``target`` exists iff
    ``target`` is Bruhat-dominated by the greedy Demazure product of the
    word (deletion property of reduced words).
    """
    target = perm.check_perm(target)
    n = len(target)
    for k in word:
        if not (1 <= k <= n - 1):
            raise ValueError(f"non-adjacent step index {k} for n={n}")
    return bruhat_leq(target, demazure_product(list(word), n))


def reachable_set(steps: list[tuple[int, int]], n: int) -> set[int]:
    """Ranks of all permutations producible by subsets, via set closure."""
    if n > 8:
        raise ResourceLimitError(f"n={n} exceeds reachable-set limit 8")
    current = {perm.rank(perm.identity(n))}
    for i, j in steps:
        table = perm.position_swap_table(n, i, j)
        current |= {int(table[r]) for r in current}
    return current


def reachable_general(steps: list[tuple[int, int]], target: Perm) -> bool:
    target = perm.check_perm(target)
    return perm.rank(target) in reachable_set(list(steps), len(target))


def count_achieving_subsets(steps: list[tuple[int, int]], target: Perm) -> int:
    """|{S subseteq [m] : product of chosen swaps in order == target}|, exactly."""
    target = perm.check_perm(target)
    n = len(target)
    if n > 8 and len(steps) > MAX_SUBSET_M:
        raise ResourceLimitError("either n <= 8 or m <= 24 is required")
    counts: dict[int, int] = {perm.rank(perm.identity(n)): 1}
    for i, j in steps:
        table = perm.position_swap_table(n, i, j)
        new = dict(counts)
        for r, c in counts.items():
            r2 = int(table[r])
            new[r2] = new.get(r2, 0) + c
        counts = new
    return counts.get(perm.rank(target), 0)


@dataclass(frozen=True)
class NormalizedProgram:
    """All-probabilistic program plus the residual deterministic offset.

    A run of the original program equals a run of ``program`` followed by
    applying ``offset`` as position swaps, so subset counts for target pi in
    the original equal counts for ``compose(pi, inverse(offset))`` here.
    """

    program: SwapProgram
    offset: Perm

    def equivalent_target(self, target: Perm) -> Perm:
        return perm.compose(target, perm.inverse(self.offset))


def normalize_instruction(prog: SwapProgram) -> NormalizedProgram:
    """Fold deterministic steps into a trailing fixed permutation.

    Each deterministic block is removed and every later swap ``(i, j)`` is
    conjugated to ``(D(i), D(j))`` through the accumulated deterministic
    product ``D``, preserving the subset-counting vector up to the offset.
    """
    if prog.instruction is None:
        raise ValueError("program has no instruction string")
    d = perm.identity(prog.n)
    out_steps = []
    for s, bit in zip(prog.steps, prog.instruction):
        if bit == "0":
            d = _apply_step(d, s)
        else:
            i2, j2 = d[s.i - 1], d[s.j - 1]
            if i2 > j2:
                i2, j2 = j2, i2
            out_steps.append(SwapStep(i2, j2, s.p))
    normalized = SwapProgram(prog.n, tuple(out_steps), "1" * len(out_steps))
    return NormalizedProgram(normalized, d)

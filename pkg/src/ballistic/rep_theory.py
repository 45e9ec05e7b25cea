"""Symmetric group representation theory: partitions, standard tableaux,
hook-length dimensions, the orthogonal transposition matrices on the
tableau basis, branching, numerical Lie closure, and the two-row path
model.

Tableau bases are ordered lexicographically by row-reading word, which
puts the tableau (1,2;3) first for shape (2,1) and reproduces the
displayed n=3 generator matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Partition = tuple[int, ...]


def check_partition(parts) -> Partition:
    lam = tuple(int(x) for x in parts)
    if not lam or any(x < 1 for x in lam):
        raise ValueError(f"partition parts must be positive: {lam}")
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"parts must be non-ascending: {lam}")
    return lam


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[Partition, ...]:
    """All partitions of n, in descending lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")

    def gen(remaining: int, cap: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(cap, remaining), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first, *rest)

    return tuple(gen(n, n))


def dual(lam: Partition) -> Partition:
    """Transpose the diagram: rows become columns."""
    lam = check_partition(lam)
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0]))


def hook_dimension(lam: Partition) -> int:
    """Number of standard tableaux of the shape, by the hook length formula."""
    lam = check_partition(lam)
    n = sum(lam)
    cols = dual(lam)
    hooks = 1
    for r, row_len in enumerate(lam):
        for c in range(row_len):
            hooks *= (row_len - c) + (cols[c] - r) - 1
    return math.factorial(n) // hooks


@dataclass(frozen=True)
class StandardTableau:
    """Rows of a standard filling: increasing along rows and down columns."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = [x for row in self.rows for x in row]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise ValueError("entries must be exactly 1..n")
        for row in self.rows:
            if any(a >= b for a, b in zip(row, row[1:])):
                raise ValueError("rows must strictly increase")
        for r in range(len(self.rows) - 1):
            upper, lower = self.rows[r], self.rows[r + 1]
            if len(lower) > len(upper):
                raise ValueError("row lengths must not ascend")
            if any(upper[c] >= lower[c] for c in range(len(lower))):
                raise ValueError("columns must strictly increase")

    @property
    def shape(self) -> Partition:
        return tuple(len(row) for row in self.rows)

    @property
    def n(self) -> int:
        return sum(self.shape)

    def position(self, value: int) -> tuple[int, int]:
        """(row, column) of a value, 1-based."""
        for r, row in enumerate(self.rows, start=1):
            for c, x in enumerate(row, start=1):
                if x == value:
                    return r, c
        raise ValueError(f"{value} not in tableau")

    def reading_word(self) -> tuple[int, ...]:
        return tuple(x for row in self.rows for x in row)

    def swap_values(self, k: int) -> "StandardTableau":
        """Exchange the entries k and k+1 (valid when they share no row/column)."""
        sub = {k: k + 1, k + 1: k}
        return StandardTableau(
            tuple(tuple(sub.get(x, x) for x in row) for row in self.rows)
        )

    def remove_largest(self) -> "StandardTableau":
        rows = [tuple(x for x in row if x != self.n) for row in self.rows]
        return StandardTableau(tuple(row for row in rows if row))


@lru_cache(maxsize=None)
def standard_tableaux(lam: Partition) -> tuple[StandardTableau, ...]:
    """All standard tableaux of a shape, ordered by row-reading word."""
    lam = check_partition(lam)
    n = sum(lam)

    def fill(partial: list[list[int]], value: int):
        if value > n:
            yield StandardTableau(tuple(tuple(row) for row in partial))
            return
        for r in range(len(lam)):
            c = len(partial[r])
            if c >= lam[r]:
                continue
            if r > 0 and len(partial[r - 1]) <= c:
                continue
            partial[r].append(value)
            yield from fill(partial, value + 1)
            partial[r].pop()

    tabs = sorted(fill([[] for _ in lam], 1), key=StandardTableau.reading_word)
    return tuple(tabs)


def axial_distance(t: StandardTableau, k: int) -> int:
    """Signed walk distance from k to k+1: (column step) - (row step)."""
    if not (1 <= k <= t.n - 1):
        raise ValueError(f"k={k} out of range for n={t.n}")
    r1, c1 = t.position(k)
    r2, c2 = t.position(k + 1)
    return (c2 - c1) - (r2 - r1)


@lru_cache(maxsize=None)
def yy_matrix(lam: Partition, k: int) -> np.ndarray:
    """Orthogonal action of the adjacent transposition (k, k+1) on the
    tableau basis: diagonal 1/d plus sqrt(1 - 1/d^2) to the value-swapped
    tableau."""
    lam = check_partition(lam)
    tabs = standard_tableaux(lam)
    index = {t: i for i, t in enumerate(tabs)}
    f = len(tabs)
    mat = np.zeros((f, f))
    for i, t in enumerate(tabs):
        d = axial_distance(t, k)
        mat[i, i] = 1.0 / d
        if abs(d) >= 2:
            j = index[t.swap_values(k)]
            mat[j, i] = math.sqrt(1.0 - 1.0 / d**2)
    mat.setflags(write=False)
    return mat


def verify_irrep_relations(lam: Partition, tol: float = 1e-12) -> dict:
    """Involution, distant commutation and braid relations of the
    transposition matrices; returns max residual per family."""
    lam = check_partition(lam)
    n = sum(lam)
    mats = [yy_matrix(lam, k) for k in range(1, n)]
    f = hook_dimension(lam)
    eye = np.eye(f)
    r_inv = max(
        (float(np.abs(m @ m - eye).max()) for m in mats), default=0.0
    )
    r_comm = 0.0
    for a in range(len(mats)):
        for b in range(a + 2, len(mats)):
            r_comm = max(r_comm, float(np.abs(mats[a] @ mats[b] - mats[b] @ mats[a]).max()))
    r_braid = 0.0
    for a in range(len(mats) - 1):
        lhs = mats[a] @ mats[a + 1] @ mats[a]
        rhs = mats[a + 1] @ mats[a] @ mats[a + 1]
        r_braid = max(r_braid, float(np.abs(lhs - rhs).max()))
    return {
        "shape": lam,
        "dimension": f,
        "involution": r_inv,
        "commutation": r_comm,
        "braid": r_braid,
        "ok": max(r_inv, r_comm, r_braid) <= tol,
    }


def removable_boxes(lam: Partition) -> list[int]:
    """Row indices (1-based) whose last box can be removed."""
    lam = check_partition(lam)
    out = []
    for r in range(len(lam)):
        if r == len(lam) - 1 or lam[r] > lam[r + 1]:
            out.append(r + 1)
    return out


def remove_box(lam: Partition, row: int) -> Partition:
    parts = list(lam)
    parts[row - 1] -= 1
    return tuple(p for p in parts if p > 0)


def branching_check(lam: Partition, tol: float = 1e-12) -> bool:
    """Restriction to the subgroup fixing n block-diagonalises every
    generator below n-1, with blocks equal to the sub-shape matrices."""
    lam = check_partition(lam)
    n = sum(lam)
    if n < 2:
        raise ValueError("branching needs n >= 2")
    tabs = standard_tableaux(lam)
    groups: dict[int, list[int]] = {}
    for i, t in enumerate(tabs):
        row_of_n = t.position(n)[0]
        groups.setdefault(row_of_n, []).append(i)
    if set(groups) != set(removable_boxes(lam)):
        return False
    for k in range(1, n - 1):
        m = yy_matrix(lam, k)
        for row, idxs in groups.items():
            mu = remove_box(lam, row)
            sub_tabs = standard_tableaux(mu)
            order = {t: i for i, t in enumerate(sub_tabs)}
            reorder = [order[tabs[i].remove_largest()] for i in idxs]
            block = np.zeros((len(idxs), len(idxs)))
            for a, ia in enumerate(idxs):
                for b, ib in enumerate(idxs):
                    block[reorder[a], reorder[b]] = m[ia, ib]
            if np.abs(block - yy_matrix(mu, k)).max() > tol:
                return False
            outside = [i for i in range(len(tabs)) if i not in idxs]
            if outside and np.abs(m[np.ix_(idxs, outside)]).max() > tol:
                return False
    return True


def lie_closure(generators, max_dim: int = 256, tol: float = 1e-9):
    """Real span of anti-Hermitian generators closed under commutators.

    Orthonormalises with the real Frobenius inner product; a commutator
    joins the basis when its residual after projection exceeds ``tol``
    relative to its own norm.  Returns (dimension, basis list).
    """
    mats = [np.asarray(g, dtype=complex) for g in generators]
    for g in mats:
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("generators must be square matrices")
        if np.abs(g + g.conj().T).max() > 1e-12:
            raise ValueError("generators must be anti-Hermitian")

    basis: list[np.ndarray] = []

    def try_add(cand: np.ndarray) -> bool:
        scale = np.linalg.norm(cand)
        if scale < 1e-14:
            return False
        r = cand.copy()
        for b in basis:
            r -= np.vdot(b, r).real * b
        for b in basis:  # second pass for numerical orthogonality
            r -= np.vdot(b, r).real * b
        if np.linalg.norm(r) <= tol * scale:
            return False
        if len(basis) >= max_dim:
            raise ValueError(f"closure dimension exceeds max_dim={max_dim}")
        basis.append(r / np.linalg.norm(r))
        return True

    for g in mats:
        try_add(g)
    frontier = list(range(len(basis)))
    while frontier:
        new_frontier = []
        for i in frontier:
            for j in range(len(basis)):
                if try_add(basis[i] @ basis[j] - basis[j] @ basis[i]):
                    new_frontier.append(len(basis) - 1)
        frontier = new_frontier
    return len(basis), basis


def in_span(basis, target, tol: float = 1e-10) -> bool:
    """Whether target lies in the real span of an orthonormal basis."""
    t = np.asarray(target, dtype=complex)
    r = t.copy()
    for b in basis:
        r -= np.vdot(b, r).real * b
    return bool(np.linalg.norm(r) <= tol * max(np.linalg.norm(t), 1e-30))


# ---------------------------------------------------------------------------
# Two-row path model
# ---------------------------------------------------------------------------


def tableau_path(t: StandardTableau) -> tuple[int, ...]:
    """Heights after each step: up for a row-1 entry, down for row 2."""
    if len(t.shape) > 2:
        raise ValueError("path model requires at most two rows")
    heights = []
    h = 0
    for j in range(1, t.n + 1):
        h += 1 if t.position(j)[0] == 1 else -1
        heights.append(h)
    return tuple(heights)


def path_model(lam: Partition) -> list[tuple[int, ...]]:
    """Nonnegative lattice paths for a two-row shape, one per tableau."""
    lam = check_partition(lam)
    if len(lam) > 2:
        raise ValueError("path model requires at most two rows")
    paths = [tableau_path(t) for t in standard_tableaux(lam)]
    for p in paths:
        if min(p) < 0:
            raise AssertionError("standard tableau mapped to a negative path")
    return paths


def path_count(n: int, s: int) -> int:
    """Nonnegative up/down paths from (0,0) to (n,s), by dynamic programming."""
    if s < 0 or s > n or (n - s) % 2:
        return 0
    heights = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for h, cnt in heights.items():
            nxt[h + 1] = nxt.get(h + 1, 0) + cnt
            if h > 0:
                nxt[h - 1] = nxt.get(h - 1, 0) + cnt
        heights = nxt
    return heights.get(s, 0)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)

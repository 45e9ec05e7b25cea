"""Permutations of [n] in one-line notation, with 1-based labels.

Conventions used throughout the package:

- A permutation is a tuple ``(sigma(1), ..., sigma(n))`` where ``sigma(p)``
  is the label sitting at position ``p``.  Positions and labels both run
  over ``1..n``.
- ``compose(outer, inner)`` is ordinary function composition,
  ``result(p) = outer(inner(p))``.
- "Applying a swap" to a permutation always means exchanging the contents
  of two *positions* (this is ``compose(sigma, t)`` for the transposition
  ``t``); relabelling acts on the values instead.
- Dense state vectors index permutations by lexicographic rank of their
  one-line notation, ``0 .. n!-1``.

The compressed codec encodes a permutation as the edge-index string of a
walk down the labelled tree whose layer-``j`` node has one child per
still-unused label, children ordered by increasing label.  The block for a
walk step with ``m`` remaining children uses ``ceil(log2 m)`` bits, for a
total of ``log2(n!) + O(n)`` bits, and an adjacent position swap touches
only the two blocks at that depth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Perm = tuple[int, ...]


class SizeMismatchError(ValueError):
    """Two permutations of different n were combined."""


class DecodeError(ValueError):
    """A bit string is not a valid permutation code."""


def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def is_perm(seq) -> bool:
    """True iff seq is a permutation of 1..len(seq)."""
    return sorted(seq) == list(range(1, len(seq) + 1))


def check_perm(seq) -> Perm:
    p = tuple(int(x) for x in seq)
    if not is_perm(p):
        raise ValueError(f"not a permutation of 1..{len(p)}: {p}")
    return p


def compose(outer: Perm, inner: Perm) -> Perm:
    """Function composition: result(p) = outer(inner(p))."""
    if len(outer) != len(inner):
        raise SizeMismatchError(f"cannot compose S_{len(outer)} with S_{len(inner)}")
    return tuple(outer[i - 1] for i in inner)


def inverse(sigma: Perm) -> Perm:
    inv = [0] * len(sigma)
    for pos, label in enumerate(sigma, start=1):
        inv[label - 1] = pos
    return tuple(inv)


def transposition(n: int, i: int, j: int) -> Perm:
    if not (1 <= i < j <= n):
        raise ValueError(f"transposition ({i},{j}) out of range for n={n}")
    t = list(range(1, n + 1))
    t[i - 1], t[j - 1] = t[j - 1], t[i - 1]
    return tuple(t)


def position_swap(sigma: Perm, k: int) -> Perm:
    """Exchange the labels at positions k and k+1."""
    n = len(sigma)
    if not (1 <= k <= n - 1):
        raise ValueError(f"position {k} out of range for n={n}")
    s = list(sigma)
    s[k - 1], s[k] = s[k], s[k - 1]
    return tuple(s)


def swap_positions(sigma: Perm, i: int, j: int) -> Perm:
    """Exchange the labels at positions i and j (not necessarily adjacent)."""
    n = len(sigma)
    if not (1 <= i < j <= n):
        raise ValueError(f"swap ({i},{j}) out of range for n={n}")
    s = list(sigma)
    s[i - 1], s[j - 1] = s[j - 1], s[i - 1]
    return tuple(s)


def relabel(sigma: Perm, tau: Perm) -> Perm:
    """Replace every label x of sigma by tau(x).

    This is the right action on the permutation basis; it commutes with
    position swaps.
    """
    if len(sigma) != len(tau):
        raise SizeMismatchError(f"cannot relabel S_{len(sigma)} by S_{len(tau)}")
    return tuple(tau[x - 1] for x in sigma)


def label_swap(sigma: Perm, k: int) -> Perm:
    """Exchange the labels k and k+1 wherever they sit."""
    n = len(sigma)
    if not (1 <= k <= n - 1):
        raise ValueError(f"label {k} out of range for n={n}")
    return relabel(sigma, position_swap(identity(n), k))


def inversions(sigma: Perm) -> int:
    n = len(sigma)
    return sum(1 for a in range(n) for b in range(a + 1, n) if sigma[a] > sigma[b])


def sign(sigma: Perm) -> int:
    return -1 if inversions(sigma) % 2 else 1


# ---------------------------------------------------------------------------
# Lexicographic ranking and dense tables
# ---------------------------------------------------------------------------


def rank(sigma: Perm) -> int:
    """Lexicographic rank of the one-line notation, in 0 .. n!-1."""
    n = len(sigma)
    remaining = sorted(sigma)
    r = 0
    for pos, label in enumerate(sigma):
        idx = remaining.index(label)
        r += idx * math.factorial(n - 1 - pos)
        remaining.pop(idx)
    return r


def unrank(r: int, n: int) -> Perm:
    if not (0 <= r < math.factorial(n)):
        raise ValueError(f"rank {r} out of range for n={n}")
    remaining = list(range(1, n + 1))
    out = []
    for pos in range(n):
        f = math.factorial(n - 1 - pos)
        idx, r = divmod(r, f)
        out.append(remaining.pop(idx))
    return tuple(out)


@lru_cache(maxsize=None)
def all_perms(n: int) -> np.ndarray:
    """(n!, n) array of all permutations in lexicographic (= rank) order."""
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(1, n + 1))),
        dtype=np.int8,
        count=n * math.factorial(n),
    )
    arr = flat.reshape(math.factorial(n), n)
    arr.setflags(write=False)
    return arr


def rank_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorised lexicographic rank of an (m, n) array of permutations."""
    m, n = rows.shape
    ranks = np.zeros(m, dtype=np.int64)
    for i in range(n - 1):
        smaller_right = np.zeros(m, dtype=np.int64)
        for j in range(i + 1, n):
            smaller_right += rows[:, j] < rows[:, i]
        ranks += smaller_right * math.factorial(n - 1 - i)
    return ranks


@lru_cache(maxsize=None)
def position_swap_table(n: int, i: int, j: int) -> np.ndarray:
    """rank -> rank table for exchanging the contents of positions i, j."""
    if not (1 <= i < j <= n):
        raise ValueError(f"swap ({i},{j}) out of range for n={n}")
    perms = all_perms(n).copy()
    perms[:, [i - 1, j - 1]] = perms[:, [j - 1, i - 1]]
    table = rank_rows(perms)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def label_swap_table(n: int, k: int) -> np.ndarray:
    """rank -> rank table for exchanging the labels k and k+1."""
    if not (1 <= k <= n - 1):
        raise ValueError(f"label {k} out of range for n={n}")
    t = np.arange(1, n + 1, dtype=np.int8)
    t[k - 1], t[k] = t[k], t[k - 1]
    relabeled = t[all_perms(n) - 1]
    table = rank_rows(relabeled)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def inverse_positions(n: int) -> np.ndarray:
    """(n!, n) array whose row r gives the position of each label in perm r."""
    perms = all_perms(n)
    inv = np.empty_like(perms)
    rows = np.arange(perms.shape[0])[:, None]
    inv[rows, perms - 1] = np.arange(1, n + 1, dtype=np.int8)
    inv.setflags(write=False)
    return inv


def relabel_ranks(n: int, tau: Perm) -> np.ndarray:
    """rank -> rank table for relabelling every permutation by tau."""
    t = np.asarray(tau, dtype=np.int8)
    return rank_rows(t[all_perms(n) - 1])


# ---------------------------------------------------------------------------
# Compressed tree-walk codec
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermCode:
    """Bit string of the tree-walk encoding, plus the label count."""

    n: int
    bits: str

    def __post_init__(self):
        if len(self.bits) != code_length(self.n):
            raise ValueError(
                f"code for n={self.n} must have {code_length(self.n)} bits, "
                f"got {len(self.bits)}"
            )
        if self.bits.strip("01"):
            raise ValueError("bits must be a 0/1 string")

    def to_hex(self) -> str:
        if not self.bits:
            return ""
        padded = self.bits + "0" * (-len(self.bits) % 4)
        return f"{int(padded, 2):0{len(padded) // 4}x}"

    @classmethod
    def from_hex(cls, n: int, hexstr: str) -> "PermCode":
        nbits = code_length(n)
        if nbits == 0:
            return cls(n, "")
        expanded = bin(int(hexstr, 16))[2:].zfill(4 * len(hexstr))
        return cls(n, expanded[:nbits])


def block_width(children: int) -> int:
    """Bits used for a walk step with the given number of children."""
    return math.ceil(math.log2(children)) if children > 1 else 0


def code_length(n: int) -> int:
    return sum(block_width(n - depth) for depth in range(n))


def code_blocks(sigma: Perm) -> list[int]:
    """Edge index chosen at each layer of the walk (block t for position t+1)."""
    remaining = list(range(1, len(sigma) + 1))
    blocks = []
    for label in sigma:
        idx = remaining.index(label)
        blocks.append(idx)
        remaining.pop(idx)
    return blocks


def encode(sigma: Perm) -> PermCode:
    n = len(sigma)
    pieces = []
    for depth, idx in enumerate(code_blocks(sigma)):
        w = block_width(n - depth)
        if w:
            pieces.append(format(idx, f"0{w}b"))
    return PermCode(n, "".join(pieces))


def decode(code: PermCode) -> Perm:
    remaining = list(range(1, code.n + 1))
    out = []
    cursor = 0
    for depth in range(code.n):
        w = block_width(code.n - depth)
        idx = int(code.bits[cursor : cursor + w], 2) if w else 0
        cursor += w
        if idx >= len(remaining):
            raise DecodeError(
                f"block at depth {depth} has value {idx} but only "
                f"{len(remaining)} children remain"
            )
        out.append(remaining.pop(idx))
    return tuple(out)


def code_block_diff(sigma: Perm, k: int) -> set[int]:
    """1-based indices of walk blocks where sigma and position_swap(sigma, k) differ."""
    n = len(sigma)
    if not (1 <= k <= n - 1):
        raise ValueError(f"position {k} out of range for n={n}")
    a = code_blocks(sigma)
    b = code_blocks(position_swap(sigma, k))
    return {t + 1 for t in range(n) if a[t] != b[t]}

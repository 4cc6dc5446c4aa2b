"""Closest balanced states, red-black graphs, descriptors and small-n censuses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, prod

import numpy as np

from . import _kernels as K
from .state import SignedState, all_enmity, from_bipartition

EXACT_MAX_N = 24
CENSUS_MAX_N = 7
HEURISTIC_RESTARTS = 32


@lru_cache(maxsize=64)
def triads(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All index triples i < j < k as three parallel arrays."""
    t = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    return t[:, 0], t[:, 1], t[:, 2]


def naive_ranks(sign: np.ndarray) -> tuple[np.ndarray, int]:
    """Ranks and imbalanced count by enumerating every triad."""
    n = sign.shape[0]
    i, j, k = triads(n)
    bad = (sign[i, j].astype(np.int64) * sign[i, k] * sign[j, k]) < 0
    rank = np.zeros((n, n), dtype=np.int64)
    for a, b in ((i, j), (i, k), (j, k)):
        np.add.at(rank, (a[bad], b[bad]), 1)
    rank = rank + rank.T
    return rank, int(bad.sum())


# closest balanced state


@dataclass
class ClosestBalanced:
    state: SignedState
    distance: int
    assignment: np.ndarray
    certified: bool


def _balanced_from_assignment(assignment: np.ndarray) -> SignedState:
    return from_bipartition(assignment.size, np.flatnonzero(assignment).tolist())


def _canonical(x: np.ndarray) -> np.ndarray:
    # class of vertex 0 is class 0
    a = (x < 0).astype(np.int8)
    return a ^ a[0]


def _descend(sign: np.ndarray, x: np.ndarray) -> np.ndarray:
    s = sign.astype(np.int64)
    h = s @ x
    while True:
        gain = -x * h
        i = int(np.argmax(gain))
        if gain[i] <= 0:
            return x
        x[i] = -x[i]
        h += 2 * x[i] * s[:, i]


def closest_balanced(
    state: SignedState, mode: str = "exact", rng: np.random.Generator | None = None
) -> ClosestBalanced:
    """Balanced state at minimum sign-disagreement distance from ``state``.

    ``exact`` scans all 2**(n-1) bipartitions and returns the minimiser with
    the lexicographically smallest class vector. ``heuristic`` runs steepest
    single-vertex descent from 32 random bipartitions; its distance is only
    an upper bound and the result is flagged as not certified.
    """
    n = state.n
    if mode == "exact":
        if n > EXACT_MAX_N:
            raise ValueError(f"exact mode is limited to n <= {EXACT_MAX_N}, got {n}")
        dist, assignment = K.exact_bipartition(state.sign)
        return ClosestBalanced(_balanced_from_assignment(assignment), int(dist), assignment, True)
    if mode != "heuristic":
        raise ValueError(f"mode must be 'exact' or 'heuristic', got {mode!r}")
    rng = np.random.default_rng() if rng is None else rng
    m = comb(n, 2)
    upper = np.triu(state.sign.astype(np.int64), 1)
    best = None
    for _ in range(HEURISTIC_RESTARTS):
        x = _descend(state.sign, rng.choice(np.array([-1, 1]), size=n))
        dist = (m - int(x @ upper @ x)) // 2
        if best is None or dist < best[0]:
            best = (dist, x.copy())
    assignment = _canonical(best[1])
    return ClosestBalanced(_balanced_from_assignment(assignment), best[0], assignment, False)


# red-black graphs


@dataclass
class RedBlackGraph:
    base: SignedState
    reference_state: SignedState
    red: np.ndarray

    @property
    def red_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.red, 1)))

    def red_edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.red, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def as_signs(self) -> np.ndarray:
        """Red read as enmity, black as friendship."""
        out = np.where(self.red, -1, 1).astype(np.int8)
        np.fill_diagonal(out, 0)
        return out


def red_black(state: SignedState, reference: SignedState) -> RedBlackGraph:
    if reference.n != state.n:
        raise ValueError("reference must have the same number of vertices")
    if reference.imbalanced:
        raise ValueError("reference state is not balanced")
    red = state.sign != reference.sign
    np.fill_diagonal(red, False)
    return RedBlackGraph(state, reference, red)


@dataclass
class LemmaCheck:
    ok: bool
    triad: tuple[int, int, int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_redblack_lemma(rb: RedBlackGraph) -> LemmaCheck:
    """Imbalanced in G <=> 1 or 3 red edges, for every triad; and G ranks = R ranks."""
    s = rb.base.sign
    n = s.shape[0]
    i, j, k = triads(n)
    imbalanced = (s[i, j].astype(np.int64) * s[i, k] * s[j, k]) < 0
    reds = rb.red[i, j].astype(np.int64) + rb.red[i, k] + rb.red[j, k]
    odd = (reds == 1) | (reds == 3)
    bad = np.flatnonzero(imbalanced != odd)
    if bad.size:
        t = int(bad[0])
        return LemmaCheck(False, (int(i[t]), int(j[t]), int(k[t])),
                          f"imbalanced={bool(imbalanced[t])} with {int(reds[t])} red edges")
    r_rank, _ = naive_ranks(rb.as_signs())
    mismatch = np.argwhere(np.triu(r_rank != rb.base.rank, 1))
    if mismatch.size:
        u, v = map(int, mismatch[0])
        return LemmaCheck(False, None, f"edge ({u}, {v}) rank {rb.base.rank[u, v]} in G vs {r_rank[u, v]} in R")
    return LemmaCheck(True)


# descriptors


@dataclass
class Descriptors:
    avg_degree: float
    clustering: float
    smaller_clique: int | None


def descriptors(state: SignedState) -> Descriptors:
    """Mean friendship degree, friendship-triangle density over all triples, smaller class size."""
    n = state.n
    a = (state.sign > 0).astype(np.float64)
    triangles = round(np.trace(a @ a @ a) / 6)
    balanced, classes = state.is_balanced()
    smaller = min(len(classes[0]), len(classes[1])) if balanced else None
    return Descriptors(2 * state.num_friendships / n, triangles / comb(n, 3), smaller)


# counting labelled copies of S^2_d


def labelings_sequential(d: int) -> int:
    """Partner of vertex 0, then pairs for the next clusters clockwise, halved for direction."""
    n = 8 * d + 4
    return (n - 1) * prod(comb(n - 2 * j, 2) for j in range(1, 4 * d + 2)) // 2


def labelings_orbit(d: int) -> int:
    """n! over the symmetry group: dihedral rotations/reflections times swaps within clusters."""
    n = 8 * d + 4
    clusters = 4 * d + 2
    return factorial(n) // (2 * clusters * 2**clusters)


def count_s2d_labelings(d: int) -> int:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    a, b = labelings_sequential(d), labelings_orbit(d)
    n = 8 * d + 4
    bound = factorial(n - 1) // 2 ** (n // 2)
    if not a == b == bound:
        raise ArithmeticError(f"labelling counts disagree: {a}, {b}, {bound}")
    return a


def count_distinct_labelings(state: SignedState) -> int:
    """Distinct sign maps obtained by relabelling vertices, by brute force over n!."""
    n = state.n
    seen = set()
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        seen.add(state.sign[np.ix_(p, p)].tobytes())
    return len(seen)


# exhaustive census


@dataclass
class Census:
    n: int
    total: int
    balanced: int
    jammed: int

    @property
    def other(self) -> int:
        return self.total - self.balanced - self.jammed


def exhaustive_scan(n: int) -> Census:
    """Classify every sign assignment on n <= 7 vertices."""
    if not 3 <= n <= CENSUS_MAX_N:
        raise ValueError(f"census needs 3 <= n <= {CENSUS_MAX_N}, got {n}")
    state = all_enmity(n)
    eu, ev = (np.asarray(a, dtype=np.int64) for a in np.triu_indices(n, 1))
    balanced, jammed = K.gray_census(*state.arrays, eu, ev)
    return Census(n, 2 ** comb(n, 2), int(balanced), int(jammed))

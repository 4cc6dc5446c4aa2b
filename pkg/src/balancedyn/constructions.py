"""Named signed states, random initial networks and bounded perturbations."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .state import Edge, SignedState, edge, from_bipartition

SEED_PATH_VERTICES = 11


@dataclass(frozen=True)
class ClusterPartition:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise ValueError(f"cluster sizes must be a non-empty sequence of positive ints, got {self.sizes}")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def assignment(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.sizes)), self.sizes)

    def members(self, i: int) -> range:
        start = sum(self.sizes[:i])
        return range(start, start + self.sizes[i])


@dataclass(frozen=True)
class PerturbationSet:
    edges: frozenset[Edge]
    per_vertex_bound: int

    def __post_init__(self):
        load: dict[int, int] = {}
        for u, v in self.edges:
            load[u] = load.get(u, 0) + 1
            load[v] = load.get(v, 0) + 1
        if load and max(load.values()) > self.per_vertex_bound:
            raise ValueError("perturbation exceeds its per-vertex incidence bound")

    def __len__(self) -> int:
        return len(self.edges)


def _from_friend_matrix(friend: np.ndarray) -> SignedState:
    sign = np.where(friend, 1, -1).astype(np.int8)
    np.fill_diagonal(sign, 0)
    return SignedState(sign)


def circular(k: int, sizes: Sequence[int]) -> SignedState:
    """Clusters on a cycle; friends iff their clusters are at most ``k`` steps apart."""
    if k < 0:
        raise ValueError("k must be non-negative")
    part = ClusterPartition(tuple(int(s) for s in sizes))
    if part.n < 3:
        raise ValueError("circular graph needs at least 3 vertices")
    d = len(part.sizes)
    c = part.assignment
    gap = np.abs(c[:, None] - c[None, :])
    gap = np.minimum(gap, d - gap)
    return _from_friend_matrix(gap <= k)


def j_sizes(n: int) -> tuple[int, int, int]:
    # near-equal, remainder on the last clusters; (n//3, n//3, n - 2*(n//3))
    # leaves J_11 and J_14 unjammed
    third, extra = divmod(n, 3)
    return tuple(third + (i >= 3 - extra) for i in range(3))


def j_state(n: int) -> SignedState:
    """Three contiguous friendship cliques of near-equal size."""
    if n < 3:
        raise ValueError(f"J_n needs n >= 3, got {n}")
    return circular(0, j_sizes(n))


def j_prime_sizes(n: int) -> tuple[int, ...]:
    if n < 72 or n % 8:
        raise ValueError(f"J'_n needs n >= 72 with n divisible by 8, got {n}")
    x = n // 4 - 2
    y = n // 8 + 1
    return (x, y, y, x, y, y)


def j_prime(n: int) -> SignedState:
    return circular(1, j_prime_sizes(n))


def j_prime_reference(n: int) -> SignedState:
    """The balanced state with classes V0+V1+V5 | V2+V3+V4 used as J'_n's reference."""
    part = ClusterPartition(j_prime_sizes(n))
    side = [v for i in (2, 3, 4) for v in part.members(i)]
    return from_bipartition(n, side)


def s2d(d: int) -> SignedState:
    """4d+2 clusters of two vertices, friends within d steps along the cycle."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return circular(d, (2,) * (4 * d + 2))


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> SignedState:
    """Each pair is a friendship independently with probability ``p``."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    upper = np.triu(rng.random((n, n)) < p, 1)
    return _from_friend_matrix(upper | upper.T)


def ba_edge_budget(n: int, d: float) -> np.ndarray:
    """Expected number of new edges brought by each arriving vertex 11..n-1.

    The budget d*C(n,2) - 10 is split in proportion to the number of vertices
    already present, so that vertex v asks for a fraction of its v predecessors.
    Densities below the seed path's own ten edges give an all-zero budget.
    """
    target = d * comb(n, 2)
    extra = target - (SEED_PATH_VERTICES - 1)
    arrivals = np.arange(SEED_PATH_VERTICES, n)
    per = max(extra, 0.0) * arrivals / arrivals.sum()
    if np.any(per > arrivals + 1e-9):
        raise ValueError(f"density {d} is infeasible: a vertex would need more edges than predecessors")
    return per


def barabasi_albert(n: int, d: float, rng: np.random.Generator) -> SignedState:
    """Preferential-attachment friendships with expected edge density ``d``.

    Starts from a path on vertices 0..10. Vertex v then links to m_v distinct
    earlier vertices, drawn without replacement with probability proportional
    to their current degree; m_v is the integer part of its budget plus a
    Bernoulli draw on the remainder.
    """
    if n <= SEED_PATH_VERTICES:
        raise ValueError(f"need n >= {SEED_PATH_VERTICES + 1}, got {n}")
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d must lie in [0, 1], got {d}")
    budget = ba_edge_budget(n, d)
    friend = np.zeros((n, n), dtype=bool)
    deg = np.zeros(n, dtype=np.float64)
    for v in range(SEED_PATH_VERTICES - 1):
        friend[v, v + 1] = friend[v + 1, v] = True
        deg[v] += 1
        deg[v + 1] += 1
    for v, want in zip(range(SEED_PATH_VERTICES, n), budget):
        m = int(want) + int(rng.random() < want - int(want))
        weights = deg[:v]
        m = min(m, int(np.count_nonzero(weights)))
        if m == 0:
            continue
        picks = rng.choice(v, size=m, replace=False, p=weights / weights.sum())
        friend[v, picks] = friend[picks, v] = True
        deg[picks] += 1
        deg[v] += m
    return _from_friend_matrix(friend)


def sample_perturbation(
    n: int, bound: int, rng: np.random.Generator, size: int | None = None
) -> PerturbationSet:
    """Random edge set with at most ``bound`` chosen edges at every vertex.

    Edges are visited in random order and kept whenever both endpoints still
    have room, until ``size`` edges are held or no edge fits.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if size is not None and size > n * bound // 2:
        raise ValueError(f"size {size} cannot fit under bound {bound} on {n} vertices")
    us, vs = np.triu_indices(n, 1)
    order = rng.permutation(us.size)
    load = np.zeros(n, dtype=np.int64)
    chosen = []
    if bound > 0:
        for i in order:
            if size is not None and len(chosen) >= size:
                break
            u, v = int(us[i]), int(vs[i])
            if load[u] < bound and load[v] < bound:
                load[u] += 1
                load[v] += 1
                chosen.append((u, v))
    return PerturbationSet(frozenset(chosen), bound)


def apply_perturbation(state: SignedState, perturbation: PerturbationSet | set[Edge]) -> SignedState:
    """Copy of ``state`` with every listed edge flipped once."""
    edges = perturbation.edges if isinstance(perturbation, PerturbationSet) else perturbation
    out = state.copy()
    for u, v in sorted(edge(*e) for e in edges):
        out.flip(u, v)
    return out


def sparse_state(n: int, bound: int, rng: np.random.Generator) -> SignedState:
    """All-enmity state plus a random friendship set of maximum degree ``bound``."""
    return SignedState.from_friendships(n, sample_perturbation(n, bound, rng).edges)

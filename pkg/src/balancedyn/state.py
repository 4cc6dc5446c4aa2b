"""Signed complete graphs with an incrementally maintained rank cache."""

from __future__ import annotations

from math import comb
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels as K

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    """Canonical (smaller, larger) form of an unordered vertex pair."""
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) is not an edge")
    return (u, v) if u < v else (v, u)


class SignedState:
    """A complete graph on ``n`` vertices with a +1/-1 sign on every edge.

    ``rank[u, v]`` is the number of imbalanced triads through (u, v) and
    ``imbalanced`` the number of imbalanced triads overall. Both are kept
    coherent by :meth:`flip` in O(n) time.
    """

    def __init__(self, sign: np.ndarray):
        sign = np.asarray(sign)
        n = sign.shape[0]
        if sign.shape != (n, n):
            raise ValueError("sign matrix must be square")
        if n < 3:
            raise ValueError(f"need at least 3 vertices, got {n}")
        off = ~np.eye(n, dtype=bool)
        if not np.array_equal(sign, sign.T) or not np.all(np.abs(sign[off]) == 1):
            raise ValueError("sign matrix must be symmetric with +1/-1 off the diagonal")
        self.n = n
        self.sign = np.array(sign, dtype=np.int8)
        np.fill_diagonal(self.sign, 0)
        self.rank = np.zeros((n, n), dtype=np.int32)
        self._rowsum = np.zeros(n, dtype=np.int64)
        self._cnt = np.zeros(2, dtype=np.int64)
        K.init_state(*self.arrays)

    # numba kernels take the arrays positionally in this order
    @property
    def arrays(self):
        return self.sign, self.rank, self._rowsum, self._cnt

    @classmethod
    def from_friendships(cls, n: int, friendships: Iterable[Edge]) -> "SignedState":
        if n < 3:
            raise ValueError(f"need at least 3 vertices, got {n}")
        sign = -np.ones((n, n), dtype=np.int8)
        seen = set()
        for u, v in friendships:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            e = edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            sign[u, v] = sign[v, u] = 1
        np.fill_diagonal(sign, 0)
        return cls(sign)

    def copy(self) -> "SignedState":
        out = object.__new__(SignedState)
        out.n = self.n
        out.sign = self.sign.copy()
        out.rank = self.rank.copy()
        out._rowsum = self._rowsum.copy()
        out._cnt = self._cnt.copy()
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedState):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.sign, other.sign)

    def __repr__(self) -> str:
        return f"SignedState(n={self.n}, friendships={self.num_friendships}, imbalanced={self.imbalanced})"

    def _check_edge(self, u: int, v: int) -> Edge:
        if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
            raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
        return edge(u, v)

    @property
    def imbalanced(self) -> int:
        return int(self._cnt[K.IMB])

    @property
    def num_friendships(self) -> int:
        return int(np.count_nonzero(self.sign > 0) // 2)

    def energy(self) -> int:
        """Imbalanced minus balanced triads."""
        return 2 * self.imbalanced - comb(self.n, 3)

    def edge_rank(self, u: int, v: int) -> int:
        self._check_edge(u, v)
        return int(self.rank[u, v])

    def triad_type(self, u: int, v: int, w: int) -> int:
        """Number of enmity edges among the three edges of the triad."""
        if len({u, v, w}) != 3 or not all(0 <= x < self.n for x in (u, v, w)):
            raise ValueError(f"triad ({u}, {v}, {w}) needs distinct vertices in range")
        s = self.sign
        return int(s[u, v] < 0) + int(s[u, w] < 0) + int(s[v, w] < 0)

    def flip(self, u: int, v: int) -> "SignedState":
        u, v = self._check_edge(u, v)
        K.flip_edge(*self.arrays, u, v)
        return self

    def flip_delta(self, u: int, v: int) -> int:
        """Change of the imbalanced-triad count if (u, v) were flipped."""
        self._check_edge(u, v)
        return (self.n - 2) - 2 * int(self.rank[u, v])

    def is_balanced(self) -> tuple[bool, tuple[frozenset, frozenset] | None]:
        """Balance test plus the two vertex classes when balanced.

        The first class is vertex 0 together with its friends.
        """
        if self.imbalanced:
            return False, None
        friends_of_0 = self.sign[0] > 0
        friends_of_0[0] = True
        a = frozenset(np.flatnonzero(friends_of_0).tolist())
        b = frozenset(range(self.n)) - a
        side = friends_of_0.astype(np.int8) * 2 - 1
        expect = np.outer(side, side)
        np.fill_diagonal(expect, 0)
        if not np.array_equal(expect, self.sign):
            raise AssertionError("balanced state failed its bipartition witness")
        return True, (a, b)

    def is_jammed(self) -> bool:
        """Imbalanced, and no edge of an imbalanced triad has rank >= n/2 - 1."""
        return self.imbalanced > 0 and int(self._cnt[K.MOVABLE]) == 0

    def friendships(self) -> list[Edge]:
        us, vs = np.nonzero(np.triu(self.sign > 0, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def enmities(self) -> list[Edge]:
        us, vs = np.nonzero(np.triu(self.sign < 0, 1))
        return list(zip(us.tolist(), vs.tolist()))

    # text format: "n <int>", then one "<u> <v>" line per friendship

    def dumps(self, comment: str | None = None) -> str:
        lines = []
        if comment:
            lines.extend(f"# {c}" for c in comment.splitlines())
        lines.append(f"n {self.n}")
        lines.extend(f"{u} {v}" for u, v in self.friendships())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SignedState":
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise ValueError(f"line {lineno}: expected 'n <int>' header, got {raw!r}")
                n = int(parts[1])
                continue
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected '<u> <v>', got {raw!r}")
            u, v = int(parts[0]), int(parts[1])
            if u >= v:
                raise ValueError(f"line {lineno}: edges must be written with u < v")
            edges.append((u, v))
        if n is None:
            raise ValueError("missing 'n <int>' header")
        return cls.from_friendships(n, edges)

    def save(self, path: str | Path, comment: str | None = None) -> None:
        Path(path).write_text(self.dumps(comment))

    @classmethod
    def load(cls, path: str | Path) -> "SignedState":
        return cls.loads(Path(path).read_text())


def new_state(n: int, friendships: Iterable[Edge] = ()) -> SignedState:
    """State on ``n`` vertices where exactly the listed pairs are friendships."""
    return SignedState.from_friendships(n, friendships)


def utopia(n: int) -> SignedState:
    sign = np.ones((n, n), dtype=np.int8)
    np.fill_diagonal(sign, 0)
    return SignedState(sign)


def all_enmity(n: int) -> SignedState:
    return new_state(n)


def from_bipartition(n: int, side: Iterable[int]) -> SignedState:
    """Balanced state whose two classes are ``side`` and its complement."""
    x = np.ones(n, dtype=np.int8)
    x[list(side)] = -1
    sign = np.outer(x, x).astype(np.int8)
    np.fill_diagonal(sign, 0)
    return SignedState(sign)

"""Executable witnesses: replayable flip schedules and statistical run checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import red_black
from .constructions import (
    ClusterPartition,
    PerturbationSet,
    apply_perturbation,
    j_prime,
    j_prime_reference,
    j_prime_sizes,
    j_sizes,
    j_state,
    sample_perturbation,
)
from .dynamics import BED, CTD, Status, run
from .state import Edge, SignedState, edge, from_bipartition

Triad = tuple[int, int, int]


@dataclass
class FlipSchedule:
    steps: list[tuple[Triad, Edge]]
    dynamics: str
    origin: SignedState
    target: SignedState | None = None

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class ScheduleCheck:
    ok: bool
    final: SignedState
    index: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _triad(u: int, v: int, w: int) -> Triad:
    return tuple(sorted((u, v, w)))


def _imbalanced(state: SignedState, t: Triad) -> bool:
    a, b, c = t
    s = state.sign
    return int(s[a, b]) * s[a, c] * s[b, c] < 0


def validate_schedule(schedule: FlipSchedule) -> ScheduleCheck:
    """Replay ``schedule`` and report the first step the dynamics could not take.

    CTD needs rank >= n/2 - 1 for the flipped edge; BED needs the edge to have
    the highest rank in its triad. Each triad must be imbalanced when used.
    """
    state = schedule.origin.copy()
    n = state.n
    for i, (t, e) in enumerate(schedule.steps):
        t = _triad(*t)
        u, v = edge(*e)
        if len(set(t)) != 3 or u not in t or v not in t:
            return ScheduleCheck(False, state, i, f"edge {e} is not in triad {t}")
        r = int(state.rank[u, v])
        if schedule.dynamics == "CTD":
            if 2 * r < n - 2:
                return ScheduleCheck(False, state, i, f"rank {r} of {e} is below n/2 - 1")
        elif schedule.dynamics == "BED":
            a, b, c = t
            best = max(state.rank[a, b], state.rank[a, c], state.rank[b, c])
            if r < best:
                return ScheduleCheck(False, state, i, f"rank {r} of {e} is below the triad maximum {best}")
        else:
            raise ValueError(f"unknown regime {schedule.dynamics!r}")
        if not _imbalanced(state, t):
            return ScheduleCheck(False, state, i, f"triad {t} is balanced")
        state.flip(u, v)
    if schedule.target is not None and state != schedule.target:
        return ScheduleCheck(False, state, None, "final state differs from the target")
    return ScheduleCheck(True, state)


def bed_balancing_schedule(state: SignedState) -> FlipSchedule:
    """A BED-feasible flip sequence from ``state`` to a balanced state.

    Grows a set B whose internal triads (two or more vertices in B) are all
    balanced. Each round takes the lowest-rank edge (v, w) from B to the
    outside and, for every imbalanced triad (v, w, u), either flips (w, u) or
    flips (b, u) for all b in B, whichever the triad's maximal-rank edge
    allows. A round flips at most n*|B| edges, so the total stays below n**3.
    """
    work = state.copy()
    n = work.n
    steps: list[tuple[Triad, Edge]] = []

    def do(t: Triad, e: Edge) -> None:
        steps.append((t, e))
        work.flip(*e)

    if work.imbalanced:
        masked = np.where(np.triu(np.ones((n, n), dtype=bool), 1), work.rank, np.iinfo(np.int32).max)
        v1, v2 = np.unravel_index(np.argmin(masked), masked.shape)
        inside = [int(v1)]
        v, w = int(v1), int(v2)
        while work.imbalanced:
            in_b = np.zeros(n, dtype=bool)
            in_b[inside] = True
            for u in range(n):
                if in_b[u] or u == w:
                    continue
                t = _triad(v, w, u)
                if not _imbalanced(work, t):
                    continue
                rvu, rwu = work.rank[v, u], work.rank[w, u]
                if rwu > rvu or (rwu == rvu and edge(w, u) < edge(v, u)):
                    do(t, edge(w, u))
                else:
                    do(t, edge(v, u))
                    for b in sorted(inside):
                        if b != v:
                            do(_triad(b, w, u), edge(b, u))
            inside.append(w)
            if not work.imbalanced or len(inside) == n:
                break
            in_b[w] = True
            outside = np.flatnonzero(~in_b)
            block = work.rank[np.ix_(inside, outside)]
            best = block.min()
            cands = [edge(inside[i], int(outside[j])) for i, j in np.argwhere(block == best)]
            a, b = min(cands)
            v, w = (a, b) if in_b[a] else (b, a)
    return FlipSchedule(steps, "BED", state.copy(), None)


# reaching and escaping J_n under CTD


def _bound_ok(n: int, load: int) -> bool:
    """load <= n/12 - 1, compared exactly."""
    return Fraction(load) <= Fraction(n, 12) - 1


def _cluster_of(n: int) -> np.ndarray:
    return ClusterPartition(j_sizes(n)).assignment


def _first_imbalanced_triad(state: SignedState, u: int, v: int) -> Triad:
    s = state.sign
    prod = s[u, v] * s[u].astype(np.int64) * s[v]
    w = int(np.flatnonzero(prod < 0)[0])
    return _triad(u, v, w)


def ctd_reaching_schedule(initial: SignedState) -> FlipSchedule:
    """CTD-feasible path from a friendship-sparse state to J_n.

    Phase one turns every enmity inside a J_n cluster into a friendship, phase
    two every friendship across clusters into an enmity, both lexicographically.
    """
    n = initial.n
    if n < 11:
        raise ValueError(f"needs n >= 11, got {n}")
    if initial == j_state(n):
        return FlipSchedule([], "CTD", initial.copy(), initial.copy())
    degree = int((initial.sign > 0).sum(axis=1).max())
    if not _bound_ok(n, degree):
        raise ValueError(f"a vertex has {degree} friendships, above n/12 - 1 = {Fraction(n, 12) - 1}")
    cluster = _cluster_of(n)
    work = initial.copy()
    steps: list[tuple[Triad, Edge]] = []
    same = cluster[:, None] == cluster[None, :]
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for mask in (same & (work.sign < 0) & upper, ~same & (work.sign > 0) & upper):
        for u, v in np.argwhere(mask):
            u, v = int(u), int(v)
            steps.append((_first_imbalanced_triad(work, u, v), (u, v)))
            work.flip(u, v)
    return FlipSchedule(steps, "CTD", initial.copy(), j_state(n))


@dataclass
class EscapeReport:
    n: int
    perturbation_size: int
    static_ok: bool
    static_violations: list[str]
    runs: int
    runs_ok: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.static_ok and self.runs_ok == self.runs

    def to_json(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def _max_load(edges) -> int:
    load: dict[int, int] = {}
    for u, v in edges:
        load[u] = load.get(u, 0) + 1
        load[v] = load.get(v, 0) + 1
    return max(load.values(), default=0)


def escape_certificate(n: int, perturbation: PerturbationSet, seeds) -> EscapeReport:
    """Check that CTD from J_n with the edges of E0 flipped comes back to J_n.

    Statically, every edge of E0 has rank >= n/2 and every other edge rank
    < n/2 - 1 in the perturbed state. Dynamically, each seeded CTD run must jam
    at exactly J_n after flipping each edge of E0 once.
    """
    if n < 11:
        raise ValueError(f"needs n >= 11, got {n}")
    e0 = {edge(*e) for e in perturbation.edges}
    if not _bound_ok(n, _max_load(e0)):
        raise ValueError("E0 exceeds n/12 - 1 edges at some vertex")
    target = j_state(n)
    start = apply_perturbation(target, e0)
    in_e0 = np.zeros((n, n), dtype=bool)
    for u, v in e0:
        in_e0[u, v] = in_e0[v, u] = True
    violations = []
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for u, v in np.argwhere(upper & in_e0 & (2 * start.rank < n)):
        violations.append(f"E0 edge ({u}, {v}) has rank {start.rank[u, v]} < n/2")
    for u, v in np.argwhere(upper & ~in_e0 & (2 * start.rank >= n - 2)):
        violations.append(f"edge ({u}, {v}) outside E0 has rank {start.rank[u, v]} >= n/2 - 1")
    seeds = list(seeds)
    good = 0
    failures = []
    for seed in seeds:
        trace = run(start, CTD, seed=seed)
        flips = sorted(trace.flips)
        if trace.status is not Status.JAMMED:
            failures.append(f"seed {seed}: ended {trace.status.value}")
        elif trace.final != target:
            failures.append(f"seed {seed}: jammed away from J_n")
        elif flips != sorted(e0):
            failures.append(f"seed {seed}: flipped {len(flips)} edges, E0 has {len(e0)}")
        else:
            good += 1
    return EscapeReport(n, len(e0), not violations, violations[:20], len(seeds), good, failures[:20])


# fast BED convergence near balance


@dataclass
class RedFastReport:
    n: int
    condition: int
    initial_red: int
    runs: int
    runs_ok: int
    flips: list[int]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.runs_ok == self.runs

    def to_json(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def red_fast_condition(state: SignedState, reference: SignedState) -> int:
    """1 or 2 for the first satisfied closeness condition, 0 if neither holds."""
    red = red_black(state, reference).red
    n = state.n
    if Fraction(int(red.sum(axis=1).max())) <= Fraction(n, 4) - 1:
        return 1
    if 2 * int(np.count_nonzero(red.any(axis=1))) <= n:
        return 2
    return 0


def red_fast_check(state: SignedState, reference: SignedState, seeds) -> RedFastReport:
    """BED from a state close to ``reference`` must flip red edges only, once each."""
    condition = red_fast_condition(state, reference)
    if not condition:
        raise ValueError("neither closeness condition holds for this state and reference")
    initial_red = red_black(state, reference).red_count
    seeds = list(seeds)
    good = 0
    counts = []
    failures = []
    for seed in seeds:
        trace = run(state, BED, seed=seed)
        sign = state.sign.copy()
        red = initial_red
        problem = None
        for t, (u, v) in enumerate(trace.flips):
            if sign[u, v] == reference.sign[u, v]:
                problem = f"seed {seed}: flip {t} hits black edge ({u}, {v})"
                break
            sign[u, v] = sign[v, u] = -sign[u, v]
            red -= 1
        counts.append(len(trace.flips))
        if problem is None and len(trace.flips) != initial_red:
            problem = f"seed {seed}: {len(trace.flips)} flips for {initial_red} red edges"
        if problem is None and (trace.status is not Status.BALANCED or red != 0):
            problem = f"seed {seed}: did not finish at the reference"
        if problem:
            failures.append(problem)
        else:
            good += 1
    return RedFastReport(state.n, condition, initial_red, len(seeds), good, counts, failures[:20])


def random_balanced(n: int, rng: np.random.Generator) -> SignedState:
    return from_bipartition(n, np.flatnonzero(rng.random(n) < 0.5).tolist())


def plant_condition1(n: int, rng: np.random.Generator) -> tuple[SignedState, SignedState]:
    """Random balanced reference with a maximal red set of degree <= n/4 - 1."""
    reference = random_balanced(n, rng)
    bound = int(Fraction(n, 4) - 1)
    return apply_perturbation(reference, sample_perturbation(n, bound, rng)), reference


def plant_condition2(n: int, rng: np.random.Generator) -> tuple[SignedState, SignedState]:
    """Random balanced reference with red edges among n//2 random vertices only."""
    reference = random_balanced(n, rng)
    hot = np.sort(rng.choice(n, size=n // 2, replace=False))
    reds = set()
    while not reds:
        reds = {(int(hot[i]), int(hot[j])) for i in range(hot.size) for j in range(i + 1, hot.size)
                if rng.random() < 0.5}
    return apply_perturbation(reference, reds), reference


# fast BED convergence from J'_n


@dataclass
class JammedFastReport:
    n: int
    x: int
    runs: int
    subset_ok: int
    balanced: int
    audits: int
    min_good: int
    max_bad: int
    flips: list[int]
    failures: list[str] = field(default_factory=list)

    @property
    def mean_flips(self) -> float:
        return float(np.mean(self.flips))

    @property
    def ok(self) -> bool:
        return (self.subset_ok == self.runs and self.balanced == self.runs
                and self.min_good >= 2 * self.x and self.max_bad <= 16)

    def to_json(self) -> dict:
        return {**asdict(self), "mean_flips": self.mean_flips, "ok": self.ok}


def good_bad_counts(state: SignedState, reference: SignedState) -> tuple[np.ndarray, np.ndarray]:
    """Per red edge, imbalanced triads where it strictly outranks the other two (good) or not (bad)."""
    s = state.sign.astype(np.int64)
    r = state.rank
    us, vs = np.nonzero(np.triu(state.sign != reference.sign, 1))
    imb = (s[us, vs][:, None] * s[us] * s[vs]) < 0
    top = r[us, vs][:, None]
    good = imb & (top > r[us]) & (top > r[vs])
    return good.sum(axis=1), (imb & ~good).sum(axis=1)


def jammed_fast_check(n: int, seeds, audit_every: int = 10) -> JammedFastReport:
    """BED from J'_n: only edges of E0 flip, balance is reached, good/bad triad bounds hold."""
    start = j_prime(n)
    reference = j_prime_reference(n)
    x = j_prime_sizes(n)[0]
    e0 = red_black(start, reference).red
    seeds = list(seeds)
    subset_ok = balanced = audits = 0
    min_good, max_bad = np.iinfo(np.int64).max, 0
    counts = []
    failures = []
    for seed in seeds:
        trace = run(start, BED, seed=seed)
        counts.append(len(trace.flips))
        balanced += trace.status is Status.BALANCED
        outside = [e for e in trace.flips if not e0[e]]
        if outside:
            failures.append(f"seed {seed}: flipped {outside[0]} outside E0")
        else:
            subset_ok += 1
        replay = start.copy()
        for t, e in enumerate(trace.flips):
            if t % audit_every == 0 and replay.imbalanced:
                good, bad = good_bad_counts(replay, reference)
                audits += 1
                if good.size:
                    min_good = min(min_good, int(good.min()))
                    max_bad = max(max_bad, int(bad.max()))
            replay.flip(*e)
    return JammedFastReport(n, x, len(seeds), subset_ok, balanced, audits, int(min_good), max_bad, counts,
                            failures[:20])

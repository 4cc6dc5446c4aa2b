"""Compiled inner loops for signed complete graphs.

State layout shared by every kernel:

    sign     int8[n, n]   symmetric, +1 / -1 off the diagonal, 0 on it
    rank     int32[n, n]  symmetric, imbalanced triads through each edge
    rowsum   int64[n]     sum of rank over the edges at each vertex
    cnt      int64[2]     [imbalanced triads, CTD-movable edges]

An edge is CTD-movable when it lies in an imbalanced triad and 2*rank >= n - 2,
i.e. rank >= max(1, (n - 1) // 2). A state is jammed exactly when it is
imbalanced and has no movable edge.
"""

import numpy as np
from numba import njit

IMB = 0
MOVABLE = 1

LTD = 0
CTD = 1
BED = 2

BALANCED = 0
JAMMED = 1
STEPLIMIT = 2

# consecutive failed uniform triple draws before switching to rank-weighted sampling
MAX_TRIPLE_REJECTIONS = 50


@njit(cache=True)
def movable_threshold(n):
    return max(1, (n - 1) // 2)


@njit(cache=True)
def init_state(sign, rank, rowsum, cnt):
    """Populate the rank cache and counters from `sign` by a full triad scan."""
    n = sign.shape[0]
    rank[:, :] = 0
    total = 0
    for u in range(n):
        for v in range(u + 1, n):
            suv = sign[u, v]
            for w in range(v + 1, n):
                if suv * sign[u, w] * sign[v, w] < 0:
                    rank[u, v] += 1
                    rank[u, w] += 1
                    rank[v, w] += 1
                    total += 1
    thr = movable_threshold(n)
    cnt[IMB] = total
    cnt[MOVABLE] = 0
    rowsum[:] = 0
    for u in range(n):
        for v in range(u + 1, n):
            r = rank[u, v]
            rank[v, u] = r
            rowsum[u] += r
            rowsum[v] += r
            if r >= thr:
                cnt[MOVABLE] += 1


@njit(cache=True)
def flip_edge(sign, rank, rowsum, cnt, u, v):
    """Negate sign[u, v], updating ranks and counters in O(n)."""
    n = sign.shape[0]
    thr = movable_threshold(n)
    suv = sign[u, v]
    acc = 0
    moved = 0
    for w in range(n):
        if w == u or w == v:
            continue
        # balanced before the flip <=> imbalanced after it
        d = 1 if suv * sign[u, w] * sign[v, w] > 0 else -1
        r = rank[u, w]
        rank[u, w] = r + d
        rank[w, u] = r + d
        moved += (r + d >= thr) - (r >= thr)
        r = rank[v, w]
        rank[v, w] = r + d
        rank[w, v] = r + d
        moved += (r + d >= thr) - (r >= thr)
        rowsum[w] += 2 * d
        acc += d
    r = rank[u, v]
    rank[u, v] = r + acc
    rank[v, u] = r + acc
    moved += (r + acc >= thr) - (r >= thr)
    rowsum[u] += 2 * acc
    rowsum[v] += 2 * acc
    cnt[IMB] += acc
    cnt[MOVABLE] += moved
    sign[u, v] = -suv
    sign[v, u] = -suv


@njit(cache=True)
def _randint(rng, k):
    # float draw scaled to [0, k); bias is below k / 2**53
    return int(rng.random() * k)


@njit(cache=True)
def _weighted(weights, total, rng):
    t = rng.random() * total
    last = 0
    for i in range(weights.shape[0]):
        if weights[i] > 0:
            last = i
            t -= weights[i]
            if t < 0:
                return i
    return last


@njit(cache=True)
def sample_triad(sign, rank, rowsum, cnt, rng):
    """Uniformly random imbalanced triad (a, b, c) with a < b < c.

    Uniform vertex triples are tried first. After MAX_TRIPLE_REJECTIONS misses
    the draw is exact and rejection-free: a vertex with probability proportional
    to its rank sum, an incident edge proportional to its rank (so each edge
    comes out with probability rank / (3 * imbalanced)), then one of that
    edge's imbalanced triads uniformly.
    """
    n = sign.shape[0]
    for _ in range(MAX_TRIPLE_REJECTIONS):
        u = _randint(rng, n)
        v = _randint(rng, n - 1)
        if v >= u:
            v += 1
        a = min(u, v)
        b = max(u, v)
        w = _randint(rng, n - 2)
        if w >= a:
            w += 1
        if w >= b:
            w += 1
        if sign[a, b] * sign[a, w] * sign[b, w] < 0:
            return _sorted3(a, b, w)
    a = _weighted(rowsum, 6 * cnt[IMB], rng)
    b = _weighted(rank[a], rowsum[a], rng)
    j = _randint(rng, rank[a, b])
    sab = sign[a, b]
    w = 0
    for w in range(n):
        if w == a or w == b:
            continue
        if sab * sign[a, w] * sign[b, w] < 0:
            if j == 0:
                break
            j -= 1
    return _sorted3(a, b, w)


@njit(cache=True)
def _sorted3(a, b, c):
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    return a, b, c


@njit(cache=True)
def _triad_edge(a, b, c, i):
    if i == 0:
        return a, b
    if i == 1:
        return a, c
    return b, c


@njit(cache=True)
def ltd_step(sign, rank, rowsum, cnt, p, rng):
    a, b, c = sample_triad(sign, rank, rowsum, cnt, rng)
    neg = 0
    enemy = 0
    for i in range(3):
        x, y = _triad_edge(a, b, c, i)
        if sign[x, y] < 0:
            neg += 1
            enemy = i
    if neg == 3:
        pick = _randint(rng, 3)
    elif rng.random() < p:
        pick = enemy
    else:
        k = _randint(rng, 2)
        pick = 0
        for i in range(3):
            if i == enemy:
                continue
            if k == 0:
                pick = i
                break
            k -= 1
    x, y = _triad_edge(a, b, c, pick)
    flip_edge(sign, rank, rowsum, cnt, x, y)
    return a, b, c, x, y


@njit(cache=True)
def ctd_step(sign, rank, rowsum, cnt, rng):
    n = sign.shape[0]
    a, b, c = sample_triad(sign, rank, rowsum, cnt, rng)
    x, y = _triad_edge(a, b, c, _randint(rng, 3))
    twice = 2 * rank[x, y]
    if twice > n - 2 or (twice == n - 2 and rng.random() < 0.5):
        flip_edge(sign, rank, rowsum, cnt, x, y)
        return a, b, c, x, y
    return a, b, c, -1, -1


@njit(cache=True)
def bed_step(sign, rank, rowsum, cnt, rng):
    a, b, c = sample_triad(sign, rank, rowsum, cnt, rng)
    r0 = rank[a, b]
    r1 = rank[a, c]
    r2 = rank[b, c]
    best = max(r0, max(r1, r2))
    ties = (r0 == best) + (r1 == best) + (r2 == best)
    k = _randint(rng, ties) if ties > 1 else 0
    pick = 0
    for i, r in enumerate((r0, r1, r2)):
        if r == best:
            if k == 0:
                pick = i
                break
            k -= 1
    x, y = _triad_edge(a, b, c, pick)
    flip_edge(sign, rank, rowsum, cnt, x, y)
    return a, b, c, x, y


@njit(cache=True)
def run_loop(sign, rank, rowsum, cnt, kind, p, rng, max_steps, record, record_energy):
    """Iterate a step rule until balance, jamming (CTD only) or the step budget.

    Returns (status, attempts, nflips, flips[nflips, 2], imbalance_after[nflips]).
    The flip and energy buffers are empty unless the matching flag is set.
    """
    cap = 1024 if record else 0
    flips = np.empty((cap, 2), dtype=np.int32)
    ecap = 1024 if record_energy else 0
    energy = np.empty(ecap, dtype=np.int64)
    attempts = 0
    nflips = 0
    while True:
        if cnt[IMB] == 0:
            status = BALANCED
            break
        if kind == CTD and cnt[MOVABLE] == 0:
            status = JAMMED
            break
        if attempts >= max_steps:
            status = STEPLIMIT
            break
        if kind == LTD:
            _, _, _, x, y = ltd_step(sign, rank, rowsum, cnt, p, rng)
        elif kind == CTD:
            _, _, _, x, y = ctd_step(sign, rank, rowsum, cnt, rng)
        else:
            _, _, _, x, y = bed_step(sign, rank, rowsum, cnt, rng)
        attempts += 1
        if x < 0:
            continue
        if record:
            if nflips == flips.shape[0]:
                grown = np.empty((2 * nflips, 2), dtype=np.int32)
                grown[:nflips] = flips
                flips = grown
            flips[nflips, 0] = min(x, y)
            flips[nflips, 1] = max(x, y)
        if record_energy:
            if nflips == energy.shape[0]:
                egrown = np.empty(2 * nflips, dtype=np.int64)
                egrown[:nflips] = energy
                energy = egrown
            energy[nflips] = cnt[IMB]
        nflips += 1
    return status, attempts, nflips, flips[: nflips if record else 0], energy[: nflips if record_energy else 0]


@njit(cache=True)
def gray_census(sign, rank, rowsum, cnt, eu, ev):
    """Visit all 2**m sign patterns on the listed edges by Gray-code flips.

    Returns (balanced, jammed) counts. The caller starts from any pattern.
    """
    m = eu.shape[0]
    balanced = 0
    jammed = 0
    total = 1 << m
    for k in range(total):
        if k > 0:
            j = 0
            t = k
            while t & 1 == 0:
                t >>= 1
                j += 1
            flip_edge(sign, rank, rowsum, cnt, eu[j], ev[j])
        if cnt[IMB] == 0:
            balanced += 1
        elif cnt[MOVABLE] == 0:
            jammed += 1
    return balanced, jammed


@njit(cache=True)
def exact_bipartition(sign):
    """Minimise sign disagreements over all balanced states, by Gray code.

    Vertex 0 is pinned to class 0. Returns (distance, assignment) where the
    assignment is the lexicographically smallest among the minimisers.
    """
    n = sign.shape[0]
    x = np.ones(n, dtype=np.int64)
    # h[j] = sum_k sign[j, k] * x[k]
    h = np.zeros(n, dtype=np.int64)
    for j in range(n):
        for k in range(n):
            h[j] += sign[j, k]
    agree = 0
    for j in range(n):
        agree += h[j] * x[j]
    agree //= 2
    m = n * (n - 1) // 2
    best = (m - agree) // 2
    best_x = x.copy()
    total = 1 << (n - 1)
    for k in range(1, total):
        j = 0
        t = k
        while t & 1 == 0:
            t >>= 1
            j += 1
        i = j + 1
        agree -= 2 * x[i] * h[i]
        x[i] = -x[i]
        for r in range(n):
            h[r] += 2 * x[i] * sign[r, i]
        dist = (m - agree) // 2
        if dist < best or (dist == best and _lex_less(x, best_x)):
            best = dist
            best_x[:] = x
    out = np.zeros(n, dtype=np.int8)
    for j in range(n):
        out[j] = 0 if best_x[j] == 1 else 1
    return best, out


@njit(cache=True)
def _lex_less(x, y):
    # class 0 <=> +1, so lexicographic order on classes is reversed order on x
    for j in range(x.shape[0]):
        if x[j] != y[j]:
            return x[j] > y[j]
    return False

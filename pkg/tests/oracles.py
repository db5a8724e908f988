"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written in the most direct way possible
(enumeration, BFS, walking the lasso) and shares no code with the package
paths it checks.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from ltlplan.formula import (
    AtomicProp,
    LAlways,
    LAnd,
    LAtom,
    LEventually,
    LNot,
    LOr,
    LRelease,
    LtlFormula,
    LTrue,
    LUntil,
    PAnd,
    PAtom,
    PFalse,
    PNot,
    POr,
    PropFormula,
    PTrue,
)


def assignments(atoms):
    """All label sets over the given atoms."""
    atoms = sorted(atoms)
    for bits in itertools.product([False, True], repeat=len(atoms)):
        yield frozenset(a for a, b in zip(atoms, bits) if b)


def eval_prop_reference(f: PropFormula, labels) -> bool:
    if isinstance(f, PTrue):
        return True
    if isinstance(f, PFalse):
        return False
    if isinstance(f, PAtom):
        return f.atom in labels
    if isinstance(f, PNot):
        return not eval_prop_reference(f.child, labels)
    if isinstance(f, PAnd):
        return all(eval_prop_reference(c, labels) for c in f.children)
    if isinstance(f, POr):
        return any(eval_prop_reference(c, labels) for c in f.children)
    raise TypeError(f)


def random_prop(rng, atoms, depth: int) -> PropFormula:
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.1:
            return PTrue()
        if r < 0.2:
            return PFalse()
        return PAtom(atoms[rng.integers(len(atoms))])
    op = rng.integers(3)
    if op == 0:
        return PNot(random_prop(rng, atoms, depth - 1))
    kids = tuple(random_prop(rng, atoms, depth - 1)
                 for _ in range(rng.integers(2, 4)))
    return PAnd(kids) if op == 1 else POr(kids)


def random_ltl(rng, atoms, depth: int) -> LtlFormula:
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.1:
            return LTrue()
        return LAtom(atoms[rng.integers(len(atoms))])
    op = rng.integers(6)
    if op == 0:
        return LNot(random_ltl(rng, atoms, depth - 1))
    if op == 1:
        return LEventually(random_ltl(rng, atoms, depth - 1))
    if op == 2:
        return LAlways(random_ltl(rng, atoms, depth - 1))
    if op == 3:
        return LUntil(random_ltl(rng, atoms, depth - 1),
                      random_ltl(rng, atoms, depth - 1))
    kids = tuple(random_ltl(rng, atoms, depth - 1)
                 for _ in range(rng.integers(2, 4)))
    return LAnd(kids) if op == 4 else LOr(kids)


def eval_ltl_lasso(f: LtlFormula, prefix, cycle) -> bool:
    """Direct LTL semantics on the infinite word prefix . cycle^omega.

    Works for arbitrary formulas (negation handled semantically); positions
    beyond the prefix wrap back to the cycle start.
    """
    word = [frozenset(s) for s in prefix] + [frozenset(s) for s in cycle]
    k0 = len(prefix)
    n = len(word)
    assert len(cycle) >= 1

    def succ(k):
        return k + 1 if k + 1 < n else k0

    memo: dict[tuple[LtlFormula, int], bool] = {}

    def sat(g: LtlFormula, k: int) -> bool:
        key = (g, k)
        if key in memo:
            return memo[key]
        if isinstance(g, LTrue):
            v = True
        elif isinstance(g, LAtom):
            v = g.atom in word[k]
        elif isinstance(g, LNot):
            v = not sat(g.child, k)
        elif isinstance(g, LAnd):
            v = all(sat(c, k) for c in g.children)
        elif isinstance(g, LOr):
            v = any(sat(c, k) for c in g.children)
        elif isinstance(g, (LUntil, LEventually)):
            left = g.left if isinstance(g, LUntil) else LTrue()
            right = g.right if isinstance(g, LUntil) else g.child
            v = False
            w = k
            for _ in range(n + 1):
                if sat(right, w):
                    v = True
                    break
                if not sat(left, w):
                    break
                w = succ(w)
        elif isinstance(g, (LRelease, LAlways)):
            left = g.left if isinstance(g, LRelease) else LNot(LTrue())
            right = g.right if isinstance(g, LRelease) else g.child
            v = True
            w = k
            for _ in range(n + 1):
                if not sat(right, w):
                    v = False
                    break
                if sat(left, w):
                    break
                w = succ(w)
        else:
            raise TypeError(g)
        memo[key] = v
        return v

    return sat(f, 0)


def all_lasso_words(atoms, max_total: int):
    """Every (prefix, cycle) pair with len(prefix)+len(cycle) <= max_total."""
    symbols = list(assignments(atoms))
    for total in range(1, max_total + 1):
        for cyc_len in range(1, total + 1):
            pre_len = total - cyc_len
            for pre in itertools.product(symbols, repeat=pre_len):
                for cyc in itertools.product(symbols, repeat=cyc_len):
                    yield list(pre), list(cyc)


def bfs_hops(n_states: int, edges) -> list[list[float]]:
    """All-pairs shortest hop counts of a digraph given as (src, dst) pairs."""
    adj = [[] for _ in range(n_states)]
    for s, d in edges:
        adj[s].append(d)
    dist = [[math.inf] * n_states for _ in range(n_states)]
    for s in range(n_states):
        dist[s][s] = 0
        frontier = [s]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if dist[s][v] > depth:
                        dist[s][v] = depth
                        nxt.append(v)
            frontier = nxt
    return dist


def grid_dijkstra_length(point_ok, p, q, bounds, resolution: int) -> float:
    """Shortest 8-connected grid path length between p and q.

    ``point_ok`` decides whether a grid vertex is traversable.  Used as a
    coarse reference for geodesic distances.
    """
    x0, y0, x1, y1 = bounds
    hx = (x1 - x0) / resolution
    hy = (y1 - y0) / resolution

    def to_cell(pt):
        i = min(resolution, max(0, int(round((pt[0] - x0) / hx))))
        j = min(resolution, max(0, int(round((pt[1] - y0) / hy))))
        return i, j

    def coords(c):
        return np.array([x0 + c[0] * hx, y0 + c[1] * hy])

    start, goal = to_cell(p), to_cell(q)
    ok = {}

    def usable(c):
        if c not in ok:
            ok[c] = (0 <= c[0] <= resolution and 0 <= c[1] <= resolution
                     and point_ok(coords(c)))
        return ok[c]

    if not usable(start) or not usable(goal):
        return math.inf
    dist = {start: 0.0}
    heap = [(0.0, start)]
    moves = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
             if (dx, dy) != (0, 0)]
    while heap:
        d, c = heapq.heappop(heap)
        if c == goal:
            return d
        if d > dist.get(c, math.inf):
            continue
        for dx, dy in moves:
            nc = (c[0] + dx, c[1] + dy)
            if not usable(nc):
                continue
            nd = d + math.hypot(dx * hx, dy * hy)
            if nd < dist.get(nc, math.inf):
                dist[nc] = nd
                heapq.heappush(heap, (nd, nc))
    return math.inf

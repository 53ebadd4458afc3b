"""Independent reference implementations written as plain loops.

They share no code with the package and favour obviousness over speed.
"""

import itertools
import math

import numpy as np


def adjacency_by_scan(centers, t):
    m = len(centers)
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            if i != j and math.dist(centers[i], centers[j]) <= t + 1e-9:
                adj[i, j] = True
    return adj


def crossing_weight(w, S):
    S = set(S)
    return sum(w[i][j] for i in S for j in range(len(w)) if j not in S)


def volume(w, S):
    return sum(w[i][j] for i in S for j in range(len(w)))


def objective(w, S, kind):
    m = len(w)
    S = set(S)
    Sc = set(range(m)) - S
    cut = crossing_weight(w, S)
    vs, vc = volume(w, S), volume(w, Sc)
    bal = {
        "mcut": 1.0,
        "rcut": len(S) * len(Sc),
        "ncut": vs * vc,
        "ncutalt": vs * vc / (vs + vc) if vs + vc > 0 else 0.0,
        "ccut": min(vs, vc),
    }[kind]
    return None if bal == 0 else cut / bal


def all_subsets_with(m, s, t):
    """Every node set containing ``s`` and avoiding ``t``."""
    others = [i for i in range(m) if i not in (s, t)]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            yield {s, *extra}


def st_min_by_enumeration(w, s, t):
    return min(crossing_weight(w, S) for S in all_subsets_with(len(w), s, t))


def two_way_min_by_enumeration(w, kind):
    m = len(w)
    best, arg = math.inf, []
    for r in range(1, m):
        for S in itertools.combinations(range(m), r):
            if 0 not in S:
                continue
            v = objective(w, S, kind)
            if v is None:
                continue
            if not arg or v < best - 1e-12 * (1 + abs(best)):
                best, arg = v, [frozenset(S)]
            elif abs(v - best) <= 1e-12 * (1 + abs(best)):
                arg.append(frozenset(S))
    return best, arg


def set_partitions(items):
    """All set partitions of ``items`` by recursive insertion."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def ks_by_grid_scan(a, b, extra=2000):
    """Sup-distance of two ECDFs on a dense grid plus all data points."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    lo, hi = min(a.min(), b.min()) - 1, max(a.max(), b.max()) + 1
    pts = np.concatenate([np.linspace(lo, hi, extra), a, b, a - 1e-9, b - 1e-9])
    best = 0.0
    for x in pts:
        best = max(best, abs(np.mean(a <= x) - np.mean(b <= x)))
    return best


def finite_difference_gradient(f, p, h=1e-6):
    p = np.asarray(p, float)
    g = np.zeros_like(p)
    for r in range(p.size):
        up, dn = p.copy(), p.copy()
        up[r] += h
        dn[r] -= h
        g[r] = (f(up) - f(dn)) / (2 * h)
    return g


def random_product_graph(rng, m, density=0.5):
    """Connected random adjacency (a spanning path plus random chords) and masses."""
    adj = np.zeros((m, m), dtype=bool)
    order = rng.permutation(m)
    for a, b in zip(order, order[1:]):
        adj[a, b] = adj[b, a] = True
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < density:
                adj[i, j] = adj[j, i] = True
    x = rng.dirichlet(np.ones(m))
    return x, adj

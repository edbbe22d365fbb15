"""Covers and packings of function classes on trees.

Everything is evaluated on *node paths*: the ``2**(T-1)`` root-to-leaf paths
of a depth-``T`` tree (the final sign of a length-``T`` path is never read).
A requirement is a pair (node path, value sequence of some ``f`` along it);
a cover must match every requirement.

For ``p = inf`` (and the exact 0-cover) a set of requirements can share one
cover tree iff they are pairwise compatible node by node, because intervals
on the line that meet pairwise have a common point.  The minimum cover is
then the chromatic number of the conflict graph, computed exactly.  For
``p = 1, 2`` the minimum is found by a mixed-integer program over candidate
node values (midpoints of attained values); that result is exact over the
candidate grid and carries ``grid_restricted=True``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, e, inf, lcm
import itertools

import numpy as np

from . import config
from .classes import as_fraction
from .errors import CapacityError, ContractError, DomainError, KindError, StructureError
from .shattering import FatOracle
from .trees import Tree, join, path_node_matrix, split

__all__ = [
    "CoverSet", "is_cover", "projection", "zero_cover_min", "cover", "cover_number",
    "greedy_cover", "cover_construct", "g_k", "sauer_bound", "packing_number",
    "strong_packing_number", "packing", "pointwise_entropy", "cover_compose",
    "min_coloring", "parse_norm",
]

MAX_REQUIREMENTS = 160


def parse_norm(p):
    if p in (inf, "inf", "Inf", "INF", "oo", float("inf")):
        return inf
    p = int(p)
    if p not in (0, 1, 2):
        raise DomainError(f"unsupported norm {p!r}; use 0, 1, 2 or inf")
    return p


@dataclass
class CoverSet:
    """Real-valued trees of a common depth forming a cover."""
    trees: list
    norm: object
    alpha: Fraction
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.trees)

    def to_json(self):
        return {"size": len(self.trees), "norm": "inf" if self.norm == inf else self.norm,
                "alpha": str(self.alpha), "trees": [t.to_json() for t in self.trees],
                "meta": {k: v for k, v in self.meta.items() if isinstance(v, (int, str, bool))}}


# -- exact arithmetic helpers ------------------------------------------------

def _node_paths(T):
    return path_node_matrix(T)[::2]


def _int_dtype(L, T):
    return np.int64 if L < (1 << 20) and T < 64 else object


def projection(F, x, i):
    """The tree ``f_i(x)`` with exact values."""
    S = F.scale
    return Tree(x.depth, (Fraction(int(F.table[i, v]), S) for v in x.values))


def _proj_array(F, x, L):
    """Values of every row along every node path, in units of ``1/L``."""
    xs = np.asarray(x.values, dtype=np.int64)
    if np.any(xs < 0) or np.any(xs >= F.domain_size):
        raise DomainError("tree holds points outside the class domain")
    A = F.table[:, xs[_node_paths(x.depth)]]
    dt = _int_dtype(L, x.depth)
    return A.astype(dt) * (L // F.scale)


def _tree_array(trees, T, L):
    nodes = _node_paths(T)
    dt = _int_dtype(L, T)
    out = np.empty((len(trees), nodes.shape[0], T), dtype=dt)
    for j, v in enumerate(trees):
        vals = np.array([int(as_fraction(a) * L) for a in v.values], dtype=dt)
        out[j] = vals[nodes]
    return out


def _within(diff, p, a, T):
    """``diff`` has shape (..., T) in units of 1/L; ``a`` is alpha*L (integer)."""
    if p == 0:
        return np.all(diff == 0, axis=-1)
    if p == inf:
        return np.max(np.abs(diff), axis=-1) <= a
    if p == 1:
        return np.sum(np.abs(diff), axis=-1) <= T * a
    return np.sum(diff * diff, axis=-1) <= T * a * a


def is_cover(V, F, x, alpha=None, p=None):
    """Check the cover definition over all rows and all paths."""
    if isinstance(V, CoverSet):
        alpha = V.alpha if alpha is None else alpha
        p = V.norm if p is None else p
        trees = V.trees
    else:
        trees = list(V)
    alpha = as_fraction(0 if alpha is None else alpha)
    p = parse_norm(inf if p is None else p)
    if alpha == 0:
        p = 0
    T = x.depth
    if any(v.depth != T for v in trees):
        raise StructureError("cover trees must match the tree depth")
    if F.size == 0:
        return True
    if not trees:
        return False
    L = lcm(F.scale, alpha.denominator,
            *(as_fraction(a).denominator for v in trees for a in v.values))
    A = _proj_array(F, x, L)
    B = _tree_array(trees, T, L)
    a = int(alpha * L)
    ok = np.zeros(A.shape[:2], dtype=bool)
    for j in range(B.shape[0]):
        ok |= _within(A - B[j][None], p, a, T)
    return bool(ok.all())


def _requirements(F, x, L):
    """Distinct (path index, sequence) requirements as an array plus path ids."""
    A = _proj_array(F, x, L)
    seqs, paths = [], []
    for pi in range(A.shape[1]):
        for row in sorted({tuple(r) for r in A[:, pi, :].tolist()}):
            seqs.append(row)
            paths.append(pi)
    return np.array(seqs, dtype=A.dtype).reshape(len(seqs), x.depth), np.array(paths)


# -- exact graph colouring ---------------------------------------------------

def _greedy_clique(n, adj):
    order = sorted(range(n), key=lambda v: -bin(adj[v]).count("1"))
    best = 0
    for start in order:
        cand, size = adj[start], 1
        while cand:
            v = max((u for u in range(n) if cand >> u & 1), key=lambda u: bin(adj[u] & cand).count("1"))
            size += 1
            cand &= adj[v]
        best = max(best, size)
    return best


def _dsatur(n, adj, k=None):
    """Greedy DSATUR colouring, or exact k-colouring search when ``k`` is given."""
    colors = [-1] * n
    deg = [bin(a).count("1") for a in adj]

    def pick():
        best, key = None, None
        for v in range(n):
            if colors[v] < 0:
                sat = len({colors[u] for u in range(n) if adj[v] >> u & 1 and colors[u] >= 0})
                kv = (sat, deg[v])
                if key is None or kv > key:
                    best, key = v, kv
        return best

    if k is None:
        for _ in range(n):
            v = pick()
            used = {colors[u] for u in range(n) if adj[v] >> u & 1}
            colors[v] = next(c for c in itertools.count() if c not in used)
        return colors

    def rec(done, ncol):
        if done == n:
            return True
        v = pick()
        used = {colors[u] for u in range(n) if adj[v] >> u & 1}
        for c in range(min(ncol + 1, k)):
            if c not in used:
                colors[v] = c
                if rec(done + 1, max(ncol, c + 1)):
                    return True
                colors[v] = -1
        return False

    return colors if rec(0, 0) else None


def min_coloring(n, adj, exact=True):
    """Colouring of a graph given as neighbour bitmasks; exact minimum by default."""
    if n == 0:
        return []
    best = _dsatur(n, adj)
    if not exact:
        return best
    lo, hi = _greedy_clique(n, adj), max(best) + 1
    for k in range(lo, hi):
        c = _dsatur(n, adj, k)
        if c is not None:
            return c
    return best


def _conflicts(seqs, paths, T, a):
    """Neighbour bitmasks: requirements that cannot share an ell-infinity tree."""
    nodes = _node_paths(T)
    n = len(seqs)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            eq = nodes[paths[i]] == nodes[paths[j]]
            shared = T if eq.all() else int(np.argmin(eq))
            d = seqs[i][:shared] - seqs[j][:shared]
            if shared and np.max(np.abs(d)) > 2 * a:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _trees_from_classes(groups, seqs, paths, F, x, L):
    T = x.depth
    nodes = _node_paths(T)
    default = F.table[0, list(x.values)] * (L // F.scale) if F.size else np.zeros(len(x.values))
    trees = []
    for members in groups:
        lo, hi = {}, {}
        for r in members:
            for t, node in enumerate(nodes[paths[r]]):
                v = int(seqs[r][t])
                lo[node] = min(lo.get(node, v), v)
                hi[node] = max(hi.get(node, v), v)
        vals = [Fraction(lo[i] + hi[i], 2 * L) if i in lo else Fraction(int(default[i]), L)
                for i in range(len(x.values))]
        trees.append(Tree(T, vals))
    return trees


def _linf_cover(F, x, alpha, p_label, exact=True):
    alpha = as_fraction(alpha)
    L = lcm(F.scale, alpha.denominator)
    seqs, paths = _requirements(F, x, L)
    if exact and len(seqs) > config.budget(MAX_REQUIREMENTS):
        raise CapacityError(f"{len(seqs)} path requirements exceed the exact search budget; "
                            "use cover_construct or greedy mode")
    adj = _conflicts(seqs, paths, x.depth, int(alpha * L))
    colors = min_coloring(len(seqs), adj, exact=exact)
    k = max(colors) + 1 if colors else 0
    groups = [[r for r in range(len(seqs)) if colors[r] == c] for c in range(k)]
    trees = _trees_from_classes(groups, seqs, paths, F, x, L)
    return CoverSet(trees, p_label, alpha, {"mode": "exact" if exact else "greedy",
                                            "grid_restricted": False})


def zero_cover_min(F, x):
    """Size and witness of a smallest 0-cover of ``F`` on ``x``."""
    if F.size == 0:
        return 0, CoverSet([], 0, Fraction(0))
    V = _linf_cover(F, x, 0, 0)
    return len(V), V


# -- greedy and MILP covers -------------------------------------------------------

def _distinct_projections(F, x):
    L = F.scale
    A = _proj_array(F, x, L)
    flat = A.reshape(A.shape[0], -1)
    _, idx = np.unique(flat, axis=0, return_index=True)
    return sorted(idx.tolist())


def greedy_cover(F, x, alpha, p):
    """Greedy set cover using the class's own projections as cover trees."""
    alpha, p = as_fraction(alpha), parse_norm(p)
    if alpha == 0:
        p = 0
    if F.size == 0:
        return CoverSet([], p, alpha, {"mode": "greedy"})
    L = lcm(F.scale, alpha.denominator)
    seqs, paths = _requirements(F, x, L)
    cands = _distinct_projections(F, x)
    A = _proj_array(F, x, L)
    a = int(alpha * L)
    cov = np.array([_within(seqs - A[c][paths], p, a, x.depth) for c in cands])
    left = np.ones(len(seqs), dtype=bool)
    chosen = []
    while left.any():
        gains = (cov & left).sum(axis=1)
        c = int(np.argmax(gains))
        chosen.append(cands[c])
        left &= ~cov[c]
    return CoverSet([projection(F, x, i) for i in chosen], p, alpha,
                    {"mode": "greedy", "grid_restricted": True})


def _milp_cover(F, x, alpha, p):
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    T = x.depth
    L = 2 * lcm(F.scale, alpha.denominator)
    seqs, paths = _requirements(F, x, L)
    upper = greedy_cover(F, x, alpha, p)
    K = len(upper)
    if K <= 1:
        return upper
    R, N = len(seqs), len(x.values)
    nodes = _node_paths(T)
    S = L // F.scale
    cands = []
    for n in range(N):
        vals = sorted({int(v) * S for v in F.table[:, x.values[n]]})
        cands.append(sorted({(u + w) // 2 for u in vals for w in vals}))
    zi = {}
    for j in range(K):
        for n in range(N):
            for c in range(len(cands[n])):
                zi[j, n, c] = len(zi)
    nz = len(zi)
    ai = lambda r, j: nz + r * K + j
    yi = lambda j: nz + R * K + j
    nvar = nz + R * K + K
    a = int(alpha * L)
    budget = T * a if p == 1 else T * a * a
    cost = lambda d: abs(d) if p == 1 else d * d

    rows, lb, ub = [], [], []
    A = lil_matrix((N * K + R * K + R + R * K + K, nvar))
    k = 0
    for j in range(K):
        for n in range(N):
            for c in range(len(cands[n])):
                A[k, zi[j, n, c]] = 1
            lb.append(1); ub.append(1); k += 1
    for r in range(R):
        for j in range(K):
            A[k, ai(r, j)] = 1
            A[k, yi(j)] = -1
            lb.append(-np.inf); ub.append(0); k += 1
    for r in range(R):
        for j in range(K):
            A[k, ai(r, j)] = 1
        lb.append(1); ub.append(np.inf); k += 1
    for r in range(R):
        path = nodes[paths[r]]
        dmax = sum(max(cost(v - int(seqs[r][t])) for v in cands[n]) for t, n in enumerate(path))
        M = max(dmax - budget, 0)
        for j in range(K):
            # sum of costs <= budget + M (1 - a_rj)
            for t, n in enumerate(path):
                for c, v in enumerate(cands[n]):
                    w = cost(v - int(seqs[r][t]))
                    if w:
                        A[k, zi[j, n, c]] = w
            A[k, ai(r, j)] = M
            lb.append(-np.inf); ub.append(budget + M); k += 1
    for j in range(K - 1):
        A[k, yi(j)] = 1
        A[k, yi(j + 1)] = -1
        lb.append(0); ub.append(np.inf); k += 1
    A = A[:k].tocsr()
    obj = np.zeros(nvar)
    obj[nz + R * K:] = 1
    res = milp(obj, constraints=LinearConstraint(A, lb, ub), integrality=np.ones(nvar),
               bounds=Bounds(0, 1), options={"presolve": True})
    if res.x is None:
        return upper
    sol = np.round(res.x).astype(int)
    trees = []
    for j in range(K):
        if not sol[yi(j)]:
            continue
        vals = []
        for n in range(N):
            c = next(c for c in range(len(cands[n])) if sol[zi[j, n, c]])
            vals.append(Fraction(cands[n][c], L))
        trees.append(Tree(T, vals))
    V = CoverSet(trees, p, alpha, {"mode": "exact", "grid_restricted": True})
    if len(V) < len(upper) and is_cover(V, F, x):
        return V
    return upper if len(upper) <= len(V) else V


def cover(F, x, alpha, p=inf, mode="exact"):
    """A small (exact mode: smallest) ``alpha``-cover of ``F`` on ``x``."""
    alpha, p = as_fraction(alpha), parse_norm(p)
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    if mode not in ("exact", "greedy"):
        raise DomainError(f"unknown cover mode {mode!r}")
    if F.size == 0:
        return CoverSet([], p, alpha, {"mode": mode})
    if mode == "greedy":
        return greedy_cover(F, x, alpha, p)
    if alpha == 0 or p in (0, inf):
        V = _linf_cover(F, x, alpha, p)
        V.meta["grid_restricted"] = False
        return V
    seqs, _ = _requirements(F, x, F.scale)
    if len(seqs) > config.budget(MAX_REQUIREMENTS):
        raise CapacityError(f"{len(seqs)} path requirements exceed the exact search budget")
    return _milp_cover(F, x, alpha, p)


def cover_number(F, x, alpha, p=inf, mode="exact"):
    """Size of :func:`cover`; exact for p in {0, inf}, grid-restricted for p in {1, 2}."""
    return len(cover(F, x, alpha, p, mode))


# -- packings -----------------------------------------------------------------

def _separation(F, x, alpha, p):
    """Distinct projections and, per member and path, the bitmask of members separated from it."""
    alpha, p = as_fraction(alpha), parse_norm(p)
    if alpha == 0:
        p = 0
    idx = _distinct_projections(F, x)
    if (1 << len(idx)) > config.budget():
        raise CapacityError(f"2**{len(idx)} subsets exceed the budget")
    L = lcm(F.scale, alpha.denominator)
    A = _proj_array(F, x, L)[idx]
    a = int(alpha * L)
    m, P = len(idx), A.shape[1]
    sep = np.zeros((m, m, P), dtype=bool)
    for i in range(m):
        sep[i] = ~_within(A - A[i][None], p, a, x.depth)
        sep[i, i] = False
    masks = [[sum(1 << j for j in range(m) if sep[i, j, pi]) for pi in range(P)] for i in range(m)]
    return idx, masks, P


def _largest_family(m, ok):
    best = []

    def rec(chosen, cmask, start):
        nonlocal best
        if len(chosen) + (m - start) <= len(best):
            return
        for i in range(start, m):
            c, cm = chosen + [i], cmask | (1 << i)
            if ok(c, cm):
                if len(c) > len(best):
                    best = c
                rec(c, cm, i + 1)

    rec([], 0, 0)
    return best


def packing(F, x, alpha, p=inf, strong=False):
    """Largest (strongly) ``alpha``-separated subset of the projections.

    Returns ``(rows, paths)``: class row indices of the packing and, for the
    weak notion, one separating node path per member (a single common path
    for the strong notion).
    """
    if F.size == 0:
        return [], []
    idx, masks, P = _separation(F, x, alpha, p)
    m = len(idx)

    def weak_ok(c, cm):
        return all(any((cm & ~(1 << v)) & ~sm == 0 for sm in masks[v]) for v in c)

    def strong_ok(c, cm):
        return any(all((cm & ~(1 << v)) & ~masks[v][pi] == 0 for v in c) for pi in range(P))

    best = _largest_family(m, strong_ok if strong else weak_ok)
    cm = sum(1 << v for v in best)
    if strong:
        pi = next(pi for pi in range(P) if all((cm & ~(1 << v)) & ~masks[v][pi] == 0 for v in best))
        paths = [2 * pi]
    else:
        paths = [2 * next(pi for pi in range(P) if (cm & ~(1 << v)) & ~masks[v][pi] == 0)
                 for v in best]
    return [idx[v] for v in best], paths


def packing_number(F, x, alpha, p=inf):
    return len(packing(F, x, alpha, p)[0])


def strong_packing_number(F, x, alpha, p=inf):
    return len(packing(F, x, alpha, p, strong=True)[0])


# -- constructive cover for levels classes ----------------------------------------

def g_k(d, T, k):
    """``sum_{i<=d} C(T, i) k**i``; zero for negative ``d``."""
    if d < 0:
        return 0
    return sum(comb(T, i) * k ** i for i in range(min(d, T) + 1))


def sauer_bound(d, T, k):
    """Closed-form ``(e k T / d)**d`` upper bound on :func:`g_k` (valid for ``T >= d``)."""
    if d <= 0:
        return 1.0
    return (e * k * T / d) ** d


def cover_construct(F, x, mode="fat1"):
    """Recursive cover of a ``levels(k)`` class built by pairing subtree covers.

    ``mode="fat1"`` gives a 0-cover; ``mode="fat2"`` gives an ell-infinity cover
    of radius ``1/(2k)`` (half a level), merging the two adjacent root parts
    that keep the full fat-shattering dimension at scale two levels.
    """
    if F.kind != "levels":
        raise KindError(f"cover_construct needs a levels(k) class, got {F.kind_label()}")
    if mode not in ("fat1", "fat2"):
        raise DomainError(f"unknown construction mode {mode!r}")
    k = F.k
    step = F.scale // k
    oracles = {}

    def fat2(mask, sub):
        pts = tuple(sorted(set(sub.values)))
        if pts not in oracles:
            oracles[pts] = FatOracle(F, Fraction(2, k), pts)
        return oracles[pts].dim(mask)

    def build(mask, sub):
        root = sub.root
        col = F.table[:, root]
        parts = {}
        for i in range(F.size):
            if mask >> i & 1:
                parts.setdefault(int(col[i]) // step, 0)
                parts[int(col[i]) // step] |= 1 << i
        groups = [(Fraction(lv, k), m) for lv, m in sorted(parts.items())]
        if mode == "fat2" and len(groups) > 1:
            d = fat2(mask, sub)
            top = [j for j, (_, m) in enumerate(groups) if fat2(m, sub) == d]
            if len(top) == 2 and groups[top[1]][0] - groups[top[0]][0] == Fraction(1, k):
                (u, mu), (w, mw) = groups[top[0]], groups[top[1]]
                groups[top[0]] = ((u + w) / 2, mu | mw)
                del groups[top[1]]
        out = []
        for val, m in groups:
            if sub.depth == 1:
                out.append(Tree(1, (val,)))
                continue
            _, left, right = split(sub)
            Vl, Vr = build(m, left), build(m, right)
            for j in range(max(len(Vl), len(Vr))):
                out.append(join(val, Vl[min(j, len(Vl) - 1)], Vr[min(j, len(Vr) - 1)]))
        return out

    if F.size == 0:
        trees = []
    else:
        trees = build(F.full_mask, x)
    radius = Fraction(0) if mode == "fat1" else Fraction(1, 2 * k)
    return CoverSet(trees, inf, radius, {"mode": f"construct-{mode}"})


# -- pointwise entropy and composition ---------------------------------------------

def pointwise_entropy(F, alpha, exact=None):
    """Fewest functions on the domain that ell-infinity ``alpha``-cover ``F`` pointwise.

    Exact (minimum colouring) for up to 64 rows unless ``exact=False``.
    """
    alpha = as_fraction(alpha)
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    m = F.size
    if m == 0:
        return 0
    lim = 2 * alpha * F.scale
    A = F.table
    adj = [0] * m
    for i in range(m):
        far = np.max(np.abs(A - A[i][None]), axis=1) > lim
        adj[i] = sum(1 << j for j in np.flatnonzero(far).tolist())
    if exact is None:
        exact = m <= 64
    return max(min_coloring(m, adj, exact=exact)) + 1


def cover_compose(W, V, grid=None):
    """Cover of ``G o F`` at radius ``2 alpha`` from a pointwise cover ``W`` of ``G``.

    ``W`` is a sequence of callables on values; each must be 1-Lipschitz on
    ``grid`` (default: every node value of ``V``).
    """
    pts = sorted({as_fraction(a) for v in V.trees for a in v.values} |
                 {as_fraction(a) for a in (grid or ())})
    for g in W:
        gv = [as_fraction(g(a)) for a in pts]
        for (a, ga), (b, gb) in itertools.combinations(zip(pts, gv), 2):
            if abs(ga - gb) > abs(a - b):
                raise ContractError(f"map is not 1-Lipschitz between {a} and {b}")
    trees = [Tree(v.depth, (as_fraction(g(a)) for a in v.values)) for g in W for v in V.trees]
    return CoverSet(trees, inf, 2 * as_fraction(V.alpha), {"mode": "composed"})

"""Brute-force reference implementations written straight from the definitions.

Nothing here shares code with the library's search routines; the tests
compare the fast implementations against these on tiny instances.
"""
from fractions import Fraction
from itertools import combinations, product
from math import inf

import numpy as np
from scipy.optimize import linprog

from seqcomplex.trees import Tree, path_signs


def rows(F):
    return [[Fraction(int(v), F.scale) for v in r] for r in F.table.tolist()]


def values_at(F, x):
    return sorted({r[x] for r in rows(F)})


def fat_recursive(F, alpha, idx=None):
    """Largest d such that some point/witness splits ``idx`` into two d-1 shattering halves."""
    alpha = Fraction(alpha)
    R = rows(F)
    idx = tuple(range(len(R))) if idx is None else idx
    memo = {}

    def dim(S):
        if not S:
            return -1
        if S in memo:
            return memo[S]
        best = 0
        for x in range(F.domain_size):
            for v in {R[i][x] for i in S}:
                s = v - alpha / 2           # witness candidates: breakpoints v - alpha/2
                up = tuple(i for i in S if R[i][x] >= s + alpha / 2)
                dn = tuple(i for i in S if R[i][x] <= s - alpha / 2)
                if up and dn:
                    best = max(best, 1 + min(dim(up), dim(dn)))
        memo[S] = best
        return best

    return dim(idx)


def shatters(F, x, s, alpha):
    """Does ``F`` alpha-shatter tree ``x`` with witness ``s``?"""
    R = rows(F)
    T = x.depth
    for path in range(1 << T):
        eps = path_signs(path, T)
        xs, ss = x.path_values(path), s.path_values(path)
        if not any(all(e * (r[a] - b) >= Fraction(alpha) / 2 for e, a, b in zip(eps, xs, ss))
                   for r in R):
            return False
    return True


def fat_by_trees(F, alpha, max_depth=2):
    """Fat dimension capped at ``max_depth`` by enumerating trees and witnesses."""
    alpha = Fraction(alpha)
    cands = sorted({v - alpha / 2 for r in rows(F) for v in r})
    best = 0
    for d in range(1, max_depth + 1):
        N = (1 << d) - 1
        found = False
        for xv in product(range(F.domain_size), repeat=N):
            x = Tree(d, xv)
            for sv in product(cands, repeat=N):
                if shatters(F, x, Tree(d, sv), alpha):
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = d
    return best


def rad_tree(F, x):
    """``E_eps max_f sum_t eps_t f(x_t(eps))`` by looping over paths."""
    R = rows(F)
    T = x.depth
    tot = Fraction(0)
    for path in range(1 << T):
        eps = path_signs(path, T)
        xs = x.path_values(path)
        tot += max(sum(e * r[a] for e, a in zip(eps, xs)) for r in R)
    return tot / (1 << T)


def rad_sup(F, T):
    from seqcomplex.trees import enumerate_trees
    return max(rad_tree(F, x) for x in enumerate_trees(F.domain_size, T))


def dist_ok(u, v, p, alpha):
    T = len(u)
    d = [abs(a - b) for a, b in zip(u, v)]
    if alpha == 0 or p == 0:
        return all(e == 0 for e in d)
    if p == inf:
        return max(d) <= alpha
    if p == 1:
        return sum(d) <= T * alpha
    return sum(e * e for e in d) <= T * alpha * alpha


def projections(F, x):
    """Per row, the tuple of value sequences along every path."""
    R = rows(F)
    T = x.depth
    return [tuple(tuple(r[a] for a in x.path_values(p)) for p in range(1 << T)) for r in R]


def is_cover(trees, F, x, alpha, p):
    T = x.depth
    for proj in projections(F, x):
        for path in range(1 << T):
            if not any(dist_ok(proj[path], v.path_values(path), p, alpha) for v in trees):
                return False
    return True


def cover_size(F, x, alpha, p=inf, max_k=4):
    """Smallest cover whose trees take pairwise midpoints of attained values at each node.

    For ell-infinity this is the true minimum (an interval constraint is met
    by its midpoint whenever it is met at all).  Returns None above ``max_k``.
    """
    alpha = Fraction(alpha)
    R = rows(F)
    N = len(x.values)
    cands = [sorted({(r[x.values[i]] + s[x.values[i]]) / 2 for r in R for s in R}) for i in range(N)]
    all_trees = [Tree(x.depth, vs) for vs in product(*cands)]
    for k in range(1, max_k + 1):
        for combo in combinations(all_trees, k):
            if is_cover(combo, F, x, alpha, p):
                return k
    return None


def _separated(u, v, p, alpha, path):
    a, b = u[path], v[path]
    T = len(a)
    d = [abs(s - t) for s, t in zip(a, b)]
    if p == inf:
        return max(d) > alpha
    if p == 1:
        return sum(d) > T * alpha
    return sum(e * e for e in d) > T * alpha * alpha


def packing_sizes(F, x, alpha, p):
    """(weak, strong) packing numbers by enumerating subsets of distinct projections."""
    alpha = Fraction(alpha)
    P = sorted(set(projections(F, x)))
    T = x.depth
    weak = strong = 1 if P else 0
    for k in range(2, len(P) + 1):
        for S in combinations(P, k):
            w = all(any(all(_separated(u, v, p, alpha, path) for v in S if v is not u)
                        for path in range(1 << T)) for u in S)
            st = any(all(_separated(u, v, p, alpha, path) for u, v in combinations(S, 2))
                     for path in range(1 << T))
            weak = max(weak, k) if w else weak
            strong = max(strong, k) if st else strong
    return weak, strong


def game_value_float(F, T):
    """Direct-game value by recursion over full histories with a float LP per node."""
    R = np.array([[float(v) for v in r] for r in rows(F)])
    n = F.domain_size

    def V(hist):
        if len(hist) == T:
            return -min(sum(r[x] for x in hist) for r in R)
        nxt = np.array([V(hist + (x,)) for x in range(n)])
        M = R + nxt[None, :]                         # player row i, adversary column x
        m = M.shape[0]
        # min_q max_x (q M)_x
        res = linprog(np.r_[np.zeros(m), 1.0], A_ub=np.c_[M.T, -np.ones(n)], b_ub=np.zeros(n),
                      A_eq=[np.r_[np.ones(m), 0.0]], b_eq=[1.0],
                      bounds=[(0, None)] * m + [(None, None)], method="highs")
        return res.x[-1]

    return V(())


def pointwise_cover_size(F, alpha, max_k=4):
    """Fewest centre functions (pairwise midpoints per point) within alpha everywhere."""
    R = rows(F)
    n = F.domain_size
    cands = [sorted({(r[x] + s[x]) / 2 for r in R for s in R}) for x in range(n)]
    centres = list(product(*cands))
    for k in range(1, max_k + 1):
        for combo in combinations(centres, k):
            if all(any(all(abs(r[x] - c[x]) <= alpha for x in range(n)) for c in combo) for r in R):
                return k
    return None

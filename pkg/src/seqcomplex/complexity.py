"""Sequential Rademacher complexity and the bounds built on it.

Per-tree values are exact: all ``2**T`` sign paths are enumerated and the
supremum over rows is taken on integers before a single division.  Floats
appear only in square roots and logarithms of the bound sides.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, log, sqrt
import itertools

import numpy as np

from . import config
from .classes import FunctionClass, as_fraction
from .covers import cover, zero_cover_min
from .errors import CapacityError, DomainError
from .rng import rng as make_rng
from .shattering import fat_dim
from .trees import Tree, count_trees, enumerate_trees, path_node_matrix, reflect, sign_matrix

__all__ = [
    "RadResult", "rad_fixed_tree", "rad_of_trees", "rad_sup", "massart_bound",
    "dudley_bound", "fat_rad_relation", "linear_rad_check", "structural_checks",
    "MAX_EXACT_DEPTH",
]

MAX_EXACT_DEPTH = 20
TOL = 1e-9


@dataclass
class RadResult:
    value: object
    mode: str
    argmax_tree: Tree = None
    path_count: int = 0
    sample_count: int = 0
    stderr: float = 0.0
    seed: int = None
    meta: dict = field(default_factory=dict)

    def to_json(self):
        v = self.value
        return {"value": str(v) if isinstance(v, Fraction) else v, "value_float": float(v),
                "mode": self.mode, "path_count": self.path_count,
                "sample_count": self.sample_count, "stderr": self.stderr, "seed": self.seed,
                "argmax_tree": self.argmax_tree.to_json() if self.argmax_tree else None}


def _tree_points(F, x):
    xs = np.asarray(x.values, dtype=np.int64)
    if np.any(xs < 0) or np.any(xs >= F.domain_size):
        raise DomainError("tree holds points outside the class domain")
    return xs


def _total(table, xs, T, chunk=1 << 16):
    """Sum over all paths of ``max_rows sum_t eps_t row(x_t(eps))`` (integer)."""
    nodes, eps = path_node_matrix(T), sign_matrix(T)
    total = 0
    for s in range(0, nodes.shape[0], chunk):
        vals = table[:, xs[nodes[s:s + chunk]]]                 # (m, P, T)
        sums = np.einsum("mpt,pt->mp", vals, eps[s:s + chunk])
        total += int(sums.max(axis=0).sum())
    return total


def rad_fixed_tree(F, x, mode="exact", trials=10000, seed=None):
    """Expected supremum of the signed sum over ``F`` along a random path of ``x``."""
    T = x.depth
    xs = _tree_points(F, x)
    if F.size == 0:
        raise DomainError("Rademacher average of an empty class is undefined")
    if mode == "exact":
        if T > MAX_EXACT_DEPTH:
            raise CapacityError(f"depth {T} exceeds the exact limit {MAX_EXACT_DEPTH}")
        P = 1 << T
        return RadResult(Fraction(_total(F.table, xs, T), F.scale * P), "exact-tree",
                         argmax_tree=x, path_count=P)
    if mode in ("mc", "monte-carlo"):
        g = make_rng(seed)
        paths = g.integers(0, 1 << T, size=trials) if T < 63 else None
        shifts = np.arange(T - 1, -1, -1)
        eps = np.where((paths[:, None] >> shifts[None, :]) & 1, 1, -1)
        nodes = (1 << np.arange(T)) - 1 + (paths[:, None] >> (T - np.arange(T)))[:, :]
        vals = F.table[:, xs[nodes]]
        sups = np.einsum("mpt,pt->mp", vals, eps).max(axis=0) / F.scale
        err = float(sups.std(ddof=1) / sqrt(trials)) if trials > 1 else 0.0
        return RadResult(float(sups.mean()), "monte-carlo", argmax_tree=x,
                         sample_count=trials, stderr=err, seed=seed)
    raise DomainError(f"unknown mode {mode!r}")


def rad_of_trees(V):
    """Exact ``E max_v sum_t eps_t v_t(eps)`` for a finite set of real trees."""
    V = list(V)
    if not V:
        raise DomainError("empty tree set")
    T = V[0].depth
    vals = [[as_fraction(a) for a in v.values] for v in V]
    L = lcm(1, *(a.denominator for row in vals for a in row))
    table = np.array([[int(a * L) for a in row] for row in vals], dtype=object)
    nodes, eps = path_node_matrix(T), sign_matrix(T)
    sums = (table[:, nodes] * eps[None]).sum(axis=2)
    return Fraction(int(sums.max(axis=0).sum()), int(L) << T)


def rad_sup(F, n=None, T=1, mode="exact", restarts=8, seed=0):
    """Supremum of :func:`rad_fixed_tree` over all trees with points in ``range(n)``.

    ``local`` mode runs coordinate ascent from seeded random trees and returns
    a value that is a lower bound on the true supremum.
    """
    n = F.domain_size if n is None else n
    if F.size == 0:
        raise DomainError("Rademacher complexity of an empty class is undefined")
    S, P = F.scale, 1 << T
    if mode == "exact":
        best, arg = None, None
        for x in enumerate_trees(n, T):
            v = _total(F.table, np.asarray(x.values), T)
            if best is None or v > best:
                best, arg = v, x
        return RadResult(Fraction(best, S * P), "exact-sup", argmax_tree=arg,
                         path_count=P, meta={"trees": count_trees(n, T)})
    if mode == "local":
        g = make_rng(seed, 1)
        N = (1 << T) - 1
        best, arg = None, None
        for _ in range(restarts):
            vals = g.integers(0, n, size=N)
            cur = _total(F.table, vals, T)
            improved = True
            while improved:
                improved = False
                for i in range(N):
                    keep = vals[i]
                    for c in range(n):
                        if c == keep:
                            continue
                        vals[i] = c
                        v = _total(F.table, vals, T)
                        if v > cur:
                            cur, keep, improved = v, c, True
                    vals[i] = keep
            if best is None or cur > best:
                best, arg = cur, Tree(T, vals.tolist())
        return RadResult(Fraction(best, S * P), "local-search", argmax_tree=arg, path_count=P,
                         seed=seed, meta={"restarts": restarts, "lower_bound": True})
    raise DomainError(f"unknown mode {mode!r}")


def massart_bound(V):
    """Exact left side and the finite-class bound ``sqrt(2 log|V| max sum v^2)``."""
    V = list(V)
    if not V:
        raise DomainError("empty tree set")
    T = V[0].depth
    if T > MAX_EXACT_DEPTH:
        raise CapacityError(f"depth {T} exceeds the exact limit {MAX_EXACT_DEPTH}")
    lhs = rad_of_trees(V)
    nodes = path_node_matrix(T)
    sq = max(max(sum(as_fraction(v.values[i]) ** 2 for i in row) for row in nodes.tolist())
             for v in V)
    rhs = sqrt(2 * log(len(V)) * float(sq))
    return lhs, rhs, float(lhs) <= rhs + TOL


@dataclass
class DudleyReport:
    value: float
    alpha: Fraction
    scales: list
    rad: Fraction = None

    def to_json(self):
        return {"value": self.value, "alpha": str(self.alpha),
                "scales": [[str(b), n] for b, n in self.scales],
                "rad": None if self.rad is None else str(self.rad)}


def dudley_bound(F, x, max_level=12, cover_mode="exact", norm=2):
    """Per-tree integrated complexity, minimised over the dyadic scales and 0.

    The integral from ``alpha`` to 1 is replaced by the sum over dyadic
    segments of (segment length) times ``sqrt(T log N(lower end))``, an upper
    Riemann sum since covering numbers shrink as the radius grows.  The
    ``alpha = 0`` candidate closes the sum with the 0-cover size.
    """
    T = x.depth
    n0, _ = zero_cover_min(F, x) if cover_mode == "exact" else (None, None)
    if n0 is None:
        n0 = len(cover(F, x, 0, 0, "greedy"))
    scales = [(Fraction(1), cover(F, x, 1, norm, cover_mode).__len__())]
    candidates = [(4 * T + 0.0, Fraction(1))]
    integral = 0.0
    j = 0
    while True:
        j += 1
        hi, lo = Fraction(1, 1 << (j - 1)), Fraction(1, 1 << j)
        N = n0 if scales[-1][1] == n0 else len(cover(F, x, lo, norm, cover_mode))
        scales.append((lo, N))
        integral += float(hi - lo) * sqrt(T * log(N))
        candidates.append((4 * T * float(lo) + 12 * integral, lo))
        if N == n0 or j >= max_level:
            break
    tail = float(scales[-1][0]) * sqrt(T * log(n0))
    candidates.append((12 * (integral + tail), Fraction(0)))
    value, alpha = min(candidates, key=lambda c: c[0])
    return DudleyReport(value, alpha, scales)


def _differences(F):
    vals = sorted({int(v) for v in np.unique(F.table)})
    return sorted({Fraction(b - a, F.scale) for a in vals for b in vals if b > a})


def fat_rad_relation(F, n=None, T=1):
    """For every scale ``beta > 2 Rad_T / T`` check ``fat_beta(F) < T``.

    The fat-shattering dimension only changes at differences of attained
    values, so checking those differences above the threshold covers every
    ``beta``.
    """
    rad = rad_sup(F, n, T).value
    thr = 2 * rad / T
    rows = []
    for beta in _differences(F):
        if beta > thr:
            d = fat_dim(F, beta)
            rows.append({"beta": beta, "fat": d, "T": T, "rad": rad, "holds": d < T})
    return {"rad": rad, "threshold": thr, "rows": rows, "holds": all(r["holds"] for r in rows)}


def linear_rad_check(vectors, T, trees=None, n_trees=50, seed=0):
    """Exact per-tree Rademacher averages of the unit-ball linear class.

    For weights in the Euclidean unit ball the supremum along a path is the
    norm of ``sum_t eps_t x_t(eps)``.  Returns the per-tree values and the
    bound ``sqrt(2T) * max ||x||``.
    """
    X = np.array([[float(as_fraction(c)) for c in v] for v in vectors])
    if trees is None:
        g = make_rng(seed, 2)
        trees = [Tree(T, g.integers(0, len(X), size=(1 << T) - 1).tolist()) for _ in range(n_trees)]
    nodes, eps = path_node_matrix(T), sign_matrix(T)
    values = []
    for x in trees:
        pts = X[np.asarray(x.values)[nodes]]                     # (P, T, m)
        s = np.einsum("pt,ptm->pm", eps, pts)
        values.append(float(np.linalg.norm(s, axis=1).mean()))
    bound = sqrt(2 * T) * float(np.linalg.norm(X, axis=1).max()) if len(X) else 0.0
    return values, bound, all(v <= bound + TOL for v in values)


# -- structural properties ------------------------------------------------------

def _row(prop, lhs, rhs, holds, **extra):
    r = {"property": prop, "lhs": lhs, "rhs": rhs, "holds": bool(holds)}
    r.update(extra)
    return r


def _mixtures(F):
    """``F`` together with all pairwise midpoints (a grid slice of the convex hull)."""
    rows = F.rows()
    rows += [[(a + b) / 2 for a, b in zip(r, s)] for r, s in itertools.combinations(F.rows(), 2)]
    return FunctionClass.from_values(rows, bound=None, domain_size=F.domain_size)


LIPSCHITZ_MAPS = {
    "identity": (lambda u: u, 1),
    "clamp-half": (lambda u: max(Fraction(-1, 2), min(Fraction(1, 2), u)), 1),
    "half": (lambda u: u / 2, Fraction(1, 2)),
    "abs": (abs, 1),
    "negate": (lambda u: -u, 1),
}


def structural_checks(F, n=None, T=1, shifts=None):
    """Five structural properties and the contraction inequality, at the sup level."""
    n = F.domain_size if n is None else n
    rad = lambda G: rad_sup(G, n, T).value
    base = rad(F)
    rows = []
    for r in range(1, F.size):
        for idx in itertools.combinations(range(F.size), r):
            sub = rad(F.subclass(idx))
            rows.append(_row("monotone", sub, base, sub <= base, subset=list(idx)))
    hull = rad(_mixtures(F))
    rows.append(_row("convex-hull", hull, base, hull == base))
    for c in (Fraction(-1), Fraction(1, 2), Fraction(2)):
        G = F.map_values(lambda u: c * u, bound=None)
        v = rad(G)
        rows.append(_row("scaling", v, abs(c) * base, v == abs(c) * base, c=c))
    for x in enumerate_trees(n, T):
        neg = rad_fixed_tree(F.map_values(lambda u: -u, bound=None), x).value
        ref = rad_fixed_tree(F, reflect(x)).value
        if neg != ref:
            rows.append(_row("reflection", neg, ref, False, tree=x.values))
            break
    else:
        rows.append(_row("reflection", base, base, True))
    for name, (phi, Lc) in LIPSCHITZ_MAPS.items():
        v = rad(F.map_values(phi, bound=None))
        rows.append(_row("contraction", v, Lc * base, v <= Lc * base, map=name))
    shifts = shifts if shifts is not None else _default_shifts(F)
    for h in shifts:
        G = FunctionClass.from_values([[a + b for a, b in zip(r, h)] for r in F.rows()],
                                      bound=None,
                                      domain_size=F.domain_size)
        v = rad(G)
        rows.append(_row("translation", v, base, v == base, h=list(h)))
    return {"rad": base, "rows": rows, "holds": all(r["holds"] for r in rows)}


def _default_shifts(F):
    n = F.domain_size
    return [tuple(Fraction(0) for _ in range(n)),
            tuple(Fraction((-1) ** i, 2) for i in range(n)),
            tuple(Fraction(1) for _ in range(n))]

"""Littlestone and sequential fat-shattering dimensions with certificates.

Subclasses are row bitsets (Python ints) over a fixed parent class, so the
recursion can memoize on a single integer.  A split at point ``x`` is a pair
of attained values ``a < b`` with ``b - a >= alpha``; the witness is their
midpoint and the two children are ``{f(x) <= a}`` and ``{f(x) >= b}``.  For a
given ``a`` only the smallest admissible ``b`` matters, since the dimension
is monotone in the subclass.
"""
from fractions import Fraction
from dataclasses import dataclass
from math import lcm

import numpy as np

from .classes import FunctionClass, as_fraction
from .errors import DomainError, KindError, SeqComplexError
from .trees import Tree, path_node_matrix, sign_matrix

__all__ = ["ShatterCertificate", "FatOracle", "fat_dim", "ldim", "check_certificate",
           "extract_shattered_tree", "EmptyCertificateError"]


class EmptyCertificateError(SeqComplexError, ValueError):
    """Raised when a certificate is requested at dimension 0."""


@dataclass(frozen=True)
class ShatterCertificate:
    tree: Tree
    witness: Tree
    alpha: Fraction

    @property
    def depth(self):
        return self.tree.depth

    def to_json(self):
        return {"alpha": str(self.alpha), "tree": self.tree.to_json(),
                "witness": self.witness.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(Tree.from_json(obj["tree"]), Tree.from_json(obj["witness"]),
                   Fraction(obj["alpha"]))


def _popcount(m):
    return bin(m).count("1")


class FatOracle:
    """Memoized fat-shattering dimension of subclasses of ``F`` at scale ``alpha``.

    ``points`` restricts the domain points the adversary may use (default:
    all of them).  ``dim(mask)`` returns -1 for the empty subclass.
    """

    def __init__(self, F, alpha, points=None):
        alpha = as_fraction(alpha)
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        self.F = F
        self.alpha = alpha
        self.points = tuple(range(F.domain_size)) if points is None else tuple(sorted(set(points)))
        S = F.scale
        # b - a >= alpha  <=>  (b - a) * alpha.den >= alpha.num * S
        self._gap = (alpha.numerator * S, alpha.denominator)
        self._cols = {}
        for x in self.points:
            col = F.table[:, x].tolist()
            vals = sorted(set(col))
            vmask = [0] * len(vals)
            pos = {v: i for i, v in enumerate(vals)}
            for i, v in enumerate(col):
                vmask[pos[v]] |= 1 << i
            le, acc = [], 0
            for m in vmask:
                acc |= m
                le.append(acc)
            ge, acc = [0] * len(vals), 0
            for j in range(len(vals) - 1, -1, -1):
                acc |= vmask[j]
                ge[j] = acc
            self._cols[x] = (vals, vmask, le, ge)
        self.memo = {0: -1}
        self._best = {}

    def _far(self, lo, hi):
        num, den = self._gap
        return (hi - lo) * den >= num

    def splits(self, mask):
        """Yield ``(x, a, b, minus_mask, plus_mask)`` for every useful split."""
        for x in self.points:
            vals, vmask, le, ge = self._cols[x]
            present = [i for i, m in enumerate(vmask) if m & mask]
            if len(present) < 2 or not self._far(vals[present[0]], vals[present[-1]]):
                continue
            j = 0
            for i in present:
                while j < len(present) and not self._far(vals[i], vals[present[j]]):
                    j += 1
                if j == len(present):
                    break
                b = present[j]
                yield x, vals[i], vals[b], mask & le[i], mask & ge[b]

    def dim(self, mask):
        memo = self.memo
        if mask in memo:
            return memo[mask]
        cap = _popcount(mask).bit_length() - 1
        best, arg = 0, None
        if cap > 0:
            for split in self.splits(mask):
                d = 1 + min(self.dim(split[3]), self.dim(split[4]))
                if d > best:
                    best, arg = d, split
                    if best == cap:
                        break
        memo[mask] = best
        self._best[mask] = arg
        return best

    def best_split(self, mask):
        self.dim(mask)
        return self._best.get(mask)

    def certificate(self, mask=None, depth=None):
        """Shattered tree and witness of the requested depth (default: full dimension)."""
        mask = self.F.full_mask if mask is None else mask
        d = self.dim(mask) if depth is None else depth
        if d <= 0:
            raise EmptyCertificateError("dimension 0: no shattered tree exists")
        if d > self.dim(mask):
            raise DomainError(f"no shattered tree of depth {d}")
        xs, ss = self._build(mask, d)
        return ShatterCertificate(Tree(d, xs), Tree(d, ss), self.alpha)

    def _build(self, mask, d):
        # level-by-level: returns flat heap-order lists for depth d
        x, a, b, lo, hi = self._split_reaching(mask, d)
        s = Fraction(a + b, 2 * self.F.scale)
        if d == 1:
            return [x], [s]
        lx, ls = self._build(lo, d - 1)
        rx, rs = self._build(hi, d - 1)
        xs, ss = [x], [s]
        for t in range(1, d):
            lo_i, hi_i = (1 << (t - 1)) - 1, (1 << t) - 1
            xs += lx[lo_i:hi_i] + rx[lo_i:hi_i]
            ss += ls[lo_i:hi_i] + rs[lo_i:hi_i]
        return xs, ss

    def _split_reaching(self, mask, d):
        split = self.best_split(mask)
        if split is not None and 1 + min(self.dim(split[3]), self.dim(split[4])) >= d:
            return split
        for split in self.splits(mask):
            if 1 + min(self.dim(split[3]), self.dim(split[4])) >= d:
                return split
        raise DomainError(f"no split reaches depth {d}")


def fat_dim(F, alpha, points=None, mask=None):
    """Sequential fat-shattering dimension of ``F`` at scale ``alpha``.

    Returns -1 for an empty class.  ``points`` limits the tree to those
    domain points.
    """
    oracle = FatOracle(F, alpha, points)
    return oracle.dim(F.full_mask if mask is None else mask)


def ldim(F):
    """Littlestone dimension of a binary class."""
    if F.kind != "binary":
        raise KindError(f"ldim needs a binary class, got {F.kind_label()}")
    return FatOracle(F, 2).dim(F.full_mask)


def extract_shattered_tree(F, alpha, points=None):
    """Certificate of depth ``fat_dim(F, alpha)``."""
    return FatOracle(F, alpha, points).certificate()


def check_certificate(F, cert):
    """Direct check of the shattering definition over all ``2**d`` sign paths."""
    d = cert.tree.depth
    if cert.witness.depth != d:
        return False
    if F.size == 0:
        return False
    alpha = as_fraction(cert.alpha)
    xs = np.array(cert.tree.values, dtype=np.int64)
    if np.any(xs < 0) or np.any(xs >= F.domain_size):
        return False
    wit = [as_fraction(s) for s in cert.witness.values]
    L = 2 * alpha.denominator
    for s in wit:
        L = lcm(L, s.denominator)
    S = F.scale
    W = np.array([int(s * S * L) for s in wit], dtype=object)
    margin = alpha * S * L / 2
    nodes = path_node_matrix(d)
    eps = sign_matrix(d)
    V = F.table[:, xs[nodes]].astype(object) * L             # (m, P, d)
    ok = (V - W[nodes][None, :, :]) * eps[None, :, :] >= margin
    return bool(np.all(np.any(np.all(ok, axis=2), axis=0)))

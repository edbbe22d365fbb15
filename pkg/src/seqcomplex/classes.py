"""Finite function classes on finite domains with exact rational values.

A :class:`FunctionClass` stores an integer table ``table[i, x]`` together with
a positive integer ``scale``; the value of function ``i`` at point ``x`` is
``table[i, x] / scale``.  All comparisons in the package happen on these
integers (or on :class:`fractions.Fraction`), never on floats.
"""
from fractions import Fraction
from math import gcd, lcm
import json
import re

import numpy as np

from . import config
from .errors import CapacityError, DomainError, KindError

__all__ = [
    "FunctionClass", "AlphaGrid", "as_fraction", "floor_alpha", "restrict",
    "supervised_loss_class", "leaf_class", "leaf_tree", "thresholds", "full_binary",
    "constants", "random_class", "linear_ball_class", "common_scale",
]

KINDS = ("binary", "levels", "real", "loss")


def as_fraction(v):
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


def common_scale(values, base=1):
    """Least common multiple of ``base`` and all denominators in ``values``."""
    s = int(base)
    for v in values:
        s = lcm(s, as_fraction(v).denominator)
    return s


def _parse_kind(kind, k=None):
    if isinstance(kind, str):
        m = re.fullmatch(r"levels\((\d+)\)", kind)
        if m:
            return "levels", int(m.group(1))
        if kind == "real-grid":
            kind = "real"
    if kind not in KINDS:
        raise KindError(f"unknown class kind {kind!r}")
    return kind, (int(k) if k is not None else None)


class FunctionClass:
    """Finite family of functions ``{0..n-1} -> grid``, duplicates removed.

    Parameters
    ----------
    table : array-like of int, shape (m, n)
        Scaled values.
    scale : int
        Common denominator.
    kind : {"binary", "levels", "real", "loss"} or "levels(k)"
        ``binary`` entries are ``+-scale``; ``levels`` entries lie in
        ``{0, scale/k, ..., scale}``; ``real`` entries satisfy
        ``|v| <= bound * scale``; ``loss`` entries lie in ``[0, 2*scale]``.
    bound : rational or None
        Range limit for ``real`` classes; ``None`` takes the largest
        absolute entry (at least 1).
    """

    def __init__(self, table, scale=1, kind="real", k=None, domain_size=None,
                 bound=1, meta=None):
        kind, k = _parse_kind(kind, k)
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, domain_size or 0)
        if arr.ndim != 2:
            raise DomainError("function table must be two-dimensional")
        if domain_size is not None and arr.shape[1] != domain_size:
            raise DomainError(f"table has {arr.shape[1]} columns, expected {domain_size}")
        scale = int(scale)
        if scale <= 0:
            raise DomainError("scale must be a positive integer")
        # collapse duplicate rows, keeping first occurrences in order
        seen, keep = set(), []
        for i, row in enumerate(map(tuple, arr.tolist())):
            if row not in seen:
                seen.add(row)
                keep.append(i)
        arr = np.ascontiguousarray(arr[keep]) if len(keep) != arr.shape[0] else arr.copy()
        arr.setflags(write=False)
        self.table = arr
        self.scale = scale
        self.kind = kind
        self.k = k
        if bound is None:
            top = int(np.abs(arr).max()) if arr.size else 0
            bound = max(Fraction(1), Fraction(top, scale))
        self.bound = as_fraction(bound)
        self.meta = dict(meta or {})
        self._validate()

    def _validate(self):
        S, a = self.scale, self.table
        if a.size == 0:
            return
        if self.kind == "binary":
            if not np.all(np.abs(a) == S):
                raise KindError("binary class entries must be +-1")
        elif self.kind == "levels":
            if self.k is None or self.k < 1:
                raise KindError("levels kind needs k >= 1")
            if S % self.k:
                raise KindError(f"scale {S} not divisible by k={self.k}")
            step = S // self.k
            if np.any(a < 0) or np.any(a > S) or np.any(a % step):
                raise KindError(f"levels({self.k}) entries must lie in {{0, 1/k, ..., 1}}")
        elif self.kind == "loss":
            if np.any(a < 0) or np.any(a > 2 * S):
                raise KindError("loss class entries must lie in [0, 2]")
        else:
            if np.any(np.abs(a) * self.bound.denominator > self.bound.numerator * S):
                raise KindError(f"entries must lie in [-{self.bound}, {self.bound}]")

    # -- basic accessors -------------------------------------------------
    @property
    def size(self):
        return self.table.shape[0]

    def __len__(self):
        return self.table.shape[0]

    @property
    def domain_size(self):
        return self.table.shape[1]

    @property
    def full_mask(self):
        return (1 << self.size) - 1

    def value(self, i, x):
        return Fraction(int(self.table[i, x]), self.scale)

    def row(self, i):
        return tuple(Fraction(int(v), self.scale) for v in self.table[i])

    def rows(self):
        return [self.row(i) for i in range(self.size)]

    def kind_label(self):
        return f"levels({self.k})" if self.kind == "levels" else self.kind

    def __repr__(self):
        return (f"FunctionClass(size={self.size}, domain_size={self.domain_size}, "
                f"scale={self.scale}, kind={self.kind_label()!r})")

    def __eq__(self, other):
        if not isinstance(other, FunctionClass):
            return NotImplemented
        return (self.scale == other.scale and self.table.shape == other.table.shape
                and bool(np.array_equal(self.table, other.table)))

    def __hash__(self):
        return hash((self.scale, self.table.shape, self.table.tobytes()))

    def row_set(self):
        """Functions as a set of exact value tuples (scale independent)."""
        return {self.row(i) for i in range(self.size)}

    def subclass(self, indices):
        idx = list(indices)
        return FunctionClass(self.table[idx] if idx else np.zeros((0, self.domain_size)),
                             self.scale, self.kind, self.k, self.domain_size, self.bound,
                             self.meta)

    def subclass_mask(self, mask):
        return self.subclass(i for i in range(self.size) if mask >> i & 1)

    def rescaled(self, scale):
        """Same functions expressed with a multiple of the current scale."""
        if scale % self.scale:
            raise DomainError(f"new scale {scale} is not a multiple of {self.scale}")
        return FunctionClass(self.table * (scale // self.scale), scale, self.kind, self.k,
                             self.domain_size, self.bound, self.meta)

    @classmethod
    def from_values(cls, rows, kind="real", k=None, bound=1, domain_size=None, meta=None):
        """Build from rows of exact values (ints, Fractions, decimal strings)."""
        rows = [[as_fraction(v) for v in r] for r in rows]
        S = common_scale((v for r in rows for v in r), base=k or 1)
        table = [[int(v * S) for v in r] for r in rows]
        if not table:
            table = np.zeros((0, domain_size or 0), dtype=np.int64)
        return cls(table, S, kind, k, domain_size, bound, meta)

    def map_values(self, fn, kind="real", bound=1):
        """Class of ``fn(f(x))`` (``fn`` maps Fractions to rationals)."""
        rows = [[fn(v) for v in self.row(i)] for i in range(self.size)]
        return FunctionClass.from_values(rows, kind=kind, bound=bound,
                                         domain_size=self.domain_size)

    # -- serialisation ---------------------------------------------------
    def to_json(self):
        return {"domain_size": self.domain_size, "scale": self.scale,
                "kind": self.kind_label(), "functions": self.table.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind, k = _parse_kind(obj.get("kind", "real"), obj.get("k"))
        n = int(obj["domain_size"])
        table = obj["functions"] or np.zeros((0, n), dtype=np.int64)
        return cls(table, obj.get("scale", 1), kind, k, n, obj.get("bound", 1))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


class AlphaGrid:
    """Points ``-1 + (2j+1) alpha/2`` for ``j >= 0`` with ``(2j+1) alpha <= 4``."""

    def __init__(self, alpha):
        alpha = as_fraction(alpha)
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        if alpha > 4:
            raise DomainError("alpha > 4 leaves the discretization empty")
        self.alpha = alpha
        pts, j = [], 0
        while (2 * j + 1) * alpha <= 4:
            pts.append(-1 + (2 * j + 1) * alpha / 2)
            j += 1
        self.points = tuple(pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"AlphaGrid(alpha={self.alpha}, points={len(self.points)})"

    @property
    def covers_interval(self):
        """True when the buckets ``(r - a/2, r + a/2]`` reach up to 1."""
        return self.points[-1] + self.alpha / 2 >= 1

    def floor(self, a):
        return floor_alpha(a, self)

    def index(self, r):
        return self.points.index(as_fraction(r))


def floor_alpha(a, grid):
    """Nearest grid point to ``a``; ties go to the smaller point."""
    if not isinstance(grid, AlphaGrid):
        grid = AlphaGrid(grid)
    a = as_fraction(a)
    if a < -1 or a > 1:
        raise DomainError(f"{a} lies outside [-1, 1]")
    # points are sorted; first minimiser of |r - a| is the smaller one on ties
    best, best_d = None, None
    for r in grid.points:
        d = abs(r - a)
        if best_d is None or d < best_d:
            best, best_d = r, d
    return best


def restrict(F, x, r, alpha):
    """Rows whose value at ``x`` lies in ``(r - alpha/2, r + alpha/2]``."""
    if not 0 <= x < F.domain_size:
        raise DomainError(f"point {x} outside domain of size {F.domain_size}")
    r, alpha = as_fraction(r), as_fraction(alpha)
    lo, hi = (r - alpha / 2) * F.scale, (r + alpha / 2) * F.scale
    col = F.table[:, x]
    keep = [i for i in range(F.size) if lo < int(col[i]) <= hi]
    return F.subclass(keep)


def supervised_loss_class(F, labels):
    """Absolute-loss class on the product domain ``X x Y``.

    Point ``(x, j)`` of the new domain has index ``x * len(labels) + j``.
    """
    labels = [as_fraction(y) for y in labels]
    if not labels:
        raise DomainError("label set must be nonempty")
    if any(abs(y) > 1 for y in labels):
        raise DomainError("labels must lie in [-1, 1]")
    S = common_scale(labels, base=F.scale)
    if S > config.budget():
        raise CapacityError(f"common grid scale {S} exceeds the budget")
    base = F.table * (S // F.scale)
    ys = np.array([int(y * S) for y in labels], dtype=np.int64)
    loss = np.abs(base[:, :, None] - ys[None, None, :]).reshape(F.size, -1)
    meta = {"base_domain": F.domain_size, "labels": labels}
    return FunctionClass(loss, S, "loss", domain_size=F.domain_size * len(labels), meta=meta)


# -- generators -----------------------------------------------------------

def leaf_tree(T):
    """Depth-``T`` tree whose node ``i`` holds domain point ``i`` (all distinct)."""
    from .trees import Tree
    return Tree(T, range((1 << T) - 1))


def leaf_class(T):
    """``2**(T-1)`` 0/1 functions, each equal to 1 on exactly one leaf of :func:`leaf_tree`."""
    n = (1 << T) - 1
    first_leaf = (1 << (T - 1)) - 1
    table = np.zeros((1 << (T - 1), n), dtype=np.int64)
    for i in range(1 << (T - 1)):
        table[i, first_leaf + i] = 1
    return FunctionClass(table, 1, "levels", k=1)


def thresholds(n):
    """Step functions ``x -> +1 if x >= theta else -1`` on ``n`` ordered points."""
    table = [[1 if x >= theta else -1 for x in range(n)] for theta in range(n + 1)]
    return FunctionClass(table, 1, "binary")


def full_binary(n):
    """All ``2**n`` sign patterns on ``n`` points."""
    if (1 << n) > config.budget():
        raise CapacityError(f"2**{n} functions exceed the budget")
    table = [[1 if (m >> x) & 1 else -1 for x in range(n)] for m in range(1 << n)]
    return FunctionClass(table, 1, "binary")


def constants(grid, domain_size=1):
    """Constant functions, one per grid value."""
    rows = [[v] * domain_size for v in grid]
    return FunctionClass.from_values(rows, domain_size=domain_size)


def random_class(n, m, scale, seed, kind="real", k=None, low=None, high=None):
    """``m`` random rows on ``n`` points (fewer if duplicates collapse).

    ``kind="real"`` draws integers uniformly in ``[low, high]`` (default
    ``[-scale, scale]``); ``binary`` draws signs; ``levels`` draws from
    ``{0, ..., k}`` (scale is then forced to ``k``).
    """
    if m * n > config.budget():
        raise CapacityError(f"{m}x{n} table exceeds the budget")
    rng = np.random.default_rng(seed)
    if kind == "binary":
        return FunctionClass(rng.choice([-1, 1], size=(m, n)), 1, "binary")
    if kind == "levels":
        return FunctionClass(rng.integers(0, k + 1, size=(m, n)), k, "levels", k=k)
    lo = -scale if low is None else low
    hi = scale if high is None else high
    return FunctionClass(rng.integers(lo, hi + 1, size=(m, n)), scale, "real")


def linear_ball_class(vectors, weights=None, norm=1):
    """Linear functions ``x -> <w, x>`` on a finite set of points.

    ``vectors`` are the domain points and ``weights`` the weight vectors
    (defaults to the points themselves); both must have Euclidean norm at most
    ``norm`` with exact rational coordinates.  The points are kept in
    ``meta["vectors"]``.
    """
    pts = [[as_fraction(c) for c in v] for v in vectors]
    ws = pts if weights is None else [[as_fraction(c) for c in w] for w in weights]
    norm = as_fraction(norm)
    for v in pts + ws:
        if sum(c * c for c in v) > norm * norm:
            raise DomainError(f"vector {v} has norm above {norm}")
    rows = [[sum(a * b for a, b in zip(w, x)) for x in pts] for w in ws]
    bound = norm * norm
    return FunctionClass.from_values(rows, kind="real", bound=bound, domain_size=len(pts),
                                     meta={"vectors": pts})


def _gcd_all(values):
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g

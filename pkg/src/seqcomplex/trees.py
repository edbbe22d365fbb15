"""Complete binary trees of uniform depth.

A tree of depth ``T`` is stored as a flat tuple of ``2**T - 1`` node values in
heap order.  The node reached at level ``t`` (1-based) after the signs
``eps[0], ..., eps[t-2]`` lives at offset ``2**(t-1) - 1 + b`` where ``b`` is
the prefix read as a binary number with ``-1 -> 0``, ``+1 -> 1`` and the first
sign as the most significant bit.  The children of offset ``i`` are therefore
``2*i + 1`` (sign -1) and ``2*i + 2`` (sign +1).

Paths over a depth-``T`` tree are encoded as integers in ``[0, 2**T)`` with the
same bit convention; the last sign is never read by the tree itself.
"""
from fractions import Fraction
from functools import lru_cache
import itertools
import json

import numpy as np

from . import config
from .errors import CapacityError, StructureError

__all__ = [
    "Tree", "join", "split", "apply", "reflect", "eval_path", "enumerate_trees",
    "count_trees", "sign_paths", "path_signs", "path_node_matrix", "sign_matrix",
    "constant_tree", "leaf",
]


def _offset(t, prefix):
    return (1 << (t - 1)) - 1 + prefix


def _prefix_bits(eps, t):
    b = 0
    for s in eps[: t - 1]:
        if s not in (-1, 1):
            raise StructureError(f"sign path entries must be +-1, got {s!r}")
        b = (b << 1) | (1 if s == 1 else 0)
    return b


class Tree:
    """Immutable complete binary tree of depth ``depth``."""

    __slots__ = ("depth", "values", "_hash")

    def __init__(self, depth, values):
        depth = int(depth)
        if depth < 1:
            raise StructureError(f"depth must be positive, got {depth}")
        values = tuple(values)
        if len(values) != (1 << depth) - 1:
            raise StructureError(
                f"depth-{depth} tree needs {(1 << depth) - 1} nodes, got {len(values)}")
        self.depth = depth
        self.values = values
        self._hash = None

    @classmethod
    def from_levels(cls, levels):
        """Build from a list of levels; level ``t`` lists its ``2**(t-1)`` nodes."""
        flat = []
        for t, level in enumerate(levels, start=1):
            if len(level) != 1 << (t - 1):
                raise StructureError(f"level {t} must hold {1 << (t - 1)} nodes")
            flat.extend(level)
        return cls(len(levels), flat)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, Tree) and self.depth == other.depth and self.values == other.values

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.depth, self.values))
        return self._hash

    def __repr__(self):
        return f"Tree(depth={self.depth}, values={list(self.values)!r})"

    def node(self, t, prefix):
        """Value at level ``t`` for an integer-encoded prefix."""
        if not 1 <= t <= self.depth:
            raise IndexError(f"round {t} outside 1..{self.depth}")
        return self.values[_offset(t, prefix)]

    def level(self, t):
        if not 1 <= t <= self.depth:
            raise IndexError(f"round {t} outside 1..{self.depth}")
        start = (1 << (t - 1)) - 1
        return self.values[start:start + (1 << (t - 1))]

    def __call__(self, eps, t):
        return eval_path(self, eps, t)

    @property
    def root(self):
        return self.values[0]

    def left(self):
        return split(self)[1]

    def right(self):
        return split(self)[2]

    def image(self):
        return set(self.values)

    def path_values(self, path):
        """Node values visited by an integer-encoded path, rounds 1..T."""
        T = self.depth
        return tuple(self.values[_offset(t, path >> (T - t + 1))] for t in range(1, T + 1))

    def truncate(self, depth):
        """Keep the first ``depth`` levels."""
        if not 1 <= depth <= self.depth:
            raise StructureError(f"cannot truncate depth-{self.depth} tree to {depth}")
        return Tree(depth, self.values[: (1 << depth) - 1])

    def to_json(self):
        return {"depth": self.depth, "values": [_encode_value(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["depth"], [_decode_value(v) for v in obj["values"]])


def _encode_value(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return v
    if isinstance(v, (tuple, list)):
        return [_encode_value(u) for u in v]
    return v


def _decode_value(v):
    if isinstance(v, str):
        f = Fraction(v)
        return f.numerator if f.denominator == 1 else f
    if isinstance(v, float):
        f = Fraction(str(v))
        return f.numerator if f.denominator == 1 else f
    if isinstance(v, list):
        return tuple(_decode_value(u) for u in v)
    return v


def leaf(value):
    """Depth-1 tree holding a single value."""
    return Tree(1, (value,))


def constant_tree(value, depth):
    """Tree whose every node holds ``value`` (a 'constant-mapping' tree)."""
    return Tree(depth, (value,) * ((1 << depth) - 1))


def eval_path(x, eps, t):
    """Value of ``x`` at round ``t`` along the sign path ``eps``.

    Only ``eps[:t-1]`` is read.
    """
    if not 1 <= t <= x.depth:
        raise IndexError(f"round {t} outside 1..{x.depth}")
    if len(eps) < t - 1:
        raise IndexError(f"sign path of length {len(eps)} too short for round {t}")
    return x.values[_offset(t, _prefix_bits(eps, t))]


def join(root, left, right):
    """Tree with the given root constant and subtrees."""
    if left.depth != right.depth:
        raise StructureError(f"cannot join subtrees of depth {left.depth} and {right.depth}")
    values = [root]
    for t in range(1, left.depth + 1):
        values.extend(left.level(t))
        values.extend(right.level(t))
    return Tree(left.depth + 1, values)


def split(x):
    """Inverse of :func:`join`: returns ``(root, left, right)``."""
    if x.depth < 2:
        raise StructureError("a depth-1 tree has no subtrees")
    lvals, rvals = [], []
    for t in range(2, x.depth + 1):
        level = x.level(t)
        half = len(level) // 2
        lvals.extend(level[:half])
        rvals.extend(level[half:])
    return x.root, Tree(x.depth - 1, lvals), Tree(x.depth - 1, rvals)


def apply(f, x):
    """Node-wise image ``f(x)``.

    ``f`` may be a callable, a mapping, or a sequence indexed by node value.
    """
    if callable(f):
        return Tree(x.depth, (f(v) for v in x.values))
    try:
        return Tree(x.depth, (f[v] for v in x.values))
    except (KeyError, IndexError, TypeError) as exc:
        raise LookupError(f"tree value outside the function's domain: {exc}") from exc


def reflect(x):
    """Mirror image: ``reflect(x)`` along ``eps`` equals ``x`` along ``-eps``."""
    values = []
    for t in range(1, x.depth + 1):
        values.extend(reversed(x.level(t)))
    return Tree(x.depth, values)


def count_trees(n, depth):
    return n ** ((1 << depth) - 1)


def enumerate_trees(n, depth, budget=None):
    """Yield every tree over domain ``range(n)`` in lexicographic order."""
    limit = config.budget() if budget is None else budget
    total = count_trees(n, depth)
    if total > limit:
        raise CapacityError(
            f"{total} trees of depth {depth} over {n} points exceed the budget {limit}; "
            "use a heuristic (local search) mode instead")
    for values in itertools.product(range(n), repeat=(1 << depth) - 1):
        yield Tree(depth, values)


def sign_paths(depth):
    """All sign paths of the given length, in integer order."""
    for bits in range(1 << depth):
        yield path_signs(bits, depth)


def path_signs(path, depth):
    return tuple(1 if (path >> (depth - 1 - i)) & 1 else -1 for i in range(depth))


@lru_cache(maxsize=None)
def _path_node_matrix(depth):
    P = 1 << depth
    paths = np.arange(P)[:, None]
    t = np.arange(1, depth + 1)[None, :]
    m = (1 << (t - 1)) - 1 + (paths >> (depth - t + 1))
    m.setflags(write=False)
    return m


def path_node_matrix(depth):
    """``(2**depth, depth)`` array: node offset visited by each path at each round."""
    return _path_node_matrix(depth)


@lru_cache(maxsize=None)
def _sign_matrix(depth):
    P = 1 << depth
    paths = np.arange(P)[:, None]
    shifts = np.arange(depth - 1, -1, -1)[None, :]
    s = np.where((paths >> shifts) & 1, 1, -1).astype(np.int64)
    s.setflags(write=False)
    return s


def sign_matrix(depth):
    """``(2**depth, depth)`` array of the signs of each path."""
    return _sign_matrix(depth)

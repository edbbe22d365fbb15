"""Minimax value of small online games and the adversaries used to probe learners.

In the direct game the player picks ``f_t`` from the class, the adversary picks
``x_t``, and the player loses ``f_t(x_t)``; regret compares with the best
fixed ``f`` in hindsight.  The value-to-go of a history only depends on the
multiset of points played so far (the comparator term is a sum), so states
are memoized on point counts.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import config
from .classes import as_fraction, supervised_loss_class
from .errors import CapacityError, DomainError
from .exact_lp import lp_max, solve_matrix_game
from .rng import rng as make_rng
from .shattering import FatOracle

__all__ = [
    "GameSpec", "GameValue", "value_primal", "value_dual", "supervised_spec",
    "Adversary", "FixedTreeAdversary", "LowerBoundAdversary", "StochasticAdversary",
    "MinimaxAdversary", "rad_adversary", "lower_bound_adversary", "game_state_count",
]


@dataclass
class GameSpec:
    """A finite game: class, horizon and loss mode (``direct`` or ``supervised``)."""
    F: object
    T: int
    mode: str = "direct"
    base: object = None
    labels: tuple = ()
    budget: int = None

    def to_json(self):
        return {"horizon": self.T, "mode": self.mode, "class": self.F.to_json(),
                "labels": [str(y) for y in self.labels]}


@dataclass
class GameValue:
    value: object
    form: str
    strategies: dict = field(default_factory=dict)
    states: int = 0

    @property
    def root(self):
        return self.strategies.get(())

    def to_json(self):
        root = self.root or {}
        enc = lambda v: [str(a) for a in v] if v is not None else None
        return {"value": str(self.value), "value_float": float(self.value), "form": self.form,
                "states": self.states, "player_root": enc(root.get("player")),
                "adversary_root": enc(root.get("adversary"))}


def game_state_count(n, T):
    """Distinct interior states: point multisets of size ``0..T-1`` over ``n`` points."""
    from math import comb
    return sum(comb(n + t - 1, t) for t in range(T))


def _check(spec):
    if spec.T < 1:
        raise DomainError("horizon must be at least 1")
    if spec.F.size == 0:
        raise DomainError("empty class")
    limit = spec.budget or config.game_state_budget()
    count = game_state_count(spec.F.domain_size, spec.T)
    if count > limit:
        raise CapacityError(f"{count} game states exceed the budget {limit}")


def _induction(spec, step, form):
    F, T = spec.F, spec.T
    n, S = F.domain_size, F.scale
    vals = [[Fraction(int(v), S) for v in row] for row in F.table.tolist()]
    memo, strat = {}, {}

    def V(counts, depth):
        if counts in memo:
            return memo[counts]
        if depth == T:
            out = -min(sum(c * row[x] for x, c in enumerate(counts)) for row in vals)
        else:
            nxt = [V(counts[:x] + (counts[x] + 1,) + counts[x + 1:], depth + 1) for x in range(n)]
            out, info = step(vals, nxt)
            strat[counts] = info
        memo[counts] = out
        return out

    value = V((0,) * n, 0)
    strategies = dict(strat)
    strategies[()] = strat[(0,) * n]
    return GameValue(value, form, strategies, len(strat))


def _primal_step(vals, nxt):
    M = [[row[x] + nxt[x] for x in range(len(nxt))] for row in vals]
    sol = solve_matrix_game(M)
    return sol.value, {"player": sol.row, "adversary": sol.col}


def _dual_step(vals, nxt):
    n, m = len(nxt), len(vals)
    # variables (p_1..p_n, z+, z-); maximise z + sum_x p_x W(hx)
    c = list(nxt) + [1, -1]
    A_ub = [[-row[x] for x in range(n)] + [1, -1] for row in vals]
    A_eq = [[1] * n + [0, 0]]
    value, sol = lp_max(c, A_ub, [0] * m, A_eq, [1])
    return value, {"adversary": sol[:n]}


def value_primal(spec):
    """Backward induction with a matrix game at every history."""
    _check(spec)
    return _induction(spec, _primal_step, "primal")


def value_dual(spec):
    """Backward induction with the adversary's concave program solved as an LP."""
    _check(spec)
    return _induction(spec, _dual_step, "dual")


def supervised_spec(F, labels, T):
    """Game on the absolute-loss class over ``X x Y``."""
    labels = tuple(as_fraction(y) for y in labels)
    return GameSpec(supervised_loss_class(F, labels), T, "supervised", F, labels)


# -- adversaries ---------------------------------------------------------------

class Adversary:
    """Supervised adversary.

    ``reset(rng)`` starts a game; each round the engine calls
    ``instance(t, history)`` for ``x_t``, lets the learner predict, then
    calls ``label(t, history, x)``.  ``history`` lists realized
    ``(x, y, prediction)`` triples.  Adversaries whose randomness is a
    uniform sign sequence expose ``sign_count`` and accept ``signs=`` in
    :meth:`reset`, which lets callers average over every draw exactly.
    """
    kind = "base"
    sign_count = None

    def reset(self, rng=None, signs=None):
        self.rng = rng

    def instance(self, t, history):
        raise NotImplementedError

    def label(self, t, history, x):
        raise NotImplementedError


class FixedTreeAdversary(Adversary):
    """Uniform random labels; the instance follows a tree along past labels."""
    kind = "fixed-tree"

    def __init__(self, tree):
        self.tree = tree
        self.sign_count = tree.depth

    def reset(self, rng=None, signs=None):
        self.rng = rng
        self.signs = None if signs is None else list(signs)
        self.prefix = 0

    def instance(self, t, history):
        if t > self.tree.depth:
            raise DomainError("horizon exceeds the tree depth")
        prefix = 0
        for _, y, _ in history:
            prefix = (prefix << 1) | (1 if y > 0 else 0)
        return self.tree.node(t, prefix)

    def label(self, t, history, x):
        if self.signs is not None:
            return self.signs[t - 1]
        return 1 if self.rng.integers(0, 2) else -1


def rad_adversary(x):
    return FixedTreeAdversary(x)


def _block_depth(d, T):
    d = min(d, T)
    while T % d:
        d -= 1
    return d


class LowerBoundAdversary(Adversary):
    """Block adversary built on a shattered tree.

    The horizon splits into ``d`` blocks of length ``k = T / d``.  Labels are
    i.i.d. uniform signs; within block ``j`` the instance is the level-``j``
    node of the shattered tree reached by the signs of the earlier block sums
    (a zero sum counts as ``+1``).
    """
    kind = "lower-bound-block"

    def __init__(self, cert, T):
        self.cert = cert
        self.T = T
        self.d = _block_depth(cert.depth, T)
        self.k = T // self.d
        self.alpha = cert.alpha
        self.sign_count = T

    def reset(self, rng=None, signs=None):
        self.rng = rng
        if signs is None:
            signs = [1 if b else -1 for b in rng.integers(0, 2, size=self.T)]
        self.signs = list(signs)

    def _prefix(self, j):
        prefix = 0
        for b in range(j - 1):
            s = sum(self.signs[b * self.k:(b + 1) * self.k])
            prefix = (prefix << 1) | (1 if s >= 0 else 0)
        return prefix

    def instance(self, t, history):
        j = (t - 1) // self.k + 1
        return self.cert.tree.node(j, self._prefix(j))

    def label(self, t, history, x):
        return self.signs[t - 1]

    def bound(self):
        """``alpha sqrt(T d / 8)`` for the effective block depth."""
        return float(self.alpha) * (self.T * self.d / 8) ** 0.5


def lower_bound_adversary(F, alpha, T):
    oracle = FatOracle(F, alpha)
    d = oracle.dim(F.full_mask)
    if d < 1:
        raise DomainError(f"fat-shattering dimension at scale {alpha} is 0")
    d_eff = _block_depth(d, T)
    cert = oracle.certificate(depth=d_eff)
    return LowerBoundAdversary(cert, T)


class StochasticAdversary(Adversary):
    """i.i.d. uniform instances labelled by a fixed target row, optionally noisy.

    With probability ``noise`` the label is replaced by a uniform draw from
    ``labels`` (default ``{-1, 1}``).
    """
    kind = "stochastic"

    def __init__(self, F, target=0, noise=0.0, labels=(-1, 1)):
        self.F = F
        self.target = target
        self.noise = noise
        self.labels = [as_fraction(y) for y in labels]

    def instance(self, t, history):
        return int(self.rng.integers(0, self.F.domain_size))

    def label(self, t, history, x):
        if self.noise and self.rng.random() < self.noise:
            return self.labels[int(self.rng.integers(0, len(self.labels)))]
        return self.F.value(self.target, x)


class MinimaxAdversary(Adversary):
    """Direct-game adversary that samples points from the solved optimal mixtures."""
    kind = "minimax"

    def __init__(self, game_value, n):
        self.game = game_value
        self.n = n

    def instance(self, t, history):
        counts = [0] * self.n
        for x, _, _ in history:
            counts[x] += 1
        mix = self.game.strategies[tuple(counts)]["adversary"]
        p = np.array([float(v) for v in mix])
        return int(self.rng.choice(self.n, p=p / p.sum()))

    def label(self, t, history, x):
        return None

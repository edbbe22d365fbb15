"""Online learners (Fat-SOA, expert strategies, EWA, multi-scale agnostic) and the simulation loop.

Learners share one supervised interface: ``reset()``, ``mixture(x)`` (a list
of ``(prediction, probability)`` pairs), ``predict(x, rng)`` and
``update(x, y)``.  Deterministic learners return a single pair.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, log, pi, sqrt

import numpy as np

from . import config
from .classes import AlphaGrid, as_fraction, floor_alpha
from .errors import CapacityError, DomainError, ProtocolError
from .rng import rng as make_rng
from .shattering import FatOracle

__all__ = [
    "FatSOAContext", "FatSOA", "ExpertSpec", "Expert", "enumerate_experts", "expert_count",
    "EWA", "EWALearner", "ConstantLearner", "AgnosticLearner", "RegretTrace", "simulate",
    "exact_expected_regret", "realizable_runs", "ewa_bound", "fixed_scale_bound", "multiscale_bound",
    "ewa_loss_matrix_trials",
]


class FatSOAContext:
    """Per ``(F, alpha)`` caches shared by Fat-SOA and all experts built on it.

    Buckets are ``{f : floor_alpha(f(x)) = r}`` for the grid points ``r``;
    they partition the class at every point (including ``f(x) = -1``).
    """

    def __init__(self, F, alpha):
        self.F = F
        self.alpha = as_fraction(alpha)
        self.grid = AlphaGrid(self.alpha)
        self.oracle = FatOracle(F, self.alpha)
        self._buckets = {}
        self._pred = {}

    def buckets(self, x):
        if x not in self._buckets:
            S = self.F.scale
            masks = {r: 0 for r in self.grid.points}
            for i, v in enumerate(self.F.table[:, x].tolist()):
                masks[floor_alpha(Fraction(v, S), self.grid)] |= 1 << i
            self._buckets[x] = masks
        return self._buckets[x]

    def bucket(self, r, x):
        return self.buckets(x)[r]

    def prediction(self, mask, x):
        """Fat-SOA prediction on version space ``mask`` at point ``x`` and the argmax set."""
        key = (mask, x)
        if key not in self._pred:
            dims = {r: self.oracle.dim(mask & m) for r, m in self.buckets(x).items()}
            top = max(dims.values())
            R = [r for r in self.grid.points if dims[r] == top]
            full = self.oracle.dim(mask)
            tied = [r for r in R if dims[r] == full]
            if mask and (len(tied) > 2 or (len(tied) == 2 and tied[1] - tied[0] != self.alpha)):
                raise ProtocolError(f"{len(tied)} non-adjacent buckets keep the full dimension at x={x}")
            self._pred[key] = (sum(R) / len(R), R)
        return self._pred[key]


class FatSOA:
    """Version-space learner predicting the average of the dimension-maximising grid points."""

    def __init__(self, F, alpha, context=None, realizable=True):
        self.ctx = context or FatSOAContext(F, alpha)
        self.alpha = self.ctx.alpha
        self.realizable = realizable
        self.reset()

    def reset(self):
        self.mask = self.ctx.F.full_mask
        self.mistakes = 0
        self.trace = []

    def predict_value(self, x):
        return self.ctx.prediction(self.mask, x)[0]

    def mixture(self, x):
        return [(self.predict_value(x), 1)]

    def predict(self, x, rng=None):
        return self.predict_value(x)

    def update(self, x, y):
        y = as_fraction(y)
        pred = self.predict_value(x)
        self.trace.append((x, y, pred))
        if abs(pred - y) > self.alpha:
            self.mistakes += 1
            self.mask &= self.ctx.bucket(floor_alpha(y, self.ctx.grid), x)
            if self.mask == 0 and self.realizable:
                raise ProtocolError("version space became empty: labels are not realizable",
                                    trace=list(self.trace))


@dataclass(frozen=True)
class ExpertSpec:
    """Rounds ``1 <= i_1 < ... < i_L <= T`` and one label code per round.

    In ``skip`` mode a code ``c`` selects the ``c``-th grid point once the
    bucket of the expert's own Fat-SOA prediction is removed; in ``constant``
    mode it is the ``c``-th grid point.
    """
    rounds: tuple
    labels: tuple
    mode: str = "skip"


class Expert:
    def __init__(self, spec, context):
        self.spec = spec
        self.ctx = context
        self._at = dict(zip(spec.rounds, spec.labels))
        self.reset()

    def reset(self):
        self.mask = self.ctx.F.full_mask
        self.t = 1

    def predict_value(self, x):
        soa = self.ctx.prediction(self.mask, x)[0]
        c = self._at.get(self.t)
        if c is None:
            return soa
        pts = self.ctx.grid.points
        if self.spec.mode == "skip":
            skip = floor_alpha(soa, self.ctx.grid)
            pts = [r for r in pts if r != skip]
        return pts[c]

    def advance(self, x):
        """Consume round ``t`` with instance ``x`` (experts never see labels)."""
        if self.t in self._at:
            self.mask &= self.ctx.bucket(self.predict_value(x), x)
        self.t += 1

    def mixture(self, x):
        return [(self.predict_value(x), 1)]

    def predict(self, x, rng=None):
        return self.predict_value(x)

    def update(self, x, y):
        self.advance(x)


def expert_count(T, fat, grid_size, mode="skip"):
    """``sum_{L <= fat} C(T, L) (|B| - 1)^L`` (``|B|^L`` in constant mode)."""
    b = grid_size - 1 if mode == "skip" else grid_size
    return sum(comb(T, L) * b ** L for L in range(min(fat, T) + 1))


def enumerate_experts(F, alpha, T, mode="skip", context=None, budget=None):
    """Every expert spec with at most ``fat_alpha(F)`` designated rounds."""
    ctx = context or FatSOAContext(F, alpha)
    fat = ctx.oracle.dim(F.full_mask)
    nb = len(ctx.grid)
    total = expert_count(T, fat, nb, mode)
    limit = config.budget() if budget is None else budget
    if total > limit:
        raise CapacityError(f"{total} experts exceed the budget {limit}")
    b = nb - 1 if mode == "skip" else nb
    specs = []
    for L in range(min(fat, T) + 1):
        for rounds in combinations(range(1, T + 1), L):
            for labels in product(range(b), repeat=L):
                specs.append(ExpertSpec(rounds, labels, mode))
    return specs


class EWA:
    """Exponential weights over a finite prefix of experts; losses must lie in [0, 1]."""

    def __init__(self, priors, eta):
        p = np.asarray(priors, dtype=float)
        if p.ndim != 1 or len(p) == 0 or np.any(p <= 0) or abs(p.sum() - 1) > 1e-9:
            raise DomainError("priors must be positive and sum to 1")
        if eta <= 0:
            raise DomainError("eta must be positive")
        self.priors = p
        self.eta = float(eta)
        self.reset()

    def reset(self):
        self.logw = np.log(self.priors)
        self.cum = np.zeros(len(self.priors))

    def weights(self):
        w = np.exp(self.logw - self.logw.max())
        return w / w.sum()

    def update(self, losses):
        losses = np.asarray(losses, dtype=float)
        if np.any(losses < -1e-12) or np.any(losses > 1 + 1e-12):
            raise DomainError("EWA losses must lie in [0, 1]")
        self.logw = self.logw - self.eta * losses
        self.cum += losses


class EWALearner:
    """EWA over expert strategies for absolute loss; losses are halved into [0, 1]."""

    loss_scale = 0.5

    def __init__(self, experts, priors=None, eta=None, T=None):
        self.experts = list(experts)
        k = len(self.experts)
        priors = np.full(k, 1.0 / k) if priors is None else priors
        if eta is None:
            if T is None:
                raise DomainError("give eta or the horizon T")
            eta = 1 / sqrt(T)
        self.ewa = EWA(priors, eta)

    def reset(self):
        self.ewa.reset()
        for e in self.experts:
            e.reset()

    def _preds(self, x):
        return [e.predict_value(x) for e in self.experts]

    def mixture(self, x):
        return list(zip(self._preds(x), self.ewa.weights().tolist()))

    def predict(self, x, rng):
        w = self.ewa.weights()
        i = int(rng.choice(len(w), p=w))
        return self.experts[i].predict_value(x)

    def update(self, x, y):
        y = as_fraction(y)
        losses = [float(abs(p - y)) * self.loss_scale for p in self._preds(x)]
        self.ewa.update(losses)
        for e in self.experts:
            e.advance(x) if isinstance(e, Expert) else e.update(x, y)


class ConstantLearner:
    def __init__(self, value=0):
        self.value = as_fraction(value)

    def reset(self):
        pass

    def mixture(self, x):
        return [(self.value, 1)]

    def predict(self, x, rng=None):
        return self.value

    def update(self, x, y):
        pass


class AgnosticLearner(EWALearner):
    """EWA over the union of expert pools at scales ``2**-i`` with weights ``6/(pi^2 i^2)``.

    Scale ``i``'s weight is split evenly over its pool.  Scales are added
    while the total pool fits the budget (``max_scales`` at most); the
    weights of the kept scales are renormalised, which only raises them.
    """

    def __init__(self, F, T, max_scales=6, budget=4096, mode="skip"):
        self.F, self.T = F, T
        experts, priors, scales = [], [], []
        for i in range(1, max_scales + 1):
            alpha = Fraction(1, 2 ** i)
            ctx = FatSOAContext(F, alpha)
            fat = ctx.oracle.dim(F.full_mask)
            size = expert_count(T, fat, len(ctx.grid), mode)
            if scales and len(experts) + size > budget:
                break
            specs = enumerate_experts(F, alpha, T, mode, ctx, budget=max(budget, size))
            p = 6 / (pi ** 2 * i ** 2)
            experts += [Expert(s, ctx) for s in specs]
            priors += [p / size] * size
            scales.append({"i": i, "alpha": alpha, "fat": fat, "experts": size, "prior": p})
        priors = np.array(priors)
        self.raw_mass = float(priors.sum())
        super().__init__(experts, priors / priors.sum(), T=T)
        self.scales = scales
        self.truncated_after = scales[-1]["i"]

    def bound(self):
        """Smallest per-scale guarantee in the original loss units.

        For scale ``i``: ``alpha T + 2 (sqrt(T)/8 + sqrt(T) log(1 / w))`` where
        ``w`` is the (renormalised) prior of one expert of that pool.
        """
        T = self.T
        best = None
        for s in self.scales:
            w = s["prior"] / s["experts"] / self.raw_mass
            b = float(s["alpha"]) * T + 2 * (sqrt(T) / 8 + sqrt(T) * log(1 / w))
            best = b if best is None else min(best, b)
        return best


def ewa_bound(expert_loss, T, prior):
    """Expected-loss guarantee of EWA with ``eta = T**-0.5`` against one expert."""
    return expert_loss + sqrt(T) / 8 + sqrt(T) * log(1 / prior)


def fixed_scale_bound(alpha, T, fat):
    alpha = float(alpha)
    return alpha * T + sqrt(T * fat * log(2 * T / alpha)) if fat > 0 else alpha * T


def multiscale_bound(F, T, alphas=None):
    """The multi-scale regret formula minimised over the given scales (default ``2**-i``, i=1..8).

    Returns ``(value, alpha)``.
    """
    alphas = alphas or [Fraction(1, 2 ** i) for i in range(1, 9)]
    best = None
    for a in alphas:
        fat = FatOracle(F, a).dim(F.full_mask)
        a_f = float(a)
        v = fixed_scale_bound(a, T, max(fat, 0)) + sqrt(T) * (3 + 2 * log(log(1 / a_f)))
        if best is None or v < best[0]:
            best = (v, a)
    return best


# -- simulation --------------------------------------------------------------------

@dataclass
class RegretTrace:
    xs: list
    ys: list
    predictions: list
    losses: list
    expected_losses: list
    cumulative: object
    comparator: object
    regret: object
    expected_regret: float
    seed: int = None
    trial: int = 0

    def rows(self):
        for t, (x, y, p, l, el) in enumerate(zip(self.xs, self.ys, self.predictions,
                                                 self.losses, self.expected_losses), 1):
            yield {"trial": self.trial, "t": t, "x": x, "y": str(y), "prediction": str(p),
                   "loss": str(l), "expected_loss": el}


def comparator_loss(F, xs, ys):
    """``min_f sum_t |f(x_t) - y_t|`` computed exactly over all rows."""
    if not xs:
        return Fraction(0)
    S = F.scale
    ys = [as_fraction(y) for y in ys]
    best = None
    for row in F.table.tolist():
        v = sum(abs(Fraction(row[x], S) - y) for x, y in zip(xs, ys))
        best = v if best is None or v < best else best
    return best


def _play(learner, adversary, F, T, lrng):
    xs, ys, preds, losses, elosses, hist = [], [], [], [], [], []
    for t in range(1, T + 1):
        x = adversary.instance(t, hist)
        mix = learner.mixture(x)
        pred = mix[0][0] if len(mix) == 1 else learner.predict(x, lrng)
        y = as_fraction(adversary.label(t, hist, x))
        pred = as_fraction(pred) if not isinstance(pred, float) else Fraction(pred)
        loss = abs(pred - y)
        exp_loss = sum(float(p_) * float(abs(as_fraction(v) - y)) for v, p_ in mix)
        learner.update(x, y)
        hist.append((x, y, pred))
        xs.append(x); ys.append(y); preds.append(pred); losses.append(loss); elosses.append(exp_loss)
    return xs, ys, preds, losses, elosses


def simulate(learner, adversary, F, T, trials=1, seed=0):
    """Run the supervised protocol; per-trial streams come from ``(seed, 2k)`` and ``(seed, 2k+1)``."""
    traces = []
    for k in range(trials):
        adversary.reset(make_rng(seed, 2 * k))
        learner.reset()
        xs, ys, preds, losses, el = _play(learner, adversary, F, T, make_rng(seed, 2 * k + 1))
        cum = sum(losses, Fraction(0))
        comp = comparator_loss(F, xs, ys)
        traces.append(RegretTrace(xs, ys, preds, losses, el, cum, comp, cum - comp,
                                  sum(el) - float(comp), seed, k))
    return traces


def exact_expected_regret(learner, adversary, F, T):
    """Average regret over every sign sequence of a sign-driven adversary.

    The learner's own randomisation is integrated out through its mixture, so
    the result is exact for deterministic learners (a Fraction) and exact up
    to float weights otherwise.  Valid because these adversaries ignore the
    learner's realized plays.
    """
    n = adversary.sign_count
    if n is None:
        raise DomainError("adversary does not expose its sign randomness")
    if (1 << n) > config.budget():
        raise CapacityError(f"2**{n} sign sequences exceed the budget")
    total, exact = Fraction(0), True
    for bits in range(1 << n):
        signs = [1 if (bits >> (n - 1 - i)) & 1 else -1 for i in range(n)]
        adversary.reset(None, signs=signs)
        learner.reset()
        hist, xs, ys, exp = [], [], [], Fraction(0)
        for t in range(1, T + 1):
            x = adversary.instance(t, hist)
            mix = learner.mixture(x)
            y = as_fraction(adversary.label(t, hist, x))
            if len(mix) == 1:
                exp += abs(as_fraction(mix[0][0]) - y)
            else:
                exact = False
                exp += Fraction(sum(p * float(abs(as_fraction(v) - y)) for v, p in mix))
            learner.update(x, y)
            hist.append((x, y, None))
            xs.append(x); ys.append(y)
        total += exp - comparator_loss(F, xs, ys)
    value = total / (1 << n)
    return value if exact else float(value)


def realizable_runs(F, alpha, T, context=None):
    """Fat-SOA on every realizable sequence of length ``T``: yields ``(row, xs, mistakes)``."""
    ctx = context or FatSOAContext(F, alpha)
    learner = FatSOA(F, alpha, ctx)
    S = F.scale
    for i, row in enumerate(F.table.tolist()):
        for xs in product(range(F.domain_size), repeat=T):
            learner.reset()
            for x in xs:
                learner.predict_value(x)
                learner.update(x, Fraction(row[x], S))
            yield i, xs, learner.mistakes


def ewa_loss_matrix_trials(losses, priors, trials, seed):
    """Monte Carlo total loss of EWA (``eta = T**-0.5``) on a fixed loss matrix ``(T, k)``.

    Returns ``(mean, stderr, expert_totals)``.
    """
    L = np.asarray(losses, dtype=float)
    T, k = L.shape
    ewa = EWA(priors, 1 / sqrt(T))
    g = make_rng(seed, 3)
    totals = np.zeros(trials)
    for t in range(T):
        w = ewa.weights()
        picks = g.choice(k, size=trials, p=w)
        totals += L[t, picks]
        ewa.update(L[t])
    se = float(totals.std(ddof=1) / sqrt(trials)) if trials > 1 else 0.0
    return float(totals.mean()), se, L.sum(axis=0)

"""Exact check of the symmetrized deviation tail bound on a fixed tree."""
from dataclasses import dataclass
from fractions import Fraction
from math import e, exp

import numpy as np

from .classes import as_fraction
from .covers import cover_number
from .complexity import MAX_EXACT_DEPTH, _tree_points
from .errors import CapacityError, DomainError
from .shattering import fat_dim
from .trees import path_node_matrix, sign_matrix

__all__ = ["TailReport", "tail_probability", "pollard_check"]


@dataclass
class TailReport:
    alpha: Fraction
    lhs: Fraction
    rhs: float
    cover_size: int
    cover_mode: str
    fat_rhs: float
    holds: bool

    def to_json(self):
        return {"alpha": str(self.alpha), "lhs": str(self.lhs), "lhs_float": float(self.lhs),
                "rhs": self.rhs, "margin": self.rhs - float(self.lhs),
                "cover_size": self.cover_size, "cover_mode": self.cover_mode,
                "fat_rhs": self.fat_rhs, "holds": self.holds}


def tail_probability(F, x, alpha):
    """``P_eps(sup_f |(1/T) sum_t eps_t f(x_t(eps))| > alpha/4)`` by enumerating every path."""
    alpha = as_fraction(alpha)
    T = x.depth
    if T > MAX_EXACT_DEPTH:
        raise CapacityError(f"depth {T} exceeds the exact limit {MAX_EXACT_DEPTH}")
    if F.size == 0:
        return Fraction(0)
    xs = _tree_points(F, x)
    vals = F.table[:, xs[path_node_matrix(T)]]
    sums = np.abs(np.einsum("mpt,pt->mp", vals, sign_matrix(T))).max(axis=0)
    # |sum| / (S T) > alpha / 4  <=>  4 den |sum| > num S T
    hits = int(np.count_nonzero(4 * alpha.denominator * sums > alpha.numerator * F.scale * T))
    return Fraction(hits, 1 << T)


def pollard_check(F, x, alpha, cover_mode="greedy"):
    """Compare the exact tail with ``2 N_1(alpha/8) exp(-T alpha^2 / 128)``.

    The weaker fat-based side ``2 (16 e T / alpha)^fat_{alpha/8} exp(...)``
    is reported alongside.
    """
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    T = x.depth
    lhs = tail_probability(F, x, alpha)
    decay = exp(-T * float(alpha) ** 2 / 128)
    size = cover_number(F, x, alpha / 8, 1, mode=cover_mode) if F.size else 0
    rhs = 2 * size * decay
    fat = fat_dim(F, alpha / 8) if F.size else 0
    fat_rhs = 2 * (16 * e * T / float(alpha)) ** max(fat, 0) * decay
    return TailReport(alpha, lhs, rhs, size, cover_mode, fat_rhs, float(lhs) <= rhs)

"""Exact rational simplex: zero-sum matrix games and small linear programs.

Both solvers pivot on :class:`fractions.Fraction` tableaus with Bland's rule,
so they terminate and their answers are exact.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

__all__ = ["MatrixGameSolution", "solve_matrix_game", "lp_max", "EXACT_LIMIT"]

EXACT_LIMIT = 12


@dataclass
class MatrixGameSolution:
    """``value = min_q max_j (q M)_j = max_p min_i (M p)_i`` (rows minimise)."""
    value: object
    row: list
    col: list
    exact: bool = True


def _pivot(tab, r, c):
    pr = tab[r]
    pv = pr[c]
    if pv != 1:
        tab[r] = pr = [v / pv for v in pr]
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                tab[i] = [a - f * b for a, b in zip(row, pr)]


def _run(tab, basis, ncols, allowed=None):
    """Maximise with the objective in the last tableau row (stored as ``z - c x``).

    Entering columns must have a negative objective entry; Bland's rule picks
    the smallest index, and the ratio test breaks ties by the smallest basic
    variable.
    """
    m = len(tab) - 1
    while True:
        obj = tab[m]
        enter = next((j for j in range(ncols) if obj[j] < 0 and (allowed is None or allowed[j])),
                     None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        r = best[1]
        _pivot(tab, r, enter)
        basis[r] = enter


def solve_matrix_game(M):
    """Value and optimal mixtures of the zero-sum game with payoff ``M`` to the column player.

    The row player minimises.  Matrices up to ``EXACT_LIMIT`` in both
    dimensions are solved exactly; larger ones go to scipy's HiGHS solver
    and return floats.
    """
    rows = [[Fraction(v) for v in r] for r in M]
    if not rows or not rows[0]:
        raise DomainError("empty payoff matrix")
    m, n = len(rows), len(rows[0])
    if any(len(r) != n for r in rows):
        raise DomainError("ragged payoff matrix")
    if m > EXACT_LIMIT or n > EXACT_LIMIT:
        return _solve_float(np.array([[float(v) for v in r] for r in rows]))
    shift = 1 - min(min(r) for r in rows)
    # maximise sum(y) s.t. sum_i (M_ij + shift) y_i <= 1 for each column j
    tab = []
    for j in range(n):
        tab.append([rows[i][j] + shift for i in range(m)] +
                   [Fraction(int(k == j)) for k in range(n)] + [Fraction(1)])
    tab.append([Fraction(-1)] * m + [Fraction(0)] * n + [Fraction(0)])
    basis = [m + j for j in range(n)]
    _run(tab, basis, m + n)
    total = tab[-1][-1]
    y = [Fraction(0)] * m
    for i, b in enumerate(basis):
        if b < m:
            y[b] = tab[i][-1]
    duals = [tab[-1][m + j] for j in range(n)]
    q = [v / total for v in y]
    p = [v / total for v in duals]
    value = 1 / total - shift
    return MatrixGameSolution(value, q, p)


def _solve_float(M):
    from scipy.optimize import linprog
    m, n = M.shape
    # row player: min v s.t. q M <= v, sum q = 1
    c = np.r_[np.zeros(m), 1.0]
    A = np.c_[M.T, -np.ones(n)]
    res = linprog(c, A_ub=A, b_ub=np.zeros(n), A_eq=[np.r_[np.ones(m), 0.0]], b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    q = res.x[:m]
    p = -res.ineqlin.marginals
    p = p / p.sum()
    return MatrixGameSolution(float(res.x[-1]), q.tolist(), p.tolist(), exact=False)


def lp_max(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Exact ``max c x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Two-phase simplex.  Returns ``(value, x)``; raises :class:`DomainError`
    when the program is infeasible or unbounded.
    """
    c = [Fraction(v) for v in c]
    nv = len(c)
    cons = [([Fraction(a) for a in r], Fraction(b), "ub") for r, b in zip(A_ub, b_ub)]
    cons += [([Fraction(a) for a in r], Fraction(b), "eq") for r, b in zip(A_eq, b_eq)]
    nslack = sum(1 for _, _, k in cons if k == "ub")
    # sign-normalise so every right-hand side is nonnegative
    rows, kinds, own = [], [], []
    s = 0
    for a, b, kind in cons:
        slack = [Fraction(0)] * nslack
        own.append(s)
        if kind == "ub":
            slack[s] = Fraction(1)
            s += 1
        row = a + slack
        if b < 0:
            row, b = [-v for v in row], -b
            kind = "ge" if kind == "ub" else kind
        rows.append(row + [b])
        kinds.append(kind)
    nart = sum(1 for k in kinds if k != "ub")
    ncols = nv + nslack + nart
    tab, basis = [], []
    a_i = 0
    for row, kind, sl in zip(rows, kinds, own):
        art = [Fraction(0)] * nart
        if kind == "ub":
            basis.append(nv + sl)
        else:
            art[a_i] = Fraction(1)
            basis.append(nv + nslack + a_i)
            a_i += 1
        tab.append(row[:-1] + art + [row[-1]])
    # phase one: maximise -sum(artificials)
    obj = [Fraction(0)] * (nv + nslack) + [Fraction(1)] * nart + [Fraction(0)]
    for i, b in enumerate(basis):
        if b >= nv + nslack:
            obj = [o - v for o, v in zip(obj, tab[i])]
    tab.append(obj)
    _run(tab, basis, ncols)
    if tab[-1][-1] != 0:
        raise DomainError("linear program is infeasible")
    # push remaining (zero-level) artificials out of the basis
    for i in range(len(basis)):
        if basis[i] >= nv + nslack:
            j = next((j for j in range(nv + nslack) if tab[i][j] != 0), None)
            if j is not None:
                _pivot(tab, i, j)
                basis[i] = j
    allowed = [True] * (nv + nslack) + [False] * nart
    obj = [-v for v in c] + [Fraction(0)] * (nslack + nart) + [Fraction(0)]
    for i, b in enumerate(basis):
        cb = c[b] if b < nv else Fraction(0)
        if cb:
            obj = [o + cb * v for o, v in zip(obj, tab[i])]
    tab[-1] = obj
    if not _run(tab, basis, ncols, allowed):
        raise DomainError("linear program is unbounded")
    x = [Fraction(0)] * nv
    for i, b in enumerate(basis):
        if b < nv:
            x[b] = tab[i][-1]
    return tab[-1][-1], x

"""The minimax value of the online game sits below twice the sequential Rademacher complexity.

For a few random classes we solve the game exactly (primal and dual
backward induction, rational arithmetic) and compare with the exact
supremum of the Rademacher average over all trees.
"""
from fractions import Fraction

from seqcomplex.classes import random_class
from seqcomplex.complexity import rad_sup
from seqcomplex.games import GameSpec, value_dual, value_primal

print(f"{'seed':>4} {'T':>2} {'primal':>8} {'dual':>8} {'2 Rad':>8}")
for seed in range(6):
    F = random_class(2, 3, 2, seed=seed)
    T = 2 + seed % 2
    spec = GameSpec(F, T)
    vp, vd = value_primal(spec).value, value_dual(spec).value
    r = rad_sup(F, T=T).value
    assert vp == vd and vp <= 2 * r
    print(f"{seed:>4} {T:>2} {str(vp):>8} {str(vd):>8} {str(2 * Fraction(r)):>8}")
print("Primal and dual agree exactly, and both stay under the Rademacher bound.")

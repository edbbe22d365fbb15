"""Fat-SOA makes at most fat_alpha(F) alpha-mistakes on any realizable sequence.

We enumerate every realizable sequence of length 4 for a few random
classes and report the worst mistake count next to the dimension.
"""
from fractions import Fraction

from seqcomplex.classes import constants, random_class
from seqcomplex.learners import realizable_runs
from seqcomplex.shattering import fat_dim

cases = [("constants {-1,0,1}", constants([-1, 0, 1], 2), Fraction(1))]
cases += [(f"random seed {s}", random_class(2, 5, 4, seed=s), Fraction(1, 2)) for s in range(4)]

T = 4
for name, F, a in cases:
    worst = max(m for _, _, m in realizable_runs(F, a, T))
    d = fat_dim(F, a)
    print(f"{name:<20} alpha={a}: worst {worst} mistakes over T={T}, fat={d}")
    assert worst <= d

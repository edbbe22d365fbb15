"""Covering a class on a tree can be far cheaper than packing it.

The leaf class on a depth-3 tree has one function per leaf: it is 1 on
that leaf's last node and 0 elsewhere.  Along any single path only two
behaviours survive, so two trees cover it at scale 0, while four
functions stay pairwise separated.
"""
from fractions import Fraction

from seqcomplex.classes import leaf_class, leaf_tree
from seqcomplex.covers import packing_number, zero_cover_min

T = 3
F, x = leaf_class(T), leaf_tree(T)
print(f"leaf class on a depth-{T} tree: {F.size} functions")

size, zc = zero_cover_min(F, x)
print(f"smallest 0-cover: {size} trees")
for v in zc.trees:
    print("   ", [str(a) for a in v.values])

for a in (Fraction(1, 4), Fraction(1, 2)):
    print(f"weak packing at alpha={a}: {packing_number(F, x, a)}")
print("A 0-cover needs only one tree per path behaviour, not one per function.")

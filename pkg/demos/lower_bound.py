"""An adversary built from a shattered tree forces regret of order sqrt(T).

Against the class of the two constants +1 and -1 (alpha = 2, dimension 1),
the adversary plays random labels in blocks.  We compute the exact expected
regret of the zero predictor and estimate that of the agnostic learner.
"""
from math import sqrt

import numpy as np

from seqcomplex.classes import constants
from seqcomplex.games import lower_bound_adversary
from seqcomplex.learners import AgnosticLearner, ConstantLearner, exact_expected_regret, simulate

F = constants([-1, 1])
for T in (4, 8):
    adv = lower_bound_adversary(F, 2, T)
    lb = adv.bound()
    exact = exact_expected_regret(ConstantLearner(0), adv, F, T)
    A = AgnosticLearner(F, T, max_scales=3)
    r = np.array([tr.expected_regret for tr in simulate(A, adv, F, T, trials=100, seed=T)])
    se = r.std(ddof=1) / sqrt(len(r))
    print(f"T={T}: lower bound {lb:.3f}  zero predictor {float(exact):.3f} (exact)  "
          f"agnostic {r.mean():.3f} +- {se:.3f}  agnostic guarantee {A.bound():.2f}")

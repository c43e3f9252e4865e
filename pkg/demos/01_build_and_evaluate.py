"""Building descriptor systems and evaluating their transfer functions.

A descriptor system is the quadruple (A - lambda*E, B, C, D); its
transfer-function matrix is G(lambda) = C (A - lambda E)^{-1} B + D, and
that evaluation is the oracle every construction in the toolkit is checked
against.
"""

import numpy as np

from dstk import TimeDomain, apply_similarity, eval_tfm, make_system, random_system

# A first-order lag: G(s) = 1/(s+1).  Note the sign of C: with the
# (A - s E)^{-1} evaluation convention, C(A - sE)^{-1}B = -1/(-1-s) = 1/(s+1).
lag = make_system(A=[[-1.0]], E=[[1.0]], B=[[1.0]], C=[[-1.0]], D=[[0.0]], domain="continuous")
print("G(0)  =", eval_tfm(lag, 0.0)[0, 0].real, "   (expect 1.0)")
print("G(1)  =", eval_tfm(lag, 1.0)[0, 0].real, "   (expect 0.5)")
print("G(j)  =", eval_tfm(lag, 1j)[0, 0], "  (expect 1/(1+j))")

# A singular E matrix lets the same data model realize improper functions.
# This order-2 realization is G(s) = s, the differentiator:
deriv = make_system(
    A=np.eye(2),
    E=[[0.0, 1.0], [0.0, 0.0]],
    B=[[0.0], [1.0]],
    C=[[1.0, 0.0]],
    D=[[0.0]],
    domain="continuous",
)
print("\nderivative system at s = 3:", eval_tfm(deriv, 3.0)[0, 0].real)

# Similarity transformations change the realization but never the TFM.
U = np.array([[2.0]])
V = np.array([[0.5]])
lag2 = apply_similarity(lag, U, V)
print("\nafter similarity, G(1) is still", eval_tfm(lag2, 1.0)[0, 0].real)

# Random systems with requested traits are handy for experiments:
rng = np.random.default_rng(0)
g = random_system(4, 2, 2, TimeDomain.DISCRETE, stable=True, rng=rng)
print("\nrandom stable discrete system:", g)
print("value at z = 2:\n", np.round(eval_tfm(g, 2.0), 4))

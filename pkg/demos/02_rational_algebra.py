"""Rational-matrix algebra through realizations.

Products, sums, concatenations, inverses, and conjugates of rational
matrices are computed by assembling block realizations; no polynomial
arithmetic ever happens, and each identity can be confirmed by evaluation.
"""

import numpy as np

from dstk import (
    RationalMatrixData,
    conjugate,
    eval_tfm,
    inverse,
    make_system,
    parallel,
    realize_rational,
    series,
    transpose_dual,
)


def lag(a):
    return make_system([[-a]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], "continuous")


g1 = lag(1.0)  # 1/(s+1)
g2 = lag(2.0)  # 1/(s+2)

prod = series(g1, g2)
print("series:   (1/(s+1))(1/(s+2)) at s=0 ->", eval_tfm(prod, 0.0)[0, 0].real, "(expect 0.5)")

summed = parallel(g1, g2)
print("parallel: 1/(s+1) + 1/(s+2) at s=0 ->", eval_tfm(summed, 0.0)[0, 0].real, "(expect 1.5)")

# The inversion-free inverse works even when the result is improper:
inv = inverse(g1)  # realizes s + 1 with an order n+m pencil
print("inverse:  (1/(s+1))^-1 at s=3 ->", eval_tfm(inv, 3.0)[0, 0].real, "(expect 4)")

# Conjugation: continuous G~(s) = G(-s)^T
cj = conjugate(g1)
print("conjugate at s=0.5 ->", eval_tfm(cj, 0.5)[0, 0].real, "(expect 1/(1-0.5) = 2)")

# Discrete conjugation G~(z) = G(1/z)^T doubles the order in general;
# standard systems with invertible A keep their order through a fast path.
gz = make_system([[0.5]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], "discrete")  # 1/(z-1/2)
cz = conjugate(gz)
print("discrete conjugate at z=3 ->", eval_tfm(cz, 3.0)[0, 0], "(expect G(1/3) = 2z/(2-z)|_3 = -6)")

# Realizing a rational matrix given entry-wise coefficients (ascending):
data = RationalMatrixData(
    p=2,
    m=2,
    entries=[
        [([2.0, 1.0], [1.0, 1.0]), ([0.0, 1.0], [1.0])],  # (s+2)/(s+1), s
        [([1.0], [1.0]), ([0.0], [1.0])],                 # 1, 0
    ],
)
G = realize_rational(data, "continuous")
print("\nrealized rational matrix at s=2 (exact values 4/3, 2, 1, 0):")
print(np.round(eval_tfm(G, 2.0).real, 6))
print("dual (transposed TFM) at s=2:")
print(np.round(eval_tfm(transpose_dual(G), 2.0).real, 6))

"""Structural analysis: poles, zeros, McMillan degree, minimal realizations.

Pole and zero structure (finite values plus infinite multiplicities) comes
out of orthogonal staircase reductions of the pole pencil and the system
matrix pencil; the count identity n_p = n_z + n_l + n_r ties them together.
"""

import numpy as np

from dstk import (
    eval_tfm,
    h2_norm,
    is_minimum_phase,
    is_stable,
    make_system,
    mcmillan_degree,
    minimality_report,
    minreal,
    normal_rank,
    parallel,
    poles,
    zeros,
)

# (s-1)/(s+2): one stable pole, one unstable zero
g = make_system([[-2.0]], [[1.0]], [[1.0]], [[3.0]], [[1.0]], "continuous")
print("poles:", poles(g).finite)
print("zeros:", zeros(g).finite)
print("stable:", is_stable(g), "  minimum phase:", is_minimum_phase(g))

# The differentiator G(s) = s has one *infinite* pole and a zero at the origin:
deriv = make_system(np.eye(2), [[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]], "continuous")
pz = poles(deriv)
zz = zeros(deriv)
print("\nG(s) = s:")
print("  finite poles:", pz.finite, " infinite poles:", pz.infinite_count, " degree:", mcmillan_degree(deriv))
print("  zeros:", zz.finite, " kronecker rank defects (nr, nl):", zz.kronecker_ranks)
print("  identity n_p = n_z + n_l + n_r:", pz.total, "=", zz.total, "+", zz.kronecker_ranks[1], "+", zz.kronecker_ranks[0])

# Minimal realization: a duplicated lag collapses from order 2 to order 1.
lag = make_system([[-1.0]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], "continuous")
doubled = parallel(lag, lag)
reduced = minreal(doubled)
print("\nparallel(lag, lag): order", doubled.n, "->", reduced.n)
print("reduced TFM at s=1:", eval_tfm(reduced, 1.0)[0, 0].real, "(2/(s+1) -> 1)")
print("minimality report:", minimality_report(reduced))

print("\nnormal rank of [1  s]:", normal_rank(make_system(
    np.eye(2), [[0.0, 1.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0]], [[0.0, 0.0]], "continuous")))

# H2 norm of the lag: the analytic value is 1/sqrt(2).
print("\nh2 norm of 1/(s+1):", h2_norm(lag))

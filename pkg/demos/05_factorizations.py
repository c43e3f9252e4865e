"""Factorizations: additive decompositions, coprime factors, inner-outer.

All three families place poles or zeros in a chosen "good" region of the
complex plane and are certified by evaluating the factors on probe points
or on the region boundary.
"""

import numpy as np

from dstk import (
    StabilityRegion,
    additive_decompose,
    eval_tfm,
    inner_outer,
    is_minimum_phase,
    lcf,
    make_system,
    parallel,
    poles,
    rcf,
)

lhp = StabilityRegion.left_half_plane()


def sys1(a, c=-1.0, d=0.0):
    return make_system([[a]], [[1.0]], [[1.0]], [[c]], [[d]], "continuous")


# --- additive decomposition: 2s/(s^2-1) = 1/(s+1) + 1/(s-1)
G = parallel(sys1(-1.0), sys1(1.0))
pair = additive_decompose(G, lhp)
print("good part poles:", poles(pair.first).finite)
print("bad part poles: ", poles(pair.second).finite)
s = 0.3 + 1.1j
print("sum check:", abs(eval_tfm(pair.first, s) + eval_tfm(pair.second, s) - eval_tfm(G, s))[0, 0])

# --- right coprime factorization of the unstable 1/(s-1)
g = sys1(1.0)
fp = rcf(g, lhp, pole_set=[-1.0])
N, M = fp.first, fp.second
print("\nrcf of 1/(s-1) with target pole -1:")
print("  N poles:", poles(N).finite, "  M poles:", poles(M).finite)
lam = 2.0 + 0.5j
print("  N M^-1 == G:", abs(eval_tfm(N, lam)[0, 0] / eval_tfm(M, lam)[0, 0] - eval_tfm(g, lam)[0, 0]))

# rcf also handles improper inputs: the factors of G(s) = s are proper.
deriv = make_system(np.eye(2), [[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]], "continuous")
fp = rcf(deriv, lhp)
print("\nrcf of G(s) = s: factor poles", poles(fp.first).finite, poles(fp.second).finite)
print("  N/M at 2j:", eval_tfm(fp.first, 2j)[0, 0] / eval_tfm(fp.second, 2j)[0, 0])

# --- left coprime factorization is the transpose dual
fpl = lcf(g, lhp)
print("\nlcf reconstruction:", abs(eval_tfm(fpl.first, lam)[0, 0] / eval_tfm(fpl.second, lam)[0, 0]
                                   - eval_tfm(g, lam)[0, 0]))

# --- inner-outer factorization of (s-1)/(s+2)
g2 = make_system([[-2.0]], [[1.0]], [[1.0]], [[3.0]], [[1.0]], "continuous")
io = inner_outer(g2)
print("\ninner-outer of (s-1)/(s+2):")
print("  outer factor at s=1:", eval_tfm(io.second, 1.0)[0, 0].real, "(expect (1+1)/(1+2) = 2/3)")
print("  outer is minimum phase:", is_minimum_phase(io.second))
worst = max(
    abs(eval_tfm(io.first, 1j * w).conj().T @ eval_tfm(io.first, 1j * w) - 1.0)[0, 0]
    for w in np.logspace(-2, 2, 20)
)
print("  inner check on the boundary grid:", worst)

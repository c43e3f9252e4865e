"""Kronecker-like staircase reduction of matrix pencils.

The structural counts of an arbitrary pencil M - lambda*N (right/left
minimal indices, finite eigenvalues, infinite divisor degrees) are computed
with orthogonal transformations only; canonical Weierstrass/Kronecker forms
are never formed because they would need ill-conditioned transformations.
"""

import numpy as np

from dstk import klf, pencil_normal_rank, weierstrass_structure

# The 1x2 bidiagonal block [-lam  1] is the simplest singular pencil: it has
# full row normal rank and a single right minimal index of 1.
M = np.array([[0.0, 1.0]])
N = np.array([[1.0, 0.0]])
Mk, Nk, U, V, ks = klf(M, N)
print("bidiagonal block: right indices", ks.right_indices, " left", ks.left_indices, " rank", ks.normal_rank)

# A regular pencil mixing one finite and one simple infinite eigenvalue:
Mk, Nk, U, V, ks = klf(np.eye(2), np.diag([1.0, 0.0]))
print("regular pencil:   finite", ks.finite_eigenvalues, " infinite divisors", ks.infinite_divisor_degrees)

# Assemble a pencil with known structure, scramble it orthogonally, and
# recover the structure from the staircase:
rng = np.random.default_rng(1)
blocks = []
# right singular block L_2 (2 x 3)
L2M = np.zeros((2, 3)); L2N = np.zeros((2, 3))
for i in range(2):
    L2M[i, i + 1] = 1.0
    L2N[i, i] = 1.0
# finite eigenvalue block at -3, one degree-2 infinite divisor, left block L_1^T
F = (np.array([[-3.0]]), np.eye(1))
J = np.array([[0.0, 1.0], [0.0, 0.0]])
rows = 2 + 1 + 2 + 2
cols = 3 + 1 + 2 + 1
M = np.zeros((rows, cols)); N = np.zeros((rows, cols))
M[0:2, 0:3], N[0:2, 0:3] = L2M, L2N
M[2:3, 3:4], N[2:3, 3:4] = F
M[3:5, 4:6], N[3:5, 4:6] = np.eye(2), J
M[5:7, 6:7], N[5:7, 6:7] = L2M.T[:2, :1], L2N.T[:2, :1]
Q1, _ = np.linalg.qr(rng.normal(size=(rows, rows)))
Q2, _ = np.linalg.qr(rng.normal(size=(cols, cols)))
M, N = Q1 @ M @ Q2, Q1 @ N @ Q2

Mk, Nk, U, V, ks = klf(M, N)
print("\nscrambled construction recovered:")
print("  right indices:", ks.right_indices, "(built: [2])")
print("  left indices: ", ks.left_indices, "(built: [1])")
print("  finite eigenvalues:", np.round(ks.finite_eigenvalues, 8), "(built: [-3])")
print("  infinite divisors:", ks.infinite_divisor_degrees, "(built: [2])")
print("  normal rank:", ks.normal_rank, " probe-based:", pencil_normal_rank(M, N))
print("  reconstruction error:", np.linalg.norm(U @ M @ V - Mk))

# For regular pencils the same machinery gives the eigenvalue structure:
ws = weierstrass_structure(np.diag([3.0, 1.0]), np.diag([1.0, 0.0]))
print("\nweierstrass of diag(3,1) - lam diag(1,0): finite", ws.finite_eigenvalues,
      " infinite divisors", ws.infinite_divisor_degrees)

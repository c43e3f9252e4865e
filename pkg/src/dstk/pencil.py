"""Orthogonal staircase (Kronecker-like) reduction of matrix pencils.

For an arbitrary real pencil ``M - lambda*N`` the reduction produces
orthogonal ``U, V`` with ``U (M - lambda N) V`` block upper triangular:
a leading full-row-rank block carrying the right singular (minimal index)
structure, a middle regular block carrying the infinite and finite
eigenvalue structure, and a trailing full-column-rank block carrying the
left singular structure.  Only structural counts are extracted; canonical
(Weierstrass/Kronecker) transformation matrices are never formed, since
they would require ill-conditioned non-orthogonal transformations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, IterationFailure, SingularPencil
from .kernels import (
    EPS,
    _col_compress_null_first,
    _row_compress,
    as_matrix,
    gschur_ordered,
    probe_rng,
    rank_tol,
)

__all__ = [
    "KroneckerStructure",
    "WeierstrassStructure",
    "klf",
    "weierstrass_structure",
    "pencil_normal_rank",
]


@dataclass
class KroneckerStructure:
    """Structural counts of a pencil: minimal indices and eigenvalue structure.

    ``nr = sum(right_indices)``, ``nl = sum(left_indices)`` and
    ``nreg = len(finite_eigenvalues) + sum(infinite_divisor_degrees)``; the
    normal rank of the pencil is ``nr + nreg + nl``.
    """

    right_indices: list = field(default_factory=list)
    left_indices: list = field(default_factory=list)
    finite_eigenvalues: list = field(default_factory=list)
    infinite_divisor_degrees: list = field(default_factory=list)

    @property
    def nr(self) -> int:
        return int(sum(self.right_indices))

    @property
    def nl(self) -> int:
        return int(sum(self.left_indices))

    @property
    def nreg(self) -> int:
        return len(self.finite_eigenvalues) + int(sum(self.infinite_divisor_degrees))

    @property
    def normal_rank(self) -> int:
        return self.nr + self.nreg + self.nl


@dataclass
class WeierstrassStructure:
    """Eigenvalue structure of a regular pencil: finite eigenvalues with
    multiplicity plus infinite elementary-divisor degrees."""

    finite_eigenvalues: list
    infinite_divisor_degrees: list

    @property
    def nf(self) -> int:
        return len(self.finite_eigenvalues)

    @property
    def ninf(self) -> int:
        return int(sum(self.infinite_divisor_degrees))


def _staircase_tol(M, N, tol):
    # the safety factor absorbs roundoff accumulated over the repeated
    # orthogonal updates, which can sit well above eps * scale
    if tol is not None:
        return tol
    scale = 0.0
    for X in (M, N):
        if X.size:
            scale = max(scale, np.linalg.norm(X, 2))
    return 100.0 * max(M.shape[0], M.shape[1], 1) * EPS * (scale + 1e-300)


def _deflate(M, N, tol_abs, forced=None):
    """Peel the column-nullity staircase of ``N`` off the pencil front.

    Returns ``(M2, N2, L, R, mus, nus)`` with ``M2 = L @ M @ R`` and
    ``N2 = L @ N @ R`` block upper triangular; the trailing block (rows
    ``sum(nus):``, cols ``sum(mus):``) has an ``N`` part of full column rank.
    The peeled stairs carry the right-singular and infinite structure of the
    pencil: ``mus[k] - nus[k]`` blocks of right minimal index ``k`` and
    ``nus[k] - mus[k+1]`` infinite divisors of degree ``k + 1``.

    ``forced`` prescribes the stair sizes as ``[(mu_1, nu_1), ...]``; the
    compressions then split at the prescribed ranks instead of re-deciding
    them against the tolerance (used when the structure is already known, so
    borderline rank calls cannot flip between passes).
    """
    m, n = M.shape
    L = np.eye(m)
    R = np.eye(n)
    M = M.copy()
    N = N.copy()
    ro = co = 0
    mus, nus = [], []
    step = 0
    while n - co > 0:
        if forced is not None:
            if step >= len(forced):
                break
            mu_f, nu_f = forced[step]
            if mu_f > n - co or nu_f > m - ro:
                raise IterationFailure("prescribed staircase sizes exceed the active block")
            V1 = _col_split_null_first(N[ro:, co:], mu_f)
            mu = mu_f
        else:
            V1, mu = _col_compress_null_first(N[ro:, co:], tol_abs)
        if mu == 0:
            break
        M[:, co:] = M[:, co:] @ V1
        N[:, co:] = N[:, co:] @ V1
        R[:, co:] = R[:, co:] @ V1
        N[ro:, co : co + mu] = 0.0
        if forced is not None:
            U1 = _row_split(M[ro:, co : co + mu])
            nu = forced[step][1]
        else:
            U1, nu = _row_compress(M[ro:, co : co + mu], tol_abs)
        M[ro:, :] = U1.T @ M[ro:, :]
        N[ro:, :] = U1.T @ N[ro:, :]
        L[ro:, :] = U1.T @ L[ro:, :]
        M[ro + nu :, co : co + mu] = 0.0
        mus.append(mu)
        nus.append(nu)
        ro += nu
        co += mu
        step += 1
    return M, N, L, R, mus, nus


def _col_split_null_first(X, mu):
    """Orthogonal V putting the ``mu`` weakest right-singular directions of X
    first (prescribed-rank variant of the null-first column compression)."""
    m, n = X.shape
    if n == 0:
        return np.eye(0)
    if m == 0 or not X.any():
        return np.eye(n)
    _, _, Vh = np.linalg.svd(X, full_matrices=True)
    r = n - mu
    return np.hstack([Vh[r:].T, Vh[:r].T])


def _row_split(X):
    m = X.shape[0]
    if X.size == 0:
        return np.eye(m)
    U, _, _ = np.linalg.svd(X, full_matrices=True)
    return U


def _stair_counts(mus, nus):
    """(right minimal indices, infinite divisor degrees) from stair sizes."""
    right = []
    divisors = []
    K = len(mus)
    for k in range(K):
        right.extend([k] * (mus[k] - nus[k]))
        nxt = mus[k + 1] if k + 1 < K else 0
        divisors.extend([k + 1] * (nus[k] - nxt))
    return right, divisors


def klf(M, N, tol=None, rng=None):
    """Kronecker-like staircase form of the pencil ``M - lambda*N``.

    Returns ``(Mk, Nk, U, V, ks)`` with orthogonal ``U, V`` such that
    ``U @ (M - lambda N) @ V = Mk - lambda Nk`` is block upper triangular:
    leading right-singular stairs, then the regular part (infinite structure
    followed by the finite block, whose eigenvalues are computed by the
    ordered generalized Schur decomposition), then trailing left-singular
    stairs.  ``ks`` collects the structural counts.

    Regular pencils simply yield empty index lists.
    """
    M = as_matrix(M, "M")
    N = as_matrix(N, "N")
    if M.shape != N.shape:
        raise DimensionMismatch(f"M and N must have equal shapes, got {M.shape} and {N.shape}")
    m, n = M.shape
    tol_abs = _staircase_tol(M, N, tol)

    # pass 1: right singular + infinite structure to the front
    Mk, Nk, L, R, mus1, nus1 = _deflate(M, N, tol_abs)
    ro1, co1 = int(sum(nus1)), int(sum(mus1))
    right, divisors = _stair_counts(mus1, nus1)

    # pass 2: within the leading block, order [right stairs | infinite block]
    # by deflating the role-swapped pencil (which has no infinite structure);
    # the stair sizes are fully determined by the pass-1 index counts
    if ro1 and right:
        Na, Ma = Nk[:ro1, :co1], Mk[:ro1, :co1]
        kmax = max(right) + 1
        forced = [
            (sum(1 for e in right if e >= k - 1), sum(1 for e in right if e >= k))
            for k in range(1, kmax + 1)
        ]
        Na2, Ma2, L2, R2, mus2, nus2 = _deflate(Na, Ma, tol_abs, forced=forced)
        right2, div2 = _stair_counts(mus2, nus2)
        if div2 or sorted(right2) != sorted(right):
            raise IterationFailure("inconsistent staircase ranks while separating the right singular part")
        Mk[:ro1, :co1] = Ma2
        Nk[:ro1, :co1] = Na2
        Mk[:ro1, co1:] = L2 @ Mk[:ro1, co1:]
        Nk[:ro1, co1:] = L2 @ Nk[:ro1, co1:]
        L[:ro1, :] = L2 @ L[:ro1, :]
        R[:, :co1] = R[:, :co1] @ R2

    n_inf = int(sum(divisors))
    if ro1 != int(sum(right)) + n_inf or co1 != ro1 + len(right):
        raise IterationFailure("staircase dimension bookkeeping failed")

    # pass 3: trailing block via its transpose, peeling the left structure
    mf, nf_ = m - ro1, n - co1
    left = []
    if mf and nf_:
        Mt, Nt, L3, R3, mus3, nus3 = _deflate(Mk[ro1:, co1:].T, Nk[ro1:, co1:].T, tol_abs)
        left, div3 = _stair_counts(mus3, nus3)
        if div3:
            raise IterationFailure("inconsistent staircase ranks while separating the left singular part")
        if left:
            # transpose back and reverse so the left stairs trail
            Jr = np.eye(mf)[::-1]
            Jc = np.eye(nf_)[::-1]
            left_l = Jr @ R3.T
            right_r = L3.T @ Jc
            Mk[ro1:, co1:] = Jr @ Mt.T @ Jc
            Nk[ro1:, co1:] = Jr @ Nt.T @ Jc
            Mk[:ro1, co1:] = Mk[:ro1, co1:] @ right_r
            Nk[:ro1, co1:] = Nk[:ro1, co1:] @ right_r
            L[ro1:, :] = left_l @ L[ro1:, :]
            R[:, co1:] = R[:, co1:] @ right_r
    elif mf and not nf_:
        left = [0] * mf

    nl = int(sum(left))
    n_fin = mf - nl - len(left)
    if n_fin != nf_ - nl:
        raise IterationFailure("staircase dimension bookkeeping failed")

    finite = []
    if n_fin:
        sl = slice(ro1, ro1 + n_fin)
        cl = slice(co1, co1 + n_fin)
        res = gschur_ordered(Mk[sl, cl], Nk[sl, cl], rng=rng)
        for alpha, beta in res.eigenvalues:
            if beta == 0.0:
                raise IterationFailure("infinite eigenvalue leaked into the finite block")
            finite.append(alpha / beta)

    ks = KroneckerStructure(
        right_indices=sorted(right),
        left_indices=sorted(left),
        finite_eigenvalues=finite,
        infinite_divisor_degrees=sorted(divisors),
    )
    return Mk, Nk, L, R, ks


def weierstrass_structure(A, E, tol=None, rng=None) -> WeierstrassStructure:
    """Finite eigenvalues and infinite divisor degrees of a regular pencil.

    The infinite structure comes from the rank-deflation staircase; the
    finite eigenvalues from the deflated trailing block, so no eigenvalue
    ever has to be classified by the size of a QZ beta.
    """
    A = as_matrix(A, "A")
    E = as_matrix(E, "E")
    if A.shape != E.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch("regular pencil blocks must be square and equal-sized")
    _, _, _, _, ks = klf(A, E, tol=tol, rng=rng)
    if ks.right_indices or ks.left_indices:
        raise SingularPencil("pencil is singular: it has minimal indices")
    return WeierstrassStructure(ks.finite_eigenvalues, ks.infinite_divisor_degrees)


def pencil_normal_rank(M, N, rng=None) -> int:
    """Normal rank by maximizing the rank of ``M - lam N`` at random probes."""
    M = as_matrix(M, "M")
    N = as_matrix(N, "N")
    if M.shape != N.shape:
        raise DimensionMismatch("M and N must have equal shapes")
    if M.size == 0:
        return 0
    rng = probe_rng(rng)
    nm = np.linalg.norm(M)
    nn = np.linalg.norm(N)
    scale = (nm + 1.0) / (nn + 1.0)
    best = 0
    for _ in range(3):
        theta = rng.uniform(0.15, np.pi - 0.15)
        if rng.uniform() < 0.5:
            theta = -theta
        lam = scale * rng.uniform(0.5, 2.0) * np.exp(1j * theta)
        best = max(best, rank_tol(M - lam * N))
    return best

"""Rational nullspace bases, linear rational matrix equations, and the
L2-optimal model-matching solver.

Nullspace bases come from the staircase form of the system matrix pencil:
the polynomial kernel of the leading right-singular block is computed
through convolution (resultant) matrices, rotated back with the accumulated
orthogonal transforms, and made proper by assigning each basis column a
fixed set of stable poles.  The model-matching pipeline compresses the
problem with an inner-outer factorization, splits the transformed target
into stable and antistable parts, and back-substitutes through a stable
inverse of the outer factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    BoundaryZeros,
    DimensionMismatch,
    DomainMismatch,
    Incompatible,
    IterationFailure,
    NonstrictlyProperF,
    UnstableInput,
    UnsupportedShape,
)
from .analysis import (
    _system_pencil,
    h2_norm,
    is_stable,
    minreal,
    normal_rank,
    poles,
    stability_region,
    zeros,
)
from .factor import additive_decompose, inner_outer
from .kernels import null_basis, probe_rng, rank_tol
from .ops import (
    RationalMatrixData,
    _static,
    concat_row,
    conjugate,
    inverse,
    realize_rational,
    series,
    transpose_dual,
)
from .pencil import klf
from .system import DescriptorSystem, TimeDomain, _trusted_system, eval_tfm, probe_points

__all__ = [
    "SolveResult",
    "LdpParts",
    "left_nullspace",
    "right_nullspace",
    "solve_right",
    "solve_left",
    "l2_model_match",
]


@dataclass
class SolveResult:
    """Particular solution plus a nullspace basis; the general solution is
    ``particular + null_basis * Y`` (``Y * null_basis`` for the left variant)
    with ``Y`` an arbitrary rational matrix."""

    particular: DescriptorSystem
    null_basis: DescriptorSystem


@dataclass
class LdpParts:
    """Intermediate quantities of the least-distance step of model matching.

    ``in_range`` / ``out_of_range`` are the targets seen through the inner
    image basis and its complement; ``stable_part`` is the optimal stable
    correction, ``antistable_part`` the irreducible residual in that channel.
    """

    in_range: DescriptorSystem
    out_of_range: DescriptorSystem
    stable_part: DescriptorSystem
    antistable_part: DescriptorSystem
    error_norm: float


# ---------------------------------------------------------------------------
# nullspace bases


def _default_pole(i, domain):
    if domain is TimeDomain.CONTINUOUS:
        return -float(i + 1)
    ladder = [0.0, 0.3, -0.3, 0.6, -0.6]
    return ladder[i % len(ladder)]


def _poly_kernel(PM, PN, want, rng):
    """Polynomial kernel basis of the full-row-normal-rank pencil PM - lam*PN.

    Returns a list of (cols, degree+1) coefficient arrays, ascending degree,
    rationally independent.
    """
    rows, cols = PM.shape
    z1, z2 = (complex(z) for z in (rng.uniform(0.5, 1.5) + 1j * rng.uniform(0.5, 1.5),
                                   -rng.uniform(0.5, 1.5) + 1j * rng.uniform(0.2, 1.0)))
    found = []
    evals = np.zeros((2 * cols, 0), dtype=complex)

    def value_stack(coefs):
        w1 = sum(coefs[:, k] * z1**k for k in range(coefs.shape[1]))
        w2 = sum(coefs[:, k] * z2**k for k in range(coefs.shape[1]))
        return np.concatenate([w1, w2]).reshape(-1, 1)

    for d in range(rows + cols + 2):
        R = np.zeros(((d + 2) * rows, (d + 1) * cols))
        for j in range(d + 1):
            R[j * rows : (j + 1) * rows, j * cols : (j + 1) * cols] = PM
            R[(j + 1) * rows : (j + 2) * rows, j * cols : (j + 1) * cols] = -PN
        K = null_basis(R)
        for k in range(K.shape[1]):
            coefs = K[:, k].reshape(d + 1, cols).T
            cand = value_stack(coefs)
            trial = np.hstack([evals, cand])
            if rank_tol(trial) > rank_tol(evals):
                found.append(coefs)
                evals = trial
                if len(found) == want:
                    return found
    raise IterationFailure("polynomial kernel search did not terminate")


def right_nullspace(sys: DescriptorSystem, tol=None, rng=None) -> DescriptorSystem:
    """Proper rational basis of the right nullspace of the TFM.

    The result has shape ``m x (m - r)`` (``r`` the normal rank), full column
    normal rank, and poles at a fixed stable default set.  Full-column-rank
    inputs yield an empty ``m x 0`` basis.
    """
    rng = probe_rng(rng)
    g = minreal(sys, tol=tol, rng=rng)
    n, m = g.n, g.m
    M, N = _system_pencil(g)
    Mk, Nk, _, V, ks = klf(M, N, tol=tol, rng=rng)
    nu = len(ks.right_indices)
    if nu == 0:
        return _static(np.zeros((m, 0)), g.domain)
    r_rows = ks.nr
    r_cols = ks.nr + nu
    coef_list = _poly_kernel(Mk[:r_rows, :r_cols], Nk[:r_rows, :r_cols], nu, rng)

    # rotate back and keep the input components
    columns = []
    for coefs in coef_list:
        deg = coefs.shape[1] - 1
        padded = np.zeros((n + m, deg + 1))
        padded[:r_cols, :] = coefs
        full = V @ padded
        columns.append(full[n:, :])

    entries = [[None] * nu for _ in range(m)]
    for j, ucoef in enumerate(columns):
        cmax = np.abs(ucoef).max() if ucoef.size else 1.0
        clean = np.where(np.abs(ucoef) > 1e-11 * max(cmax, 1.0), ucoef, 0.0)
        degs = [k for k in range(clean.shape[1]) if np.any(clean[:, k])]
        dj = max(degs) if degs else 0
        den = np.array([1.0])
        for i in range(dj):
            den = np.convolve(den, np.array([-_default_pole(i, g.domain), 1.0]))
        for i in range(m):
            entries[i][j] = (list(clean[i, : dj + 1]), list(den))
    basis = realize_rational(RationalMatrixData(m, nu, entries), g.domain)
    return minreal(basis, tol=tol, rng=rng)


def left_nullspace(sys: DescriptorSystem, tol=None, rng=None) -> DescriptorSystem:
    """Proper rational basis of the left nullspace (``(p - r) x p``)."""
    return transpose_dual(right_nullspace(transpose_dual(sys), tol=tol, rng=rng))


# ---------------------------------------------------------------------------
# linear rational matrix equations


def _orthonormal_columns(rows, cols, rng):
    Q, _ = np.linalg.qr(rng.normal(size=(rows, max(cols, 1))))
    return Q[:, :cols]


def _shared_solver_pencil(G2, F2):
    """Particular-solution realization for square invertible G2: picks the
    input component of the lifted pencil solution of ``G2 X = F2``."""
    nG, nF = G2.n, F2.n
    r = G2.m
    q = F2.m
    nsh = nG + nF
    Ash = np.zeros((nsh + r, nsh + r))
    Ash[:nG, :nG] = G2.A
    Ash[nG:nsh, nG:nsh] = F2.A
    Ash[:nG, nsh:] = -G2.B
    Ash[nsh:, :nG] = G2.C
    Ash[nsh:, nG:nsh] = F2.C
    Ash[nsh:, nsh:] = G2.D
    Esh = np.zeros_like(Ash)
    Esh[:nG, :nG] = G2.E
    Esh[nG:nsh, nG:nsh] = F2.E
    Bx = np.zeros((nsh + r, q))
    Bx[nG:nsh, :] = -F2.B
    Bx[nsh:, :] = F2.D
    Cx = np.zeros((r, nsh + r))
    Cx[:, nsh:] = np.eye(r)
    return _trusted_system(Ash, Esh, Bx, Cx, np.zeros((r, q)), G2.domain)


def _row_col_select(sys, P=None, T=None):
    """Constant row selection ``P @ G`` and/or column selection ``G @ T``."""
    B = sys.B if T is None else sys.B @ T
    D = sys.D if T is None else sys.D @ T
    C = sys.C if P is None else P @ sys.C
    D = D if P is None else P @ D
    return _trusted_system(sys.A, sys.E, B, C, D, sys.domain)


def solve_right(G: DescriptorSystem, F: DescriptorSystem, tol=None, rng=None) -> SolveResult:
    """Solve ``G X = F`` for a rational ``X``.

    Compatibility is tested probabilistically by comparing the ranks of the
    lifted system pencils of ``G`` and ``[G F]`` at shared random frequency
    probes; a strict rank inflation at every probe raises
    :class:`Incompatible`.  When ``G`` is invertible the explicit lifted-
    pencil realization is used directly; otherwise constant orthonormal
    row/column selectors reduce the problem to an invertible core.  The
    returned nullspace basis parameterizes all solutions.
    """
    if G.domain is not F.domain:
        raise DomainMismatch("G and F must share a time domain")
    if G.p != F.p:
        raise DimensionMismatch(f"G and F must have equal output counts, got {G.p} and {F.p}")
    rng = probe_rng(rng)
    g = minreal(G, tol=tol, rng=rng)
    f = minreal(F, tol=tol, rng=rng)

    # shared-state pencils for the compatibility test
    gf = concat_row(g, f)
    Mgf, Ngf = _system_pencil(gf)
    mg = g.m
    keep = list(range(gf.n)) + [gf.n + j for j in range(mg)]
    Mg, Ng = Mgf[:, keep], Ngf[:, keep]
    inflated = 0
    probes = probe_points(gf, count=3, rng=rng)
    for lam in probes:
        r1 = rank_tol(Mg - lam * Ng, tol)
        r2 = rank_tol(Mgf - lam * Ngf, tol)
        if r2 > r1:
            inflated += 1
    if inflated == len(probes) and probes:
        raise Incompatible("rank of [G F] exceeds rank of G at every probe frequency")

    r = normal_rank(g, rng=rng)
    attempts = 5
    for attempt in range(attempts):
        if r == g.p == g.m:
            P, T = None, None
            g2, f2 = g, f
        else:
            P = _orthonormal_columns(g.p, r, rng).T
            T = _orthonormal_columns(g.m, r, rng)
            g2 = _row_col_select(g, P=P, T=T)
            f2 = _row_col_select(f, P=P)
            if normal_rank(g2, rng=rng) < r:
                continue
        if r == 0:
            X0 = _static(np.zeros((g.m, f.m)), g.domain)
        else:
            Xh = _shared_solver_pencil(g2, f2)
            X0 = Xh if T is None else series(_static(T, g.domain), Xh)
        X0 = minreal(X0, tol=tol, rng=rng)
        ok = True
        for lam in probe_points(gf, count=3, rng=rng):
            lhs = eval_tfm(g, lam) @ eval_tfm(X0, lam)
            rhs = eval_tfm(f, lam)
            if np.linalg.norm(lhs - rhs) > 1e-7 * (1.0 + np.linalg.norm(rhs)):
                ok = False
                break
        if ok:
            return SolveResult(X0, right_nullspace(g, tol=tol, rng=rng))
    raise IterationFailure("could not construct a particular solution (is the system compatible?)")


def solve_left(G: DescriptorSystem, F: DescriptorSystem, tol=None, rng=None) -> SolveResult:
    """Solve ``X G = F`` (transpose-dual of :func:`solve_right`); the basis
    field holds a left nullspace basis of ``G``."""
    res = solve_right(transpose_dual(G), transpose_dual(F), tol=tol, rng=rng)
    return SolveResult(transpose_dual(res.particular), transpose_dual(res.null_basis))


# ---------------------------------------------------------------------------
# L2 model matching


def _causal_split(g, tol=None, rng=None):
    """Orthogonal causal/anticausal split of a two-sided system.

    The pole-based decomposition alone is not orthogonal on the unit circle:
    the antistable part still owns the zeroth Fourier coefficient
    ``c0 = Gu(0)``, which belongs to the causal side.  Returns
    ``(causal, strictly_anticausal)`` whose L2 norms add in squares.
    """
    region = stability_region(g.domain)
    parts = additive_decompose(g, region, improper_to_bad=True, tol=tol, rng=rng)
    gs, gu = parts.first, parts.second
    if g.domain is TimeDomain.DISCRETE and gu.n:
        c0 = eval_tfm(gu, 0.0).real
        gs = _trusted_system(gs.A, gs.E, gs.B, gs.C, gs.D + c0, gs.domain)
        gu = _trusted_system(gu.A, gu.E, gu.B, gu.C, gu.D - c0, gu.domain)
    return gs, gu


def _l2_norm_sq(sys, tol=None, rng=None) -> float:
    """Squared L2 norm of a possibly two-sided (stable/antistable) system."""
    g = minreal(sys, tol=tol, rng=rng)
    if g.p == 0 or g.m == 0:
        return 0.0
    gs, gu = _causal_split(g, tol=tol, rng=rng)
    total = 0.0
    if gs.n or np.any(gs.D):
        total += h2_norm(gs, tol=tol, rng=rng) ** 2
    if gu.n or np.any(gu.D):
        total += h2_norm(minreal(conjugate(gu), tol=tol, rng=rng), tol=tol, rng=rng) ** 2
    return total


def l2_model_match(G: DescriptorSystem, F: DescriptorSystem, tol=None, rng=None):
    """L2-optimal stable solution of ``min ||F - G X||`` and its certificate.

    Both systems must be stable and proper and ``G`` must have full column
    normal rank with no zeros on the stability boundary; in continuous time
    ``F`` must additionally be strictly proper for the error norm to be
    finite.  Returns ``(X, parts)`` where ``parts`` collects the compressed
    targets, the stable/antistable split, and the achieved error norm.
    """
    if G.domain is not F.domain:
        raise DomainMismatch("G and F must share a time domain")
    if G.p != F.p:
        raise DimensionMismatch(f"G and F must have equal output counts, got {G.p} and {F.p}")
    rng = probe_rng(rng)
    g = minreal(G, tol=tol, rng=rng)
    f = minreal(F, tol=tol, rng=rng)
    if not is_stable(g, tol=tol, rng=rng):
        raise UnstableInput("G must be stable and proper")
    if not is_stable(f, tol=tol, rng=rng):
        raise UnstableInput("F must be stable and proper")
    if g.domain is TimeDomain.CONTINUOUS and np.linalg.norm(f.D) > 1e-10 * (1.0 + np.linalg.norm(f.B) * np.linalg.norm(f.C)):
        raise NonstrictlyProperF("continuous-time model matching needs a strictly proper F")
    if normal_rank(g, rng=rng) < g.m:
        raise UnsupportedShape("G must have full column normal rank")
    region = stability_region(g.domain)
    for z in zeros(g, tol=tol, rng=rng).finite:
        if region.on_boundary(z, 1e-8):
            raise BoundaryZeros(f"zero {z} lies on the stability boundary")
    if g.domain is TimeDomain.CONTINUOUS and rank_tol(g.D.T @ g.D) < g.m:
        # zeros at infinity: outside the restricted inner-outer scope, but a
        # square G with an exact stable solution needs no compression at all
        # (take the identity as the inner factor and G itself as the outer)
        if g.p == g.m:
            X0 = solve_right(g, f, tol=tol, rng=rng).particular
            if is_stable(X0, tol=tol, rng=rng):
                zero_sys = _static(np.zeros((g.m, f.m)), g.domain)
                parts = LdpParts(
                    in_range=f,
                    out_of_range=_static(np.zeros((0, f.m)), g.domain),
                    stable_part=f,
                    antistable_part=zero_sys,
                    error_norm=0.0,
                )
                return X0, parts
        raise BoundaryZeros("G has zeros at infinity on the stability boundary")

    io = inner_outer(g, tol=tol, rng=rng)
    Qfull, R = io.first, io.second
    r = io.inner_columns
    q1 = _row_col_select(Qfull, T=np.eye(Qfull.m)[:, :r])
    q2 = _row_col_select(Qfull, T=np.eye(Qfull.m)[:, r:])
    f1t = minreal(series(conjugate(q1), f), tol=tol, rng=rng)
    f2t = minreal(series(conjugate(q2), f), tol=tol, rng=rng)

    # the optimal stable correction is the causal projection of the
    # compressed target (in discrete time that includes the zeroth Fourier
    # coefficient of the antistable part, not just its stable poles)
    Ls, Lu = _causal_split(f1t, tol=tol, rng=rng)

    if Ls.n or np.any(Ls.D):
        X = minreal(series(inverse(R, mode="d-inverse"), Ls), tol=tol, rng=rng)
    else:
        X = _static(np.zeros((g.m, f.m)), g.domain)

    err_sq = _l2_norm_sq(Lu, tol=tol, rng=rng) + _l2_norm_sq(f2t, tol=tol, rng=rng)
    parts = LdpParts(
        in_range=f1t,
        out_of_range=f2t,
        stable_part=Ls,
        antistable_part=Lu,
        error_norm=float(np.sqrt(max(err_sq, 0.0))),
    )
    return X, parts

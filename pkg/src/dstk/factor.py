"""Factorizations of rational matrices through their descriptor realizations.

Additive decomposition over a good/bad split of the complex plane, right and
left coprime factorizations by eigenvalue dislocation with state feedback /
output injection, and inner-outer (and co-outer--co-inner) factorizations of
stable proper full-rank systems via an algebraic Riccati equation solved on
an extended structured pencil.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import (
    BoundaryZeros,
    ImproperInput,
    IterationFailure,
    PlacementFailure,
    PoleOnBoundary,
    RankDeficiencyUnsupported,
    RegionInvalid,
    UnstableInput,
)
from .analysis import StabilityRegion, minreal, normal_rank, stability_region, zeros
from .kernels import (
    finite_beta_threshold,
    glyap,
    gschur_ordered,
    gsylv_separation,
    null_basis,
    probe_rng,
    rank_tol,
)
from .ops import _diag2, _static, concat_row, transpose_dual
from .pencil import weierstrass_structure
from .system import DescriptorSystem, TimeDomain, _trusted_system

__all__ = [
    "FactorPair",
    "additive_decompose",
    "rcf",
    "lcf",
    "inner_outer",
    "co_outer_co_inner",
]


@dataclass
class FactorPair:
    """A two-factor result.

    ``kind`` is one of ``"additive"`` (good part, bad part), ``"rcf"`` /
    ``"lcf"`` (numerator, denominator), ``"inner-outer"`` (square inner
    factor, outer factor) and ``"co-outer-co-inner"`` (co-outer factor,
    square inner factor).  For the compressions, ``inner_columns`` is the
    number of leading columns (rows, for the co-variant) of the square inner
    factor that span the image (co-image) of the input.
    """

    first: DescriptorSystem
    second: DescriptorSystem
    kind: str
    inner_columns: int | None = None


# ---------------------------------------------------------------------------
# additive decomposition


def additive_decompose(
    sys: DescriptorSystem,
    region: StabilityRegion,
    improper_to_bad: bool = False,
    tol=None,
    rng=None,
) -> FactorPair:
    """Split ``G = Gg + Gb`` with the poles of ``Gg`` in ``region`` and those
    of ``Gb`` outside; the feedthrough goes to ``Gg``.

    Infinite poles cannot straddle a half-plane boundary, so improper systems
    are rejected for half-plane regions unless ``improper_to_bad`` forces the
    whole infinite structure into ``Gb``.  For disk regions the infinite
    structure always belongs to the bad part.
    """
    if not isinstance(region, StabilityRegion):
        raise RegionInvalid("region must be a StabilityRegion")
    g = minreal(sys, tol=tol, rng=rng)
    p, m = g.p, g.m
    ws = weierstrass_structure(g.A, g.E, tol=tol, rng=rng) if g.n else None
    finite = ws.finite_eigenvalues if ws else []
    divisors = ws.infinite_divisor_degrees if ws else []
    for lam in finite:
        if region.on_boundary(lam, 1e-8):
            raise PoleOnBoundary(f"pole {lam} lies on the region boundary")
    if divisors and region.is_half_plane and not improper_to_bad:
        raise PoleOnBoundary(
            "improper system: infinite poles straddle a half-plane boundary "
            "(pass improper_to_bad=True to force them into the bad part)"
        )

    if g.n == 0:
        return FactorPair(g, _static(np.zeros((p, m)), g.domain), "additive")

    beta_thr = finite_beta_threshold(g.E)
    res = gschur_ordered(
        g.A, g.E, select=lambda a, b: b > beta_thr and region.contains(a / b), rng=rng
    )
    k = res.selected_count
    n = g.n
    A1, E1 = res.S, res.T
    B1 = res.Q.T @ g.B
    C1 = g.C @ res.Z
    if k == n:
        Gg = _trusted_system(A1, E1, B1, C1, g.D, g.domain)
        return FactorPair(Gg, _static(np.zeros((p, m)), g.domain), "additive")
    if k == 0:
        Gb = _trusted_system(A1, E1, B1, C1, np.zeros((p, m)), g.domain)
        return FactorPair(_static(g.D, g.domain), Gb, "additive")

    L, R = gsylv_separation(
        A1[:k, :k], A1[:k, k:], A1[k:, k:], E1[:k, :k], E1[:k, k:], E1[k:, k:]
    )
    Bg = B1[:k, :] - L @ B1[k:, :]
    Cb = C1[:, :k] @ R + C1[:, k:]
    Gg = _trusted_system(A1[:k, :k], E1[:k, :k], Bg, C1[:, :k], g.D, g.domain)
    Gb = _trusted_system(A1[k:, k:], E1[k:, k:], B1[k:, :], Cb, np.zeros((p, m)), g.domain)
    return FactorPair(Gg, Gb, "additive")


# ---------------------------------------------------------------------------
# coprime factorizations


def _real_target_blocks(targets):
    """Real block-diagonal matrix carrying the target spectrum."""
    vals = sorted(targets, key=lambda z: (round(z.real, 12), round(abs(z.imag), 12), z.imag))
    blocks = []
    used = [False] * len(vals)
    for i, z in enumerate(vals):
        if used[i]:
            continue
        if abs(z.imag) <= 1e-12:
            blocks.append(np.array([[z.real]]))
            used[i] = True
            continue
        mate = None
        for j in range(i + 1, len(vals)):
            if not used[j] and abs(vals[j] - z.conjugate()) <= 1e-8 * (1.0 + abs(z)):
                mate = j
                break
        if mate is None:
            raise RegionInvalid("complex target poles must come in conjugate pairs")
        a, b = z.real, abs(z.imag)
        blocks.append(np.array([[a, b], [-b, a]]))
        used[i] = True
        used[mate] = True
    out = np.zeros((len(vals), len(vals)))
    pos = 0
    for blk in blocks:
        k = blk.shape[0]
        out[pos : pos + k, pos : pos + k] = blk
        pos += k
    return out


def _spread_targets(targets, region):
    """Nudge repeated targets apart (keeps conjugate symmetry and containment)."""
    out = []
    for z in targets:
        step = 0
        zz = z
        while any(abs(zz - w) <= 1e-8 * (1.0 + abs(zz)) for w in out):
            step += 1
            if region.is_half_plane:
                zz = z - 0.1 * step
            else:
                zz = z * (1.0 - min(0.1 * step, 0.9))
        out.append(zz)
    return out


def _place_poles(A, B, targets, region, rng):
    """Feedback F with the eigenvalues of ``A + B F`` at the targets."""
    nb = A.shape[0]
    m = B.shape[1]
    if nb == 0:
        return np.zeros((m, 0))
    if m == 0:
        raise PlacementFailure("cannot relocate eigenvalues without inputs")
    spread = _spread_targets([complex(t) for t in targets], region)
    gamma = _real_target_blocks(spread)
    for _ in range(8):
        G = rng.normal(size=(m, nb))
        try:
            X = sla.solve_sylvester(A, -gamma, -B @ G)
        except (np.linalg.LinAlgError, ValueError):
            continue
        sv = np.linalg.svd(X, compute_uv=False)
        if sv.size == 0 or sv[-1] <= 1e-9 * max(sv[0], 1.0):
            continue
        F = G @ np.linalg.inv(X)
        if all(region.contains(z) for z in np.linalg.eigvals(A + B @ F)):
            return F
    raise PlacementFailure("pole placement did not converge")


def _dislocating_feedback(g, region, pole_set, tol, rng):
    """State feedback making all infinite eigenvalues of ``A + BF - lam E``
    simple and moving every finite eigenvalue outside ``region`` into it."""
    n, m = g.n, g.m
    A, E, B = g.A, g.E, g.B
    F = np.zeros((m, n))

    re = rank_tol(E, tol)
    if re < n:
        # index reduction: make the trailing block of A + BF invertible in the
        # orthogonal coordinates that compress E
        Ue, _, VeT = np.linalg.svd(E)
        Ve = VeT.T
        Ap = Ue.T @ A @ Ve
        Bp = Ue.T @ B
        A22 = Ap[re:, re:]
        B2 = Bp[re:, :]
        if rank_tol(B2, tol) < n - re:
            raise PlacementFailure("infinite eigenvalues are not controllable")
        scale = 1.0 + np.linalg.norm(A, 2)
        T = scale * np.eye(n - re)
        F2 = B2.T @ np.linalg.solve(B2 @ B2.T, T - A22)
        F = np.hstack([np.zeros((m, re)), F2]) @ Ve.T
        A = A + B @ F

    beta_thr = finite_beta_threshold(E)
    res = gschur_ordered(
        A, E, select=lambda a, b: b <= beta_thr or region.contains(a / b), rng=rng
    )
    k = res.selected_count
    if k < n:
        Ab, Eb = res.S[k:, k:], res.T[k:, k:]
        Bb = (res.Q.T @ B)[k:, :]
        Abs = np.linalg.solve(Eb, Ab)
        Bbs = np.linalg.solve(Eb, Bb)
        bad = np.linalg.eigvals(Abs)
        if pole_set is not None:
            targets = [complex(z) for z in pole_set]
            for z in targets:
                if not region.contains(z):
                    raise RegionInvalid(f"target pole {z} is outside the region")
            if len(targets) != len(bad):
                raise RegionInvalid(f"need {len(bad)} target poles, got {len(targets)}")
        else:
            targets = [region.reflect(z) for z in bad]
        rngl = probe_rng(rng) if rng is not None else probe_rng()
        Fb = _place_poles(Abs, Bbs, targets, region, rngl)
        F = F + np.hstack([np.zeros((m, k)), Fb]) @ res.Z.T
    return F


def rcf(sys: DescriptorSystem, region: StabilityRegion, pole_set=None, tol=None, rng=None) -> FactorPair:
    """Right coprime factorization ``G = N M^{-1}`` over a good region.

    A state feedback built on the minimal realization dislocates every bad
    finite eigenvalue into the region (by default onto its mirror image;
    ``pole_set`` overrides the targets) and reduces the infinite structure so
    that all infinite eigenvalues of the factor pencil are simple.  ``M`` is
    square ``m x m`` with ``M(inf) = I``.
    """
    if not isinstance(region, StabilityRegion):
        raise RegionInvalid("region must be a StabilityRegion")
    g = minreal(sys, tol=tol, rng=rng)
    F = _dislocating_feedback(g, region, pole_set, tol, rng)
    Af = g.A + g.B @ F
    N = _trusted_system(Af, g.E, g.B, g.C - g.D @ F, g.D, g.domain)
    M = _trusted_system(Af, g.E, g.B, -F, np.eye(g.m), g.domain)
    return FactorPair(N, M, "rcf")


def lcf(sys: DescriptorSystem, region: StabilityRegion, pole_set=None, tol=None, rng=None) -> FactorPair:
    """Left coprime factorization ``G = M^{-1} N`` (dual of :func:`rcf`)."""
    pair = rcf(transpose_dual(sys), region, pole_set=pole_set, tol=tol, rng=rng)
    return FactorPair(transpose_dual(pair.first), transpose_dual(pair.second), "lcf")


# ---------------------------------------------------------------------------
# inner-outer machinery


def _psd_sqrt(W, what):
    w, V = np.linalg.eigh(0.5 * (W + W.T))
    if w.size and w.min() <= 1e-10 * max(w.max(), 1.0):
        raise RankDeficiencyUnsupported(f"{what} is numerically rank deficient")
    root = V @ np.diag(np.sqrt(w)) @ V.T
    inv_root = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    return root, inv_root


def _riccati_schur(A, B, Qc, Sc, Rc, domain, rng=None):
    """Stabilizing Riccati solution via the ordered Schur form of the
    extended structured pencil (size 2n + m)."""
    n, m = B.shape
    Zn = np.zeros((n, n))
    Znm = np.zeros((n, m))
    if domain is TimeDomain.CONTINUOUS:
        M = np.block([[A, Zn, B], [Qc, A.T, Sc], [Sc.T, B.T, Rc]])
        N = np.zeros((2 * n + m, 2 * n + m))
        N[:n, :n] = np.eye(n)
        N[n : 2 * n, n : 2 * n] = -np.eye(n)

        def sel(a, b):
            return b > 1e-8 * (abs(a) + b + 1e-300) and (a / b).real < 0.0

    else:
        M = np.block([[A, Zn, B], [Qc, -np.eye(n), Sc], [Sc.T, Znm.T, Rc]])
        N = np.zeros((2 * n + m, 2 * n + m))
        N[:n, :n] = np.eye(n)
        N[n : 2 * n, n : 2 * n] = -A.T
        N[2 * n :, n : 2 * n] = -B.T

        def sel(a, b):
            return b > 1e-8 * (abs(a) + b + 1e-300) and abs(a / b) < 1.0

    res = gschur_ordered(M, N, select=sel, rng=rng)
    if res.selected_count != n:
        raise IterationFailure("Riccati pencil did not split into n stable directions")
    Z1 = res.Z[:n, :n]
    Z2 = res.Z[n : 2 * n, :n]
    try:
        X = np.linalg.solve(Z1.T, Z2.T).T
    except np.linalg.LinAlgError:
        raise IterationFailure("Riccati deflating subspace is not a graph") from None
    X = 0.5 * (X + X.T)

    if domain is TimeDomain.CONTINUOUS:
        gain = np.linalg.solve(Rc, B.T @ X + Sc.T)
        resid = A.T @ X + X @ A + Qc - (X @ B + Sc) @ gain
    else:
        Wd = Rc + B.T @ X @ B
        gain = np.linalg.solve(Wd, B.T @ X @ A + Sc.T)
        resid = A.T @ X @ A - X + Qc - (A.T @ X @ B + Sc) @ gain
    scale = 1.0 + np.linalg.norm(Qc) + (1.0 + np.linalg.norm(A)) ** 2 * (1.0 + np.linalg.norm(X))
    if np.linalg.norm(resid) > 1e-6 * scale:
        raise IterationFailure("Riccati residual too large")
    return X


def _standard_stable_data(sys, tol, rng):
    """Validated (A, B, C, D) with E = I for the inner-outer restricted scope."""
    g = minreal(sys, tol=tol, rng=rng)
    ws = weierstrass_structure(g.A, g.E, tol=tol, rng=rng) if g.n else None
    region = stability_region(g.domain)
    if ws is not None:
        if ws.infinite_divisor_degrees:
            raise ImproperInput("inner-outer factorization needs a proper system")
        if not all(region.contains(z) for z in ws.finite_eigenvalues):
            raise UnstableInput("inner-outer factorization needs a stable system")
    for z in zeros(g, tol=tol, rng=rng).finite:
        if region.on_boundary(z, 1e-8):
            raise BoundaryZeros(f"zero {z} lies on the stability boundary")
    if g.n:
        As = np.linalg.solve(g.E, g.A)
        Bs = np.linalg.solve(g.E, g.B)
    else:
        As, Bs = g.A, g.B
    return g, As, Bs, g.C, g.D, region


def inner_outer(sys: DescriptorSystem, tol=None, rng=None) -> FactorPair:
    """Inner--outer factorization ``G = Q1 R`` of a stable proper system of
    full column normal rank.

    ``Q = [Q1 Q2]`` is returned square inner; ``R`` is square, stable,
    minimum phase and invertible.  Rank-deficient cases (including a
    continuous-time feedthrough without full column rank, i.e. zeros at
    infinity) fall outside the restricted scope and raise
    :class:`RankDeficiencyUnsupported`.
    """
    g, As, Bs, C, D, region = _standard_stable_data(sys, tol, rng)
    n, m, p = g.n, g.m, g.p
    if m == 0:
        return FactorPair(_static(np.eye(p), g.domain), _static(np.zeros((0, 0)), g.domain), "inner-outer", 0)
    if normal_rank(g, rng=rng) < m:
        raise RankDeficiencyUnsupported("TFM must have full column normal rank")

    Qc = C.T @ C
    Sc = -C.T @ D
    Rc = D.T @ D
    if g.domain is TimeDomain.CONTINUOUS:
        _psd_sqrt(Rc, "D^T D")  # zeros at infinity are out of scope
        if n:
            X = _riccati_schur(As, Bs, Qc, Sc, Rc, g.domain, rng=rng)
            F = -np.linalg.solve(Rc, Bs.T @ X + Sc.T)
        else:
            F = np.zeros((m, 0))
        W = Rc
    else:
        if n:
            X = _riccati_schur(As, Bs, Qc, Sc, Rc, g.domain, rng=rng)
            F = -np.linalg.solve(Rc + Bs.T @ X @ Bs, Bs.T @ X @ As + Sc.T)
            W = Rc + Bs.T @ X @ Bs
        else:
            F = np.zeros((m, 0))
            W = Rc
    W12, W12i = _psd_sqrt(W, "spectral-factor weight")

    R = _trusted_system(As, np.eye(n), Bs, W12 @ F, W12, g.domain)
    Q1 = _trusted_system(As + Bs @ F, np.eye(n), Bs @ W12i, C - D @ F, D @ W12i, g.domain)
    q1 = minreal(Q1, tol=tol, rng=rng)

    if p > m:
        Q2 = _inner_complement(q1, g.domain)
        Qfull = concat_row(q1, Q2)
    else:
        Qfull = q1
    return FactorPair(Qfull, R, "inner-outer", inner_columns=m)


def _inner_complement(q1, domain):
    """Square-inner completion ``[Q1 Q2]`` of a minimal inner factor Q1."""
    A, C, D = q1.A, q1.C, q1.D
    n, p, m = q1.n, q1.p, q1.m
    if n == 0:
        Dp = null_basis(D.T)
        return _static(Dp, domain)
    X1 = glyap(A.T, np.eye(n), C.T @ C, domain)
    if domain is TimeDomain.CONTINUOUS:
        Dp = null_basis(D.T)
        B2 = np.linalg.solve(X1, C.T @ Dp)
        return _trusted_system(A, np.eye(n), B2, C, Dp, domain)
    # discrete: complete [B; D] to an M-orthonormal basis of the constraint
    # kernel, M = diag(X1, I)
    Kmat = np.hstack([A.T @ X1, -C.T])
    NK = null_basis(Kmat)
    if NK.shape[1] != p:
        raise IterationFailure("inner completion kernel has unexpected dimension")
    w, V = np.linalg.eigh(X1)
    w = np.clip(w, 1e-14 * max(w.max(), 1.0), None)
    Xh = V @ np.diag(np.sqrt(w)) @ V.T
    Xhi = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    Mhalf = _diag2(Xh, np.eye(p))
    Mhalfi = _diag2(Xhi, np.eye(p))
    T1 = Mhalf @ np.vstack([q1.B, D])
    Kt = Mhalf @ NK
    P = Kt - T1 @ (T1.T @ Kt)
    U, s, _ = np.linalg.svd(P, full_matrices=False)
    keep = U[:, : p - m]
    if s.size < p - m or (p > m and s[p - m - 1] <= 1e-10 * max(s[0], 1.0)):
        raise IterationFailure("inner completion basis is numerically deficient")
    BD = Mhalfi @ keep
    return _trusted_system(A, np.eye(n), BD[:n, :], C, BD[n:, :], domain)


def co_outer_co_inner(sys: DescriptorSystem, tol=None, rng=None) -> FactorPair:
    """Co-outer--co-inner factorization ``G = R Q1`` with ``Q1`` the leading
    ``inner_columns`` rows of the returned square inner ``Q`` (dual of
    :func:`inner_outer`)."""
    pair = inner_outer(transpose_dual(sys), tol=tol, rng=rng)
    return FactorPair(
        transpose_dual(pair.second),
        transpose_dual(pair.first),
        "co-outer-co-inner",
        inner_columns=pair.inner_columns,
    )

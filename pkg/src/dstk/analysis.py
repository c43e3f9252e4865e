"""Structural analysis of descriptor systems.

Normal rank, pole/zero structure (finite values plus infinite
multiplicities), McMillan degree, stability and minimum-phase predicates,
the five-condition minimality report, minimal realization, and the H2/L2
system norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    IterationFailure,
    NonstrictlyProperContinuous,
    RegionInvalid,
    SingularPencil,
    UnstableSystem,
)
from .kernels import EPS, glyap, gsylv_separation, null_basis, probe_rng, rank_tol
from .ops import _diag2
from .pencil import klf
from .system import DescriptorSystem, TimeDomain, _trusted_system, probe_points

__all__ = [
    "PoleZeroInfo",
    "MinimalityReport",
    "StabilityRegion",
    "stability_region",
    "normal_rank",
    "poles",
    "zeros",
    "mcmillan_degree",
    "is_stable",
    "is_minimum_phase",
    "minimality_report",
    "minreal",
    "h2_norm",
]


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class StabilityRegion:
    """An open "good" region of the complex plane, symmetric about the real
    axis: a shifted half-plane ``Re z < alpha`` or a scaled disk ``|z| < rho``.
    """

    kind: str  # "half-plane" | "disk"
    alpha: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if self.kind not in ("half-plane", "disk"):
            raise RegionInvalid(f"unknown region kind {self.kind!r}")
        if self.kind == "disk" and not self.rho > 0.0:
            raise RegionInvalid("disk radius must be positive")

    @staticmethod
    def left_half_plane() -> "StabilityRegion":
        return StabilityRegion("half-plane", alpha=0.0)

    @staticmethod
    def unit_disk() -> "StabilityRegion":
        return StabilityRegion("disk", rho=1.0)

    @staticmethod
    def half_plane(alpha: float) -> "StabilityRegion":
        return StabilityRegion("half-plane", alpha=float(alpha))

    @staticmethod
    def disk(rho: float) -> "StabilityRegion":
        return StabilityRegion("disk", rho=float(rho))

    @property
    def is_half_plane(self) -> bool:
        return self.kind == "half-plane"

    def contains(self, z) -> bool:
        z = complex(z)
        if self.kind == "half-plane":
            return z.real < self.alpha
        return abs(z) < self.rho

    def boundary_distance(self, z) -> float:
        z = complex(z)
        if self.kind == "half-plane":
            return abs(z.real - self.alpha)
        return abs(abs(z) - self.rho)

    def on_boundary(self, z, tol=1e-8) -> bool:
        return self.boundary_distance(z) <= tol * (1.0 + abs(complex(z)))

    def real_point(self) -> float:
        return self.alpha - 1.0 if self.kind == "half-plane" else 0.0

    def reflect(self, z) -> complex:
        """Default dislocation target for a point outside the region."""
        z = complex(z)
        if self.kind == "half-plane":
            return complex(self.alpha - abs(z.real - self.alpha) - 1.0, z.imag)
        if z == 0:
            return complex(0.5 * self.rho)
        t = self.rho**2 / z.conjugate()
        if abs(t) > 0.95 * self.rho:
            t *= 0.5 * self.rho / abs(t)
        return t

    def boundary_points(self, count=20):
        """Sample points on the region boundary (for inner-factor checks)."""
        if self.kind == "half-plane":
            w = np.logspace(-3, 3, count)
            return [complex(self.alpha, wi) for wi in w]
        theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return [self.rho * np.exp(1j * t) for t in theta]


def stability_region(domain) -> StabilityRegion:
    """The stable region of a time domain: open left half-plane or unit disk."""
    domain = TimeDomain(getattr(domain, "value", domain))
    if domain is TimeDomain.CONTINUOUS:
        return StabilityRegion.left_half_plane()
    return StabilityRegion.unit_disk()


# ---------------------------------------------------------------------------
# result records


@dataclass
class PoleZeroInfo:
    """Finite values, infinite multiplicity count, and their total, together
    with the Kronecker rank defects (nr, nl) of the system matrix pencil."""

    finite: list
    infinite_count: int
    total: int
    kronecker_ranks: tuple


@dataclass
class MinimalityReport:
    """Outcome of the five minimality conditions at order ``order``."""

    finite_controllable: bool
    infinite_controllable: bool
    finite_observable: bool
    infinite_observable: bool
    no_nondynamic_modes: bool
    order: int

    @property
    def irreducible(self) -> bool:
        return (
            self.finite_controllable
            and self.infinite_controllable
            and self.finite_observable
            and self.infinite_observable
        )

    @property
    def minimal(self) -> bool:
        return self.irreducible and self.no_nondynamic_modes


def _clean_conjugates(vals, tol_ratio=1e-10):
    """Zero out QZ rounding in imaginary parts and enforce conjugate pairing."""
    out = []
    for v in vals:
        v = complex(v)
        if abs(v.imag) <= tol_ratio * max(1.0, abs(v)):
            v = complex(v.real)
        out.append(v)
    return out


def _system_pencil(sys):
    """System matrix pencil of the TFM.

    The input column carries ``-B`` so that the pencil's kernel and regular
    eigenstructure describe ``G = C (A - lam E)^{-1} B + D`` itself under the
    library's evaluation convention (a kernel vector ``(x, u)`` then satisfies
    ``G(lam) u = 0``).  Rank counts are unaffected by the sign.
    """
    n, m, p = sys.n, sys.m, sys.p
    M = np.zeros((n + p, n + m))
    M[:n, :n] = sys.A
    M[:n, n:] = -sys.B
    M[n:, :n] = sys.C
    M[n:, n:] = sys.D
    N = np.zeros((n + p, n + m))
    N[:n, :n] = sys.E
    return M, N


def normal_rank(sys: DescriptorSystem, rng=None) -> int:
    """Normal rank of the TFM: max over random probes of
    ``rank [[A - lam E, B], [C, D]] - n``."""
    rng = probe_rng(rng)
    M, N = _system_pencil(sys)
    if M.size == 0:
        return 0
    best = 0
    for lam in probe_points(sys, count=3, rng=rng):
        best = max(best, rank_tol(M - lam * N) - sys.n)
    return best


# ---------------------------------------------------------------------------
# minimal realization


def _ctrb_reduce(A, B, C, tol_abs):
    """Truncate to the controllable part via the orthogonal staircase."""
    n = A.shape[0]
    A = A.copy()
    B = B.copy()
    C = C.copy()
    k0 = 0
    W = B
    while k0 < n:
        U, r = _svd_row_compress(W, tol_abs)
        if r == 0:
            break
        A[k0:, :] = U.T @ A[k0:, :]
        A[:, k0:] = A[:, k0:] @ U
        B[k0:, :] = U.T @ B[k0:, :]
        C[:, k0:] = C[:, k0:] @ U
        prev = k0
        k0 += r
        W = A[k0:, prev:k0]
    nc = k0
    return A[:nc, :nc], B[:nc, :], C[:, :nc]


def _svd_row_compress(M, tol_abs):
    m = M.shape[0]
    if M.size == 0:
        return np.eye(m), 0
    U, s, _ = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > tol_abs))
    return U, r


def _standard_minreal(A, B, C, tol_abs):
    A, B, C = _ctrb_reduce(A, B, C, tol_abs)
    At, Bt, Ct = _ctrb_reduce(A.T, C.T, B.T, tol_abs)
    return At.T, Ct.T, Bt.T


def _drop_simple_chains(W, B, C):
    """Split the degree-one chains off the nilpotent block ``(I - lam W, B, C)``.

    Any subspace of ``ker W`` transversal to ``range W`` decouples under a
    similarity with exactly zero coupling blocks; its states act as a pure
    feedthrough.  Returns ``(W', B', C', D_extra, dropped)`` with the constant
    contribution of the removed states in ``D_extra``.
    """
    n = W.shape[0]
    zero = np.zeros((C.shape[0], B.shape[1]))
    if n == 0:
        return W, B, C, zero, False
    K = null_basis(W)
    if K.shape[1] == 0:
        return W, B, C, zero, False
    U, s, _ = np.linalg.svd(W)
    r = int(np.count_nonzero(s > max(n, 1) * EPS * (s[0] if s.size else 0.0)))
    R = U[:, :r]
    G = K - R @ (R.T @ K)
    Ug, sg, Vgh = np.linalg.svd(G, full_matrices=False)
    q = int(np.count_nonzero(sg > 1e-8 * max(1.0, sg[0] if sg.size else 0.0)))
    if q == 0:
        return W, B, C, zero, False
    S = K @ Vgh[:q].T
    Y = null_basis(np.hstack([R, S]).T)
    T = np.hstack([R, Y, S])
    sv = np.linalg.svd(T, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise IterationFailure("chain-splitting similarity is ill conditioned")
    Ti = np.linalg.inv(T)
    Wt = Ti @ W @ T
    Bt = Ti @ B
    Ct = C @ T
    keep = n - q
    D_extra = Ct[:, keep:] @ Bt[keep:, :]
    return Wt[:keep, :keep], Bt[:keep, :], Ct[:, :keep], D_extra, True


def minreal(sys: DescriptorSystem, tol=None, rng=None) -> DescriptorSystem:
    """Minimal descriptor realization with the same TFM.

    The pencil is first split orthogonally into its infinite and finite
    parts (staircase deflation plus a Sylvester-based decoupling).  The
    finite part is reduced by the standard controllability/observability
    staircases; the infinite part is rebuilt as a minimal nilpotent-E block
    from the coefficients of the polynomial action, with any constant part
    absorbed into ``D``.  The result satisfies all five minimality
    conditions and its order never exceeds the input order.
    """
    if sys.n == 0:
        return sys
    Mk, Nk, U, V, ks = klf(sys.A, sys.E, tol=tol, rng=rng)
    if ks.right_indices or ks.left_indices:
        raise SingularPencil("pole pencil is singular")
    ninf = int(sum(ks.infinite_divisor_degrees))
    n = sys.n
    nf = n - ninf
    B1 = U @ sys.B
    C1 = sys.C @ V

    Ai = Mk[:ninf, :ninf]
    Ei = Nk[:ninf, :ninf]
    Af = Mk[ninf:, ninf:]
    Ef = Nk[ninf:, ninf:]
    Bi, Bf = B1[:ninf, :], B1[ninf:, :]
    Ci, Cf = C1[:, :ninf], C1[:, ninf:]
    if ninf and nf:
        L, R = gsylv_separation(Ai, Mk[:ninf, ninf:], Af, Ei, Nk[:ninf, ninf:], Ef)
        Bi = Bi - L @ Bf
        Cf = Ci @ R + Cf

    scale = max(np.linalg.norm(X) for X in (sys.A, sys.E, sys.B, sys.C)) + 1.0
    tol_abs = tol if tol is not None else 100.0 * max(n, sys.m, sys.p) * EPS * scale

    D_new = sys.D.copy()

    # finite half: standardize and run the staircases
    if nf:
        As = np.linalg.solve(Ef, Af)
        Bs = np.linalg.solve(Ef, Bf)
        Am, Bm, Cm = _standard_minreal(As, Bs, Cf, tol_abs)
    else:
        Am = np.zeros((0, 0))
        Bm = np.zeros((0, sys.m))
        Cm = np.zeros((sys.p, 0))

    # infinite half: reduce the nilpotent action, then strip the degree-one
    # chains (non-dynamic modes), absorbing their constant action into D
    if ninf:
        Ah = np.linalg.solve(Ai, Ei)
        Bh = np.linalg.solve(Ai, Bi)
        Ch = Ci
        while True:
            Ah, Bh, Ch = _standard_minreal(Ah, Bh, Ch, tol_abs)
            Ah, Bh, Ch, Dx, dropped = _drop_simple_chains(Ah, Bh, Ch)
            D_new = D_new + Dx
            if not dropped:
                break
    else:
        Ah = np.zeros((0, 0))
        Bh = np.zeros((0, sys.m))
        Ch = np.zeros((sys.p, 0))

    npol = Ah.shape[0]
    nfin = Am.shape[0]
    A = _diag2(Am, np.eye(npol))
    E = _diag2(np.eye(nfin), Ah)
    B = np.vstack([Bm, Bh])
    C = np.hstack([Cm, Ch])
    return _trusted_system(A, E, B, C, D_new, sys.domain)


# ---------------------------------------------------------------------------
# poles, zeros, predicates


def poles(sys: DescriptorSystem, tol=None, rng=None) -> PoleZeroInfo:
    """Pole structure of the TFM (computed on an internally reduced
    realization): finite poles, the infinite pole count
    ``sum(divisor degree - 1)``, and their total, the McMillan degree."""
    g = minreal(sys, tol=tol, rng=rng)
    Mk, Nk, _, _, ks_p = klf(g.A, g.E, tol=tol, rng=rng)
    finite = _clean_conjugates(ks_p.finite_eigenvalues)
    inf_count = int(sum(d - 1 for d in ks_p.infinite_divisor_degrees))
    Ms, Ns = _system_pencil(g)
    _, _, _, _, ks_s = klf(Ms, Ns, tol=tol, rng=rng)
    return PoleZeroInfo(
        finite=finite,
        infinite_count=inf_count,
        total=len(finite) + inf_count,
        kronecker_ranks=(ks_s.nr, ks_s.nl),
    )


def zeros(sys: DescriptorSystem, tol=None, rng=None) -> PoleZeroInfo:
    """Zero structure of the TFM: finite eigenvalues of the regular part of
    the system matrix pencil, infinite zero count, and (nr, nl) defects."""
    g = minreal(sys, tol=tol, rng=rng)
    Ms, Ns = _system_pencil(g)
    _, _, _, _, ks = klf(Ms, Ns, tol=tol, rng=rng)
    finite = _clean_conjugates(ks.finite_eigenvalues)
    inf_count = int(sum(d - 1 for d in ks.infinite_divisor_degrees))
    return PoleZeroInfo(
        finite=finite,
        infinite_count=inf_count,
        total=len(finite) + inf_count,
        kronecker_ranks=(ks.nr, ks.nl),
    )


def mcmillan_degree(sys: DescriptorSystem, tol=None, rng=None) -> int:
    """Total pole count (finite plus infinite) of the TFM."""
    return poles(sys, tol=tol, rng=rng).total


def is_stable(sys: DescriptorSystem, tol=None, rng=None) -> bool:
    """True when every pole lies in the stable region of the time domain.

    An improper system has an infinite pole outside any stable region and is
    therefore never stable.
    """
    info = poles(sys, tol=tol, rng=rng)
    if info.infinite_count:
        return False
    region = stability_region(sys.domain)
    return all(region.contains(p) for p in info.finite)


def is_minimum_phase(sys: DescriptorSystem, tol=None, rng=None) -> bool:
    """True when all zeros are finite and lie in the stable region."""
    info = zeros(sys, tol=tol, rng=rng)
    if info.infinite_count:
        return False
    region = stability_region(sys.domain)
    return all(region.contains(z) for z in info.finite)


def minimality_report(sys: DescriptorSystem, tol=None, rng=None) -> MinimalityReport:
    """Evaluate the five minimality conditions on the given realization."""
    n = sys.n
    if n == 0:
        return MinimalityReport(True, True, True, True, True, 0)
    A, E, B, C = sys.A, sys.E, sys.B, sys.C

    def _no_finite_eigs(M, N):
        _, _, _, _, ks = klf(M, N, tol=tol, rng=rng)
        return len(ks.finite_eigenvalues) == 0

    fc = _no_finite_eigs(np.hstack([A, B]), np.hstack([E, np.zeros_like(B)]))
    ic = rank_tol(np.hstack([E, B]), tol) == n
    fo = _no_finite_eigs(np.vstack([A, C]), np.vstack([E, np.zeros_like(C)]))
    io = rank_tol(np.vstack([E, C]), tol) == n
    Z = null_basis(E, tol)
    nd = rank_tol(np.hstack([E, A @ Z]), tol) == rank_tol(E, tol)
    return MinimalityReport(fc, ic, fo, io, nd, n)


# ---------------------------------------------------------------------------
# system norm


def h2_norm(sys: DescriptorSystem, tol=None, rng=None) -> float:
    """H2 norm of a stable system via the controllability Gramian.

    Continuous time requires a strictly proper TFM (``D = 0`` after
    reduction); in discrete time the feedthrough contributes ``trace(D D^T)``.
    """
    g = minreal(sys, tol=tol, rng=rng)
    info = poles(g, tol=tol, rng=rng)
    region = stability_region(g.domain)
    if info.infinite_count or not all(region.contains(p) for p in info.finite):
        raise UnstableSystem("H2 norm requires all poles in the stable region")
    dscale = np.linalg.norm(g.D)
    if g.domain is TimeDomain.CONTINUOUS and dscale > 1e-10 * (1.0 + np.linalg.norm(g.B) * np.linalg.norm(g.C)):
        raise NonstrictlyProperContinuous("continuous-time H2 norm needs a strictly proper system")
    if g.n == 0:
        return float(np.linalg.norm(g.D)) if g.domain is TimeDomain.DISCRETE else 0.0
    X = glyap(g.A, g.E, g.B @ g.B.T, g.domain)
    val = float(np.trace(g.C @ X @ g.C.T))
    if g.domain is TimeDomain.DISCRETE:
        val += float(np.trace(g.D @ g.D.T))
    return float(np.sqrt(max(val, 0.0)))

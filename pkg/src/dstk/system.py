"""Descriptor-system data model, validation, and the frequency-response oracle.

A system is the quadruple ``(A - lambda*E, B, C, D)`` over a time domain.
Its transfer-function matrix is evaluated throughout this package as

    ``G(lambda) = C (A - lambda E)^{-1} B + D``

and that evaluation is the verification oracle for every construction in
the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as sla

from . import kernels
from .exceptions import (
    DimensionMismatch,
    EvalAtPole,
    SingularPencil,
    SingularTransform,
)
from .kernels import EPS, as_matrix, probe_rng, rank_tol

__all__ = [
    "TimeDomain",
    "DescriptorSystem",
    "FrequencyResponse",
    "make_system",
    "eval_tfm",
    "frequency_response",
    "apply_similarity",
    "random_system",
]


class TimeDomain(Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


def _as_domain(domain) -> TimeDomain:
    if isinstance(domain, TimeDomain):
        return domain
    return TimeDomain(str(domain))


@dataclass(frozen=True)
class DescriptorSystem:
    """Real descriptor realization ``(A - lambda*E, B, C, D)``.

    The pencil ``A - lambda*E`` is regular (validated probabilistically at
    construction); ``n = 0`` is allowed and represents a static gain ``D``.
    Instances are immutable value objects and safe to share across threads.
    """

    A: np.ndarray
    E: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    domain: TimeDomain

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def is_standard(self) -> bool:
        """True when E is exactly the identity (fast-path flag)."""
        n = self.n
        return bool(np.array_equal(self.E, np.eye(n)))

    def __call__(self, lam) -> np.ndarray:
        return eval_tfm(self, lam)

    def __repr__(self) -> str:
        return f"DescriptorSystem(n={self.n}, m={self.m}, p={self.p}, {self.domain.value})"


@dataclass(frozen=True)
class FrequencyResponse:
    """A single frequency-response sample ``value = G(lam)``."""

    lam: complex
    value: np.ndarray


def _freeze(M: np.ndarray) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=float)
    M.setflags(write=False)
    return M


def _trusted_system(A, E, B, C, D, domain) -> DescriptorSystem:
    """Assemble without the regularity probe (regularity known by construction)."""
    return DescriptorSystem(_freeze(A), _freeze(E), _freeze(B), _freeze(C), _freeze(D), _as_domain(domain))


def make_system(A, E, B, C, D, domain, rng=None) -> DescriptorSystem:
    """Validate and build a descriptor system.

    ``E=None`` means the identity (a standard state-space system).  Dimension
    consistency is enforced and the pencil ``A - lambda*E`` is checked for
    regularity with random-shift probes (three attempts).

    Raises
    ------
    DimensionMismatch
        On inconsistent matrix sizes.
    SingularPencil
        When every regularity probe finds ``A - lambda*E`` rank deficient.
    """
    A = as_matrix(A, "A")
    E = np.eye(A.shape[0]) if E is None else as_matrix(E, "E")
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    D = as_matrix(D, "D")
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if E.shape != (n, n):
        raise DimensionMismatch(f"E must be {n}x{n}, got {E.shape}")
    m = B.shape[1]
    p = C.shape[0]
    if B.shape[0] != n:
        raise DimensionMismatch(f"B must have {n} rows, got {B.shape}")
    if C.shape[1] != n:
        raise DimensionMismatch(f"C must have {n} columns, got {C.shape}")
    if D.shape != (p, m):
        raise DimensionMismatch(f"D must be {p}x{m}, got {D.shape}")
    if n > 0 and not kernels.pencil_regular_probe(A, E, rng):
        raise SingularPencil("pencil A - lambda*E is numerically singular")
    return _trusted_system(A, E, B, C, D, domain)


def eval_tfm(sys: DescriptorSystem, lam) -> np.ndarray:
    """Evaluate ``G(lam) = C (A - lam E)^{-1} B + D`` at a complex point.

    This is the oracle against which all realization formulas are verified.
    Raises :class:`EvalAtPole` when ``A - lam E`` is numerically singular.
    """
    lam = complex(lam)
    if sys.n == 0:
        return sys.D.astype(complex)
    M = sys.A - lam * sys.E
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= 10 * sys.n * EPS * sv[0]:
        raise EvalAtPole(f"A - lambda*E is numerically singular at lambda={lam}")
    X = np.linalg.solve(M, sys.B.astype(complex))
    return sys.C @ X + sys.D


def frequency_response(sys: DescriptorSystem, lam) -> FrequencyResponse:
    return FrequencyResponse(complex(lam), eval_tfm(sys, lam))


def apply_similarity(sys: DescriptorSystem, U, V) -> DescriptorSystem:
    """Transform to ``(U(A - lambda E)V, UB, CV, D)``; the TFM is unchanged."""
    U = as_matrix(U, "U")
    V = as_matrix(V, "V")
    n = sys.n
    if U.shape != (n, n) or V.shape != (n, n):
        raise DimensionMismatch(f"U and V must be {n}x{n}")
    if rank_tol(U) < n or rank_tol(V) < n:
        raise SingularTransform("similarity transform is numerically singular")
    return _trusted_system(U @ sys.A @ V, U @ sys.E @ V, U @ sys.B, sys.C @ V, sys.D, sys.domain)


def spectral_scale(sys: DescriptorSystem) -> float:
    """Magnitude estimate of the finite spectrum, used to size probe circles."""
    if sys.n == 0:
        return 0.0
    try:
        vals = sla.eigvals(sys.A, sys.E)
        vals = vals[np.isfinite(vals)]
        if vals.size:
            return float(np.max(np.abs(vals)))
    except (np.linalg.LinAlgError, ValueError):
        pass
    ne = np.linalg.norm(sys.E)
    return float(min(np.linalg.norm(sys.A) / max(ne, 1e-12), 1e6))


def probe_points(sys: DescriptorSystem, count=5, rng=None):
    """Random complex probe points off the real axis, clear of the spectrum.

    Drawn uniformly in angle on a circle of radius one plus the spectral
    magnitude estimate; pole-adjacent draws are rejected and retried.
    """
    rng = probe_rng(rng)
    radius = 1.0 + spectral_scale(sys)
    pts = []
    guard = 0
    while len(pts) < count and guard < 20 * count + 20:
        guard += 1
        theta = rng.uniform(0.15, np.pi - 0.15)
        if rng.uniform() < 0.5:
            theta = -theta
        lam = radius * np.exp(1j * theta)
        if sys.n:
            M = sys.A - lam * sys.E
            sv = np.linalg.svd(M, compute_uv=False)
            if sv[-1] <= 1e-8 * max(sv[0], 1.0):
                continue
        pts.append(lam)
    return pts


def _random_orthogonal(n, rng):
    if n == 0:
        return np.eye(0)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q


def _well_conditioned(n, rng):
    """Random invertible matrix with singular values in [1/2, 2]."""
    if n == 0:
        return np.eye(0)
    return _random_orthogonal(n, rng) @ np.diag(np.exp(rng.uniform(-0.6, 0.6, n))) @ _random_orthogonal(n, rng)


def random_system(n, m, p, domain, proper=True, stable=False, rng=None) -> DescriptorSystem:
    """Generate a random valid descriptor system with the requested traits.

    ``proper=False`` plants a nilpotent-E block carrying an infinite
    elementary divisor of degree >= 2, so the result has at least one
    infinite pole (and is therefore not stable as a whole system;
    ``stable=True`` then constrains the finite dynamics only).
    """
    domain = _as_domain(domain)
    rng = probe_rng(rng) if rng is not None else np.random.default_rng()
    if min(n, m, p) < 0:
        raise ValueError("dimensions must be nonnegative")
    if not proper and n < 2:
        raise ValueError("an improper system needs n >= 2 for its nilpotent block")

    k = 0
    if not proper:
        k = 2 if n < 4 else int(rng.integers(2, 4))
    nf = n - k

    Af = rng.normal(size=(nf, nf))
    if nf:
        if domain is TimeDomain.CONTINUOUS:
            if stable:
                shift = max(np.real(np.linalg.eigvals(Af)).max(), 0.0) + rng.uniform(0.2, 1.0)
                Af = Af - shift * np.eye(nf)
        else:
            rho = max(np.abs(np.linalg.eigvals(Af)).max(), 1e-6)
            target = rng.uniform(0.2, 0.85) if stable else rng.uniform(0.5, 1.6)
            Af = Af * (target / rho)
    Ef = np.eye(nf)

    if k:
        # single nilpotent chain: pencil I - lambda*J carries one degree-k divisor
        J = np.zeros((k, k))
        for i in range(k - 1):
            J[i, i + 1] = 1.0
        A = np.block([[Af, np.zeros((nf, k))], [np.zeros((k, nf)), np.eye(k)]])
        E = np.block([[Ef, np.zeros((nf, k))], [np.zeros((k, nf)), J]])
    else:
        A, E = Af, Ef

    B = rng.normal(size=(n, m))
    C = rng.normal(size=(p, n))
    D = rng.normal(size=(p, m))
    sys = _trusted_system(A, E, B, C, D, domain)

    if n:
        if proper and rng.uniform() < 0.35:
            Q = _random_orthogonal(n, rng)
            sys = apply_similarity(sys, Q.T, Q)  # keeps E = I
        else:
            sys = apply_similarity(sys, _well_conditioned(n, rng), _well_conditioned(n, rng))
    return sys

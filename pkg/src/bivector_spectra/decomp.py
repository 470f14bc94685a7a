"""Outer trigonometry and the invariant decomposition of a bivector.

Three constructions produce the commuting simple parts ``b_j``:

* ``outer_tangent``: ``b = mu * tan^(B / mu)`` for a non-repeated eigenvalue
  pair, valid whenever the outer cosine of ``B / mu`` is invertible;
* ``eigen_pairing``: ``b = mu * (v+ ^ v-) / (v+ . v-)`` from paired
  eigenvectors of the adjoint action, which also covers repeated
  eigenvalues (isoclinic bivectors);
* ``null_limit``: ``W_k W_{k-1}^-1``, the part belonging to a zero eigenvalue
  of a pseudo-null bivector.

Parts for a repeated eigenvalue are not unique; only their sum over the
eigenvalue class is.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import oracle
from .algebra import (DEFAULT_TOL, Multivector, Tolerance, commutator, dot,
                      grade_select, metric_dot, mv_inverse, reverse, wedge)
from .errors import (ConsistencyError, GradeError, JordanesqueError, NonInvertible,
                     NumericalFailure, RequiresEigenPairing, Unsupported)
from .spectral import SpectralData, WLadder, spectrum, w_ladder

OUTER_TANGENT = "outer_tangent"
EIGEN_PAIRING = "eigen_pairing"
NULL_LIMIT = "null_limit"

# imaginary residue allowed on a part before it is stripped
REAL_RTOL = 1e-8
VERIFY_RTOL = 1e-9
EIGENSPACE_RTOL = 1e-8
PAIRING_ATOL = 1e-8


@dataclass(frozen=True)
class SimpleBivector:
    b: Multivector
    mu: complex
    method: str

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.b.coeffs.imag == 0))


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[SimpleBivector, ...]
    residual: float
    spectral: SpectralData | None = None

    def total(self) -> Multivector:
        out = Multivector.zero(self.parts[0].b.sig) if self.parts else None
        for p in self.parts:
            out = out + p.b
        return out

    @property
    def methods(self) -> list[str]:
        return [p.method for p in self.parts]


@dataclass(frozen=True)
class EigenPair:
    v_plus: Multivector
    v_minus: Multivector
    mu: complex
    pairing_value: complex


# -- outer trigonometry -------------------------------------------------

def _parity_sum(ladder: WLadder, parity: int) -> Multivector:
    out = Multivector.zero(ladder.W[0].sig)
    for j, Wj in enumerate(ladder.W):
        if j % 2 == parity:
            out = out + Wj
    return out


def outer_cos(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``(Lambda^B + Lambda^-B) / 2``: the even wedge powers (grades 0 mod 4)."""
    return _parity_sum(w_ladder(B, tol), 0)


def outer_sin(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``(Lambda^B - Lambda^-B) / 2``: the odd wedge powers (grades 2 mod 4)."""
    return _parity_sum(w_ladder(B, tol), 1)


def outer_tan(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``sin^(B) cos^(B)^-1``.

    Raises :class:`NonInvertible` when the outer cosine is a zero divisor,
    which happens for repeated eigenvalues; the eigenvector-pairing
    construction is the way around it.
    """
    ladder = w_ladder(B, tol)
    cos = _parity_sum(ladder, 0)
    sin = _parity_sum(ladder, 1)
    try:
        inv = mv_inverse(cos, tol)
    except NonInvertible as exc:
        raise NonInvertible(f"outer cosine is not invertible ({exc}); "
                            f"use eigenvector pairing instead",
                            residual=exc.residual, condition=exc.condition) from exc
    return sin * inv


def outer_power(X: Multivector, m: int) -> Multivector:
    """``X ^ X ^ ... ^ X`` (m factors)."""
    out = Multivector.scalar(X.sig, 1.0)
    for _ in range(m):
        out = wedge(out, X)
    return out


# -- helpers ------------------------------------------------------------

def _lam_is_real(mu: complex) -> bool:
    lam = mu * mu
    return abs(lam.imag) <= 1e-12 * max(abs(lam), 1e-300)


def _realify(b: Multivector, mu: complex, what: str) -> Multivector:
    """Strip the imaginary part after checking it is round-off (real ``mu^2`` only)."""
    if not _lam_is_real(mu):
        return b
    scale = max(b.max_abs(), 1e-300)
    if np.max(np.abs(b.coeffs.imag)) > REAL_RTOL * scale:
        raise NumericalFailure(f"{what} for mu={mu} has a non-negligible imaginary part")
    return b.real


def _as_bivector(x: Multivector, what: str) -> Multivector:
    scale = max(x.max_abs(), 1e-300)
    rest = x - grade_select(x, 2)
    if rest.max_abs() > VERIFY_RTOL * scale * 10:
        raise ConsistencyError(f"{what} is not a pure bivector (grades {sorted(x.grades_present)})")
    return grade_select(x, 2)


# -- tangent route --------------------------------------------------------

def tangent_part(B: Multivector, mu: complex, tol: Tolerance = DEFAULT_TOL) -> SimpleBivector:
    t = outer_tan(B * (1.0 / mu), tol)
    b = _as_bivector(t * mu, "outer tangent part")
    return SimpleBivector(_realify(b, mu, "outer tangent part"), mu, OUTER_TANGENT)


def null_limit_part(ladder: WLadder, tol: Tolerance = DEFAULT_TOL) -> SimpleBivector:
    """Zero-eigenvalue part ``W_k W_{k-1}^-1`` of a pseudo-null bivector."""
    k = ladder.k
    if k == 0:
        raise Unsupported("zero bivector has no null part")
    try:
        inv = mv_inverse(ladder.W[k - 1], tol)
    except NonInvertible as exc:
        raise Unsupported("W_{k-1} is not invertible; the null part cannot be "
                          "isolated by the limit quotient") from exc
    b = _as_bivector(ladder.W[k] * inv, "null-limit part")
    B = ladder.W[1]
    scale = max(b.max_abs() * B.max_abs(), 1e-300)
    if not commutator(B, b).is_zero(tol, scale * 1e2):
        raise ConsistencyError("null-limit part does not commute with B")
    return SimpleBivector(b.real if b.is_real(tol) else b, 0j, NULL_LIMIT)


def decompose_tangent(B: Multivector, spec: SpectralData | None = None,
                      tol: Tolerance = DEFAULT_TOL) -> Decomposition:
    """Decompose with the outer-tangent formula only.

    Raises :class:`RequiresEigenPairing` for repeated eigenvalues or a
    non-invertible outer cosine.
    """
    if spec is None:
        spec = spectrum(B, tol)
    parts = []
    for mu, m in spec.pairs:
        if mu == 0:
            continue
        if m > 1:
            try:
                outer_tan(B * (1.0 / mu), tol)
            except NonInvertible as exc:
                raise RequiresEigenPairing(
                    f"eigenvalue {mu} has multiplicity {m}: outer cosine of B/mu "
                    f"is a zero divisor") from exc
            raise RequiresEigenPairing(f"eigenvalue {mu} has multiplicity {m}")
        try:
            parts.append(tangent_part(B, mu, tol))
        except NonInvertible as exc:
            raise RequiresEigenPairing(str(exc)) from exc
    if spec.is_pseudo_null:
        parts.append(null_limit_part(spec.ladder, tol))
    return _finish(B, parts, spec, tol)


# -- eigenvector route ------------------------------------------------------

def _eigenspace(A: np.ndarray, mu: complex) -> list[np.ndarray]:
    n = A.shape[0]
    scale = max(np.linalg.norm(A, 2), abs(mu), 1e-300)
    if mu.imag == 0 and not np.iscomplexobj(A):
        M = A - mu.real * np.eye(n)
    else:
        M = A - mu * np.eye(n)
    _, s, vh = np.linalg.svd(M)
    null = [vh[i].conj() for i in range(n) if s[i] <= EIGENSPACE_RTOL * scale]
    return null


def _jordanesque(spec, counts, why):
    return JordanesqueError(why, spectrum=list(spec.pairs), eigenvector_counts=counts)


def _greedy_pairs(sig, P, Q, mu):
    """Pivoted pairing: largest |v+ . v-| first, then deflate both sides."""
    out = []
    P = list(P)
    Q = list(Q)
    while P:
        G = np.array([[metric_dot(sig, p, q) for q in Q] for p in P])
        a, b = np.unravel_index(int(np.argmax(np.abs(G))), G.shape)
        g = G[a, b]
        if abs(g) <= PAIRING_ATOL:
            return None
        vp, vm = P.pop(a), Q.pop(b)
        out.append((vp, vm, g))
        P = [w - (metric_dot(sig, w, vm) / g) * vp for w in P]
        Q = [u - (metric_dot(sig, u, vp) / g) * vm for u in Q]
        P = [w / np.linalg.norm(w) for w in P]
        Q = [u / np.linalg.norm(u) for u in Q]
    return out


def _conjugate_pairs(sig, P, mu):
    """For imaginary ``mu`` on a real bivector: ``v- = conj(v+)``.

    The Hermitian pairing form on the ``+mu`` eigenspace is diagonalised so
    that distinct pairs are mutually orthogonal and every part is real.
    """
    G = np.array([[metric_dot(sig, p, q.conj()) for q in P] for p in P])
    G = 0.5 * (G + G.conj().T)
    _, U = np.linalg.eigh(G)
    basis = np.array(P).T @ U.conj()
    out = []
    for c in range(basis.shape[1]):
        u = basis[:, c] / np.linalg.norm(basis[:, c])
        g = metric_dot(sig, u, u.conj())
        if abs(g) <= PAIRING_ATOL:
            return None
        out.append((u, u.conj(), g))
    return out


def eigen_pairs(B: Multivector, spec: SpectralData | None = None,
                tol: Tolerance = DEFAULT_TOL, only=None) -> list[EigenPair]:
    """Eigenvectors for ``+mu`` and ``-mu`` paired so that ``v+ . v- != 0``.

    ``only`` restricts the work to one eigenvalue representative.
    Raises :class:`JordanesqueError` when an eigenvalue class lacks
    eigenvectors or no valid pairing exists.
    """
    if spec is None:
        spec = spectrum(B, tol)
    sig = B.sig
    A = oracle.adjoint_matrix(B)
    real_input = not np.iscomplexobj(A)
    result = []
    counts = {}
    for mu, m in spec.pairs:
        if mu == 0 or (only is not None and mu != only):
            continue
        P = _eigenspace(A, mu)
        Q = _eigenspace(A, -mu)
        counts[complex(mu)] = (len(P), len(Q), m)
        if len(P) < m or len(Q) < m:
            raise _jordanesque(spec, counts,
                               f"eigenvalue pair +-{mu} has algebraic multiplicity {m} "
                               f"but only {len(P)}/{len(Q)} eigenvectors")
        if len(P) > m or len(Q) > m:
            raise NumericalFailure(f"too many eigenvectors for +-{mu}")
        imaginary = real_input and mu.real == 0
        found = _conjugate_pairs(sig, P, mu) if imaginary else _greedy_pairs(sig, P, Q, mu)
        if found is None:
            raise _jordanesque(spec, counts,
                               f"eigenvectors for +-{mu} cannot be paired "
                               f"(all pairings v+ . v- vanish)")
        for vp, vm, g in found:
            result.append(EigenPair(Multivector.vector(sig, vp),
                                    Multivector.vector(sig, vm), mu, g))
    return result


def beta_from_pair(pair: EigenPair, B: Multivector | None = None,
                   tol: Tolerance = DEFAULT_TOL) -> SimpleBivector:
    """``mu * beta`` with ``beta = (v+ ^ v-) / (v+ . v-)``, ``beta^2 = 1``."""
    beta = wedge(pair.v_plus, pair.v_minus) * (1.0 / pair.pairing_value)
    sq = beta * beta
    if not (sq - 1.0).is_zero(tol, max(beta.norm() ** 2, 1.0) * 1e2):
        raise ConsistencyError("beta does not square to 1")
    for v, s in ((pair.v_plus, 1.0), (pair.v_minus, -1.0)):
        if not (dot(beta, v) - v * s).is_zero(tol, beta.norm() * v.norm() * 1e2):
            raise ConsistencyError("paired eigenvector is not a +-1 eigenvector of beta")
    b = beta * pair.mu
    return SimpleBivector(_realify(b, pair.mu, "paired part"), pair.mu, EIGEN_PAIRING)


# -- dispatcher -------------------------------------------------------------

def _finish(B, parts, spec, tol) -> Decomposition:
    sig = B.sig
    total = Multivector.zero(sig)
    for p in parts:
        total = total + p.b
    scale = max(B.max_abs(), 1e-300)
    residual = (B - total).max_abs()
    if residual > VERIFY_RTOL * scale:
        raise ConsistencyError(f"parts do not sum to B (residual {residual:.3g})")
    for p in parts:
        sq = p.b * p.b
        if not tol.is_zero(sq.coeffs[1:], max(p.b.norm() ** 2, 1e-300) * 10):
            raise ConsistencyError(f"part {p.b} is not simple")
    for p, r in itertools.combinations(parts, 2):
        c = commutator(p.b, r.b)
        if c.max_abs() > VERIFY_RTOL * max(p.b.norm() * r.b.norm(), 1e-300):
            raise ConsistencyError("decomposition parts do not commute")
    nonzero = [p for p in parts if p.b.max_abs() > VERIFY_RTOL * scale]
    if len(nonzero) > sig.n // 2:
        raise ConsistencyError("more parts than n/2")
    return Decomposition(tuple(parts), float(residual), spec)


def decompose(B: Multivector, tol: Tolerance = DEFAULT_TOL,
              spec: SpectralData | None = None) -> Decomposition:
    """Invariant decomposition into commuting simple bivectors.

    Each non-repeated eigenvalue pair uses the outer tangent; repeated pairs,
    or pairs whose outer cosine is a zero divisor, fall back to eigenvector
    pairing. A zero eigenvalue contributes the null-limit part. Every part
    records which construction produced it.
    """
    if not B.is_bivector(tol):
        raise GradeError("decompose() expects a bivector")
    if spec is None:
        spec = spectrum(B, tol)
    parts: list[SimpleBivector] = []
    for mu, m in spec.pairs:
        if mu == 0:
            if m > 1:
                raise Unsupported("zero eigenvalue with multiplicity > 1: the null "
                                  "part is not a single simple bivector")
            continue
        if m == 1:
            try:
                parts.append(tangent_part(B, mu, tol))
                continue
            except NonInvertible:
                pass
        for pair in eigen_pairs(B, spec, tol, only=mu):
            parts.append(beta_from_pair(pair, B, tol))
    if spec.is_pseudo_null:
        parts.append(null_limit_part(spec.ladder, tol))
    return _finish(B, parts, spec, tol)

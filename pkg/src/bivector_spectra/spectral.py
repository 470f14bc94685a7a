"""Wedge powers, outer exponential and the spectrum of a bivector.

For a bivector ``B`` the normalised wedge powers ``W_j = B^{^j} / j!`` stop at
the effective half-dimension ``k``. The scalars ``<W_j^2>_0`` are the
elementary symmetric polynomials of the squared eigenvalues of ``v -> B x v``,
so the spectrum follows from a degree-``k`` polynomial in ``lam = mu^2``
instead of an ``n x n`` eigenproblem.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace

import numpy as np

from . import oracle
from .algebra import DEFAULT_TOL, Multivector, Tolerance, grade_select, reverse, wedge
from .errors import ConsistencyError, GradeError, NumericalFailure

CLUSTER_TOL = 1e-7
ROOT_RESIDUAL_RTOL = 1e-8
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class WLadder:
    W: tuple[Multivector, ...]
    k: int
    Wk_squared: complex

    @property
    def effective_dimension(self) -> int:
        return 2 * self.k

    @property
    def pseudoscalar(self) -> Multivector:
        return self.W[self.k]


@dataclass(frozen=True)
class CharPoly:
    """``c[j] = <W_j^2>_0`` for ``j = 0..k`` (``c[0] = 1``).

    ``Q_k(lam) = sum_j (-1)^j c_j lam^(k-j)`` and ``P_2k(mu) = Q_k(mu^2)``.
    """

    c: np.ndarray

    @property
    def k(self) -> int:
        return len(self.c) - 1

    @property
    def q(self) -> np.ndarray:
        """Coefficients of ``Q_k`` in descending powers of ``lam``."""
        signs = (-1.0) ** np.arange(self.k + 1)
        return signs * self.c

    @property
    def p(self) -> np.ndarray:
        """Coefficients of ``P_2k`` in descending powers of ``mu``."""
        out = np.zeros(2 * self.k + 1, dtype=self.c.dtype)
        out[::2] = self.q
        return out

    def __call__(self, mu):
        return np.polyval(self.q, mu * mu)


@dataclass(frozen=True)
class SpectralData:
    ladder: WLadder
    charpoly: CharPoly
    pairs: tuple[tuple[complex, int], ...]
    is_pseudo_null: bool

    @property
    def k(self) -> int:
        return self.ladder.k

    @property
    def effective_dimension(self) -> int:
        return 2 * self.ladder.k

    @property
    def q_coeffs(self) -> np.ndarray:
        return self.charpoly.q

    def eigenvalues(self) -> list[complex]:
        """Full multiset ``{+mu_j, -mu_j}`` with multiplicities."""
        out = []
        for mu, m in self.pairs:
            out.extend([mu] * m + [-mu] * m)
        return out

    def negated(self) -> "SpectralData":
        """Same spectrum with the opposite representative of every pair."""
        return replace(self, pairs=tuple((-mu, m) for mu, m in self.pairs))


def _require_bivector(B: Multivector, tol: Tolerance):
    if not B.is_bivector(tol):
        raise GradeError(f"expected a bivector, got grades {sorted(B.grades_present)}")


def w_ladder(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> WLadder:
    """``[W_0 = 1, W_1 = B, ..., W_k]`` with ``W_{k+1}`` numerically zero."""
    _require_bivector(B, tol)
    sig = B.sig
    B = grade_select(B, 2)
    b = B.max_abs()
    W = [Multivector.scalar(sig, 1.0)]
    if b == 0:
        return WLadder((W[0],), 0, 1.0 + 0j)
    j = 1
    while True:
        nxt = wedge(W[-1], B) * (1.0 / j)
        if nxt.is_zero(tol, b ** j):
            break
        W.append(nxt)
        j += 1
    k = len(W) - 1
    Wk = W[k]
    sq = Wk * Wk
    scale = Wk.norm() ** 2
    if not tol.is_zero(sq.coeffs[1:], scale):
        raise ConsistencyError("square of the effective pseudoscalar is not scalar")
    return WLadder(tuple(W), k, sq.scalar_part)


def outer_exp(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """Outer exponential: the finite sum of the wedge ladder."""
    out = Multivector.zero(B.sig)
    for Wj in w_ladder(B, tol).W:
        out = out + Wj
    return out


def outer_norm_sq(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> complex:
    """``Lambda^B Lambda^-B``, asserted to be a scalar."""
    plus = outer_exp(B, tol)
    minus = outer_exp(-B, tol)
    prod = plus * minus
    scale = max(plus.norm() * minus.norm(), 1.0)
    if not tol.is_zero(prod.coeffs[1:], scale):
        raise ConsistencyError("outer exponential norm has a non-scalar residue")
    return prod.scalar_part


def m_operator(ladder: WLadder, mu: complex) -> Multivector:
    """``M_mu = sum_j (-mu)^(k-j) W_j``."""
    out = Multivector.zero(ladder.W[0].sig)
    for j, Wj in enumerate(ladder.W):
        out = out + Wj * ((-mu) ** (ladder.k - j))
    return out


def char_poly(B: Multivector, tol: Tolerance = DEFAULT_TOL,
              ladder: WLadder | None = None) -> CharPoly:
    """Characteristic polynomial coefficients ``<W_j^2>_0``.

    Cross-checked against the directly expanded scalar ``M_mu ~M_mu`` at a
    few sample points.
    """
    if ladder is None:
        ladder = w_ladder(B, tol)
    c = np.array([(Wj * Wj).scalar_part for Wj in ladder.W], dtype=np.complex128)
    if B.is_real(tol):
        scale = np.maximum(np.abs(c), 1.0)
        if np.any(np.abs(c.imag) > tol.rel_eps * scale * 1e2):
            raise ConsistencyError("characteristic coefficients are not real")
        c = c.real.copy()
    cp = CharPoly(c)
    rho = max(B.max_abs(), 1e-300)
    for t in (0.37 + 0.21j, 1.3, 2.1j):
        mu = t * rho
        M = m_operator(ladder, mu)
        direct = M * reverse(M)
        expect = cp(mu)
        scale = max(M.norm() ** 2, 1e-300)
        if not tol.is_zero(direct.coeffs[1:], scale * 1e2) or \
                abs(direct.scalar_part - expect) > 1e2 * tol.threshold(scale):
            raise ConsistencyError("M_mu ~M_mu disagrees with the wedge-ladder polynomial")
    return cp


def _branch(mu: complex, tol: float) -> complex:
    """Representative of ``+-mu`` with Im >= 0, ties broken by Re >= 0."""
    scale = max(abs(mu), 1e-300)
    if abs(mu.imag) <= tol * scale:
        mu = complex(mu.real, 0.0)
        return -mu if mu.real < 0 else mu
    if abs(mu.real) <= tol * scale:
        mu = complex(0.0, mu.imag)
    return -mu if mu.imag < 0 else mu


def _merge_threshold(size: int, cluster_tol: float) -> float:
    return max(cluster_tol, 10.0 * _EPS ** (1.0 / size))


def _partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _cluster(roots: np.ndarray, rho: float, cluster_tol: float) -> list[list[complex]]:
    """Coarsest grouping of roots where a group of size m spreads by at most
    ~eps^(1/m) (the perturbation of an m-fold root). Degree is at most 6, so
    all set partitions are enumerated.
    """
    roots = [complex(r) for r in roots]
    best = None
    for part in _partitions(roots):
        worst = 0.0
        for g in part:
            spread = max(abs(x - y) for x in g for y in g)
            ratio = spread / (_merge_threshold(len(g), cluster_tol) * rho)
            worst = max(worst, ratio)
        if worst > 1.0:
            continue
        key = (len(part), worst)
        if best is None or key < best[0]:
            best = (key, part)
    return best[1] if best else [[r] for r in roots]


def spectrum(B: Multivector, tol: Tolerance = DEFAULT_TOL,
             cluster_tol: float = CLUSTER_TOL, cross_check: bool = True) -> SpectralData:
    """Eigenvalue pairs ``(mu_j, multiplicity)`` of ``v -> B x v``.

    Roots of ``Q_k`` come from the companion matrix (``numpy.roots``) with
    one Newton step for simple roots; clustered roots are replaced by their
    centroid. ``B`` must be real.
    """
    _require_bivector(B, tol)
    if not B.is_real(tol):
        raise GradeError("spectrum() requires a real bivector")
    B = grade_select(B.real, 2)
    ladder = w_ladder(B, tol)
    cp = char_poly(B, tol, ladder)
    k = ladder.k
    pseudo_null = k > 0 and tol.is_zero(ladder.Wk_squared,
                                        ladder.pseudoscalar.norm() ** 2)
    if k == 0:
        return SpectralData(ladder, cp, (), False)
    c = cp.c.copy()
    if pseudo_null:
        c[k] = 0.0
    q = CharPoly(c).q
    roots = np.roots(q) if k > 0 else np.array([])
    roots = np.concatenate([roots, np.zeros(k - len(roots))])
    rho = max(float(np.max(np.abs(roots))), 1e-300)
    dq = np.polyder(q)

    groups = _cluster(roots, rho, cluster_tol)
    lambdas = []
    for g in groups:
        lam = complex(np.mean(g))
        if len(g) == 1 and lam != 0:
            d = np.polyval(dq, lam)
            if abs(d) > 0:
                step = np.polyval(q, lam) / d
                if abs(step) < 1e-6 * rho:
                    lam = lam - step
        thresh = _merge_threshold(len(g), cluster_tol)
        if abs(lam.imag) <= thresh * rho:
            lam = complex(lam.real, 0.0)
        scale = float(np.sum(np.abs(q) * np.abs(lam) ** np.arange(k, -1, -1)))
        if abs(np.polyval(q, lam)) > ROOT_RESIDUAL_RTOL * max(scale, 1e-300):
            raise NumericalFailure(f"root {lam} of the characteristic polynomial "
                                   f"does not converge (residual too large)")
        lambdas.append((lam, len(g)))

    pairs = []
    for lam, m in lambdas:
        mu = _branch(cmath.sqrt(lam), _merge_threshold(m, cluster_tol))
        pairs.append((mu, m))
    pairs.sort(key=lambda t: (round(abs(t[0]) / (rho ** 0.5), 9), cmath.phase(t[0])))

    if pseudo_null != any(mu == 0 for mu, _ in pairs):
        raise ConsistencyError("pseudo-null flag disagrees with the zero eigenvalue")
    data = SpectralData(ladder, cp, tuple(pairs), pseudo_null)
    if cross_check:
        _cross_check(B, data, rho ** 0.5)
    return data


def _cross_check(B: Multivector, data: SpectralData, radius: float):
    """Compare non-zero pairs against eigenvalues of the adjoint matrix."""
    values = list(np.linalg.eigvals(oracle.adjoint_matrix(B)))
    for mu, m in data.pairs:
        if mu == 0:
            continue
        rtol = max(1e-6, 100 * _EPS ** (1.0 / m))
        for target in [mu] * m + [-mu] * m:
            dist = [abs(v - target) for v in values]
            i = int(np.argmin(dist))
            if dist[i] > rtol * max(radius, 1e-300):
                raise NumericalFailure(f"eigenvalue {target} not found in the adjoint "
                                       f"matrix spectrum (nearest off by {dist[i]:.3g})")
            values.pop(i)


def elementary_symmetric(xs) -> list[complex]:
    """``[e_0, e_1, ..., e_len]`` of the given numbers."""
    e = [1.0 + 0j]
    for x in xs:
        e = [a + x * b for a, b in zip(e + [0], [0] + e)]
    return e

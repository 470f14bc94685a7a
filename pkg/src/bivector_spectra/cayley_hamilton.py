"""Cayley-Hamilton identities for the adjoint map ``f(v) = B x v``.

Two identities are checked numerically:

* the factored form ``M_f(v) = sum_j (-1)^j W_j f^(k-j)(v) = 0`` with
  geometric products, which mixes grades 1, 3, ...;
* the scalar form ``sum_j (-1)^j <W_j^2>_0 f^(2(k-j))(v) = 0``.

Both hold on the image of ``f``. For ``v`` in the kernel of ``f`` every
term with a positive power of ``f`` drops out and ``M_f(v) = (-1)^k W_k v``,
which is nonzero unless ``B`` is pseudo-null; see :func:`kernel_residual`.

The simplicial derivative ``d_(r) f_(r)`` is also provided: its grade-``2j``
part is ``(-2)^j W_j`` and its scalar parts are ``(-1)^j <W_j^2>_0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .algebra import (DEFAULT_TOL, Multivector, Signature, Tolerance, commutator,
                      grade_select, wedge_all)
from .errors import GradeError, Unsupported
from .spectral import WLadder, char_poly, w_ladder


@dataclass
class AdjointPowers:
    """Cache of ``f^a(v)`` for one bivector and probe vector."""

    B: Multivector
    v: Multivector
    powers: list = field(default_factory=list)

    def __post_init__(self):
        if not self.v.is_grade(1):
            raise GradeError("probe must be a vector")
        if not self.powers:
            self.powers.append(self.v)

    def __getitem__(self, a: int) -> Multivector:
        while len(self.powers) <= a:
            self.powers.append(commutator(self.B, self.powers[-1]))
        return self.powers[a]


def factored_ch(B: Multivector, v: Multivector, ladder: WLadder | None = None,
                tol: Tolerance = DEFAULT_TOL) -> tuple[Multivector, float]:
    """``M_f(v)`` and a magnitude scale (sum of term norms)."""
    if ladder is None:
        ladder = w_ladder(B, tol)
    k = ladder.k
    fp = AdjointPowers(B, v)
    total = Multivector.zero(B.sig)
    scale = 0.0
    for j, Wj in enumerate(ladder.W):
        term = Wj * fp[k - j] * ((-1) ** j)
        total = total + term
        scale += Wj.norm() * fp[k - j].norm()
    return total, scale


def check_factored_ch(B: Multivector, v: Multivector, tol: Tolerance = DEFAULT_TOL) -> float:
    """Relative residual ``|M_f(v)| / scale``."""
    M, scale = factored_ch(B, v, tol=tol)
    return M.norm() / scale if scale > 0 else 0.0


def scalar_ch(B: Multivector, v: Multivector, tol: Tolerance = DEFAULT_TOL):
    """``sum_j (-1)^j c_j f^(2(k-j))(v)`` and its magnitude scale."""
    ladder = w_ladder(B, tol)
    c = char_poly(B, tol, ladder).c
    k = ladder.k
    fp = AdjointPowers(B, v)
    total = Multivector.zero(B.sig)
    scale = 0.0
    for j in range(k + 1):
        term = fp[2 * (k - j)] * (((-1) ** j) * c[j])
        total = total + term
        scale += abs(c[j]) * fp[2 * (k - j)].norm()
    return total, scale


def check_scalar_ch(B: Multivector, v: Multivector, tol: Tolerance = DEFAULT_TOL) -> float:
    """Relative residual of the scalar identity on ``v``."""
    R, scale = scalar_ch(B, v, tol)
    return R.norm() / scale if scale > 0 else 0.0


def kernel_residual(B: Multivector, v: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """Predicted ``M_f(v)`` for ``v`` with ``f(v) = 0``: ``(-1)^k W_k v``."""
    ladder = w_ladder(B, tol)
    return ladder.W[ladder.k] * v * ((-1) ** ladder.k)


# -- simplicial derivative ----------------------------------------------

def _require_nondegenerate(sig: Signature):
    if sig.r > 0:
        raise Unsupported("the simplicial derivative needs a reciprocal frame; "
                          "degenerate signatures have none")


def _frame(sig: Signature):
    e = [Multivector.basis_vector(sig, i) for i in range(sig.n)]
    recip = [e[i] * float(s) for i, s in enumerate(sig.squares)]
    return e, recip


def _simplicial(B: Multivector, r: int, exhaustive: bool):
    sig = B.sig
    _require_nondegenerate(sig)
    if r < 0:
        raise ValueError("order must be non-negative")
    if r == 0:
        return Multivector.scalar(sig, 1.0), 1.0
    e, recip = _frame(sig)
    fe = [commutator(B, x) for x in e]
    fn = [x.norm() for x in fe]
    total = Multivector.zero(sig)
    scale = 0.0
    tuples = (itertools.product(range(sig.n), repeat=r) if exhaustive
              else itertools.combinations(range(sig.n), r))
    for idx in tuples:
        if len(set(idx)) < r:
            continue
        left = wedge_all([recip[a] for a in reversed(idx)], sig)
        right = wedge_all([fe[a] for a in idx], sig)
        total = total + left * right
        # magnitude before cancellation inside the wedge
        scale += math.prod(fn[a] for a in idx)
    if exhaustive:
        f = 1.0 / math.factorial(r)
        total, scale = total * f, scale * f
    return total, max(scale, 1e-300)


def simplicial_derivative(B: Multivector, r: int, exhaustive: bool = False) -> Multivector:
    """``d_(r) f_(r) = (1/r!) sum (e^{a_r} ^ ... ^ e^{a_1}) (f(e_{a_1}) ^ ... ^ f(e_{a_r}))``.

    Both wedge factors are antisymmetric in the indices, so the sum over
    ordered tuples equals ``r!`` times the sum over increasing tuples; the
    default uses the latter. ``exhaustive=True`` runs the literal sum over
    all ``n^r`` tuples. Raises :class:`Unsupported` for degenerate metrics.
    """
    return _simplicial(B, r, exhaustive)[0]


def simplicial_with_scale(B: Multivector, r: int) -> tuple[Multivector, float]:
    """``d_(r) f_(r)`` and ``sum prod |f(e_a)|`` over the index tuples, an
    error scale that survives cancellation inside the wedges."""
    return _simplicial(B, r, False)


def simplicial_all_orders(B: Multivector) -> list[tuple[Multivector, float]]:
    """``[(d_(r) f_(r), scale) for r = 0..n]`` in one pass over all subsets.

    Increasing index tuples are enumerated depth first, so each wedge is one
    product away from its parent's.
    """
    sig = B.sig
    _require_nondegenerate(sig)
    e, recip = _frame(sig)
    fe = [commutator(B, x) for x in e]
    fn = [x.norm() for x in fe]
    totals = [Multivector.zero(sig) for _ in range(sig.n + 1)]
    scales = [0.0] * (sig.n + 1)
    one = Multivector.scalar(sig, 1.0)
    stack = [(0, one, one, 1.0, 0)]
    while stack:
        start, left, right, mag, r = stack.pop()
        totals[r] = totals[r] + left * right
        scales[r] += mag
        for a in range(start, sig.n):
            stack.append((a + 1, recip[a] ^ left, right ^ fe[a], mag * fn[a], r + 1))
    return [(t, max(sc, 1e-300)) for t, sc in zip(totals, scales)]


def simplicial_coeffs(B: Multivector, j: int, exhaustive: bool = False) -> complex:
    """Scalar part of ``d_(j) f_(j)``."""
    return simplicial_derivative(B, j, exhaustive).scalar_part


def simplicial_top_grade(B: Multivector, j: int) -> Multivector:
    """Grade-``2j`` part of ``d_(j) f_(j)``; equals ``(-2)^j W_j``."""
    return grade_select(simplicial_derivative(B, j), 2 * j)


# -- 4D matrix example -----------------------------------------------------

def _trivector_basis(sig: Signature):
    """(mask, sign) of each of e4 I, e3 I, e2 I, e1 I with I = e1234."""
    I = Multivector.blade(sig, 0b1111)
    out = []
    for i in (3, 2, 1, 0):
        t = Multivector.basis_vector(sig, i) * I
        mask = int(np.flatnonzero(t.coeffs)[0])
        out.append((mask, float(t.coeffs[mask].real)))
    return out


@dataclass(frozen=True)
class MatrixPair:
    """Matrices of ``v -> v x B`` (``A``) and ``v -> (B ^ B / 2) v`` (``T``).

    ``A`` uses the textbook layout in which column ``j`` lists ``-f(e_j)``
    (equivalently the transpose of :func:`oracle.adjoint_matrix` in
    Euclidean signature), and ``T`` maps vector coordinates to coordinates on
    the trivector basis ``(e4 I, e3 I, e2 I, e1 I)``.
    """

    A: np.ndarray
    T: np.ndarray
    B: Multivector

    def trivector_coords(self, X: Multivector) -> np.ndarray:
        basis = _trivector_basis(self.B.sig)
        return np.array([X.coeffs[m].real * s for m, s in basis])

    def block_residual(self, v: np.ndarray) -> float:
        """Norm of ``[A^2; 0] v - [A^2; T] v + [0; T] v`` evaluated with the
        geometric-algebra values of each block, i.e. ``M_f(v)`` in matrix form.
        """
        sig = self.B.sig
        vv = Multivector.vector(sig, v)
        fv = commutator(self.B, vv)
        ffv = commutator(self.B, fv)
        Bfv = self.B * fv
        ladder = w_ladder(self.B)
        W2 = ladder.W[2] if ladder.k >= 2 else Multivector.zero(sig)
        W2v = W2 * vv
        checks = [
            np.linalg.norm(ffv.vector_coords().real - self.A @ self.A @ v),
            np.linalg.norm(grade_select(Bfv, 1).vector_coords().real - self.A @ self.A @ v),
            np.linalg.norm(self.trivector_coords(grade_select(Bfv, 3)) - self.T @ v),
            np.linalg.norm(self.trivector_coords(W2v) - self.T @ v),
        ]
        u = self.A @ self.A @ v - self.A @ self.A @ v
        tau = -self.T @ v + self.T @ v
        return float(max(checks + [np.linalg.norm(u), np.linalg.norm(tau)]))


def pfaffian_4d(B: Multivector) -> float:
    """``B12 B34 - B13 B24 + B14 B23``."""
    c = B.coeffs.real
    return float(c[0b0011] * c[0b1100] - c[0b0101] * c[0b1010] + c[0b1001] * c[0b0110])


def adjoint_and_trivector_matrices(B: Multivector) -> MatrixPair:
    sig = B.sig
    if (sig.p, sig.q, sig.r) != (4, 0, 0):
        raise Unsupported("the matrix pair is specific to Euclidean 4-space")
    if not B.is_bivector() or not B.is_real():
        raise GradeError("expected a real bivector")
    A = oracle.adjoint_matrix(B).T.copy()
    T = -pfaffian_4d(B) * np.fliplr(np.eye(4))
    return MatrixPair(A, T, B)


def signed_layout_4d(B: Multivector) -> np.ndarray:
    """Signed layout with ``-B_ij`` above the diagonal and ``B_ij`` below."""
    c = B.coeffs.real
    A = np.zeros((4, 4))
    for i, j in itertools.combinations(range(4), 2):
        bij = c[(1 << i) | (1 << j)]
        A[i, j] = -bij
        A[j, i] = bij
    return A

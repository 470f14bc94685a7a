"""Brute-force reference computations.

Nothing here touches the spectral or decomposition code: the adjoint action
is turned into an ordinary matrix and handled with dense linear algebra, so
these routines can cross-check every outer-exponential result. Only the
multivector arithmetic of :mod:`.algebra` is shared.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Multivector, commutator
from .errors import NumericalFailure

RANK_RTOL = 1e-9


def adjoint_matrix(B: Multivector) -> np.ndarray:
    """Matrix of ``v -> B x v``; column ``j`` holds the image of ``e_{j+1}``.

    Returned as a real array when ``B`` has no imaginary part.
    """
    sig = B.sig
    A = np.empty((sig.n, sig.n), dtype=np.complex128)
    for j in range(sig.n):
        A[:, j] = commutator(B, Multivector.basis_vector(sig, j)).vector_coords()
    if np.all(A.imag == 0):
        return A.real.copy()
    return A


def eig(M: np.ndarray, rtol: float = 1e-10):
    """Eigenvalues and column eigenvectors with a per-pair residual check.

    Uses LAPACK through :func:`numpy.linalg.eig`; the contract is
    ``|M v - lam v| <= rtol * |M|`` for unit ``v``.
    """
    M = np.asarray(M)
    try:
        values, vectors = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    scale = max(np.linalg.norm(M, 2), 1.0)
    res = np.linalg.norm(M @ vectors - vectors * values, axis=0)
    if np.any(res > rtol * scale):
        raise NumericalFailure(f"eigenpair residual {res.max():.3g} exceeds "
                               f"{rtol:g} * {scale:.3g}")
    return values, vectors


def char_poly_matrix(M: np.ndarray) -> np.ndarray:
    """Faddeev-LeVerrier coefficients ``[1, c1, ..., cn]`` of ``det(mu I - M)``.

    ``det(M - mu I)`` is ``(-1)**n`` times this polynomial.
    """
    M = np.asarray(M)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.result_type(M.dtype, float))
    coeffs[0] = 1.0
    Mk = np.zeros_like(M, dtype=coeffs.dtype)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(M @ Mk) / k
    return coeffs


def det_cofactor(M) -> complex:
    """Determinant by Laplace expansion along the first row (small matrices only)."""
    M = [list(row) for row in M]
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        total += (-1) ** j * M[0][j] * det_cofactor(minor)
    return total


def matrix_rank(M: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def nonzero_eigenvalues(B: Multivector, count: int) -> np.ndarray:
    """The ``count`` eigenvalues of the adjoint matrix largest in magnitude."""
    values = np.linalg.eigvals(adjoint_matrix(B))
    order = np.argsort(-np.abs(values), kind="stable")
    return values[order[:count]]


def exp_series(X: Multivector, rtol: float = 1e-14) -> Multivector:
    """Exponential by scaling and squaring a truncated Taylor series."""
    sig = X.sig
    norm = X.norm()
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    Y = X * (0.5 ** squarings)
    total = Multivector.scalar(sig, 1.0)
    term = Multivector.scalar(sig, 1.0)
    for j in range(1, 60):
        term = term * Y * (1.0 / j)
        total = total + term
        if term.norm() <= rtol * total.norm() * 1e-2:
            break
    else:
        raise NumericalFailure("exponential series did not converge")
    for _ in range(squarings):
        total = total * total
    return total


def squared_pairs(M: np.ndarray, count: int) -> list[complex]:
    """Squares ``mu^2`` of the ``count`` largest ``+-mu`` eigenvalue pairs of ``M``.

    Pairs are formed greedily: the largest remaining eigenvalue is matched
    with the remaining one closest to its negative.
    """
    values = list(np.linalg.eigvals(M))
    out = []
    for _ in range(count):
        i = int(np.argmax(np.abs(values)))
        nu = values.pop(i)
        j = int(np.argmin([abs(x + nu) for x in values]))
        partner = values.pop(j)
        mu = 0.5 * (nu - partner)
        out.append(complex(mu * mu))
    return out

"""Seeded random inputs for property checks and the ``verify`` command."""

from __future__ import annotations

import itertools

import numpy as np

from . import oracle
from .algebra import Multivector, Signature, blades_of_grade


def random_bivector(sig: Signature, rng: np.random.Generator, scale: float = 1.0) -> Multivector:
    coeffs = np.zeros(sig.dim)
    for mask in blades_of_grade(sig, 2):
        coeffs[mask] = rng.normal() * scale
    return Multivector(sig, coeffs)


def random_vector(sig: Signature, rng: np.random.Generator) -> Multivector:
    return Multivector.vector(sig, rng.normal(size=sig.n))


def image_vector(B: Multivector, rng: np.random.Generator) -> Multivector:
    """A random vector in the image of ``v -> B x v`` (the effective subspace)."""
    A = oracle.adjoint_matrix(B)
    u = rng.normal(size=B.sig.n)
    return Multivector.vector(B.sig, A @ u)


def signatures(max_dim: int, min_dim: int = 2, max_null: int = 0):
    """All ``(p, q, r)`` with ``min_dim <= p + q + r <= max_dim`` and ``r <= max_null``."""
    out = []
    for n in range(min_dim, max_dim + 1):
        for r in range(0, min(max_null, n) + 1):
            for q in range(0, n - r + 1):
                out.append(Signature(n - r - q, q, r))
    return out


def commuting_pair(sig: Signature, rng: np.random.Generator, scale: float = 1.0,
                   simple: bool = True) -> tuple[Multivector, Multivector]:
    """Two random bivectors supported on disjoint generator sets.

    Disjoint supports make them commute with ``b1 b2 = b1 ^ b2``, so
    ``<b1 b2>_0 = 0``. With ``simple`` each one is a 2-blade.
    """
    if sig.n < 4:
        raise ValueError("need at least four generators")
    perm = rng.permutation(sig.n)
    half = sig.n // 2
    out = []
    for support in (perm[:half], perm[half:]):
        if simple:
            u = np.zeros(sig.n)
            w = np.zeros(sig.n)
            u[support] = rng.normal(size=len(support))
            w[support] = rng.normal(size=len(support))
            b = Multivector.vector(sig, u) ^ Multivector.vector(sig, w)
        else:
            coeffs = np.zeros(sig.dim)
            for a, c in itertools.combinations(sorted(int(x) for x in support), 2):
                coeffs[(1 << a) | (1 << c)] = rng.normal()
            b = Multivector(sig, coeffs)
        out.append(b * scale)
    return out[0], out[1]

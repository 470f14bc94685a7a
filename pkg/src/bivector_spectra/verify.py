"""Seeded verification batteries behind ``bivector-spectra verify``.

Each battery draws random inputs from ``numpy.random.default_rng([seed, i])``
for sample ``i``, so results do not depend on evaluation order, and reports
the worst relative residual per (signature, check).
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .algebra import Multivector, Signature
from .cayley_hamilton import (check_factored_ch, check_scalar_ch, factored_ch,
                              kernel_residual, simplicial_all_orders)
from .decomp import decompose
from .errors import GAError
from .sampling import image_vector, random_bivector
from .spectral import char_poly, elementary_symmetric, w_ladder

THRESHOLDS = {
    "factored_ch": 1e-9,
    "scalar_ch": 1e-9,
    "factored_ch_kernel": 1e-9,
    "d1_equals_minus_2B": 1e-12,
    "top_grade": 1e-10,
    "even_scalar": 1e-10,
    "odd_scalar": 1e-10,
    "charpoly_vs_faddeev_leverrier": 1e-8,
    "ladder_vs_elementary_symmetric": 1e-8,
    "decomposition": 1e-9,
}


@dataclass
class Record:
    signature: str
    seed: int
    check: str
    max_residual: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


class _Collector:
    def __init__(self, seed: int):
        self.seed = seed
        self.worst: OrderedDict = OrderedDict()

    def add(self, sig: Signature, check: str, residual: float):
        key = (str(sig), check)
        if not np.isfinite(residual):
            residual = math.inf
        self.worst[key] = max(self.worst.get(key, 0.0), float(residual))

    def records(self) -> list[Record]:
        return [Record(sig, self.seed, check, res, res <= THRESHOLDS[check])
                for (sig, check), res in self.worst.items()]


def ch_signatures(max_dim: int) -> list[Signature]:
    """``p + q`` from 2 to ``max_dim`` and ``r`` in {0, 1}."""
    return [Signature(m - q, q, r) for r in (0, 1) for m in range(2, max_dim + 1)
            for q in range(m + 1)]


def nondegenerate_signatures(max_dim: int, min_dim: int = 2) -> list[Signature]:
    return [Signature(m - q, q) for m in range(min_dim, max_dim + 1) for q in range(m + 1)]


def _kernel_vectors(A: np.ndarray) -> list[np.ndarray]:
    _, s, vh = np.linalg.svd(A)
    top = s[0] if s.size and s[0] > 0 else 1.0
    return [vh[i] for i in range(len(s)) if s[i] <= 1e-9 * top]


def run_ch(seed: int, count: int, max_dim: int) -> list[Record]:
    """Factored and scalar identities on probes from the image of ``f``; on the
    kernel of ``f`` the factored form is compared with ``(-1)^k W_k v``."""
    sigs = ch_signatures(max_dim)
    out = _Collector(seed)
    for i in range(count):
        sig = sigs[i % len(sigs)]
        rng = np.random.default_rng([seed, i])
        B = random_bivector(sig, rng)
        v = image_vector(B, rng)
        out.add(sig, "factored_ch", check_factored_ch(B, v))
        out.add(sig, "scalar_ch", check_scalar_ch(B, v))
        ker = _kernel_vectors(oracle.adjoint_matrix(B))
        if ker:
            vk = Multivector.vector(sig, ker[0])
            M, scale = factored_ch(B, vk)
            pred = kernel_residual(B, vk)
            out.add(sig, "factored_ch_kernel",
                    (M - pred).norm() / max(scale, pred.norm(), 1e-300))
    return out.records()


def simplicial_residuals(B: Multivector) -> dict[str, float]:
    """Worst relative residual of each simplicial identity for one bivector."""
    sig = B.sig
    ladder = w_ladder(B)
    c = char_poly(B, ladder=ladder).c
    res = {}
    orders = simplicial_all_orders(B)
    d1, s1 = orders[1]
    res["d1_equals_minus_2B"] = (d1 + 2.0 * B).max_abs() / s1
    top = even = odd = 0.0
    for r in range(1, sig.n + 1):
        d, scale = orders[r]
        if r <= ladder.k:
            expect = ladder.W[r] * ((-2.0) ** r)
            top = max(top, (d.grade(2 * r) - expect).max_abs() / scale)
        if r % 2 == 0:
            j = r // 2
            cj = c[j] if j <= ladder.k else 0.0
            even = max(even, abs(d.scalar_part - (-1) ** j * cj) / scale)
        else:
            odd = max(odd, abs(d.scalar_part) / scale)
    res["top_grade"] = top
    res["even_scalar"] = even
    res["odd_scalar"] = odd
    return res


def run_simplicial(seed: int, count: int, max_dim: int) -> list[Record]:
    """All non-degenerate signatures with ``2 <= n <= min(max_dim, 6)``;
    ``count`` bivectors per signature."""
    out = _Collector(seed)
    for si, sig in enumerate(nondegenerate_signatures(min(max_dim, 6))):
        for i in range(count):
            rng = np.random.default_rng([seed, si, i])
            B = random_bivector(sig, rng)
            for check, r in simplicial_residuals(B).items():
                out.add(sig, check, r)
    return out.records()


def charpoly_oracle_residual(B: Multivector) -> float:
    """Worst relative gap between ``det(mu I - A)`` and ``mu^(n-2k) P_2k(mu)``.

    Coefficient ``j`` is compared relative to ``binom(n, j) rho^j`` with
    ``rho`` the spectral norm of ``A``, the largest size it can have.
    """
    A = oracle.adjoint_matrix(B)
    n = A.shape[0]
    b = oracle.char_poly_matrix(A)
    p = char_poly(B).p
    padded = np.zeros(n + 1, dtype=complex)
    padded[:len(p)] = p
    rho = max(np.linalg.norm(A, 2), 1e-300)
    worst = 0.0
    for j in range(n + 1):
        scale = math.comb(n, j) * rho ** j
        worst = max(worst, abs(b[j] - padded[j]) / scale)
    return worst


def esym_residual(B: Multivector) -> float:
    """``<W_j^2>_0`` against ``e_j`` of the squared oracle eigenvalues."""
    ladder = w_ladder(B)
    c = char_poly(B, ladder=ladder).c
    k = ladder.k
    lams = oracle.squared_pairs(oracle.adjoint_matrix(B), k)
    e = elementary_symmetric(lams)
    rho = max(max((abs(x) for x in lams), default=0.0), 1e-300)
    return max(abs(c[j] - e[j]) / (math.comb(k, j) * rho ** j) for j in range(k + 1))


def decomposition_residual(B: Multivector) -> float:
    try:
        dec = decompose(B)
    except GAError:
        return math.inf
    return dec.residual / max(B.max_abs(), 1e-300)


def run_spectral(seed: int, count: int, max_dim: int) -> list[Record]:
    """Characteristic polynomial and decomposition checks on ``(p, q, 0)``."""
    sigs = nondegenerate_signatures(max_dim)
    out = _Collector(seed)
    for i in range(count):
        sig = sigs[i % len(sigs)]
        rng = np.random.default_rng([seed, i])
        B = random_bivector(sig, rng)
        out.add(sig, "charpoly_vs_faddeev_leverrier", charpoly_oracle_residual(B))
        out.add(sig, "ladder_vs_elementary_symmetric", esym_residual(B))
        out.add(sig, "decomposition", decomposition_residual(B))
    return out.records()


SUITES = {"ch": run_ch, "simplicial": run_simplicial, "spectral": run_spectral}

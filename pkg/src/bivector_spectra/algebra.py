"""Dense multivector arithmetic over R_{p,q,r} with complex coefficients.

Basis blades are indexed by bitmask: bit ``i`` set means generator
``e_{i+1}`` is present, and ``e_ij`` with ``i < j`` is the geometric product
``e_i e_j``. Generators ``0..p-1`` square to +1, ``p..p+q-1`` to -1 and the
last ``r`` to 0.

Coefficients are stored densely (length ``2**n``) as complex numbers, because
spectral computations routinely pass through complexified bivectors such as
``B / mu``. Every :class:`Multivector` is immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import NonInvertible, ParseError, SignatureMismatch

MAX_DIM = 12

# ``|a| |a^-1|`` above this is treated as singular by mv_inverse.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Signature:
    p: int
    q: int = 0
    r: int = 0
    cap: int = field(default=MAX_DIM, compare=False, repr=False)

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0:
            raise ValueError(f"negative signature entry in {self}")
        if self.n < 1:
            raise ValueError("signature must have at least one generator")
        if self.n > self.cap:
            raise ValueError(f"dimension {self.n} exceeds the cap of {self.cap} "
                             f"(dense storage needs 2**n coefficients)")

    @property
    def n(self) -> int:
        return self.p + self.q + self.r

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def squares(self) -> tuple[int, ...]:
        return (1,) * self.p + (-1,) * self.q + (0,) * self.r

    @property
    def degenerate(self) -> bool:
        return self.r > 0

    @classmethod
    def parse(cls, text: str, cap: int = MAX_DIM) -> "Signature":
        """Parse ``"p,q,r"`` (``r`` optional)."""
        parts = [s.strip() for s in text.split(",")]
        if not 2 <= len(parts) <= 3 or not all(s.isdigit() for s in parts):
            raise ValueError(f"expected 'p,q,r', got {text!r}")
        return cls(*map(int, parts), cap=cap)

    def __str__(self) -> str:
        return f"{self.p},{self.q},{self.r}"


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute zero test: ``|x| <= max(abs_eps, rel_eps * scale)``."""

    rel_eps: float = 1e-10
    abs_eps: float = 1e-13

    def threshold(self, scale: float) -> float:
        return max(self.abs_eps, self.rel_eps * float(scale))

    def is_zero(self, x, scale: float = 1.0) -> bool:
        return float(np.max(np.abs(x), initial=0.0)) <= self.threshold(scale)


DEFAULT_TOL = Tolerance()


def _popcount(x):
    return np.bitwise_count(x).astype(np.int64)


@lru_cache(maxsize=None)
def _tables(p: int, q: int, r: int):
    """Sign table ``S[a, b]`` with ``e_a e_b = S[a, b] e_{a^b}`` (0 if annihilated)."""
    n = p + q + r
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    parity = (_popcount(idx) & 1).astype(np.uint8)
    swaps = np.zeros((size, size), dtype=np.uint8)
    for i in range(n):
        bit_b = ((idx >> i) & 1).astype(np.uint8)
        swaps ^= parity[idx >> (i + 1)][:, None] & bit_b[None, :]
    shared = idx[:, None] & idx[None, :]
    neg_mask = ((1 << q) - 1) << p
    null_mask = ((1 << r) - 1) << (p + q)
    negs = (_popcount(shared & neg_mask) & 1).astype(np.uint8)
    sign = (1 - 2 * (swaps ^ negs).astype(np.int8)).astype(np.int8)
    sign[(shared & null_mask) != 0] = 0
    grades = _popcount(idx)
    sign.setflags(write=False)
    grades.setflags(write=False)
    return sign, grades


def grades_of(sig: Signature) -> np.ndarray:
    return _tables(sig.p, sig.q, sig.r)[1]


class Multivector:
    """Immutable dense multivector.

    Arithmetic operators: ``+ -`` (and scalar ``*``, ``/``), ``*`` geometric
    product, ``^`` wedge, ``|`` grade-|s-t| dot, ``~`` reverse.
    """

    __slots__ = ("sig", "coeffs")
    __array_ufunc__ = None  # keep numpy scalars from broadcasting over us

    def __init__(self, sig: Signature, coeffs):
        c = np.array(coeffs, dtype=np.complex128)
        if c.shape != (sig.dim,):
            raise ValueError(f"expected {sig.dim} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, np.zeros(sig.dim))

    @classmethod
    def scalar(cls, sig: Signature, value=1.0) -> "Multivector":
        c = np.zeros(sig.dim, dtype=np.complex128)
        c[0] = value
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, mask: int, value=1.0) -> "Multivector":
        c = np.zeros(sig.dim, dtype=np.complex128)
        c[mask] = value
        return cls(sig, c)

    @classmethod
    def basis_vector(cls, sig: Signature, i: int) -> "Multivector":
        """Generator ``e_{i+1}`` (0-based ``i``)."""
        return cls.blade(sig, 1 << i)

    @classmethod
    def vector(cls, sig: Signature, coords: Sequence) -> "Multivector":
        coords = np.asarray(coords, dtype=np.complex128)
        if coords.shape != (sig.n,):
            raise ValueError(f"expected {sig.n} vector coordinates")
        c = np.zeros(sig.dim, dtype=np.complex128)
        c[1 << np.arange(sig.n)] = coords
        return cls(sig, c)

    @classmethod
    def bivector(cls, sig: Signature, entries: dict) -> "Multivector":
        """Build ``sum B_ij e_ij`` from ``{(i, j): B_ij}`` with 1-based indices."""
        out = cls.zero(sig)
        for (i, j), v in entries.items():
            out = out + v * (cls.basis_vector(sig, i - 1) * cls.basis_vector(sig, j - 1))
        return out

    # -- inspection -----------------------------------------------------
    @property
    def grades_present(self) -> set[int]:
        g = grades_of(self.sig)
        return set(int(x) for x in np.unique(g[np.abs(self.coeffs) > 0]))

    def vector_coords(self) -> np.ndarray:
        return np.array(self.coeffs[1 << np.arange(self.sig.n)])

    @property
    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def norm(self) -> float:
        """Euclidean norm of the coefficient array (not a metric norm)."""
        return float(np.linalg.norm(self.coeffs))

    def is_zero(self, tol: Tolerance = DEFAULT_TOL, scale: float = 1.0) -> bool:
        return tol.is_zero(self.coeffs, scale)

    def is_real(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return tol.is_zero(self.coeffs.imag, max(self.max_abs(), 1e-300))

    def is_grade(self, ell: int, tol: Tolerance = DEFAULT_TOL) -> bool:
        g = grades_of(self.sig)
        return tol.is_zero(self.coeffs[g != ell], max(self.max_abs(), 1e-300))

    def is_bivector(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.is_grade(2, tol)

    def allclose(self, other, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> bool:
        other = _coerce(self.sig, other)
        if scale is None:
            scale = max(self.max_abs(), other.max_abs(), 1.0)
        return tol.is_zero(self.coeffs - other.coeffs, scale)

    # -- unary ----------------------------------------------------------
    def grade(self, ell: int) -> "Multivector":
        return grade_select(self, ell)

    def reverse(self) -> "Multivector":
        return reverse(self)

    def conj(self) -> "Multivector":
        return Multivector(self.sig, self.coeffs.conj())

    @property
    def real(self) -> "Multivector":
        return Multivector(self.sig, self.coeffs.real)

    @property
    def imag(self) -> "Multivector":
        return Multivector(self.sig, self.coeffs.imag)

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs)

    def __invert__(self):
        return reverse(self)

    # -- binary ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(self.sig, other)
        return Multivector(self.sig, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(self.sig, other)
        return Multivector(self.sig, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return _coerce(self.sig, other) - self

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return Multivector(self.sig, self.coeffs * complex(other))

    def __rmul__(self, other):
        return Multivector(self.sig, self.coeffs * complex(other))

    def __truediv__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, mv_inverse(other))
        return Multivector(self.sig, self.coeffs / complex(other))

    def __xor__(self, other):
        return wedge(self, _coerce(self.sig, other))

    def __rxor__(self, other):
        return wedge(_coerce(self.sig, other), self)

    def __or__(self, other):
        return dot(self, _coerce(self.sig, other))

    def __ror__(self, other):
        return dot(_coerce(self.sig, other), self)

    def __repr__(self):
        return f"Multivector<{self.sig}>({format_multivector(self)})"

    def __str__(self):
        return format_multivector(self)


def _coerce(sig: Signature, x) -> Multivector:
    if isinstance(x, Multivector):
        if x.sig != sig:
            raise SignatureMismatch(f"signatures differ: {sig} vs {x.sig}")
        return x
    return Multivector.scalar(sig, x)


def _check(a: Multivector, b: Multivector) -> Signature:
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("expected Multivector operands")
    if a.sig != b.sig:
        raise SignatureMismatch(f"signatures differ: {a.sig} vs {b.sig}")
    return a.sig


def _product(a: Multivector, b: Multivector, keep=None) -> Multivector:
    sig = _check(a, b)
    sign, grades = _tables(sig.p, sig.q, sig.r)
    ia = np.flatnonzero(a.coeffs)
    ib = np.flatnonzero(b.coeffs)
    out = np.zeros(sig.dim, dtype=np.complex128)
    if ia.size and ib.size:
        s = sign[np.ix_(ia, ib)]
        target = ia[:, None] ^ ib[None, :]
        if keep is not None:
            s = s * keep(ia[:, None], ib[None, :], target, grades)
        vals = (a.coeffs[ia][:, None] * b.coeffs[ib][None, :]) * s
        flat = target.ravel()
        out.real = np.bincount(flat, weights=vals.real.ravel(), minlength=sig.dim)
        out.imag = np.bincount(flat, weights=vals.imag.ravel(), minlength=sig.dim)
    return Multivector(sig, out)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return _product(a, b)


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Outer product: grade ``s+t`` part of products of homogeneous pieces."""
    return _product(a, b, keep=lambda x, y, t, g: (x & y) == 0)


def dot(a: Multivector, b: Multivector) -> Multivector:
    """Grade ``|s-t|`` part of products of homogeneous pieces, bilinearly extended."""
    return _product(a, b, keep=lambda x, y, t, g: g[t] == np.abs(g[x] - g[y]))


def commutator(a: Multivector, b: Multivector) -> Multivector:
    """``(ab - ba) / 2``."""
    return (geometric_product(a, b) - geometric_product(b, a)) * 0.5


def anticommutator(a: Multivector, b: Multivector) -> Multivector:
    return (geometric_product(a, b) + geometric_product(b, a)) * 0.5


def grade_select(a: Multivector, ell: int) -> Multivector:
    if not 0 <= ell <= a.sig.n:
        return Multivector.zero(a.sig)
    c = np.where(grades_of(a.sig) == ell, a.coeffs, 0)
    return Multivector(a.sig, c)


def reverse(a: Multivector) -> Multivector:
    g = grades_of(a.sig)
    flip = np.where((g * (g - 1) // 2) % 2 == 1, -1.0, 1.0)
    return Multivector(a.sig, a.coeffs * flip)


def sandwich(R: Multivector, X: Multivector) -> Multivector:
    """``R X ~R``."""
    return geometric_product(geometric_product(R, X), reverse(R))


def left_regular_matrix(a: Multivector) -> np.ndarray:
    """Matrix ``L`` of ``x -> a x`` on blade coordinates."""
    sig = a.sig
    sign, _ = _tables(sig.p, sig.q, sig.r)
    cols = np.arange(sig.dim)
    L = np.zeros((sig.dim, sig.dim), dtype=np.complex128)
    for i in np.flatnonzero(a.coeffs):
        L[i ^ cols, cols] += a.coeffs[i] * sign[i, :]
    return L


def mv_inverse(a: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """Two-sided inverse by solving the left-regular linear system.

    Raises :class:`NonInvertible` when ``a`` is a zero divisor.
    """
    sig = a.sig
    if a.max_abs() == 0:
        raise NonInvertible("zero has no inverse", residual=1.0)
    one = Multivector.scalar(sig, 1.0)
    nz = np.flatnonzero(a.coeffs)
    if nz.size == 1 and nz[0] == 0:
        return Multivector.scalar(sig, 1.0 / a.coeffs[0])
    L = left_regular_matrix(a)
    rhs = np.zeros(sig.dim, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        x = Multivector(sig, np.linalg.solve(L, rhs))
    except np.linalg.LinAlgError:
        raise NonInvertible(f"{format_multivector(a)} is a zero divisor "
                            f"(singular regular representation)") from None
    if not np.all(np.isfinite(x.coeffs)):
        raise NonInvertible("inverse overflowed")
    condition = a.norm() * x.norm()
    residual = max((a * x - one).norm(), (x * a - one).norm())
    if condition > MAX_CONDITION or residual > tol.threshold(condition):
        raise NonInvertible(
            f"{format_multivector(a)} is numerically a zero divisor "
            f"(residual {residual:.3g}, condition {condition:.3g})",
            residual=residual, condition=condition)
    return x


# -- text form ---------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<sign>[+\-−])
  | (?P<star>\*)
  | (?P<blade>e_?\d+(?:_\d+)*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:e[+\-]\d+|E[+\-]?\d+)?i?)
""", re.VERBOSE)


def _blade_indices(token: str) -> list[int]:
    body = token[1:].lstrip("_")
    if "_" in token:
        return [int(s) for s in body.split("_")]
    return [int(ch) for ch in body]


def _tokenize(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            yield m.lastgroup, m.group(), pos
        pos = m.end()


def parse_multivector(text: str, sig: Signature) -> Multivector:
    """Parse expressions like ``"1.5 - 0.5*e1_2 + e34"``.

    Blade names list 1-based generator indices: one digit each (``e12``), or
    underscore-separated for multi-digit indices (``e1_12``, ``e_12``).
    Coefficients may carry an ``i`` suffix for imaginary values. A number
    directly followed by a blade (``2e34``) is a product; scientific notation
    needs a signed exponent or a capital ``E`` (``1e-3``, ``2E4``).
    """
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty expression", 0)
    out = np.zeros(sig.dim, dtype=np.complex128)
    pos = 0
    expect_term = True
    sign = 1.0
    while pos < len(tokens):
        kind, val, at = tokens[pos]
        if not expect_term:
            if kind != "sign":
                raise ParseError(f"expected '+' or '-', got {val!r}", at)
            sign = -1.0 if val in "-−" else 1.0
            expect_term = True
            pos += 1
            continue
        if kind == "sign" and pos == 0:
            sign = -1.0 if val in "-−" else 1.0
            pos += 1
            if pos == len(tokens):
                raise ParseError("dangling sign", at)
            kind, val, at = tokens[pos]
        coeff: complex = 1.0
        if kind == "number":
            coeff = complex(0, float(val[:-1])) if val.endswith("i") else float(val)
            pos += 1
            if pos < len(tokens) and tokens[pos][0] == "star":
                pos += 1
                if pos == len(tokens) or tokens[pos][0] != "blade":
                    raise ParseError("expected blade after '*'",
                                     tokens[pos][2] if pos < len(tokens) else len(text))
                kind, val, at = tokens[pos]
            elif pos < len(tokens) and tokens[pos][0] == "blade":
                kind, val, at = tokens[pos]
            else:
                out[0] += sign * coeff
                expect_term = False
                continue
        if kind != "blade":
            raise ParseError(f"expected a term, got {val!r}", at)
        term = Multivector.scalar(sig, sign * coeff)
        for g in _blade_indices(val):
            if not 1 <= g <= sig.n:
                raise ParseError(f"generator e{g} out of range for n={sig.n}", at)
            term = term * Multivector.basis_vector(sig, g - 1)
        out += term.coeffs
        pos += 1
        expect_term = False
    if expect_term:
        raise ParseError("expression ends with an operator", len(text))
    return Multivector(sig, out)


def blade_name(mask: int, n: int) -> str:
    idx = [i + 1 for i in range(n) if mask >> i & 1]
    if not idx:
        return ""
    if n <= 9:
        return "e" + "".join(map(str, idx))
    return "e_" + "_".join(map(str, idx))


def _fmt(x: float) -> str:
    return format(x, ".17g")


def format_multivector(a: Multivector) -> str:
    """Canonical text: ascending grade, then generator order, 17 significant digits."""
    n = a.sig.n
    masks = sorted(np.flatnonzero(a.coeffs),
                   key=lambda m: (bin(m).count("1"),
                                  [i for i in range(n) if m >> i & 1]))
    terms: list[tuple[float, str]] = []
    for m in masks:
        c = a.coeffs[m]
        name = blade_name(int(m), n)
        for part, suffix in ((c.real, ""), (c.imag, "i")):
            if part == 0:
                continue
            if name and not suffix and abs(part) == 1:
                body = name
            else:
                body = _fmt(abs(part)) + suffix + ("*" + name if name else "")
            terms.append((part, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] < 0 else "") + terms[0][1]
    for val, body in terms[1:]:
        out += (" - " if val < 0 else " + ") + body
    return out


def vectors_from_columns(sig: Signature, M: np.ndarray) -> list[Multivector]:
    return [Multivector.vector(sig, M[:, j]) for j in range(M.shape[1])]


def metric_dot(sig: Signature, u, v) -> complex:
    """Bilinear metric product of two coordinate vectors."""
    g = np.asarray(sig.squares, dtype=float)
    return complex(np.sum(g * np.asarray(u) * np.asarray(v)))


def blades_of_grade(sig: Signature, ell: int) -> list[int]:
    g = grades_of(sig)
    return sorted((int(m) for m in np.flatnonzero(g == ell)),
                  key=lambda m: [i for i in range(sig.n) if m >> i & 1])


def wedge_all(items: Iterable[Multivector], sig: Signature) -> Multivector:
    out = Multivector.scalar(sig, 1.0)
    for x in items:
        out = wedge(out, x)
    return out

"""Rotors from bivectors: closed-form exponential, Cayley transform, tangents.

The exponential of a bivector is the product of the exponentials of its
commuting simple parts, and each of those has a closed form. The Cayley
transform replaces ``exp`` by ``(1 - T)(1 + T)^-1`` with ``T`` the outer
tangent, and composes through the ``oplus`` law.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import oracle
from .algebra import (DEFAULT_TOL, Multivector, Tolerance, grade_select, mv_inverse,
                      reverse)
from .decomp import SimpleBivector, decompose, outer_tan
from .errors import (ConsistencyError, GAError, JordanesqueError, NumericalFailure,
                     Undefined, Unsupported)
from .spectral import outer_exp

ROTOR_RTOL = 1e-9


@dataclass(frozen=True)
class Rotor:
    """Even multivector ``R``; ``normalized`` means ``R ~R = 1`` was checked.

    ``method`` records how it was built and ``error_bound`` is set only when
    the series fallback was used.
    """

    value: Multivector
    normalized: bool = True
    method: str = "exp"
    error_bound: float | None = None

    def norm_residual(self) -> float:
        """``|R ~R - 1|`` (max coefficient)."""
        return float((self.value * reverse(self.value) - 1.0).max_abs())

    def __mul__(self, other: "Rotor") -> "Rotor":
        return Rotor(self.value * other.value, self.normalized and other.normalized,
                     "product")


def _simple_square(b: Multivector, tol: Tolerance) -> complex:
    sq = b * b
    if not tol.is_zero(sq.coeffs[1:], max(b.norm() ** 2, 1e-300) * 1e2):
        raise NumericalFailure("exp_simple() needs a simple bivector (b^2 scalar)")
    return sq.scalar_part


def _normalize(R: Multivector, tol: Tolerance) -> Multivector:
    n2 = (R * reverse(R)).scalar_part
    if abs(n2) <= tol.abs_eps:
        raise Undefined("rotor has zero reverse norm")
    # n2 is +1 up to round-off for every closed form used here
    return R * (1.0 / cmath.sqrt(n2))


def exp_simple(b: Multivector | SimpleBivector, tol: Tolerance = DEFAULT_TOL) -> Rotor:
    """``exp(b)`` for ``b^2 = s`` scalar: ``cosh(sqrt s) + b sinh(sqrt s)/sqrt s``.

    This covers ``s < 0`` (circular), ``s > 0`` (hyperbolic) and ``s = 0``
    (``1 + b``) with one complex square root.
    """
    if isinstance(b, SimpleBivector):
        b = b.b
    s = _simple_square(b, tol)
    if tol.is_zero(s, b.norm() ** 2):
        R = 1.0 + b
    else:
        r = cmath.sqrt(s)
        R = cmath.cosh(r) + b * (cmath.sinh(r) / r)
    if b.is_real(tol) and abs(complex(s).imag) <= tol.threshold(abs(s)):
        R = R.real
    return Rotor(_normalize(R, tol), True, "exp_simple")


def exp_bivector(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Rotor:
    """``exp(B)`` as the product of the exponentials of the decomposition parts.

    Bivectors that cannot be decomposed (Jordan-type or unsupported null
    structure) fall back to a scaled-and-squared series; the result is
    flagged with ``method="series"`` and an error bound.
    """
    try:
        dec = decompose(B, tol)
    except (JordanesqueError, Unsupported):
        R = oracle.exp_series(B)
        bound = 1e-14 * max(R.norm(), 1.0)
        if B.is_real(tol):
            R = R.real
        return Rotor(R, False, "series", bound)
    factors = [exp_simple(p.b, tol).value for p in dec.parts]
    if not factors:
        return Rotor(Multivector.scalar(B.sig, 1.0), True, "exp")
    fwd = reduce(lambda x, y: x * y, factors)
    bwd = reduce(lambda x, y: x * y, reversed(factors))
    if not fwd.allclose(bwd, tol, scale=max(fwd.norm(), 1.0) * 1e2):
        raise ConsistencyError("exponentials of the decomposition parts do not commute")
    if B.is_real(tol):
        if np.max(np.abs(fwd.coeffs.imag)) > 1e-8 * max(fwd.max_abs(), 1.0):
            raise NumericalFailure("exp of a real bivector came out complex")
        fwd = fwd.real
    return Rotor(fwd, True, "exp")


def cayley_element(T: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``(1 - T)(1 + T)^-1``; for bivector ``T`` this is the classical Cayley map."""
    return (1.0 - T) * mv_inverse(1.0 + T, tol)


def cayley(B: Multivector, tol: Tolerance = DEFAULT_TOL) -> Rotor:
    """Generalised Cayley transform ``(1 - tan^(B))(1 + tan^(B))^-1``.

    Raises :class:`NonInvertible` when the outer tangent or the denominator
    does not exist.
    """
    T = outer_tan(B, tol)
    R = cayley_element(T, tol)
    res = (R * reverse(R) - 1.0).max_abs()
    if res > ROTOR_RTOL * max(R.norm() ** 2, 1.0):
        raise NumericalFailure(f"Cayley transform is not unit (residual {res:.3g})")
    return Rotor(R, True, "cayley")


def oplus2(x: Multivector, y: Multivector, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``x (+) y = (x + y)(1 + x y)^-1``."""
    return (x + y) * mv_inverse(1.0 + x * y, tol)


def oplus(parts, tol: Tolerance = DEFAULT_TOL, check: bool = True) -> Multivector:
    """Left fold of ``oplus2`` over commuting simple bivectors.

    With ``check`` the result is compared with ``tan^`` of the sum, which is
    the same quantity computed from wedge powers.
    """
    items = [p.b if isinstance(p, SimpleBivector) else p for p in parts]
    if not items:
        raise ValueError("oplus() needs at least one bivector")
    out = reduce(lambda x, y: oplus2(x, y, tol), items)
    if check and len(items) > 1:
        total = reduce(lambda x, y: x + y, items)
        via_tan = outer_tan(total, tol)
        if not out.allclose(via_tan, tol, scale=max(out.norm(), 1.0) * 1e3):
            raise ConsistencyError("oplus fold disagrees with the outer tangent of the sum")
    return out


def tangent_decomposition(R: Multivector | Rotor, tol: Tolerance = DEFAULT_TOL):
    """``R = <R>_0 Lambda^T`` with ``T = <R>_2 / <R>_0``.

    Raises :class:`Undefined` when the scalar part vanishes.
    """
    if isinstance(R, Rotor):
        R = R.value
    s = R.scalar_part
    if abs(s) <= 1e-12 * max(R.norm(), 1.0):
        raise Undefined("rotor has a vanishing scalar part; its tangent does not exist")
    T = grade_select(R, 2) * (1.0 / s)
    back = outer_exp(T, tol) * s
    if not back.allclose(R, tol, scale=max(back.norm(), R.norm()) * 1e2):
        raise ConsistencyError("R differs from <R>_0 * outer_exp(T)")
    if R.is_real(tol):
        s = s.real
        T = T.real
    return s, T


def rotor_tangent(R: Multivector | Rotor, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """``(R - ~R)(R + ~R)^-1``, the tangent of half the generating bivector."""
    if isinstance(R, Rotor):
        R = R.value
    Rr = reverse(R)
    return (R - Rr) * mv_inverse(R + Rr, tol)


def _atanh_ratio(s: complex) -> complex:
    """``atanh(sqrt s) / sqrt s``, an even function of the root."""
    if abs(s) < 1e-16:
        return 1.0
    r = cmath.sqrt(s)
    return cmath.atanh(r) / r


def log_rotor(R: Multivector | Rotor, tol: Tolerance = DEFAULT_TOL) -> Multivector:
    """A bivector ``B`` with ``exp(B) = R``.

    Goes through the tangent ``T`` of ``R``, its invariant decomposition
    ``T = sum t_j`` and a scalar inverse tangent per part. The result lies on
    the principal branch; if that lands on ``-R`` a half turn is added to a
    circular part. Raises :class:`Undefined` when no such correction exists.
    """
    if isinstance(R, Rotor):
        R = R.value
    _, T = tangent_decomposition(R, tol)
    if T.is_zero(tol, 1.0):
        if R.scalar_part.real > 0:
            return Multivector.zero(R.sig)
        raise Undefined("rotor -1 has no distinguished logarithm")
    dec = decompose(T, tol)
    parts = []
    for p in dec.parts:
        s = (p.b * p.b).scalar_part
        parts.append(p.b * _atanh_ratio(s))
    B = reduce(lambda x, y: x + y, parts)
    if R.is_real(tol):
        B = B.real
    target_scale = max(R.norm(), 1.0) * 1e3
    exp_B = exp_bivector(B, tol).value
    if exp_B.allclose(R, tol, target_scale):
        return B
    if (exp_B + R).is_zero(tol, target_scale):
        for p, b in zip(dec.parts, parts):
            s = (p.b * p.b).scalar_part
            if s.real < 0 and abs(s.imag) <= tol.threshold(abs(s)):
                unit = p.b * (1.0 / math.sqrt(-s.real))
                fixed = B + unit * math.pi
                if exp_bivector(fixed, tol).value.allclose(R, tol, target_scale):
                    return fixed
    raise Undefined("no bivector logarithm found on the principal branch")

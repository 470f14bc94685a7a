import numpy as np
import pytest

from bivector_spectra.algebra import Multivector, Signature, parse_multivector


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def mv(text: str, sig: str = "4,0,0") -> Multivector:
    return parse_multivector(text, Signature.parse(sig))


def assert_mv_close(a: Multivector, b, atol: float = 1e-12):
    if not isinstance(b, Multivector):
        b = Multivector.scalar(a.sig, b)
    diff = (a - b).max_abs()
    assert diff <= atol, f"{a} != {b} (max diff {diff:.3g})"

"""Spectral analysis, invariant decomposition and rotors of bivectors in
Clifford algebras ``R_{p,q,r}``."""

from .algebra import (DEFAULT_TOL, Multivector, Signature, Tolerance, commutator, dot,
                      format_multivector, geometric_product, grade_select, mv_inverse,
                      parse_multivector, reverse, sandwich, wedge)
from .cayley_hamilton import (adjoint_and_trivector_matrices, check_factored_ch,
                              check_scalar_ch, simplicial_coeffs, simplicial_derivative,
                              simplicial_top_grade)
from .decomp import (Decomposition, EigenPair, SimpleBivector, beta_from_pair, decompose,
                     decompose_tangent, eigen_pairs, null_limit_part, outer_cos, outer_sin,
                     outer_tan)
from .errors import (ConsistencyError, GAError, GradeError, JordanesqueError, NonInvertible,
                     NumericalFailure, ParseError, RequiresEigenPairing, SignatureMismatch,
                     Undefined, Unsupported)
from .rotor import (Rotor, cayley, exp_bivector, exp_simple, log_rotor, oplus,
                    tangent_decomposition)
from .spectral import (CharPoly, SpectralData, WLadder, char_poly, outer_exp, outer_norm_sq,
                       spectrum, w_ladder)

__version__ = "0.1.0"

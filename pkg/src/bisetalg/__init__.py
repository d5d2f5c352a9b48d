"""Double cosets HgH of a finite permutation group as elements of a semiring.

Unions of double cosets (H-bisets) multiply like subsets of G.  Each one
also determines a 0/1 span pattern in n x n matrices, n = [G:H], and the
map carries union to union and biset products to pattern products.  The
modules here cover the group side, the matrix side, identities for
characteristic-polynomial coefficients and Kummer-type trace conditions.
"""

from .bisets import BisetError, BisetSemiring, CounterexampleError, HBiset, height_profile
from .families import STANDARD_FAMILY, parse_group_spec
from .fields import GF, QQ, ZZ, parse_ring
from .matrices import ExactMatrix
from .matrix_model import SpanPattern, phi_pattern, verify_main_isomorphism

__version__ = "0.1.0"

__all__ = [
    "BisetError",
    "BisetSemiring",
    "CounterexampleError",
    "ExactMatrix",
    "GF",
    "HBiset",
    "QQ",
    "STANDARD_FAMILY",
    "SpanPattern",
    "ZZ",
    "height_profile",
    "parse_group_spec",
    "parse_ring",
    "phi_pattern",
    "verify_main_isomorphism",
]

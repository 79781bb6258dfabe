"""Search and classification of finite semifields given by standard bases over GF(2)."""

from .binmat import BitMatrix, EncodedMatrix, decode_matrix, encode_matrix, is_invertible
from .semifield import Cube, SemifieldTable, StandardBasis, check_standard_basis, nuclei_and_center

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "Cube",
    "EncodedMatrix",
    "SemifieldTable",
    "StandardBasis",
    "check_standard_basis",
    "decode_matrix",
    "encode_matrix",
    "is_invertible",
    "nuclei_and_center",
]

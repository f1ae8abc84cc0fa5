from .concat import (
    PRODUCTION_CODE,
    ConcatenatedCode,
    bits_to_symbols,
    concat_decode,
    concat_encode,
    symbols_to_bits,
)
from .gf import GaloisField, gf
from .hadamard import HadamardCode, hadamard_decode, hadamard_encode
from .reed_solomon import ReedSolomonCode, rs_decode, rs_encode

__all__ = [
    "PRODUCTION_CODE", "ConcatenatedCode", "GaloisField", "HadamardCode", "ReedSolomonCode",
    "bits_to_symbols", "concat_decode", "concat_encode", "gf", "hadamard_decode",
    "hadamard_encode", "rs_decode", "rs_encode", "symbols_to_bits",
]

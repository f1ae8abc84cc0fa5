"""Simulation and accounting of quantum data locking over a lossy photon channel."""

__version__ = "0.1.0"

from .core import (
    ERASED, LOST, Basis, BitString, ChannelParams, ContractError, DecodeFailure, QubitBlock,
    QubitSymbol, RngStream, draw_bits, xor,
)

__all__ = [
    "ERASED", "LOST", "Basis", "BitString", "ChannelParams", "ContractError", "DecodeFailure",
    "QubitBlock", "QubitSymbol", "RngStream", "__version__", "draw_bits", "xor",
]

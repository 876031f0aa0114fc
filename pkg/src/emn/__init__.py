"""Entropy Mixing Network random generator and randomness evaluation toolkit."""

__version__ = "0.1.0"

from .generators import (  # noqa: E402
    ByteSample,
    EmnGenerator,
    MersenneTwisterSource,
    Mt19937,
    OsEntropySource,
    make_source,
    os_entropy,
    source_bytes,
)
from .hashing import sha256  # noqa: E402

__all__ = [
    "ByteSample",
    "EmnGenerator",
    "MersenneTwisterSource",
    "Mt19937",
    "OsEntropySource",
    "make_source",
    "os_entropy",
    "sha256",
    "source_bytes",
]

"""Random sources under evaluation: EMN, MT19937 and the OS entropy pool.

Every source yields 256-bit blocks as Python ints.  A block crosses a byte
boundary (hash input, sample serialization) as 32 bytes, big-endian.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .errors import EntropyUnavailableError
from .hashing import sha256

BLOCK_BITS = 256
BLOCK_BYTES = 32
BLOCK_MASK = (1 << BLOCK_BITS) - 1

DEFAULT_INJECTION_FREQUENCY = 16

EntropySource = Callable[[int], bytes]


def block_to_bytes(block: int) -> bytes:
    return block.to_bytes(BLOCK_BYTES, "big")


def block_from_bytes(data: bytes) -> int:
    if len(data) != BLOCK_BYTES:
        raise ValueError(f"a block is {BLOCK_BYTES} bytes, got {len(data)}")
    return int.from_bytes(data, "big")


def seed_to_words(seed: int) -> list[int]:
    """Split a 256-bit seed into 8 32-bit words, least-significant first."""
    if not 0 <= seed <= BLOCK_MASK:
        raise ValueError("seed must be a 256-bit non-negative integer")
    return [(seed >> (32 * i)) & 0xFFFFFFFF for i in range(8)]


def parse_seed_hex(text: str) -> int:
    """Parse a seed given as exactly 64 hex characters."""
    if len(text) != 64:
        raise ValueError(f"seed must be exactly 64 hex characters, got {len(text)}")
    try:
        return int(text, 16)
    except ValueError:
        raise ValueError(f"seed is not valid hex: {text!r}") from None


def os_entropy(n: int) -> bytes:
    """Read ``n`` bytes from the operating system's randomness pool.

    Never falls back to a PRNG; raises EntropyUnavailableError instead.
    """
    if n < 0:
        raise ValueError("byte count must be non-negative")
    try:
        return os.urandom(n)
    except (NotImplementedError, OSError) as exc:
        raise EntropyUnavailableError(f"OS entropy unavailable: {exc}") from exc


# ---------------------------------------------------------------------------
# MT19937

_N = 624
_M = 397  # middle word offset
_MATRIX_A = np.uint32(0x9908B0DF)
_LOWER = np.uint32(0x7FFFFFFF)
_ONE = np.uint32(1)
_S7, _S11, _S15, _S18 = (np.uint32(k) for k in (7, 11, 15, 18))
_TB = np.uint32(0x9D2C5680)
_TC = np.uint32(0xEFC60000)


def _init_genrand(seed: int) -> list[int]:
    mt = [seed & 0xFFFFFFFF]
    for i in range(1, _N):
        prev = mt[-1]
        mt.append((1812433253 * (prev ^ (prev >> 30)) + i) & 0xFFFFFFFF)
    return mt


class Mt19937:
    """MT19937 generator state.

    Internally the state is a stream of successive 624-word windows: row 0
    holds the last consumed state and rows ``1..batch`` are produced together
    by running the recurrence ``x[k+624] = x[k+397] ^ twist(x[k], x[k+1])``
    in vector chunks of 227 words, then tempered in one pass.  Output order
    is identical to the reference word-at-a-time generator.
    """

    def __init__(self, mt: np.ndarray, batch: int = 8):
        mt = np.array(mt, dtype=np.uint32)
        if mt.shape != (_N,):
            raise ValueError(f"MT19937 state needs {_N} words")
        if not mt.any():
            raise ValueError("MT19937 state must not be all zero")
        self._stream = np.empty((batch + 1, _N), dtype=np.uint32)
        self._stream[0] = mt
        flat = self._stream.reshape(-1)
        self._chunks = []
        step = _N - _M
        for c in range(_N, flat.size, step):
            e = min(c + step, flat.size)
            n = e - c
            self._chunks.append(
                (flat[c:e], flat[c - _N:e - _N], flat[c - _N + 1:e - _N + 1],
                 flat[c - step:e - step], np.empty(n, np.uint32), np.empty(n, np.uint32))
            )
        self._fresh = flat[_N:]
        self._y = np.empty(batch * _N, np.uint32)
        self._z = np.empty(batch * _N, np.uint32)
        self._raw = b""
        self._pos = 0
        self._end = 0

    @property
    def index(self) -> int:
        """Read position within the current window, in ``[0, 624]``."""
        if self._end == 0:
            return _N
        return self._pos - _N * max(0, (self._pos - 1) // _N)

    @property
    def mt(self) -> np.ndarray:
        """The 624-word state of the window currently being read."""
        if self._end == 0:
            return self._stream[0].copy()
        return self._stream[max(1, -(-self._pos // _N))].copy()

    @classmethod
    def from_scalar(cls, seed: int) -> "Mt19937":
        """Reference ``init_genrand`` seeding."""
        return cls(np.array(_init_genrand(seed), dtype=np.uint32))

    @classmethod
    def from_words(cls, words) -> "Mt19937":
        """Reference ``init_by_array`` seeding."""
        key = [int(w) & 0xFFFFFFFF for w in words]
        if not key:
            raise ValueError("seed word sequence must not be empty")
        if len(key) > _N:
            raise ValueError(f"at most {_N} seed words are accepted")
        mt = _init_genrand(19650218)
        i, j = 1, 0
        for _ in range(max(_N, len(key))):
            prev = mt[i - 1]
            mt[i] = ((mt[i] ^ ((prev ^ (prev >> 30)) * 1664525)) + key[j] + j) & 0xFFFFFFFF
            i += 1
            j += 1
            if i >= _N:
                mt[0] = mt[_N - 1]
                i = 1
            if j >= len(key):
                j = 0
        for _ in range(_N - 1):
            prev = mt[i - 1]
            mt[i] = ((mt[i] ^ ((prev ^ (prev >> 30)) * 1566083941)) - i) & 0xFFFFFFFF
            i += 1
            if i >= _N:
                mt[0] = mt[_N - 1]
                i = 1
        mt[0] = 0x80000000
        return cls(np.array(mt, dtype=np.uint32))

    def _refill(self) -> None:
        stream = self._stream
        if self._end:
            stream[0] = stream[-1]
        xor, band = np.bitwise_xor, np.bitwise_and
        for dst, cur, nxt, far, y, z in self._chunks:
            # y = (cur & UPPER) | (nxt & LOWER)
            xor(cur, nxt, out=y)
            band(y, _LOWER, out=y)
            xor(y, cur, out=y)
            band(y, _ONE, out=z)
            np.multiply(z, _MATRIX_A, out=z)
            np.right_shift(y, _ONE, out=y)
            xor(y, z, out=y)
            xor(far, y, out=dst)
        y, z = self._y, self._z
        np.right_shift(self._fresh, _S11, out=z)
        xor(self._fresh, z, out=y)
        np.left_shift(y, _S7, out=z)
        band(z, _TB, out=z)
        xor(y, z, out=y)
        np.left_shift(y, _S15, out=z)
        band(z, _TC, out=z)
        xor(y, z, out=y)
        np.right_shift(y, _S18, out=z)
        xor(y, z, out=y)
        self._raw = y.astype("<u4", copy=False).tobytes()
        self._pos = 0
        self._end = y.size

    def next_u32(self) -> int:
        if self._pos >= self._end:
            self._refill()
        p = self._pos
        self._pos = p + 1
        return int.from_bytes(self._raw[4 * p:4 * p + 4], "little")

    def getrandbits256(self) -> int:
        """Compose 8 consecutive outputs, first output least significant."""
        p = self._pos
        if p + 8 <= self._end:
            self._pos = p + 8
            # little-endian words in draw order == first word least significant
            return int.from_bytes(self._raw[4 * p:4 * p + 32], "little")
        value = 0
        for k in range(8):
            value |= self.next_u32() << (32 * k)
        return value


# ---------------------------------------------------------------------------
# Sources


class RandomSource(Protocol):
    name: str
    deterministic: bool

    def next_block(self) -> int: ...

    def reseed(self, seed: int) -> None: ...

    @property
    def seed_label(self) -> str: ...


def _initial_seed(seed: int | None) -> tuple[int, str]:
    if seed is None:
        return int.from_bytes(os_entropy(BLOCK_BYTES), "big"), "os-entropy"
    return seed, "user"


class MersenneTwisterSource:
    """MT19937 seeded from a 256-bit value via ``init_by_array`` (8 words)."""

    name = "mt"
    deterministic = True

    def __init__(self, seed: int | None = None):
        seed, self.seed_origin = _initial_seed(seed)
        self.reseed(seed)

    def reseed(self, seed: int) -> None:
        self.seed = seed
        self.state = Mt19937.from_words(seed_to_words(seed))
        # skip one call layer on the benchmarked hot path, unless a subclass
        # overrides next_block
        if type(self).next_block is MersenneTwisterSource.next_block:
            self.next_block = self.state.getrandbits256

    @property
    def seed_label(self) -> str:
        return f"{self.seed:064x}"

    def next_block(self) -> int:
        return self.state.getrandbits256()


class OsEntropySource:
    """Blocks read straight from the OS randomness pool; not seedable."""

    name = "osrandom"
    deterministic = False
    seed_origin = "os-entropy"
    seed_label = "os-entropy"

    def reseed(self, seed: int) -> None:
        pass

    def next_block(self) -> int:
        return int.from_bytes(os_entropy(BLOCK_BYTES), "big")


class EmnGenerator:
    """Entropy Mixing Network over a base PRNG.

    One call to :meth:`next_block` is one generation cycle:

    1. ``R`` is drawn from the base PRNG;
    2. on cycles where ``cycle % f == 0`` (cycle 0 included), 32 bytes ``E``
       are captured and the mixing state becomes ``SHA256(S xor E)``;
    3. the output is ``S xor R``;
    4. ``S`` is refreshed from the base PRNG (skipped when
       ``persist_mixed_state`` is set, so the mixed state carries over).

    ``entropy_source`` takes a byte count and returns that many bytes; it
    defaults to :func:`os_entropy` and can be swapped for a deterministic
    stub in tests.
    """

    name = "emn"
    deterministic = False

    def __init__(
        self,
        base: RandomSource | None = None,
        injection_frequency: int = DEFAULT_INJECTION_FREQUENCY,
        seed: int | None = None,
        entropy_source: EntropySource | None = None,
        persist_mixed_state: bool = False,
    ):
        if injection_frequency < 1:
            raise ValueError("injection frequency must be a positive integer")
        self.injection_frequency = injection_frequency
        self.persist_mixed_state = persist_mixed_state
        self.entropy_source = entropy_source or os_entropy
        seed, self.seed_origin = _initial_seed(seed)
        self.base = base if base is not None else MersenneTwisterSource(seed)
        self.reseed(seed)

    def reseed(self, seed: int) -> None:
        self.seed = seed
        self.base.reseed(seed)
        self.s = self.base.next_block()
        self.cycle = 0
        self.hash_count = 0

    @property
    def seed_label(self) -> str:
        return f"{self.seed:064x}"

    def _inject(self) -> None:
        e = self.entropy_source(BLOCK_BYTES)
        if len(e) != BLOCK_BYTES:
            raise EntropyUnavailableError(
                f"entropy source returned {len(e)} bytes, expected {BLOCK_BYTES}"
            )
        mixed = sha256(block_to_bytes(self.s ^ int.from_bytes(e, "big")))
        self.s = int.from_bytes(mixed, "big")
        self.hash_count += 1

    def next_block(self) -> int:
        r = self.base.next_block()
        if self.cycle % self.injection_frequency == 0:
            self._inject()
        out = self.s ^ r
        if not self.persist_mixed_state:
            self.s = self.base.next_block()
        self.cycle += 1
        return out


# ---------------------------------------------------------------------------
# Samples


@dataclass(frozen=True)
class ByteSample:
    """A byte sequence under evaluation plus where it came from."""

    data: bytes
    generator: str = "unknown"
    seed: str = "none"
    seed_origin: str = "none"
    array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "array", np.frombuffer(self.data, dtype=np.uint8))

    def __len__(self) -> int:
        return len(self.data)


def source_bytes(src: RandomSource, n: int) -> ByteSample:
    """Draw ``ceil(n / 32)`` blocks from ``src`` and keep the first ``n`` bytes."""
    if n < 1:
        raise ValueError("sample length must be at least 1 byte")
    n_blocks = -(-n // BLOCK_BYTES)
    data = b"".join(block_to_bytes(src.next_block()) for _ in range(n_blocks))[:n]
    return ByteSample(
        data=data,
        generator=src.name,
        seed=src.seed_label,
        seed_origin=getattr(src, "seed_origin", "none"),
    )


def make_source(
    name: str,
    seed: int | None = None,
    injection_frequency: int = DEFAULT_INJECTION_FREQUENCY,
    persist_mixed_state: bool = False,
) -> RandomSource:
    """Build one of the named generators: ``emn``, ``mt`` or ``osrandom``."""
    if name == "emn":
        return EmnGenerator(
            injection_frequency=injection_frequency,
            seed=seed,
            persist_mixed_state=persist_mixed_state,
        )
    if name == "mt":
        return MersenneTwisterSource(seed)
    if name == "osrandom":
        return OsEntropySource()
    raise ValueError(f"unknown generator {name!r}")


GENERATOR_NAMES = ("emn", "osrandom", "mt")

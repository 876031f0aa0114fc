import random

import numpy as np
import pytest

from emn.generators import BLOCK_BYTES

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")


def reference_mt_raw(seed, count):
    """Raw 32-bit MT19937 outputs from numpy's implementation (independent oracle).

    An int seeds via init_genrand, a word list via init_by_array.  numpy
    squeezes one-word arrays to a scalar, so those go through random.Random,
    which always uses init_by_array.
    """
    if not isinstance(seed, int) and len(seed) == 1:
        ref = random.Random(int(seed[0]))
        return [ref.getrandbits(32) for _ in range(count)]
    bg = np.random.MT19937()
    if isinstance(seed, int):
        bg._legacy_seeding(seed)
    else:
        bg._legacy_seeding(np.asarray(seed, dtype=np.uint32))
    return [int(v) for v in bg.random_raw(count)]


def reference_blocks(seed: int, count: int) -> list[int]:
    """256-bit blocks: 8 reference outputs each, first output least significant."""
    words = [(seed >> (32 * i)) & 0xFFFFFFFF for i in range(8)]
    raw = reference_mt_raw(words, 8 * count)
    return [
        sum(raw[8 * b + k] << (32 * k) for k in range(8))
        for b in range(count)
    ]


class StubEntropy:
    """Deterministic entropy capability; records every request."""

    def __init__(self, chunks=None):
        self.chunks = chunks
        self.calls = 0

    def __call__(self, n):
        assert n == BLOCK_BYTES
        if self.chunks is None:
            out = bytes([self.calls % 256]) * n
        else:
            out = self.chunks[self.calls]
        self.calls += 1
        return out


class BiasedSource:
    """Each byte is 0 with probability 1/2, otherwise uniform on 0..255."""

    name = "biased"
    deterministic = True
    seed_origin = "user"

    def __init__(self, seed=7):
        self.seed = seed
        self.reseed(seed)

    def reseed(self, seed):
        self._rng = np.random.default_rng(seed)

    @property
    def seed_label(self):
        return f"{self.seed:064x}"

    def next_block(self):
        values = self._rng.integers(0, 256, BLOCK_BYTES, dtype=np.uint8)
        zero = self._rng.random(BLOCK_BYTES) < 0.5
        values[zero] = 0
        return int.from_bytes(values.tobytes(), "big")


@pytest.fixture
def stub_entropy():
    return StubEntropy()


@pytest.fixture
def biased_source():
    return BiasedSource()

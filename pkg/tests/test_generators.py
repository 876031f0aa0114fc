import hashlib
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import StubEntropy, reference_blocks, reference_mt_raw
from emn import generators
from emn.errors import EntropyUnavailableError
from emn.generators import (
    BLOCK_MASK,
    EmnGenerator,
    MersenneTwisterSource,
    Mt19937,
    OsEntropySource,
    block_from_bytes,
    block_to_bytes,
    make_source,
    os_entropy,
    parse_seed_hex,
    seed_to_words,
    source_bytes,
)
from emn.stats import chi_squared_test

SEED = 0xC0FFEE00_11223344_55667788_99AABBCC_DDEEFF00_01234567_89ABCDEF_FEDCBA98

blocks256 = st.integers(min_value=0, max_value=BLOCK_MASK)


# --- MT19937 ---------------------------------------------------------------


def test_mt_scalar_seed_first_outputs():
    mt = Mt19937.from_scalar(5489)
    assert [mt.next_u32() for _ in range(3)] == [3499211612, 581869302, 3890346734]


def test_mt_array_seed_first_output():
    mt = Mt19937.from_words([0x123, 0x234, 0x345, 0x456])
    assert mt.next_u32() == 1067595299


@pytest.mark.parametrize("seed", [5489, [0x123, 0x234, 0x345, 0x456], seed_to_words(SEED), [0]])
def test_mt_stream_matches_reference(seed):
    mt = Mt19937.from_scalar(seed) if isinstance(seed, int) else Mt19937.from_words(seed)
    n = 12_000
    assert [mt.next_u32() for _ in range(n)] == reference_mt_raw(seed, n)


def test_mt_twist_boundary():
    mt = Mt19937.from_scalar(5489)
    out = [mt.next_u32() for _ in range(625)]
    assert out[623:] == reference_mt_raw(5489, 625)[623:]


def test_mt_index_and_state_window():
    mt = Mt19937.from_scalar(5489)
    assert mt.index == 624
    seeded = mt.mt
    for _ in range(624):
        mt.next_u32()
    assert mt.index == 624
    bg = np.random.MT19937()
    bg._legacy_seeding(5489)
    bg.random_raw(624)
    assert np.array_equal(mt.mt, bg.state["state"]["key"])
    mt.next_u32()
    assert mt.index == 1
    assert not np.array_equal(mt.mt, seeded)


def test_mt_mixed_word_and_block_draws_stay_in_sequence():
    mt = Mt19937.from_scalar(5489)
    ref = reference_mt_raw(5489, 8 * 700 + 3)
    got = [mt.next_u32() for _ in range(3)]
    for _ in range(700):
        block = mt.getrandbits256()
        got += [(block >> (32 * k)) & 0xFFFFFFFF for k in range(8)]
    assert got == ref


def test_mt_seed_errors():
    with pytest.raises(ValueError):
        Mt19937.from_words([])
    with pytest.raises(ValueError):
        Mt19937.from_words([1] * 625)
    with pytest.raises(ValueError):
        Mt19937(np.zeros(624, dtype=np.uint32))


def test_getrandbits256_composition():
    mt = Mt19937.from_scalar(5489)
    first = mt.getrandbits256()
    assert first & 0xFFFFFFFF == 3499211612
    assert (first >> 32) & 0xFFFFFFFF == 581869302
    assert first < 2**256


def test_getrandbits256_matches_python_random():
    # random.Random seeds with init_by_array over the seed's 32-bit words,
    # so an 8-word seed with a non-zero top word lines up exactly
    ref = random.Random(SEED)
    src = MersenneTwisterSource(SEED)
    for _ in range(2000):
        assert src.next_block() == ref.getrandbits(256)


def test_mt_source_reseed_replays():
    src = MersenneTwisterSource(SEED)
    a = [src.next_block() for _ in range(100)]
    src.reseed(SEED)
    assert [src.next_block() for _ in range(100)] == a
    assert a == reference_blocks(SEED, 100)


def test_mt_source_without_seed_draws_from_os():
    src = MersenneTwisterSource()
    assert src.seed_origin == "os-entropy"
    assert len(src.seed_label) == 64


# --- blocks and seeds ---------------------------------------------------------


@given(blocks256, blocks256)
def test_xor_algebra(a, b):
    assert (a ^ b) ^ b == a
    assert 0 <= a ^ b <= BLOCK_MASK


@given(blocks256)
def test_block_bytes_round_trip(block):
    data = block_to_bytes(block)
    assert len(data) == 32
    assert block_from_bytes(data) == block


def test_block_encoding_is_big_endian():
    assert block_to_bytes(1) == b"\x00" * 31 + b"\x01"


def test_seed_words_are_little_endian():
    words = seed_to_words(SEED)
    assert words[0] == 0xFEDCBA98
    assert words[7] == 0xC0FFEE00


def test_parse_seed_hex():
    assert parse_seed_hex("0" * 64) == 0
    assert parse_seed_hex("f" * 64) == BLOCK_MASK
    for bad in ["0" * 63, "0" * 65, "g" * 64, ""]:
        with pytest.raises(ValueError):
            parse_seed_hex(bad)


# --- OS entropy ------------------------------------------------------------


def test_os_entropy_sizes():
    assert os_entropy(0) == b""
    a, b = os_entropy(32), os_entropy(32)
    assert len(a) == 32 and a != b
    with pytest.raises(ValueError):
        os_entropy(-1)


def test_os_entropy_pool_is_uniform():
    pooled = b"".join(os_entropy(32) for _ in range(10_000))
    assert chi_squared_test(pooled).p_value > 0.001


def test_os_entropy_unavailable_is_not_masked(monkeypatch):
    def broken(n):
        raise NotImplementedError("no entropy source")

    monkeypatch.setattr(generators.os, "urandom", broken)
    with pytest.raises(EntropyUnavailableError):
        os_entropy(32)
    with pytest.raises(EntropyUnavailableError):
        OsEntropySource().next_block()
    with pytest.raises(EntropyUnavailableError):
        EmnGenerator(seed=SEED).next_block()


# --- EMN -----------------------------------------------------------------


def _sha_int(value):
    return int.from_bytes(hashlib.sha256(value.to_bytes(32, "big")).digest(), "big")


def test_emn_rejects_zero_frequency():
    with pytest.raises(ValueError):
        EmnGenerator(seed=SEED, injection_frequency=0)


def test_emn_first_cycle_with_zero_entropy():
    zeros = StubEntropy([b"\x00" * 32] * 4)
    emn = EmnGenerator(seed=SEED, injection_frequency=1, entropy_source=zeros)
    s0, r0 = reference_blocks(SEED, 2)
    assert emn.next_block() == _sha_int(s0) ^ r0


def test_emn_non_injection_cycle_is_plain_xor():
    emn = EmnGenerator(seed=SEED, injection_frequency=4, entropy_source=StubEntropy())
    b = reference_blocks(SEED, 8)
    outputs = [emn.next_block() for _ in range(3)]
    # cycle 1: S = block 2 (refreshed after cycle 0), R = block 3
    assert outputs[1] == b[2] ^ b[3]
    assert outputs[2] == b[4] ^ b[5]


@pytest.mark.parametrize("f", [1, 3, 16])
def test_emn_injects_on_multiples_of_f(f):
    stub = StubEntropy()
    emn = EmnGenerator(seed=SEED, injection_frequency=f, entropy_source=stub)
    injected_on = []
    for cycle in range(50):
        before = stub.calls
        emn.next_block()
        if stub.calls != before:
            injected_on.append(cycle)
    assert injected_on == list(range(0, 50, f))
    assert emn.cycle == 50


def test_emn_default_frequency_is_16():
    emn = EmnGenerator(seed=SEED, entropy_source=StubEntropy())
    assert emn.injection_frequency == 16


def test_emn_deterministic_under_fixed_entropy():
    a = EmnGenerator(seed=SEED, injection_frequency=5, entropy_source=StubEntropy())
    b = EmnGenerator(seed=SEED, injection_frequency=5, entropy_source=StubEntropy())
    assert [a.next_block() for _ in range(200)] == [b.next_block() for _ in range(200)]


def test_emn_reseed_replays():
    emn = EmnGenerator(seed=SEED, injection_frequency=3, entropy_source=StubEntropy())
    first = [emn.next_block() for _ in range(20)]
    emn.reseed(SEED)
    emn.entropy_source = StubEntropy()
    assert [emn.next_block() for _ in range(20)] == first


def test_emn_entropy_changes_output():
    a = EmnGenerator(seed=SEED, entropy_source=StubEntropy([b"\x00" * 32]))
    b = EmnGenerator(seed=SEED, entropy_source=StubEntropy([b"\x01" * 32]))
    assert a.next_block() != b.next_block()


def test_emn_rejects_short_entropy():
    emn = EmnGenerator(seed=SEED, entropy_source=lambda n: b"\x00" * 16)
    with pytest.raises(EntropyUnavailableError):
        emn.next_block()


def test_emn_persist_mixed_state_variant():
    stub = StubEntropy()
    emn = EmnGenerator(seed=SEED, injection_frequency=4, entropy_source=stub,
                       persist_mixed_state=True)
    b = reference_blocks(SEED, 4)
    s = _sha_int(b[0] ^ int.from_bytes(bytes([0]) * 32, "big"))
    assert emn.next_block() == s ^ b[1]
    # mixed state carries into the next non-injection cycle
    assert emn.next_block() == s ^ b[2]


def test_emn_accepts_custom_base():
    base = MersenneTwisterSource(SEED)
    emn = EmnGenerator(base=base, seed=SEED, entropy_source=StubEntropy())
    assert emn.base is base
    assert emn.s == reference_blocks(SEED, 1)[0]


# --- samples ----------------------------------------------------------------


class CountingSource(MersenneTwisterSource):
    def __init__(self, seed):
        self.blocks = 0
        super().__init__(seed)

    def next_block(self):
        self.blocks += 1
        return self.state.getrandbits256()


@pytest.mark.parametrize("n, blocks", [(1, 1), (32, 1), (33, 2), (64, 2), (100, 4)])
def test_source_bytes_block_count(n, blocks):
    src = CountingSource(SEED)
    sample = source_bytes(src, n)
    assert len(sample) == n
    assert src.blocks == blocks


def test_source_bytes_serializes_big_endian_blocks():
    sample = source_bytes(MersenneTwisterSource(SEED), 33)
    blocks = reference_blocks(SEED, 2)
    assert sample.data == blocks[0].to_bytes(32, "big") + blocks[1].to_bytes(32, "big")[:1]


def test_source_bytes_provenance_and_determinism():
    a = source_bytes(make_source("mt", seed=SEED), 1000)
    b = source_bytes(make_source("mt", seed=SEED), 1000)
    assert a.data == b.data
    assert a.generator == "mt"
    assert a.seed == f"{SEED:064x}"
    assert a.seed_origin == "user"


def test_source_bytes_rejects_empty():
    with pytest.raises(ValueError):
        source_bytes(MersenneTwisterSource(SEED), 0)


def test_make_source_names():
    assert make_source("emn", seed=SEED).name == "emn"
    assert make_source("osrandom").seed_label == "os-entropy"
    with pytest.raises(ValueError):
        make_source("nope")


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=2**256 - 1))
def test_mt_source_matches_reference_for_any_seed(seed):
    src = MersenneTwisterSource(seed)
    assert [src.next_block() for _ in range(5)] == reference_blocks(seed, 5)

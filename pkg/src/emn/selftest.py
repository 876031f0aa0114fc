"""Embedded known-answer vectors, run by ``emn selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import Mt19937
from .hashing import sha256
from .stats import chi_squared_p_value, fft_radix2, gamma_q

SHA256_VECTORS = [
    (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
    (b"a" * 1_000_000, "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"),
]

# (seed kind, seed, {1-based output position: value})
MT_VECTORS = [
    ("scalar", 5489, {1: 3499211612, 2: 581869302, 3: 3890346734, 10000: 4123659995}),
    (
        "array",
        [0x123, 0x234, 0x345, 0x456],
        {1: 1067595299, 2: 955945823, 3: 477289528, 4: 4107218783, 5: 4228976476},
    ),
]

# (a, x, expected Q(a, x), absolute tolerance)
GAMMA_VECTORS = [
    (0.5, 0.5, math.erfc(math.sqrt(0.5)), 1e-10),
    (1.0, 1.0, math.exp(-1.0), 1e-10),
    (3.0, 0.0, 1.0, 0.0),
]

# chi-squared statistic at 255 degrees of freedom -> published p-value
CHI_ANCHORS = [(220.3392, 0.9430), (244.6080, 0.6689), (253.1072, 0.5217)]
CHI_ANCHOR_TOL = 5e-4


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def _sha_checks() -> list[Check]:
    out = []
    for msg, want in SHA256_VECTORS:
        got = sha256(msg).hex()
        label = f"sha256 len={len(msg)}"
        out.append(Check(label, got == want, "" if got == want else f"got {got}"))
    return out


def _mt_checks() -> list[Check]:
    out = []
    for kind, seed, expected in MT_VECTORS:
        state = Mt19937.from_scalar(seed) if kind == "scalar" else Mt19937.from_words(seed)
        stream = [state.next_u32() for _ in range(max(expected))]
        bad = {k: stream[k - 1] for k, v in expected.items() if stream[k - 1] != v}
        out.append(Check(f"mt19937 {kind} seed", not bad, f"mismatch at {bad}" if bad else ""))
    return out


def _gamma_checks() -> list[Check]:
    out = []
    for a, x, want, tol in GAMMA_VECTORS:
        got = gamma_q(a, x)
        ok = abs(got - want) <= tol
        out.append(Check(f"gamma_q({a}, {x})", ok, "" if ok else f"got {got!r}, want {want!r}"))
    for stat, want in CHI_ANCHORS:
        got = chi_squared_p_value(stat, 255)
        ok = abs(got - want) <= CHI_ANCHOR_TOL
        out.append(Check(f"chi2 p-value at {stat}", ok, "" if ok else f"got {got:.6f}, want {want}"))
    return out


def _fft_check() -> Check:
    rng = np.random.default_rng(2024)
    x = rng.standard_normal(256)
    n = x.size
    k = np.arange(n)
    direct = np.exp(-2j * np.pi * np.outer(k, k) / n) @ x
    err = float(np.max(np.abs(fft_radix2(x) - direct)) / np.max(np.abs(direct)))
    return Check("fft vs direct dft (n=256)", err <= 1e-9, f"relative error {err:.2e}")


def run_selftest() -> list[Check]:
    return [*_sha_checks(), *_mt_checks(), *_gamma_checks(), _fft_check()]

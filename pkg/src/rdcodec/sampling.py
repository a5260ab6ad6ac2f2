"""Seed-reproducible sampling of source messages and reproduction databases.

The generator is pinned: PCG64DXSM seeded through numpy's SeedSequence
with a 64-bit seed, one 64-bit draw per symbol mapped to [0,1) with
53-bit precision (Generator.random), then an inverse-CDF lookup against
cumulative pmf thresholds.  The thresholds are accumulated exactly with
Fraction before rounding to doubles, so encoder and decoder derive
identical databases from identical pmf reals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidPmf, MemoryCap

DEFAULT_SYMBOL_CAP = 2 ** 28
_GEN_CHUNK = 2 ** 24   # bounds the temporary uniform buffer to 128 MB

Seed = int  # 64-bit unsigned; wider ints are reduced mod 2^64

_MESSAGE_SEED_OFFSET = 0x9E3779B97F4A7C15


def derived_message_seed(seed: Seed) -> Seed:
    """Message-sampling seed decorrelated from the database seed.

    One run seed drives both streams: the database uses the seed itself,
    the source message uses this fixed 64-bit offset of it.
    """
    return (seed + _MESSAGE_SEED_OFFSET) & 0xFFFFFFFFFFFFFFFF


def _dtype_for(alphabet_size: int):
    if alphabet_size <= 256:
        return np.uint8
    if alphabet_size <= 65536:
        return np.uint16
    return np.uint32


@dataclass(frozen=True)
class SymbolBlock:
    """A sequence of symbol indices plus the alphabet they index into."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        arr = np.asarray(self.symbols)
        if arr.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if arr.size and int(arr.max()) >= self.alphabet_size:
            raise ValueError("symbol index out of range for alphabet")
        if arr.dtype != _dtype_for(self.alphabet_size):
            arr = arr.astype(_dtype_for(self.alphabet_size))
        object.__setattr__(self, "symbols", arr)
        self.symbols.setflags(write=False)

    def __len__(self) -> int:
        return int(self.symbols.size)

    @classmethod
    def from_list(cls, values, alphabet_size: int) -> "SymbolBlock":
        return cls(np.asarray(values, dtype=_dtype_for(alphabet_size)), alphabet_size)


def _validate_pmf(pmf) -> list[float]:
    vals = [float(p) for p in pmf]
    if not vals:
        raise InvalidPmf("empty pmf")
    if any(p < 0.0 for p in vals):
        raise InvalidPmf("pmf entries must be >= 0")
    if abs(sum(vals) - 1.0) > 1e-12:
        raise InvalidPmf(f"pmf sums to {sum(vals)!r}, not 1")
    return vals


def cumulative_thresholds(pmf) -> np.ndarray:
    """Upper cell boundaries T_s = p_0 + ... + p_s for s < |A|-1.

    Symbol(u) = number of thresholds <= u, so a larger uniform draw never
    selects a smaller symbol.  Partial sums are exact (Fraction) before
    the final rounding to double.
    """
    vals = _validate_pmf(pmf)
    acc = Fraction(0)
    out = []
    for p in vals[:-1]:
        acc += Fraction(p)
        out.append(float(acc))
    return np.asarray(out, dtype=np.float64)


def sample_block(pmf, n: int, seed: Seed) -> SymbolBlock:
    """n i.i.d. draws from pmf, bit-for-bit reproducible from the seed."""
    vals = _validate_pmf(pmf)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    thresholds = cumulative_thresholds(vals)
    k = len(vals)
    if k == 1:
        return SymbolBlock(np.zeros(n, dtype=_dtype_for(k)), k)
    rng = np.random.Generator(np.random.PCG64DXSM(seed & 0xFFFFFFFFFFFFFFFF))
    out = np.empty(n, dtype=_dtype_for(k))
    buf = np.empty(min(n, _GEN_CHUNK), dtype=np.float64)
    for start in range(0, n, _GEN_CHUNK):
        stop = min(start + _GEN_CHUNK, n)
        u = buf[: stop - start]
        rng.random(out=u)
        chunk = out[start:stop]
        if k == 2:
            np.greater_equal(u, thresholds[0], out=chunk.view(np.bool_))
        elif k <= 8:
            # symbol(u) = #(thresholds <= u); a few vector compares beat
            # searchsorted for small alphabets
            np.greater_equal(u, thresholds[0], out=chunk.view(np.bool_))
            for t in thresholds[1:]:
                chunk += u >= t
        else:
            chunk[:] = np.searchsorted(thresholds, u, side="right")
    return SymbolBlock(out, k)


def generate_database(q_star, m: int, seed: Seed,
                      symbol_cap: int = DEFAULT_SYMBOL_CAP) -> SymbolBlock:
    """Shared i.i.d. reproduction database of m symbols drawn from q_star."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m > symbol_cap:
        raise MemoryCap(f"database of {m} symbols exceeds the cap of {symbol_cap}")
    return sample_block(q_star, m, seed)


def database_checksum(block: SymbolBlock, prefix: int = 64) -> int:
    """16-bit checksum of the first `prefix` symbols; guards seed mismatches."""
    import zlib

    head = np.ascontiguousarray(block.symbols[:prefix])
    return zlib.crc32(head.tobytes()) & 0xFFFF

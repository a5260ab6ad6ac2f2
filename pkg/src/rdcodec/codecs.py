"""The three codecs: GVW (random codebook), LLZ (fixed-database parse)
and HYB (sliding-window database), with bit-exact stream formats.

GVW and HYB are fixed-rate: each of the ceil(n/l) blocks costs exactly
B = ceil(log2 W) bits.  LLZ is fixed-distortion: each phrase costs a
length field plus the cheaper of a database pointer or a zero-distortion
literal.  All derived quantities are computed once from micro-quantized
(gamma, D, alpha) so encoder and decoder agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from . import rd
from .bitio import BitReader, Bitstream, BitWriter
from .errors import (
    DistortionOutOfRange,
    IndexOutOfRange,
    ParamInvariantViolation,
    ParamMismatch,
    PointerOutOfRange,
    RuntimeFault,
    StreamLengthMismatch,
)
from .matching import longest_match, nearest_searcher
from .model import DistortionSpec, SourceModel
from .sampling import DEFAULT_SYMBOL_CAP, SymbolBlock, generate_database

MICRO = 10 ** 6

GVW_ID = 1
LLZ_ID = 2
HYB_ID = 3


def _micro(value: float) -> int:
    return round(value * MICRO)


def _ceil_log2(value: int) -> int:
    """ceil(log2 value) for an integer >= 2, exactly."""
    return (value - 1).bit_length()


def literal_field_bits(repro_alphabet_size: int, length: int) -> int:
    """ceil(length * log2 |Ahat|): bits for `length` base-|Ahat| digits."""
    return _ceil_log2(repro_alphabet_size ** length)


class PhraseRecord(NamedTuple):
    length: int
    mode: str               # "pointer" | "literal"
    position: Optional[int]  # 1-based db start; None for literals


@dataclass(frozen=True)
class EncodeReport:
    total_bits: int
    rate: float
    achieved_distortion: float
    reconstruction: SymbolBlock
    phrase_log: Optional[tuple[PhraseRecord, ...]] = None


def _derive_levels(source: SourceModel, dist: DistortionSpec, d_q: float,
                   gamma_q: float, working_offset: float):
    """(R(D)+gamma, D_bar, Q* at D_bar) with D_bar = D(R(D)+working_offset)."""
    dist.check_source(source)
    dmax = rd.d_max(source, dist).value
    if dmax <= 0.0:
        raise DistortionOutOfRange("degenerate distortion: Dmax must be > 0")
    if not 0.0 < d_q < dmax:
        raise DistortionOutOfRange(f"D={d_q} not in (0, Dmax={dmax})")
    r_d = rd.rate_distortion(source, dist, d_q).rate
    d_bar = rd.distortion_rate(source, dist, r_d + working_offset)
    q_star = rd.rate_distortion(source, dist, d_bar).q_star
    return r_d + gamma_q, d_bar, q_star


def _validate_base(p, kind: str) -> None:
    if p.n < 1 or p.l < 1:
        raise ParamInvariantViolation(f"{kind}: n and l must be >= 1")
    if p.gamma_micro <= 0 or p.d_micro <= 0:
        raise ParamInvariantViolation(f"{kind}: gamma and D must be > 0")
    if abs(sum(p.q_star) - 1.0) > 1e-9 or any(q < 0.0 for q in p.q_star):
        raise ParamInvariantViolation(f"{kind}: q_star is not a pmf")
    if 2.0 ** (p.l * p.rate) > p.symbol_cap:
        raise ParamInvariantViolation(
            f"{kind}: 2^(l*R) = 2^{p.l * p.rate:.2f} exceeds the symbol cap "
            f"{p.symbol_cap} (raise symbol_cap to override)"
        )


@dataclass(frozen=True)
class GvwParams:
    """Fixed-rate random-codebook parameters."""

    n: int
    l: int
    gamma_micro: int
    d_micro: int
    seed: int
    rate: float                  # R = R(D) + gamma
    d_bar: float                 # D(R(D) + gamma/2) <= D
    q_star: tuple[float, ...]
    symbol_cap: int = DEFAULT_SYMBOL_CAP

    codec_id = GVW_ID
    codec_name = "gvw"

    def __post_init__(self):
        _validate_base(self, "gvw")
        if self.candidate_count < 2:
            raise ParamInvariantViolation("gvw: codebook needs at least 2 words")
        if self.d_bar > self.d_target + 1e-12:
            raise ParamInvariantViolation("gvw: working distortion must not exceed D")

    @property
    def gamma(self) -> float:
        return self.gamma_micro / MICRO

    @property
    def d_target(self) -> float:
        return self.d_micro / MICRO

    @cached_property
    def candidate_count(self) -> int:
        return int(math.floor(2.0 ** (self.l * self.rate)))

    @cached_property
    def bits_per_block(self) -> int:
        return _ceil_log2(self.candidate_count)

    @property
    def block_count(self) -> int:
        return -(-self.n // self.l)

    @property
    def total_bits(self) -> int:
        return self.block_count * self.bits_per_block

    @property
    def memory_symbols(self) -> int:
        return self.l * self.candidate_count

    @classmethod
    def derive(cls, source: SourceModel, dist: DistortionSpec, *, d: float,
               gamma: float, l: int, n: int, seed: int,
               symbol_cap: int = DEFAULT_SYMBOL_CAP) -> "GvwParams":
        d_q, g_q = _micro(d) / MICRO, _micro(gamma) / MICRO
        rate, d_bar, q_star = _derive_levels(source, dist, d_q, g_q, g_q / 2.0)
        return cls(n=n, l=l, gamma_micro=_micro(gamma), d_micro=_micro(d),
                   seed=seed, rate=rate, d_bar=d_bar, q_star=q_star,
                   symbol_cap=symbol_cap)


@dataclass(frozen=True)
class HybParams:
    """Fixed-rate sliding-window database parameters."""

    n: int
    l: int
    gamma_micro: int
    d_micro: int
    seed: int
    rate: float
    d_bar: float                 # D(R(D) + gamma/2) <= D, as for GVW
    q_star: tuple[float, ...]
    symbol_cap: int = DEFAULT_SYMBOL_CAP

    codec_id = HYB_ID
    codec_name = "hyb"

    def __post_init__(self):
        _validate_base(self, "hyb")
        if self.candidate_count < 2:
            raise ParamInvariantViolation("hyb: need at least 2 candidate windows")
        if self.d_bar > self.d_target + 1e-12:
            raise ParamInvariantViolation("hyb: working distortion must not exceed D")
        if self.m != self.candidate_count + self.l - 1:
            raise ParamInvariantViolation("hyb: database length inconsistent")

    gamma = GvwParams.gamma
    d_target = GvwParams.d_target

    @cached_property
    def candidate_count(self) -> int:
        return int(math.floor(2.0 ** (self.l * self.rate)))

    @cached_property
    def m(self) -> int:
        return self.candidate_count + self.l - 1

    @cached_property
    def bits_per_block(self) -> int:
        return _ceil_log2(self.candidate_count)

    @property
    def block_count(self) -> int:
        return -(-self.n // self.l)

    @property
    def total_bits(self) -> int:
        return self.block_count * self.bits_per_block

    @property
    def memory_symbols(self) -> int:
        return self.m

    @classmethod
    def derive(cls, source: SourceModel, dist: DistortionSpec, *, d: float,
               gamma: float, l: int, n: int, seed: int,
               symbol_cap: int = DEFAULT_SYMBOL_CAP) -> "HybParams":
        d_q, g_q = _micro(d) / MICRO, _micro(gamma) / MICRO
        rate, d_bar, q_star = _derive_levels(source, dist, d_q, g_q, g_q / 2.0)
        return cls(n=n, l=l, gamma_micro=_micro(gamma), d_micro=_micro(d),
                   seed=seed, rate=rate, d_bar=d_bar, q_star=q_star,
                   symbol_cap=symbol_cap)


@dataclass(frozen=True)
class LlzParams:
    """Fixed-distortion variable-rate parse parameters."""

    n: int
    l: int
    alpha_micro: int
    gamma_micro: int
    d_micro: int
    seed: int
    rate: float                  # R = R(D) + gamma
    d_bar: float                 # D(R(D) - gamma/2) >= D
    q_star: tuple[float, ...]
    symbol_cap: int = DEFAULT_SYMBOL_CAP

    codec_id = LLZ_ID
    codec_name = "llz"

    def __post_init__(self):
        _validate_base(self, "llz")
        if self.alpha_micro <= 0:
            raise ParamInvariantViolation("llz: alpha must be > 0")
        if self.d_bar < self.d_target - 1e-12:
            raise ParamInvariantViolation("llz: working distortion must be >= D")
        ahat = len(self.q_star)
        # m > |Ahat| alone does not separate the L=1 literal from a pointer
        # when |Ahat| is not a power of two; require the bit widths to differ.
        if self.m <= ahat or literal_field_bits(ahat, 1) >= self.pointer_bits:
            raise ParamInvariantViolation(
                "llz: database too small to disambiguate literals from pointers"
            )

    gamma = GvwParams.gamma
    d_target = GvwParams.d_target

    @property
    def alpha(self) -> float:
        return self.alpha_micro / MICRO

    @cached_property
    def m(self) -> int:
        return int(math.floor(2.0 ** (self.l * self.rate))) + self.l - 1

    @cached_property
    def cap(self) -> int:
        return int(math.floor((1.0 + self.alpha) * self.l))

    @cached_property
    def length_bits(self) -> int:
        # computed from the un-floored (1+alpha)*l
        return math.ceil(math.log2((1.0 + self.alpha) * self.l))

    @cached_property
    def pointer_bits(self) -> int:
        return _ceil_log2(self.m)

    @property
    def memory_symbols(self) -> int:
        return self.m

    @classmethod
    def derive(cls, source: SourceModel, dist: DistortionSpec, *, d: float,
               gamma: float, alpha: float, l: int, n: int, seed: int,
               symbol_cap: int = DEFAULT_SYMBOL_CAP) -> "LlzParams":
        d_q, g_q = _micro(d) / MICRO, _micro(gamma) / MICRO
        rate, d_bar, q_star = _derive_levels(source, dist, d_q, g_q, -g_q / 2.0)
        return cls(n=n, l=l, alpha_micro=_micro(alpha), gamma_micro=_micro(gamma),
                   d_micro=_micro(d), seed=seed, rate=rate, d_bar=d_bar,
                   q_star=q_star, symbol_cap=symbol_cap)


CodecParams = GvwParams | LlzParams | HybParams


# --- shared helpers -----------------------------------------------------------

def _check_message(x: SymbolBlock, p, source: SourceModel) -> None:
    if len(x) != p.n:
        raise ParamMismatch(f"message has {len(x)} symbols, params expect {p.n}")
    if x.alphabet_size != source.alphabet_size:
        raise ParamMismatch("message alphabet does not match the source model")


def _make_database(p, dist: DistortionSpec) -> SymbolBlock:
    if dist.repro_alphabet_size != len(p.q_star):
        raise ParamMismatch("distortion reproduction alphabet does not match q_star")
    db = generate_database(p.q_star, p.memory_symbols, p.seed, p.symbol_cap)
    assert len(db) == p.memory_symbols  # memory accounting equals allocation
    return db


def _mean_distortion(dist: DistortionSpec, x: SymbolBlock, y: SymbolBlock) -> float:
    lut = dist.array()
    return float(lut[x.symbols.astype(np.int64), y.symbols.astype(np.int64)].mean())


def _fixed_rate_encode(x: SymbolBlock, p, source: SourceModel,
                       dist: DistortionSpec, db: SymbolBlock, mode: str,
                       stride: int, workers: int, early_abandon: bool):
    _check_message(x, p, source)
    writer = BitWriter()
    rec = np.empty(p.n, dtype=db.symbols.dtype)
    search = nearest_searcher(db, dist, mode, p.candidate_count, p.l,
                              workers=workers, early_abandon=early_abandon)
    for bi in range(p.block_count):
        lo = bi * p.l
        hi = min(lo + p.l, p.n)
        block = SymbolBlock(x.symbols[lo:hi], x.alphabet_size)
        found = search(block)
        idx = found.position - 1
        writer.write(idx, p.bits_per_block)
        start = idx * stride
        rec[lo:hi] = db.symbols[start:start + (hi - lo)]
    stream = writer.getvalue()
    recon = SymbolBlock(rec, dist.repro_alphabet_size)
    report = EncodeReport(
        total_bits=stream.bit_length,
        rate=stream.bit_length / p.n,
        achieved_distortion=_mean_distortion(dist, x, recon),
        reconstruction=recon,
    )
    return stream, report


def _fixed_rate_decode(stream: Bitstream, p, dist: DistortionSpec,
                       db: SymbolBlock, stride: int) -> SymbolBlock:
    if stream.bit_length != p.total_bits:
        raise StreamLengthMismatch(
            f"stream has {stream.bit_length} bits, expected {p.total_bits}"
        )
    reader = BitReader(stream)
    rec = np.empty(p.n, dtype=db.symbols.dtype)
    for bi in range(p.block_count):
        lo = bi * p.l
        hi = min(lo + p.l, p.n)
        idx = reader.read(p.bits_per_block)
        if idx >= p.candidate_count:
            raise IndexOutOfRange(f"index {idx} >= candidate count {p.candidate_count}")
        start = idx * stride
        rec[lo:hi] = db.symbols[start:start + (hi - lo)]
    return SymbolBlock(rec, dist.repro_alphabet_size)


# --- GVW ----------------------------------------------------------------------

def gvw_encode(x: SymbolBlock, p: GvwParams, source: SourceModel,
               dist: DistortionSpec, workers: int = 1,
               early_abandon: bool = True) -> tuple[Bitstream, EncodeReport]:
    """Encode each length-l block as the index of its nearest codeword."""
    db = _make_database(p, dist)
    return _fixed_rate_encode(x, p, source, dist, db, "strided", p.l,
                              workers, early_abandon)


def gvw_decode(stream: Bitstream, p: GvwParams, dist: DistortionSpec) -> SymbolBlock:
    db = _make_database(p, dist)
    return _fixed_rate_decode(stream, p, dist, db, p.l)


# --- HYB ----------------------------------------------------------------------

def hyb_encode(x: SymbolBlock, p: HybParams, source: SourceModel,
               dist: DistortionSpec, workers: int = 1,
               early_abandon: bool = True) -> tuple[Bitstream, EncodeReport]:
    """Encode each block as the start of its nearest sliding window."""
    db = _make_database(p, dist)
    return _fixed_rate_encode(x, p, source, dist, db, "sliding", 1,
                              workers, early_abandon)


def hyb_decode(stream: Bitstream, p: HybParams, dist: DistortionSpec) -> SymbolBlock:
    db = _make_database(p, dist)
    return _fixed_rate_decode(stream, p, dist, db, 1)


# --- LLZ ----------------------------------------------------------------------

def llz_phrase_cost(p: LlzParams, length: int) -> int:
    """Description length of one phrase: length field + cheaper payload."""
    return p.length_bits + min(p.pointer_bits,
                               literal_field_bits(len(p.q_star), length))


def llz_description_length(p: LlzParams, phrase_log) -> int:
    """Total stream length recomputed from a phrase log."""
    return sum(llz_phrase_cost(p, rec.length) for rec in phrase_log)


def llz_encode(x: SymbolBlock, p: LlzParams, source: SourceModel,
               dist: DistortionSpec, workers: int = 1,
               early_abandon: bool = True) -> tuple[Bitstream, EncodeReport]:
    """Parse the message into longest-match phrases within budget d_bar.

    Each phrase is sent as (L-1) in the length field, then either a
    database pointer or, when strictly cheaper, the phrase itself through
    the zero-distortion symbol map.  The decoder infers the mode from L,
    so ties must go to the pointer.
    """
    _check_message(x, p, source)
    db = _make_database(p, dist)
    ahat = len(p.q_star)
    phi = dist.zero_distortion_map()
    writer = BitWriter()
    rec = np.empty(p.n, dtype=db.symbols.dtype)
    phrases: list[PhraseRecord] = []
    pos = 0
    while pos < p.n:
        suffix = SymbolBlock(x.symbols[pos:], x.alphabet_size)
        found = longest_match(suffix, db, dist, p.d_bar, p.cap,
                              workers=workers, early_abandon=early_abandon)
        length = found.length if found.length >= 1 else 1
        lit_bits = literal_field_bits(ahat, length)
        writer.write(length - 1, p.length_bits)
        if lit_bits < p.pointer_bits:
            value = 0
            for sym in x.symbols[pos:pos + length]:
                digit = phi[sym]
                value = value * ahat + digit
                rec[pos] = digit
                pos += 1
            writer.write(value, lit_bits)
            phrases.append(PhraseRecord(length, "literal", None))
        else:
            start = found.position - 1
            writer.write(start, p.pointer_bits)
            rec[pos:pos + length] = db.symbols[start:start + length]
            pos += length
            phrases.append(PhraseRecord(length, "pointer", found.position))
    stream = writer.getvalue()
    recon = SymbolBlock(rec, dist.repro_alphabet_size)
    achieved = _mean_distortion(dist, x, recon)
    if achieved > p.d_bar + 1e-9:
        raise RuntimeFault(
            f"llz distortion {achieved} exceeds the working budget {p.d_bar}"
        )
    report = EncodeReport(
        total_bits=stream.bit_length,
        rate=stream.bit_length / p.n,
        achieved_distortion=achieved,
        reconstruction=recon,
        phrase_log=tuple(phrases),
    )
    return stream, report


def llz_decode(stream: Bitstream, p: LlzParams, dist: DistortionSpec,
               n: int | None = None) -> SymbolBlock:
    if n is None:
        n = p.n
    elif n != p.n:
        raise ParamMismatch(f"n={n} does not match params n={p.n}")
    db = _make_database(p, dist)
    ahat = len(p.q_star)
    reader = BitReader(stream)
    rec = np.empty(n, dtype=db.symbols.dtype)
    emitted = 0
    while emitted < n:
        length = reader.read(p.length_bits) + 1
        if length > p.cap:
            raise StreamLengthMismatch(f"phrase length {length} exceeds cap {p.cap}")
        if emitted + length > n:
            raise StreamLengthMismatch("phrase overruns the message length")
        lit_bits = literal_field_bits(ahat, length)
        if lit_bits < p.pointer_bits:
            value = reader.read(lit_bits)
            if value >= ahat ** length:
                raise StreamLengthMismatch("literal field value out of range")
            for j in range(length - 1, -1, -1):
                rec[emitted + j] = value % ahat
                value //= ahat
        else:
            start = reader.read(p.pointer_bits)
            if start + length > p.m:
                raise PointerOutOfRange(
                    f"pointer {start + 1}+{length} runs past database end {p.m}"
                )
            rec[emitted:emitted + length] = db.symbols[start:start + length]
        emitted += length
    if reader.bits_left:
        raise StreamLengthMismatch(f"{reader.bits_left} unread bits after decode")
    return SymbolBlock(rec, dist.repro_alphabet_size)

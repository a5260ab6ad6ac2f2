"""Packed bit streams, MSB-first within bytes, zero-padded to a byte edge."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StreamExhausted


@dataclass(frozen=True)
class Bitstream:
    data: bytes
    bit_length: int

    def __post_init__(self):
        if self.bit_length < 0 or self.bit_length > 8 * len(self.data):
            raise ValueError("bit_length exceeds byte capacity")
        if len(self.data) != (self.bit_length + 7) // 8:
            raise ValueError("stream carries surplus bytes")
        pad = 8 * len(self.data) - self.bit_length
        if pad and (self.data[-1] & ((1 << pad) - 1)):
            raise ValueError("trailing pad bits must be zero")


class BitWriter:
    """Accumulates fixed-width big-endian fields into a Bitstream."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0:
            raise ValueError("field width must be >= 0")
        if value < 0 or (nbits < value.bit_length()):
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nacc += nbits
        while self._nacc >= 8:
            self._nacc -= 8
            self._buf.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1

    @property
    def bit_length(self) -> int:
        return 8 * len(self._buf) + self._nacc

    def getvalue(self) -> Bitstream:
        total = self.bit_length
        data = bytes(self._buf)
        if self._nacc:
            data += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return Bitstream(data, total)


class BitReader:
    def __init__(self, stream: Bitstream) -> None:
        self._data = stream.data
        self._remaining = stream.bit_length
        self._pos = 0           # next unread bit index

    @property
    def bits_left(self) -> int:
        return self._remaining

    def read(self, nbits: int) -> int:
        if nbits < 0:
            raise ValueError("field width must be >= 0")
        if nbits > self._remaining:
            raise StreamExhausted(
                f"requested {nbits} bits with {self._remaining} left"
            )
        value = 0
        pos = self._pos
        taken = 0
        while taken < nbits:
            byte = self._data[pos >> 3]
            offset = pos & 7
            avail = 8 - offset
            take = min(avail, nbits - taken)
            chunk = (byte >> (avail - take)) & ((1 << take) - 1)
            value = (value << take) | chunk
            pos += take
            taken += take
        self._pos = pos
        self._remaining -= nbits
        return value

"""RDC1 container: magic, codec id, version, parameter header, payload.

Header integers are little-endian fixed width.  The source pmf and the
distortion matrix travel as shortest-roundtrip decimal strings, so both
ends rebuild bit-identical doubles and hence identical databases.  A
16-bit checksum of the first 64 database symbols lets the decoder
report a seed/parameter mismatch instead of silently mis-decoding.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

from .bitio import Bitstream
from .codecs import GVW_ID, HYB_ID, LLZ_ID, GvwParams, HybParams, LlzParams
from .errors import ContainerFormatError, SeedMismatch
from .model import DistortionSpec, SourceModel
from .sampling import database_checksum, generate_database

MAGIC = b"RDC1"
VERSION = 1

_CODEC_BY_ID = {GVW_ID: GvwParams, LLZ_ID: LlzParams, HYB_ID: HybParams}


@dataclass(frozen=True)
class ContainerPayload:
    codec_id: int
    params: object
    source: SourceModel
    dist: DistortionSpec
    stream: Bitstream
    db_checksum: int


def _write_str(buf: io.BytesIO, text: str) -> None:
    raw = text.encode("ascii")
    if len(raw) > 0xFFFF:
        raise ContainerFormatError("decimal string too long")
    buf.write(struct.pack("<H", len(raw)))
    buf.write(raw)


def _read_exact(buf: io.BytesIO, size: int) -> bytes:
    raw = buf.read(size)
    if len(raw) != size:
        raise ContainerFormatError("truncated container")
    return raw


def _read_str(buf: io.BytesIO) -> str:
    (size,) = struct.unpack("<H", _read_exact(buf, 2))
    return _read_exact(buf, size).decode("ascii")


def write_container(params, source: SourceModel, dist: DistortionSpec,
                    stream: Bitstream, db_checksum: int) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<BB", params.codec_id, VERSION))
    buf.write(struct.pack("<QI", params.n, params.l))
    if params.codec_id == LLZ_ID:
        buf.write(struct.pack("<I", params.alpha_micro))
    buf.write(struct.pack("<IQQH", params.gamma_micro, params.d_micro,
                          params.seed & 0xFFFFFFFFFFFFFFFF, db_checksum))
    buf.write(struct.pack("<Q", params.symbol_cap))
    buf.write(struct.pack("<HH", source.alphabet_size, dist.repro_alphabet_size))
    for p in source.pmf:
        _write_str(buf, repr(p))
    for row in dist.matrix:
        for entry in row:
            _write_str(buf, repr(entry))
    buf.write(struct.pack("<Q", stream.bit_length))
    buf.write(stream.data)
    return buf.getvalue()


def read_container(raw: bytes) -> ContainerPayload:
    buf = io.BytesIO(raw)
    if _read_exact(buf, 4) != MAGIC:
        raise ContainerFormatError("bad magic bytes")
    codec_id, version = struct.unpack("<BB", _read_exact(buf, 2))
    if version != VERSION:
        raise ContainerFormatError(f"unsupported container version {version}")
    if codec_id not in _CODEC_BY_ID:
        raise ContainerFormatError(f"unknown codec id {codec_id}")
    n, l = struct.unpack("<QI", _read_exact(buf, 12))
    alpha_micro = None
    if codec_id == LLZ_ID:
        (alpha_micro,) = struct.unpack("<I", _read_exact(buf, 4))
    gamma_micro, d_micro, seed, checksum = struct.unpack(
        "<IQQH", _read_exact(buf, 22))
    (symbol_cap,) = struct.unpack("<Q", _read_exact(buf, 8))
    a_size, ahat_size = struct.unpack("<HH", _read_exact(buf, 4))
    pmf = [float(_read_str(buf)) for _ in range(a_size)]
    matrix = [[float(_read_str(buf)) for _ in range(ahat_size)]
              for _ in range(a_size)]
    (bit_length,) = struct.unpack("<Q", _read_exact(buf, 8))
    payload = _read_exact(buf, (bit_length + 7) // 8)
    if buf.read(1):
        raise ContainerFormatError("trailing bytes after payload")
    try:
        stream = Bitstream(payload, bit_length)
    except ValueError as exc:
        raise ContainerFormatError(str(exc)) from exc

    source = SourceModel(pmf)
    dist = DistortionSpec(matrix)
    cls = _CODEC_BY_ID[codec_id]
    micro = 10 ** 6
    kwargs = dict(d=d_micro / micro, gamma=gamma_micro / micro, l=l, n=n,
                  seed=seed, symbol_cap=symbol_cap)
    if codec_id == LLZ_ID:
        kwargs["alpha"] = alpha_micro / micro
    params = cls.derive(source, dist, **kwargs)
    return ContainerPayload(codec_id, params, source, dist, stream, checksum)


def verify_database_checksum(payload: ContainerPayload) -> None:
    """Regenerate the database head and compare against the stored checksum."""
    p = payload.params
    head = generate_database(p.q_star, min(64, p.memory_symbols), p.seed,
                             p.symbol_cap)
    if database_checksum(head) != payload.db_checksum:
        raise SeedMismatch(
            "regenerated database does not match the container checksum; "
            "seed or parameters differ from the encoder's"
        )

"""Source and distortion models for finite-alphabet memoryless sources.

A source is a pmf over symbols 0..|A|-1; a distortion spec is a
nonnegative |A| x |Ahat| per-symbol cost matrix in which every source
row has at least one zero-cost reproduction letter.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDistortion, InvalidPmf

PMF_SUM_TOL = 1e-12


def _as_float_tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class SourceModel:
    """Memoryless source: a pmf over the symbol indices 0..|A|-1."""

    pmf: tuple[float, ...]

    def __init__(self, pmf) -> None:
        object.__setattr__(self, "pmf", _as_float_tuple(pmf))
        if len(self.pmf) < 2:
            raise InvalidPmf("alphabet size must be >= 2")
        if any(p < 0.0 for p in self.pmf):
            raise InvalidPmf("pmf entries must be >= 0")
        if abs(sum(self.pmf) - 1.0) > PMF_SUM_TOL:
            raise InvalidPmf(f"pmf sums to {sum(self.pmf)!r}, not 1")

    @property
    def alphabet_size(self) -> int:
        return len(self.pmf)

    def pmf_array(self) -> np.ndarray:
        return np.asarray(self.pmf, dtype=np.float64)

    @classmethod
    def bernoulli(cls, p: float) -> "SourceModel":
        """Binary source with P(1) = p."""
        return cls((1.0 - p, p))

    @classmethod
    def uniform(cls, k: int) -> "SourceModel":
        return cls((1.0 / k,) * k)


@dataclass(frozen=True)
class DistortionSpec:
    """Per-symbol distortion matrix rho(x, y), shape |A| x |Ahat|."""

    matrix: tuple[tuple[float, ...], ...]
    _array: np.ndarray = field(repr=False, compare=False, default=None)

    def __init__(self, matrix) -> None:
        rows = tuple(_as_float_tuple(row) for row in matrix)
        if not rows or not rows[0]:
            raise InvalidDistortion("distortion matrix must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidDistortion("distortion matrix rows have unequal lengths")
        arr = np.asarray(rows, dtype=np.float64)
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise InvalidDistortion("distortion entries must be finite and >= 0")
        if np.any(arr.min(axis=1) > 0.0):
            raise InvalidDistortion(
                "every source letter needs a zero-distortion reproduction letter"
            )
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "_array", arr)

    @property
    def source_alphabet_size(self) -> int:
        return len(self.matrix)

    @property
    def repro_alphabet_size(self) -> int:
        return len(self.matrix[0])

    def array(self) -> np.ndarray:
        return self._array

    def max_entry(self) -> float:
        return float(self._array.max())

    def is_integer_valued(self) -> bool:
        return bool(np.all(self._array == np.round(self._array)))

    def zero_distortion_map(self) -> tuple[int, ...]:
        """For each source letter, the least reproduction index with rho = 0."""
        return tuple(int(np.argmin(row)) for row in self._array)

    @classmethod
    def hamming(cls, k: int) -> "DistortionSpec":
        """Square Hamming distortion: 0 on the diagonal, 1 elsewhere."""
        return cls(tuple(tuple(0.0 if i == j else 1.0 for j in range(k)) for i in range(k)))

    def check_source(self, source: SourceModel) -> None:
        if source.alphabet_size != self.source_alphabet_size:
            raise InvalidDistortion(
                f"distortion matrix has {self.source_alphabet_size} source rows, "
                f"source alphabet has {source.alphabet_size} letters"
            )


# --- plain-text spec loading -------------------------------------------------
#
# Source file: one line with the alphabet size, one line with the pmf as
# whitespace-separated decimals.  Distortion file: one line "|A| |Ahat|",
# then |A| rows of decimals.  Blank lines and '#' comments are ignored.

def _data_lines(path: str) -> list[str]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    return [ln for ln in lines if ln]


def load_source(path: str) -> SourceModel:
    lines = _data_lines(path)
    if len(lines) != 2:
        raise InvalidPmf(f"{path}: expected 2 data lines (size, pmf), got {len(lines)}")
    size = int(lines[0])
    pmf = [float(tok) for tok in lines[1].split()]
    if len(pmf) != size:
        raise InvalidPmf(f"{path}: declared size {size} but {len(pmf)} pmf entries")
    return SourceModel(pmf)


def load_distortion(path: str) -> DistortionSpec:
    lines = _data_lines(path)
    if not lines:
        raise InvalidDistortion(f"{path}: empty distortion file")
    dims = lines[0].split()
    if len(dims) != 2:
        raise InvalidDistortion(f"{path}: first line must be '<rows> <cols>'")
    rows, cols = int(dims[0]), int(dims[1])
    if len(lines) != 1 + rows:
        raise InvalidDistortion(f"{path}: expected {rows} matrix rows, got {len(lines) - 1}")
    matrix = []
    for ln in lines[1:]:
        row = [float(tok) for tok in ln.split()]
        if len(row) != cols:
            raise InvalidDistortion(f"{path}: row has {len(row)} entries, expected {cols}")
        matrix.append(row)
    return DistortionSpec(matrix)


def parse_source_spec(spec: str) -> SourceModel:
    """Parse 'bern:p', 'uniform:k', or a config file path."""
    if spec.startswith("bern:"):
        p = float(spec[len("bern:"):])
        if not 0.0 < p < 1.0:
            raise InvalidPmf(f"bern parameter must be in (0,1), got {p}")
        return SourceModel.bernoulli(p)
    if spec.startswith("uniform:"):
        k = int(spec[len("uniform:"):])
        if k < 2:
            raise InvalidPmf(f"uniform alphabet size must be >= 2, got {k}")
        return SourceModel.uniform(k)
    if os.path.exists(spec):
        return load_source(spec)
    raise InvalidPmf(f"unrecognised source spec {spec!r}")


def parse_distortion_spec(spec: str, source: SourceModel) -> DistortionSpec:
    """Parse 'hamming' (square, sized to the source) or a matrix file path."""
    if spec == "hamming":
        return DistortionSpec.hamming(source.alphabet_size)
    if os.path.exists(spec):
        dist = load_distortion(spec)
        dist.check_source(source)
        return dist
    raise InvalidDistortion(f"unrecognised distortion spec {spec!r}")

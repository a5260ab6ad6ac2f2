"""Benchmark harness: distortion grids, multi-seed runs, deterministic
memory accounting, CSV and plot-data emission.

Each run seeds the database with the run seed and the source message
with a fixed offset of it, verifies the decode roundtrip, and records
rate/distortion/memory/time.  Identical specs produce byte-identical
CSV except for the timing column.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from . import rd
from .codecs import (
    GvwParams,
    HybParams,
    LlzParams,
    gvw_decode,
    gvw_encode,
    hyb_decode,
    hyb_encode,
    llz_decode,
    llz_encode,
)
from .errors import ParamMismatch, RuntimeFault, ValidationError
from .matching import longest_match
from .model import DistortionSpec, SourceModel
from .params import heuristic_params
from .sampling import (
    DEFAULT_SYMBOL_CAP,
    derived_message_seed,
    generate_database,
    sample_block,
)

DEFAULT_SEED_BASE = 1_000_003
DEFAULT_SEED_COUNT = 32

CSV_HEADER = ("codec", "d_target", "d_achieved_mean", "d_achieved_std", "rate",
              "memory_symbols", "memory_bytes", "encode_seconds")

_CODECS = {
    "gvw": (gvw_encode, gvw_decode),
    "llz": (llz_encode, llz_decode),
    "hyb": (hyb_encode, hyb_decode),
}


def default_seeds(count: int = DEFAULT_SEED_COUNT,
                  base: int = DEFAULT_SEED_BASE) -> tuple[int, ...]:
    return tuple(range(base, base + count))


@dataclass(frozen=True)
class ScenarioSpec:
    source: SourceModel
    dist: DistortionSpec
    codec: str
    targets: tuple[float, ...]
    n: int
    seeds: tuple[int, ...] = default_seeds()
    param_mode: str = "heuristic"        # "heuristic" | "explicit"
    l: Optional[int] = None
    gamma: Optional[float] = None
    alpha: Optional[float] = None
    symbol_cap: int = DEFAULT_SYMBOL_CAP
    workers: int = 1

    def __post_init__(self):
        if self.codec not in _CODECS:
            raise ValidationError(f"unknown codec {self.codec!r}")
        if not self.targets:
            raise ValidationError("scenario needs at least one target distortion")
        if not self.seeds:
            raise ValidationError("scenario needs at least one seed")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        dmax = rd.d_max(self.source, self.dist).value
        if any(not 0.0 < t < dmax for t in self.targets):
            raise ValidationError(f"targets must lie in (0, Dmax={dmax})")
        if self.param_mode not in ("heuristic", "explicit"):
            raise ValidationError(f"unknown param mode {self.param_mode!r}")
        if self.param_mode == "explicit" and self.l is None:
            raise ValidationError("explicit mode needs l")


@dataclass(frozen=True)
class RunRecord:
    codec: str
    d_target: float
    d_achieved_mean: float
    d_achieved_std: float
    rate: float
    memory_symbols: int
    memory_bytes: float
    encode_seconds: float


def _params_for(spec: ScenarioSpec, d_target: float, seed: int):
    if spec.param_mode == "heuristic":
        return heuristic_params(spec.source, spec.dist, d_target, spec.codec,
                                n=spec.n, seed=seed, symbol_cap=spec.symbol_cap)
    gamma = spec.gamma if spec.gamma is not None else 0.002
    if spec.codec == "gvw":
        return GvwParams.derive(spec.source, spec.dist, d=d_target, gamma=gamma,
                                l=spec.l, n=spec.n, seed=seed,
                                symbol_cap=spec.symbol_cap)
    if spec.codec == "hyb":
        return HybParams.derive(spec.source, spec.dist, d=d_target, gamma=gamma,
                                l=spec.l, n=spec.n, seed=seed,
                                symbol_cap=spec.symbol_cap)
    alpha = spec.alpha if spec.alpha is not None else 0.1
    return LlzParams.derive(spec.source, spec.dist, d=d_target, gamma=gamma,
                            alpha=alpha, l=spec.l, n=spec.n, seed=seed,
                            symbol_cap=spec.symbol_cap)


def memory_bytes(p) -> float:
    """Database/codebook footprint at ceil(log2 |Ahat|) bits per symbol."""
    bits = max(1, (len(p.q_star) - 1).bit_length())
    return p.memory_symbols * bits / 8.0


def run_scenario(spec: ScenarioSpec) -> list[RunRecord]:
    """One record per target: fresh message and database per seed,
    encode, verify the decode roundtrip, aggregate across seeds."""
    encode, decode = _CODECS[spec.codec]
    records = []
    for d_target in spec.targets:
        base = _params_for(spec, d_target, spec.seeds[0])
        dists, rates, times = [], [], []
        for seed in spec.seeds:
            p = base if seed == base.seed else replace(base, seed=seed)
            message = sample_block(spec.source.pmf, spec.n,
                                   derived_message_seed(seed))
            t0 = time.perf_counter()
            try:
                stream, report = encode(message, p, spec.source, spec.dist,
                                        workers=spec.workers)
            except (ValidationError, RuntimeFault) as exc:
                raise type(exc)(
                    f"{spec.codec} at D={d_target}, seed={seed}: {exc}"
                ) from exc
            times.append(time.perf_counter() - t0)
            decoded = decode(stream, p, spec.dist)
            if not (decoded.symbols == report.reconstruction.symbols).all():
                raise RuntimeFault(
                    f"roundtrip mismatch: {spec.codec} D={d_target} seed={seed}"
                )
            dists.append(report.achieved_distortion)
            rates.append(report.rate)
        records.append(RunRecord(
            codec=spec.codec,
            d_target=d_target,
            d_achieved_mean=statistics.fmean(dists),
            d_achieved_std=statistics.stdev(dists) if len(dists) > 1 else 0.0,
            rate=statistics.fmean(rates),
            memory_symbols=base.memory_symbols,
            memory_bytes=memory_bytes(base),
            encode_seconds=statistics.fmean(times),
        ))
    return records


def memory_ratio(gvw: GvwParams, hyb: HybParams) -> Fraction:
    """Exact codebook-to-database symbol ratio for matched (l, R)."""
    if gvw.l != hyb.l or gvw.candidate_count != hyb.candidate_count:
        raise ParamMismatch("memory ratio needs matched block length and rate")
    return Fraction(gvw.memory_symbols, hyb.memory_symbols)


def mean_match_length(source: SourceModel, dist: DistortionSpec, p,
                      probes: int, cap: Optional[int] = None,
                      seed_base: int = DEFAULT_SEED_BASE) -> float:
    """Average longest-match length against fresh databases.

    Probes the same search the parsing codecs run: a fresh message prefix
    and a fresh database per probe, budget p.d_bar.  `cap` defaults to
    twice the concentration prediction log2(m)/R(d_bar) so clipping does
    not bias the mean.
    """
    if cap is None:
        r_bar = rd.rate_distortion(source, dist, p.d_bar).rate
        cap = math.ceil(2.0 * math.log2(p.memory_symbols) / r_bar)
    total = 0
    for i in range(probes):
        seed = seed_base + i
        message = sample_block(source.pmf, cap, derived_message_seed(seed))
        db = generate_database(p.q_star, p.memory_symbols, seed, p.symbol_cap)
        total += longest_match(message, db, dist, p.d_bar, cap).length
    return total / probes


# --- built-in grids -----------------------------------------------------------

_BUILTIN = {
    "table1": ("bern", 0.4, ("gvw", "llz"),
               (0.05, 0.08, 0.11, 0.14, 0.17, 0.2, 0.23, 0.26, 0.29)),
    "table2": ("bern", 0.4, ("hyb",),
               (0.05, 0.08, 0.11, 0.14, 0.17, 0.2, 0.23, 0.26, 0.29)),
    "table3": ("bern", 0.2, ("gvw", "llz", "hyb"),
               (0.04, 0.055, 0.07, 0.085, 0.1, 0.115, 0.13, 0.145, 0.16)),
    "table4": ("uniform", 4, ("gvw", "llz", "hyb"),
               (0.1, 0.16, 0.22, 0.28, 0.34, 0.4, 0.46, 0.52, 0.58)),
}

# The widest built-in rows need ~1.07e9 codebook symbols (and LLZ databases
# with l*R up to ~29.6), past the stock 2^28 cap.
BUILTIN_SYMBOL_CAP = 2 ** 31


def builtin_scenario(name: str, codecs=None, seeds=None, n: int = 1050,
                     symbol_cap: Optional[int] = None,
                     workers: int = 1) -> list[ScenarioSpec]:
    """The named benchmark grids shipped with the package."""
    try:
        kind, param, default_codecs, targets = _BUILTIN[name]
    except KeyError:
        raise ValidationError(
            f"unknown scenario {name!r}; choose from {sorted(_BUILTIN)}"
        ) from None
    source = (SourceModel.bernoulli(param) if kind == "bern"
              else SourceModel.uniform(param))
    dist = DistortionSpec.hamming(source.alphabet_size)
    chosen = tuple(codecs) if codecs else default_codecs
    bad = [c for c in chosen if c not in default_codecs]
    if bad:
        raise ValidationError(f"scenario {name} does not include codecs {bad}")
    return [ScenarioSpec(source=source, dist=dist, codec=c, targets=targets,
                         n=n, seeds=tuple(seeds) if seeds else default_seeds(),
                         symbol_cap=symbol_cap or BUILTIN_SYMBOL_CAP,
                         workers=workers)
            for c in chosen]


# --- emission ------------------------------------------------------------------

def emit_csv(records, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([rec.codec, repr(rec.d_target),
                             repr(rec.d_achieved_mean), repr(rec.d_achieved_std),
                             repr(rec.rate), rec.memory_symbols,
                             repr(rec.memory_bytes), repr(rec.encode_seconds)])


def read_csv(path: str) -> list[RunRecord]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {header}")
        return [RunRecord(row[0], float(row[1]), float(row[2]), float(row[3]),
                          float(row[4]), int(row[5]), float(row[6]),
                          float(row[7]))
                for row in reader]


def emit_plot_data(records, curve: rd.RdCurve, path: str) -> None:
    """Two-section plain text: the R(D) curve, then per-codec scatter points."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# curve: d rate\n")
        for pt in curve.points:
            fh.write(f"{pt.distortion!r} {pt.rate!r}\n")
        fh.write("\n# scatter: codec d_achieved rate\n")
        for rec in records:
            fh.write(f"{rec.codec} {rec.d_achieved_mean!r} {rec.rate!r}\n")

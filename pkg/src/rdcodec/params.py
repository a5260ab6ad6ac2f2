"""Parameter selection: the stock experiment heuristics, the constants
behind the expected-distortion guarantee, and the near-linear
complexity schedule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import rd
from .codecs import GvwParams, HybParams, LlzParams
from .errors import (
    DegenerateConstants,
    DistortionOutOfRange,
    EpsilonOutOfRange,
    GammaOutOfRange,
)
from .model import DistortionSpec, SourceModel
from .sampling import DEFAULT_SYMBOL_CAP

HEURISTIC_GAMMA_FIXED_RATE = 0.002   # gvw / hyb
HEURISTIC_GAMMA_LLZ = 0.03
HEURISTIC_ALPHA_LLZ = 0.1
HEURISTIC_NUMERATOR = 22.0           # l = ceil(22 / rate)


def heuristic_params(source: SourceModel, dist: DistortionSpec, d: float,
                     codec: str, n: int, seed: int = 0,
                     symbol_cap: int = DEFAULT_SYMBOL_CAP):
    """Stock parameter rule: l = ceil(22/(R(D)+gamma)) for the fixed-rate
    codecs with gamma = 0.002, and l = ceil(22/R(D)) with gamma = 0.03,
    alpha = 0.1 for LLZ.
    """
    r_d = rd.rate_distortion(source, dist, d).rate
    codec = codec.lower()
    if codec == "gvw":
        l = math.ceil(HEURISTIC_NUMERATOR / (r_d + HEURISTIC_GAMMA_FIXED_RATE))
        return GvwParams.derive(source, dist, d=d, gamma=HEURISTIC_GAMMA_FIXED_RATE,
                                l=l, n=n, seed=seed, symbol_cap=symbol_cap)
    if codec == "hyb":
        l = math.ceil(HEURISTIC_NUMERATOR / (r_d + HEURISTIC_GAMMA_FIXED_RATE))
        return HybParams.derive(source, dist, d=d, gamma=HEURISTIC_GAMMA_FIXED_RATE,
                                l=l, n=n, seed=seed, symbol_cap=symbol_cap)
    if codec == "llz":
        l = math.ceil(HEURISTIC_NUMERATOR / r_d)
        return LlzParams.derive(source, dist, d=d, gamma=HEURISTIC_GAMMA_LLZ,
                                alpha=HEURISTIC_ALPHA_LLZ, l=l, n=n, seed=seed,
                                symbol_cap=symbol_cap)
    raise ValueError(f"unknown codec {codec!r}")


@dataclass(frozen=True)
class GuaranteeConstants:
    """Constants behind the expected-distortion bound of the sliding-window
    codec: the half-distortion point, the secant constant K, the exponent
    constant C <= 1/4, and the admissible (gamma, epsilon) ranges.
    """

    d1: float
    k_const: float
    c_const: float
    gamma_hat: float
    eps_hat: float


def guarantee_constants(source: SourceModel, dist: DistortionSpec,
                        d: float) -> GuaranteeConstants:
    dmax = rd.d_max(source, dist).value
    if not 0.0 < d < dmax:
        raise DistortionOutOfRange(f"D={d} not in (0, Dmax={dmax})")
    d1 = d / 2.0
    r_half = rd.rate_distortion(source, dist, d1).rate
    r_full = rd.rate_distortion(source, dist, d).rate
    drop = r_half - r_full
    if drop <= 0.0:
        raise DegenerateConstants("R(D/2) must exceed R(D) for interior D")
    k_const = (d - d1) / drop
    slope_half = rd.rd_slope(source, dist, d1)
    c_const = min(k_const ** 2 / (8.0 * dmax ** 2),
                  1.0 / (32.0 * (slope_half * dmax) ** 2),
                  0.25)
    gamma_hat = min(1.0, 2.0 * drop)
    # natural exponential here, base-2 log in guaranteed_block_length
    eps_hat = min(math.exp(16.0 * c_const) / (3.0 * (dmax - d)),
                  3.0 * math.exp(-1.0) * (dmax - d))
    return GuaranteeConstants(d1, k_const, c_const, gamma_hat, eps_hat)


def _block_length_raw(c_const: float, dmax: float, d: float, gamma: float,
                      eps: float) -> float:
    return (1.0 / (c_const * gamma * gamma)) * math.log2(3.0 * (dmax - d) / eps)


def guaranteed_block_length(source: SourceModel, dist: DistortionSpec, d: float,
                            gamma: float, eps: float,
                            symbol_cap: int = DEFAULT_SYMBOL_CAP) -> int:
    """Block length below which expected distortion stays within D + eps.

    Warns instead of failing when the resulting 2^(l*R) blows past the
    codec symbol cap; these lengths are usually far beyond desk scale.
    """
    consts = guarantee_constants(source, dist, d)
    if not 0.0 < gamma < consts.gamma_hat:
        raise GammaOutOfRange(f"gamma={gamma} not in (0, {consts.gamma_hat})")
    if not 0.0 < eps < consts.eps_hat:
        raise EpsilonOutOfRange(f"eps={eps} not in (0, {consts.eps_hat})")
    dmax = rd.d_max(source, dist).value
    l = math.ceil(_block_length_raw(consts.c_const, dmax, d, gamma, eps))
    rate = rd.rate_distortion(source, dist, d).rate + gamma
    if l * rate > math.log2(symbol_cap):
        warnings.warn(
            f"block length {l} needs 2^{l * rate:.1f} candidate positions, "
            f"beyond the symbol cap {symbol_cap}",
            stacklevel=2,
        )
    return l


def complexity_schedule(source: SourceModel, dist: DistortionSpec, d: float,
                        g_value: float, c: float) -> tuple[int, float]:
    """(l, gamma) schedule giving near-linear encoding time.

    g_value is g(n) evaluated at the message length of interest; the
    schedule is l = ceil(log2 g / (R(D)+c)), gamma = sqrt(log2(l)/l).
    """
    if g_value <= 1.0:
        raise ValueError(f"g(n) must exceed 1, got {g_value}")
    if c <= 0.0:
        raise ValueError(f"c must be > 0, got {c}")
    r_d = rd.rate_distortion(source, dist, d).rate
    l = math.ceil(math.log2(g_value) / (r_d + c))
    gamma = math.sqrt(math.log2(l) / l)
    return l, gamma

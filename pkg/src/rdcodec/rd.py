"""Rate-distortion math for finite-alphabet memoryless sources.

R(D), D(R), Dmax, the optimal reproduction distribution Q* and the curve
slope R'(D), all in bits.  Binary/Hamming and uniform/Hamming sources use
closed forms; everything else goes through a Blahut-Arimoto solver with
bisection on the curve slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DistortionOutOfRange, NoConvergence, RateOutOfRange
from .model import DistortionSpec, SourceModel

CLOSED_FORM_TOL = 1e-9
BA_TOL = 1e-7
BA_MAX_ITERS = 100_000


def binary_entropy(p: float) -> float:
    """h(p) in bits, with 0 log 0 = 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy(pmf) -> float:
    arr = np.asarray(pmf, dtype=np.float64)
    nz = arr[arr > 0.0]
    return float(-(nz * np.log2(nz)).sum())


class DMax(NamedTuple):
    value: float
    letter: int


@dataclass(frozen=True)
class RdPoint:
    """One solution of the rate-distortion problem.

    `w_star` is the minimizing channel, kept only so tests can plug the
    solution back into the information/distortion functionals.
    """

    distortion: float
    rate: float
    slope: float
    q_star: tuple[float, ...]
    w_star: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RdCurve:
    points: tuple[RdPoint, ...]

    def __post_init__(self):
        ds = [p.distortion for p in self.points]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise ValueError("curve distortions must be strictly increasing")


def d_max(source: SourceModel, dist: DistortionSpec) -> DMax:
    """Smallest expected distortion achievable at rate zero.

    Returns the minimum over reproduction letters y of E_P[rho(X, y)]
    together with the achieving letter (smallest index on ties).
    """
    dist.check_source(source)
    expected = source.pmf_array() @ dist.array()
    letter = int(np.argmin(expected))
    return DMax(float(expected[letter]), letter)


# --- closed forms -------------------------------------------------------------

def _is_hamming(dist: DistortionSpec) -> bool:
    if dist.source_alphabet_size != dist.repro_alphabet_size:
        return False
    k = dist.source_alphabet_size
    expected = np.ones((k, k)) - np.eye(k)
    return bool(np.array_equal(dist.array(), expected))


def _closed_form_kind(source: SourceModel, dist: DistortionSpec) -> Optional[str]:
    if not _is_hamming(dist):
        return None
    if source.alphabet_size == 2:
        return "binary_hamming"
    if len(set(source.pmf)) == 1:
        return "uniform_hamming"
    return None


def _binary_hamming_point(p1: float, d: float) -> RdPoint:
    rate = binary_entropy(p1) - binary_entropy(d)
    slope = math.log2(d / (1.0 - d))
    q1 = (p1 - d) / (1.0 - 2.0 * d)
    q = (1.0 - q1, q1)
    return RdPoint(d, rate, slope, q, _channel_from_output(q, slope,
                                                           np.array([[0.0, 1.0], [1.0, 0.0]])))


def _uniform_hamming_point(k: int, d: float) -> RdPoint:
    rate = math.log2(k) - binary_entropy(d) - d * math.log2(k - 1)
    slope = math.log2(d / ((1.0 - d) * (k - 1)))
    q = (1.0 / k,) * k
    rho = np.ones((k, k)) - np.eye(k)
    return RdPoint(d, rate, slope, q, _channel_from_output(q, slope, rho))


def _channel_from_output(q, slope: float, rho: np.ndarray) -> np.ndarray:
    """Test channel W(y|x) induced by output distribution q at slope s."""
    qa = np.asarray(q, dtype=np.float64)
    a = qa[None, :] * np.power(2.0, slope * rho)
    return a / a.sum(axis=1, keepdims=True)


# --- Blahut-Arimoto -----------------------------------------------------------

def _ba_fixed_slope(p: np.ndarray, rho: np.ndarray, slope: float,
                    gap_tol: float, max_iters: int = BA_MAX_ITERS):
    """Minimize I(X;Y) at a fixed Lagrange slope.

    Iterates the output distribution from uniform until the standard
    upper/lower rate bounds differ by at most gap_tol.  Returns
    (q, distortion, rate) at the final channel.
    """
    k = rho.shape[1]
    q = np.full(k, 1.0 / k)
    a = np.power(2.0, slope * rho)
    for _ in range(max_iters):
        c = a @ q                       # c_x = sum_y q(y) 2^{s rho(x,y)}
        mult = (p / c) @ a              # growth factor per output letter
        gap = math.log2(float(mult.max()))
        if gap <= gap_tol:
            w = a * q[None, :] / c[:, None]
            d_now = float((p[:, None] * w * rho).sum())
            rate = slope * d_now - float(p @ np.log2(c))
            return q, d_now, rate
        q = q * mult
    raise NoConvergence(
        f"Blahut-Arimoto did not reach gap {gap_tol} within {max_iters} iterations"
    )


def _ba_point(source: SourceModel, dist: DistortionSpec, d: float,
              tol: float) -> RdPoint:
    """R(D) via bisection on the slope; D(s) is nondecreasing in s."""
    p = source.pmf_array()
    rho = dist.array()
    gap_tol = min(tol, 1e-7) / 4.0

    s_hi = -1e-12
    s_lo = -1.0
    while True:
        _, d_lo, _ = _ba_fixed_slope(p, rho, s_lo, gap_tol)
        if d_lo <= d:
            break
        s_lo *= 2.0
        if s_lo < -1e6:
            raise NoConvergence("slope bisection could not bracket the target distortion")

    q = None
    d_s = rate = s_mid = 0.0
    for _ in range(200):
        s_mid = 0.5 * (s_lo + s_hi)
        q, d_s, rate = _ba_fixed_slope(p, rho, s_mid, gap_tol)
        if abs(d_s - d) <= 0.5 * tol / max(1.0, abs(s_mid)):
            break
        if d_s < d:
            s_lo = s_mid
        else:
            s_hi = s_mid
    else:
        raise NoConvergence("slope bisection did not reach the distortion tolerance")

    # First-order correction moves the rate from D(s_mid) to the requested D;
    # the residual error is second order in |d_s - D|.
    rate += s_mid * (d - d_s)
    w = _channel_from_output(q, s_mid, rho)
    return RdPoint(d, rate, s_mid, tuple(float(v) for v in q), w)


# --- public operations --------------------------------------------------------

def _check_interior(source: SourceModel, dist: DistortionSpec, d: float) -> float:
    dmax = d_max(source, dist).value
    if not 0.0 < d < dmax:
        raise DistortionOutOfRange(f"D={d} not in (0, Dmax={dmax})")
    return dmax


def rate_distortion(source: SourceModel, dist: DistortionSpec, d: float,
                    tol: float | None = None, method: str = "auto") -> RdPoint:
    """R(D) in bits/symbol, with the optimal reproduction pmf and slope.

    method: "auto" picks a closed form when one applies, else
    Blahut-Arimoto; "ba" forces the solver (used to cross-check the
    closed forms); "closed" requires one to exist.
    """
    _check_interior(source, dist, d)
    kind = _closed_form_kind(source, dist)
    if method not in ("auto", "ba", "closed"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" and kind is None:
        raise ValueError("no closed form for this source/distortion pair")
    if method != "ba" and kind == "binary_hamming":
        return _binary_hamming_point(source.pmf[1], d)
    if method != "ba" and kind == "uniform_hamming":
        return _uniform_hamming_point(source.alphabet_size, d)
    return _ba_point(source, dist, d, BA_TOL if tol is None else tol)


def distortion_rate(source: SourceModel, dist: DistortionSpec, rate: float,
                    tol: float = CLOSED_FORM_TOL, method: str = "auto") -> float:
    """D(R): invert R(D) by bisection on D over (0, Dmax).

    Terminates once the bracket has width <= tol and the rate at its
    midpoint matches within tol, so both the inversion roundtrip and the
    rate residual are tol-accurate.
    """
    dist.check_source(source)
    if rate <= 0.0 or rate >= math.log2(source.alphabet_size):
        raise RateOutOfRange(
            f"rate {rate} outside (0, log2|A|={math.log2(source.alphabet_size)})"
        )
    dmax = d_max(source, dist).value
    lo, hi = 0.0, dmax
    d_mid = r_mid = None
    for _ in range(220):
        d_mid = 0.5 * (lo + hi)
        if d_mid <= lo or d_mid >= hi:
            break  # bracket collapsed to adjacent doubles
        r_mid = rate_distortion(source, dist, d_mid, tol=tol, method=method).rate
        if hi - lo <= tol and abs(r_mid - rate) <= tol:
            return d_mid
        if r_mid > rate:
            lo = d_mid
        else:
            hi = d_mid
    if r_mid is not None and abs(r_mid - rate) <= 10.0 * tol:
        return d_mid
    raise RateOutOfRange(f"rate {rate} not achievable on (0, Dmax) to tolerance {tol}")


def rd_slope(source: SourceModel, dist: DistortionSpec, d: float) -> float:
    """Curve slope R'(D) in bits per distortion unit (always < 0 inside)."""
    _check_interior(source, dist, d)
    kind = _closed_form_kind(source, dist)
    if kind == "binary_hamming":
        return math.log2(d / (1.0 - d))
    if kind == "uniform_hamming":
        k = source.alphabet_size
        return math.log2(d / ((1.0 - d) * (k - 1)))
    return _ba_point(source, dist, d, BA_TOL).slope


def rd_curve(source: SourceModel, dist: DistortionSpec, points: int = 50,
             method: str = "auto") -> RdCurve:
    """Sample R(D) on an even interior grid over (0, Dmax)."""
    dmax = d_max(source, dist).value
    grid = [dmax * i / (points + 1) for i in range(1, points + 1)]
    return RdCurve(tuple(rate_distortion(source, dist, d, method=method) for d in grid))


# --- functionals (plug-back checks) -------------------------------------------

def mutual_information(p, w) -> float:
    """I(X;Y) in bits for input pmf p and channel w(y|x)."""
    pa = np.asarray(p, dtype=np.float64)
    wa = np.asarray(w, dtype=np.float64)
    joint = pa[:, None] * wa
    q = joint.sum(axis=0)
    mask = joint > 0.0
    ratio = np.divide(wa, q[None, :], out=np.ones_like(wa), where=mask)
    return float((joint[mask] * np.log2(ratio[mask])).sum())


def average_distortion(p, w, rho) -> float:
    pa = np.asarray(p, dtype=np.float64)
    return float((pa[:, None] * np.asarray(w) * np.asarray(rho)).sum())

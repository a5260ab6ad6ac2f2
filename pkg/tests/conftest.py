"""Shared fixtures and the exhaustive reference oracles.

The oracles are deliberately naive double loops, independent of the
production scan kernels; they are the ground truth for the matcher and
for small-scale codec properties.
"""

import numpy as np
import pytest

from rdcodec.model import DistortionSpec, SourceModel

FLOAT_SLACK = 1e-12


@pytest.fixture(scope="session")
def bern04():
    return SourceModel.bernoulli(0.4)


@pytest.fixture(scope="session")
def bern02():
    return SourceModel.bernoulli(0.2)


@pytest.fixture(scope="session")
def uniform4():
    return SourceModel.uniform(4)


@pytest.fixture(scope="session")
def hamming2():
    return DistortionSpec.hamming(2)


@pytest.fixture(scope="session")
def hamming4():
    return DistortionSpec.hamming(4)


def oracle_nearest(block, database, rho, mode, count, stride=None):
    """Exhaustive nearest window: (1-based position, average distortion)."""
    b = len(block)
    step = 1 if mode == "sliding" else (stride if stride is not None else b)
    best_sum = None
    best_pos = None
    for i in range(count):
        base = i * step
        total = 0
        for j in range(b):
            total = total + rho[block[j]][database[base + j]]
        if best_sum is None or total < best_sum:
            best_sum = total
            best_pos = i
    return best_pos + 1, best_sum / b


def oracle_longest(suffix, database, rho, budget, cap, integer_valued=True):
    """Exhaustive longest admissible match: (length, 1-based position)."""
    m = len(database)
    nsuf = len(suffix)
    slack = 0.0 if integer_valued else FLOAT_SLACK
    best_k = 0
    best_pos = 0
    for i in range(m):
        total = 0
        limit = min(cap, m - i, nsuf)
        for k in range(1, limit + 1):
            total = total + rho[suffix[k - 1]][database[i + k - 1]]
            if total <= k * budget + slack and k > best_k:
                best_k = k
                best_pos = i + 1
    return best_k, best_pos


def random_instance(rng, alphabet, m_max=200, cap_max=16):
    """A random small matcher instance over a Hamming alphabet."""
    m = int(rng.integers(4, m_max + 1))
    b = int(rng.integers(1, min(cap_max, m) + 1))
    db = rng.integers(0, alphabet, size=m).astype(np.uint8)
    blk = rng.integers(0, alphabet, size=b).astype(np.uint8)
    return db, blk

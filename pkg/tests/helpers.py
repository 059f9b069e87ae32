"""Shared random-model builders for the test suite.

Everything is driven by an explicit numpy Generator so tests stay
reproducible under fixed seeds.
"""

from __future__ import annotations

import numpy as np

from srtrkit.factorization import ThetaFactor
from srtrkit.srtr import SrtrPair
from srtrkit.synthesis import assign_stable_spectrum
from srtrkit.systems import PartitionedRealization, is_minimal


def random_partitioned(rng, p, q, m, domain="continuous", max_tries=50):
    """Random output-normal base whose full system is minimal and whose
    (A22, A12) pair is observable, so gains can be placed on it."""
    n = p + q
    for _ in range(max_tries):
        scale = 1.0 / np.sqrt(max(n, 1))
        base = PartitionedRealization(
            A11=rng.normal(size=(p, p)) * scale,
            A12=rng.normal(size=(p, q)) * scale,
            A21=rng.normal(size=(q, p)) * scale,
            A22=rng.normal(size=(q, q)) * scale,
            B1=rng.normal(size=(p, m)),
            B2=rng.normal(size=(q, m)),
            domain=domain,
        )
        if not is_minimal(base.full_system()):
            continue
        if q > 0 and not base.observable_pair():
            continue
        return base
    raise AssertionError("could not draw a usable random base")


def stable_targets(q, rng, domain="continuous"):
    if q == 0:
        return np.zeros(0)
    if domain == "continuous":
        vals = -np.linspace(0.8, 2.5, q) - rng.uniform(0.0, 0.1)
    else:
        vals = np.linspace(-0.7, 0.7, q) * 0.9 + rng.uniform(-0.02, 0.02)
        vals = np.clip(vals, -0.9, 0.9)
    return vals


def stable_gain(base, rng):
    targets = stable_targets(base.q, rng, base.domain)
    return assign_stable_spectrum(base.A22, base.A12, targets)


def random_pair(rng, p, q, m, domain="continuous", stable=True):
    base = random_partitioned(rng, p, q, m, domain)
    if stable and q > 0:
        K = stable_gain(base, rng)
    else:
        K = rng.normal(size=(q, p))
    return SrtrPair(base, K)


def random_theta(p, rng, domain="continuous"):
    if domain == "continuous":
        ax = -np.linspace(1.0, 2.0, p) - rng.uniform(0.0, 0.2)
    else:
        ax = np.linspace(-0.5, 0.5, p) * 0.8 + rng.uniform(-0.05, 0.05)
    Bx = np.linalg.qr(rng.normal(size=(p, p)))[0]
    Cx = np.linalg.qr(rng.normal(size=(p, p)))[0]
    return ThetaFactor(np.diag(ax), Bx, Cx, domain)


def direct_sum_pairs(pairs):
    """Block-diagonal combination of SRTR pairs; keeps output-normal form
    after a permutation-free stacking of the partitions."""

    def blk(mats):
        return _blkdiag([np.atleast_2d(m) for m in mats])

    base = PartitionedRealization(
        A11=blk([p.base.A11 for p in pairs]),
        A12=blk([p.base.A12 for p in pairs]),
        A21=blk([p.base.A21 for p in pairs]),
        A22=blk([p.base.A22 for p in pairs]),
        B1=blk([p.base.B1 for p in pairs]),
        B2=blk([p.base.B2 for p in pairs]),
        domain=pairs[0].domain,
    )
    K = _blkdiag([p.K for p in pairs])
    return SrtrPair(base, K)


def _blkdiag(mats):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def structured_pair(rng, block_sizes=(1, 2), domain="continuous"):
    """Pair with an exact block-diagonal coupling structure and the mask
    that encodes it."""
    parts = [
        random_pair(rng, b, b, b, domain=domain, stable=True) for b in block_sizes
    ]
    pair = direct_sum_pairs(parts)
    p = sum(block_sizes)
    mask = np.zeros((p, p), dtype=int)
    at = 0
    for b in block_sizes:
        mask[at : at + b, at : at + b] = 1
        at += b
    return pair, mask

"""Majorization order, block distributions and the entropy lower bound they give."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .linalg import eigvalsh_desc, log_scale, shannon_entropy
from .weyl import WeylChannelSpec, apply_weyl_channel, prob_vector

MAJORIZATION_TOL = 1e-9


def sort_descending(w) -> np.ndarray:
    """Entries of ``w`` in non-increasing order; ties keep their original order."""
    w = np.asarray(w, dtype=float)
    return w[np.argsort(-w, kind="stable")]


def majorizes(lam, mu, tol: float = MAJORIZATION_TOL) -> bool:
    """True iff ``mu`` is majorized by ``lam``.

    Every partial sum of ``mu`` sorted decreasingly must be at most the
    corresponding partial sum of ``lam`` plus ``tol``.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.shape != mu.shape:
        raise DimensionError(f"length mismatch: {lam.shape} vs {mu.shape}")
    return bool(np.all(np.cumsum(sort_descending(mu)) <= np.cumsum(sort_descending(lam)) + tol))


def block_distribution(pi, d: int) -> np.ndarray:
    """Sums of consecutive length-``d`` blocks of ``pi`` sorted decreasingly.

    ``pi`` is any length ``d**2`` probability vector (a flattened Weyl
    table, or a product distribution over several copies).
    """
    flat = np.asarray(pi, dtype=float).reshape(-1)
    if d < 1 or flat.size != d * d:
        raise DimensionError(f"expected {d}*{d} = {d * d} weights, got {flat.size}")
    prob_vector(flat)
    return sort_descending(flat).reshape(d, d).sum(axis=1)


def entropy_lower_bound(pi, d: int, base: int | str = 2) -> float:
    return shannon_entropy(block_distribution(pi, d), base)


def product_distribution(pi, N: int) -> np.ndarray:
    """Flattened ``N``-fold product ``prod_s pi_{J_s}`` (site 0 is the slowest index)."""
    flat = np.asarray(pi, dtype=float).reshape(-1)
    out = np.ones(1)
    for _ in range(N):
        out = np.multiply.outer(out, flat).reshape(-1)
    return out


@dataclass(frozen=True)
class BlockBoundReport:
    d: int
    block_distribution: np.ndarray
    entropy_bound: float
    source_size: int
    base: str = "2"


def block_bound_report(pi, d: int, base: int | str = 2) -> BlockBoundReport:
    blocks = block_distribution(pi, d)
    label = "2" if log_scale(base) != 1.0 else "e"
    return BlockBoundReport(d, blocks, shannon_entropy(blocks, base), d * d, label)


def tensor_block_bound(spec: WeylChannelSpec, N: int, base: int | str = 2) -> BlockBoundReport:
    """Block bound for ``Phi^{(x)N}``: product distribution over ``n^{2N}`` indices, ``d = n^N``."""
    return block_bound_report(product_distribution(spec.pi, N), spec.n**N, base)


def prop2_verify(spec: WeylChannelSpec, rho, tol: float = MAJORIZATION_TOL) -> bool:
    """Check that the output spectrum of ``rho`` is majorized by the block distribution."""
    out = apply_weyl_channel(spec, rho)
    lam = eigvalsh_desc(out)
    if lam[-1] < -1e-9:
        raise ValidationError("channel output is not positive semidefinite")
    return majorizes(block_distribution(spec.pi, spec.n), lam, tol)


def schur_mixture(lam, weights, permutations) -> np.ndarray:
    """Convex combination ``sum_i w_i P_i lam``; always majorized by ``lam``."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for w, perm in zip(weights, permutations):
        out += w * lam[np.asarray(perm)]
    return out


def log_uniform(d: int, base: int | str = 2) -> float:
    return math.log(d) / log_scale(base)

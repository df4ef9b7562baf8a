"""Exact arithmetic on finite categorical distributions.

All logarithms are natural and all entropies are in nats. The
0 * log 0 = 0 convention is enforced by explicit branching over the
positive support, never by epsilon flooring, so the decomposition
identities built on top of these primitives hold to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZeroError,
    EmptySetError,
    InvalidEntryError,
    InvalidOrderError,
    OutOfRangeError,
    SupportViolationError,
    ZeroMassSupportError,
)

# Raw inputs farther than this from total mass 1 are rejected; anything
# closer is renormalized once at construction to stop drift in long chains.
CONSTRUCTION_TOL = 1e-9

IndexSet = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Categorical:
    """A probability vector over a finite token alphabet.

    The stored array is read-only. Entries are nonnegative and sum to 1
    (renormalized once at construction when within CONSTRUCTION_TOL).
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidEntryError("probability vector must be 1-d and nonempty")
        if not np.all(np.isfinite(p)):
            raise InvalidEntryError("probability vector contains NaN or infinity")
        if np.any(p < 0):
            raise InvalidEntryError("probability vector contains negative entries")
        total = float(p.sum())
        if abs(total - 1.0) > CONSTRUCTION_TOL:
            raise InvalidEntryError(
                f"probabilities sum to {total!r}, more than {CONSTRUCTION_TOL} from 1"
            )
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    def support(self) -> IndexSet:
        """Indices with strictly positive probability, ascending."""
        return tuple(int(v) for v in np.flatnonzero(self.probs))


def as_index_array(members, alphabet_size: int) -> np.ndarray:
    """Validate an index set against an alphabet and return it as an int array.

    Members must be nonempty, unique integers in [0, alphabet_size).
    """
    idx = np.asarray(tuple(members), dtype=np.int64)
    if idx.size == 0:
        raise EmptySetError("index set is empty")
    if np.any(idx < 0) or np.any(idx >= alphabet_size):
        raise OutOfRangeError(
            f"index set contains values outside [0, {alphabet_size})"
        )
    if np.unique(idx).size != idx.size:
        raise InvalidEntryError("index set contains duplicate indices")
    return idx


def normalize(weights) -> Categorical:
    """Scale a nonnegative weight vector into a Categorical."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InvalidEntryError("weight vector must be 1-d and nonempty")
    if not np.all(np.isfinite(w)):
        raise InvalidEntryError("weight vector contains NaN or infinity")
    if np.any(w < 0):
        raise InvalidEntryError("weight vector contains negative entries")
    peak = float(w.max())
    if peak == 0.0:
        raise AllZeroError("all weights are zero")
    w = w / peak  # guards overflow before the final division
    return Categorical(w / w.sum())


def restrict(p: Categorical, members) -> Categorical:
    """Condition p on an index set: proportional on the set, zero elsewhere."""
    idx = as_index_array(members, p.alphabet_size)
    out = np.zeros(p.alphabet_size)
    out[idx] = p.probs[idx]
    mass = float(out.sum())
    if mass == 0.0:
        raise ZeroMassSupportError("restriction set carries zero mass")
    return Categorical(out / mass)


def entropy(p: Categorical) -> float:
    """Shannon entropy in nats with the 0 log 0 = 0 convention."""
    pos = p.probs[p.probs > 0]
    return float(-(pos * np.log(pos)).sum())


def renyi_entropy(p: Categorical, alpha: float) -> float:
    """Renyi entropy of order alpha in nats; alpha = 1 is the Shannon branch."""
    if not alpha > 0:
        raise InvalidOrderError(f"Renyi order must be positive, got {alpha!r}")
    if alpha == 1.0:
        return entropy(p)
    logp = np.log(p.probs[p.probs > 0])
    scaled = alpha * logp
    peak = scaled.max()  # log-sum-exp keeps large alpha from underflowing
    log_sum = peak + np.log(np.exp(scaled - peak).sum())
    return float(log_sum / (1.0 - alpha))


def kl_divergence(p: Categorical, q: Categorical) -> float:
    """KL(p || q) in nats over the support of p."""
    if p.alphabet_size != q.alphabet_size:
        raise InvalidEntryError("alphabet sizes differ")
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        raise SupportViolationError("p has mass where q is zero")
    pv = p.probs[mask]
    return float((pv * (np.log(pv) - np.log(q.probs[mask]))).sum())


def cross_entropy(p: Categorical, q: Categorical) -> float:
    """E_{v~p}[-log q(v)] in nats."""
    if p.alphabet_size != q.alphabet_size:
        raise InvalidEntryError("alphabet sizes differ")
    mask = p.probs > 0
    if np.any(q.probs[mask] == 0):
        raise SupportViolationError("p has mass where q is zero")
    return float(-(p.probs[mask] * np.log(q.probs[mask])).sum())


def binary_entropy(x: float) -> float:
    """Entropy of a Bernoulli(x) in nats; 0 at both endpoints."""
    if not 0.0 <= x <= 1.0:
        raise OutOfRangeError(f"binary entropy argument must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-(x * np.log(x) + (1.0 - x) * np.log(1.0 - x)))

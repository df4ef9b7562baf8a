"""Decoding operator algebra: temperature, top-k, top-p, sampling, normal form.

The standard pipeline is temper -> top-k -> top-p -> sample. Ties are
broken by lowest token index everywhere, cumulative-mass thresholds are
tested with a 1e-12 absolute epsilon, and all sampling goes through
explicit counter-based streams so every experiment replays bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import Categorical, IndexSet, as_index_array, restrict
from .errors import (
    EmptySetError,
    InvalidOrderError,
    NonPositiveTemperatureError,
    NormalFormViolationError,
    OutOfRangeError,
    ZeroMassSupportError,
)

OP_TEMPER = "temper"
OP_TOP_K = "top_k"
OP_TOP_P = "top_p"
DEFAULT_ORDER = (OP_TEMPER, OP_TOP_K, OP_TOP_P)

# Temperatures below this trigger greedy (argmax) decoding.
GREEDY_THRESHOLD = 1e-5

# Absolute epsilon for cumulative-mass threshold tests.
TOP_P_EPS = 1e-12


def _check_order(order) -> tuple[str, str, str]:
    order = tuple(order)
    if sorted(order) != sorted(DEFAULT_ORDER):
        raise InvalidOrderError(
            f"order must be a permutation of {DEFAULT_ORDER}, got {order!r}"
        )
    return order


@dataclass(frozen=True)
class DecodeConfig:
    """Decode-time knobs: temperature, top-k (0 disables), top-p (1 disables)."""

    temperature: float = 1.0
    top_k: int = 0
    top_p: float = 1.0
    order: tuple[str, str, str] = DEFAULT_ORDER

    def __post_init__(self) -> None:
        if not self.temperature > 0:
            raise NonPositiveTemperatureError(
                f"temperature must be positive, got {self.temperature!r}"
            )
        if self.top_k < 0:
            raise OutOfRangeError(f"top_k must be >= 0, got {self.top_k!r}")
        if not 0.0 < self.top_p <= 1.0:
            raise OutOfRangeError(f"top_p must lie in (0, 1], got {self.top_p!r}")
        object.__setattr__(self, "order", _check_order(self.order))


@dataclass(frozen=True)
class RetainedSupport:
    """Survivors of the truncation pipeline at one context.

    support is stored in descending-probability rank order; kept_mass is
    the base-model mass of the support; operational is the tempered,
    truncated, renormalized distribution on the full alphabet.
    """

    support: IndexSet
    kept_mass: float
    operational: Categorical


@dataclass(frozen=True)
class PrefixPolicy:
    """A power transform p^exponent supported on a rank prefix of length prefix_len."""

    prefix_len: int
    exponent: float
    dist: Categorical


def rank_descending(p: Categorical) -> np.ndarray:
    """Token indices sorted by descending probability, ties by lowest index."""
    n = p.alphabet_size
    return np.lexsort((np.arange(n), -p.probs))


def argmax_token(p: Categorical) -> int:
    """Highest-probability token, lowest index on ties."""
    return int(np.argmax(p.probs))


def greedy_guard(temperature: float) -> bool:
    """True when the pipeline must bypass sampling and return the argmax."""
    if not temperature >= 0:
        raise OutOfRangeError(f"temperature must be >= 0, got {temperature!r}")
    return temperature < GREEDY_THRESHOLD


def temper(p: Categorical, temperature: float, members=None) -> Categorical:
    """Power-transform p proportional to p^(1/T), optionally restricted to a set.

    Computed in log space so extreme temperatures neither overflow nor
    lose the ranking; zero entries stay exactly zero.
    """
    if not temperature > 0:
        raise NonPositiveTemperatureError(
            f"temperature must be positive, got {temperature!r}"
        )
    mask = p.probs > 0
    if members is not None:
        idx = as_index_array(members, p.alphabet_size)
        keep = np.zeros(p.alphabet_size, dtype=bool)
        keep[idx] = True
        mask &= keep
    if not mask.any():
        raise ZeroMassSupportError("no positive-probability tokens inside the set")
    logw = np.log(p.probs[mask]) / temperature
    w = np.exp(logw - logw.max())
    out = np.zeros(p.alphabet_size)
    out[mask] = w / w.sum()
    return Categorical(out)


def top_k_set(p: Categorical, k: int) -> IndexSet:
    """The k highest-probability indices; k = 0 or k >= V keeps all positive tokens.

    Returned in descending rank order.
    """
    if k < 0:
        raise OutOfRangeError(f"top_k must be >= 0, got {k!r}")
    order = rank_descending(p)
    if k == 0 or k >= p.alphabet_size:
        order = order[p.probs[order] > 0]
        return tuple(int(v) for v in order)
    return tuple(int(v) for v in order[:k])


def top_p_set(p: Categorical, threshold: float) -> IndexSet:
    """Smallest descending-rank prefix whose cumulative mass reaches the threshold.

    Never empty; threshold 1 keeps the full positive support. Returned in
    descending rank order.
    """
    if not 0.0 < threshold <= 1.0:
        raise OutOfRangeError(f"top_p threshold must lie in (0, 1], got {threshold!r}")
    order = rank_descending(p)
    order = order[p.probs[order] > 0]
    if threshold == 1.0:
        return tuple(int(v) for v in order)
    csum = np.cumsum(p.probs[order])
    m = int(np.searchsorted(csum, threshold - TOP_P_EPS)) + 1
    m = min(m, order.size)
    return tuple(int(v) for v in order[:m])


def retained_support(p0: Categorical, cfg: DecodeConfig) -> RetainedSupport:
    """Run the standard pipeline on p0 and report survivors.

    kept_mass is measured against the raw base distribution; the
    operational distribution is the tempered restriction to the survivors.
    """
    if cfg.order != DEFAULT_ORDER:
        raise InvalidOrderError(
            "retained_support requires the standard pipeline order; "
            "use decode_normal_form for other orderings"
        )
    tempered = temper(p0, cfg.temperature)
    kept = top_k_set(tempered, cfg.top_k)
    within = restrict(tempered, kept)
    support = top_p_set(within, cfg.top_p)
    operational = restrict(tempered, support)
    members = np.asarray(support, dtype=np.int64)
    return RetainedSupport(
        support=support,
        kept_mass=float(p0.probs[members].sum()),
        operational=operational,
    )


def make_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, replayable random stream (counter-based Philox)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,)))
    )


def gumbel_max_sample(operational: Categorical, rng: np.random.Generator, size=None):
    """Sample by dividing probabilities by Exp(1) noise and taking the argmax.

    The marginal law equals the operational distribution. Noise is
    -log(U) with U uniform on (0, 1], so it is never infinite. With size
    given, returns that many draws from the one stream as an int array.
    """
    p = operational.probs
    shape = (p.size,) if size is None else (int(size), p.size)
    u = 1.0 - rng.random(shape)  # in (0, 1]
    noise = -np.log(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(p > 0, p / noise, -1.0)
    if size is None:
        return int(np.argmax(scores))
    return np.argmax(scores, axis=1)


def _run_pipeline(p: Categorical, order, alpha: float, k: int, top_p: float) -> Categorical:
    current = p
    for op in order:
        if op == OP_TEMPER:
            current = temper(current, 1.0 / alpha)
        elif op == OP_TOP_K:
            current = restrict(current, top_k_set(current, k))
        else:
            current = restrict(current, top_p_set(current, top_p))
    return current


def decode_normal_form(
    p: Categorical, order, alpha: float, k: int, top_p: float
) -> PrefixPolicy:
    """Execute temper/top-k/top-p in any order and return the prefix-power form.

    alpha is the power exponent (temperature 1/alpha). The result is
    checked to be p^alpha on a contiguous prefix of p's descending
    ranking; any deviation beyond 1e-10 is an implementation bug.
    """
    order = _check_order(order)
    if not alpha > 0:
        raise OutOfRangeError(f"exponent must be positive, got {alpha!r}")
    if k < 0:
        raise OutOfRangeError(f"top_k must be >= 0, got {k!r}")
    if not 0.0 < top_p <= 1.0:
        raise OutOfRangeError(f"top_p must lie in (0, 1], got {top_p!r}")
    final = _run_pipeline(p, order, alpha, k, top_p)
    survivors = np.flatnonzero(final.probs)
    m = int(survivors.size)
    prefix = rank_descending(p)[:m]
    if set(int(v) for v in prefix) != set(int(v) for v in survivors):
        raise NormalFormViolationError(
            f"pipeline support {sorted(survivors.tolist())} is not the "
            f"rank prefix {sorted(prefix.tolist())}"
        )
    policy = PrefixPolicy(prefix_len=m, exponent=float(alpha), dist=final)
    deviation = power_rigidity_check(policy, p)
    if deviation > 1e-10:
        raise NormalFormViolationError(
            f"log-odds deviate from the global power law by {deviation!r}"
        )
    return policy


def power_rigidity_check(policy: PrefixPolicy, base: Categorical) -> float:
    """Max over surviving pairs of |log-odds(policy) - exponent * log-odds(base)|.

    Equals the spread of log(dist) - exponent * log(base) over the
    survivors, so it is computed in O(prefix_len).
    """
    survivors = np.flatnonzero(policy.dist.probs)
    residual = np.log(policy.dist.probs[survivors]) - policy.exponent * np.log(
        base.probs[survivors]
    )
    return float(residual.max() - residual.min())

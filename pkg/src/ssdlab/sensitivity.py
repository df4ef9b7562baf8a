"""Escort distributions, temperature-sensitivity identities, and entropy splits.

The escort at exponent gamma on a support set S is proportional to
p0^gamma on S. Derivatives of escort expectations in gamma reduce to
covariances with log p0; entropy responds to temperature as
Var(log p) / T^3. Zero-probability tokens are silently dropped from S
(their escort weight is exactly zero); only an explicit event argument
touching them is an error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import (
    Categorical,
    as_index_array,
    binary_entropy,
    entropy,
    restrict,
)
from .decode import rank_descending, temper
from .errors import (
    EmptyEventError,
    InvalidEntryError,
    KTooLargeError,
    NonPositiveTemperatureError,
    OutOfRangeError,
    RankOutOfRangeError,
    ZeroMassSupportError,
    ZeroProbabilityOnSupportError,
)


@dataclass(frozen=True)
class EntropyBreakdown:
    """Full-alphabet entropy split into gate + head + tail channels."""

    gate_entropy: float
    head_entropy: float
    tail_entropy: float
    total: float


@dataclass(frozen=True)
class FeasibilityReport:
    """Top-p window bounds at fixed (tau, k): feasible iff lower < upper."""

    lower: float
    upper: float
    feasible: bool
    tau: float
    k: int


def _positive_members(p0: Categorical, members) -> np.ndarray:
    idx = as_index_array(members, p0.alphabet_size)
    idx = idx[p0.probs[idx] > 0]
    if idx.size == 0:
        raise ZeroMassSupportError("support set carries zero mass")
    return idx


def escort_distribution(p0: Categorical, members, gamma: float) -> Categorical:
    """The distribution proportional to p0^gamma on the set, zero elsewhere."""
    if not gamma > 0:
        raise OutOfRangeError(f"gamma must be positive, got {gamma!r}")
    return temper(p0, 1.0 / gamma, members)


def _escort_weights(p0: Categorical, idx: np.ndarray, gamma: float) -> np.ndarray:
    # log-space softmax of gamma * log p0 over idx; safe for extreme gamma
    scaled = gamma * np.log(p0.probs[idx])
    w = np.exp(scaled - scaled.max())
    return w / w.sum()


def escort_sensitivity(p0: Categorical, members, gamma: float, f) -> float:
    """d/dgamma of the escort expectation of f, as Cov(f, log p0) under the escort."""
    if not gamma > 0:
        raise OutOfRangeError(f"gamma must be positive, got {gamma!r}")
    fv = np.asarray(f, dtype=float)
    if fv.ndim != 1 or fv.size != p0.alphabet_size:
        raise InvalidEntryError("f must be a vector over the full alphabet")
    if not np.all(np.isfinite(fv)):
        raise InvalidEntryError("f must be finite")
    idx = _positive_members(p0, members)
    w = _escort_weights(p0, idx, gamma)
    logp = np.log(p0.probs[idx])
    f_centered = fv[idx] - w @ fv[idx]
    lp_centered = logp - w @ logp
    return float(w @ (f_centered * lp_centered))


def set_mass_log_sensitivity(p0: Categorical, members, gamma: float, event) -> float:
    """d/dgamma of log escort-mass of an event inside the set.

    Equals the conditional mean of log p0 on the event minus the
    unconditional escort mean; positive sign means cooling grows the event.
    """
    if not gamma > 0:
        raise OutOfRangeError(f"gamma must be positive, got {gamma!r}")
    idx = _positive_members(p0, members)
    ev = np.asarray(tuple(event), dtype=np.int64)
    if ev.size == 0:
        raise EmptyEventError("event set is empty")
    if np.unique(ev).size != ev.size:
        raise InvalidEntryError("event set contains duplicate indices")
    full = set(int(v) for v in as_index_array(members, p0.alphabet_size))
    if not set(ev.tolist()) <= full:
        raise OutOfRangeError("event set is not contained in the support set")
    if np.any(p0.probs[ev] == 0):
        raise ZeroProbabilityOnSupportError(
            "event contains a zero-probability token (log p undefined)"
        )
    w_full = _escort_weights(p0, idx, gamma)
    w_event = _escort_weights(p0, ev, gamma)
    logp_full = np.log(p0.probs[idx])
    logp_event = np.log(p0.probs[ev])
    return float(w_event @ logp_event - w_full @ logp_full)


def entropy_temperature_response(p: Categorical, members, temperature: float) -> float:
    """dH/dT of the tempered restriction of p at T: Var(log p) / T^3, never negative."""
    if not temperature > 0:
        raise NonPositiveTemperatureError(
            f"temperature must be positive, got {temperature!r}"
        )
    idx = _positive_members(p, members)
    w = _escort_weights(p, idx, 1.0 / temperature)
    logp = np.log(p.probs[idx])
    centered = logp - w @ logp
    return float((w @ (centered * centered)) / temperature**3)


def entropy_decomposition(p_theta: Categorical, members) -> EntropyBreakdown:
    """Split entropy(p_theta) into gate + head + tail across an index set.

    gate is the binary entropy of the kept mass, head is the kept-mass
    weighted entropy of the restriction, tail the complement's share;
    head and tail are 0 by convention when their mass vanishes.
    """
    idx = as_index_array(members, p_theta.alphabet_size)
    km = float(p_theta.probs[idx].sum())
    gate = binary_entropy(min(km, 1.0))
    head = km * entropy(restrict(p_theta, idx)) if km > 0 else 0.0
    comp = np.setdiff1d(np.arange(p_theta.alphabet_size), idx)
    tail_mass = float(p_theta.probs[comp].sum()) if comp.size else 0.0
    tail = tail_mass * entropy(restrict(p_theta, comp)) if tail_mass > 0 else 0.0
    return EntropyBreakdown(
        gate_entropy=gate,
        head_entropy=head,
        tail_entropy=tail,
        total=gate + head + tail,
    )


def prefix_mass_curve(p: Categorical, tau: float, k: int) -> np.ndarray:
    """Tempered cumulative prefix masses S_m for m = 1..k within the top-k head.

    S_m is the mass of the m highest-ranked tokens of p^(1/tau)
    renormalized over the k highest; S_k is exactly 1.
    """
    if not tau > 0:
        raise NonPositiveTemperatureError(f"tau must be positive, got {tau!r}")
    if k < 1:
        raise OutOfRangeError(f"k must be >= 1, got {k!r}")
    order = rank_descending(p)
    order = order[p.probs[order] > 0]
    if k > order.size:
        raise KTooLargeError(
            f"k = {k} exceeds the {order.size} positive-probability tokens"
        )
    logw = np.log(p.probs[order[:k]]) / tau
    w = np.exp(logw - logw.max())
    csum = np.cumsum(w)
    return csum / csum[-1]


def feasible_topp_interval(
    lock_p: Categorical,
    lock_rank: int,
    fork_p: Categorical,
    fork_rank: int,
    tau: float,
    k: int,
) -> FeasibilityReport:
    """The top-p window keeping the lock sharp while retaining the fork's rank.

    lower is the fork prefix mass just below fork_rank (0 when rank 1,
    strict bound); upper is the lock prefix mass at lock_rank (non-strict).
    """
    if lock_rank < 1 or lock_rank > k:
        raise RankOutOfRangeError(f"lock_rank must lie in [1, {k}], got {lock_rank!r}")
    if fork_rank < 1 or fork_rank > k:
        raise RankOutOfRangeError(f"fork_rank must lie in [1, {k}], got {fork_rank!r}")
    lock_curve = prefix_mass_curve(lock_p, tau, k)
    fork_curve = prefix_mass_curve(fork_p, tau, k)
    lower = 0.0 if fork_rank == 1 else float(fork_curve[fork_rank - 2])
    upper = float(lock_curve[lock_rank - 1])
    return FeasibilityReport(
        lower=lower, upper=upper, feasible=lower < upper, tau=tau, k=k
    )

"""Self-distillation targets, loss decompositions, gradients, and a local student.

The target at one context is the tempered base distribution restricted
to the retained support. Fitting it with cross-entropy splits exactly
into a support gate plus a conditional term, and further into
gate + reshape + align + const; both identities are used as invariants
rather than approximations, so every term is computed by branching on
the exact support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import (
    Categorical,
    IndexSet,
    as_index_array,
    cross_entropy,
    entropy,
    kl_divergence,
    restrict,
)
from .decode import DecodeConfig, make_stream, retained_support, temper
from .errors import (
    CompositionViolationError,
    DivergenceError,
    EmptyEventError,
    InvalidEntryError,
    OutOfRangeError,
    ZeroMassEventError,
    ZeroMassSupportError,
)

# Logit floor standing in for -infinity at zero-probability tokens.
LOGIT_FLOOR = -50.0

# Consecutive loss increases tolerated before training aborts.
DIVERGENCE_WINDOW = 100


@dataclass(frozen=True)
class SsdTarget:
    """The distillation target at one context: q proportional to source^(1/T) on support."""

    support: IndexSet
    q: Categorical
    train_temperature: float
    source: Categorical


@dataclass(frozen=True)
class LossBreakdown:
    """Cross-entropy to the target split into gate + reshape + align + const."""

    gate: float
    reshape: float
    align: float
    const: float
    total: float


@dataclass(frozen=True)
class StudentState:
    """One step of the local softmax student: logits plus convergence diagnostics."""

    step: int
    logits: np.ndarray
    loss: float
    on_support_tv: float
    off_support_mass: float


@dataclass(frozen=True)
class LocalGain:
    """Factorization of the ideal student's event probability at eval temperature tau."""

    support_gain: float
    reshape_gain: float
    base_prob: float
    student_prob: float


def ssd_target(p0: Categorical, cfg: DecodeConfig) -> SsdTarget:
    """Build the target induced by running the training-time pipeline on p0."""
    rs = retained_support(p0, cfg)
    return SsdTarget(
        support=rs.support,
        q=rs.operational,
        train_temperature=cfg.temperature,
        source=p0,
    )


def kept_mass(p_theta: Categorical, members) -> float:
    """Probability mass p_theta assigns to an index set."""
    idx = as_index_array(members, p_theta.alphabet_size)
    return float(p_theta.probs[idx].sum())


def _require_positive_on_support(target: SsdTarget, p_theta: Categorical) -> None:
    # q is positive on all of target.support by construction
    idx = np.asarray(target.support, dtype=np.int64)
    if np.any(p_theta.probs[idx] == 0):
        raise ZeroMassSupportError("student vanishes on a target-support token")


def gate_conditional_split(target: SsdTarget, p_theta: Categorical) -> tuple[float, float]:
    """Split cross_entropy(q, p_theta) into -log KeptMass plus the conditional CE."""
    _require_positive_on_support(target, p_theta)
    km = kept_mass(p_theta, target.support)
    gate = float(-np.log(km))
    conditional = cross_entropy(target.q, restrict(p_theta, target.support))
    return gate, conditional


def three_term_decomposition(target: SsdTarget, p_theta: Categorical) -> LossBreakdown:
    """Split cross_entropy(q, p_theta) into gate + reshape + align + const.

    The reshape term uses the free-energy form -T log sum(restricted^(1/T))
    and is exactly 0 at T = 1 by the continuous extension.
    """
    _require_positive_on_support(target, p_theta)
    T = target.train_temperature
    km = kept_mass(p_theta, target.support)
    restricted = restrict(p_theta, target.support)
    gate = float(-np.log(km))
    if T == 1.0:
        reshape = 0.0
    else:
        logr = np.log(restricted.probs[restricted.probs > 0]) / T
        peak = logr.max()
        reshape = float(-T * (peak + np.log(np.exp(logr - peak).sum())))
    align = float(T * kl_divergence(target.q, temper(restricted, T)))
    const = float(T * entropy(target.q))
    return LossBreakdown(
        gate=gate,
        reshape=reshape,
        align=align,
        const=const,
        total=gate + reshape + align + const,
    )


def _softmax(logits: np.ndarray) -> np.ndarray:
    w = np.exp(logits - logits.max())
    return w / w.sum()


def loss_gradient_logits(target: SsdTarget, logits) -> np.ndarray:
    """Gradient of cross_entropy(q, softmax(logits)) in logit coordinates.

    On the support: -(1 - KeptMass) * p(v|S) + (p(v|S) - q(v)); off the
    support: +p(v). Entries sum to 0 (softmax gauge).
    """
    z = np.asarray(logits, dtype=float)
    if z.ndim != 1 or z.size != target.q.alphabet_size:
        raise InvalidEntryError("logit vector shape does not match the target alphabet")
    if not np.all(np.isfinite(z)):
        raise InvalidEntryError("logits must be finite")
    p = _softmax(z)
    mask = np.zeros(z.size, dtype=bool)
    mask[np.asarray(target.support, dtype=np.int64)] = True
    km = float(p[mask].sum())
    cond = np.where(mask, p / km, 0.0)
    return np.where(mask, -(1.0 - km) * cond + (cond - target.q.probs), p)


def self_training_fixed_point_check(
    p: Categorical, n_trials: int = 100, seed: int = 0
) -> float:
    """Max-norm of the expected self-training gradient accumulated term by term.

    With T = 1 and no truncation the target is the model itself, so the
    expected score-function gradient telescopes to zero; each trial
    re-evaluates the full sum under a fresh random gauge shift of the
    logits. The returned worst-case norm should be at machine-zero scale.
    """
    if n_trials < 1:
        raise OutOfRangeError(f"n_trials must be >= 1, got {n_trials!r}")
    rng = make_stream(seed)
    base = np.where(p.probs > 0, np.log(np.maximum(p.probs, 1e-300)), LOGIT_FLOOR)
    eye = np.eye(p.alphabet_size)
    worst = 0.0
    for _ in range(n_trials):
        z = base + 3.0 * rng.standard_normal()
        s = _softmax(z)
        grad_rows = s[:, None] * (s[None, :] - eye)
        expected = grad_rows.sum(axis=0)
        worst = max(worst, float(np.abs(expected).max()))
    return worst


class DivergenceMonitor:
    """Abort signal for runaway training: too many consecutive loss increases."""

    def __init__(self, window: int = DIVERGENCE_WINDOW):
        self.window = window
        self.prev = np.inf
        self.streak = 0

    def observe(self, loss: float) -> None:
        self.streak = self.streak + 1 if loss > self.prev else 0
        self.prev = loss
        if self.streak >= self.window:
            raise DivergenceError(
                f"loss increased for {self.window} consecutive steps"
            )


def train_local_student(
    p0: Categorical,
    cfg: DecodeConfig,
    learning_rate: float = 0.5,
    max_steps: int = 100_000,
    tv_tolerance: float = 1e-6,
) -> list[StudentState]:
    """Fit a local softmax student to the target by plain gradient descent.

    Logits start at log p0 (zeros floored at -50). Terminates when the
    on-support total variation to q drops below tv_tolerance or the step
    cap is reached; returns the full trajectory including step 0.
    """
    if not learning_rate > 0:
        raise OutOfRangeError(f"learning_rate must be positive, got {learning_rate!r}")
    if max_steps < 0:
        raise OutOfRangeError(f"max_steps must be >= 0, got {max_steps!r}")
    if not tv_tolerance > 0:
        raise OutOfRangeError(f"tv_tolerance must be positive, got {tv_tolerance!r}")
    target = ssd_target(p0, cfg)
    idx = np.asarray(target.support, dtype=np.int64)
    mask = np.zeros(p0.alphabet_size, dtype=bool)
    mask[idx] = True
    qv = target.q.probs[mask]
    z = np.where(p0.probs > 0, np.log(np.maximum(p0.probs, 1e-300)), LOGIT_FLOOR)
    monitor = DivergenceMonitor()
    trajectory: list[StudentState] = []
    for step in range(max_steps + 1):
        p = _softmax(z)
        km = float(p[mask].sum())
        tv = float(0.5 * np.abs(p[mask] / km - qv).sum())
        loss = float(-(qv * np.log(p[mask])).sum())
        snapshot = z.copy()
        snapshot.flags.writeable = False
        trajectory.append(
            StudentState(
                step=step,
                logits=snapshot,
                loss=loss,
                on_support_tv=tv,
                off_support_mass=1.0 - km,
            )
        )
        if tv < tv_tolerance or step == max_steps:
            break
        monitor.observe(loss)
        cond = np.where(mask, p / km, 0.0)
        grad = np.where(mask, -(1.0 - km) * cond + (cond - target.q.probs), p)
        z = z - learning_rate * grad
    return trajectory


def ideal_fit_eval(target: SsdTarget, tau: float) -> Categorical:
    """Temper the fitted target at eval temperature tau.

    Must coincide with the source tempered at train_temperature * tau and
    restricted to the support; the equality is asserted to 1e-12.
    """
    if not tau > 0:
        raise OutOfRangeError(f"tau must be positive, got {tau!r}")
    fitted = temper(target.q, tau)
    composed = restrict(
        temper(target.source, target.train_temperature * tau), target.support
    )
    gap = float(np.abs(fitted.probs - composed.probs).max())
    if gap > 1e-12:
        raise CompositionViolationError(
            f"tempered target deviates from the composed form by {gap!r}"
        )
    return fitted


def local_gain(p0: Categorical, cfg: DecodeConfig, tau: float, event) -> LocalGain:
    """Factor the ideal student's probability of an event at eval temperature tau.

    student_prob = support_gain * reshape_gain * base_prob, where
    support_gain is the inverse retained mass of the tempered teacher and
    reshape_gain is the ratio of the two escort probabilities of the event.
    """
    if not tau > 0:
        raise OutOfRangeError(f"tau must be positive, got {tau!r}")
    target = ssd_target(p0, cfg)
    idx = np.asarray(tuple(event), dtype=np.int64)
    if idx.size == 0:
        raise EmptyEventError("event set is empty")
    if np.unique(idx).size != idx.size:
        raise InvalidEntryError("event set contains duplicate indices")
    if not set(idx.tolist()) <= set(target.support):
        raise OutOfRangeError("event set is not contained in the retained support")
    p0_tau = temper(p0, tau)
    m_tau = float(p0_tau.probs[np.asarray(target.support, dtype=np.int64)].sum())
    train_escort = restrict(
        temper(p0, cfg.temperature * tau), target.support
    )
    eval_escort = restrict(p0_tau, target.support)
    denom = float(eval_escort.probs[idx].sum())
    if denom == 0.0:
        raise ZeroMassEventError("event carries zero mass under the eval escort")
    reshape_gain = float(train_escort.probs[idx].sum()) / denom
    base_prob = float(p0_tau.probs[idx].sum())
    student_prob = float(ideal_fit_eval(target, tau).probs[idx].sum())
    return LocalGain(
        support_gain=1.0 / m_tau,
        reshape_gain=reshape_gain,
        base_prob=base_prob,
        student_prob=student_prob,
    )

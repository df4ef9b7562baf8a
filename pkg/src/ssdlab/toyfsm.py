"""A 16-token finite-state world where decoding trade-offs have closed forms.

The machine has one root and two symmetric paths, each consisting of one
fork state followed by three lock states; the two paths share their fork
and lock distributions, so success probability is an exact product of
per-state operational probabilities. Each state's distribution has four
explicit head values and a geometric tail over the remaining tokens. At
the root, tokens 0 and 1 start the two viable paths; at every other
state only token 0 advances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import Categorical, IndexSet
from .decode import DecodeConfig, gumbel_max_sample, make_stream, retained_support
from .errors import EmptySetError, InvalidEntryError, InvalidRatioError, OutOfRangeError
from .objective import ssd_target

VOCAB_SIZE = 16

LOCK_HEAD = (0.750, 0.055, 0.050, 0.037)
FORK_HEAD = (0.148, 0.280, 0.140, 0.144)
ROOT_HEAD = (0.200, 0.190, 0.329, 0.126)

DEFAULT_TAIL_RATIO = 0.5
DEFAULT_N_LOCKS = 3

ROOT_CORRECT = (0, 1)
CHAIN_CORRECT = (0,)

# Monte Carlo draws are taken in fixed-size batches so results are
# independent of n's chunking.
MC_BATCH = 1 << 15


@dataclass(frozen=True)
class Archetype:
    """One state's token distribution plus its correct continuations.

    head and tail_ratio record the generating parameters; they are None
    for derived archetypes (e.g. distilled ones).
    """

    kind: str
    dist: Categorical
    correct_tokens: IndexSet
    head: tuple[float, ...] | None = None
    tail_ratio: float | None = None


@dataclass(frozen=True)
class Fsm:
    """Root plus the shared per-path fork and lock archetypes."""

    root: Archetype
    fork: Archetype
    lock: Archetype
    n_locks: int = DEFAULT_N_LOCKS


@dataclass(frozen=True)
class SweepRow:
    temperature: float
    top_p: float
    teacher_success: float
    student_success: float
    gap: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


@dataclass(frozen=True)
class GridRow:
    """Per-top-p optimized success for both models; gap in percentage points."""

    top_p: float
    teacher_t_star: float
    teacher_p_star: float
    student_t_star: float
    student_p_star: float
    gap_pp: float


@dataclass(frozen=True)
class McResult:
    estimate: float
    stderr: float


def geometric_tail(residual: float, ratio: float, length: int) -> np.ndarray:
    """A length-term geometric sequence with the given ratio summing to residual."""
    if not 0.0 < ratio < 1.0:
        raise InvalidRatioError(f"tail ratio must lie in (0, 1), got {ratio!r}")
    if length < 1:
        raise OutOfRangeError(f"tail length must be >= 1, got {length!r}")
    first = residual * (1.0 - ratio) / (1.0 - ratio**length)
    return first * ratio ** np.arange(length)


def build_archetype(
    kind: str,
    head,
    tail_ratio: float,
    correct_tokens,
    vocab_size: int = VOCAB_SIZE,
) -> Archetype:
    """Assemble head values plus a geometric tail into a full distribution."""
    head = tuple(float(x) for x in head)
    if any(not np.isfinite(x) or x < 0 for x in head):
        raise InvalidEntryError("head values must be finite and nonnegative")
    if len(head) >= vocab_size:
        raise OutOfRangeError(
            f"head length {len(head)} leaves no tail in a {vocab_size}-token alphabet"
        )
    residual = 1.0 - sum(head)
    if residual <= 0:
        raise InvalidEntryError("head values must sum to strictly less than 1")
    tail = geometric_tail(residual, tail_ratio, vocab_size - len(head))
    dist = Categorical(np.concatenate([np.asarray(head), tail]))
    return Archetype(
        kind=kind,
        dist=dist,
        correct_tokens=tuple(int(t) for t in correct_tokens),
        head=head,
        tail_ratio=float(tail_ratio),
    )


def build_toy_fsm(
    tail_ratio: float = DEFAULT_TAIL_RATIO,
    lock_head=LOCK_HEAD,
    fork_head=FORK_HEAD,
    root_head=ROOT_HEAD,
    vocab_size: int = VOCAB_SIZE,
    n_locks: int = DEFAULT_N_LOCKS,
) -> Fsm:
    """Construct the toy machine; all parameters overridable for experiments."""
    if n_locks < 1:
        raise OutOfRangeError(f"n_locks must be >= 1, got {n_locks!r}")
    return Fsm(
        root=build_archetype("root", root_head, tail_ratio, ROOT_CORRECT, vocab_size),
        fork=build_archetype("fork", fork_head, tail_ratio, CHAIN_CORRECT, vocab_size),
        lock=build_archetype("lock", lock_head, tail_ratio, CHAIN_CORRECT, vocab_size),
        n_locks=n_locks,
    )


def operational_policy(arch: Archetype, temperature: float, top_p: float) -> Categorical:
    """The post-truncation, post-temperature distribution at one state (k disabled)."""
    cfg = DecodeConfig(temperature=temperature, top_k=0, top_p=top_p)
    return retained_support(arch.dist, cfg).operational


def _correct_mass(arch: Archetype, temperature: float, top_p: float) -> float:
    policy = operational_policy(arch, temperature, top_p)
    return float(policy.probs[np.asarray(arch.correct_tokens, dtype=np.int64)].sum())


def exact_success(fsm: Fsm, temperature: float, top_p: float) -> float:
    """Closed-form success probability: product of correct-token masses per state."""
    return (
        _correct_mass(fsm.root, temperature, top_p)
        * _correct_mass(fsm.fork, temperature, top_p)
        * _correct_mass(fsm.lock, temperature, top_p) ** fsm.n_locks
    )


def _distill_archetype(arch: Archetype, cfg: DecodeConfig) -> Archetype:
    q = ssd_target(arch.dist, cfg).q
    return Archetype(kind=arch.kind, dist=q, correct_tokens=arch.correct_tokens)


def distill_fsm(fsm: Fsm, train_temperature: float, train_top_p: float) -> Fsm:
    """Replace every state's distribution with its distillation target."""
    cfg = DecodeConfig(temperature=train_temperature, top_k=0, top_p=train_top_p)
    return Fsm(
        root=_distill_archetype(fsm.root, cfg),
        fork=_distill_archetype(fsm.fork, cfg),
        lock=_distill_archetype(fsm.lock, cfg),
        n_locks=fsm.n_locks,
    )


def temperature_sweep(teacher: Fsm, student: Fsm, t_grid, top_p: float) -> SweepResult:
    """Evaluate both machines' exact success over a temperature grid."""
    grid = [float(t) for t in t_grid]
    if not grid:
        raise EmptySetError("temperature grid is empty")
    if any(not t > 0 for t in grid):
        raise OutOfRangeError("temperature grid entries must be positive")
    rows = []
    for t in grid:
        ts = exact_success(teacher, t, top_p)
        ss = exact_success(student, t, top_p)
        rows.append(
            SweepRow(
                temperature=t,
                top_p=top_p,
                teacher_success=ts,
                student_success=ss,
                gap=ss - ts,
            )
        )
    return SweepResult(rows=tuple(rows))


def optimize_temperature(
    fsm: Fsm,
    top_p: float,
    bounds: tuple[float, float] = (0.05, 5.0),
    grid_step: float = 0.001,
    refine_tol: float = 1e-4,
) -> tuple[float, float]:
    """Maximize exact success over temperature: coarse grid plus ternary refinement.

    Returns the best point actually evaluated. The success curve has
    kinks where the retained support changes, and optima can sit exactly
    on a kink, so probes on the wrong side never displace a better
    evaluated point.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not 0 < lo < hi:
        raise OutOfRangeError(f"bounds must satisfy 0 < lo < hi, got {bounds!r}")
    best_t, best_v = lo, -1.0

    def probe(t: float) -> float:
        nonlocal best_t, best_v
        t = min(max(t, lo), hi)  # grid accumulation can overshoot by an ulp
        v = exact_success(fsm, t, top_p)
        if v > best_v:
            best_t, best_v = t, v
        return v

    ts = np.arange(lo, hi + grid_step / 2, grid_step)
    values = [probe(float(t)) for t in ts]
    i = int(np.argmax(values))
    a = float(ts[max(i - 1, 0)])
    b = float(ts[min(i + 1, len(ts) - 1)])
    while b - a > refine_tol:
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if probe(m1) < probe(m2):
            a = m1
        else:
            b = m2
    probe((a + b) / 2.0)
    return best_t, best_v


def topp_robustness_grid(
    teacher: Fsm,
    student: Fsm,
    topp_list,
    bounds: tuple[float, float] = (0.05, 5.0),
) -> tuple[GridRow, ...]:
    """Optimize both machines at each top-p and report the success gap."""
    values = [float(x) for x in topp_list]
    if not values:
        raise EmptySetError("top-p list is empty")
    rows = []
    for top_p in values:
        t_t, p_t = optimize_temperature(teacher, top_p, bounds)
        t_s, p_s = optimize_temperature(student, top_p, bounds)
        rows.append(
            GridRow(
                top_p=top_p,
                teacher_t_star=t_t,
                teacher_p_star=p_t,
                student_t_star=t_s,
                student_p_star=p_s,
                gap_pp=(p_s - p_t) * 100.0,
            )
        )
    return tuple(rows)


def monte_carlo_success(
    fsm: Fsm, temperature: float, top_p: float, n: int, seed: int
) -> McResult:
    """Estimate success by simulating n trajectories with the Gumbel-max sampler."""
    if n < 1:
        raise OutOfRangeError(f"n must be >= 1, got {n!r}")
    policies = [operational_policy(fsm.root, temperature, top_p)]
    corrects = [fsm.root.correct_tokens]
    policies.append(operational_policy(fsm.fork, temperature, top_p))
    corrects.append(fsm.fork.correct_tokens)
    lock_policy = operational_policy(fsm.lock, temperature, top_p)
    for _ in range(fsm.n_locks):
        policies.append(lock_policy)
        corrects.append(fsm.lock.correct_tokens)
    rng = make_stream(seed)
    successes = 0
    done = 0
    while done < n:
        batch = min(MC_BATCH, n - done)
        alive = np.ones(batch, dtype=bool)
        for policy, correct in zip(policies, corrects):
            tokens = gumbel_max_sample(policy, rng, size=batch)
            alive &= np.isin(tokens, np.asarray(correct, dtype=np.int64))
        successes += int(alive.sum())
        done += batch
    estimate = successes / n
    stderr = float(np.sqrt(estimate * (1.0 - estimate) / n))
    return McResult(estimate=estimate, stderr=stderr)

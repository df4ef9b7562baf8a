"""Command-line driver: subcommands, config files, dump ingestion, reports.

Every run is a pure function of its flags (plus an explicit seed where
sampling is involved), emitted as CSV or JSON with 9-significant-digit
numbers, so identical invocations produce byte-identical outputs. Exit
codes: 0 success, 1 usage/validation error (nothing written), 2
computation or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import toyfsm
from .categorical import Categorical, entropy, normalize, restrict
from .decode import (
    DecodeConfig,
    argmax_token,
    greedy_guard,
    rank_descending,
    retained_support,
)
from .errors import (
    EmptyReportError,
    InvalidDistributionError,
    IoError,
    ParseError,
    SsdLabError,
)
from .objective import ssd_target, three_term_decomposition, train_local_student
from .sensitivity import (
    entropy_decomposition,
    entropy_temperature_response,
    escort_distribution,
    feasible_topp_interval,
    prefix_mass_curve,
    set_mass_log_sensitivity,
)

_UNSET = object()

# Contractual column orders; tests compare these headers byte for byte.
SWEEP_HEADER = ["temperature", "top_p", "teacher_success", "student_success", "gap"]
DECOMPOSITION_HEADER = [
    "step", "total", "gate", "reshape", "align", "on_support_tv", "off_support_mass",
]
DUMP_HEADER = [
    "context_id", "label", "kept_count", "kept_mass",
    "head_entropy", "total_entropy", "top20_mass",
]


@dataclass(frozen=True)
class DumpRecord:
    """One externally produced per-context probability vector."""

    context_id: str
    probs: Categorical
    label: str = ""


# ---------------------------------------------------------------------------
# flag plumbing

def _floats(text: str) -> list[float]:
    values = [float(x) for x in text.split(",") if x.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of numbers")
    return values


def _ints(text: str) -> list[int]:
    values = [int(x) for x in text.split(",") if x.strip()]
    if not values:
        raise ValueError("expected a comma-separated list of integers")
    return values


def _grid(text: str) -> list[float]:
    """Either comma-separated values or an inclusive lo:hi:step range."""
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0 or hi < lo:
            raise ValueError("range must be lo:hi:step with step > 0 and hi >= lo")
        return [float(t) for t in np.arange(lo, hi + step / 2, step)]
    return _floats(text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _positive(x) -> bool:
    return x > 0


def _non_negative(x) -> bool:
    return x >= 0


def _unit_interval(x) -> bool:
    return 0.0 < x <= 1.0


def _open_unit(x) -> bool:
    return 0.0 < x < 1.0


def _all_positive(xs) -> bool:
    return all(x > 0 for x in xs)


def _all_unit(xs) -> bool:
    return all(0.0 < x <= 1.0 for x in xs)


@dataclass(frozen=True)
class Flag:
    """One CLI option: converter, default, range check, and help text."""

    name: str  # long option, e.g. "--top-p"
    convert: Callable[[str], Any] | None
    default: Any = None
    help: str = ""
    required: bool = False
    is_switch: bool = False
    choices: tuple[str, ...] | None = None
    check: Callable[[Any], bool] | None = None
    check_msg: str = ""

    @property
    def dest(self) -> str:
        return self.name.lstrip("-").replace("-", "_")


_OUTPUT_FLAGS = [
    Flag("--output", str, "-", "output path ('-' for stdout)"),
    Flag("--format", str, "csv", "output format", choices=("csv", "json")),
    Flag("--config", str, None, "key=value config file; flags win on conflict"),
]

_DECODE_FLAGS = [
    Flag("--probs", _floats, None, "token weights, comma separated", required=True),
    Flag("--temperature", float, 1.0, "decode temperature",
         check=_positive, check_msg="temperature must be > 0"),
    Flag("--top-k", int, 0, "top-k cutoff (0 disables)",
         check=_non_negative, check_msg="top-k must be >= 0"),
    Flag("--top-p", float, 1.0, "top-p threshold (1 disables)",
         check=_unit_interval, check_msg="top-p must lie in (0, 1]"),
]

_TRAIN_FLAGS = [
    Flag("--learning-rate", float, 0.5, "gradient descent step size",
         check=_positive, check_msg="learning-rate must be > 0"),
    Flag("--max-steps", int, 100_000, "iteration cap",
         check=_non_negative, check_msg="max-steps must be >= 0"),
    Flag("--tv-tolerance", float, 1e-6, "on-support TV stopping threshold",
         check=_positive, check_msg="tv-tolerance must be > 0"),
    Flag("--log-every", int, 1, "record every Nth step (last step always kept)",
         check=_positive, check_msg="log-every must be >= 1"),
]

_SENSITIVITY_FLAGS = [
    Flag("--mode", str, "escort", "analysis mode",
         choices=("escort", "entropy", "curve", "feasible")),
    Flag("--probs", _floats, None, "token weights for escort/entropy/curve modes"),
    Flag("--support", _ints, None, "support index set (default: full alphabet)"),
    Flag("--gamma", float, 1.0, "escort exponent",
         check=_positive, check_msg="gamma must be > 0"),
    Flag("--event", _ints, None, "event index set inside the support"),
    Flag("--tau", float, 1.0, "evaluation temperature",
         check=_positive, check_msg="tau must be > 0"),
    Flag("--k", int, 0, "prefix length (0 = all positive tokens)",
         check=_non_negative, check_msg="k must be >= 0"),
    Flag("--lock-probs", _floats, None, "lock-side weights (feasible mode)"),
    Flag("--fork-probs", _floats, None, "fork-side weights (feasible mode)"),
    Flag("--lock-rank", int, 1, "required lock rank",
         check=_positive, check_msg="lock-rank must be >= 1"),
    Flag("--fork-rank", int, 2, "required fork rank",
         check=_positive, check_msg="fork-rank must be >= 1"),
]

_FSM_FLAGS = [
    Flag("--tail-ratio", float, toyfsm.DEFAULT_TAIL_RATIO, "geometric tail ratio",
         check=_open_unit, check_msg="tail-ratio must lie in (0, 1)"),
    Flag("--lock-head", _floats, list(toyfsm.LOCK_HEAD), "lock head values"),
    Flag("--fork-head", _floats, list(toyfsm.FORK_HEAD), "fork head values"),
    Flag("--root-head", _floats, list(toyfsm.ROOT_HEAD), "root head values"),
    Flag("--vocab-size", int, toyfsm.VOCAB_SIZE, "alphabet size",
         check=lambda v: v >= 2, check_msg="vocab-size must be >= 2"),
    Flag("--n-locks", int, toyfsm.DEFAULT_N_LOCKS, "lock states per path",
         check=_positive, check_msg="n-locks must be >= 1"),
    Flag("--t-train", float, 0.9, "distillation training temperature",
         check=_positive, check_msg="t-train must be > 0"),
    Flag("--train-top-p", float, 0.85, "distillation training top-p",
         check=_unit_interval, check_msg="train-top-p must lie in (0, 1]"),
]

_ROLE_FLAG = Flag("--role", str, "teacher", "which machine to evaluate",
                  choices=("teacher", "student"))

SUBCOMMANDS: dict[str, list[Flag]] = {
    "decode": _DECODE_FLAGS,
    "target": _DECODE_FLAGS,
    "decompose": _DECODE_FLAGS + [
        Flag("--student-probs", _floats, None,
             "student weights (default: same as --probs)"),
    ],
    "train-student": _DECODE_FLAGS + _TRAIN_FLAGS,
    "sensitivity": _SENSITIVITY_FLAGS,
    "toy-sweep": _FSM_FLAGS + [
        Flag("--t-grid", _grid, None, "temperatures: list or lo:hi:step",
             required=True, check=_all_positive,
             check_msg="t-grid entries must be > 0"),
        Flag("--top-p", float, 0.80, "evaluation top-p",
             check=_unit_interval, check_msg="top-p must lie in (0, 1]"),
    ],
    "toy-optimize": _FSM_FLAGS + [
        _ROLE_FLAG,
        Flag("--top-p", float, 0.80, "evaluation top-p",
             check=_unit_interval, check_msg="top-p must lie in (0, 1]"),
        Flag("--t-min", float, 0.05, "lower temperature bound",
             check=_positive, check_msg="t-min must be > 0"),
        Flag("--t-max", float, 5.0, "upper temperature bound",
             check=_positive, check_msg="t-max must be > 0"),
    ],
    "toy-grid": _FSM_FLAGS + [
        Flag("--top-p", _floats, [0.65, 0.70, 0.75, 0.80, 0.85, 0.90],
             "top-p values, comma separated",
             check=_all_unit, check_msg="top-p values must lie in (0, 1]"),
        Flag("--t-min", float, 0.05, "lower temperature bound",
             check=_positive, check_msg="t-min must be > 0"),
        Flag("--t-max", float, 5.0, "upper temperature bound",
             check=_positive, check_msg="t-max must be > 0"),
    ],
    "toy-mc": _FSM_FLAGS + [
        _ROLE_FLAG,
        Flag("--temperature", float, None, "evaluation temperature", required=True,
             check=_positive, check_msg="temperature must be > 0"),
        Flag("--top-p", float, 0.80, "evaluation top-p",
             check=_unit_interval, check_msg="top-p must lie in (0, 1]"),
        Flag("--n", int, 1_000_000, "trajectory count",
             check=_positive, check_msg="n must be >= 1"),
        Flag("--seed", int, 0, "random seed"),
    ],
    "analyze-dump": [
        Flag("--input", str, None, "line-delimited record file", required=True),
        Flag("--skip-bad", None, False, "skip malformed lines instead of aborting",
             is_switch=True),
        Flag("--temperature", float, 1.0, "pipeline temperature",
             check=_positive, check_msg="temperature must be > 0"),
        Flag("--top-k", int, 0, "pipeline top-k (0 disables)",
             check=_non_negative, check_msg="top-k must be >= 0"),
        Flag("--top-p", float, 1.0, "pipeline top-p (1 disables)",
             check=_unit_interval, check_msg="top-p must lie in (0, 1]"),
    ],
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # validation failures must exit 1, not argparse's default 2
    def error(self, message: str):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="ssdlab", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name, flags in SUBCOMMANDS.items():
        sub = subs.add_parser(name)
        for flag in flags + _OUTPUT_FLAGS:
            if flag.is_switch:
                sub.add_argument(flag.name, action="store_true", default=_UNSET,
                                 help=flag.help)
            elif flag.choices:
                sub.add_argument(flag.name, type=flag.convert, default=_UNSET,
                                 choices=flag.choices, help=flag.help)
            else:
                sub.add_argument(flag.name, type=flag.convert, default=_UNSET,
                                 help=flag.help)
    return parser


def load_config(path: str) -> dict[str, str]:
    """Read a flat key = value file; # starts a comment, blank lines ignored."""
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _UsageError(f"config line {lineno}: expected key = value")
            key, value = line.split("=", 1)
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def resolve_args(ns: argparse.Namespace) -> dict[str, Any]:
    """Merge CLI values, config file values, and declared defaults; validate ranges."""
    flags = SUBCOMMANDS[ns.command] + _OUTPUT_FLAGS
    by_dest = {flag.dest: flag for flag in flags}
    config: dict[str, str] = {}
    config_path = getattr(ns, "config")
    if config_path is not _UNSET and config_path is not None:
        try:
            config = load_config(config_path)
        except OSError as exc:
            raise _UsageError(f"cannot read config file: {exc}")
        unknown = set(config) - set(by_dest)
        if unknown:
            raise _UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    resolved: dict[str, Any] = {"command": ns.command}
    for flag in flags:
        value = getattr(ns, flag.dest)
        if value is _UNSET:
            if flag.dest in config:
                raw = config[flag.dest]
                try:
                    if flag.is_switch:
                        value = _parse_bool(raw)
                    else:
                        value = flag.convert(raw)
                except ValueError as exc:
                    raise _UsageError(f"config key {flag.dest}: {exc}")
                if flag.choices and value not in flag.choices:
                    raise _UsageError(
                        f"config key {flag.dest}: must be one of {flag.choices}"
                    )
            else:
                value = flag.default
        if value is None and flag.required:
            raise _UsageError(f"missing required option {flag.name}")
        if value is not None and flag.check is not None and not flag.check(value):
            raise _UsageError(flag.check_msg)
        resolved[flag.dest] = value
    return resolved


# ---------------------------------------------------------------------------
# report emission

def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value) + 0.0:.9g}"  # +0.0 folds -0.0 into 0
    return str(value)


def _json_value(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value) + 0.0:.9g}")
    return str(value)


def emit_report(rows, fmt: str, path: str, header: list[str]) -> None:
    """Write rows as CSV or JSON with 9-significant-digit numbers."""
    if not rows:
        raise EmptyReportError("no rows to report")
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        text = buffer.getvalue()
    else:
        payload = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# dump ingestion

def _parse_record(line: str) -> DumpRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}")
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object")
    if "context_id" not in obj:
        raise ParseError("missing context_id")
    context_id = str(obj["context_id"])
    label = str(obj.get("label", ""))
    has_probs = "probs" in obj
    has_logits = "logits" in obj
    if has_probs == has_logits:
        raise ParseError("record needs exactly one of probs or logits")
    try:
        values = np.asarray(obj["probs"] if has_probs else obj["logits"], dtype=float)
    except (TypeError, ValueError):
        raise ParseError("probability field is not a numeric array")
    if has_logits:
        if values.ndim != 1 or values.size == 0 or not np.all(np.isfinite(values)):
            raise InvalidDistributionError("logits must be a finite 1-d array")
        w = np.exp(values - values.max())
        values = w / w.sum()
    try:
        probs = Categorical(values)
    except SsdLabError as exc:
        raise InvalidDistributionError(str(exc)) from exc
    return DumpRecord(context_id=context_id, probs=probs, label=label)


def ingest_dump(path: str, skip_bad: bool = False) -> list[DumpRecord]:
    """Load line-delimited records; abort on any malformed line unless skipping."""
    records: list[DumpRecord] = []
    problems: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                records.append(_parse_record(line))
            except SsdLabError as exc:
                problems.append((lineno, str(exc)))
    if problems:
        if not skip_bad:
            raise ParseError(
                "; ".join(f"line {n}: {msg}" for n, msg in problems)
            )
        for n, msg in problems:
            print(f"warning: skipped line {n}: {msg}", file=sys.stderr)
    return records


# ---------------------------------------------------------------------------
# subcommand runners

def _decode_config(args) -> DecodeConfig:
    return DecodeConfig(
        temperature=args["temperature"], top_k=args["top_k"], top_p=args["top_p"]
    )


def _run_decode(args):
    p0 = normalize(args["probs"])
    header = ["token", "base_prob", "operational_prob"]
    if greedy_guard(args["temperature"]):
        token = argmax_token(p0)
        return header, [(token, float(p0.probs[token]), 1.0)]
    rs = retained_support(p0, _decode_config(args))
    rows = [
        (v, float(p0.probs[v]), float(rs.operational.probs[v])) for v in rs.support
    ]
    return header, rows


def _run_target(args):
    p0 = normalize(args["probs"])
    target = ssd_target(p0, _decode_config(args))
    header = ["token", "base_prob", "target_prob"]
    rows = [(v, float(p0.probs[v]), float(target.q.probs[v])) for v in target.support]
    return header, rows


def _decomposition_row(target, p_theta: Categorical, step: int):
    breakdown = three_term_decomposition(target, p_theta)
    members = np.asarray(target.support, dtype=np.int64)
    km = float(p_theta.probs[members].sum())
    tv = 0.5 * float(
        np.abs(restrict(p_theta, members).probs[members] - target.q.probs[members]).sum()
    )
    return (
        step, breakdown.total, breakdown.gate, breakdown.reshape, breakdown.align,
        tv, 1.0 - km,
    )


def _run_decompose(args):
    p0 = normalize(args["probs"])
    student = args["student_probs"]
    p_theta = p0 if student is None else normalize(student)
    target = ssd_target(p0, _decode_config(args))
    return DECOMPOSITION_HEADER, [_decomposition_row(target, p_theta, 0)]


def _run_train_student(args):
    p0 = normalize(args["probs"])
    cfg = _decode_config(args)
    trajectory = train_local_student(
        p0,
        cfg,
        learning_rate=args["learning_rate"],
        max_steps=args["max_steps"],
        tv_tolerance=args["tv_tolerance"],
    )
    target = ssd_target(p0, cfg)
    every = args["log_every"]
    rows = []
    for state in trajectory:
        if state.step % every and state is not trajectory[-1]:
            continue
        z = state.logits
        w = np.exp(z - z.max())
        p_theta = Categorical(w / w.sum())
        rows.append(_decomposition_row(target, p_theta, state.step))
    return DECOMPOSITION_HEADER, rows


def _run_sensitivity(args):
    mode = args["mode"]
    if mode == "feasible":
        if args["lock_probs"] is None or args["fork_probs"] is None:
            raise _UsageError("feasible mode requires --lock-probs and --fork-probs")
        lock_p = normalize(args["lock_probs"])
        fork_p = normalize(args["fork_probs"])
        k = args["k"]
        if k == 0:
            k = min(
                int((lock_p.probs > 0).sum()), int((fork_p.probs > 0).sum())
            )
        report = feasible_topp_interval(
            lock_p, args["lock_rank"], fork_p, args["fork_rank"], args["tau"], k
        )
        header = ["tau", "k", "lock_rank", "fork_rank", "lower", "upper", "feasible"]
        row = (
            report.tau, report.k, args["lock_rank"], args["fork_rank"],
            report.lower, report.upper, report.feasible,
        )
        return header, [row]
    if args["probs"] is None:
        raise _UsageError(f"{mode} mode requires --probs")
    p0 = normalize(args["probs"])
    support = args["support"]
    members = tuple(support) if support is not None else tuple(range(p0.alphabet_size))
    if mode == "escort":
        gamma = args["gamma"]
        pi = escort_distribution(p0, members, gamma)
        response = entropy_temperature_response(p0, members, 1.0 / gamma)
        header = [
            "gamma", "escort_entropy", "entropy_response",
            "event_mass", "event_log_sensitivity",
        ]
        if args["event"] is None:
            return header, [(gamma, entropy(pi), response, "", "")]
        event = tuple(args["event"])
        mass = float(pi.probs[np.asarray(event, dtype=np.int64)].sum())
        slope = set_mass_log_sensitivity(p0, members, gamma, event)
        return header, [(gamma, entropy(pi), response, mass, slope)]
    if mode == "entropy":
        breakdown = entropy_decomposition(p0, members)
        km = float(p0.probs[np.asarray(members, dtype=np.int64)].sum())
        header = ["kept_mass", "gate_entropy", "head_entropy", "tail_entropy", "total"]
        return header, [(
            km, breakdown.gate_entropy, breakdown.head_entropy,
            breakdown.tail_entropy, breakdown.total,
        )]
    # curve
    k = args["k"]
    if k == 0:
        k = int((p0.probs > 0).sum())
    curve = prefix_mass_curve(p0, args["tau"], k)
    return ["rank", "prefix_mass"], [(m + 1, float(curve[m])) for m in range(k)]


def _build_machines(args) -> tuple[toyfsm.Fsm, toyfsm.Fsm]:
    teacher = toyfsm.build_toy_fsm(
        tail_ratio=args["tail_ratio"],
        lock_head=args["lock_head"],
        fork_head=args["fork_head"],
        root_head=args["root_head"],
        vocab_size=args["vocab_size"],
        n_locks=args["n_locks"],
    )
    student = toyfsm.distill_fsm(teacher, args["t_train"], args["train_top_p"])
    return teacher, student


def _run_toy_sweep(args):
    teacher, student = _build_machines(args)
    sweep = toyfsm.temperature_sweep(teacher, student, args["t_grid"], args["top_p"])
    rows = [
        (r.temperature, r.top_p, r.teacher_success, r.student_success, r.gap)
        for r in sweep.rows
    ]
    return SWEEP_HEADER, rows


def _run_toy_optimize(args):
    teacher, student = _build_machines(args)
    fsm = teacher if args["role"] == "teacher" else student
    if not args["t_min"] < args["t_max"]:
        raise _UsageError("t-min must be below t-max")
    t_star, p_star = toyfsm.optimize_temperature(
        fsm, args["top_p"], (args["t_min"], args["t_max"])
    )
    header = ["role", "top_p", "t_star", "p_star"]
    return header, [(args["role"], args["top_p"], t_star, p_star)]


def _run_toy_grid(args):
    teacher, student = _build_machines(args)
    if not args["t_min"] < args["t_max"]:
        raise _UsageError("t-min must be below t-max")
    rows = toyfsm.topp_robustness_grid(
        teacher, student, args["top_p"], (args["t_min"], args["t_max"])
    )
    header = [
        "top_p", "teacher_t_star", "teacher_p_star",
        "student_t_star", "student_p_star", "gap_pp",
    ]
    return header, [
        (
            r.top_p, r.teacher_t_star, r.teacher_p_star,
            r.student_t_star, r.student_p_star, r.gap_pp,
        )
        for r in rows
    ]


def _run_toy_mc(args):
    teacher, student = _build_machines(args)
    fsm = teacher if args["role"] == "teacher" else student
    result = toyfsm.monte_carlo_success(
        fsm, args["temperature"], args["top_p"], args["n"], args["seed"]
    )
    exact = toyfsm.exact_success(fsm, args["temperature"], args["top_p"])
    header = [
        "role", "temperature", "top_p", "n", "seed",
        "estimate", "stderr", "exact", "abs_error",
    ]
    row = (
        args["role"], args["temperature"], args["top_p"], args["n"], args["seed"],
        result.estimate, result.stderr, exact, abs(result.estimate - exact),
    )
    return header, [row]


def _run_analyze_dump(args):
    records = ingest_dump(args["input"], skip_bad=args["skip_bad"])
    cfg = _decode_config(args)
    rows = []
    for record in records:
        rs = retained_support(record.probs, cfg)
        order = rank_descending(record.probs)
        top20 = float(record.probs.probs[order[:20]].sum())
        rows.append(
            (
                record.context_id,
                record.label,
                len(rs.support),
                rs.kept_mass,
                entropy(rs.operational),
                entropy(record.probs),
                top20,
            )
        )
    return DUMP_HEADER, rows


_RUNNERS = {
    "decode": _run_decode,
    "target": _run_target,
    "decompose": _run_decompose,
    "train-student": _run_train_student,
    "sensitivity": _run_sensitivity,
    "toy-sweep": _run_toy_sweep,
    "toy-optimize": _run_toy_optimize,
    "toy-grid": _run_toy_grid,
    "toy-mc": _run_toy_mc,
    "analyze-dump": _run_analyze_dump,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        args = resolve_args(ns)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    try:
        header, rows = _RUNNERS[args["command"]](args)
        emit_report(rows, args["format"], args["output"], header)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SsdLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()

"""Command-line surface: schemas, determinism, config merging, exit codes."""

import json

import numpy as np
import pytest

from ssdlab import (
    DecodeConfig,
    exact_success,
    normalize,
    retained_support,
    ssd_target,
)
from ssdlab.cli import (
    DECOMPOSITION_HEADER,
    DUMP_HEADER,
    SWEEP_HEADER,
    emit_report,
    ingest_dump,
    main,
)
from ssdlab.errors import EmptyReportError, InvalidDistributionError, ParseError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(text):
    lines = text.strip().split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestDecodeCommand:
    def test_rows_match_library(self, capsys):
        code, out, _ = run(
            capsys, "decode", "--probs", "0.5,0.3,0.2",
            "--temperature", "0.7", "--top-p", "0.9",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["token", "base_prob", "operational_prob"]
        p0 = normalize([0.5, 0.3, 0.2])
        rs = retained_support(p0, DecodeConfig(temperature=0.7, top_p=0.9))
        assert [int(r[0]) for r in rows] == list(rs.support)
        for row, v in zip(rows, rs.support):
            assert float(row[2]) == pytest.approx(rs.operational.probs[v], abs=1e-9)

    def test_greedy_guard_short_circuits(self, capsys):
        code, out, _ = run(
            capsys, "decode", "--probs", "0.2,0.5,0.3", "--temperature", "1e-6"
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert rows == [["1", "0.5", "1"]]

    def test_weights_are_normalized(self, capsys):
        code, out, _ = run(capsys, "decode", "--probs", "5,3,2")
        assert code == 0
        _, rows = csv_rows(out)
        assert [r[1] for r in rows] == ["0.5", "0.3", "0.2"]

    @pytest.mark.parametrize(
        "argv",
        [
            ("decode",),  # missing required --probs
            ("decode", "--probs", "0.5,0.5", "--temperature", "0"),
            ("decode", "--probs", "0.5,0.5", "--top-p", "1.5"),
            ("decode", "--probs", "0.5,0.5", "--top-k", "-2"),
            ("decode", "--probs", "0.5,0.5", "--format", "xml"),
            ("unknown-command",),
        ],
    )
    def test_usage_errors_exit_one(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 1
        assert out == ""

    def test_invalid_probs_exit_one(self, capsys):
        code, _, err = run(capsys, "decode", "--probs", "0.5,oops")
        assert code == 1


class TestTargetCommand:
    def test_matches_library_target(self, capsys):
        code, out, _ = run(
            capsys, "target", "--probs", "0.5,0.3,0.2",
            "--temperature", "0.8", "--top-p", "0.8",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["token", "base_prob", "target_prob"]
        target = ssd_target(
            normalize([0.5, 0.3, 0.2]), DecodeConfig(temperature=0.8, top_p=0.8)
        )
        assert [int(r[0]) for r in rows] == list(target.support)
        for row, v in zip(rows, target.support):
            assert float(row[2]) == pytest.approx(target.q.probs[v], abs=1e-9)


class TestDecomposeCommand:
    def test_contract_schema(self, capsys):
        code, out, _ = run(
            capsys, "decompose", "--probs", "0.5,0.3,0.2",
            "--temperature", "0.9", "--top-p", "0.8",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == DECOMPOSITION_HEADER
        assert len(rows) == 1
        assert rows[0][0] == "0"

    def test_identity_settings_zero_variable_terms(self, capsys):
        # unit temperature and no truncation leave only the entropy floor
        code, out, _ = run(capsys, "decompose", "--probs", "0.5,0.3,0.2")
        assert code == 0
        _, rows = csv_rows(out)
        step, total, gate, reshape, align, tv, off = rows[0]
        assert gate == "0" and reshape == "0" and align == "0"
        assert float(tv) < 1e-15 and off == "0"
        assert float(total) == pytest.approx(1.02965301, abs=1e-7)

    def test_explicit_student_probs(self, capsys):
        code, out, _ = run(
            capsys, "decompose", "--probs", "0.5,0.3,0.2",
            "--student-probs", "0.25,0.5,0.25", "--top-p", "0.8",
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][6]) == pytest.approx(0.25, abs=1e-9)


class TestTrainCommand:
    def test_logs_thin_but_keep_last(self, capsys):
        code, out, _ = run(
            capsys, "train-student", "--probs", "0.5,0.3,0.2", "--top-p", "0.8",
            "--temperature", "0.7", "--max-steps", "50", "--log-every", "10",
            "--learning-rate", "1.0",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == DECOMPOSITION_HEADER
        assert [int(r[0]) for r in rows] == [0, 10, 20, 30, 40, 50]

    def test_converged_run_stops_early(self, capsys):
        code, out, _ = run(
            capsys, "train-student", "--probs", "0.6,0.4",
            "--max-steps", "5000", "--learning-rate", "4.0", "--log-every", "1000",
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[-1][5]) < 1e-6  # on_support_tv at the last logged step


class TestSensitivityCommand:
    def test_escort_without_event_leaves_blanks(self, capsys):
        code, out, _ = run(
            capsys, "sensitivity", "--mode", "escort",
            "--probs", "0.5,0.3,0.2", "--gamma", "1.5",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == [
            "gamma", "escort_entropy", "entropy_response",
            "event_mass", "event_log_sensitivity",
        ]
        assert rows[0][3] == "" and rows[0][4] == ""

    def test_escort_with_event(self, capsys):
        code, out, _ = run(
            capsys, "sensitivity", "--mode", "escort",
            "--probs", "0.5,0.3,0.2", "--gamma", "2.0", "--event", "0,1",
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][3]) == pytest.approx(
            (0.25 + 0.09) / (0.25 + 0.09 + 0.04), abs=1e-9
        )

    def test_entropy_mode_identity(self, capsys):
        code, out, _ = run(
            capsys, "sensitivity", "--mode", "entropy",
            "--probs", "0.5,0.25,0.15,0.1", "--support", "0,1",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == [
            "kept_mass", "gate_entropy", "head_entropy", "tail_entropy", "total",
        ]
        km, gate, head, tail, total = (float(x) for x in rows[0])
        assert km == pytest.approx(0.75, abs=1e-9)
        # parts are individually rounded to 9 significant digits
        assert total == pytest.approx(gate + head + tail, abs=5e-8)

    def test_curve_mode_rows(self, capsys):
        code, out, _ = run(
            capsys, "sensitivity", "--mode", "curve",
            "--probs", "0.5,0.3,0.2", "--tau", "0.7",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["rank", "prefix_mass"]
        assert [r[0] for r in rows] == ["1", "2", "3"]
        assert float(rows[-1][1]) == 1.0

    def test_feasible_mode(self, capsys):
        code, out, _ = run(
            capsys, "sensitivity", "--mode", "feasible",
            "--lock-probs", "0.75,0.1,0.08,0.07",
            "--fork-probs", "0.3,0.28,0.22,0.2",
            "--lock-rank", "1", "--fork-rank", "3", "--tau", "1.0", "--k", "4",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == [
            "tau", "k", "lock_rank", "fork_rank", "lower", "upper", "feasible",
        ]
        assert rows[0][6] in ("true", "false")

    def test_missing_probs_is_usage_error(self, capsys):
        code, _, err = run(capsys, "sensitivity", "--mode", "entropy")
        assert code == 1


class TestToyCommands:
    def test_sweep_schema_and_values(self, capsys):
        code, out, _ = run(
            capsys, "toy-sweep", "--t-grid", "0.5,1.0,2.0", "--top-p", "0.8"
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == SWEEP_HEADER
        assert len(rows) == 3
        from ssdlab import build_toy_fsm, distill_fsm

        teacher = build_toy_fsm()
        student = distill_fsm(teacher, 0.9, 0.85)
        for row in rows:
            t = float(row[0])
            assert float(row[2]) == pytest.approx(
                exact_success(teacher, t, 0.8), abs=1e-8
            )
            assert float(row[4]) == pytest.approx(
                exact_success(student, t, 0.8) - exact_success(teacher, t, 0.8),
                abs=1e-8,
            )

    def test_sweep_range_grid(self, capsys):
        code, out, _ = run(
            capsys, "toy-sweep", "--t-grid", "0.5:1.0:0.25", "--top-p", "0.8"
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert [row[0] for row in rows] == ["0.5", "0.75", "1"]

    def test_optimize_narrow_bounds(self, capsys):
        code, out, _ = run(
            capsys, "toy-optimize", "--role", "teacher", "--top-p", "0.8",
            "--t-min", "0.6", "--t-max", "0.7",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["role", "top_p", "t_star", "p_star"]
        assert float(rows[0][2]) == pytest.approx(0.639468, abs=5e-4)
        assert float(rows[0][3]) == pytest.approx(0.08333595, abs=1e-6)

    def test_grid_single_cell(self, capsys):
        code, out, _ = run(
            capsys, "toy-grid", "--top-p", "0.8",
            "--t-min", "0.5", "--t-max", "2.5",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == [
            "top_p", "teacher_t_star", "teacher_p_star",
            "student_t_star", "student_p_star", "gap_pp",
        ]
        assert float(rows[0][5]) == pytest.approx(5.439606, abs=1e-3)

    def test_mc_reports_exact_and_error(self, capsys):
        code, out, _ = run(
            capsys, "toy-mc", "--role", "teacher", "--temperature", "0.8",
            "--top-p", "0.8", "--n", "20000", "--seed", "1",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == [
            "role", "temperature", "top_p", "n", "seed",
            "estimate", "stderr", "exact", "abs_error",
        ]
        estimate, exact, abs_err = (float(rows[0][i]) for i in (5, 7, 8))
        assert abs_err == pytest.approx(abs(estimate - exact), abs=1e-9)


class TestOutputHandling:
    def test_byte_identical_reruns(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        argv = [
            "toy-sweep", "--t-grid", "0.5:2.0:0.5", "--top-p", "0.8", "--format", "csv",
        ]
        assert main(argv + ["--output", str(first)]) == 0
        assert main(argv + ["--output", str(second)]) == 0
        capsys.readouterr()
        assert first.read_bytes() == second.read_bytes()

    def test_json_format_structure(self, capsys):
        code, out, _ = run(
            capsys, "decode", "--probs", "0.5,0.3,0.2", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert isinstance(payload, list)
        assert list(payload[0].keys()) == ["token", "base_prob", "operational_prob"]

    def test_csv_uses_newline_terminators(self, tmp_path, capsys):
        path = tmp_path / "out.csv"
        code = main(["decode", "--probs", "0.5,0.5", "--output", str(path)])
        capsys.readouterr()
        assert code == 0
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")

    def test_nine_significant_digits(self, capsys):
        code, out, _ = run(
            capsys, "decode", "--probs", "1,1,1", "--format", "csv"
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert rows[0][1] == "0.333333333"

    def test_unwritable_output_exits_two(self, capsys):
        code, _, err = run(
            capsys, "decode", "--probs", "0.5,0.5",
            "--output", "/nonexistent-dir/out.csv",
        )
        assert code == 2

    def test_emit_report_rejects_empty(self, tmp_path):
        with pytest.raises(EmptyReportError):
            emit_report([], "csv", str(tmp_path / "x.csv"), ["a"])
        assert not (tmp_path / "x.csv").exists()


class TestConfigFile:
    def test_config_supplies_required_flag(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("probs = 0.5,0.3,0.2\ntop-p = 0.8  # trailing comment\n")
        code, out, _ = run(capsys, "decode", "--config", str(cfg))
        assert code == 0
        _, rows = csv_rows(out)
        assert len(rows) == 2

    def test_flags_win_over_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("probs = 0.5,0.3,0.2\ntemperature = 0.5\n")
        code, out, _ = run(
            capsys, "decode", "--config", str(cfg), "--temperature", "1.0"
        )
        assert code == 0
        _, rows = csv_rows(out)
        # at T=1 with no truncation the operational equals the base
        assert rows[0][1] == rows[0][2]

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("probs = 0.5,0.5\nmystery = 3\n")
        code, _, err = run(capsys, "decode", "--config", str(cfg))
        assert code == 1
        assert "mystery" in err

    def test_bad_value_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("probs = 0.5,0.5\ntemperature = warm\n")
        code, _, _ = run(capsys, "decode", "--config", str(cfg))
        assert code == 1

    def test_missing_config_file_rejected(self, capsys):
        code, _, _ = run(capsys, "decode", "--probs", "1,1", "--config", "/no/such.cfg")
        assert code == 1

    def test_range_checks_apply_to_config_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("probs = 0.5,0.5\ntemperature = -2\n")
        code, _, _ = run(capsys, "decode", "--config", str(cfg))
        assert code == 1


class TestDumpIngestion:
    def _write(self, tmp_path, lines):
        path = tmp_path / "dump.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_probs_and_logits_records(self, tmp_path):
        path = self._write(
            tmp_path,
            [
                json.dumps({"context_id": "a", "probs": [0.5, 0.3, 0.2]}),
                json.dumps({"context_id": "b", "logits": [1.0, 0.0, -1.0],
                            "label": "tagged"}),
            ],
        )
        records = ingest_dump(str(path))
        assert [r.context_id for r in records] == ["a", "b"]
        assert records[1].label == "tagged"
        z = np.array([1.0, 0.0, -1.0])
        w = np.exp(z - z.max())
        np.testing.assert_allclose(records[1].probs.probs, w / w.sum(), atol=1e-12)

    def test_strict_mode_names_bad_lines(self, tmp_path):
        path = self._write(
            tmp_path,
            [
                json.dumps({"context_id": "a", "probs": [0.5, 0.5]}),
                json.dumps({"context_id": "bad", "probs": [0.5, -0.5]}),
                "not json at all",
            ],
        )
        with pytest.raises(ParseError) as info:
            ingest_dump(str(path))
        assert "line 2" in str(info.value)
        assert "line 3" in str(info.value)

    def test_skip_bad_warns_and_continues(self, tmp_path, capsys):
        path = self._write(
            tmp_path,
            [
                json.dumps({"context_id": "a", "probs": [0.5, 0.5]}),
                "garbage",
            ],
        )
        records = ingest_dump(str(path), skip_bad=True)
        assert len(records) == 1
        assert "line 2" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "record",
        [
            {"probs": [0.5, 0.5]},  # no context_id
            {"context_id": "x"},  # neither probs nor logits
            {"context_id": "x", "probs": [0.5, 0.5], "logits": [0.0, 0.0]},
            {"context_id": "x", "probs": [0.5, "half"]},
            {"context_id": "x", "logits": [0.0, float("nan")]}
            | {},  # non-finite logits
        ],
    )
    def test_malformed_records_rejected(self, tmp_path, record):
        try:
            text = json.dumps(record)
        except ValueError:
            text = str(record)
        path = self._write(tmp_path, [text])
        with pytest.raises(ParseError):
            ingest_dump(str(path))

    def test_missing_file_raises_filenotfound(self):
        with pytest.raises(FileNotFoundError):
            ingest_dump("/no/such/dump.jsonl")

    def test_analyze_dump_end_to_end(self, tmp_path, capsys):
        path = self._write(
            tmp_path,
            [
                json.dumps({"context_id": "ctx-1", "label": "fork",
                            "probs": [0.4, 0.3, 0.2, 0.1]}),
            ],
        )
        code, out, _ = run(
            capsys, "analyze-dump", "--input", str(path),
            "--temperature", "0.9", "--top-p", "0.8",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == DUMP_HEADER
        assert rows[0][0] == "ctx-1"
        assert rows[0][1] == "fork"
        kept = int(rows[0][2])
        assert kept == 3  # 0.4+0.3 < 0.8-eps so three tokens survive
        assert float(rows[0][6]) == 1.0  # top-20 covers a 4-token alphabet

    def test_analyze_dump_strict_failure_exits_two(self, tmp_path, capsys):
        path = self._write(tmp_path, ["broken"])
        out_file = tmp_path / "report.csv"
        code = main(["analyze-dump", "--input", str(path),
                     "--output", str(out_file)])
        capsys.readouterr()
        assert code == 2
        assert not out_file.exists()

    def test_analyze_dump_empty_input_exits_two(self, tmp_path, capsys):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        out_file = tmp_path / "report.csv"
        code = main(["analyze-dump", "--input", str(path),
                     "--output", str(out_file)])
        capsys.readouterr()
        assert code == 2
        assert not out_file.exists()

    def test_analyze_dump_missing_input_exits_two(self, capsys):
        code, _, err = run(capsys, "analyze-dump", "--input", "/no/such.jsonl")
        assert code == 2

"""Experiment-runner and CLI tests: grids, CSV bytes, oracle suite, exit codes."""

import io
import json
import math

import pytest

import weakrev as wr
from weakrev import ExperimentConfig, UsageError, emit_csv, run_experiment
from weakrev.cli import main
from weakrev.experiments import CSV_COLUMNS, DEATH_THRESHOLD


def csv_bytes(rows):
    buf = io.StringIO()
    emit_csv(rows, buf)
    return buf.getvalue().encode()


def small_ln_config(**overrides):
    base = dict(experiment="ln_vs_p", n_list=(4,), s_list=(0.0, 0.4),
                p_grid=(0.0, 0.4, 0.2))
    base.update(overrides)
    return ExperimentConfig(**base)


def test_unknown_experiment_rejected():
    with pytest.raises(UsageError):
        run_experiment(ExperimentConfig(experiment="resonance"))


@pytest.mark.parametrize("bad", [
    dict(experiment="mw_vs_p", n_list=(3, 4)),          # odd n for even-only sweep
    dict(experiment="ln_vs_p", n_list=(1,)),             # too few qubits
    dict(experiment="ln_vs_p", s_list=(0.0, 1.2)),       # strength out of range
    dict(experiment="ln_vs_p", theta=4.0),               # angle out of range
    dict(experiment="tel_fidelity_vs_p", theta=1.0),     # asymmetric resource
    dict(experiment="tel_fidelity_vs_p", n_list=(2, 4)),  # no assistant qubit
    dict(experiment="ln_vs_p", p_grid=(0.0, 1.0, 0.0)),  # zero step
    dict(experiment="ln_vs_p", p_grid=(0.8, 0.2, 0.1)),  # inverted range
    dict(experiment="ln_vs_p", n_list=(4,), m=5),        # cut larger than n-1
])
def test_invalid_grids_rejected(bad):
    with pytest.raises(UsageError):
        run_experiment(ExperimentConfig(**bad))


def test_rows_sorted_and_complete():
    rows, summary = run_experiment(small_ln_config())
    keys = [(row.n, row.s, row.p) for row in rows]
    assert keys == sorted(keys)
    assert len(rows) == 2 * 3  # two strengths, three damping points
    assert summary["rows"] == len(rows)
    assert summary["failures"] == 0
    assert all(row.experiment == "ln_vs_p" for row in rows)
    assert all(row.value is not None and row.r_opt is not None for row in rows)


def test_optimized_value_never_below_unprotected():
    rows, _ = run_experiment(small_ln_config())
    for row in rows:
        gp = wr.GhzParams(theta=row.theta, n=row.n)
        bare = wr.ln_block_eigenvalue(gp, wr.ProtocolParams(s=row.s, p=row.p, r=0.0)).e_ln
        assert row.value >= bare - 1e-12


def test_csv_format_and_header():
    rows, _ = run_experiment(small_ln_config())
    text = csv_bytes(rows).decode()
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == len(rows) + 1
    first = lines[1].split(",")
    assert first[0] == "ln_vs_p"
    assert first[1] == "4"
    assert first[2] == format(math.pi / 2.0, ".12g")


def test_reruns_are_byte_identical():
    rows_a, _ = run_experiment(small_ln_config())
    rows_b, _ = run_experiment(small_ln_config())
    assert csv_bytes(rows_a) == csv_bytes(rows_b)


def test_thread_count_does_not_change_output(monkeypatch):
    baseline = csv_bytes(run_experiment(small_ln_config())[0])
    monkeypatch.setenv("WEAKREV_THREADS", "4")
    rows, summary = run_experiment(small_ln_config())
    assert summary["threads"] == 4
    assert csv_bytes(rows) == baseline


def test_bad_thread_count_rejected(monkeypatch):
    monkeypatch.setenv("WEAKREV_THREADS", "several")
    with pytest.raises(UsageError):
        run_experiment(small_ln_config())
    monkeypatch.setenv("WEAKREV_THREADS", "0")
    with pytest.raises(UsageError):
        run_experiment(small_ln_config())


def test_emit_csv_header_only_and_handle_left_open():
    buf = io.StringIO()
    emit_csv([], buf)
    assert not buf.closed
    assert buf.getvalue() == ",".join(CSV_COLUMNS) + "\n"


def test_emit_csv_path_error_has_context(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="cannot write CSV"):
        emit_csv([], str(target))


def test_emit_csv_writes_file(tmp_path):
    target = tmp_path / "out.csv"
    rows, _ = run_experiment(small_ln_config())
    emit_csv(rows, str(target))
    assert target.read_bytes() == csv_bytes(rows)


def test_unreachable_crossing_flags_row_and_continues():
    # The amplitude measure of the balanced four-qubit state is still alive
    # at p = 0.3, so this critical sweep cannot bracket a crossing; the row
    # must carry the failure note instead of aborting the run.
    config = ExperimentConfig(experiment="critical_mw", n_list=(4,), s_list=(0.0,),
                              p_grid=(0.0, 0.3, 0.3))
    rows, summary = run_experiment(config)
    assert len(rows) == 1
    assert "failed" in rows[0].extra
    assert rows[0].value is None
    assert summary["failures"] == 1


def test_critical_damping_rows_track_the_closed_form():
    config = ExperimentConfig(experiment="critical_mw", n_list=(4, 6), s_list=(0.0, 0.2),
                              p_grid=(0.0, 1.0, 0.5))
    rows, summary = run_experiment(config)
    assert summary["failures"] == 0
    for row in rows:
        gp = wr.GhzParams(theta=math.pi / 2.0, n=row.n)
        exact = wr.critical_p_closed_form(gp, row.s, "mw")
        # The runner bisects the small positive threshold, not the zero
        # itself; the squared measure approaches zero quadratically, so the
        # crossing sits a couple of percent early. Ordering must be right.
        assert row.value == pytest.approx(exact, abs=3e-2)
        assert row.value < exact
    by_n = {}
    for row in rows:
        by_n.setdefault(row.n, []).append((row.s, row.value))
    for pairs in by_n.values():
        values = [v for _, v in sorted(pairs)]
        assert values == sorted(values)  # nondecreasing in s


def test_transmissivity_sweep_decreases_in_s_and_n():
    config = ExperimentConfig(experiment="transmissivity_vs_s", n_list=(4, 8),
                              s_list=(0.0, 0.3, 0.6), p_grid=(0.3, 0.3, 1.0))
    rows, summary = run_experiment(config)
    assert summary["failures"] == 0
    table = {(row.n, row.s): row.transmissivity for row in rows}
    for n in (4, 8):
        assert table[(n, 0.0)] > table[(n, 0.3)] > table[(n, 0.6)]
    for s in (0.0, 0.3, 0.6):
        if s > 0.0:
            assert table[(4, s)] > table[(8, s)]


def test_oracle_suite_all_green():
    rows, summary = run_experiment(ExperimentConfig(experiment="oracle_suite"))
    assert summary["ok"] is True
    assert summary["failures"] == 0
    assert {name for name in summary["checks"]} == {
        "ln_closed_vs_dense", "mw_closed_vs_dense", "compact_vs_dense",
        "norm_vs_success", "tel_closed_vs_sim", "is_closed_vs_sim",
        "eig_reconstruction"}
    for check in summary["checks"].values():
        assert check["ok"]
        assert check["max_dev"] <= check["tol"]
    assert all("ok" in row.extra for row in rows)


def test_cli_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["run", "ln_vs_p", "--n", "4", "--s", "0.0", "--p-start", "0.0",
                 "--p-stop", "0.4", "--p-step", "0.2", "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 4
    summary = json.loads(captured.err.strip().lstrip("# "))
    assert summary["experiment"] == "ln_vs_p"
    assert summary["failures"] == 0


def test_cli_stdout_when_no_out_flag(capsys):
    code = main(["run", "mw_vs_p", "--n", "4", "--s", "0.2", "--p-start", "0.1",
                 "--p-stop", "0.1", "--p-step", "1.0"])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.startswith(",".join(CSV_COLUMNS))
    assert "mw_vs_p" in captured.out


def test_cli_critical_shortcut(capsys):
    code = main(["critical", "ln", "--n", "4", "--s", "0.0", "--p-start", "0.0",
                 "--p-stop", "1.0", "--p-step", "0.5"])
    captured = capsys.readouterr()
    assert code == 0
    assert "critical_ln" in captured.out


def test_cli_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps({
        "n_list": [4], "s_list": [0.0, 0.5], "p_grid": [0.0, 0.2, 0.2]}))
    code = main(["run", "ln_vs_p", "--config", str(cfg), "--s", "0.3"])
    captured = capsys.readouterr()
    assert code == 0
    body = captured.out.strip().split("\n")[1:]
    assert len(body) == 2  # flag s overrides config's two strengths
    assert all(line.split(",")[3] == "0.3" for line in body)


def test_cli_bad_config_rejected(tmp_path, capsys):
    missing = main(["run", "ln_vs_p", "--config", str(tmp_path / "nope.json")])
    assert missing == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "ln_vs_p", "--config", str(bad)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"n_list": [4], "mode": "fast"}))
    assert main(["run", "ln_vs_p", "--config", str(unknown)]) == 2
    capsys.readouterr()


def test_cli_invalid_experiment_exits_2(capsys):
    assert main(["run", "telepathy"]) == 2
    capsys.readouterr()


def test_cli_usage_error_exits_2(capsys):
    assert main(["run", "mw_vs_p", "--n", "5"]) == 2
    captured = capsys.readouterr()
    assert "error:" in captured.err


def test_cli_verify_green(tmp_path, capsys):
    out = tmp_path / "oracle.csv"
    code = main(["verify", "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert out.exists()
    summary = json.loads(captured.err.strip().lstrip("# "))
    assert summary["ok"] is True


def test_threshold_is_small():
    # The runner's death threshold must stay well under every curve's
    # starting value so bracket checks reflect real crossings.
    assert 0.0 < DEATH_THRESHOLD <= 1e-3
